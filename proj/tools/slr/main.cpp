// slr: command line front end for the repositioning library.
//
// Every subcommand writes its outputs plus a run manifest recording the
// resolved parameters (configs inlined), so `slr rerun <manifest>` can
// reproduce the outputs byte for byte.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "slr/errors.hpp"
#include "slr/io.hpp"
#include "slr/nss.hpp"
#include "slr/scan.hpp"
#include "slr/scene.hpp"
#include "slr/selection.hpp"
#include "slr/validation.hpp"
#include "slr/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::optional<std::uint64_t> seed;
    json stats;
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw slr::ConfigError("cannot open " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw slr::ConfigError(path + ": " + e.what());
    }
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw slr::IoError("cannot write " + path);
    out << j.dump(2) << "\n";
    out.close();
    if (!out) throw slr::IoError("error writing " + path);
}

void ensure_parent_dir(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

std::string format_extension(slr::Format f) {
    switch (f) {
        case slr::Format::labeled_csv: return ".csv";
        case slr::Format::ply: return ".ply";
        default: return ".bin";
    }
}

slr::Format resolve_format(const std::string& flag, const std::string& out_path) {
    if (!flag.empty()) return slr::parse_format(flag);
    return slr::format_from_path(out_path);
}

slr::PointCloud load_cloud_auto(const std::string& path) {
    return slr::load_cloud(path, slr::format_from_path(path));
}

std::vector<slr::Vec2> read_positions_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw slr::IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw slr::IoError("missing header in " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("x,y", 0) != 0) throw slr::IoError("bad header in " + path + ", expected x,y");
    std::vector<slr::Vec2> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw slr::IoError("malformed record at " + path + ":" + std::to_string(line_no));
        try {
            const double x = std::stod(line.substr(0, comma));
            const double y = std::stod(line.substr(comma + 1));
            out.push_back({x, y});
        } catch (const std::exception&) {
            throw slr::IoError("malformed record at " + path + ":" + std::to_string(line_no));
        }
    }
    return out;
}

void write_positions_csv(const std::vector<slr::Vec2>& positions, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw slr::IoError("cannot write " + path);
    std::fputs("x,y\n", f);
    for (const auto& p : positions) std::fprintf(f, "%.17g,%.17g\n", p.x, p.y);
    if (std::fclose(f) != 0) throw slr::IoError("error writing " + path);
}

// File formats round-trip points and labels only, so the scan origin of an
// on-disk cloud comes from the manifest written next to it: either
// <path>.manifest.json (scan) or <dir>/manifest.json (slr-batch), matched by
// file name.
std::optional<slr::Vec3> sidecar_origin(const std::string& path) {
    const auto as_vec3 = [](const json& a) -> slr::Vec3 {
        return {a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
    };
    std::error_code ec;
    if (fs::exists(path + ".manifest.json", ec)) {
        const json m = read_json_file(path + ".manifest.json");
        if (m.contains("stats") && m.at("stats").contains("origin"))
            return as_vec3(m.at("stats").at("origin"));
    }
    const fs::path dir_manifest = fs::path(path).parent_path() / "manifest.json";
    if (fs::exists(dir_manifest, ec)) {
        const json m = read_json_file(dir_manifest.string());
        if (m.contains("outputs") && m.contains("stats") && m.at("stats").contains("origins")) {
            const auto& outputs = m.at("outputs");
            const std::string name = fs::path(path).filename().string();
            for (std::size_t i = 0; i < outputs.size(); ++i) {
                if (fs::path(outputs[i].get<std::string>()).filename().string() == name)
                    return as_vec3(m.at("stats").at("origins").at(i));
            }
        }
    }
    return std::nullopt;
}

slr::Vec3 resolve_scan_origin(const slr::PointCloud& cloud, const std::string& path) {
    if (const auto it = cloud.meta.find("scan_origin"); it != cloud.meta.end()) {
        std::istringstream ss(it->second);
        slr::Vec3 origin;
        if (ss >> origin.x >> origin.y >> origin.z) return origin;
        throw slr::ConfigError(path + ": malformed scan_origin metadata '" + it->second + "'");
    }
    if (const auto origin = sidecar_origin(path)) return *origin;
    throw slr::ConfigError(path + " has no recorded scan origin; pass --origin");
}

template <typename Fn>
void parallel_indices(std::size_t n, unsigned workers, Fn&& fn) {
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> threads;
    const unsigned w = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    threads.reserve(w);
    for (unsigned t = 0; t < w; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
}

// ---------------------------------------------------------------------------
// Command executors. Each consumes the resolved parameter object that also
// lands in the manifest, so reruns go through exactly this code path.

RunResult exec_gen_scene(const json& p) {
    slr::SceneConfig cfg = p.at("config").get<slr::SceneConfig>();
    cfg.validate();
    const std::string out = p.at("out").get<std::string>();
    const slr::Format fmt = slr::parse_format(p.at("format").get<std::string>());
    const slr::PointCloud cloud = slr::generate_dense_scene(cfg);
    ensure_parent_dir(out);
    slr::store_cloud(cloud, out, fmt);
    RunResult r;
    r.outputs = {out};
    r.seed = cfg.seed;
    r.stats = {{"points", cloud.size()}};
    if (auto it = cloud.meta.find("n_rectangles_surviving"); it != cloud.meta.end())
        r.stats["n_rectangles_surviving"] = std::stoull(it->second);
    return r;
}

RunResult exec_scan(const json& p) {
    slr::ScannerConfig cfg = p.at("scanner_config").get<slr::ScannerConfig>();
    cfg.validate();
    const std::string in_path = p.at("cloud").get<std::string>();
    const std::string out = p.at("out").get<std::string>();
    const slr::Format fmt = slr::parse_format(p.at("format").get<std::string>());
    const unsigned workers = p.value("workers", 1u);

    const slr::PointCloud cloud = load_cloud_auto(in_path);
    slr::Vec3 origin;
    if (p.contains("origin")) {
        const auto o = p.at("origin").get<std::vector<double>>();
        origin = {o.at(0), o.at(1), o.at(2)};
    } else {
        const auto xy = p.at("xy").get<std::vector<double>>();
        const double ground_radius = p.value("ground_radius", 3.0);
        origin = slr::compute_scanner_origin(cloud, xy.at(0), xy.at(1), cfg, ground_radius);
    }
    const slr::PointCloud scan = slr::simulate_scan(cloud, origin, cfg, workers);
    ensure_parent_dir(out);
    slr::store_cloud(scan, out, fmt);
    RunResult r;
    r.inputs = {in_path};
    r.outputs = {out};
    r.stats = {{"points_in", cloud.size()},
               {"points_out", scan.size()},
               {"origin", {origin.x, origin.y, origin.z}}};
    return r;
}

RunResult exec_select_positions(const json& p) {
    slr::SelectionConfig cfg = p.at("config").get<slr::SelectionConfig>();
    slr::AzimuthProfile min_profile;
    if (p.contains("min_profile")) p.at("min_profile").get_to(min_profile);
    const std::string in_path = p.at("cloud").get<std::string>();
    const std::string out = p.at("out").get<std::string>();
    const std::uint64_t n = p.at("n").get<std::uint64_t>();
    const std::uint64_t seed = p.value("seed", std::uint64_t{0});
    const unsigned workers = p.value("workers", 1u);

    const slr::PointCloud cloud = load_cloud_auto(in_path);
    const slr::SelectionReport report =
        slr::run_selection(cloud, cfg, min_profile, n, seed, workers);
    ensure_parent_dir(out);
    write_positions_csv(report.positions, out);
    RunResult r;
    r.inputs = {in_path};
    r.outputs = {out};
    r.seed = seed;
    r.stats = {{"cells_initial", report.cells_initial},
               {"cells_after_ground", report.cells_after_ground},
               {"cells_after_profile", report.cells_after_profile}};
    return r;
}

RunResult exec_profile(const json& p) {
    const auto paths = p.at("clouds").get<std::vector<std::string>>();
    const std::string out = p.at("out").get<std::string>();
    const std::string center_mode = p.value("center_mode", std::string("origin"));
    const double scanner_height = p.value("scanner_height", 1.65);
    const double ground_radius = p.value("ground_radius", 3.0);
    if (center_mode != "origin" && center_mode != "centroid")
        throw slr::ConfigError("center mode must be origin or centroid");

    std::vector<slr::AzimuthProfile> profiles;
    profiles.reserve(paths.size());
    for (const auto& path : paths) {
        const slr::PointCloud cloud = load_cloud_auto(path);
        slr::Vec3 center;
        if (center_mode == "origin") {
            center = resolve_scan_origin(cloud, path);
        } else {
            if (cloud.empty()) throw slr::EmptyCloudError(path + " is empty");
            double sx = 0.0;
            double sy = 0.0;
            for (const auto& q : cloud.points) {
                sx += q.x;
                sy += q.y;
            }
            const double n = static_cast<double>(cloud.size());
            slr::ScannerConfig cfg;
            cfg.scanner_height = scanner_height;
            center = slr::compute_scanner_origin(cloud, sx / n, sy / n, cfg, ground_radius);
        }
        profiles.push_back(slr::compute_azimuth_profile(cloud, center));
    }
    const slr::AzimuthProfile min_profile = slr::compute_minimum_profile(profiles);
    ensure_parent_dir(out);
    write_json_file(json(min_profile), out);
    RunResult r;
    r.inputs = paths;
    r.outputs = {out};
    r.stats = {{"reference_scans", paths.size()}};
    return r;
}

RunResult exec_slr_batch(const json& p) {
    slr::ScannerConfig cfg = p.at("scanner_config").get<slr::ScannerConfig>();
    cfg.validate();
    const std::string in_path = p.at("cloud").get<std::string>();
    const std::string positions_path = p.at("positions").get<std::string>();
    const std::string out_dir = p.at("out_dir").get<std::string>();
    const slr::Format fmt = slr::parse_format(p.at("format").get<std::string>());
    const double ground_radius = p.value("ground_radius", 3.0);
    const unsigned workers = p.value("workers", 1u);

    const std::vector<slr::Vec2> positions = read_positions_csv(positions_path);
    fs::create_directories(out_dir);
    RunResult r;
    r.inputs = {in_path, positions_path};
    if (positions.empty()) {
        r.stats = {{"positions", 0}};
        return r;
    }

    const slr::PointCloud primary = load_cloud_auto(in_path);
    int width = 1;
    for (std::size_t t = positions.size() - 1; t >= 10; t /= 10) ++width;
    width = std::max(width, 3);
    const std::string ext = format_extension(fmt);

    std::vector<std::string> names(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "slr_%0*zu", width, i);
        names[i] = (fs::path(out_dir) / (std::string(buf) + ext)).string();
    }
    std::vector<slr::Vec3> origins(positions.size());
    parallel_indices(positions.size(), workers, [&](std::size_t i) {
        origins[i] = slr::compute_scanner_origin(primary, positions[i].x, positions[i].y, cfg,
                                                 ground_radius);
        const slr::PointCloud scan = slr::simulate_scan(primary, origins[i], cfg, 1);
        slr::store_cloud(scan, names[i], fmt);
    });
    r.outputs = names;
    json origins_json = json::array();
    for (const auto& o : origins) origins_json.push_back({o.x, o.y, o.z});
    r.stats = {{"positions", positions.size()},
               {"points_in", primary.size()},
               {"origins", origins_json}};
    return r;
}

RunResult exec_validate(const json& p) {
    const slr::ExperimentConfig cfg = p.at("config").get<slr::ExperimentConfig>();
    const std::string out = p.at("out").get<std::string>();
    const unsigned workers = p.value("workers", 1u);

    const slr::ExperimentResult res = slr::run_experiment(
        cfg.scene, cfg.primary, cfg.secondary, cfg.n_positions, cfg.seed, cfg.options, workers);
    ensure_parent_dir(out);
    slr::write_similarity_csv(res.records, out);
    RunResult r;
    r.outputs = {out};
    r.seed = cfg.seed;
    r.stats = {{"dense_points", res.dense_points},
               {"primary_points", res.primary_points},
               {"cells_initial", res.selection.cells_initial},
               {"cells_after_ground", res.selection.cells_after_ground},
               {"cells_after_profile", res.selection.cells_after_profile}};
    for (const auto& [k, v] : res.meta) r.stats[k] = v;
    return r;
}

RunResult exec_hist(const json& p) {
    const auto paths = p.at("clouds").get<std::vector<std::string>>();
    const std::string out = p.at("out").get<std::string>();
    const double theta_res = p.value("theta_res", 0.144);
    const double max_distance = p.value("max_distance", 120.0);
    const bool horizontal = p.value("horizontal", false);
    const unsigned workers = p.value("workers", 1u);
    const bool sweep = p.contains("heights");

    RunResult r;
    r.inputs = paths;
    std::vector<slr::DistanceHistogram> hists;
    json fractions = json::array();

    if (sweep) {
        if (horizontal) throw slr::ConfigError("--horizontal is not available with --heights");
        const auto xy = p.at("xy").get<std::vector<double>>();
        const auto heights = p.at("heights").get<std::vector<double>>();
        slr::ScannerConfig cfg = p.at("scanner_config").get<slr::ScannerConfig>();
        cfg.validate();
        const double ground_radius = p.value("ground_radius", 3.0);
        const slr::HistogramBinParams bins{theta_res, max_distance};

        std::vector<std::vector<slr::HeightSweepEntry>> per_cloud;
        per_cloud.reserve(paths.size());
        for (const auto& path : paths) {
            const slr::PointCloud cloud = load_cloud_auto(path);
            const auto gf = slr::ground_fraction(cloud);
            fractions.push_back({{"cloud", path},
                                 {"ground_fraction", gf.fraction},
                                 {"unlabeled_warning", gf.unlabeled_warning}});
            per_cloud.push_back(slr::height_sweep(cloud, {xy.at(0), xy.at(1)}, heights, cfg, bins,
                                                  ground_radius, workers));
        }
        for (std::size_t h = 0; h < heights.size(); ++h) {
            std::vector<slr::DistanceHistogram> ground_parts;
            std::vector<slr::DistanceHistogram> non_ground_parts;
            for (const auto& entries : per_cloud) {
                ground_parts.push_back(entries[h].ground);
                non_ground_parts.push_back(entries[h].non_ground);
            }
            hists.push_back(slr::pool_histograms(ground_parts));
            hists.push_back(slr::pool_histograms(non_ground_parts));
        }
    } else {
        const double height = p.value("height", 1.65);
        const slr::PulseBinEdges edges = slr::pulse_sized_bins(height, theta_res, max_distance);
        std::vector<slr::ClassFilter> classes;
        for (const auto& name : p.at("classes").get<std::vector<std::string>>())
            classes.push_back(slr::parse_class_filter(name));

        std::vector<slr::PointCloud> clouds;
        std::vector<slr::Vec3> origins;
        clouds.reserve(paths.size());
        for (const auto& path : paths) {
            clouds.push_back(load_cloud_auto(path));
            const auto& cloud = clouds.back();
            if (p.contains("origin")) {
                const auto o = p.at("origin").get<std::vector<double>>();
                origins.push_back({o.at(0), o.at(1), o.at(2)});
            } else {
                origins.push_back(resolve_scan_origin(cloud, path));
            }
            const auto gf = slr::ground_fraction(cloud);
            fractions.push_back({{"cloud", path},
                                 {"ground_fraction", gf.fraction},
                                 {"unlabeled_warning", gf.unlabeled_warning}});
        }
        for (const auto filter : classes) {
            std::vector<slr::DistanceHistogram> parts;
            for (std::size_t i = 0; i < clouds.size(); ++i)
                parts.push_back(
                    slr::distance_histogram(clouds[i], origins[i], edges, filter, horizontal));
            hists.push_back(parts.size() > 1 ? slr::pool_histograms(parts) : parts.front());
        }
    }

    ensure_parent_dir(out);
    slr::write_histogram_csv(hists, out);
    r.outputs = {out};
    r.stats = {{"ground_fractions", fractions}};
    return r;
}

RunResult dispatch_command(const std::string& command, const json& params) {
    if (command == "gen-scene") return exec_gen_scene(params);
    if (command == "scan") return exec_scan(params);
    if (command == "select-positions") return exec_select_positions(params);
    if (command == "profile") return exec_profile(params);
    if (command == "slr-batch") return exec_slr_batch(params);
    if (command == "validate") return exec_validate(params);
    if (command == "hist") return exec_hist(params);
    throw slr::ConfigError("unknown command '" + command + "' in manifest");
}

std::string manifest_path_for(const json& params) {
    if (params.contains("out_dir"))
        return (fs::path(params.at("out_dir").get<std::string>()) / "manifest.json").string();
    return params.at("out").get<std::string>() + ".manifest.json";
}

int run_and_record(const std::string& command, const json& params) {
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult r = dispatch_command(command, params);
    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json manifest{{"tool_version", slr::kVersion},
                  {"command", command},
                  {"params", params},
                  {"inputs", r.inputs},
                  {"outputs", r.outputs},
                  {"duration_seconds", duration}};
    if (r.seed) manifest["seed"] = *r.seed;
    if (!r.stats.is_null()) manifest["stats"] = r.stats;
    write_json_file(manifest, manifest_path_for(params));
    return 0;
}

void print_error(const std::string& code, const std::string& message) {
    const json err{{"error", {{"code", code}, {"message", message}}}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
}

unsigned default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulated LiDAR repositioning toolkit"};
    app.set_version_flag("--version", std::string(slr::kVersion));
    app.require_subcommand(1);

    std::string command;
    json params;
    std::string rerun_manifest;

    // gen-scene
    {
        auto* sub = app.add_subcommand("gen-scene", "Generate a dense synthetic scene");
        struct GenOpts {
            std::string config, out, format;
            std::uint64_t seed = 0;
        };
        auto opts = std::make_shared<GenOpts>();
        sub->add_option("--config", opts->config, "Scene config JSON")->required();
        sub->add_option("--out", opts->out, "Output cloud path")->required();
        sub->add_option("--format", opts->format, "labeled_csv|ply|bin");
        auto* seed_opt = sub->add_option("--seed", opts->seed, "Override the config seed");
        sub->callback([&command, &params, opts, seed_opt] {
            command = "gen-scene";
            json cfg = read_json_file(opts->config);
            if (seed_opt->count() > 0) cfg["seed"] = opts->seed;
            params = {{"config", cfg},
                      {"out", opts->out},
                      {"format", slr::format_name(resolve_format(opts->format, opts->out))}};
        });
    }

    // scan
    {
        auto* sub = app.add_subcommand("scan", "Simulate a scan of a cloud");
        struct ScanOpts {
            std::string cloud, config, out, format;
            std::vector<double> origin, xy;
            double ground_radius = 3.0;
            unsigned workers = default_workers();
        };
        auto opts = std::make_shared<ScanOpts>();
        sub->add_option("--cloud", opts->cloud, "Input cloud")->required();
        sub->add_option("--scanner-config", opts->config, "Scanner config JSON");
        auto* origin_opt =
            sub->add_option("--origin", opts->origin, "Scanner origin x y z")->expected(3);
        auto* xy_opt = sub->add_option("--xy", opts->xy,
                                       "Place the scanner on the ground at x y")
                           ->expected(2)
                           ->excludes(origin_opt);
        origin_opt->excludes(xy_opt);
        sub->add_option("--ground-radius", opts->ground_radius,
                        "Ground estimation radius for --xy");
        sub->add_option("--out", opts->out, "Output cloud path")->required();
        sub->add_option("--format", opts->format, "labeled_csv|ply|bin");
        sub->add_option("--workers", opts->workers, "Worker threads");
        sub->callback([&command, &params, opts] {
            command = "scan";
            if (opts->origin.empty() && opts->xy.empty())
                throw slr::ConfigError("scan needs --origin or --xy");
            json cfg = opts->config.empty() ? json(slr::ScannerConfig{})
                                            : read_json_file(opts->config);
            params = {{"cloud", opts->cloud},
                      {"scanner_config", cfg},
                      {"out", opts->out},
                      {"format", slr::format_name(resolve_format(opts->format, opts->out))},
                      {"workers", opts->workers}};
            if (!opts->origin.empty()) params["origin"] = opts->origin;
            if (!opts->xy.empty()) {
                params["xy"] = opts->xy;
                params["ground_radius"] = opts->ground_radius;
            }
        });
    }

    // select-positions
    {
        auto* sub = app.add_subcommand("select-positions",
                                       "Pick secondary scanner positions from a cloud");
        struct SelOpts {
            std::string cloud, config, profile, out;
            std::uint64_t n = 0;
            std::uint64_t seed = 0;
            unsigned workers = default_workers();
        };
        auto opts = std::make_shared<SelOpts>();
        sub->add_option("--cloud", opts->cloud, "Input cloud")->required();
        sub->add_option("--config", opts->config, "Selection config JSON");
        sub->add_option("--profile", opts->profile, "Minimum azimuth profile JSON");
        sub->add_option("--n", opts->n, "Number of positions")->required();
        sub->add_option("--seed", opts->seed, "Sampling seed");
        sub->add_option("--out", opts->out, "Output positions CSV")->required();
        sub->add_option("--workers", opts->workers, "Worker threads");
        sub->callback([&command, &params, opts] {
            command = "select-positions";
            params = {{"cloud", opts->cloud},
                      {"config", opts->config.empty() ? json(slr::SelectionConfig{})
                                                      : read_json_file(opts->config)},
                      {"n", opts->n},
                      {"seed", opts->seed},
                      {"out", opts->out},
                      {"workers", opts->workers}};
            if (!opts->profile.empty()) params["min_profile"] = read_json_file(opts->profile);
        });
    }

    // profile
    {
        auto* sub = app.add_subcommand("profile",
                                       "Minimum azimuth profile over reference scans");
        struct ProfOpts {
            std::vector<std::string> clouds;
            std::string center_mode = "origin";
            double scanner_height = 1.65;
            double ground_radius = 3.0;
            std::string out;
        };
        auto opts = std::make_shared<ProfOpts>();
        sub->add_option("--cloud", opts->clouds, "Reference scans")->required();
        sub->add_option("--center-mode", opts->center_mode, "origin|centroid")
            ->check(CLI::IsMember({"origin", "centroid"}));
        sub->add_option("--scanner-height", opts->scanner_height,
                        "Scanner height for centroid mode");
        sub->add_option("--ground-radius", opts->ground_radius,
                        "Ground estimation radius for centroid mode");
        sub->add_option("--out", opts->out, "Output profile JSON")->required();
        sub->callback([&command, &params, opts] {
            command = "profile";
            params = {{"clouds", opts->clouds},
                      {"center_mode", opts->center_mode},
                      {"scanner_height", opts->scanner_height},
                      {"ground_radius", opts->ground_radius},
                      {"out", opts->out}};
        });
    }

    // slr-batch
    {
        auto* sub = app.add_subcommand("slr-batch",
                                       "Repositioned scans for every position in a CSV");
        struct BatchOpts {
            std::string cloud, positions, config, out_dir;
            std::string format = "bin";
            double ground_radius = 3.0;
            unsigned workers = default_workers();
        };
        auto opts = std::make_shared<BatchOpts>();
        sub->add_option("--cloud", opts->cloud, "Primary cloud")->required();
        sub->add_option("--positions", opts->positions, "Positions CSV (header x,y)")->required();
        sub->add_option("--scanner-config", opts->config, "Scanner config JSON");
        sub->add_option("--out-dir", opts->out_dir, "Output directory")->required();
        sub->add_option("--format", opts->format, "labeled_csv|ply|bin");
        sub->add_option("--ground-radius", opts->ground_radius, "Ground estimation radius");
        sub->add_option("--workers", opts->workers, "Worker threads");
        sub->callback([&command, &params, opts] {
            command = "slr-batch";
            params = {{"cloud", opts->cloud},
                      {"positions", opts->positions},
                      {"scanner_config", opts->config.empty() ? json(slr::ScannerConfig{})
                                                              : read_json_file(opts->config)},
                      {"out_dir", opts->out_dir},
                      {"format", slr::format_name(slr::parse_format(opts->format))},
                      {"ground_radius", opts->ground_radius},
                      {"workers", opts->workers}};
        });
    }

    // validate
    {
        auto* sub = app.add_subcommand("validate",
                                       "Synthetic-scene repositioning experiment");
        struct ValOpts {
            std::string config, out;
            std::uint64_t seed = 0;
            unsigned workers = default_workers();
        };
        auto opts = std::make_shared<ValOpts>();
        sub->add_option("--config", opts->config, "Experiment config JSON")->required();
        auto* seed_opt = sub->add_option("--seed", opts->seed, "Override the config seed");
        sub->add_option("--out", opts->out, "Output results CSV")->required();
        sub->add_option("--workers", opts->workers, "Worker threads");
        sub->callback([&command, &params, opts, seed_opt] {
            command = "validate";
            json cfg = read_json_file(opts->config);
            if (seed_opt->count() > 0) cfg["seed"] = opts->seed;
            params = {{"config", cfg}, {"out", opts->out}, {"workers", opts->workers}};
        });
    }

    // hist
    {
        auto* sub = app.add_subcommand("hist", "Pulse-sized distance histograms");
        struct HistOpts {
            std::vector<std::string> clouds;
            std::vector<double> origin, xy, heights;
            std::vector<std::string> classes{"all"};
            std::string scanner_config, out;
            double height = 1.65;
            double theta_res = 0.144;
            double max_distance = 120.0;
            double ground_radius = 3.0;
            bool horizontal = false;
            unsigned workers = default_workers();
        };
        auto opts = std::make_shared<HistOpts>();
        sub->add_option("--cloud", opts->clouds, "Input clouds (pooled)")->required();
        auto* origin_opt = sub->add_option("--origin", opts->origin,
                                           "Histogram origin x y z (default: scan_origin meta)")
                               ->expected(3);
        auto* xy_opt = sub->add_option("--xy", opts->xy,
                                       "Reposition at x y before histogramming (sweep mode)")
                           ->expected(2)
                           ->excludes(origin_opt);
        origin_opt->excludes(xy_opt);
        auto* heights_opt = sub->add_option("--heights", opts->heights,
                                            "Scanner heights for sweep mode")
                                ->delimiter(',')
                                ->needs(xy_opt);
        xy_opt->needs(heights_opt);
        sub->add_option("--scanner-config", opts->scanner_config,
                        "Scanner config JSON for sweep mode");
        sub->add_option("--classes", opts->classes, "all|ground|non_ground")->delimiter(',');
        sub->add_option("--height", opts->height, "Bin scanner height (non-sweep mode)");
        sub->add_option("--theta-res", opts->theta_res, "Bin angular step, degrees");
        sub->add_option("--max-distance", opts->max_distance, "Largest bin edge, meters");
        sub->add_option("--ground-radius", opts->ground_radius,
                        "Ground estimation radius for sweep mode");
        sub->add_flag("--horizontal", opts->horizontal,
                      "Bin horizontal (xy) distance instead of radial");
        sub->add_option("--workers", opts->workers, "Worker threads");
        sub->add_option("--out", opts->out, "Output histogram CSV")->required();
        sub->callback([&command, &params, opts] {
            command = "hist";
            params = {{"clouds", opts->clouds},
                      {"theta_res", opts->theta_res},
                      {"max_distance", opts->max_distance},
                      {"horizontal", opts->horizontal},
                      {"out", opts->out},
                      {"workers", opts->workers}};
            if (!opts->heights.empty()) {
                params["xy"] = opts->xy;
                params["heights"] = opts->heights;
                params["ground_radius"] = opts->ground_radius;
                params["scanner_config"] = opts->scanner_config.empty()
                                               ? json(slr::ScannerConfig{})
                                               : read_json_file(opts->scanner_config);
            } else {
                params["height"] = opts->height;
                params["classes"] = opts->classes;
                if (!opts->origin.empty()) params["origin"] = opts->origin;
            }
        });
    }

    // rerun
    {
        auto* sub = app.add_subcommand("rerun", "Re-execute a recorded run manifest");
        sub->add_option("manifest", rerun_manifest, "Path to a manifest.json")->required();
        sub->callback([&command] { command = "rerun"; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        print_error("Usage", e.what());
        return 1;
    } catch (const slr::ConfigError& e) {
        print_error(e.code(), e.what());
        return 1;
    } catch (const slr::Error& e) {
        print_error(e.code(), e.what());
        return 2;
    }

    try {
        if (command == "rerun") {
            const json manifest = read_json_file(rerun_manifest);
            if (!manifest.contains("command") || !manifest.contains("params"))
                throw slr::ConfigError(rerun_manifest + " is not a run manifest");
            return run_and_record(manifest.at("command").get<std::string>(),
                                  manifest.at("params"));
        }
        return run_and_record(command, params);
    } catch (const slr::ConfigError& e) {
        print_error(e.code(), e.what());
        return 1;
    } catch (const slr::Error& e) {
        print_error(e.code(), e.what());
        return 2;
    } catch (const json::exception& e) {
        print_error("Config", e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("Internal", e.what());
        return 2;
    }
}
