#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "slr/io.hpp"
#include "support/temp_dir.hpp"

// End-to-end tests that drive the installed command-line binary as a
// subprocess. SLR_CLI_PATH is injected by the build.

namespace {

struct RunResult {
    int exit_code = -1;
    std::string stderr_text;
};

RunResult run_cli(const std::string& args, const std::filesystem::path& stderr_file) {
    const std::string cmd =
        std::string(SLR_CLI_PATH) + " " + args + " 2>" + stderr_file.string();
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(stderr_file);
    std::stringstream ss;
    ss << in.rdbuf();
    r.stderr_text = ss.str();
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
    REQUIRE(out.good());
}

std::size_t count_rows(const std::filesystem::path& csv) {
    std::ifstream in(csv);
    REQUIRE(in.good());
    std::string line;
    std::size_t rows = 0;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (!line.empty()) ++rows;
    }
    return rows;
}

}  // namespace

TEST_CASE("cli pipeline: scene, scan, positions, batch, histogram, rerun") {
    slr_test::TempDir tmp;
    const auto err = tmp.path() / "stderr.txt";

    write_text(tmp.file("scene.json"), R"({
        "disk_radius": 6.0, "grid_spacing": 0.05, "ground_z": -1.65,
        "n_rectangles": 4, "rect_size_min": 0.5, "rect_size_max": 1.5,
        "rect_xy_min": -5.0, "rect_xy_max": 5.0,
        "rect_z_min": -1.5, "rect_z_max": 0.5, "seed": 7
    })");
    write_text(tmp.file("scanner.json"), R"({"theta_res": 0.5, "phi_res": 0.5})");
    write_text(tmp.file("secondary.json"), R"({"theta_res": 1.0, "phi_res": 1.0})");
    write_text(tmp.file("selection.json"), R"({
        "cell_size": 2.0, "ground_radius": 2.0,
        "min_ground_count": 300, "origin_ground_radius": 1.0
    })");

    // scene generation writes the cloud plus a manifest
    auto r = run_cli("gen-scene --config " + tmp.file("scene.json") + " --out " +
                         tmp.file("scene.bin"),
                     err);
    REQUIRE(r.exit_code == 0);
    REQUIRE(std::filesystem::exists(tmp.file("scene.bin")));
    const auto scene_manifest =
        nlohmann::json::parse(std::ifstream(tmp.file("scene.bin.manifest.json")));
    CHECK(scene_manifest.at("command") == "gen-scene");
    CHECK(scene_manifest.at("params").at("config").at("seed") == 7);
    CHECK(scene_manifest.at("stats").at("points").get<std::size_t>() > 10000);

    // primary scan from the scene center
    r = run_cli("scan --cloud " + tmp.file("scene.bin") + " --scanner-config " +
                    tmp.file("scanner.json") + " --origin 0 0 0 --out " + tmp.file("primary.bin"),
                err);
    REQUIRE(r.exit_code == 0);
    const auto primary = slr::load_cloud(tmp.file("primary.bin"), slr::Format::bin);
    const auto scene = slr::load_cloud(tmp.file("scene.bin"), slr::Format::bin);
    CHECK(primary.size() > 0);
    CHECK(primary.size() < scene.size());

    // candidate positions from the primary cloud
    r = run_cli("select-positions --cloud " + tmp.file("primary.bin") + " --config " +
                    tmp.file("selection.json") + " --n 3 --seed 5 --out " +
                    tmp.file("positions.csv"),
                err);
    REQUIRE(r.exit_code == 0);
    CHECK(count_rows(tmp.file("positions.csv")) == 3);

    // repositioned scans for every position
    r = run_cli("slr-batch --cloud " + tmp.file("primary.bin") + " --positions " +
                    tmp.file("positions.csv") + " --scanner-config " + tmp.file("secondary.json") +
                    " --ground-radius 1.0 --out-dir " + tmp.file("batch"),
                err);
    REQUIRE(r.exit_code == 0);
    for (const char* name : {"slr_000.bin", "slr_001.bin", "slr_002.bin"}) {
        CHECK(std::filesystem::exists(tmp.path() / "batch" / name));
    }
    const auto batch_manifest =
        nlohmann::json::parse(std::ifstream(tmp.path() / "batch" / "manifest.json"));
    REQUIRE(batch_manifest.at("stats").at("origins").size() == 3);

    // pooled histogram over the batch outputs, origins resolved from the manifest
    r = run_cli("hist --cloud " + tmp.file("batch/slr_000.bin") + " --cloud " +
                    tmp.file("batch/slr_001.bin") + " --cloud " + tmp.file("batch/slr_002.bin") +
                    " --classes ground,non_ground --height 1.65 --theta-res 2.0 "
                    "--max-distance 10 --out " +
                    tmp.file("hist.csv"),
                err);
    REQUIRE(r.exit_code == 0);
    CHECK(count_rows(tmp.file("hist.csv")) > 0);

    // rerunning a manifest reproduces outputs byte for byte
    const std::string scan_bytes = slurp(tmp.file("primary.bin"));
    const std::string batch_bytes = slurp(tmp.file("batch/slr_002.bin"));
    std::filesystem::remove(tmp.file("primary.bin"));
    std::filesystem::remove(tmp.file("batch/slr_002.bin"));

    r = run_cli("rerun " + tmp.file("primary.bin.manifest.json"), err);
    REQUIRE(r.exit_code == 0);
    CHECK(slurp(tmp.file("primary.bin")) == scan_bytes);

    r = run_cli("rerun " + tmp.file("batch/manifest.json"), err);
    REQUIRE(r.exit_code == 0);
    CHECK(slurp(tmp.file("batch/slr_002.bin")) == batch_bytes);
}

TEST_CASE("cli validate runs an experiment config end to end") {
    slr_test::TempDir tmp;
    const auto err = tmp.path() / "stderr.txt";
    write_text(tmp.file("experiment.json"), R"({
        "scene": {
            "disk_radius": 5.0, "grid_spacing": 0.05, "ground_z": -1.65,
            "n_rectangles": 3, "rect_size_min": 0.5, "rect_size_max": 1.2,
            "rect_xy_min": -4.0, "rect_xy_max": 4.0,
            "rect_z_min": -1.5, "rect_z_max": 0.5, "seed": 4
        },
        "primary": {"theta_res": 0.25, "phi_res": 0.25},
        "secondary": {"theta_res": 1.0, "phi_res": 1.0},
        "n_positions": 3,
        "seed": 11,
        "selection": {
            "cell_size": 2.0, "ground_radius": 2.0,
            "min_ground_count": 50000, "origin_ground_radius": 2.0
        }
    })");

    auto r = run_cli("validate --config " + tmp.file("experiment.json") + " --out " +
                         tmp.file("results.csv") + " --workers 2",
                     err);
    REQUIRE(r.exit_code == 0);
    REQUIRE(count_rows(tmp.file("results.csv")) == 3);

    std::ifstream in(tmp.file("results.csv"));
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "secondary_x,secondary_y,scanner_distance,similarity,n_rectangles,primary_theta_res");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<double> fields;
        while (std::getline(ss, field, ',')) fields.push_back(std::stod(field));
        REQUIRE(fields.size() == 6);
        CHECK(fields[3] >= 0.0);  // similarity
        CHECK(fields[3] <= 1.0);
        CHECK(fields[4] == 3.0);  // n_rectangles
        CHECK(fields[5] == 0.25);  // primary theta_res
    }

    const auto manifest =
        nlohmann::json::parse(std::ifstream(tmp.file("results.csv.manifest.json")));
    CHECK(manifest.at("command") == "validate");
    CHECK(manifest.at("stats").at("dense_points").get<std::size_t>() > 0);
    CHECK(manifest.at("seed") == 11);

    // the seed override lands in the manifest and changes the outcome
    auto r2 = run_cli("validate --config " + tmp.file("experiment.json") + " --seed 12 --out " +
                          tmp.file("results2.csv"),
                      err);
    REQUIRE(r2.exit_code == 0);
    const auto manifest2 =
        nlohmann::json::parse(std::ifstream(tmp.file("results2.csv.manifest.json")));
    CHECK(manifest2.at("params").at("config").at("seed") == 12);
    CHECK(slurp(tmp.file("results.csv")) != slurp(tmp.file("results2.csv")));
}

TEST_CASE("cli reports structured errors with useful exit codes") {
    slr_test::TempDir tmp;
    const auto err = tmp.path() / "stderr.txt";

    // missing required option: usage error
    auto r = run_cli("gen-scene --out " + tmp.file("x.bin"), err);
    CHECK(r.exit_code == 1);

    // config file that fails validation
    write_text(tmp.file("bad_scene.json"), R"({"disk_radius": -1.0})");
    r = run_cli("gen-scene --config " + tmp.file("bad_scene.json") + " --out " + tmp.file("x.bin"),
                err);
    CHECK(r.exit_code == 1);
    const auto parsed = nlohmann::json::parse(r.stderr_text);
    CHECK(parsed.at("error").at("code") == "Config");
    CHECK(!parsed.at("error").at("message").get<std::string>().empty());

    // malformed json
    write_text(tmp.file("broken.json"), "{nope");
    r = run_cli("gen-scene --config " + tmp.file("broken.json") + " --out " + tmp.file("x.bin"),
                err);
    CHECK(r.exit_code == 1);

    // scan without an origin or xy
    write_text(tmp.file("tiny.csv"), "x,y,z,label\n1,2,3,0\n");
    r = run_cli("scan --cloud " + tmp.file("tiny.csv") + " --out " + tmp.file("y.bin"), err);
    CHECK(r.exit_code == 1);

    // missing input file: runtime error
    r = run_cli("scan --cloud " + tmp.file("absent.bin") + " --origin 0 0 0 --out " +
                    tmp.file("y.bin"),
                err);
    CHECK(r.exit_code == 2);
    CHECK(nlohmann::json::parse(r.stderr_text).at("error").at("code") == "Io");

    // unknown subcommand
    r = run_cli("frobnicate", err);
    CHECK(r.exit_code == 1);

    // --version prints and succeeds
    r = run_cli("--version", err);
    CHECK(r.exit_code == 0);
}

TEST_CASE("cli empty positions file produces an empty batch") {
    slr_test::TempDir tmp;
    const auto err = tmp.path() / "stderr.txt";
    write_text(tmp.file("cloud.csv"),
               "x,y,z,label\n0,0,0,0\n1,0,0,0\n0,1,0,0\n1,1,0,0\n0.5,0.5,1,1\n");
    write_text(tmp.file("empty.csv"), "x,y\n");
    auto r = run_cli("slr-batch --cloud " + tmp.file("cloud.csv") + " --positions " +
                         tmp.file("empty.csv") + " --out-dir " + tmp.file("out"),
                     err);
    REQUIRE(r.exit_code == 0);
    CHECK(std::filesystem::exists(tmp.file("out/manifest.json")));
    std::size_t entries = 0;
    for (const auto& e : std::filesystem::directory_iterator(tmp.file("out"))) {
        (void)e;
        ++entries;
    }
    CHECK(entries == 1);  // only the manifest
}
