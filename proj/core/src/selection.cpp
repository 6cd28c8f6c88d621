#include "slr/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "slr/errors.hpp"
#include "slr/geometry.hpp"
#include "slr/grid_index.hpp"
#include "slr/rng.hpp"

namespace slr {

bool AzimuthProfile::is_sorted() const {
    return std::is_sorted(counts.begin(), counts.end());
}

bool AzimuthProfile::all_zero() const {
    return std::all_of(counts.begin(), counts.end(), [](std::uint64_t c) { return c == 0; });
}

bool AzimuthProfile::dominates(const AzimuthProfile& other) const {
    for (std::size_t k = 0; k < counts.size(); ++k)
        if (counts[k] < other.counts[k]) return false;
    return true;
}

void to_json(nlohmann::json& j, const AzimuthProfile& p) {
    j = nlohmann::json::array();
    for (auto c : p.counts) j.push_back(c);
}

void from_json(const nlohmann::json& j, AzimuthProfile& p) {
    if (!j.is_array() || j.size() != 360)
        throw ConfigError("azimuth profile must be a JSON array of 360 integers");
    for (std::size_t k = 0; k < 360; ++k) {
        if (!j[k].is_number_integer() || j[k].get<std::int64_t>() < 0)
            throw ConfigError("azimuth profile entries must be non-negative integers");
        p.counts[k] = j[k].get<std::uint64_t>();
    }
    if (!p.is_sorted())
        throw ConfigError("azimuth profile counts must be sorted ascending");
}

void to_json(nlohmann::json& j, const SelectionConfig& cfg) {
    j = nlohmann::json{{"cell_size", cfg.cell_size},
                       {"ground_radius", cfg.ground_radius},
                       {"min_ground_count", cfg.min_ground_count},
                       {"origin_ground_radius", cfg.origin_ground_radius},
                       {"scanner_height", cfg.scanner_height}};
}

void from_json(const nlohmann::json& j, SelectionConfig& cfg) {
    cfg = SelectionConfig{};
    if (j.contains("cell_size")) j.at("cell_size").get_to(cfg.cell_size);
    if (j.contains("ground_radius")) j.at("ground_radius").get_to(cfg.ground_radius);
    if (j.contains("min_ground_count")) j.at("min_ground_count").get_to(cfg.min_ground_count);
    if (j.contains("origin_ground_radius")) j.at("origin_ground_radius").get_to(cfg.origin_ground_radius);
    if (j.contains("scanner_height")) j.at("scanner_height").get_to(cfg.scanner_height);
    if (!(cfg.cell_size > 0.0) || !(cfg.ground_radius > 0.0) || !(cfg.origin_ground_radius > 0.0))
        throw ConfigError("selection config distances must be positive");
}

std::vector<CandidateCell> build_grid(const PointCloud& cloud, double cell_size) {
    if (!(cell_size > 0.0)) throw ConfigError("cell_size must be positive");
    if (cloud.empty()) throw EmptyCloudError("cannot grid an empty cloud");

    double x0 = std::numeric_limits<double>::infinity();
    double y0 = x0;
    for (const auto& p : cloud.points) {
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
    }

    std::map<std::pair<int, int>, bool> occupied;
    for (const auto& p : cloud.points) {
        const int i = static_cast<int>(std::floor((p.x - x0) / cell_size));
        const int j = static_cast<int>(std::floor((p.y - y0) / cell_size));
        occupied[{i, j}] = true;
    }

    std::vector<CandidateCell> cells;
    cells.reserve(occupied.size());
    for (const auto& [ij, _] : occupied)
        cells.push_back(CandidateCell{ij.first, ij.second, x0 + ij.first * cell_size,
                                      y0 + ij.second * cell_size, cell_size});
    return cells;  // map iteration is already (i, j) ascending
}

std::vector<CandidateCell> filter_ground_density(const std::vector<CandidateCell>& cells,
                                                 const PointCloud& cloud, double radius,
                                                 std::uint64_t min_count) {
    if (!(radius > 0.0)) throw ConfigError("radius must be positive");
    const PlanarGrid ground(cloud, radius, Label::ground);
    std::vector<CandidateCell> kept;
    for (const auto& cell : cells) {
        if (ground.count_in_radius(cell.center_x(), cell.center_y(), radius) >= min_count)
            kept.push_back(cell);
    }
    return kept;
}

AzimuthProfile compute_azimuth_profile(const PointCloud& cloud, const Vec3& center) {
    AzimuthProfile profile;
    for (const auto& p : cloud.points) {
        const double dx = p.x - center.x;
        const double dy = p.y - center.y;
        int bin = 0;
        if (dx != 0.0 || dy != 0.0) {
            double phi = rad_to_deg(std::atan2(dy, dx));
            if (phi < 0.0) phi += 360.0;
            if (phi >= 360.0) phi = 0.0;
            bin = static_cast<int>(phi);  // floor: phi >= 0
        }
        ++profile.counts[static_cast<std::size_t>(bin)];
    }
    std::sort(profile.counts.begin(), profile.counts.end());
    return profile;
}

AzimuthProfile compute_minimum_profile(const std::vector<AzimuthProfile>& profiles) {
    if (profiles.empty()) throw EmptyInputError("no profiles to combine");
    AzimuthProfile out = profiles.front();
    for (std::size_t p = 1; p < profiles.size(); ++p)
        for (std::size_t k = 0; k < out.counts.size(); ++k)
            out.counts[k] = std::min(out.counts[k], profiles[p].counts[k]);
    return out;
}

std::vector<CandidateCell> filter_azimuth_profile(const std::vector<CandidateCell>& cells,
                                                  const PointCloud& cloud,
                                                  const AzimuthProfile& min_profile,
                                                  double scanner_height,
                                                  double origin_ground_radius,
                                                  unsigned workers) {
    const PlanarGrid ground(cloud, origin_ground_radius, Label::ground);
    const bool profile_disabled = min_profile.all_zero();

    std::vector<char> keep(cells.size(), 0);
    auto evaluate = [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            const auto& cell = cells[c];
            const auto mz =
                ground.mean_z_in_radius(cell.center_x(), cell.center_y(), origin_ground_radius);
            if (!mz) continue;  // NoGroundNearby: cell removed
            if (profile_disabled) {
                keep[c] = 1;
                continue;
            }
            const Vec3 center{cell.center_x(), cell.center_y(), mz->mean + scanner_height};
            keep[c] = compute_azimuth_profile(cloud, center).dominates(min_profile) ? 1 : 0;
        }
    };

    if (workers <= 1 || cells.size() < 2) {
        evaluate(0, cells.size());
    } else {
        const std::size_t w = std::min<std::size_t>(workers, cells.size());
        std::vector<std::thread> threads;
        threads.reserve(w);
        const std::size_t chunk = (cells.size() + w - 1) / w;
        for (std::size_t k = 0; k < w; ++k) {
            const std::size_t begin = k * chunk;
            const std::size_t end = std::min(cells.size(), begin + chunk);
            threads.emplace_back([&, begin, end] { evaluate(begin, end); });
        }
        for (auto& t : threads) t.join();
    }

    std::vector<CandidateCell> kept;
    for (std::size_t c = 0; c < cells.size(); ++c)
        if (keep[c]) kept.push_back(cells[c]);
    return kept;
}

std::vector<Vec2> select_positions(const std::vector<CandidateCell>& cells, std::size_t n,
                                   std::uint64_t seed) {
    if (n > cells.size())
        throw NotEnoughCellsError("requested " + std::to_string(n) + " positions from " +
                                  std::to_string(cells.size()) + " cells");
    Rng rng(seed);
    // Partial Fisher-Yates over cell indices: uniform without replacement.
    std::vector<std::size_t> order(cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<Vec2> positions;
    positions.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + rng.below(order.size() - i);
        std::swap(order[i], order[j]);
        const auto& cell = cells[order[i]];
        positions.push_back(Vec2{cell.x_min + rng.uniform01() * cell.size,
                                 cell.y_min + rng.uniform01() * cell.size});
    }
    return positions;
}

SelectionReport run_selection(const PointCloud& cloud, const SelectionConfig& cfg,
                              const AzimuthProfile& min_profile, std::size_t n,
                              std::uint64_t seed, unsigned workers) {
    SelectionReport report;
    auto cells = build_grid(cloud, cfg.cell_size);
    report.cells_initial = cells.size();
    cells = filter_ground_density(cells, cloud, cfg.ground_radius, cfg.min_ground_count);
    report.cells_after_ground = cells.size();
    cells = filter_azimuth_profile(cells, cloud, min_profile, cfg.scanner_height,
                                   cfg.origin_ground_radius, workers);
    report.cells_after_profile = cells.size();
    report.positions = select_positions(cells, n, seed);
    return report;
}

}  // namespace slr
