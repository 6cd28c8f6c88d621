#include "slr/nss.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "slr/errors.hpp"
#include "slr/geometry.hpp"

namespace slr {

const char* class_filter_name(ClassFilter f) {
    switch (f) {
        case ClassFilter::all: return "all";
        case ClassFilter::ground: return "ground";
        default: return "non_ground";
    }
}

ClassFilter parse_class_filter(const std::string& name) {
    if (name == "all") return ClassFilter::all;
    if (name == "ground") return ClassFilter::ground;
    if (name == "non_ground") return ClassFilter::non_ground;
    throw ConfigError("unknown class filter '" + name + "', expected all|ground|non_ground");
}

PulseBinEdges pulse_sized_bins(double scanner_height, double theta_res, double max_distance) {
    if (scanner_height <= 0.0) throw ConfigError("scanner_height must be positive");
    if (theta_res <= 0.0) throw ConfigError("theta_res must be positive");
    if (max_distance <= 0.0) throw ConfigError("max_distance must be positive");
    PulseBinEdges out;
    out.scanner_height = scanner_height;
    out.theta_res = theta_res;
    const long long k_max = static_cast<long long>(std::floor(90.0 / theta_res));
    for (long long k = k_max; k >= 1; --k) {
        const double r = scanner_height / std::sin(deg_to_rad(static_cast<double>(k) * theta_res));
        if (r > max_distance) break;
        out.edges.push_back(r);
    }
    return out;
}

DistanceHistogram distance_histogram(const PointCloud& cloud, const Vec3& origin,
                                     const PulseBinEdges& edges, ClassFilter filter,
                                     bool horizontal) {
    if (edges.edges.size() < 2) throw ConfigError("at least two bin edges required");
    DistanceHistogram out;
    out.edges = edges;
    out.class_filter = filter;
    out.scanner_height = edges.scanner_height;
    out.counts.assign(edges.bin_count(), 0);

    const auto& e = edges.edges;
    std::uint64_t total = 0;
    for (const auto& p : cloud.points) {
        if (filter == ClassFilter::ground && p.label != Label::ground) continue;
        if (filter == ClassFilter::non_ground && p.label != Label::non_ground) continue;
        const double dx = p.x - origin.x;
        const double dy = p.y - origin.y;
        const double dz = p.z - origin.z;
        const double d = horizontal ? std::hypot(dx, dy) : std::sqrt(dx * dx + dy * dy + dz * dz);
        if (d < e.front() || d >= e.back()) continue;
        const auto it = std::upper_bound(e.begin(), e.end(), d);
        const std::size_t bin = static_cast<std::size_t>(it - e.begin()) - 1;
        ++out.counts[bin];
        ++total;
    }
    if (total == 0) throw NoPointsInRangeError();
    out.probabilities.resize(out.counts.size());
    for (std::size_t i = 0; i < out.counts.size(); ++i) {
        out.probabilities[i] = static_cast<double>(out.counts[i]) / static_cast<double>(total);
    }
    return out;
}

std::vector<HeightSweepEntry> height_sweep(const PointCloud& cloud, Vec2 xy,
                                           const std::vector<double>& heights,
                                           const ScannerConfig& cfg,
                                           const HistogramBinParams& bins,
                                           double origin_ground_radius, unsigned workers) {
    std::vector<HeightSweepEntry> out;
    out.reserve(heights.size());
    // Non-ground histograms share one partition, pulse-sized at the base config's
    // scanner height: comparing distributions across heights needs a common
    // partition, or the width ratio between per-height binnings shows up as a
    // spurious total-variation gap. The ground histogram stays pulse-sized at the
    // entry's own height; it is a per-scan diagnostic whose mode tracks where
    // occlusion starts eating the ground annuli, and the pulse model for a scan
    // is defined by that scan's height.
    const PulseBinEdges shared =
        pulse_sized_bins(cfg.scanner_height, bins.theta_res, bins.max_distance);
    for (double height : heights) {
        if (height <= 0.0) throw ConfigError("sweep heights must be positive");
        ScannerConfig at_height = cfg;
        at_height.scanner_height = height;
        const Vec3 origin = compute_scanner_origin(cloud, xy.x, xy.y, at_height, origin_ground_radius);
        const PointCloud scan = simulate_scan(cloud, origin, at_height, workers);
        const PulseBinEdges own = pulse_sized_bins(height, bins.theta_res, bins.max_distance);
        HeightSweepEntry entry;
        entry.height = height;
        entry.origin = origin;
        entry.ground = distance_histogram(scan, origin, own, ClassFilter::ground);
        entry.non_ground = distance_histogram(scan, origin, shared, ClassFilter::non_ground);
        entry.non_ground.scanner_height = height;
        out.push_back(std::move(entry));
    }
    return out;
}

GroundFraction ground_fraction(const PointCloud& cloud) {
    if (cloud.empty()) throw EmptyCloudError();
    GroundFraction out;
    const std::size_t ground = cloud.count_label(Label::ground);
    const std::size_t non_ground = cloud.count_label(Label::non_ground);
    out.fraction = static_cast<double>(ground) / static_cast<double>(cloud.size());
    out.unlabeled_warning = (ground + non_ground == 0);
    return out;
}

DistanceHistogram pool_histograms(const std::vector<DistanceHistogram>& parts) {
    if (parts.empty()) throw EmptyInputError("no histograms to pool");
    DistanceHistogram out = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const DistanceHistogram& p = parts[i];
        if (p.edges.edges != out.edges.edges) throw ConfigError("pooled histograms must share bin edges");
        if (p.class_filter != out.class_filter) throw ConfigError("pooled histograms must share class filter");
        for (std::size_t b = 0; b < out.counts.size(); ++b) out.counts[b] += p.counts[b];
    }
    std::uint64_t total = 0;
    for (auto c : out.counts) total += c;
    if (total == 0) throw NoPointsInRangeError();
    for (std::size_t b = 0; b < out.counts.size(); ++b) {
        out.probabilities[b] = static_cast<double>(out.counts[b]) / static_cast<double>(total);
    }
    return out;
}

double total_variation(const DistanceHistogram& a, const DistanceHistogram& b) {
    const auto& ea = a.edges.edges;
    const auto& eb = b.edges.edges;
    std::vector<double> merged;
    merged.reserve(ea.size() + eb.size());
    std::merge(ea.begin(), ea.end(), eb.begin(), eb.end(), std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    // Density of histogram h over [lo, hi): probability mass / bin width, or
    // zero outside the histogram's support.
    const auto density_at = [](const DistanceHistogram& h, double x) {
        const auto& e = h.edges.edges;
        if (x < e.front() || x >= e.back()) return 0.0;
        const auto it = std::upper_bound(e.begin(), e.end(), x);
        const std::size_t bin = static_cast<std::size_t>(it - e.begin()) - 1;
        return h.probabilities[bin] / (e[bin + 1] - e[bin]);
    };

    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
        const double lo = merged[i];
        const double hi = merged[i + 1];
        const double mid = lo + (hi - lo) * 0.5;
        tv += std::abs(density_at(a, mid) - density_at(b, mid)) * (hi - lo);
    }
    return 0.5 * tv;
}

void write_histogram_csv(const std::vector<DistanceHistogram>& hists, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot write " + path);
    std::fputs("bin_low,bin_high,probability,class,height\n", f);
    for (const auto& h : hists) {
        for (std::size_t b = 0; b < h.probabilities.size(); ++b) {
            std::fprintf(f, "%.17g,%.17g,%.17g,%s,%.17g\n", h.edges.edges[b], h.edges.edges[b + 1],
                         h.probabilities[b], class_filter_name(h.class_filter), h.scanner_height);
        }
    }
    if (std::fclose(f) != 0) throw IoError("error writing " + path);
}

}  // namespace slr
