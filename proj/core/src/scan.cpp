#include "slr/scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

#include "slr/errors.hpp"

namespace slr {

void ScannerConfig::validate() const {
    if (!(theta_res > 0.0) || !(theta_res <= 180.0))
        throw ConfigError("theta_res must be in (0, 180]");
    if (!(phi_res > 0.0) || !(phi_res <= 180.0))
        throw ConfigError("phi_res must be in (0, 180]");
    if (!(zenith_min >= 0.0) || !(zenith_min < zenith_max) || !(zenith_max <= 180.0))
        throw ConfigError("zenith range must satisfy 0 <= zenith_min < zenith_max <= 180");
    if (max_range && !(*max_range > 0.0))
        throw ConfigError("max_range must be positive when present");
    if (!std::isfinite(scanner_height))
        throw ConfigError("scanner_height must be finite");
}

void to_json(nlohmann::json& j, const ScannerConfig& cfg) {
    j = nlohmann::json{{"theta_res", cfg.theta_res},
                       {"phi_res", cfg.phi_res},
                       {"zenith_min", cfg.zenith_min},
                       {"zenith_max", cfg.zenith_max},
                       {"scanner_height", cfg.scanner_height}};
    if (cfg.max_range) j["max_range"] = *cfg.max_range;
}

void from_json(const nlohmann::json& j, ScannerConfig& cfg) {
    cfg = ScannerConfig{};
    if (j.contains("theta_res")) j.at("theta_res").get_to(cfg.theta_res);
    if (j.contains("phi_res")) j.at("phi_res").get_to(cfg.phi_res);
    if (j.contains("zenith_min")) j.at("zenith_min").get_to(cfg.zenith_min);
    if (j.contains("zenith_max")) j.at("zenith_max").get_to(cfg.zenith_max);
    if (j.contains("scanner_height")) j.at("scanner_height").get_to(cfg.scanner_height);
    if (j.contains("max_range") && !j.at("max_range").is_null())
        cfg.max_range = j.at("max_range").get<double>();
    cfg.validate();
}

BinnedCoordinate bin_coordinates(const SphericalPoint& s, const ScannerConfig& cfg) {
    return {s.R, static_cast<std::uint32_t>(std::floor(s.theta / cfg.theta_res)),
            static_cast<std::uint32_t>(std::floor(s.phi / cfg.phi_res))};
}

namespace {

// Open-addressing map keyed by packed (h, v) holding the current nearest
// candidate per pulse bin. Node-based maps are too heavy for tens of millions
// of occupied bins.
class BinMinMap {
public:
    struct Slot {
        std::uint64_t key;
        double range;
        std::uint64_t index;
    };

    static constexpr std::uint64_t kEmpty = std::numeric_limits<std::uint64_t>::max();

    explicit BinMinMap(std::size_t expected = 0) {
        std::size_t cap = 1024;
        while (cap < expected * 2) cap <<= 1;
        slots_.assign(cap, Slot{kEmpty, 0.0, 0});
        mask_ = cap - 1;
    }

    // Keeps the candidate with smaller (range, index).
    void offer(std::uint64_t key, double range, std::uint64_t index) {
        std::size_t i = hash(key) & mask_;
        for (;;) {
            Slot& s = slots_[i];
            if (s.key == kEmpty) {
                s = Slot{key, range, index};
                ++size_;
                if (size_ * 2 > slots_.size()) grow();
                return;
            }
            if (s.key == key) {
                if (range < s.range || (range == s.range && index < s.index)) {
                    s.range = range;
                    s.index = index;
                }
                return;
            }
            i = (i + 1) & mask_;
        }
    }

    void merge_from(const BinMinMap& other) {
        for (const Slot& s : other.slots_)
            if (s.key != kEmpty) offer(s.key, s.range, s.index);
    }

    /// Occupied slots sorted by key ascending.
    std::vector<Slot> sorted_slots() const {
        std::vector<Slot> out;
        out.reserve(size_);
        for (const Slot& s : slots_)
            if (s.key != kEmpty) out.push_back(s);
        std::sort(out.begin(), out.end(),
                  [](const Slot& a, const Slot& b) { return a.key < b.key; });
        return out;
    }

    std::size_t size() const { return size_; }

private:
    static std::uint64_t hash(std::uint64_t k) {
        k ^= k >> 33;
        k *= 0xff51afd7ed558ccdull;
        k ^= k >> 33;
        k *= 0xc4ceb9fe1a85ec53ull;
        k ^= k >> 33;
        return k;
    }

    void grow() {
        std::vector<Slot> old;
        old.swap(slots_);
        slots_.assign(old.size() * 2, Slot{kEmpty, 0.0, 0});
        mask_ = slots_.size() - 1;
        for (const Slot& s : old) {
            if (s.key == kEmpty) continue;
            std::size_t i = hash(s.key) & mask_;
            while (slots_[i].key != kEmpty) i = (i + 1) & mask_;
            slots_[i] = s;
        }
    }

    std::vector<Slot> slots_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
};

// Sorting the packed key ascending yields the (h, v) ascending output order.
inline std::uint64_t pack_key(std::uint32_t v, std::uint32_t h) {
    return (static_cast<std::uint64_t>(h) << 32) | v;
}

void scan_range(const PointCloud& cloud, const Vec3& origin, const ScannerConfig& cfg,
                std::size_t begin, std::size_t end, BinMinMap& bins) {
    const bool has_max = cfg.max_range.has_value();
    const double max_range = has_max ? *cfg.max_range : 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        const LabeledPoint& p = cloud.points[i];
        const double dx = p.x - origin.x;
        const double dy = p.y - origin.y;
        const double dz = p.z - origin.z;
        const double R = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (R == 0.0) continue;
        if (has_max && R > max_range) continue;

        const double theta = rad_to_deg(std::acos(std::clamp(dz / R, -1.0, 1.0)));
        if (theta < cfg.zenith_min || theta >= cfg.zenith_max) continue;

        double phi = 0.0;
        if (dx != 0.0 || dy != 0.0) {
            phi = rad_to_deg(std::atan2(dy, dx));
            if (phi < 0.0) phi += 360.0;
            if (phi >= 360.0) phi = 0.0;
        }

        const auto v = static_cast<std::uint32_t>(std::floor(theta / cfg.theta_res));
        const auto h = static_cast<std::uint32_t>(std::floor(phi / cfg.phi_res));
        bins.offer(pack_key(v, h), R, i);
    }
}

}  // namespace

PointCloud simulate_scan(const PointCloud& cloud, const Vec3& origin, const ScannerConfig& cfg,
                         unsigned workers) {
    cfg.validate();
    if (180.0 / cfg.theta_res >= 4294967294.0 || 360.0 / cfg.phi_res >= 4294967294.0)
        throw ConfigError("angular resolution too fine for 32-bit bin indices");

    const std::size_t n = cloud.points.size();
    BinMinMap bins(std::min<std::size_t>(n, 1u << 20));

    if (workers <= 1 || n < 4096) {
        scan_range(cloud, origin, cfg, 0, n, bins);
    } else {
        const std::size_t w = std::min<std::size_t>(workers, (n + 4095) / 4096);
        std::vector<BinMinMap> partial;
        partial.reserve(w);
        for (std::size_t k = 0; k < w; ++k)
            partial.emplace_back(std::min<std::size_t>(n / w, 1u << 20));
        std::vector<std::thread> threads;
        threads.reserve(w);
        const std::size_t chunk = (n + w - 1) / w;
        for (std::size_t k = 0; k < w; ++k) {
            const std::size_t begin = k * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            threads.emplace_back([&, k, begin, end] {
                scan_range(cloud, origin, cfg, begin, end, partial[k]);
            });
        }
        for (auto& t : threads) t.join();
        // min-by-(R, index) is associative, so the merged map equals the
        // sequential one regardless of the partition.
        for (const auto& part : partial) bins.merge_from(part);
    }

    PointCloud out;
    out.points.reserve(bins.size());
    for (const auto& slot : bins.sorted_slots()) out.points.push_back(cloud.points[slot.index]);

    out.meta = cloud.meta;
    {
        std::ostringstream os;
        os.precision(17);
        os << origin.x << " " << origin.y << " " << origin.z;
        out.meta["scan_origin"] = os.str();
    }
    out.meta["scanner_config"] = nlohmann::json(cfg).dump();
    return out;
}

Vec3 compute_scanner_origin(const PointCloud& cloud, double x, double y, const ScannerConfig& cfg,
                            double ground_radius) {
    const double r2 = ground_radius * ground_radius;
    // Kahan summation; clouds can have tens of millions of ground points.
    double sum = 0.0, comp = 0.0;
    std::size_t count = 0;
    for (const auto& p : cloud.points) {
        if (p.label != Label::ground) continue;
        const double dx = p.x - x;
        const double dy = p.y - y;
        if (dx * dx + dy * dy > r2) continue;
        const double t = p.z - comp;
        const double next = sum + t;
        comp = (next - sum) - t;
        sum = next;
        ++count;
    }
    if (count == 0)
        throw NoGroundNearbyError("no ground points within " + std::to_string(ground_radius) +
                                  " m of (" + std::to_string(x) + ", " + std::to_string(y) + ")");
    return {x, y, sum / static_cast<double>(count) + cfg.scanner_height};
}

PointCloud slr(const PointCloud& cloud, double x, double y, const ScannerConfig& cfg,
               double ground_radius, unsigned workers) {
    const Vec3 origin = compute_scanner_origin(cloud, x, y, cfg, ground_radius);
    return simulate_scan(cloud, origin, cfg, workers);
}

}  // namespace slr
