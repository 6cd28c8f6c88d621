#pragma once

#include "slr/cloud.hpp"

namespace slr {

/// (R, theta, phi): radius in meters, zenith angle in degrees (0 = straight up,
/// 180 = straight down), azimuth in degrees in [0, 360). Angles are degrees in
/// every public interface of this library.
struct SphericalPoint {
    double R = 0.0;
    double theta = 0.0;
    double phi = 0.0;
};

constexpr double kPi = 3.141592653589793238462643383279502884;

constexpr double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

/// Euclidean to spherical about `origin`. At the poles (theta 0 or 180) the
/// azimuth is undefined; it is fixed to 0 so downstream binning is
/// deterministic. Throws ZeroRadiusError when p coincides with origin.
SphericalPoint to_spherical(const Vec3& p, const Vec3& origin);

inline SphericalPoint to_spherical(const LabeledPoint& p, const Vec3& origin) {
    return to_spherical(p.pos(), origin);
}

/// Inverse of to_spherical (round-trips within 1e-9 m relative error).
Vec3 from_spherical(const SphericalPoint& s, const Vec3& origin);

}  // namespace slr
