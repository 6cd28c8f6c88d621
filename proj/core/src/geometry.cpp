#include "slr/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "slr/errors.hpp"

namespace slr {

SphericalPoint to_spherical(const Vec3& p, const Vec3& origin) {
    const Vec3 d = p - origin;
    const double R = d.norm();
    if (R == 0.0) throw ZeroRadiusError();

    const double cos_theta = std::clamp(d.z / R, -1.0, 1.0);
    const double theta = rad_to_deg(std::acos(cos_theta));

    double phi = 0.0;
    if (d.x != 0.0 || d.y != 0.0) {
        phi = rad_to_deg(std::atan2(d.y, d.x));
        if (phi < 0.0) phi += 360.0;
        // atan2 results just under 0 can round up to exactly 360 here.
        if (phi >= 360.0) phi = 0.0;
    }
    return {R, theta, phi};
}

Vec3 from_spherical(const SphericalPoint& s, const Vec3& origin) {
    const double theta = deg_to_rad(s.theta);
    const double phi = deg_to_rad(s.phi);
    const double sin_theta = std::sin(theta);
    return {origin.x + s.R * sin_theta * std::cos(phi),
            origin.y + s.R * sin_theta * std::sin(phi),
            origin.z + s.R * std::cos(theta)};
}

}  // namespace slr
