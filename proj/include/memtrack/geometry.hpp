#pragma once

#include <algorithm>
#include <cmath>

#include "memtrack/core.hpp"

namespace memtrack {

inline constexpr double kPi = 3.1415926535897932384626433832795;

/// Area of the intersection of two discs of radii r1, r2 with center
/// distance d (the circular lens).
inline double disc_lens_area(double r1, double r2, double d) {
    if (r1 <= 0.0 || r2 <= 0.0) return 0.0;
    if (d >= r1 + r2) return 0.0;
    if (d <= std::abs(r1 - r2)) {
        double r = std::min(r1, r2);
        return kPi * r * r;
    }
    double a1 = (d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1);
    double a2 = (d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2);
    a1 = std::clamp(a1, -1.0, 1.0);
    a2 = std::clamp(a2, -1.0, 1.0);
    double tri = 0.5 * std::sqrt(std::max(0.0, (-d + r1 + r2) * (d + r1 - r2) *
                                                   (d - r1 + r2) * (d + r1 + r2)));
    return r1 * r1 * std::acos(a1) + r2 * r2 * std::acos(a2) - tri;
}

inline double center_distance(const MaskGeom& a, const MaskGeom& b) {
    double dx = a.center_x - b.center_x;
    double dy = a.center_y - b.center_y;
    return std::sqrt(dx * dx + dy * dy);
}

/// Fraction of the smaller raw disc covered by the other; 1.0 when fully
/// contained, 0.0 when disjoint. Ignores visible fractions.
inline double disc_overlap(const MaskGeom& a, const MaskGeom& b) {
    double lens = disc_lens_area(a.radius, b.radius, center_distance(a, b));
    double smaller = kPi * std::min(a.radius * a.radius, b.radius * b.radius);
    return smaller > 0.0 ? lens / smaller : 0.0;
}

}  // namespace memtrack
