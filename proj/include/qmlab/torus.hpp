#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qmlab {

/// A point of the flat torus R^2/Z^2 in canonical coordinates [0,1)^2.
struct TorusPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const TorusPoint&, const TorusPoint&) = default;
};

/// Tangent vector (or plain planar displacement).
struct Vec2 {
    double dx = 0.0;
    double dy = 0.0;

    double norm() const { return std::sqrt(dx * dx + dy * dy); }
};

/// Reduce a real to [0,1). Floor-based, so negative inputs land in range;
/// the w == 1.0 branch absorbs the rounding of tiny negative inputs.
inline double wrapUnit(double v) {
    const double w = v - std::floor(v);
    return w < 1.0 ? w : 0.0;
}

/// Canonical torus coordinates of a planar point.
inline TorusPoint wrap(double rx, double ry) {
    if (!std::isfinite(rx) || !std::isfinite(ry)) {
        throw std::invalid_argument("wrap: coordinates must be finite");
    }
    return TorusPoint{wrapUnit(rx), wrapUnit(ry)};
}

/// Signed per-axis displacement from `from` to `to` through the nearest
/// representative, in [-0.5, 0.5].
inline double axisDelta(double from, double to) {
    const double d = to - from;
    return d - std::nearbyint(d);
}

/// Flat metric: min over the nine lattice representatives. Bounded by
/// sqrt(2)/2. Equals the norm of liftDisplacement(p, q) exactly.
inline double dist(TorusPoint p, TorusPoint q) {
    const double ax = axisDelta(p.x, q.x);
    const double ay = axisDelta(p.y, q.y);
    return std::sqrt(ax * ax + ay * ay);
}

inline double distSq(TorusPoint p, TorusPoint q) {
    const double ax = axisDelta(p.x, q.x);
    const double ay = axisDelta(p.y, q.y);
    return ax * ax + ay * ay;
}

/// Shortest displacement vector realizing dist(p, q). Ties between lattice
/// offsets are broken by lexicographic order on (m, n), first hit wins.
inline Vec2 liftDisplacement(TorusPoint p, TorusPoint q) {
    double bestDx = 0.0;
    double bestDy = 0.0;
    double bestSq = std::numeric_limits<double>::infinity();
    for (int m = -1; m <= 1; ++m) {
        for (int n = -1; n <= 1; ++n) {
            const double dx = q.x + m - p.x;
            const double dy = q.y + n - p.y;
            const double sq = dx * dx + dy * dy;
            if (sq < bestSq) {
                bestSq = sq;
                bestDx = dx;
                bestDy = dy;
            }
        }
    }
    return Vec2{bestDx, bestDy};
}

}  // namespace qmlab
