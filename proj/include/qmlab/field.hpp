#pragma once

#include "qmlab/torus.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmlab {

inline constexpr double kDefaultAlpha = 1.4142135623730951;  // sqrt(2)
inline constexpr double kDefaultSlowingRadius = 0.05;
inline constexpr double kRationalTol = 1e-12;
inline constexpr long long kRationalDenominatorMax = 1000000;
inline constexpr double kOrbitTol = 1e-9;
inline constexpr std::size_t kMaxPunctures = 16;
inline constexpr int kDefaultOrbitScanDepth = 50;

struct Convergent {
    long long p = 0;
    long long q = 1;
};

/// Slope of the base linear field (1, alpha), with its continued-fraction
/// convergents. Construction rejects slopes that a rational p/q with
/// q <= kRationalDenominatorMax approximates to within kRationalTol, since
/// such slopes would break empirical density at the horizons used here.
class SlopeParam {
public:
    static SlopeParam fromAlpha(double alpha);

    double alpha() const { return alpha_; }
    const std::vector<Convergent>& convergents() const { return convergents_; }

private:
    SlopeParam(double alpha, std::vector<Convergent> convergents)
        : alpha_(alpha), convergents_(std::move(convergents)) {}

    double alpha_ = kDefaultAlpha;
    std::vector<Convergent> convergents_;
};

/// Finite set of slowing centers plus the slowing radius r0. Points are
/// stored in canonical coordinates; the set may be empty (pure linear field).
class PunctureSet {
public:
    PunctureSet() = default;  // empty set, no slowing anywhere

    /// Validates: 1 <= |points| <= kMaxPunctures, 0 < r0 < 1/4, and pairwise
    /// distances > 2*r0 (disjoint slowing disks).
    static PunctureSet create(std::vector<TorusPoint> points, double r0);

    bool empty() const { return points_.empty(); }
    std::size_t size() const { return points_.size(); }
    const std::vector<TorusPoint>& points() const { return points_; }
    double r0() const { return r0_; }

    /// Exact coordinate membership.
    bool contains(TorusPoint p) const;

private:
    std::vector<TorusPoint> points_;
    double r0_ = 0.0;
};

/// C-infinity transition: chi(u)/(chi(u)+chi(1-u)) with chi(u)=exp(-1/u) for
/// u>0, 0 otherwise. Exactly 0 for u<=0, exactly 1 for u>=1, strictly
/// increasing in between, infinitely flat at both ends.
inline double smoothStep(double u) {
    if (!(u > 0.0)) {
        return 0.0;
    }
    if (u >= 1.0) {
        return 1.0;
    }
    const double a = std::exp(-1.0 / u);
    const double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

/// Product of per-puncture radial profiles; 0 exactly on the puncture set,
/// 1 outside every slowing disk. Note exp(-1/u) underflows to zero for
/// dist < r0/sqrt(745), so the numeric zero set is a tiny disk, not a point.
double slowingFactor(TorusPoint p, const PunctureSet& punctures);

/// The slowed field f*(1, alpha): the linear flow multiplied by a smooth
/// factor vanishing exactly on the punctures. Immutable after construction.
class CompositeField {
public:
    static CompositeField linear(SlopeParam slope);

    Vec2 eval(TorusPoint p) const;
    double bound() const { return bound_; }
    const SlopeParam& slope() const { return slope_; }
    double alpha() const { return slope_.alpha(); }
    const PunctureSet& punctures() const { return punctures_; }
    bool isPuncture(TorusPoint p) const { return punctures_.contains(p); }

private:
    friend CompositeField buildPuncturedField(const SlopeParam&, const PunctureSet&, int);

    CompositeField(SlopeParam slope, PunctureSet punctures);

    SlopeParam slope_;
    PunctureSet punctures_;
    double bound_;
};

inline Vec2 evalField(const CompositeField& field, TorusPoint p) { return field.eval(p); }

struct PairVerdict {
    std::size_t i = 0;
    std::size_t j = 0;
    bool same_orbit = false;
    double shift = 0.0;  // s with q = p + s*(1, alpha) mod Z^2, valid iff same_orbit
};

struct OrbitDistinctnessReport {
    std::vector<PairVerdict> pairs;
    std::vector<bool> on_shared_orbit;  // per point: member of some same-orbit pair
    int depth = 0;

    bool allDistinct() const;
    const PairVerdict* firstSameOrbit() const;
};

/// Pairwise scan deciding (up to scan depth and kOrbitTol) whether two
/// punctures lie on a common orbit line of the unslowed flow: searches
/// integers |m| <= depth, ascending from -depth, for s = (q.x - p.x) + m with
/// q.y - p.y - s*alpha within kOrbitTol of an integer.
OrbitDistinctnessReport checkDistinctDenseOrbits(const PunctureSet& punctures,
                                                 const SlopeParam& slope, int depth);

struct SameOrbitWitness {
    std::size_t i = 0;
    std::size_t j = 0;
    double shift = 0.0;
};

/// Thrown by buildPuncturedField when two punctures share an orbit line.
class ConstructionRejected : public std::runtime_error {
public:
    ConstructionRejected(SameOrbitWitness w, const std::string& message)
        : std::runtime_error(message), witness(w) {}

    SameOrbitWitness witness;
};

/// Builds the slowed field after verifying that all punctures lie on
/// pairwise distinct orbit lines (within the scan depth).
CompositeField buildPuncturedField(const SlopeParam& slope, const PunctureSet& punctures,
                                   int depth);

}  // namespace qmlab
