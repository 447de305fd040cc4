#include "qmlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qmlab {

namespace {

std::vector<Convergent> continuedFractionConvergents(double alpha, long long q_max) {
    std::vector<Convergent> out;
    long long p_prev = 1, q_prev = 0;
    long long p_cur = 0, q_cur = 1;
    double y = alpha;
    for (int k = 0; k < 64; ++k) {
        const double a_floor = std::floor(y);
        if (a_floor > 9e17) {
            break;  // next convergent denominator would overflow anyway
        }
        const long long a = static_cast<long long>(a_floor);
        const long long p_next = a * p_cur + p_prev;
        const long long q_next = a * q_cur + q_prev;
        if (q_next > q_max || p_next < 0 || q_next < q_cur) {
            break;
        }
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        out.push_back(Convergent{p_cur, q_cur});
        const double frac = y - a_floor;
        if (frac < 1e-18) {
            break;  // alpha is exhausted at double precision
        }
        y = 1.0 / frac;
    }
    return out;
}

}  // namespace

SlopeParam SlopeParam::fromAlpha(double alpha) {
    if (!std::isfinite(alpha) || alpha <= 0.0) {
        throw std::invalid_argument("SlopeParam: alpha must be finite and positive");
    }
    auto convergents = continuedFractionConvergents(alpha, kRationalDenominatorMax);
    for (const auto& c : convergents) {
        const double err = std::abs(alpha - static_cast<double>(c.p) / static_cast<double>(c.q));
        if (err < kRationalTol) {
            std::ostringstream msg;
            msg << "SlopeParam: alpha " << alpha << " is within " << kRationalTol << " of "
                << c.p << "/" << c.q << "; too close to rational for empirical density";
            throw std::invalid_argument(msg.str());
        }
    }
    return SlopeParam(alpha, std::move(convergents));
}

PunctureSet PunctureSet::create(std::vector<TorusPoint> points, double r0) {
    if (points.empty() || points.size() > kMaxPunctures) {
        throw std::invalid_argument("PunctureSet: need between 1 and 16 points");
    }
    if (!(r0 > 0.0) || !(r0 < 0.25)) {
        throw std::invalid_argument("PunctureSet: r0 must lie in (0, 1/4)");
    }
    for (auto& p : points) {
        p = wrap(p.x, p.y);
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (dist(points[i], points[j]) <= 2.0 * r0) {
                std::ostringstream msg;
                msg << "PunctureSet: points " << i << " and " << j
                    << " are closer than 2*r0; slowing disks must be disjoint";
                throw std::invalid_argument(msg.str());
            }
        }
    }
    PunctureSet set;
    set.points_ = std::move(points);
    set.r0_ = r0;
    return set;
}

bool PunctureSet::contains(TorusPoint p) const {
    return std::any_of(points_.begin(), points_.end(),
                       [&](const TorusPoint& q) { return q == p; });
}

double slowingFactor(TorusPoint p, const PunctureSet& punctures) {
    double f = 1.0;
    const double r0sq = punctures.r0() * punctures.r0();
    for (const auto& q : punctures.points()) {
        const double u = distSq(p, q) / r0sq;
        if (u >= 1.0) {
            continue;
        }
        f *= smoothStep(u);
        if (f == 0.0) {
            return 0.0;
        }
    }
    return f;
}

CompositeField::CompositeField(SlopeParam slope, PunctureSet punctures)
    : slope_(std::move(slope)),
      punctures_(std::move(punctures)),
      bound_(std::sqrt(1.0 + slope_.alpha() * slope_.alpha())) {}

CompositeField CompositeField::linear(SlopeParam slope) {
    return CompositeField(std::move(slope), PunctureSet{});
}

Vec2 CompositeField::eval(TorusPoint p) const {
    if (punctures_.empty()) {
        return Vec2{1.0, slope_.alpha()};
    }
    const double f = slowingFactor(p, punctures_);
    return Vec2{f, f * slope_.alpha()};
}

bool OrbitDistinctnessReport::allDistinct() const {
    return std::none_of(pairs.begin(), pairs.end(),
                        [](const PairVerdict& v) { return v.same_orbit; });
}

const PairVerdict* OrbitDistinctnessReport::firstSameOrbit() const {
    for (const auto& v : pairs) {
        if (v.same_orbit) {
            return &v;
        }
    }
    return nullptr;
}

OrbitDistinctnessReport checkDistinctDenseOrbits(const PunctureSet& punctures,
                                                 const SlopeParam& slope, int depth) {
    if (depth < 1) {
        throw std::invalid_argument("checkDistinctDenseOrbits: depth must be >= 1");
    }
    OrbitDistinctnessReport report;
    report.depth = depth;
    report.on_shared_orbit.assign(punctures.size(), false);
    const double alpha = slope.alpha();
    const auto& pts = punctures.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            PairVerdict verdict{i, j, false, 0.0};
            for (int m = -depth; m <= depth; ++m) {
                const double s = (pts[j].x - pts[i].x) + m;
                const double r = pts[j].y - pts[i].y - s * alpha;
                if (std::abs(r - std::nearbyint(r)) < kOrbitTol) {
                    verdict.same_orbit = true;
                    verdict.shift = s;
                    break;
                }
            }
            if (verdict.same_orbit) {
                report.on_shared_orbit[i] = true;
                report.on_shared_orbit[j] = true;
            }
            report.pairs.push_back(verdict);
        }
    }
    return report;
}

CompositeField buildPuncturedField(const SlopeParam& slope, const PunctureSet& punctures,
                                   int depth) {
    if (punctures.empty()) {
        throw std::invalid_argument("buildPuncturedField: puncture set must be nonempty");
    }
    const auto report = checkDistinctDenseOrbits(punctures, slope, depth);
    if (const PairVerdict* bad = report.firstSameOrbit()) {
        std::ostringstream msg;
        msg << "buildPuncturedField: punctures " << bad->i << " and " << bad->j
            << " lie on a common orbit line (shift s = " << bad->shift << ")";
        throw ConstructionRejected(SameOrbitWitness{bad->i, bad->j, bad->shift}, msg.str());
    }
    return CompositeField(slope, punctures);
}

}  // namespace qmlab
