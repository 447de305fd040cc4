#include "qmlab/recurrence.hpp"

#include "qmlab/parallel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qmlab {

void ConjugacySpec::validate() const {
    if (shears.size() > 16) {
        throw std::invalid_argument("ConjugacySpec: at most 16 shears");
    }
    for (const auto& s : shears) {
        if (!(std::abs(s.amplitude) <= 0.5)) {
            throw std::invalid_argument("ConjugacySpec: |amplitude| must be <= 0.5");
        }
        if (s.frequency < 1 || s.frequency > 32) {
            throw std::invalid_argument("ConjugacySpec: frequency must be in [1, 32]");
        }
    }
}

ConjugacySpec ConjugacySpec::random(std::uint64_t seed, const ConjugacyGeneratorParams& params) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> count_dist(1, params.max_shears);
    std::uniform_int_distribution<int> axis_dist(0, 1);
    std::uniform_int_distribution<int> freq_dist(1, params.max_frequency);
    std::uniform_real_distribution<double> amp_dist(-params.max_amplitude, params.max_amplitude);
    ConjugacySpec spec;
    spec.seed = seed;
    const int n = count_dist(rng);
    spec.shears.reserve(n);
    for (int i = 0; i < n; ++i) {
        Shear s;
        s.axis = axis_dist(rng) == 0 ? ShearAxis::X : ShearAxis::Y;
        s.frequency = freq_dist(rng);
        s.amplitude = amp_dist(rng);
        spec.shears.push_back(s);
    }
    spec.validate();
    return spec;
}

TorusPoint applyShear(const Shear& shear, TorusPoint p) {
    const double two_pi = 2.0 * std::numbers::pi;
    if (shear.axis == ShearAxis::X) {
        return TorusPoint{p.x, wrapUnit(p.y + shear.amplitude * std::sin(two_pi * shear.frequency * p.x))};
    }
    return TorusPoint{wrapUnit(p.x + shear.amplitude * std::sin(two_pi * shear.frequency * p.y)), p.y};
}

ConjugatedMap::ConjugatedMap(ConjugacySpec spec, double t) : spec_(std::move(spec)), t_(t) {
    spec_.validate();
    if (!std::isfinite(t_)) {
        throw std::invalid_argument("ConjugatedMap: t must be finite");
    }
}

TorusPoint ConjugatedMap::applyConjugacy(TorusPoint p) const {
    for (const auto& s : spec_.shears) {
        p = applyShear(s, p);
    }
    return p;
}

TorusPoint ConjugatedMap::applyConjugacyInverse(TorusPoint p) const {
    for (auto it = spec_.shears.rbegin(); it != spec_.shears.rend(); ++it) {
        Shear inv = *it;
        inv.amplitude = -inv.amplitude;
        p = applyShear(inv, p);
    }
    return p;
}

TorusPoint ConjugatedMap::rotate(TorusPoint p) const {
    return TorusPoint{wrapUnit(p.x + t_), p.y};
}

TorusPoint ConjugatedMap::apply(TorusPoint p) const {
    return applyConjugacy(rotate(applyConjugacyInverse(p)));
}

RecurrenceReport recurrenceScan(const ConjugatedMap& map, int m, double delta, long long n_max,
                                int threads) {
    if (m < 1) {
        throw std::invalid_argument("recurrenceScan: m must be >= 1");
    }
    if (!(delta > 0.0) || !(delta < 0.25)) {
        throw std::invalid_argument("recurrenceScan: delta must be in (0, 1/4)");
    }
    if (n_max < 1) {
        throw std::invalid_argument("recurrenceScan: n_max must be >= 1");
    }
    RecurrenceReport report;
    report.m = m;
    report.delta = delta;
    report.n_max = n_max;
    report.first_return.assign(static_cast<std::size_t>(m) * m, std::nullopt);

    parallelFor(static_cast<std::size_t>(m) * m, threads, [&](std::size_t idx) {
        const int iy = static_cast<int>(idx) / m;
        const int ix = static_cast<int>(idx) % m;
        const TorusPoint x{static_cast<double>(ix) / m, static_cast<double>(iy) / m};
        TorusPoint y = x;
        for (long long n = 1; n <= n_max; ++n) {
            y = map.apply(y);
            if (dist(y, x) < delta) {
                report.first_return[idx] = n;
                break;
            }
        }
    });

    for (const auto& r : report.first_return) {
        if (r) {
            report.max_return = std::max(report.max_return, *r);
        } else {
            ++report.failure_count;
        }
    }
    return report;
}

std::vector<CertificateResult> certificateCheck(const ConjugatedMap& map,
                                                const std::vector<BallPair>& pairs,
                                                int samples_per_u, long long n_max, int threads) {
    if (n_max < 1) {
        throw std::invalid_argument("certificateCheck: n_max must be >= 1");
    }
    if (samples_per_u < 1) {
        throw std::invalid_argument("certificateCheck: samples_per_u must be >= 1");
    }
    for (const auto& pair : pairs) {
        if (!(pair.u_radius > 0.0) || !(pair.u_radius < pair.v_radius)) {
            throw std::invalid_argument("certificateCheck: need 0 < u_radius < v_radius");
        }
        if (!(dist(pair.u_center, pair.v_center) + pair.u_radius < pair.v_radius)) {
            throw std::invalid_argument(
                "certificateCheck: closed U-ball must be contained in the V-ball");
        }
    }

    std::vector<CertificateResult> results(pairs.size());
    parallelFor(pairs.size(), threads, [&](std::size_t idx) {
        const BallPair& pair = pairs[idx];
        std::vector<TorusPoint> samples;
        samples.push_back(pair.u_center);
        const int rings = std::max(1, (samples_per_u - 1 + 7) / 8);
        const double two_pi = 2.0 * std::numbers::pi;
        for (int i = 1; i <= rings; ++i) {
            const double r = pair.u_radius * i / rings;
            for (int j = 0; j < 8; ++j) {
                const double th = two_pi * j / 8.0;
                samples.push_back(
                    wrap(pair.u_center.x + r * std::cos(th), pair.u_center.y + r * std::sin(th)));
            }
        }

        CertificateResult res;
        res.pass = true;
        for (const auto& s : samples) {
            TorusPoint y = s;
            bool hit = false;
            for (long long n = 1; n <= n_max; ++n) {
                y = map.apply(y);
                if (dist(y, pair.v_center) < pair.v_radius) {
                    res.max_n = std::max(res.max_n, n);
                    hit = true;
                    break;
                }
            }
            if (!hit) {
                res.pass = false;
                res.witness = s;
                break;
            }
        }
        results[idx] = res;
    });
    return results;
}

}  // namespace qmlab
