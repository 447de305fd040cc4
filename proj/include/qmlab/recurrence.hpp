#pragma once

#include "qmlab/torus.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qmlab {

enum class ShearAxis { X, Y };

/// Area-preserving sine shear. Axis X maps (x, y) to (x, y + a*sin(2*pi*k*x));
/// axis Y acts symmetrically on x. The exact inverse is the same shear with
/// amplitude -a.
struct Shear {
    ShearAxis axis = ShearAxis::X;
    double amplitude = 0.0;
    int frequency = 1;
};

struct ConjugacyGeneratorParams {
    int max_shears = 4;
    double max_amplitude = 0.15;
    int max_frequency = 3;
};

/// Ordered shear composition defining the conjugating diffeomorphism g;
/// applying g applies the shears in list order.
struct ConjugacySpec {
    std::vector<Shear> shears;
    std::optional<std::uint64_t> seed;  // set when randomly generated

    void validate() const;  // |amplitude| <= 0.5, 1 <= frequency <= 32, <= 16 shears

    static ConjugacySpec random(std::uint64_t seed, const ConjugacyGeneratorParams& params = {});
};

TorusPoint applyShear(const Shear& shear, TorusPoint p);

/// The map g . R_t . g^-1 with R_t the period-1 circle action
/// (x, y) -> (x + t mod 1, y). All evaluations are closed-form.
class ConjugatedMap {
public:
    ConjugatedMap(ConjugacySpec spec, double t);

    TorusPoint apply(TorusPoint p) const;
    TorusPoint applyConjugacy(TorusPoint p) const;         // g
    TorusPoint applyConjugacyInverse(TorusPoint p) const;  // g^-1
    TorusPoint rotate(TorusPoint p) const;                 // R_t

    double t() const { return t_; }
    const ConjugacySpec& spec() const { return spec_; }

private:
    ConjugacySpec spec_;
    double t_;
};

struct RecurrenceReport {
    int m = 0;
    double delta = 0.0;
    long long n_max = 0;
    std::vector<std::optional<long long>> first_return;  // row-major iy*m+ix; nullopt = failure
    long long failure_count = 0;
    long long max_return = 0;  // over successful grid points
};

/// For each of the m*m grid points (i/m, j/m): the least n <= n_max with
/// dist(f^n(x), x) < delta, by repeated exact map application.
RecurrenceReport recurrenceScan(const ConjugatedMap& map, int m, double delta, long long n_max,
                                int threads = 1);

struct BallPair {
    TorusPoint u_center;
    double u_radius = 0.0;
    TorusPoint v_center;
    double v_radius = 0.0;
};

struct CertificateResult {
    bool pass = false;
    std::optional<TorusPoint> witness;  // first sample that never entered V
    long long max_n = 0;                // largest hitting time among samples
};

/// Checks, for each nested pair (closure of U inside V), that every sampled
/// point of the closed U-ball reaches the V-ball within n_max iterations.
/// Samples are deterministic: the center plus rings of eight points at radii
/// u_radius*i/R, with R = ceil((samples_per_u - 1)/8).
std::vector<CertificateResult> certificateCheck(const ConjugatedMap& map,
                                                const std::vector<BallPair>& pairs,
                                                int samples_per_u, long long n_max,
                                                int threads = 1);

}  // namespace qmlab
