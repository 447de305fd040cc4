#pragma once

#include "qmlab/field.hpp"
#include "qmlab/integrator.hpp"
#include "qmlab/recurrence.hpp"
#include "qmlab/torus.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmlab {

/// Config or schema problem; the message carries the offending schema path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SlopeConfig {
    double alpha = kDefaultAlpha;
};

struct PunctureConfig {
    // Default: the single-stop construction. Configure an empty list for the
    // pure linear field.
    std::vector<TorusPoint> points{TorusPoint{0.0, 0.0}};
    double r0 = kDefaultSlowingRadius;
};

struct DensityConfig {
    int m = 20;
    double T = 10000.0;
    int random_starts = 50;
    bool include_punctures = true;
    std::vector<TorusPoint> starts;
};

struct OrbitConfig {
    TorusPoint x0{0.1, 0.2};
    double T = 100.0;
    Direction direction = Direction::Forward;
};

struct ScanTConfig {
    std::vector<double> t_values{1.0, 0.5, 0.7071067811865476,
                                 1.7320508075688772, 1.0471975511965976, 1.3591409142295225};
    TorusPoint x0{0.1, 0.2};
    long long n = 50000;
    int m = 20;
    long long oracle_bound = 10000;
};

struct CertificateConfig {
    int pairs = 5;
    int samples_per_u = 25;
    double u_radius = 0.02;
    double v_radius = 0.1;
    long long n_max = 50000;
};

struct RecurrenceConfig {
    double t = 0.41421356237309515;  // sqrt(2) - 1
    int m = 20;
    double delta = 0.05;
    long long n_max = 50000;
    int maps = 20;
    ConjugacyGeneratorParams generator;
    std::optional<std::vector<Shear>> shears;  // explicit single map overrides `maps`
    CertificateConfig certificates;
};

struct OracleConfig {
    double beta = 1.0;
    double gamma = kDefaultAlpha;
    long long bound = 10000;
};

struct ExperimentConfig {
    SlopeConfig slope;
    PunctureConfig punctures;
    int orbit_scan_depth = kDefaultOrbitScanDepth;
    IntegratorConfig integrator;
    DensityConfig density;
    OrbitConfig orbit;
    ScanTConfig scan_t;
    RecurrenceConfig recurrence;
    OracleConfig oracle;

    static ExperimentConfig fromJson(const nlohmann::json& j);
    static ExperimentConfig fromFile(const std::string& path);

    nlohmann::json toJson() const;

    /// Slowed field when punctures are configured, otherwise the linear one.
    CompositeField buildField() const;
};

}  // namespace qmlab
