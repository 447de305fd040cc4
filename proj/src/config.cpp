#include "qmlab/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <optional>

namespace qmlab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config: " + path + ": " + what);
}

const json* find(const json& j, const std::string& path, const std::string& key) {
    if (!j.is_object()) {
        fail(path, "expected an object");
    }
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double getDouble(const json& j, const std::string& path, const std::string& key, double dflt) {
    const json* v = find(j, path, key);
    if (!v) {
        return dflt;
    }
    if (!v->is_number()) {
        fail(path + "." + key, "expected a number");
    }
    return v->get<double>();
}

long long getInt(const json& j, const std::string& path, const std::string& key, long long dflt) {
    const json* v = find(j, path, key);
    if (!v) {
        return dflt;
    }
    if (!v->is_number_integer()) {
        fail(path + "." + key, "expected an integer");
    }
    return v->get<long long>();
}

bool getBool(const json& j, const std::string& path, const std::string& key, bool dflt) {
    const json* v = find(j, path, key);
    if (!v) {
        return dflt;
    }
    if (!v->is_boolean()) {
        fail(path + "." + key, "expected a boolean");
    }
    return v->get<bool>();
}

TorusPoint parsePoint(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        fail(path, "expected a [x, y] pair of numbers");
    }
    const double x = v[0].get<double>();
    const double y = v[1].get<double>();
    if (!std::isfinite(x) || !std::isfinite(y)) {
        fail(path, "coordinates must be finite");
    }
    return wrap(x, y);
}

std::optional<std::vector<TorusPoint>> parsePoints(const json& j, const std::string& path,
                                                   const std::string& key) {
    const json* v = find(j, path, key);
    if (!v) {
        return std::nullopt;
    }
    if (!v->is_array()) {
        fail(path + "." + key, "expected an array of [x, y] pairs");
    }
    std::vector<TorusPoint> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
        out.push_back(parsePoint((*v)[i], path + "." + key + "[" + std::to_string(i) + "]"));
    }
    return out;
}

json pointToJson(TorusPoint p) { return json::array({p.x, p.y}); }

json pointsToJson(const std::vector<TorusPoint>& pts) {
    json arr = json::array();
    for (const auto& p : pts) {
        arr.push_back(pointToJson(p));
    }
    return arr;
}

}  // namespace

ExperimentConfig ExperimentConfig::fromJson(const json& j) {
    if (!j.is_object()) {
        fail("(root)", "expected an object");
    }
    ExperimentConfig cfg;

    if (const json* s = find(j, "(root)", "slope")) {
        cfg.slope.alpha = getDouble(*s, "slope", "alpha", cfg.slope.alpha);
    }
    if (const json* p = find(j, "(root)", "punctures")) {
        if (auto pts = parsePoints(*p, "punctures", "points")) {
            cfg.punctures.points = std::move(*pts);
        }
        cfg.punctures.r0 = getDouble(*p, "punctures", "r0", cfg.punctures.r0);
    }
    cfg.orbit_scan_depth =
        static_cast<int>(getInt(j, "(root)", "orbit_scan_depth", cfg.orbit_scan_depth));

    if (const json* i = find(j, "(root)", "integrator")) {
        cfg.integrator.rel_tol = getDouble(*i, "integrator", "rel_tol", cfg.integrator.rel_tol);
        cfg.integrator.abs_tol = getDouble(*i, "integrator", "abs_tol", cfg.integrator.abs_tol);
        cfg.integrator.max_steps = getInt(*i, "integrator", "max_steps", cfg.integrator.max_steps);
        cfg.integrator.max_step_len =
            getDouble(*i, "integrator", "max_step_len", cfg.integrator.max_step_len);
        cfg.integrator.stall_speed =
            getDouble(*i, "integrator", "stall_speed", cfg.integrator.stall_speed);
        cfg.integrator.stall_min_progress =
            getDouble(*i, "integrator", "stall_min_progress", cfg.integrator.stall_min_progress);
        try {
            cfg.integrator.validate();
        } catch (const std::invalid_argument& e) {
            fail("integrator", e.what());
        }
    }

    if (const json* d = find(j, "(root)", "density")) {
        cfg.density.m = static_cast<int>(getInt(*d, "density", "m", cfg.density.m));
        cfg.density.T = getDouble(*d, "density", "T", cfg.density.T);
        cfg.density.random_starts =
            static_cast<int>(getInt(*d, "density", "random_starts", cfg.density.random_starts));
        cfg.density.include_punctures =
            getBool(*d, "density", "include_punctures", cfg.density.include_punctures);
        if (auto pts = parsePoints(*d, "density", "starts")) {
            cfg.density.starts = std::move(*pts);
        }
        if (cfg.density.m < 1) {
            fail("density.m", "must be >= 1");
        }
        if (!(cfg.density.T > 0.0)) {
            fail("density.T", "must be positive");
        }
        if (cfg.density.random_starts < 0) {
            fail("density.random_starts", "must be >= 0");
        }
    }

    if (const json* o = find(j, "(root)", "orbit")) {
        if (const json* x = find(*o, "orbit", "x0")) {
            cfg.orbit.x0 = parsePoint(*x, "orbit.x0");
        }
        cfg.orbit.T = getDouble(*o, "orbit", "T", cfg.orbit.T);
        if (!(cfg.orbit.T > 0.0)) {
            fail("orbit.T", "must be positive");
        }
        if (const json* dir = find(*o, "orbit", "direction")) {
            if (!dir->is_string()) {
                fail("orbit.direction", "expected \"forward\" or \"backward\"");
            }
            const std::string s = dir->get<std::string>();
            if (s == "forward") {
                cfg.orbit.direction = Direction::Forward;
            } else if (s == "backward") {
                cfg.orbit.direction = Direction::Backward;
            } else {
                fail("orbit.direction", "expected \"forward\" or \"backward\"");
            }
        }
    }

    if (const json* s = find(j, "(root)", "scan_t")) {
        if (const json* tv = find(*s, "scan_t", "t_values")) {
            if (!tv->is_array() || tv->empty()) {
                fail("scan_t.t_values", "expected a nonempty array of numbers");
            }
            cfg.scan_t.t_values.clear();
            for (std::size_t i = 0; i < tv->size(); ++i) {
                if (!(*tv)[i].is_number()) {
                    fail("scan_t.t_values[" + std::to_string(i) + "]", "expected a number");
                }
                cfg.scan_t.t_values.push_back((*tv)[i].get<double>());
            }
        }
        if (const json* x = find(*s, "scan_t", "x0")) {
            cfg.scan_t.x0 = parsePoint(*x, "scan_t.x0");
        }
        cfg.scan_t.n = getInt(*s, "scan_t", "n", cfg.scan_t.n);
        cfg.scan_t.m = static_cast<int>(getInt(*s, "scan_t", "m", cfg.scan_t.m));
        cfg.scan_t.oracle_bound = getInt(*s, "scan_t", "oracle_bound", cfg.scan_t.oracle_bound);
        if (cfg.scan_t.n < 1) {
            fail("scan_t.n", "must be >= 1");
        }
        if (cfg.scan_t.m < 1) {
            fail("scan_t.m", "must be >= 1");
        }
        if (cfg.scan_t.oracle_bound < 1) {
            fail("scan_t.oracle_bound", "must be >= 1");
        }
    }

    if (const json* r = find(j, "(root)", "recurrence")) {
        cfg.recurrence.t = getDouble(*r, "recurrence", "t", cfg.recurrence.t);
        cfg.recurrence.m = static_cast<int>(getInt(*r, "recurrence", "m", cfg.recurrence.m));
        cfg.recurrence.delta = getDouble(*r, "recurrence", "delta", cfg.recurrence.delta);
        cfg.recurrence.n_max = getInt(*r, "recurrence", "n_max", cfg.recurrence.n_max);
        cfg.recurrence.maps = static_cast<int>(getInt(*r, "recurrence", "maps", cfg.recurrence.maps));
        if (cfg.recurrence.m < 1) {
            fail("recurrence.m", "must be >= 1");
        }
        if (!(cfg.recurrence.delta > 0.0) || !(cfg.recurrence.delta < 0.25)) {
            fail("recurrence.delta", "must be in (0, 1/4)");
        }
        if (cfg.recurrence.n_max < 1) {
            fail("recurrence.n_max", "must be >= 1");
        }
        if (cfg.recurrence.maps < 1) {
            fail("recurrence.maps", "must be >= 1");
        }
        if (const json* g = find(*r, "recurrence", "generator")) {
            cfg.recurrence.generator.max_shears = static_cast<int>(
                getInt(*g, "recurrence.generator", "max_shears", cfg.recurrence.generator.max_shears));
            cfg.recurrence.generator.max_amplitude = getDouble(
                *g, "recurrence.generator", "max_amplitude", cfg.recurrence.generator.max_amplitude);
            cfg.recurrence.generator.max_frequency = static_cast<int>(getInt(
                *g, "recurrence.generator", "max_frequency", cfg.recurrence.generator.max_frequency));
            if (cfg.recurrence.generator.max_shears < 1 ||
                cfg.recurrence.generator.max_shears > 16) {
                fail("recurrence.generator.max_shears", "must be in [1, 16]");
            }
            if (!(cfg.recurrence.generator.max_amplitude > 0.0) ||
                cfg.recurrence.generator.max_amplitude > 0.5) {
                fail("recurrence.generator.max_amplitude", "must be in (0, 0.5]");
            }
            if (cfg.recurrence.generator.max_frequency < 1 ||
                cfg.recurrence.generator.max_frequency > 32) {
                fail("recurrence.generator.max_frequency", "must be in [1, 32]");
            }
        }
        if (const json* sh = find(*r, "recurrence", "shears")) {
            if (!sh->is_array()) {
                fail("recurrence.shears", "expected an array of shear objects");
            }
            std::vector<Shear> shears;
            for (std::size_t i = 0; i < sh->size(); ++i) {
                const std::string path = "recurrence.shears[" + std::to_string(i) + "]";
                const json& e = (*sh)[i];
                if (!e.is_object()) {
                    fail(path, "expected an object");
                }
                Shear shear;
                const json* axis = find(e, path, "axis");
                if (!axis || !axis->is_string()) {
                    fail(path + ".axis", "expected \"x\" or \"y\"");
                }
                const std::string a = axis->get<std::string>();
                if (a == "x") {
                    shear.axis = ShearAxis::X;
                } else if (a == "y") {
                    shear.axis = ShearAxis::Y;
                } else {
                    fail(path + ".axis", "expected \"x\" or \"y\"");
                }
                shear.amplitude = getDouble(e, path, "amplitude", 0.0);
                shear.frequency = static_cast<int>(getInt(e, path, "frequency", 1));
                shears.push_back(shear);
            }
            ConjugacySpec probe;
            probe.shears = shears;
            try {
                probe.validate();
            } catch (const std::invalid_argument& e) {
                fail("recurrence.shears", e.what());
            }
            cfg.recurrence.shears = std::move(shears);
        }
        if (const json* c = find(*r, "recurrence", "certificates")) {
            cfg.recurrence.certificates.pairs = static_cast<int>(
                getInt(*c, "recurrence.certificates", "pairs", cfg.recurrence.certificates.pairs));
            cfg.recurrence.certificates.samples_per_u =
                static_cast<int>(getInt(*c, "recurrence.certificates", "samples_per_u",
                                        cfg.recurrence.certificates.samples_per_u));
            cfg.recurrence.certificates.u_radius = getDouble(
                *c, "recurrence.certificates", "u_radius", cfg.recurrence.certificates.u_radius);
            cfg.recurrence.certificates.v_radius = getDouble(
                *c, "recurrence.certificates", "v_radius", cfg.recurrence.certificates.v_radius);
            cfg.recurrence.certificates.n_max = getInt(*c, "recurrence.certificates", "n_max",
                                                       cfg.recurrence.certificates.n_max);
            if (cfg.recurrence.certificates.pairs < 0) {
                fail("recurrence.certificates.pairs", "must be >= 0");
            }
            if (cfg.recurrence.certificates.samples_per_u < 1) {
                fail("recurrence.certificates.samples_per_u", "must be >= 1");
            }
            if (!(cfg.recurrence.certificates.u_radius > 0.0) ||
                !(cfg.recurrence.certificates.u_radius < cfg.recurrence.certificates.v_radius)) {
                fail("recurrence.certificates.u_radius", "need 0 < u_radius < v_radius");
            }
            if (cfg.recurrence.certificates.n_max < 1) {
                fail("recurrence.certificates.n_max", "must be >= 1");
            }
        }
    }

    if (const json* o = find(j, "(root)", "oracle")) {
        cfg.oracle.beta = getDouble(*o, "oracle", "beta", cfg.oracle.beta);
        cfg.oracle.gamma = getDouble(*o, "oracle", "gamma", cfg.oracle.gamma);
        cfg.oracle.bound = getInt(*o, "oracle", "bound", cfg.oracle.bound);
        if (cfg.oracle.bound < 1) {
            fail("oracle.bound", "must be >= 1");
        }
    }

    // Cross-checks that do not need a field to be built yet.
    if (!cfg.punctures.points.empty()) {
        try {
            PunctureSet::create(cfg.punctures.points, cfg.punctures.r0);
        } catch (const std::invalid_argument& e) {
            fail("punctures", e.what());
        }
    }
    try {
        SlopeParam::fromAlpha(cfg.slope.alpha);
    } catch (const std::invalid_argument& e) {
        fail("slope.alpha", e.what());
    }
    if (cfg.orbit_scan_depth < 1) {
        fail("orbit_scan_depth", "must be >= 1");
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::fromFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    return fromJson(j);
}

nlohmann::json ExperimentConfig::toJson() const {
    json j;
    j["slope"] = {{"alpha", slope.alpha}};
    j["punctures"] = {{"points", pointsToJson(punctures.points)}, {"r0", punctures.r0}};
    j["orbit_scan_depth"] = orbit_scan_depth;
    j["integrator"] = {{"rel_tol", integrator.rel_tol},
                       {"abs_tol", integrator.abs_tol},
                       {"max_steps", integrator.max_steps},
                       {"max_step_len", integrator.max_step_len},
                       {"stall_speed", integrator.stall_speed},
                       {"stall_min_progress", integrator.stall_min_progress}};
    j["density"] = {{"m", density.m},
                    {"T", density.T},
                    {"random_starts", density.random_starts},
                    {"include_punctures", density.include_punctures},
                    {"starts", pointsToJson(density.starts)}};
    j["orbit"] = {{"x0", pointToJson(orbit.x0)},
                  {"T", orbit.T},
                  {"direction", toString(orbit.direction)}};
    j["scan_t"] = {{"t_values", scan_t.t_values},
                   {"x0", pointToJson(scan_t.x0)},
                   {"n", scan_t.n},
                   {"m", scan_t.m},
                   {"oracle_bound", scan_t.oracle_bound}};
    json rec = {{"t", recurrence.t},
                {"m", recurrence.m},
                {"delta", recurrence.delta},
                {"n_max", recurrence.n_max},
                {"maps", recurrence.maps},
                {"generator",
                 {{"max_shears", recurrence.generator.max_shears},
                  {"max_amplitude", recurrence.generator.max_amplitude},
                  {"max_frequency", recurrence.generator.max_frequency}}},
                {"certificates",
                 {{"pairs", recurrence.certificates.pairs},
                  {"samples_per_u", recurrence.certificates.samples_per_u},
                  {"u_radius", recurrence.certificates.u_radius},
                  {"v_radius", recurrence.certificates.v_radius},
                  {"n_max", recurrence.certificates.n_max}}}};
    if (recurrence.shears) {
        json arr = json::array();
        for (const auto& s : *recurrence.shears) {
            arr.push_back({{"axis", s.axis == ShearAxis::X ? "x" : "y"},
                           {"amplitude", s.amplitude},
                           {"frequency", s.frequency}});
        }
        rec["shears"] = arr;
    }
    j["recurrence"] = rec;
    j["oracle"] = {{"beta", oracle.beta}, {"gamma", oracle.gamma}, {"bound", oracle.bound}};
    return j;
}

CompositeField ExperimentConfig::buildField() const {
    SlopeParam slope_param = SlopeParam::fromAlpha(slope.alpha);
    if (punctures.points.empty()) {
        return CompositeField::linear(std::move(slope_param));
    }
    PunctureSet set = PunctureSet::create(punctures.points, punctures.r0);
    return buildPuncturedField(slope_param, set, orbit_scan_depth);
}

}  // namespace qmlab
