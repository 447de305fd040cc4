#include "qmlab/commands.hpp"

#include "qmlab/density.hpp"
#include "qmlab/io.hpp"
#include "qmlab/recurrence.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <iostream>
#include <random>
#include <string>

namespace qmlab {

namespace {

using nlohmann::json;

/// 53-bit uniform in [0, 1); independent of libstdc++ distribution details.
double uniformUnit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void writeResolvedConfig(const CommandContext& ctx, const char* command) {
    json j;
    j["command"] = command;
    j["seed"] = ctx.seed;
    j["threads"] = ctx.threads;
    j["config"] = ctx.cfg.toJson();
    std::ofstream out(ctx.out / "resolved_config.json", std::ios::binary);
    out << j.dump(2) << "\n";
}

void writeJsonFile(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";
}

std::string classificationField(const DensityReport& r) { return toString(r.classification); }

std::string firstCoverField(const DensityReport& r) {
    return r.first_cover_time ? formatDouble(*r.first_cover_time) : std::string();
}

json reportToJson(const DensityReport& r) {
    json j;
    j["m"] = r.m;
    j["covered_fraction"] = r.covered_fraction;
    if (r.first_cover_time) {
        j["first_cover_time"] = *r.first_cover_time;
    } else {
        j["first_cover_time"] = nullptr;
    }
    j["classification"] = toString(r.classification);
    j["direction"] = toString(r.direction);
    j["status"] = toString(r.status);
    return j;
}

std::string pgmName(const char* stem, std::size_t index) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%04zu.pgm", stem, index);
    return buf;
}

json verdictToJson(const IndependenceVerdict& v) {
    json j;
    j["dependent"] = v.dependent;
    j["bound"] = v.bound;
    if (v.relation) {
        j["relation"] = {(*v.relation)[0], (*v.relation)[1], (*v.relation)[2]};
    } else {
        j["relation"] = nullptr;
    }
    return j;
}

}  // namespace

int cmdConstruct(const CommandContext& ctx) {
    writeResolvedConfig(ctx, "construct");
    const auto slope = SlopeParam::fromAlpha(ctx.cfg.slope.alpha);
    if (ctx.cfg.punctures.points.empty()) {
        throw ConfigError("config: punctures.points: construct needs at least one puncture");
    }
    const auto set = PunctureSet::create(ctx.cfg.punctures.points, ctx.cfg.punctures.r0);
    const auto report = checkDistinctDenseOrbits(set, slope, ctx.cfg.orbit_scan_depth);

    json j;
    j["alpha"] = slope.alpha();
    j["r0"] = set.r0();
    json pts = json::array();
    for (const auto& p : set.points()) {
        pts.push_back({p.x, p.y});
    }
    j["points"] = pts;
    j["depth"] = report.depth;
    json pairs = json::array();
    for (const auto& v : report.pairs) {
        json pj;
        pj["i"] = v.i;
        pj["j"] = v.j;
        pj["verdict"] = v.same_orbit ? "SameOrbit" : "DistinctWithinDepth";
        if (v.same_orbit) {
            pj["shift"] = v.shift;
        }
        pairs.push_back(pj);
    }
    j["pairs"] = pairs;

    const PairVerdict* bad = report.firstSameOrbit();
    j["accepted"] = bad == nullptr;
    if (bad) {
        j["witness"] = {{"i", bad->i}, {"j", bad->j}, {"shift", bad->shift}};
        writeJsonFile(ctx.out / "construct.json", j);
        std::cout << "construct: rejected, punctures " << bad->i << " and " << bad->j
                  << " share an orbit line, shift s = " << formatDouble(bad->shift) << "\n";
        return kExitConstructionRejected;
    }
    j["zero_count"] = set.size();
    writeJsonFile(ctx.out / "construct.json", j);
    std::cout << "construct: accepted, " << set.size() << " puncture(s), field has exactly "
              << set.size() << " zero(s)\n";
    return kExitOk;
}

int cmdOrbit(const CommandContext& ctx) {
    writeResolvedConfig(ctx, "orbit");
    const CompositeField field = ctx.cfg.buildField();
    CsvWriter csv(ctx.out / "orbit.csv", {"t", "x", "y"});
    long long samples = 0;
    SampleSink sink = [&](double t, TorusPoint p) {
        csv.writeRow({formatDouble(t), formatDouble(p.x), formatDouble(p.y)});
        ++samples;
        return true;
    };
    const double t =
        ctx.cfg.orbit.direction == Direction::Forward ? ctx.cfg.orbit.T : -ctx.cfg.orbit.T;
    const FlowResult result = integrateFlow(field, ctx.cfg.orbit.x0, t, ctx.cfg.integrator, &sink);

    json j;
    j["status"] = toString(result.status);
    j["samples"] = samples;
    j["final"] = {result.point.x, result.point.y};
    writeJsonFile(ctx.out / "orbit.json", j);
    std::cout << "orbit: " << samples << " samples, status " << toString(result.status) << "\n";
    return kExitOk;
}

int cmdDensity(const CommandContext& ctx) {
    writeResolvedConfig(ctx, "density");
    const CompositeField field = ctx.cfg.buildField();

    std::vector<TorusPoint> starts;
    if (ctx.cfg.density.include_punctures) {
        for (const auto& p : field.punctures().points()) {
            starts.push_back(p);
        }
    }
    for (const auto& p : ctx.cfg.density.starts) {
        starts.push_back(p);
    }
    std::mt19937_64 rng(ctx.seed);
    for (int i = 0; i < ctx.cfg.density.random_starts; ++i) {
        const double x = uniformUnit(rng);
        const double y = uniformUnit(rng);
        starts.push_back(wrap(x, y));
    }
    if (starts.empty()) {
        throw ConfigError("config: density: no starts (no punctures, no explicit or random starts)");
    }

    const auto entries = exceptionalSetScan(field, starts, ctx.cfg.density.T, ctx.cfg.density.m,
                                            ctx.cfg.integrator, ctx.threads);

    CsvWriter csv(ctx.out / "density.csv",
                  {"start_x", "start_y", "direction", "covered_fraction", "first_cover_time",
                   "classification", "status"});
    std::size_t row = 0;
    json summary;
    json per_start = json::array();
    json exceptional = json::array();
    long long undetermined = 0;
    for (const auto& e : entries) {
        for (const DensityReport* r : {&e.forward, &e.backward}) {
            csv.writeRow({formatDouble(e.start.x), formatDouble(e.start.y), toString(r->direction),
                          formatDouble(r->covered_fraction), firstCoverField(*r),
                          classificationField(*r), toString(r->status)});
            writePgm(ctx.out / pgmName("coverage", row), r->m, r->cells);
            ++row;
        }
        json ej;
        ej["start"] = {e.start.x, e.start.y};
        ej["forward"] = reportToJson(e.forward);
        ej["backward"] = reportToJson(e.backward);
        ej["combined"] = toString(e.combined);
        ej["exceptional"] = e.exceptional;
        per_start.push_back(ej);
        if (e.exceptional) {
            exceptional.push_back({e.start.x, e.start.y});
        }
        if (e.combined == Classification::Undetermined) {
            ++undetermined;
        }
    }
    summary["starts"] = per_start;
    summary["exceptional_starts"] = exceptional;
    summary["undetermined_count"] = undetermined;
    writeJsonFile(ctx.out / "density.json", summary);
    std::cout << "density: " << entries.size() << " starts, " << exceptional.size()
              << " empirically exceptional, " << undetermined << " undetermined\n";
    return kExitOk;
}

int cmdScanT(const CommandContext& ctx) {
    writeResolvedConfig(ctx, "scan-t");
    const CompositeField field = ctx.cfg.buildField();
    const auto rows = timeTScan(field, ctx.cfg.scan_t.t_values, ctx.cfg.scan_t.x0,
                                ctx.cfg.scan_t.n, ctx.cfg.scan_t.m, ctx.cfg.integrator,
                                ctx.threads, ctx.cfg.scan_t.oracle_bound);

    CsvWriter csv(ctx.out / "scan_t.csv",
                  {"t", "covered_fraction", "classification", "oracle_verdict", "relation"});
    json per_t = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        std::string verdict;
        std::string relation;
        if (r.oracle) {
            verdict = r.oracle->dependent ? "dependent" : "independent_within_bound";
            if (r.oracle->relation) {
                const auto& rel = *r.oracle->relation;
                relation = std::to_string(rel[0]) + ";" + std::to_string(rel[1]) + ";" +
                           std::to_string(rel[2]);
            }
        }
        csv.writeRow({formatDouble(r.t), formatDouble(r.report.covered_fraction),
                      classificationField(r.report), verdict, relation});
        writePgm(ctx.out / pgmName("scan_t", i), r.report.m, r.report.cells);

        json tj;
        tj["t"] = r.t;
        tj["report"] = reportToJson(r.report);
        tj["refined_covered_fraction"] = r.refined_covered_fraction;
        if (r.oracle) {
            tj["oracle"] = verdictToJson(*r.oracle);
        }
        per_t.push_back(tj);
    }
    json summary;
    summary["rows"] = per_t;
    writeJsonFile(ctx.out / "scan_t.json", summary);
    std::cout << "scan-t: " << rows.size() << " t value(s) scanned\n";
    return kExitOk;
}

int cmdRecurrence(const CommandContext& ctx) {
    writeResolvedConfig(ctx, "recurrence");
    const auto& rc = ctx.cfg.recurrence;

    std::vector<ConjugacySpec> specs;
    if (rc.shears) {
        ConjugacySpec spec;
        spec.shears = *rc.shears;
        specs.push_back(std::move(spec));
    } else {
        std::mt19937_64 master(ctx.seed);
        for (int i = 0; i < rc.maps; ++i) {
            specs.push_back(ConjugacySpec::random(master(), rc.generator));
        }
    }

    json per_map = json::array();
    long long total_failures = 0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const ConjugatedMap map(specs[i], rc.t);
        const auto report = recurrenceScan(map, rc.m, rc.delta, rc.n_max, ctx.threads);
        total_failures += report.failure_count;

        char name[64];
        std::snprintf(name, sizeof(name), "recurrence_%03zu.csv", i);
        CsvWriter csv(ctx.out / name, {"grid_x", "grid_y", "first_return_n"});
        for (int iy = 0; iy < rc.m; ++iy) {
            for (int ix = 0; ix < rc.m; ++ix) {
                const auto& r = report.first_return[static_cast<std::size_t>(iy) * rc.m + ix];
                csv.writeRow({formatDouble(static_cast<double>(ix) / rc.m),
                              formatDouble(static_cast<double>(iy) / rc.m),
                              r ? std::to_string(*r) : std::string("FAIL")});
            }
        }

        // Nested certificate pairs: concentric balls at seed-derived centers.
        std::vector<BallPair> pairs;
        std::mt19937_64 pair_rng(specs[i].seed ? *specs[i].seed + 1 : ctx.seed + 1);
        for (int p = 0; p < rc.certificates.pairs; ++p) {
            BallPair bp;
            bp.u_center = wrap(uniformUnit(pair_rng), uniformUnit(pair_rng));
            bp.v_center = bp.u_center;
            bp.u_radius = rc.certificates.u_radius;
            bp.v_radius = rc.certificates.v_radius;
            pairs.push_back(bp);
        }
        std::vector<CertificateResult> certs;
        if (!pairs.empty()) {
            certs = certificateCheck(map, pairs, rc.certificates.samples_per_u,
                                     rc.certificates.n_max, ctx.threads);
        }

        json mj;
        if (specs[i].seed) {
            mj["seed"] = *specs[i].seed;
        }
        json shears = json::array();
        for (const auto& s : specs[i].shears) {
            shears.push_back({{"axis", s.axis == ShearAxis::X ? "x" : "y"},
                              {"amplitude", s.amplitude},
                              {"frequency", s.frequency}});
        }
        mj["shears"] = shears;
        mj["failure_count"] = report.failure_count;
        mj["max_return"] = report.max_return;
        json cj = json::array();
        for (std::size_t p = 0; p < certs.size(); ++p) {
            json c;
            c["center"] = {pairs[p].u_center.x, pairs[p].u_center.y};
            c["pass"] = certs[p].pass;
            c["max_n"] = certs[p].max_n;
            if (certs[p].witness) {
                c["witness"] = {certs[p].witness->x, certs[p].witness->y};
            }
            cj.push_back(c);
        }
        mj["certificates"] = cj;
        per_map.push_back(mj);
    }

    json summary;
    summary["maps"] = per_map;
    summary["total_failure_count"] = total_failures;
    writeJsonFile(ctx.out / "recurrence.json", summary);
    std::cout << "recurrence: " << specs.size() << " map(s), total failures " << total_failures
              << "\n";
    return kExitOk;
}

int cmdOracle(const CommandContext& ctx) {
    writeResolvedConfig(ctx, "oracle");
    const auto verdict = translationDensityOracle(ctx.cfg.oracle.beta, ctx.cfg.oracle.gamma,
                                                  ctx.cfg.oracle.bound, ctx.threads);
    writeJsonFile(ctx.out / "oracle.json", verdictToJson(verdict));
    if (verdict.dependent) {
        const auto& r = *verdict.relation;
        std::cout << "oracle: dependent, relation (" << r[0] << ", " << r[1] << ", " << r[2]
                  << ")\n";
    } else {
        std::cout << "oracle: independent within bound " << verdict.bound << "\n";
    }
    return kExitOk;
}

int runCommand(const char* name, const CommandContext& ctx) {
    try {
        std::filesystem::create_directories(ctx.out);
        const std::string cmd(name);
        if (cmd == "construct") return cmdConstruct(ctx);
        if (cmd == "orbit") return cmdOrbit(ctx);
        if (cmd == "density") return cmdDensity(ctx);
        if (cmd == "scan-t") return cmdScanT(ctx);
        if (cmd == "recurrence") return cmdRecurrence(ctx);
        if (cmd == "oracle") return cmdOracle(ctx);
        std::cerr << "unknown command: " << cmd << "\n";
        return kExitConfigError;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    } catch (const ConstructionRejected& e) {
        std::cerr << e.what() << "\n";
        return kExitConstructionRejected;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitNumericFailure;
    }
}

}  // namespace qmlab
