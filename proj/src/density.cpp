#include "qmlab/density.hpp"

#include "qmlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmlab {

DensityGrid::DensityGrid(int m) : m_(m) {
    if (m < 1) {
        throw std::invalid_argument("DensityGrid: m must be >= 1");
    }
    cells_.assign(static_cast<std::size_t>(m) * m, 0);
}

void DensityGrid::visit(TorusPoint p, double t) {
    const int ix = std::min(static_cast<int>(p.x * m_), m_ - 1);
    const int iy = std::min(static_cast<int>(p.y * m_), m_ - 1);
    std::uint8_t& cell = cells_[static_cast<std::size_t>(iy) * m_ + ix];
    if (cell == 0) {
        cell = 1;
        ++covered_;
        if (full() && !first_cover_time_) {
            first_cover_time_ = t;
        }
    }
}

int DensityGrid::occupiedColumns() const {
    int n = 0;
    for (int ix = 0; ix < m_; ++ix) {
        for (int iy = 0; iy < m_; ++iy) {
            if (cell(ix, iy)) {
                ++n;
                break;
            }
        }
    }
    return n;
}

int DensityGrid::occupiedRows() const {
    int n = 0;
    for (int iy = 0; iy < m_; ++iy) {
        for (int ix = 0; ix < m_; ++ix) {
            if (cell(ix, iy)) {
                ++n;
                break;
            }
        }
    }
    return n;
}

const char* toString(Classification c) {
    switch (c) {
        case Classification::Dense: return "Dense";
        case Classification::AsymptoticToPuncture: return "AsymptoticToPuncture";
        case Classification::Fixed: return "Fixed";
        case Classification::Undetermined: return "Undetermined";
    }
    return "?";
}

namespace {

Classification classify(bool full, TraceStatus status, bool moved) {
    if (full) {
        return Classification::Dense;
    }
    if (status == TraceStatus::StalledNearPuncture) {
        return Classification::AsymptoticToPuncture;
    }
    if (!moved && status == TraceStatus::Completed) {
        return Classification::Fixed;
    }
    return Classification::Undetermined;
}

DensityReport makeReport(const DensityGrid& grid, Classification c, Direction dir,
                         TraceStatus status, DensityBudget budget) {
    DensityReport report;
    report.m = grid.m();
    report.covered_fraction = grid.coveredFraction();
    report.first_cover_time = grid.firstCoverTime();
    report.classification = c;
    report.direction = dir;
    report.status = status;
    report.budget = std::move(budget);
    report.cells = grid.cells();
    return report;
}

}  // namespace

DensityReport epsilonDensityTest(const OrbitTrace& trace, int m) {
    if (trace.samples.empty()) {
        throw std::invalid_argument("epsilonDensityTest: empty trace");
    }
    DensityGrid grid(m);
    const double no_skip = 0.5 / m + 1e-15;
    const TorusPoint start = trace.start();
    bool moved = false;
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        if (trace.kind == OrbitTrace::Kind::FlowPath && i > 0) {
            if (dist(trace.samples[i - 1].p, trace.samples[i].p) > no_skip) {
                throw std::invalid_argument(
                    "epsilonDensityTest: consecutive samples exceed 1/(2m); grid cells could "
                    "be skipped");
            }
        }
        if (!(trace.samples[i].p == start)) {
            moved = true;
        }
        grid.visit(trace.samples[i].p, trace.samples[i].t);
    }
    DensityBudget budget;
    if (trace.kind == OrbitTrace::Kind::FlowPath) {
        budget.T = std::abs(trace.samples.back().t);
    } else {
        budget.n = static_cast<long long>(trace.samples.size()) - 1;
    }
    return makeReport(grid, classify(grid.full(), trace.status, moved), trace.direction,
                      trace.status, std::move(budget));
}

namespace {

DensityReport streamedDensity(const CompositeField& field, TorusPoint x0, double T, int m,
                              Direction dir, const IntegratorConfig& cfg) {
    DensityGrid grid(m);
    bool moved = false;
    SampleSink sink = [&](double t, TorusPoint p) {
        if (!(p == x0)) {
            moved = true;
        }
        grid.visit(p, t);
        return !grid.full();
    };
    const double t = dir == Direction::Forward ? T : -T;
    const TraceStatus status = integrateFlow(field, x0, t, cfg, &sink).status;
    DensityBudget budget;
    budget.T = T;
    budget.cfg = cfg;
    return makeReport(grid, classify(grid.full(), status, moved), dir, status, std::move(budget));
}

}  // namespace

std::pair<DensityReport, DensityReport> doubleDensityTest(const CompositeField& field,
                                                          TorusPoint x0, double T, int m,
                                                          const IntegratorConfig& cfg) {
    if (!(T > 0.0)) {
        throw std::invalid_argument("doubleDensityTest: T must be positive");
    }
    if (cfg.max_step_len > 0.5 / m) {
        throw std::invalid_argument(
            "doubleDensityTest: cfg.max_step_len must be <= 1/(2m) for sound coverage");
    }
    return {streamedDensity(field, x0, T, m, Direction::Forward, cfg),
            streamedDensity(field, x0, T, m, Direction::Backward, cfg)};
}

std::vector<ScanEntry> exceptionalSetScan(const CompositeField& field,
                                          const std::vector<TorusPoint>& starts, double T, int m,
                                          const IntegratorConfig& cfg, int threads) {
    if (starts.empty()) {
        throw std::invalid_argument("exceptionalSetScan: starts must be nonempty");
    }
    std::vector<ScanEntry> entries(starts.size());
    parallelFor(starts.size(), threads, [&](std::size_t i) {
        ScanEntry entry;
        entry.start = starts[i];
        auto [fwd, bwd] = doubleDensityTest(field, starts[i], T, m, cfg);
        entry.forward = std::move(fwd);
        entry.backward = std::move(bwd);
        const bool fwd_dense = entry.forward.classification == Classification::Dense;
        const bool bwd_dense = entry.backward.classification == Classification::Dense;
        if (fwd_dense || bwd_dense) {
            entry.combined = Classification::Dense;
        } else if (entry.forward.classification == Classification::Fixed &&
                   entry.backward.classification == Classification::Fixed) {
            entry.combined = Classification::Fixed;
        } else if (entry.forward.classification == Classification::AsymptoticToPuncture ||
                   entry.backward.classification == Classification::AsymptoticToPuncture) {
            entry.combined = Classification::AsymptoticToPuncture;
        } else {
            entry.combined = Classification::Undetermined;
        }
        entry.exceptional = !(fwd_dense || bwd_dense);
        entries[i] = std::move(entry);
    });
    return entries;
}

IndependenceVerdict translationDensityOracle(double beta, double gamma, long long bound,
                                             int threads) {
    if (bound < 1) {
        throw std::invalid_argument("translationDensityOracle: bound must be >= 1");
    }
    if (!std::isfinite(beta) || !std::isfinite(gamma)) {
        throw std::invalid_argument("translationDensityOracle: beta, gamma must be finite");
    }

    struct Hit {
        long long key_max;
        long long a, b, c;
        bool operator<(const Hit& o) const {
            if (key_max != o.key_max) return key_max < o.key_max;
            if (a != o.a) return a < o.a;
            if (b != o.b) return b < o.b;
            return c < o.c;
        }
    };

    const long long n_rows = 2 * bound + 1;
    std::vector<std::optional<Hit>> row_best(static_cast<std::size_t>(n_rows));
    parallelFor(static_cast<std::size_t>(n_rows), threads, [&](std::size_t row) {
        const long long b = static_cast<long long>(row) - bound;
        const double bb = static_cast<double>(b) * beta;
        std::optional<Hit> best;
        for (long long c = -bound; c <= bound; ++c) {
            const double v = bb + static_cast<double>(c) * gamma;
            const double a_real = -std::nearbyint(v);
            const long long a = static_cast<long long>(a_real);
            if (std::abs(a_real) > static_cast<double>(bound)) {
                continue;
            }
            if (a == 0 && b == 0 && c == 0) {
                continue;
            }
            if (std::abs(a_real + v) < kRelationTol) {
                Hit hit{std::max({std::abs(a), std::abs(b), std::abs(c)}), a, b, c};
                if (!best || hit < *best) {
                    best = hit;
                }
            }
        }
        row_best[row] = best;
    });

    std::optional<Hit> best;
    for (const auto& h : row_best) {
        if (h && (!best || *h < *best)) {
            best = h;
        }
    }

    IndependenceVerdict verdict;
    verdict.bound = bound;
    if (best) {
        verdict.dependent = true;
        verdict.relation = std::array<long long, 3>{best->a, best->b, best->c};
    }
    return verdict;
}

std::vector<TimeTScanRow> timeTScan(const CompositeField& field,
                                    const std::vector<double>& t_values, TorusPoint x0,
                                    long long n, int m, const IntegratorConfig& cfg, int threads,
                                    long long oracle_bound) {
    if (t_values.empty()) {
        throw std::invalid_argument("timeTScan: t_values must be nonempty");
    }
    if (n < 1) {
        throw std::invalid_argument("timeTScan: n must be >= 1");
    }
    if (cfg.max_step_len > 0.5 / m) {
        throw std::invalid_argument(
            "timeTScan: cfg.max_step_len must be <= 1/(2m) for sound refined coverage");
    }
    std::vector<TimeTScanRow> rows(t_values.size());
    parallelFor(t_values.size(), threads, [&](std::size_t idx) {
        const double t = t_values[idx];
        DensityGrid discrete(m);
        DensityGrid refined(m);
        bool moved = false;
        TraceStatus status = TraceStatus::Completed;

        discrete.visit(x0, 0.0);
        refined.visit(x0, 0.0);
        TorusPoint x = x0;
        for (long long k = 1; k <= n && !discrete.full(); ++k) {
            SampleSink sink = [&](double, TorusPoint p) {
                refined.visit(p, static_cast<double>(k - 1));
                return true;
            };
            const FlowResult step = integrateFlow(field, x, t, cfg, &sink);
            x = step.point;
            if (!(x == x0)) {
                moved = true;
            }
            discrete.visit(x, static_cast<double>(k));
            if (step.status != TraceStatus::Completed) {
                status = step.status;
                break;
            }
        }

        TimeTScanRow row;
        row.t = t;
        DensityBudget budget;
        budget.n = n;
        budget.cfg = cfg;
        row.report = makeReport(discrete, classify(discrete.full(), status, moved),
                                t >= 0.0 ? Direction::Forward : Direction::Backward, status,
                                std::move(budget));
        row.refined_covered_fraction = refined.coveredFraction();
        if (field.punctures().empty()) {
            const double beta = wrapUnit(t);
            const double gamma = wrapUnit(t * field.alpha());
            row.oracle = translationDensityOracle(beta, gamma, oracle_bound);
        }
        rows[idx] = std::move(row);
    });
    return rows;
}

}  // namespace qmlab
