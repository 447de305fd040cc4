#pragma once

#include "qmlab/field.hpp"
#include "qmlab/integrator.hpp"
#include "qmlab/torus.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace qmlab {

inline constexpr double kRelationTol = 1e-9;
inline constexpr long long kDefaultRelationBound = 10000;

/// m x m occupancy grid over the torus, cell side 1/m. Full coverage implies
/// density at ball resolution sqrt(2)/(2m).
class DensityGrid {
public:
    explicit DensityGrid(int m);

    /// Marks the cell containing p; records the time of first full coverage.
    void visit(TorusPoint p, double t);

    int m() const { return m_; }
    long covered() const { return covered_; }
    double coveredFraction() const { return static_cast<double>(covered_) / (m_ * m_); }
    bool full() const { return covered_ == static_cast<long>(m_) * m_; }
    std::optional<double> firstCoverTime() const { return first_cover_time_; }

    bool cell(int ix, int iy) const { return cells_[static_cast<std::size_t>(iy) * m_ + ix] != 0; }
    const std::vector<std::uint8_t>& cells() const { return cells_; }  // row-major, iy*m+ix

    int occupiedColumns() const;
    int occupiedRows() const;

private:
    int m_;
    std::vector<std::uint8_t> cells_;
    long covered_ = 0;
    std::optional<double> first_cover_time_;
};

enum class Classification { Dense, AsymptoticToPuncture, Fixed, Undetermined };

const char* toString(Classification c);

struct DensityBudget {
    std::optional<double> T;
    std::optional<long long> n;
    std::optional<IntegratorConfig> cfg;
};

struct DensityReport {
    int m = 0;
    double covered_fraction = 0.0;
    std::optional<double> first_cover_time;
    Classification classification = Classification::Undetermined;
    Direction direction = Direction::Forward;
    TraceStatus status = TraceStatus::Completed;
    DensityBudget budget;
    std::vector<std::uint8_t> cells;  // final occupancy, row-major
};

/// Coverage test over a materialized trace. Flow-path traces must satisfy the
/// no-skip condition (consecutive samples at most 1/(2m) apart), otherwise a
/// Dense verdict would be unsound; map-iterate traces are exempt since their
/// orbit is the sample set itself.
DensityReport epsilonDensityTest(const OrbitTrace& trace, int m);

/// Forward and backward coverage from the same start, streaming, stopping a
/// direction early once its grid is full.
std::pair<DensityReport, DensityReport> doubleDensityTest(const CompositeField& field,
                                                          TorusPoint x0, double T, int m,
                                                          const IntegratorConfig& cfg);

struct ScanEntry {
    TorusPoint start;
    DensityReport forward;
    DensityReport backward;
    Classification combined = Classification::Undetermined;
    bool exceptional = false;  // neither direction Dense
};

/// Classifies every start via doubleDensityTest. The empirical exceptional
/// set is the set of starts with neither direction Dense (Undetermined
/// entries are included in it and flagged, never dropped).
std::vector<ScanEntry> exceptionalSetScan(const CompositeField& field,
                                          const std::vector<TorusPoint>& starts, double T, int m,
                                          const IntegratorConfig& cfg, int threads = 1);

struct IndependenceVerdict {
    bool dependent = false;
    std::optional<std::array<long long, 3>> relation;  // (a, b, c) with |a + b*beta + c*gamma| < tol
    long long bound = 0;
};

/// Exhaustive integer-relation scan: finds (a, b, c) != 0 with coefficients
/// bounded by `bound` and |a + b*beta + c*gamma| < kRelationTol, if any.
/// For each (b, c) only a = -round(b*beta + c*gamma) can qualify, so the scan
/// over (b, c) pairs is complete; among hits the minimal one under
/// lexicographic (max|.|, a, b, c) order is returned. Translation by
/// (beta, gamma) is minimal iff 1, beta, gamma admit no such relation.
IndependenceVerdict translationDensityOracle(double beta, double gamma, long long bound,
                                             int threads = 1);

struct TimeTScanRow {
    double t = 0.0;
    DensityReport report;                   // discrete iterates only
    double refined_covered_fraction = 0.0;  // flow-refined coverage, recorded alongside
    std::optional<IndependenceVerdict> oracle;
};

/// For each t: iterates the time-t map n times from x0, classifying density
/// on the discrete iterates while also recording flow-refined coverage (the
/// integrator's intermediate samples restore the no-skip condition). On
/// puncture-free fields each row carries the oracle verdict for
/// (beta, gamma) = (t mod 1, t*alpha mod 1).
std::vector<TimeTScanRow> timeTScan(const CompositeField& field,
                                    const std::vector<double>& t_values, TorusPoint x0,
                                    long long n, int m, const IntegratorConfig& cfg,
                                    int threads = 1, long long oracle_bound = kDefaultRelationBound);

}  // namespace qmlab
