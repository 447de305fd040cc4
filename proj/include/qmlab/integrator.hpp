#pragma once

#include "qmlab/field.hpp"
#include "qmlab/torus.hpp"

#include <functional>
#include <vector>

namespace qmlab {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    long long max_steps = 20000000;
    double max_step_len = 0.02;   // per-step displacement cap
    double stall_speed = 1e-8;    // speed below which the stall detector may fire
    double stall_min_progress = 1e-3;  // stall when remaining time cannot advance this arc

    void validate() const;
};

enum class TraceStatus { Completed, StalledNearPuncture, StepBudgetExhausted };
enum class Direction { Forward, Backward };

const char* toString(TraceStatus status);
const char* toString(Direction dir);

struct TraceSample {
    double t = 0.0;
    TorusPoint p;
};

/// Time-stamped orbit samples. Times are strictly monotone in the trace
/// direction (negative and decreasing for backward traces); consecutive
/// samples are at most max_step_len apart. Map-iterate traces carry the
/// iteration index as time.
struct OrbitTrace {
    enum class Kind { FlowPath, MapIterates };

    std::vector<TraceSample> samples;
    TraceStatus status = TraceStatus::Completed;
    Direction direction = Direction::Forward;
    Kind kind = Kind::FlowPath;

    TorusPoint start() const { return samples.front().p; }
    TorusPoint end() const { return samples.back().p; }
};

struct FlowResult {
    TorusPoint point;
    TraceStatus status = TraceStatus::Completed;
};

/// Closed form for the unslowed linear flow: wrap(x0 + t*(1, alpha)).
/// Serves as the independent oracle for flowMap on puncture-free fields.
TorusPoint exactLinearFlowMap(const SlopeParam& slope, TorusPoint x0, double t);

/// Per-step hook for streaming consumers. Called at t=0 with the start and
/// after every accepted step; return false to stop the integration early
/// (the result then reports Completed at the current point).
using SampleSink = std::function<bool(double t, TorusPoint p)>;

/// Adaptive Dormand-Prince 5(4) integration of the field over signed time t
/// (negative t integrates the negated field). Integrates on a planar lift,
/// rebased to canonical coordinates at accepted-step boundaries; per-step
/// displacement is capped by cfg.max_step_len. Returns StalledNearPuncture
/// when the speed drops below cfg.stall_speed with too little time left to
/// advance cfg.stall_min_progress of arc.
FlowResult integrateFlow(const CompositeField& field, TorusPoint x0, double t,
                         const IntegratorConfig& cfg, const SampleSink* sink = nullptr);

/// Time-t map of the flow.
FlowResult flowMap(const CompositeField& field, TorusPoint x0, double t,
                   const IntegratorConfig& cfg);

/// Materialized orbit segment over time T > 0 in the given direction.
OrbitTrace traceOrbit(const CompositeField& field, TorusPoint x0, double T, Direction dir,
                      const IntegratorConfig& cfg);

/// Discrete orbit x0, f(x0), ..., f^n(x0) of the time-t map f. Stops early
/// on a stalled application; the trace records iteration indices as times.
OrbitTrace iterateMap(const CompositeField& field, double t, TorusPoint x0, long long n,
                      const IntegratorConfig& cfg);

}  // namespace qmlab
