#include "qmlab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmlab {

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || rel_tol > 1e-6) {
        throw std::invalid_argument("IntegratorConfig: rel_tol must be in (0, 1e-6]");
    }
    if (!(abs_tol > 0.0) || abs_tol > 1e-6) {
        throw std::invalid_argument("IntegratorConfig: abs_tol must be in (0, 1e-6]");
    }
    if (max_steps <= 0) {
        throw std::invalid_argument("IntegratorConfig: max_steps must be positive");
    }
    if (!(max_step_len > 0.0) || max_step_len > 0.25) {
        throw std::invalid_argument("IntegratorConfig: max_step_len must be in (0, 0.25]");
    }
    if (!(stall_speed > 0.0)) {
        throw std::invalid_argument("IntegratorConfig: stall_speed must be positive");
    }
    if (!(stall_min_progress > 0.0)) {
        throw std::invalid_argument("IntegratorConfig: stall_min_progress must be positive");
    }
}

const char* toString(TraceStatus status) {
    switch (status) {
        case TraceStatus::Completed: return "Completed";
        case TraceStatus::StalledNearPuncture: return "StalledNearPuncture";
        case TraceStatus::StepBudgetExhausted: return "StepBudgetExhausted";
    }
    return "?";
}

const char* toString(Direction dir) {
    return dir == Direction::Forward ? "forward" : "backward";
}

TorusPoint exactLinearFlowMap(const SlopeParam& slope, TorusPoint x0, double t) {
    if (!std::isfinite(t)) {
        throw std::invalid_argument("exactLinearFlowMap: t must be finite");
    }
    return wrap(x0.x + t, x0.y + t * slope.alpha());
}

namespace {

// Dormand-Prince 5(4), FSAL.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

struct State {
    double x;
    double y;
};

}  // namespace

FlowResult integrateFlow(const CompositeField& field, TorusPoint x0, double t,
                         const IntegratorConfig& cfg, const SampleSink* sink) {
    cfg.validate();
    if (!std::isfinite(t)) {
        throw std::invalid_argument("integrateFlow: t must be finite");
    }

    if (sink && !(*sink)(0.0, x0)) {
        return FlowResult{x0, TraceStatus::Completed};
    }
    if (t == 0.0) {
        return FlowResult{x0, TraceStatus::Completed};
    }
    if (field.isPuncture(x0)) {
        // Exact zero of the field: the point never moves.
        if (sink) {
            (*sink)(t, x0);
        }
        return FlowResult{x0, TraceStatus::Completed};
    }

    const double sign = t > 0.0 ? 1.0 : -1.0;
    const double total = std::abs(t);

    const auto deriv = [&](const State& s) -> Vec2 {
        const Vec2 v = field.eval(wrap(s.x, s.y));
        return Vec2{sign * v.dx, sign * v.dy};
    };

    State y{x0.x, x0.y};
    double elapsed = 0.0;
    Vec2 k1 = deriv(y);
    long long steps = 0;
    double h = 0.0;
    {
        const double speed = k1.norm();
        h = speed > 0.0 ? 0.5 * cfg.max_step_len / speed : total;
        h = std::min(h, total);
    }

    while (elapsed < total) {
        const double speed = k1.norm();
        const double remaining = total - elapsed;
        if (speed < cfg.stall_speed && speed * remaining < cfg.stall_min_progress) {
            return FlowResult{wrap(y.x, y.y), TraceStatus::StalledNearPuncture};
        }
        if (++steps > cfg.max_steps) {
            return FlowResult{wrap(y.x, y.y), TraceStatus::StepBudgetExhausted};
        }
        if (speed > 0.0) {
            h = std::min(h, cfg.max_step_len / speed);
        }
        h = std::min(h, remaining);

        const Vec2 k2 = deriv({y.x + h * kA21 * k1.dx, y.y + h * kA21 * k1.dy});
        const Vec2 k3 = deriv({y.x + h * (kA31 * k1.dx + kA32 * k2.dx),
                               y.y + h * (kA31 * k1.dy + kA32 * k2.dy)});
        const Vec2 k4 = deriv({y.x + h * (kA41 * k1.dx + kA42 * k2.dx + kA43 * k3.dx),
                               y.y + h * (kA41 * k1.dy + kA42 * k2.dy + kA43 * k3.dy)});
        const Vec2 k5 =
            deriv({y.x + h * (kA51 * k1.dx + kA52 * k2.dx + kA53 * k3.dx + kA54 * k4.dx),
                   y.y + h * (kA51 * k1.dy + kA52 * k2.dy + kA53 * k3.dy + kA54 * k4.dy)});
        const Vec2 k6 = deriv(
            {y.x + h * (kA61 * k1.dx + kA62 * k2.dx + kA63 * k3.dx + kA64 * k4.dx + kA65 * k5.dx),
             y.y +
                 h * (kA61 * k1.dy + kA62 * k2.dy + kA63 * k3.dy + kA64 * k4.dy + kA65 * k5.dy)});

        const double incx = h * (kB1 * k1.dx + kB3 * k3.dx + kB4 * k4.dx + kB5 * k5.dx + kB6 * k6.dx);
        const double incy = h * (kB1 * k1.dy + kB3 * k3.dy + kB4 * k4.dy + kB5 * k5.dy + kB6 * k6.dy);
        const State ynew{y.x + incx, y.y + incy};
        const Vec2 k7 = deriv(ynew);

        const double errx = h * (kE1 * k1.dx + kE3 * k3.dx + kE4 * k4.dx + kE5 * k5.dx +
                                 kE6 * k6.dx + kE7 * k7.dx);
        const double erry = h * (kE1 * k1.dy + kE3 * k3.dy + kE4 * k4.dy + kE5 * k5.dy +
                                 kE6 * k6.dy + kE7 * k7.dy);
        const double sx = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y.x), std::abs(ynew.x));
        const double sy = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y.y), std::abs(ynew.y));
        const double ex = errx / sx;
        const double ey = erry / sy;
        const double err = std::sqrt(0.5 * (ex * ex + ey * ey));

        const double disp = std::hypot(incx, incy);
        if (disp > cfg.max_step_len) {
            h *= 0.5 * cfg.max_step_len / disp;
            continue;
        }
        if (err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }

        elapsed += h;
        const TorusPoint sample = wrap(ynew.x, ynew.y);
        // Rebase the lift so canonical precision is kept on long runs; the
        // field is Z^2-periodic, so k7 transfers unchanged.
        y = State{sample.x, sample.y};
        k1 = k7;
        if (sink && !(*sink)(sign * elapsed, sample)) {
            return FlowResult{sample, TraceStatus::Completed};
        }
        const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
    }
    return FlowResult{wrap(y.x, y.y), TraceStatus::Completed};
}

FlowResult flowMap(const CompositeField& field, TorusPoint x0, double t,
                   const IntegratorConfig& cfg) {
    return integrateFlow(field, x0, t, cfg, nullptr);
}

OrbitTrace traceOrbit(const CompositeField& field, TorusPoint x0, double T, Direction dir,
                      const IntegratorConfig& cfg) {
    if (!(T > 0.0)) {
        throw std::invalid_argument("traceOrbit: T must be positive");
    }
    OrbitTrace trace;
    trace.direction = dir;
    trace.kind = OrbitTrace::Kind::FlowPath;
    SampleSink sink = [&trace](double t, TorusPoint p) {
        trace.samples.push_back(TraceSample{t, p});
        return true;
    };
    const double t = dir == Direction::Forward ? T : -T;
    trace.status = integrateFlow(field, x0, t, cfg, &sink).status;
    return trace;
}

OrbitTrace iterateMap(const CompositeField& field, double t, TorusPoint x0, long long n,
                      const IntegratorConfig& cfg) {
    if (n < 1) {
        throw std::invalid_argument("iterateMap: n must be >= 1");
    }
    OrbitTrace trace;
    trace.direction = t >= 0.0 ? Direction::Forward : Direction::Backward;
    trace.kind = OrbitTrace::Kind::MapIterates;
    trace.samples.push_back(TraceSample{0.0, x0});
    TorusPoint x = x0;
    for (long long k = 1; k <= n; ++k) {
        const FlowResult step = flowMap(field, x, t, cfg);
        x = step.point;
        trace.samples.push_back(TraceSample{static_cast<double>(k), x});
        if (step.status != TraceStatus::Completed) {
            trace.status = step.status;
            return trace;
        }
    }
    trace.status = TraceStatus::Completed;
    return trace;
}

}  // namespace qmlab
