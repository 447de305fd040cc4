#include "qmlab/integrator.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qmlab;

namespace {

const double kSqrt2 = std::sqrt(2.0);

TorusPoint randomPoint(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return TorusPoint{u(rng), u(rng)};
}

CompositeField linearField() { return CompositeField::linear(SlopeParam::fromAlpha(kSqrt2)); }

CompositeField slowedField(std::vector<TorusPoint> pts, double r0) {
    return buildPuncturedField(SlopeParam::fromAlpha(kSqrt2),
                               PunctureSet::create(std::move(pts), r0), 50);
}

// Unwrapped displacement accumulated along a trace; steps are far below 1/2,
// so the per-step lift is unique.
Vec2 accumulatedLift(const OrbitTrace& trace) {
    Vec2 total{0.0, 0.0};
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
        const Vec2 d = liftDisplacement(trace.samples[i - 1].p, trace.samples[i].p);
        total.dx += d.dx;
        total.dy += d.dy;
    }
    return total;
}

}  // namespace

TEST_CASE("exactLinearFlowMap closed form") {
    const SlopeParam slope = SlopeParam::fromAlpha(kSqrt2);
    const TorusPoint x0{0.0, 0.0};
    CHECK(exactLinearFlowMap(slope, x0, 0.0) == x0);

    const TorusPoint p = exactLinearFlowMap(slope, x0, 1.0);
    CHECK(p.x == 0.0);
    CHECK(p.y == doctest::Approx(0.41421356237309515).epsilon(1e-16));

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> tdist(-20.0, 20.0);
    for (int i = 0; i < 1000; ++i) {
        const TorusPoint x = randomPoint(rng);
        const double t = tdist(rng);
        const TorusPoint forth = exactLinearFlowMap(slope, x, t);
        const TorusPoint back = exactLinearFlowMap(slope, forth, -t);
        CHECK(dist(back, x) < 1e-12);
    }
}

TEST_CASE("flowMap matches the exact linear oracle on the unslowed field") {
    const CompositeField field = linearField();
    IntegratorConfig cfg;
    std::mt19937_64 rng(57);
    std::uniform_real_distribution<double> tdist(-10.0, 10.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const TorusPoint x = randomPoint(rng);
        const double t = tdist(rng);
        const FlowResult got = flowMap(field, x, t, cfg);
        CHECK(got.status == TraceStatus::Completed);
        worst = std::max(worst, dist(got.point, exactLinearFlowMap(field.slope(), x, t)));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("flowMap fixed points and zero time") {
    const CompositeField field = slowedField({{0.5, 0.5}}, 0.05);
    IntegratorConfig cfg;
    const FlowResult at_puncture = flowMap(field, {0.5, 0.5}, 3.7, cfg);
    CHECK(at_puncture.point == TorusPoint{0.5, 0.5});
    CHECK(at_puncture.status == TraceStatus::Completed);

    const TorusPoint x{0.123, 0.456};
    CHECK(flowMap(field, x, 0.0, cfg).point == x);
}

TEST_CASE("flow group law and time reversal") {
    IntegratorConfig cfg;
    std::mt19937_64 rng(91);
    std::uniform_real_distribution<double> tdist(-10.0, 10.0);

    const CompositeField fields[] = {linearField(), slowedField({{0.0, 0.0}, {0.0, 0.5}}, 0.05)};
    for (const auto& field : fields) {
        int checked = 0;
        for (int i = 0; i < 30; ++i) {
            const TorusPoint x = randomPoint(rng);
            const double t = tdist(rng);
            const double s = tdist(rng);

            const FlowResult ts = flowMap(field, x, t + s, cfg);
            const FlowResult t1 = flowMap(field, x, t, cfg);
            const FlowResult t2 = flowMap(field, t1.point, s, cfg);
            const FlowResult back = flowMap(field, t1.point, -t, cfg);
            if (ts.status != TraceStatus::Completed || t1.status != TraceStatus::Completed ||
                t2.status != TraceStatus::Completed || back.status != TraceStatus::Completed) {
                continue;  // stalled legs are excluded from the flow-law check
            }
            ++checked;
            CHECK(dist(ts.point, t2.point) < 1e-7);
            CHECK(dist(back.point, x) < 1e-7);
        }
        CHECK(checked >= 20);
    }
}

TEST_CASE("traceOrbit emits displacement-bounded samples on the orbit line") {
    IntegratorConfig cfg;
    cfg.max_step_len = 0.005;
    const CompositeField field = slowedField({{0.5, 0.5}}, 0.01);
    const TorusPoint x0{0.1, 0.7};
    const OrbitTrace trace = traceOrbit(field, x0, 50.0, Direction::Forward, cfg);
    REQUIRE(trace.samples.size() > 100);
    CHECK(trace.samples.front().t == 0.0);
    CHECK(trace.samples.front().p == x0);

    double prev_t = trace.samples.front().t;
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
        CHECK(trace.samples[i].t > prev_t);
        prev_t = trace.samples[i].t;
        CHECK(dist(trace.samples[i - 1].p, trace.samples[i].p) <= cfg.max_step_len * (1 + 1e-12));
    }

    // Reparametrization property: the slowed trajectory never leaves the
    // orbit line of the underlying linear flow.
    Vec2 lift{0.0, 0.0};
    const double alpha = field.alpha();
    const double norm = std::sqrt(1.0 + alpha * alpha);
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
        const Vec2 d = liftDisplacement(trace.samples[i - 1].p, trace.samples[i].p);
        lift.dx += d.dx;
        lift.dy += d.dy;
        CHECK(std::abs(alpha * lift.dx - lift.dy) / norm < 1e-6);
    }
}

TEST_CASE("backward traces integrate the negated field") {
    IntegratorConfig cfg;
    const CompositeField field = linearField();
    const TorusPoint x0{0.25, 0.75};
    const OrbitTrace trace = traceOrbit(field, x0, 5.0, Direction::Backward, cfg);
    CHECK(trace.status == TraceStatus::Completed);
    CHECK(trace.samples.back().t == doctest::Approx(-5.0).epsilon(1e-12));
    CHECK(dist(trace.samples.back().p, exactLinearFlowMap(field.slope(), x0, -5.0)) < 1e-9);
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
        CHECK(trace.samples[i].t < trace.samples[i - 1].t);
    }
}

TEST_CASE("a start on the incoming orbit line stalls near the puncture") {
    IntegratorConfig cfg;
    cfg.max_step_len = 0.005;
    const TorusPoint pp{0.5, 0.5};
    const double r0 = 0.01;
    const CompositeField field = slowedField({pp}, r0);

    // Upstream point of the orbit line at arc distance r0/2 from the puncture.
    const double alpha = field.alpha();
    const double norm = std::sqrt(1.0 + alpha * alpha);
    const TorusPoint x0 =
        wrap(pp.x - 0.5 * r0 / norm, pp.y - 0.5 * r0 * alpha / norm);

    const OrbitTrace fwd = traceOrbit(field, x0, 1e5, Direction::Forward, cfg);
    CHECK(fwd.status == TraceStatus::StalledNearPuncture);
    CHECK(dist(fwd.end(), pp) < r0);
    // Monotone approach over the trace tail.
    const std::size_t n = fwd.samples.size();
    REQUIRE(n > 10);
    for (std::size_t i = n - 10; i + 1 < n; ++i) {
        CHECK(dist(fwd.samples[i + 1].p, pp) <= dist(fwd.samples[i].p, pp) + 1e-15);
    }

    // The backward direction escapes the slowing disk.
    const OrbitTrace bwd = traceOrbit(field, x0, 50.0, Direction::Backward, cfg);
    CHECK(bwd.status == TraceStatus::Completed);
    CHECK(dist(bwd.end(), pp) > r0);
}

TEST_CASE("puncture start produces a constant completed trace") {
    IntegratorConfig cfg;
    const TorusPoint pp{0.25, 0.5};
    const CompositeField field = slowedField({pp}, 0.05);
    const OrbitTrace trace = traceOrbit(field, pp, 10.0, Direction::Forward, cfg);
    CHECK(trace.status == TraceStatus::Completed);
    for (const auto& s : trace.samples) {
        CHECK(s.p == pp);
    }
}

TEST_CASE("step budget exhaustion is reported") {
    IntegratorConfig cfg;
    cfg.max_steps = 10;
    const CompositeField field = linearField();
    const FlowResult r = flowMap(field, {0.0, 0.0}, 10.0, cfg);
    CHECK(r.status == TraceStatus::StepBudgetExhausted);
}

TEST_CASE("iterateMap composes the time-t map") {
    IntegratorConfig cfg;
    const CompositeField field = linearField();
    const TorusPoint x0{0.3, 0.8};
    const double t = 0.77;

    SUBCASE("n = 1 reduces to flowMap") {
        const OrbitTrace trace = iterateMap(field, t, x0, 1, cfg);
        REQUIRE(trace.samples.size() == 2);
        CHECK(trace.samples[1].p == flowMap(field, x0, t, cfg).point);
        CHECK(trace.kind == OrbitTrace::Kind::MapIterates);
    }

    SUBCASE("iterates track the exact translation") {
        const int n = 200;
        const OrbitTrace trace = iterateMap(field, t, x0, n, cfg);
        REQUIRE(trace.samples.size() == static_cast<std::size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) {
            CHECK(trace.samples[k].t == static_cast<double>(k));
            const TorusPoint expect = exactLinearFlowMap(field.slope(), x0, k * t);
            CHECK(dist(trace.samples[k].p, expect) <= std::max(1.0, 1.0 * k) * 1e-9);
        }
    }

    SUBCASE("puncture start is a constant sequence") {
        const TorusPoint pp{0.5, 0.5};
        const CompositeField slowed = slowedField({pp}, 0.05);
        const OrbitTrace trace = iterateMap(slowed, t, pp, 20, cfg);
        CHECK(trace.status == TraceStatus::Completed);
        for (const auto& s : trace.samples) {
            CHECK(s.p == pp);
        }
    }

    SUBCASE("n must be positive") {
        CHECK_THROWS_AS(iterateMap(field, t, x0, 0, cfg), std::invalid_argument);
    }
}

TEST_CASE("IntegratorConfig validation") {
    IntegratorConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.rel_tol = 1e-3;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = IntegratorConfig{};
    cfg.max_step_len = 0.3;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = IntegratorConfig{};
    cfg.max_steps = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
