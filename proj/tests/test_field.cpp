#include "qmlab/field.hpp"

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

}  // namespace

TEST_CASE("smoothStep endpoint and symmetry values") {
    CHECK(smoothStep(-1.0) == 0.0);
    CHECK(smoothStep(0.0) == 0.0);
    CHECK(smoothStep(2.0) == 1.0);
    CHECK(smoothStep(1.0) == 1.0);
    CHECK(smoothStep(0.5) == 0.5);  // chi(0.5)/(2*chi(0.5)), exact in floats
}

TEST_CASE("smoothStep at 0.25 matches the closed form") {
    // Independent evaluation of chi(u)/(chi(u)+chi(1-u)) at u = 1/4.
    const double chi_u = std::exp(-4.0);
    const double chi_1mu = std::exp(-4.0 / 3.0);
    const double expected = chi_u / (chi_u + chi_1mu);
    CHECK(smoothStep(0.25) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(smoothStep(0.25) == doctest::Approx(0.06496916912866406).epsilon(1e-13));
}

TEST_CASE("smoothStep is a monotone partition of unity on (0,1)") {
    double prev = 0.0;
    for (int i = 1; i < 1000; ++i) {
        const double u = i / 1000.0;
        const double s = smoothStep(u);
        CHECK(s >= prev);
        prev = s;
        CHECK(smoothStep(u) + smoothStep(1.0 - u) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("SlopeParam accepts sqrt(2) and rejects near-rationals") {
    const SlopeParam slope = SlopeParam::fromAlpha(kSqrt2);
    CHECK(slope.alpha() == kSqrt2);
    CHECK(!slope.convergents().empty());
    // Convergents of sqrt(2) are ratios of Pell numbers: 1/1, 3/2, 7/5, ...
    CHECK(slope.convergents()[0].p == 1);
    CHECK(slope.convergents()[0].q == 1);
    CHECK(slope.convergents()[1].p == 3);
    CHECK(slope.convergents()[1].q == 2);
    for (const auto& c : slope.convergents()) {
        CHECK(c.q <= kRationalDenominatorMax);
    }

    CHECK_THROWS_AS(SlopeParam::fromAlpha(1.5), std::invalid_argument);
    CHECK_THROWS_AS(SlopeParam::fromAlpha(665857.0 / 470832.0), std::invalid_argument);
    CHECK_THROWS_AS(SlopeParam::fromAlpha(-kSqrt2), std::invalid_argument);
    CHECK_THROWS_AS(SlopeParam::fromAlpha(0.0), std::invalid_argument);
}

TEST_CASE("PunctureSet validates its geometry") {
    CHECK_THROWS_AS(PunctureSet::create({}, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(PunctureSet::create({{0.0, 0.0}}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(PunctureSet::create({{0.0, 0.0}}, 0.25), std::invalid_argument);
    // Closer than 2*r0 (wrap-around distance 0.08 < 0.1).
    CHECK_THROWS_AS(PunctureSet::create({{0.01, 0.0}, {0.93, 0.0}}, 0.05), std::invalid_argument);
    // Duplicate points.
    CHECK_THROWS_AS(PunctureSet::create({{0.2, 0.2}, {0.2, 0.2}}, 0.05), std::invalid_argument);

    const PunctureSet set = PunctureSet::create({{0.0, 0.0}, {0.0, 0.5}}, 0.05);
    CHECK(set.size() == 2);
    CHECK(set.contains({0.0, 0.0}));
    CHECK(set.contains({0.0, 0.5}));
    CHECK(!set.contains({0.1, 0.1}));
}

TEST_CASE("slowingFactor vanishes exactly on punctures and only detectably there") {
    const PunctureSet set = PunctureSet::create({{0.25, 0.25}, {0.75, 0.75}}, 0.05);
    CHECK(slowingFactor({0.25, 0.25}, set) == 0.0);
    CHECK(slowingFactor({0.75, 0.75}, set) == 0.0);
    // Exactly 1 outside every slowing disk.
    CHECK(slowingFactor({0.25, 0.75}, set) == 1.0);
    CHECK(slowingFactor({0.5, 0.0}, set) == 1.0);

    std::mt19937_64 rng(123);
    for (int i = 0; i < 10000; ++i) {
        const TorusPoint p = randomPoint(rng);
        if (set.contains(p)) {
            continue;
        }
        const double f = slowingFactor(p, set);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        CHECK(f > 0.0);
    }
}

TEST_CASE("slowingFactor at half radius matches the closed form") {
    const double r0 = 0.1;
    const PunctureSet set = PunctureSet::create({{0.5, 0.5}}, r0);
    // dist = r0/2, so u = 1/4.
    const TorusPoint p{0.5 + r0 / 2.0, 0.5};
    const double expected = std::exp(-4.0) / (std::exp(-4.0) + std::exp(-4.0 / 3.0));
    CHECK(slowingFactor(p, set) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("evalField scales the linear field and respects the bound") {
    const SlopeParam slope = SlopeParam::fromAlpha(kSqrt2);
    const CompositeField linear = CompositeField::linear(slope);
    const Vec2 v = linear.eval({0.3, 0.9});
    CHECK(v.dx == 1.0);
    CHECK(v.dy == kSqrt2);
    CHECK(linear.bound() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

    const PunctureSet set = PunctureSet::create({{0.5, 0.5}}, 0.1);
    const CompositeField slowed = buildPuncturedField(slope, set, 50);
    CHECK(slowed.eval({0.5, 0.5}).dx == 0.0);
    CHECK(slowed.eval({0.5, 0.5}).dy == 0.0);

    const double s = std::exp(-4.0) / (std::exp(-4.0) + std::exp(-4.0 / 3.0));
    const Vec2 w = slowed.eval({0.55, 0.5});
    CHECK(w.dx == doctest::Approx(s).epsilon(1e-13));
    CHECK(w.dy == doctest::Approx(s * kSqrt2).epsilon(1e-13));

    std::mt19937_64 rng(456);
    for (int i = 0; i < 10000; ++i) {
        const TorusPoint p = randomPoint(rng);
        CHECK(slowed.eval(p).norm() <= slowed.bound() * (1.0 + 1e-15));
    }
}

TEST_CASE("checkDistinctDenseOrbits finds explicit same-orbit pairs") {
    const SlopeParam slope = SlopeParam::fromAlpha(kSqrt2);

    SUBCASE("point constructed on the orbit line is detected with its shift") {
        const TorusPoint q = wrap(0.5, 0.5 * kSqrt2);
        const PunctureSet set = PunctureSet::create({{0.0, 0.0}, q}, 0.05);
        const auto report = checkDistinctDenseOrbits(set, slope, 50);
        REQUIRE(report.pairs.size() == 1);
        CHECK(report.pairs[0].same_orbit);
        CHECK(report.pairs[0].shift == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(report.on_shared_orbit[0]);
        CHECK(report.on_shared_orbit[1]);
        CHECK(!report.allDistinct());
    }

    SUBCASE("vertically displaced pair is distinct within depth 50") {
        const PunctureSet set = PunctureSet::create({{0.0, 0.0}, {0.0, 0.5}}, 0.05);
        const auto report = checkDistinctDenseOrbits(set, slope, 50);
        REQUIRE(report.pairs.size() == 1);
        CHECK(!report.pairs[0].same_orbit);
        CHECK(report.allDistinct());
        CHECK(!report.on_shared_orbit[0]);
        CHECK(!report.on_shared_orbit[1]);
    }

    SUBCASE("a single puncture yields a trivially passing report") {
        const PunctureSet set = PunctureSet::create({{0.1, 0.1}}, 0.05);
        const auto report = checkDistinctDenseOrbits(set, slope, 50);
        CHECK(report.pairs.empty());
        CHECK(report.allDistinct());
    }

    SUBCASE("depth must be positive") {
        const PunctureSet set = PunctureSet::create({{0.1, 0.1}}, 0.05);
        CHECK_THROWS_AS(checkDistinctDenseOrbits(set, slope, 0), std::invalid_argument);
    }
}

TEST_CASE("buildPuncturedField accepts distinct placements and rejects shared orbits") {
    const SlopeParam slope = SlopeParam::fromAlpha(kSqrt2);

    const PunctureSet good = PunctureSet::create({{0.0, 0.0}, {0.0, 0.5}}, 0.05);
    const CompositeField field = buildPuncturedField(slope, good, 50);
    CHECK(field.punctures().size() == 2);
    CHECK(field.eval({0.0, 0.0}).norm() == 0.0);
    CHECK(field.eval({0.0, 0.5}).norm() == 0.0);

    const PunctureSet single = PunctureSet::create({{0.3, 0.3}}, 0.05);
    const CompositeField stopped = buildPuncturedField(slope, single, 50);
    CHECK(stopped.punctures().size() == 1);
    CHECK(stopped.eval({0.3, 0.3}).norm() == 0.0);

    const PunctureSet bad = PunctureSet::create({{0.0, 0.0}, wrap(0.5, 0.5 * kSqrt2)}, 0.05);
    bool rejected = false;
    try {
        buildPuncturedField(slope, bad, 50);
    } catch (const ConstructionRejected& e) {
        rejected = true;
        CHECK(e.witness.i == 0);
        CHECK(e.witness.j == 1);
        CHECK(e.witness.shift == doctest::Approx(0.5).epsilon(1e-9));
    }
    CHECK(rejected);

    // The gate is exactly the scan: rejection happens iff the scan reports a
    // same-orbit pair.
    CHECK(!checkDistinctDenseOrbits(bad, slope, 50).allDistinct());
    CHECK(checkDistinctDenseOrbits(good, slope, 50).allDistinct());
}
