#include "qmlab/torus.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace qmlab;

namespace {

// Independent oracle: literal enumeration of the nine lattice representatives.
double bruteForceDist(TorusPoint p, TorusPoint q) {
    double best = std::numeric_limits<double>::infinity();
    for (int m = -1; m <= 1; ++m) {
        for (int n = -1; n <= 1; ++n) {
            const double dx = q.x + m - p.x;
            const double dy = q.y + n - p.y;
            best = std::min(best, std::sqrt(dx * dx + dy * dy));
        }
    }
    return best;
}

TorusPoint randomPoint(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return TorusPoint{u(rng), u(rng)};
}

}  // namespace

TEST_CASE("wrap reduces to canonical coordinates") {
    const TorusPoint a = wrap(1.25, -0.5);
    CHECK(a.x == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(a.y == doctest::Approx(0.5).epsilon(1e-15));

    CHECK(wrap(0.0, 0.0) == TorusPoint{0.0, 0.0});
    CHECK(wrap(3.0, -2.0) == TorusPoint{0.0, 0.0});
}

TEST_CASE("wrap rejects non-finite input") {
    CHECK_THROWS_AS(wrap(std::numeric_limits<double>::infinity(), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(wrap(0.0, std::nan("")), std::invalid_argument);
}

TEST_CASE("wrap is exactly idempotent and stays in range") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 20000; ++i) {
        const TorusPoint p = wrap(u(rng), u(rng));
        CHECK(p.x >= 0.0);
        CHECK(p.x < 1.0);
        CHECK(p.y >= 0.0);
        CHECK(p.y < 1.0);
        CHECK(wrap(p.x, p.y) == p);
    }
    // Tiny negatives round to 1.0 before the guard kicks in.
    CHECK(wrap(-1e-18, -1e-18) == TorusPoint{0.0, 0.0});
}

TEST_CASE("dist handles wrap-around and known values") {
    CHECK(dist({0.0, 0.0}, {0.9, 0.0}) == doctest::Approx(0.1).epsilon(1e-14));
    const TorusPoint p{0.3, 0.7};
    CHECK(dist(p, p) == 0.0);
    // sqrt(0.02), both coordinates wrap.
    CHECK(dist({0.0, 0.0}, {0.9, 0.9}) == doctest::Approx(0.1414213562373095).epsilon(1e-14));
}

TEST_CASE("dist agrees with brute force, is symmetric, and obeys the triangle inequality") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20000; ++i) {
        const TorusPoint p = randomPoint(rng);
        const TorusPoint q = randomPoint(rng);
        const TorusPoint r = randomPoint(rng);
        const double dpq = dist(p, q);
        CHECK(dpq == doctest::Approx(bruteForceDist(p, q)).epsilon(1e-15));
        CHECK(dpq == dist(q, p));
        CHECK(dpq <= dist(p, r) + dist(r, q) + 1e-12);
        CHECK(dpq <= std::sqrt(0.5) + 1e-15);
    }
}

TEST_CASE("liftDisplacement picks the wrap-around representative") {
    const Vec2 d = liftDisplacement({0.0, 0.0}, {0.9, 0.0});
    CHECK(d.dx == doctest::Approx(-0.1).epsilon(1e-14));
    CHECK(d.dy == 0.0);

    const Vec2 z = liftDisplacement({0.4, 0.8}, {0.4, 0.8});
    CHECK(z.dx == 0.0);
    CHECK(z.dy == 0.0);
}

TEST_CASE("liftDisplacement breaks antipodal ties lexicographically") {
    // Offsets (-1,0) and (0,0) give displacements of equal length 0.5; the
    // lexicographically earlier offset (-1,0) wins.
    const Vec2 d = liftDisplacement({0.2, 0.2}, {0.7, 0.2});
    CHECK(d.dx == -0.5);
    CHECK(d.dy == 0.0);
    CHECK(d.norm() == 0.5);
}

TEST_CASE("liftDisplacement norm equals dist exactly") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20000; ++i) {
        const TorusPoint p = randomPoint(rng);
        const TorusPoint q = randomPoint(rng);
        CHECK(liftDisplacement(p, q).norm() == dist(p, q));
    }
}
