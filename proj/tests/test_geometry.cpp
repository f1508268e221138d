#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fermat/geometry.hpp"
#include "fermat/metric.hpp"
#include "fermat/persistence.hpp"
#include "oracles.hpp"

using namespace fermat;

TEST_SUITE("geometry") {

TEST_CASE("eyeglasses: size, neck gap and points on the curve") {
    EyeglassesCurve curve;
    CHECK(curve.neck_gap() == 1.0);

    auto noisy = gen_eyeglasses(2000, 0.02, 3);
    CHECK(noisy.size() == 2000);
    CHECK(noisy.dim() == 2);

    auto clean = gen_eyeglasses(250, 0.0, 5);
    REQUIRE(clean.size() == 250);
    double worst = 0;
    for (std::size_t i = 0; i < clean.size(); ++i)
        worst = std::max(worst, curve.distance_to({clean.point(i)[0], clean.point(i)[1]}));
    CHECK(worst < 1e-12);
}

TEST_CASE("eyeglasses: the neck is a pair of horizontal segments 2 * reach apart") {
    EyeglassesCurve curve({0.5, 1.0});
    // Points on the vertical axis of symmetry lie on the neck.
    CHECK(curve.distance_to({0.0, 0.5}) < 1e-12);
    CHECK(curve.distance_to({0.0, -0.5}) < 1e-12);
    CHECK(curve.distance_to({0.0, 0.0}) == doctest::Approx(0.5));
    CHECK(curve.distance_to({curve.lens_center(), 1.0}) < 1e-12);
}

TEST_CASE("generators are deterministic") {
    CHECK(gen_eyeglasses(10, 0.0, 42) == gen_eyeglasses(10, 0.0, 42));
    CHECK(gen_eyeglasses(10, 0.1, 42) == gen_eyeglasses(10, 0.1, 42));
    CHECK(gen_trefoil(50, 0.1, 1) == gen_trefoil(50, 0.1, 1));
    CHECK_FALSE(gen_trefoil(50, 0.1, 1) == gen_trefoil(50, 0.1, 2));
}

TEST_CASE("generators reject bad parameters") {
    CHECK_THROWS(gen_eyeglasses(5, 0.0, 0));
    CHECK_THROWS(gen_eyeglasses(100, -1.0, 0));
    CHECK_THROWS(gen_eyeglasses(100, std::nan(""), 0));
    CHECK_THROWS(gen_trefoil(9, 0.0, 0));
}

TEST_CASE("trefoil: noiseless points lie on the parametrised curve") {
    auto cloud = gen_trefoil(12, 0.0, 0);
    REQUIRE(cloud.size() == 12);
    for (std::size_t i = 0; i < 12; ++i) {
        double t = 2 * std::numbers::pi * static_cast<double>(i) / 12;
        double x = std::sin(t) + 2 * std::sin(2 * t), y = std::cos(t) - 2 * std::cos(2 * t), z = -std::sin(3 * t);
        CHECK(std::abs(cloud.point(i)[0] - x) == 0.0);
        CHECK(std::abs(cloud.point(i)[1] - y) == 0.0);
        CHECK(std::abs(cloud.point(i)[2] - z) == 0.0);
    }
}

TEST_CASE("trefoil: consecutive gaps bounded by twice the mean arclength step") {
    const std::size_t n = 100;
    auto cloud = gen_trefoil(n, 0.0, 0);
    // Curve length by midpoint quadrature of |c'(t)|.
    const int steps = 200000;
    double length = 0;
    for (int k = 0; k < steps; ++k) {
        double t = 2 * std::numbers::pi * (k + 0.5) / steps;
        double dx = std::cos(t) + 4 * std::cos(2 * t), dy = -std::sin(t) + 4 * std::sin(2 * t),
               dz = -3 * std::cos(3 * t);
        length += std::sqrt(dx * dx + dy * dy + dz * dz) * 2 * std::numbers::pi / steps;
    }
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, oracle::dist(cloud, i, (i + 1) % n));
    CHECK(worst <= 2 * length / n);
}

TEST_CASE("trefoil: one salient Fermat cycle at 1500 points") {
    auto cloud = gen_trefoil(1500, 0.05, 0);
    auto diagram = rips_persistence(fermat_matrix(cloud, 2.0, {0, {}}), 1);
    CHECK(salient_bars(diagram, 1, 0.3) == 1);
}

TEST_CASE("outliers: separation from the cloud and from each other") {
    std::mt19937_64 rng(11);
    auto square = oracle::random_cloud(rng, 100, 2);
    // A wider box than the default: no point of the 25% box is 0.5 away
    // from 100 uniform points of the unit square.
    auto y = gen_outliers(square, 3, 0.5, 4, {1'000'000, 3.0});
    REQUIRE(y.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) CHECK(oracle::dist(y, i, j) >= 0.5);
        auto both = square.concat(y);
        for (std::size_t x = 0; x < 100; ++x) CHECK(oracle::dist(both, x, 100 + i) >= 0.5);
    }
}

TEST_CASE("outliers: a single outlier has no spacing constraint") {
    auto cloud = gen_trefoil(100, 0.0, 0);
    auto y = gen_outliers(cloud, 1, 0.3, 0);
    CHECK(y.size() == 1);
    CHECK(std::isinf(minimal_spacing(y)));
}

TEST_CASE("outliers: geometric outliers around a trefoil") {
    auto cloud = gen_trefoil(1500, 0.05, 0);
    double eps = epsilon_star(cloud);
    auto y = gen_outliers(cloud, 10, 1.5 * eps, 0);
    CHECK(y.size() == 10);
    CHECK(outlier_delta(cloud, y) > eps);
}

TEST_CASE("outliers: impossible placement fails explicitly") {
    auto cloud = gen_trefoil(100, 0.0, 0);
    CHECK_THROWS_AS(gen_outliers(cloud, 5, 100.0, 0, {1000, 0.25}), OutlierPlacementError);
    CHECK_THROWS(gen_outliers(cloud, 0, 0.5, 0));
    CHECK_THROWS(gen_outliers(cloud, 2, 0.0, 0));
}

TEST_CASE("lorenz: one step and step-halving") {
    LorenzParams params;
    auto one = lorenz_series(0.01, 0.01, params, 0.0, 0);
    REQUIRE(one.values.size() == 1);
    CHECK(one.values[0] == lorenz_states(0.01, 0.01, params)[0][0]);

    // Halving the step changes the state at t = 1 by less than 1e-5 from
    // dt = 0.005 on; the differences shrink at fourth order.
    auto gap = [&](double dt) {
        auto coarse = lorenz_states(1.0, dt, params);
        auto fine = lorenz_states(1.0, dt / 2, params);
        double worst = 0;
        for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(coarse.back()[c] - fine.back()[c]));
        return worst;
    };
    CHECK(lorenz_states(1.0, 0.01, params).size() == 100);
    CHECK(gap(0.005) < 1e-5);
    CHECK(gap(0.0025) < gap(0.005) / 10);
}

TEST_CASE("lorenz: the experiment's signal") {
    auto series = lorenz_series(20.0, 0.01, {}, std::sqrt(0.1), 0);
    CHECK(series.values.size() == 2000);
    CHECK(series.dt == 0.01);
    CHECK_THROWS(lorenz_series(0.001, 0.01, {}, 0.0, 0));
    LorenzParams wild;
    wild.rho = 1e200;
    CHECK_THROWS(lorenz_series(1.0, 0.01, wild, 0.0, 0));
}

TEST_CASE("uniform manifolds") {
    auto sphere = gen_uniform_manifold(ManifoldKind::sphere, 4, 0.0, 1);
    for (std::size_t i = 0; i < 4; ++i) {
        auto p = sphere.point(i);
        CHECK(std::abs(std::hypot(p[0], p[1], p[2]) - 1.0) < 1e-12);
    }

    const std::size_t n = 1000;
    auto circle = gen_uniform_manifold(ManifoldKind::circle, n, 0.0, 2);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += circle.point(i)[0] / n;
        my += circle.point(i)[1] / n;
    }
    CHECK(std::hypot(mx, my) < 5.0 / std::sqrt(double(n)));

    auto torus = gen_uniform_manifold(ManifoldKind::flat_torus, 10, 0.0, 3);
    REQUIRE(torus.dim() == 4);
    for (std::size_t i = 0; i < 10; ++i) {
        auto p = torus.point(i);
        CHECK(std::abs(std::hypot(p[0], p[1]) - 1.0) < 1e-12);
        CHECK(std::abs(std::hypot(p[2], p[3]) - 1.0) < 1e-12);
    }
}

TEST_CASE("sine switch doubles the frequency with continuous phase") {
    auto s = sine_switch_series(400, 40.0, 200, 0.0, 0);
    REQUIRE(s.values.size() == 400);
    CHECK(std::abs(s.values[40] - s.values[0]) < 1e-12);
    CHECK(std::abs(s.values[220] - s.values[200]) < 1e-12);
    CHECK(std::abs(s.values[201] - s.values[200]) < 2 * std::numbers::pi * 2 / 40 + 1e-12);
}

TEST_CASE("point cloud invariants") {
    CHECK_THROWS(PointCloud(2, {1.0, 2.0, 3.0}));
    CHECK_THROWS(PointCloud(1, {1.0, std::numeric_limits<double>::infinity()}));
    PointCloud a(1, {0.0, 1.0});
    PointCloud b(1, {5.0});
    CHECK(a.concat(b).size() == 3);
    TimeSeries bad{{1.0}, 0.0};
    CHECK_THROWS(bad.validate());
}

}
