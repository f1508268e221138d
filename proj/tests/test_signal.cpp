#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fermat/comparison.hpp"
#include "fermat/geometry.hpp"
#include "fermat/metric.hpp"
#include "fermat/signal.hpp"

using namespace fermat;

namespace {

/// Sine of period 40 in three regimes of 300 samples with amplitudes 1, 2, 3.
TimeSeries three_regimes(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.05);
    TimeSeries s;
    double phase = 0;
    for (int i = 0; i < 900; ++i) {
        s.values.push_back((1 + i / 300) * std::sin(phase) + noise(rng));
        phase += 2 * std::numbers::pi / 40;
    }
    return s;
}

}  // namespace

TEST_SUITE("signal") {

TEST_CASE("delay embedding") {
    TimeSeries s{{1, 2, 3, 4, 5}, 1.0};
    auto cloud = delay_embed(s, {1, 3, 1});
    REQUIRE(cloud.size() == 3);
    CHECK(cloud.coords() == std::vector<double>{1, 2, 3, 2, 3, 4, 3, 4, 5});

    TimeSeries flat{std::vector<double>(20, 0.7), 1.0};
    auto same = delay_embed(flat, {2, 3, 1});
    for (double c : same.coords()) CHECK(c == 0.7);

    CHECK_THROWS(delay_embed(s, {3, 3, 1}));
    CHECK_THROWS(delay_embed(s, {1, 1, 1}));
    CHECK_THROWS(delay_embed(s, {0, 3, 1}));
    CHECK_THROWS(delay_embed(s, {1, 3, 0}));
}

TEST_CASE("delay embedding point count") {
    for (std::size_t n : {10, 57, 100})
        for (std::size_t tau : {1, 3})
            for (std::size_t dim : {2, 3, 4})
                for (std::size_t stride : {1, 2, 5}) {
                    DelayParams params{tau, dim, stride};
                    TimeSeries s{std::vector<double>(n, 1.0), 1.0};
                    std::size_t expected = (n - (dim - 1) * tau - 1) / stride + 1;
                    CHECK(delay_count(n, params) == expected);
                    CHECK(delay_embed(s, params).size() == expected);
                }
}

TEST_CASE("a sine with a quarter-period delay embeds on a circle") {
    const int period = 100;
    TimeSeries s;
    for (int i = 0; i < 1000; ++i) s.values.push_back(std::sin(2 * std::numbers::pi * i / period));
    auto cloud = delay_embed(s, {period / 4, 2, 1});
    double lo = 1e9, hi = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        double r = std::hypot(cloud.point(i)[0], cloud.point(i)[1]);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK((hi - lo) / hi < 0.01);
}

TEST_CASE("evolving diagrams restrict the full Fermat matrix") {
    auto series = sine_switch_series(200, 20.0, 100, 0.05, 1);
    DelayParams params{5, 3, 2};
    auto diagrams = evolving_diagrams(series, params, 2.0, 12, 1);
    auto cloud = delay_embed(series, params);
    auto full = fermat_matrix(cloud, 2.0);
    REQUIRE(diagrams.size() == cloud.size() / 12);
    for (std::size_t k = 0; k < diagrams.size(); ++k) {
        const auto& d = diagrams[k];
        CHECK(d.points == 12 * (k + 1));
        CHECK(d.sample == (d.points - 1) * params.stride + (params.dim - 1) * params.tau);
        CHECK(d.diagram == rips_persistence(full.leading(d.points), 1));
    }

    auto whole = evolving_diagrams(series, params, 2.0, cloud.size(), 1);
    REQUIRE(whole.size() == 1);
    CHECK(whole[0].diagram == rips_persistence(full, 1));

    auto threaded = evolving_diagrams(series, params, 2.0, 12, 1, {false, 3});
    for (std::size_t k = 0; k < diagrams.size(); ++k) CHECK(threaded[k].diagram == diagrams[k].diagram);

    // Recomputing on the whole cloud sees the same paths as the full matrix.
    auto fresh = evolving_diagrams(series, params, 2.0, cloud.size(), 1, {true, 1});
    CHECK(fresh.back().diagram == whole.back().diagram);
    CHECK_THROWS(evolving_diagrams(series, params, 2.0, 0, 1));
}

TEST_CASE("change-point score") {
    PersistenceDiagram a, b;
    a.bars = {{1, 0.0, 1.0}};
    b.bars = {{1, 0.0, 3.0}};
    std::vector<EvolvingDiagram> same{{10, 10, a}, {20, 20, a}, {30, 30, a}};
    auto zero = change_point_score(same, 0.5, 1, 1);
    REQUIRE(zero.raw.size() == 2);
    CHECK(zero.raw == std::vector<double>{0.0, 0.0});
    CHECK(zero.indices == std::vector<std::size_t>{20, 30});
    CHECK(zero.times == std::vector<double>{10.0, 15.0});

    std::vector<EvolvingDiagram> jump{{10, 10, a}, {20, 20, b}, {30, 30, b}, {40, 40, a}};
    auto s = change_point_score(jump, 0.5, 1, 1);
    CHECK(s.smoothed == s.raw);
    CHECK(s.raw[0] == doctest::Approx(1.5 / 5.0));  // d_b = 1.5, elapsed time 5

    // Rescaling time by c rescales the score by 1 / c.
    auto slow = change_point_score(jump, 1.5, 1, 3);
    auto fast = change_point_score(jump, 0.5, 1, 3);
    for (std::size_t i = 0; i < fast.raw.size(); ++i) {
        CHECK(slow.raw[i] == doctest::Approx(fast.raw[i] / 3));
        CHECK(slow.smoothed[i] == doctest::Approx(fast.smoothed[i] / 3));
    }
    CHECK_THROWS(change_point_score({{10, 10, a}}, 1.0, 1, 1));
}

TEST_CASE("moving average is centred and truncated") {
    CHECK(moving_average({1, 2, 3, 4}, 1) == std::vector<double>{1, 2, 3, 4});
    auto m = moving_average({3, 0, 0, 6}, 3);
    CHECK(m[0] == doctest::Approx(1.5));
    CHECK(m[1] == doctest::Approx(1.0));
    CHECK(m[2] == doctest::Approx(2.0));
    CHECK(m[3] == doctest::Approx(3.0));
    CHECK_THROWS(moving_average({1, 2}, 0));
}

TEST_CASE("peak detection") {
    ChangePointScore flat;
    flat.smoothed = std::vector<double>(20, 2.0);
    CHECK(detect_peaks(flat).empty());

    ChangePointScore spike;
    spike.smoothed = std::vector<double>(20, 0.0);
    spike.smoothed[7] = 5.0;
    CHECK(detect_peaks(spike) == std::vector<std::size_t>{7});
    CHECK(top_peak(spike) == 7);
    CHECK_THROWS(detect_peaks(spike, 0.0));
    CHECK_THROWS(top_peak(ChangePointScore{}));
}

TEST_CASE("top peak lands near a frequency switch") {
    const std::size_t length = 800;
    auto series = sine_switch_series(length, 40.0, length / 2, 0.05, 0);
    auto diagrams = evolving_diagrams(series, {10, 3, 2}, 2.0, 20, 1);
    auto score = change_point_score(diagrams, series.dt, 1, 3);
    double top = static_cast<double>(score.indices[top_peak(score)]);
    CHECK(std::abs(top - length / 2.0) <= 0.1 * length);
}

TEST_CASE("both changes of a three-regime series are flagged") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto series = three_regimes(seed);
        auto diagrams = evolving_diagrams(series, {10, 3, 2}, 2.0, 10, 1);
        auto score = change_point_score(diagrams, series.dt, 1, 1);
        auto peaks = detect_peaks(score, 2.0);
        std::size_t near_first = 0, near_second = 0, other = 0;
        for (std::size_t k : peaks) {
            double at = static_cast<double>(score.indices[k]);
            if (at >= 300 && at <= 390) ++near_first;
            else if (at >= 600 && at <= 690) ++near_second;
            else ++other;
        }
        CHECK(near_first >= 1);
        CHECK(near_second >= 1);
        CHECK(other <= 1);
    }
}

TEST_CASE("a constant signal has no peaks") {
    TimeSeries flat{std::vector<double>(200, 1.0), 1.0};
    auto diagrams = evolving_diagrams(flat, {3, 3, 1}, 2.0, 20, 1);
    auto score = change_point_score(diagrams, flat.dt, 1, 3);
    for (double v : score.raw) CHECK(v == 0.0);
    CHECK(detect_peaks(score).empty());
}

}
