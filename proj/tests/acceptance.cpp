// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "fermat/comparison.hpp"
#include "fermat/experiments.hpp"
#include "fermat/metric.hpp"
#include "fermat/persistence.hpp"
#include "oracles.hpp"

using namespace fermat;
namespace ex = fermat::experiments;

namespace {

constexpr double kPathTolerance = 1e-12;
constexpr double kBottleneckTolerance = 1e-12;
constexpr int kPathClouds = 50;
constexpr int kPersistenceClouds = 50;
constexpr int kBottleneckPairs = 100;

int failures = 0;

void verdict(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("criterion %2d  %-26s %s  %s\n", id, name, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, format, args...);
    return buffer;
}

void shortest_path_oracle() {
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<std::size_t> size(2, 8), dim(1, 3);
    std::uniform_real_distribution<double> exponent(1.0, 4.0);
    double worst = 0;
    for (int t = 0; t < kPathClouds; ++t) {
        auto cloud = oracle::random_cloud(rng, size(rng), dim(rng));
        double p = exponent(rng);
        auto d = fermat_matrix(cloud, p);
        for (std::size_t i = 0; i < cloud.size(); ++i)
            for (std::size_t j = i + 1; j < cloud.size(); ++j)
                worst = std::max(worst, std::abs(d(i, j) - oracle::fermat_by_paths(cloud, i, j, p)));
    }
    verdict(4, "shortest-path oracle", worst < kPathTolerance,
            fmt("%d clouds, n <= 8, max abs error %.3g", kPathClouds, worst));
}

void persistence_oracle() {
    std::mt19937_64 rng(1002);
    std::uniform_int_distribution<std::size_t> size(1, 7), dim(1, 3);
    int mismatched = 0, h0_mismatched = 0;
    for (int t = 0; t < kPersistenceClouds; ++t) {
        auto cloud = oracle::random_cloud(rng, size(rng), dim(rng));
        // Alternate Euclidean and Fermat metrics.
        auto d = t % 2 ? fermat_matrix(cloud, 2.0) : euclidean_matrix(cloud);
        auto expected = oracle::persistence_by_ranks(d, 2);
        if (!(persistent_homology(rips_filtration(d, 2)) == expected)) ++mismatched;
        if (!(rips_persistence(d, 2) == expected)) ++mismatched;
        PersistenceDiagram h0;
        h0.bars = expected.in_degree(0);
        auto mst = h0_mst(d);
        if (!(mst == h0) || !(mst == oracle::h0_kruskal(d))) ++h0_mismatched;
    }
    verdict(5, "persistence oracle", mismatched == 0 && h0_mismatched == 0,
            fmt("%d clouds, n <= 7, degrees 0-2: %d diagram mismatches, %d degree-0 mismatches", kPersistenceClouds,
                mismatched, h0_mismatched));
}

void bottleneck_oracle() {
    std::mt19937_64 rng(1003);
    std::uniform_int_distribution<int> count(0, 5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0;
    int infinite_disagreements = 0;
    for (int t = 0; t < kBottleneckPairs; ++t) {
        PersistenceDiagram a, b;
        for (auto* d : {&a, &b}) {
            int n = count(rng);
            for (int i = 0; i < n; ++i) {
                double birth = u(rng);
                double death = u(rng) < 0.1 ? kInfinity : birth + u(rng);
                d->bars.push_back({1, birth, death});
            }
            d->canonicalize();
        }
        double got = bottleneck(a, b, 1).distance;
        double brute = oracle::bottleneck_brute(a.bars, b.bars);
        if (std::isinf(brute) || std::isinf(got)) {
            if (std::isinf(brute) != std::isinf(got)) ++infinite_disagreements;
            continue;
        }
        worst = std::max(worst, std::abs(got - brute));
    }
    verdict(6, "bottleneck oracle", worst < kBottleneckTolerance && infinite_disagreements == 0,
            fmt("%d pairs, <= 5 bars, max abs error %.3g", kBottleneckPairs, worst));
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();

    {
        auto r = ex::trefoil_outliers({});
        const auto& d = r.details;
        const auto& inv = d["invariance"];
        verdict(1, "outlier invariance", inv["equal"].get<bool>() && inv["within_time_limit"].get<bool>() &&
                                             d["geometric_outliers"].get<bool>(),
                fmt("eps*=%.4g delta=%.4g, %d H1 bars equal below delta^p, %.2f s", d["epsilon_star"].get<double>(),
                    d["delta"].get<double>(), inv["h1_bars"].get<int>(), inv["seconds"].get<double>()));
        const auto& big = d["large_p"];
        verdict(2, "large-p threshold", big["equal"].get<bool>(),
                fmt("p=%g, %d H1 bars equal below diam_p(X)=%.3g", big["p"].get<double>(), big["h1_bars"].get<int>(),
                    big["diam_p"].get<double>()));
        const auto& h0 = d["h0_decomposition"];
        verdict(3, "H0 decomposition", h0["holds"].get<bool>(),
                fmt("%d bars, max abs error %.3g", h0["bars"].get<int>(), h0["max_abs_error"].get<double>()));
    }

    shortest_path_oracle();
    persistence_oracle();
    bottleneck_oracle();

    {
        auto r = ex::stability({});
        verdict(7, "stability", r.pass,
                fmt("max bottleneck / sup = %.3f over %zu trials", r.details["max_bottleneck_over_sup"].get<double>(),
                    r.details["trials"].size()));
    }
    {
        auto r = ex::eyeglasses({});
        const auto& d = r.details;
        verdict(8, "eyeglasses homology", r.pass,
                fmt("euclidean salient=%d second birth=%.4f, fermat salient=%d",
                    d["euclidean"]["salient_h1"].get<int>(),
                    d["second_birth"].is_number() ? d["second_birth"].get<double>() : NAN,
                    d["fermat"]["salient_h1"].get<int>()));
    }
    {
        auto r = ex::convergence({});
        std::string cvs;
        int ok = 0, total = 0;
        for (const auto& run : r.details["runs"]) {
            ++total;
            ok += run["strictly_decreasing"].get<bool>();
            if (!run["strictly_decreasing"].get<bool>()) {
                cvs += fmt(" %s/seed%d:", run["manifold"].get<std::string>().c_str(), run["seed"].get<int>());
                for (const auto& v : run["cv"]) cvs += fmt(" %.4f", v.get<double>());
            }
        }
        verdict(9, "convergence", r.pass,
                fmt("%d/%d runs strictly decreasing, %.1f s;", ok, total, r.details["seconds"].get<double>()) + cvs);
    }
    {
        auto r = ex::lorenz({});
        std::string salient;
        for (const auto& run : r.details["runs"]) {
            salient += fmt(" D=%d:", run["dim"].get<int>());
            for (const auto& f : run["fermat"])
                salient += fmt(" p%g=%d", f["p"].get<double>(), f["salient_h1"].get<int>());
        }
        verdict(10, "lorenz pipeline", r.pass, "fermat salient H1 bars" + salient + " (D=3 gated)");
    }
    {
        auto r = ex::change_point({});
        verdict(11, "change-point synthetic", r.pass,
                fmt("%d/5 seeds within 10%% of the switch", r.details["hits"].get<int>()));
    }
    {
        auto r = ex::performance({});
        const auto& d = r.details;
        bool invariant = d["evolving_diagrams_invariant"].get<bool>();
        for (const auto& c : d["matrix_invariance"]) invariant = invariant && c["bitwise_equal"].get<bool>();
        verdict(12, "performance envelope", r.pass,
                fmt("n=1000 R^3 exact: %.2f s on %d threads (%u hardware), thread invariance %s",
                    d["seconds"].get<double>(), d["threads"].get<int>(), d["hardware_threads"].get<unsigned>(),
                    invariant ? "bitwise" : "BROKEN"));
    }

    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of 12 criteria failed (%.1f s)\n", failures, total);
    return failures == 0 ? 0 : 1;
}
