#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fermat/geometry.hpp"

namespace fermat::experiments {

/// Outcome of one reproduction experiment: a verdict plus the measured
/// quantities behind it, ready to be written as JSON.
struct Report {
    std::string name;
    bool pass = false;
    nlohmann::json details;

    nlohmann::json to_json() const;
};

struct EyeglassesConfig {
    std::size_t n = 250;
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
    double p = 2.0;
    double ratio = 0.3;
    double birth_tolerance = 0.15;  // relative, around the neck gap 2 * reach
    EyeglassesCurve::Params shape{};
};

/// Euclidean degree-1 diagram shows the neck cycle born near 2 * reach; the
/// Fermat one keeps a single salient cycle.
Report eyeglasses(const EyeglassesConfig& config);

struct TrefoilOutliersConfig {
    std::size_t n = 300;
    double noise_sd = 0.05;
    std::size_t outliers = 10;
    double gap_factor = 1.5;  // min_gap = gap_factor * eps_star
    double p = 3.0;
    std::uint64_t seed = 0;
    double h0_tolerance = 1e-12;
    double time_limit_s = 30.0;
    unsigned threads = 1;
};

/// Degree-1 diagrams of X u Y and X agree below delta^p and below diam_p(X)
/// for large p; degree 0 splits into X and the quotient space.
Report trefoil_outliers(const TrefoilOutliersConfig& config);

struct LorenzConfig {
    double t_max = 20.0;
    double dt = 0.01;
    double noise_variance = 0.1;
    std::size_t tau = 10;
    std::vector<std::size_t> dims{3, 4, 5};
    std::size_t gated_dim = 3;  // the dimension whose result decides the verdict
    std::vector<double> ps{2.0, 3.0};
    std::size_t max_points = 800;
    double ratio = 0.3;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

/// Salient degree-1 bars of the delay-embedded Lorenz x-coordinate.
Report lorenz(const LorenzConfig& config);

struct ConvergenceConfig {
    std::vector<ManifoldKind> kinds{ManifoldKind::circle, ManifoldKind::flat_torus};
    std::vector<std::size_t> sizes{200, 400, 800};
    std::vector<std::uint64_t> seeds{0, 1, 2};
    double p = 2.0;
    double min_separation_fraction = 0.1;
    double time_limit_s = 120.0;
    unsigned threads = 1;
};

/// Coefficient of variation of n^{(p-1)/d} d_{X_n,p} / d_M per manifold and
/// seed; passes when it strictly decreases along `sizes` in every run.
Report convergence(const ConvergenceConfig& config);

struct ChangePointConfig {
    std::size_t length = 800;  // samples; the switch is at length / 2
    double period = 40.0;      // base period in samples
    double noise_sd = 0.05;
    std::size_t dim = 3;
    std::size_t stride = 2;
    double p = 2.0;
    int degree = 1;
    std::size_t window = 3;
    double z = 3.0;
    double tolerance = 0.1;  // fraction of the series length
    std::size_t required = 4;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    unsigned threads = 1;
};

/// Top smoothed change-point score near the frequency switch. tau is a
/// quarter of the base period; prefixes grow by one base period.
Report change_point(const ChangePointConfig& config);

struct StabilityConfig {
    std::size_t n = 200;
    double eta = 0.05;
    std::size_t trials = 20;
    double p = 2.0;
    std::uint64_t seed = 0;
};

/// Bottleneck distance against the sup metric difference under jitter of
/// at most eta, Euclidean and Fermat, degrees 0 and 1.
Report stability(const StabilityConfig& config);

struct PerformanceConfig {
    std::size_t n = 1000;
    double p = 2.0;
    unsigned threads = 4;
    std::vector<unsigned> invariance_threads{1, 2, 3, 4};
    double time_limit_s = 10.0;
    std::uint64_t seed = 0;
};

/// Wall time of the exact Fermat matrix in R^3 and bitwise invariance of
/// outputs across thread counts.
Report performance(const PerformanceConfig& config);

/// Names accepted by run(): eyeglasses, trefoil-outliers, lorenz, convergence,
/// changepoint, stability, performance.
std::vector<std::string> names();

/// Runs the named experiment with default parameters and the given seed.
Report run(const std::string& name, std::uint64_t seed, unsigned threads);

}  // namespace fermat::experiments
