#include "fermat/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "fermat/comparison.hpp"
#include "fermat/metric.hpp"
#include "fermat/persistence.hpp"
#include "fermat/random.hpp"
#include "fermat/signal.hpp"

namespace fermat::experiments {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// JSON has no infinity; spell it out.
json number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

json bars_json(const std::vector<Bar>& bars) {
    json out = json::array();
    for (const auto& b : bars) out.push_back({number(b.birth), number(b.death)});
    return out;
}

/// Finite bars of one degree, longest first.
std::vector<Bar> by_persistence(const PersistenceDiagram& diagram, int degree) {
    std::vector<Bar> bars;
    for (const auto& b : diagram.bars)
        if (b.degree == degree && !b.is_infinite()) bars.push_back(b);
    std::stable_sort(bars.begin(), bars.end(),
                     [](const Bar& a, const Bar& b) { return a.persistence() > b.persistence(); });
    return bars;
}

std::vector<Bar> head(std::vector<Bar> bars, std::size_t k) {
    if (bars.size() > k) bars.resize(k);
    return bars;
}

double coefficient_of_variation(const std::vector<double>& values) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(values.size())) / mean;
}

PointCloud jitter(const PointCloud& cloud, double eta, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t dim = cloud.dim();
    std::vector<double> coords = cloud.coords();
    std::vector<double> step(dim);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        double norm = 0.0;
        for (auto& s : step) {
            s = rng.normal();
            norm += s * s;
        }
        norm = std::sqrt(norm);
        const double radius = eta * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
        for (std::size_t c = 0; c < dim; ++c) coords[i * dim + c] += norm > 0.0 ? radius * step[c] / norm : 0.0;
    }
    return PointCloud(dim, std::move(coords), cloud.generator() + "+jitter", seed);
}

}  // namespace

json Report::to_json() const {
    return json{{"name", name}, {"pass", pass}, {"details", details}};
}

// ---------------------------------------------------------------------------

Report eyeglasses(const EyeglassesConfig& config) {
    Report report{"eyeglasses", false, {}};
    const PointCloud cloud = gen_eyeglasses(config.n, config.noise_sd, config.seed, config.shape);
    const EyeglassesCurve curve(config.shape);
    const double gap = curve.neck_gap();

    const auto euclid = rips_persistence(euclidean_matrix(cloud), 1);
    const auto fermat = rips_persistence(fermat_matrix(cloud, config.p), 1);
    const std::size_t euclid_salient = salient_bars(euclid, 1, config.ratio);
    const std::size_t fermat_salient = salient_bars(fermat, 1, config.ratio);
    const auto euclid_bars = by_persistence(euclid, 1);

    bool birth_ok = false;
    double second_birth = std::nan("");
    if (euclid_bars.size() >= 2) {
        second_birth = euclid_bars[1].birth;
        birth_ok = std::abs(second_birth - gap) <= config.birth_tolerance * gap;
    }
    report.pass = euclid_salient >= 2 && birth_ok && fermat_salient == 1;
    report.details = {
        {"n", config.n},
        {"noise_sd", config.noise_sd},
        {"seed", config.seed},
        {"p", config.p},
        {"salience_ratio", config.ratio},
        {"neck_gap", gap},
        {"euclidean", {{"salient_h1", euclid_salient}, {"top_h1", bars_json(head(euclid_bars, 4))}}},
        {"second_birth", number(second_birth)},
        {"second_birth_within_tolerance", birth_ok},
        {"fermat", {{"salient_h1", fermat_salient}, {"top_h1", bars_json(head(by_persistence(fermat, 1), 4))}}},
    };
    return report;
}

// ---------------------------------------------------------------------------

Report trefoil_outliers(const TrefoilOutliersConfig& config) {
    Report report{"trefoil-outliers", false, {}};
    const auto start = Clock::now();
    const PointCloud x = gen_trefoil(config.n, config.noise_sd, config.seed);
    const double eps = epsilon_star(x);
    const PointCloud y = gen_outliers(x, config.outliers, config.gap_factor * eps, config.seed + 1);
    const double delta = outlier_delta(x, y);
    const PointCloud xy = x.concat(y);
    const FermatOptions options{config.threads, std::nullopt};

    // Outlier invariance below delta^p.
    const auto fx = fermat_matrix(x, config.p, options);
    const auto fxy = fermat_matrix(xy, config.p, options);
    const double r = std::pow(delta, config.p);
    const auto dgm_x = rips_persistence(fx, 1, r);
    const auto dgm_xy = rips_persistence(fxy, 1, r);
    const bool invariance = dgm_x.in_degree(1) == dgm_xy.in_degree(1) && dgm_x.threshold == dgm_xy.threshold;
    const double elapsed = seconds_since(start);

    // Large p: diam_p(X) < delta^p once (delta / eps)^p > n.
    const double ratio = delta / eps;
    double p_large = std::max(2.0, std::floor(std::log(static_cast<double>(config.n)) / std::log(ratio)) + 1.0);
    while (!(std::pow(ratio, p_large) > static_cast<double>(config.n))) p_large += 1.0;
    const auto fx_large = fermat_matrix(x, p_large, options);
    const auto fxy_large = fermat_matrix(xy, p_large, options);
    const double diam = fx_large.max_entry();
    const auto dgm_x_large = rips_persistence(fx_large, 1, diam);
    const auto dgm_xy_large = rips_persistence(fxy_large, 1, diam);
    const bool threshold = dgm_x_large.in_degree(1) == dgm_xy_large.in_degree(1);

    // Degree 0: X u Y against X plus the quotient space.
    const auto h0_xy = h0_mst(fxy);
    auto h0_split = h0_mst(quotient_matrix(x, y, config.p));
    for (const auto& bar : h0_mst(fx).bars)
        if (!bar.is_infinite()) h0_split.bars.push_back(bar);
    h0_split.canonicalize();
    bool h0_ok = h0_xy.bars.size() == h0_split.bars.size() && h0_xy.count_infinite(0) == h0_split.count_infinite(0);
    double h0_error = 0.0;
    if (h0_ok) {
        for (std::size_t i = 0; i < h0_xy.bars.size(); ++i) {
            const auto& a = h0_xy.bars[i];
            const auto& b = h0_split.bars[i];
            if (a.is_infinite() != b.is_infinite()) h0_ok = false;
            else if (!a.is_infinite()) h0_error = std::max(h0_error, std::abs(a.death - b.death));
        }
        h0_ok = h0_ok && h0_error <= config.h0_tolerance;
    }

    const bool outliers_geometric = delta > eps;
    const bool in_time = elapsed < config.time_limit_s;
    report.pass = outliers_geometric && invariance && in_time && threshold && h0_ok;
    report.details = {
        {"n", config.n},
        {"outliers", config.outliers},
        {"seed", config.seed},
        {"noise_sd", config.noise_sd},
        {"epsilon_star", eps},
        {"delta", delta},
        {"geometric_outliers", outliers_geometric},
        {"invariance",
         {{"p", config.p},
          {"threshold", r},
          {"h1_bars", dgm_x.count(1)},
          {"equal", invariance},
          {"seconds", elapsed},
          {"within_time_limit", in_time}}},
        {"large_p",
         {{"p", p_large},
          {"diam_p", diam},
          {"delta_p", std::pow(delta, p_large)},
          {"h1_bars", dgm_x_large.count(1)},
          {"equal", threshold}}},
        {"h0_decomposition",
         {{"bars", h0_xy.bars.size()}, {"max_abs_error", h0_error}, {"holds", h0_ok}}},
    };
    return report;
}

// ---------------------------------------------------------------------------

Report lorenz(const LorenzConfig& config) {
    Report report{"lorenz", false, {}};
    const TimeSeries series = lorenz_series(config.t_max, config.dt, {}, std::sqrt(config.noise_variance), config.seed);
    json runs = json::array();
    bool pass = false;
    for (std::size_t dim : config.dims) {
        DelayParams params{config.tau, dim, 1};
        const std::size_t full = delay_count(series.values.size(), params);
        params.stride = (full + config.max_points - 1) / config.max_points;
        const PointCloud cloud = delay_embed(series, params);
        json entry = {{"dim", dim}, {"stride", params.stride}, {"points", cloud.size()}};
        const auto euclid = rips_persistence(euclidean_matrix(cloud), 1);
        entry["euclidean"] = {{"salient_h1", salient_bars(euclid, 1, config.ratio)},
                              {"top_h1", bars_json(head(by_persistence(euclid, 1), 4))}};
        json fermat = json::array();
        for (double p : config.ps) {
            const auto dgm = rips_persistence(fermat_matrix(cloud, p, {config.threads, std::nullopt}), 1);
            const std::size_t salient = salient_bars(dgm, 1, config.ratio);
            if (dim == config.gated_dim && salient == 2) pass = true;
            fermat.push_back({{"p", p}, {"salient_h1", salient}, {"top_h1", bars_json(head(by_persistence(dgm, 1), 4))}});
        }
        entry["fermat"] = fermat;
        entry["gated"] = dim == config.gated_dim;
        runs.push_back(entry);
    }
    report.pass = pass;
    report.details = {{"t_max", config.t_max}, {"dt", config.dt},         {"samples", series.values.size()},
                      {"tau", config.tau},     {"seed", config.seed},     {"salience_ratio", config.ratio},
                      {"runs", runs}};
    return report;
}

// ---------------------------------------------------------------------------

Report convergence(const ConvergenceConfig& config) {
    Report report{"convergence", false, {}};
    const auto start = Clock::now();
    bool decreasing = true;
    json runs = json::array();
    json seed_mean = json::object();  // informational; the verdict is per seed
    for (ManifoldKind kind : config.kinds) {
        const int d = manifold_dimension(kind);
        std::vector<double> mean_cv(config.sizes.size(), 0.0);
        for (std::uint64_t seed : config.seeds) {
            json cvs = json::array();
            json mus = json::array();
            double previous = std::numeric_limits<double>::infinity();
            bool run_ok = true;
            for (std::size_t n : config.sizes) {
                const PointCloud cloud = gen_uniform_manifold(kind, n, 0.0, seed);
                const auto f = fermat_matrix(cloud, config.p, {config.threads, std::nullopt});
                const auto oracle = uniform_manifold_oracle(kind, cloud, config.p);
                const double cv =
                    coefficient_of_variation(fermat_geodesic_ratios(f, d, oracle, config.min_separation_fraction));
                if (!(cv < previous)) run_ok = false;
                previous = cv;
                mean_cv[cvs.size()] += cv / static_cast<double>(config.seeds.size());
                cvs.push_back(cv);
                mus.push_back(estimate_mu(f, d, oracle, config.min_separation_fraction));
            }
            decreasing = decreasing && run_ok;
            runs.push_back({{"manifold", to_string(kind)},
                            {"seed", seed},
                            {"sizes", config.sizes},
                            {"cv", cvs},
                            {"mu", mus},
                            {"strictly_decreasing", run_ok}});
        }
        seed_mean[to_string(kind)] = mean_cv;
    }
    const double elapsed = seconds_since(start);
    report.pass = decreasing && elapsed < config.time_limit_s;
    report.details = {{"p", config.p}, {"runs", runs}, {"mean_cv_over_seeds", seed_mean}, {"seconds", elapsed}};
    return report;
}

// ---------------------------------------------------------------------------

Report change_point(const ChangePointConfig& config) {
    Report report{"changepoint", false, {}};
    const std::size_t tau = static_cast<std::size_t>(std::llround(config.period / 4.0));
    const std::size_t step = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.period)) / config.stride);
    const std::size_t middle = config.length / 2;
    const DelayParams params{tau, config.dim, config.stride};
    std::size_t hits = 0;
    json runs = json::array();
    for (std::uint64_t seed : config.seeds) {
        const TimeSeries series = sine_switch_series(config.length, config.period, middle, config.noise_sd, seed);
        const auto diagrams = evolving_diagrams(series, params, config.p, step, config.degree, {false, config.threads});
        const auto score = change_point_score(diagrams, series.dt, config.degree, config.window);
        const std::size_t top = top_peak(score);
        const double offset = std::abs(score.times[top] - static_cast<double>(middle) * series.dt);
        const bool hit = offset <= config.tolerance * static_cast<double>(config.length) * series.dt;
        hits += hit;
        json peaks = json::array();
        for (std::size_t k : detect_peaks(score, config.z)) peaks.push_back(score.times[k]);
        runs.push_back({{"seed", seed},
                        {"top_peak_time", score.times[top]},
                        {"offset", offset},
                        {"hit", hit},
                        {"peaks", peaks}});
    }
    report.pass = hits >= config.required;
    report.details = {{"length", config.length},  {"switch", middle},           {"period", config.period},
                      {"tau", tau},               {"dim", config.dim},          {"stride", config.stride},
                      {"step", step},             {"p", config.p},              {"degree", config.degree},
                      {"window", config.window},  {"noise_sd", config.noise_sd}, {"hits", hits},
                      {"required", config.required}, {"runs", runs}};
    return report;
}

// ---------------------------------------------------------------------------

Report stability(const StabilityConfig& config) {
    Report report{"stability", false, {}};
    const PointCloud cloud = gen_eyeglasses(config.n, 0.0, config.seed);
    const auto e0 = euclidean_matrix(cloud);
    const auto f0 = fermat_matrix(cloud, config.p);
    const auto de0 = rips_persistence(e0, 1);
    const auto df0 = rips_persistence(f0, 1);
    bool all = true;
    double worst_ratio = 0.0;
    json trials = json::array();
    for (std::size_t t = 0; t < config.trials; ++t) {
        const PointCloud moved = jitter(cloud, config.eta, config.seed * 1000 + t + 1);
        const auto e1 = euclidean_matrix(moved);
        const auto f1 = fermat_matrix(moved, config.p);
        const auto de1 = rips_persistence(e1, 1);
        const auto df1 = rips_persistence(f1, 1);
        const double ge = sup_difference(e0, e1);
        const double gf = sup_difference(f0, f1);
        json entry = {{"trial", t}, {"euclidean_sup", ge}, {"fermat_sup", gf}, {"euclidean_sup_le_2eta", ge <= 2 * config.eta}};
        for (int degree : {0, 1}) {
            const double be = bottleneck(de0, de1, degree).distance;
            const double bf = bottleneck(df0, df1, degree).distance;
            const bool ok = be <= ge && bf <= gf;
            all = all && ok;
            if (ge > 0) worst_ratio = std::max(worst_ratio, be / ge);
            if (gf > 0) worst_ratio = std::max(worst_ratio, bf / gf);
            entry["degree" + std::to_string(degree)] = {{"euclidean_bottleneck", be}, {"fermat_bottleneck", bf}, {"holds", ok}};
        }
        trials.push_back(entry);
    }
    report.pass = all;
    report.details = {{"n", config.n}, {"eta", config.eta}, {"p", config.p}, {"max_bottleneck_over_sup", worst_ratio},
                      {"trials", trials}};
    return report;
}

// ---------------------------------------------------------------------------

Report performance(const PerformanceConfig& config) {
    Report report{"performance", false, {}};
    const PointCloud cloud = gen_trefoil(config.n, 0.05, config.seed);
    auto start = Clock::now();
    const auto reference = fermat_matrix(cloud, config.p, {config.threads, std::nullopt});
    const double elapsed = seconds_since(start);

    bool invariant = true;
    json checked = json::array();
    for (unsigned threads : config.invariance_threads) {
        if (threads == config.threads) continue;
        const bool same = fermat_matrix(cloud, config.p, {threads, std::nullopt}).lower() == reference.lower();
        invariant = invariant && same;
        checked.push_back({{"threads", threads}, {"bitwise_equal", same}});
    }
    // Prefix diagrams are computed in parallel as well.
    const TimeSeries series = sine_switch_series(300, 30.0, 150, 0.05, config.seed);
    const DelayParams params{8, 3, 2};
    const auto serial = evolving_diagrams(series, params, config.p, 15, 1, {false, 1});
    const auto parallel = evolving_diagrams(series, params, config.p, 15, 1, {false, config.threads});
    bool diagrams_same = serial.size() == parallel.size();
    for (std::size_t i = 0; diagrams_same && i < serial.size(); ++i)
        diagrams_same = serial[i].diagram == parallel[i].diagram && serial[i].sample == parallel[i].sample;
    invariant = invariant && diagrams_same;

    report.pass = elapsed < config.time_limit_s && invariant;
    report.details = {{"n", config.n},
                      {"ambient_dim", cloud.dim()},
                      {"threads", config.threads},
                      {"hardware_threads", std::thread::hardware_concurrency()},
                      {"seconds", elapsed},
                      {"time_limit_s", config.time_limit_s},
                      {"matrix_invariance", checked},
                      {"evolving_diagrams_invariant", diagrams_same}};
    return report;
}

// ---------------------------------------------------------------------------

std::vector<std::string> names() {
    return {"eyeglasses", "trefoil-outliers", "lorenz", "convergence", "changepoint", "stability", "performance"};
}

Report run(const std::string& name, std::uint64_t seed, unsigned threads) {
    if (name == "eyeglasses") {
        EyeglassesConfig c;
        c.seed = seed;
        return eyeglasses(c);
    }
    if (name == "trefoil-outliers") {
        TrefoilOutliersConfig c;
        c.seed = seed;
        c.threads = threads;
        return trefoil_outliers(c);
    }
    if (name == "lorenz") {
        LorenzConfig c;
        c.seed = seed;
        c.threads = threads;
        return lorenz(c);
    }
    if (name == "convergence") {
        ConvergenceConfig c;
        c.seeds = {seed, seed + 1, seed + 2};
        c.threads = threads;
        return convergence(c);
    }
    if (name == "changepoint") {
        ChangePointConfig c;
        c.seeds = {seed, seed + 1, seed + 2, seed + 3, seed + 4};
        c.threads = threads;
        return change_point(c);
    }
    if (name == "stability") {
        StabilityConfig c;
        c.seed = seed;
        return stability(c);
    }
    if (name == "performance") {
        PerformanceConfig c;
        c.seed = seed;
        if (threads != 0) c.threads = threads;
        return performance(c);
    }
    throw std::invalid_argument("unknown experiment: " + name);
}

}  // namespace fermat::experiments
