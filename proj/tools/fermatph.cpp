#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fermat/comparison.hpp"
#include "fermat/experiments.hpp"
#include "fermat/geometry.hpp"
#include "fermat/io.hpp"
#include "fermat/metric.hpp"
#include "fermat/parallel.hpp"
#include "fermat/persistence.hpp"
#include "fermat/signal.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[noreturn]] void usage(const std::string& message) { throw UsageError(message); }

int fail(const std::string& kind, const std::string& message, int code) {
    json err{{"error", {{"kind", kind}, {"message", message}}}};
    std::cerr << err.dump() << '\n';
    return code;
}

double parse_real(const std::string& text, const std::string& what) {
    try {
        return fermat::io::parse_double(text);
    } catch (const fermat::io::FormatError&) {
        usage(what + ": not a number: '" + text + "'");
    }
}

void require(bool ok, const std::string& message) {
    if (!ok) usage(message);
}

/// Flags of the chosen subcommand as a JSON object: explicit values, else
/// defaults. Numbers stay numbers, "inf" stays a string.
json effective_config(const CLI::App& sub) {
    json out = json::object();
    out["command"] = sub.get_name();
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string& name = opt->get_single_name();
        if (name == "help" || name == "config" || opt->get_lnames().empty()) continue;
        std::string value;
        if (opt->count() > 0) {
            auto results = opt->results();
            value = results.empty() ? "true" : results.back();
        } else {
            value = opt->get_default_str();
        }
        if (opt->get_items_expected_max() == 0 || opt->get_type_size_max() == 0) {
            out[name] = value == "true" || value == "1";
            continue;
        }
        try {
            double number = fermat::io::parse_double(value);
            if (std::isfinite(number)) {
                if (number == std::floor(number) && std::abs(number) < 9e15) out[name] = static_cast<std::int64_t>(number);
                else out[name] = number;
                continue;
            }
        } catch (const fermat::io::FormatError&) {
        }
        out[name] = value;
    }
    return out;
}

fermat::io::Comments header(const json& config) { return {"config=" + config.dump()}; }

/// Turns a JSON config object into "--key=value" arguments for `sub`.
std::vector<std::string> config_arguments(const fs::path& path, const CLI::App& sub) {
    std::ifstream in(path);
    if (!in) usage("cannot open config " + path.string());
    json config;
    try {
        config = json::parse(in);
    } catch (const json::parse_error& e) {
        usage("config " + path.string() + ": " + e.what());
    }
    if (!config.is_object()) usage("config " + path.string() + ": expected a JSON object");
    if (config.contains(sub.get_name()) && config[sub.get_name()].is_object()) config = config[sub.get_name()];

    std::vector<std::string> args;
    for (const auto& [key, value] : config.items()) {
        if (key == "command" || key == "config") continue;
        std::string flag = "--" + key;
        const CLI::Option* opt = nullptr;
        try {
            opt = sub.get_option(flag);
        } catch (const CLI::OptionNotFound&) {
            usage("config " + path.string() + ": unknown key '" + key + "' for " + sub.get_name());
        }
        if (value.is_string()) args.push_back(flag + "=" + value.get<std::string>());
        else if (value.is_boolean()) {
            if (opt->get_type_size() == 0) args.push_back(flag + "=" + (value.get<bool>() ? "true" : "false"));
            else args.push_back(flag + "=" + std::string(value.get<bool>() ? "1" : "0"));
        } else if (value.is_number_integer() || value.is_number_unsigned()) args.push_back(flag + "=" + value.dump());
        else if (value.is_number()) args.push_back(flag + "=" + fermat::io::format_double(value.get<double>()));
        else usage("config " + path.string() + ": key '" + key + "' must be a scalar");
    }
    return args;
}

unsigned thread_count(int requested) {
    if (requested < 0) return fermat::resolve_threads(fermat::threads_from_env(1));
    return fermat::resolve_threads(static_cast<unsigned>(requested));
}

// ---------------------------------------------------------------------------
// Options

struct Common {
    std::string config;
    int threads = -1;
};

struct GenerateArgs {
    std::string kind;
    std::size_t n = 200;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    double reach = 0.5;
    double neck_length = 1.0;
    std::string input;
    std::size_t m = 10;
    double min_gap = 0.0;
    double gap_factor = 1.5;
    double t_max = 20.0;
    double dt = 0.01;
    double period = 40.0;
    std::size_t switch_at = 0;
};

struct DistmatArgs {
    std::string input, kind = "fermat", outliers, out;
    double p = 2.0;
    std::size_t k = 10;
    std::size_t prune_k = 0;
    double mu = 0.0;
    int intrinsic_dim = 1;
};

struct PhArgs {
    std::string input, out, r = "inf", engine = "implicit";
    int max_dim = 1;
};

struct PairArgs {
    std::string a, b, out;
    int degree = 1;
};

struct MdsArgs {
    std::string input, out;
    std::size_t dim = 2;
};

struct EmbedArgs {
    std::string input, out;
    double dt = 0.0;
    std::size_t tau = 1, dim = 3, stride = 1;
};

struct ChangeArgs {
    std::string input, out;
    double dt = 0.0;
    std::size_t tau = 1, dim = 3, stride = 1, step = 10, window = 5;
    double p = 2.0, z = 3.0;
    int degree = 1;
    bool recompute = false;
};

struct ExperimentArgs {
    std::string name, out_dir = ".";
    std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Common& common) {
    sub->add_option("--config", common.config, "JSON file of flag values; explicit flags win");
    sub->add_option("--threads", common.threads, "worker threads, 0 = all cores (default: $FERMATPH_THREADS or 1)");
}

std::optional<double> optional_dt(double dt) {
    if (dt > 0.0) return dt;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Commands

void cmd_generate(const GenerateArgs& a, const json& config) {
    require(!a.out.empty(), "generate: --out is required");
    auto comments = header(config);
    if (a.kind == "lorenz" || a.kind == "sine-switch") {
        fermat::TimeSeries series;
        if (a.kind == "lorenz") {
            series = fermat::lorenz_series(a.t_max, a.dt, {}, a.noise, a.seed);
        } else {
            std::size_t switch_at = a.switch_at > 0 ? a.switch_at : a.n / 2;
            series = fermat::sine_switch_series(a.n, a.period, switch_at, a.noise, a.seed, a.dt);
        }
        fermat::io::save(a.out, [&](std::ostream& out) { fermat::io::write_time_series(out, series, comments); });
        return;
    }
    fermat::PointCloud cloud;
    if (a.kind == "eyeglasses") {
        cloud = fermat::gen_eyeglasses(a.n, a.noise, a.seed, {a.reach, a.neck_length});
    } else if (a.kind == "trefoil") {
        cloud = fermat::gen_trefoil(a.n, a.noise, a.seed);
    } else if (a.kind == "outliers") {
        require(!a.input.empty(), "generate outliers: --input cloud is required");
        auto base = fermat::io::load_point_cloud(a.input);
        double gap = a.min_gap > 0.0 ? a.min_gap : a.gap_factor * fermat::epsilon_star(base);
        cloud = fermat::gen_outliers(base, a.m, gap, a.seed);
        comments.push_back("min_gap=" + fermat::io::format_double(gap));
    } else {
        cloud = fermat::gen_uniform_manifold(fermat::parse_manifold_kind(a.kind), a.n, a.noise, a.seed);
    }
    fermat::io::save(a.out, [&](std::ostream& out) { fermat::io::write_point_cloud(out, cloud, comments); });
}

void cmd_distmat(const DistmatArgs& a, unsigned threads, const json& config) {
    require(!a.out.empty(), "distmat: --out is required");
    auto cloud = fermat::io::load_point_cloud(a.input);
    fermat::DistanceMatrix matrix;
    switch (fermat::parse_metric_kind(a.kind)) {
        case fermat::MetricKind::euclidean:
            matrix = fermat::euclidean_matrix(cloud);
            break;
        case fermat::MetricKind::fermat: {
            fermat::FermatOptions options;
            options.threads = threads;
            if (a.prune_k > 0) options.prune_k = a.prune_k;
            matrix = fermat::fermat_matrix(cloud, a.p, options);
            if (a.mu > 0.0) matrix = fermat::rescale_fermat(matrix, {a.p, a.intrinsic_dim, a.mu});
            break;
        }
        case fermat::MetricKind::knn:
            matrix = fermat::knn_matrix(cloud, a.k, threads);
            break;
        case fermat::MetricKind::quotient:
            require(!a.outliers.empty(), "distmat quotient: --outliers is required");
            matrix = fermat::quotient_matrix(cloud, fermat::io::load_point_cloud(a.outliers), a.p);
            break;
    }
    fermat::io::save(a.out, [&](std::ostream& out) { fermat::io::write_distance_matrix(out, matrix, header(config)); });
}

void cmd_ph(const PhArgs& a, const json& config) {
    require(!a.out.empty(), "ph: --out is required");
    const double r = parse_real(a.r, "--r");
    require(r > 0.0, "ph: --r must be positive");
    require(a.max_dim >= 0, "ph: --max-dim must be >= 0");
    auto matrix = fermat::io::load_distance_matrix(a.input);
    fermat::PersistenceDiagram diagram;
    if (a.engine == "explicit")
        diagram = fermat::persistent_homology(fermat::rips_filtration(matrix, a.max_dim, r));
    else
        diagram = fermat::rips_persistence(matrix, a.max_dim, r);
    fermat::io::save(a.out, [&](std::ostream& out) { fermat::io::write_diagram(out, diagram, header(config)); });
}

void emit_json(const json& result, const std::string& out) {
    std::cout << result.dump() << '\n';
    if (!out.empty()) fermat::io::save(out, [&](std::ostream& o) { o << result.dump(2) << '\n'; });
}

json real(double value) {
    if (std::isinf(value)) return "inf";
    return value;
}

void cmd_bottleneck(const PairArgs& a, const json& config) {
    auto first = fermat::io::load_diagram(a.a);
    auto second = fermat::io::load_diagram(a.b);
    auto result = fermat::bottleneck(first, second, a.degree);
    emit_json({{"distance", real(result.distance)},
               {"witness", json::parse(fermat::matching_json(result.matching))},
               {"config", config}},
              a.out);
}

void cmd_distortion(const PairArgs& a, const json& config) {
    auto d = fermat::metric_distortion(fermat::io::load_distance_matrix(a.a), fermat::io::load_distance_matrix(a.b));
    emit_json({{"sup", real(d.sup)}, {"gh_bound", real(d.gh_bound)}, {"config", config}}, a.out);
}

void cmd_mds(const MdsArgs& a, const json& config) {
    require(!a.out.empty(), "mds: --out is required");
    auto cloud = fermat::mds_project(fermat::io::load_distance_matrix(a.input), a.dim);
    fermat::io::save(a.out, [&](std::ostream& out) { fermat::io::write_point_cloud(out, cloud, header(config)); });
}

void cmd_embed(const EmbedArgs& a, const json& config) {
    require(!a.out.empty(), "embed: --out is required");
    auto series = fermat::io::load_time_series(a.input, optional_dt(a.dt));
    auto cloud = fermat::delay_embed(series, {a.tau, a.dim, a.stride});
    fermat::io::save(a.out, [&](std::ostream& out) { fermat::io::write_point_cloud(out, cloud, header(config)); });
}

void cmd_changepoints(const ChangeArgs& a, unsigned threads, const json& config) {
    require(a.z > 0.0, "changepoints: --z must be positive");
    require(a.step > 0, "changepoints: --step must be positive");
    require(a.window > 0, "changepoints: --window must be positive");
    auto series = fermat::io::load_time_series(a.input, optional_dt(a.dt));
    fermat::DelayParams params{a.tau, a.dim, a.stride};
    auto diagrams = fermat::evolving_diagrams(series, params, a.p, a.step, a.degree, {a.recompute, threads});
    auto score = fermat::change_point_score(diagrams, series.dt, a.degree, a.window);
    if (!a.out.empty())
        fermat::io::save(a.out, [&](std::ostream& out) { fermat::io::write_score(out, score, header(config)); });

    json peaks = json::array();
    for (std::size_t i : fermat::detect_peaks(score, a.z))
        peaks.push_back({{"index", score.indices[i]}, {"time", score.times[i]}, {"smoothed", score.smoothed[i]}});
    json result{{"diagrams", diagrams.size()}, {"peaks", peaks}, {"config", config}};
    if (!score.raw.empty()) {
        std::size_t top = fermat::top_peak(score);
        result["top"] = {{"index", score.indices[top]}, {"time", score.times[top]}, {"smoothed", score.smoothed[top]}};
    }
    std::cout << result.dump() << '\n';
}

void cmd_experiment(const ExperimentArgs& a, unsigned threads) {
    const auto known = fermat::experiments::names();
    if (std::find(known.begin(), known.end(), a.name) == known.end()) usage("experiment: unknown name '" + a.name + "'");
    fs::create_directories(a.out_dir);
    auto report = fermat::experiments::run(a.name, a.seed, threads);
    fs::path path = fs::path(a.out_dir) / (a.name + ".json");
    fermat::io::save(path, [&](std::ostream& out) { out << report.to_json().dump(2) << '\n'; });
    std::cout << json{{"name", report.name}, {"pass", report.pass}, {"report", path.string()}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fermat distances, Rips persistence and change points"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", "fermatph 0.1.0");

    Common common;
    GenerateArgs gen;
    DistmatArgs dm;
    PhArgs ph;
    PairArgs bn, dist;
    MdsArgs mds;
    EmbedArgs emb;
    ChangeArgs cp;
    ExperimentArgs ex;

    auto* generate = app.add_subcommand("generate", "sample a synthetic point cloud or time series");
    generate->add_option("--kind", gen.kind)
        ->required()
        ->check(CLI::IsMember({"eyeglasses", "trefoil", "circle", "sphere", "flat_torus", "lorenz", "outliers",
                               "sine-switch"}));
    generate->add_option("--n", gen.n, "number of points or samples")->check(CLI::PositiveNumber);
    generate->add_option("--noise", gen.noise, "noise standard deviation")->check(CLI::NonNegativeNumber);
    generate->add_option("--seed", gen.seed);
    generate->add_option("--out", gen.out);
    generate->add_option("--reach", gen.reach, "eyeglasses reach")->check(CLI::PositiveNumber);
    generate->add_option("--neck-length", gen.neck_length, "eyeglasses neck segment length")->check(CLI::PositiveNumber);
    generate->add_option("--input", gen.input, "outliers: base cloud");
    generate->add_option("--m", gen.m, "outliers: count");
    generate->add_option("--min-gap", gen.min_gap, "outliers: minimal gap (default gap-factor * eps*)");
    generate->add_option("--gap-factor", gen.gap_factor)->check(CLI::PositiveNumber);
    generate->add_option("--t-max", gen.t_max, "lorenz: integration time")->check(CLI::PositiveNumber);
    generate->add_option("--dt", gen.dt, "lorenz: step; sine-switch: sample spacing")->check(CLI::PositiveNumber);
    generate->add_option("--period", gen.period, "sine-switch: base period in samples")->check(CLI::PositiveNumber);
    generate->add_option("--switch-at", gen.switch_at, "sine-switch: switch sample (default n/2)");
    add_common(generate, common);

    auto* distmat = app.add_subcommand("distmat", "pairwise distance matrix of a point cloud");
    distmat->add_option("--input", dm.input)->required();
    distmat->add_option("--kind", dm.kind)->check(CLI::IsMember({"euclidean", "fermat", "knn", "quotient"}));
    distmat->add_option("--p", dm.p, "Fermat exponent")->check(CLI::Range(1.0, 1e9));
    distmat->add_option("--k", dm.k, "knn: neighbours")->check(CLI::PositiveNumber);
    distmat->add_option("--prune-k", dm.prune_k, "fermat: restrict paths to the k-NN graph (0 = exact)");
    distmat->add_option("--mu", dm.mu, "fermat: rescale by n^((p-1)/d)/mu when > 0")->check(CLI::NonNegativeNumber);
    distmat->add_option("--intrinsic-dim", dm.intrinsic_dim, "fermat: d for rescaling")->check(CLI::PositiveNumber);
    distmat->add_option("--outliers", dm.outliers, "quotient: outlier cloud Y");
    distmat->add_option("--out", dm.out);
    add_common(distmat, common);

    auto* phc = app.add_subcommand("ph", "Vietoris-Rips persistence diagram");
    phc->add_option("--input", ph.input)->required();
    phc->add_option("--max-dim", ph.max_dim, "highest homology degree");
    phc->add_option("--r", ph.r, "filtration threshold or inf");
    phc->add_option("--engine", ph.engine)->check(CLI::IsMember({"implicit", "explicit"}));
    phc->add_option("--out", ph.out);
    add_common(phc, common);

    auto* bottle = app.add_subcommand("bottleneck", "bottleneck distance with a witness matching");
    bottle->add_option("--a", bn.a)->required();
    bottle->add_option("--b", bn.b)->required();
    bottle->add_option("--degree", bn.degree)->check(CLI::NonNegativeNumber);
    bottle->add_option("--out", bn.out, "also write the JSON here");
    add_common(bottle, common);

    auto* distort = app.add_subcommand("distortion", "sup difference of two metrics on one index set");
    distort->add_option("--a", dist.a)->required();
    distort->add_option("--b", dist.b)->required();
    distort->add_option("--out", dist.out, "also write the JSON here");
    add_common(distort, common);

    auto* mdsc = app.add_subcommand("mds", "classical multidimensional scaling");
    mdsc->add_option("--input", mds.input)->required();
    mdsc->add_option("--dim", mds.dim)->check(CLI::PositiveNumber);
    mdsc->add_option("--out", mds.out);
    add_common(mdsc, common);

    auto* embed = app.add_subcommand("embed", "delay embedding of a time series");
    embed->add_option("--input", emb.input)->required();
    embed->add_option("--dt", emb.dt, "sampling step when the file has no dt header");
    embed->add_option("--tau", emb.tau)->check(CLI::PositiveNumber);
    embed->add_option("--dim", emb.dim)->check(CLI::PositiveNumber);
    embed->add_option("--stride", emb.stride)->check(CLI::PositiveNumber);
    embed->add_option("--out", emb.out);
    add_common(embed, common);

    auto* change = app.add_subcommand("changepoints", "bottleneck change-point score of a time series");
    change->add_option("--input", cp.input)->required();
    change->add_option("--dt", cp.dt, "sampling step when the file has no dt header");
    change->add_option("--tau", cp.tau)->check(CLI::PositiveNumber);
    change->add_option("--dim", cp.dim)->check(CLI::PositiveNumber);
    change->add_option("--stride", cp.stride)->check(CLI::PositiveNumber);
    change->add_option("--p", cp.p)->check(CLI::Range(1.0, 1e9));
    change->add_option("--step", cp.step, "prefix growth in embedded points");
    change->add_option("--degree", cp.degree)->check(CLI::NonNegativeNumber);
    change->add_option("--window", cp.window, "moving-average width");
    change->add_option("--z", cp.z, "peak threshold in standard deviations");
    change->add_flag("--recompute", cp.recompute, "recompute the metric on each prefix");
    change->add_option("--out", cp.out, "score CSV");
    add_common(change, common);

    auto* experiment = app.add_subcommand("experiment", "run a reproduction experiment and write its report");
    experiment->add_option("name", ex.name)->required();
    experiment->add_option("--seed", ex.seed);
    experiment->add_option("--out-dir", ex.out_dir);
    add_common(experiment, common);

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        try {
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
            auto chosen = app.get_subcommands();
            CLI::App* sub = chosen.empty() ? nullptr : chosen.front();
            if (sub && !common.config.empty()) {
                // Second pass: config values go before the explicit flags so
                // that, with TakeLast, the flags win.
                auto extra = config_arguments(common.config, *sub);
                auto pos = std::find(args.begin(), args.end(), sub->get_name());
                args.insert(pos + 1, extra.begin(), extra.end());
                common = Common{};
                app.clear();
                std::vector<std::string> again(args.rbegin(), args.rend());
                app.parse(again);
            }
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::CallForAllHelp& e) {
            return app.exit(e);
        } catch (const CLI::CallForVersion& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            return fail("usage", e.what(), 2);
        }

        CLI::App* sub = app.get_subcommands().front();
        const unsigned threads = thread_count(common.threads);
        json config = effective_config(*sub);
        config["threads"] = threads;
        const std::string name = sub->get_name();
        if (name == "generate") cmd_generate(gen, config);
        else if (name == "distmat") cmd_distmat(dm, threads, config);
        else if (name == "ph") cmd_ph(ph, config);
        else if (name == "bottleneck") cmd_bottleneck(bn, config);
        else if (name == "distortion") cmd_distortion(dist, config);
        else if (name == "mds") cmd_mds(mds, config);
        else if (name == "embed") cmd_embed(emb, config);
        else if (name == "changepoints") cmd_changepoints(cp, threads, config);
        else if (name == "experiment") cmd_experiment(ex, threads);
        return 0;
    } catch (const UsageError& e) {
        return fail("usage", e.what(), 2);
    } catch (const fermat::io::FormatError& e) {
        return fail("format", e.what(), 1);
    } catch (const std::invalid_argument& e) {
        return fail("invalid_argument", e.what(), 1);
    } catch (const std::exception& e) {
        return fail("runtime", e.what(), 1);
    }
}
