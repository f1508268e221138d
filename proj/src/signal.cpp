#include "fermat/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fermat/comparison.hpp"
#include "fermat/metric.hpp"
#include "fermat/parallel.hpp"

namespace fermat {

void DelayParams::validate() const {
    if (tau < 1) throw std::invalid_argument("delay: tau must be >= 1");
    if (dim < 2) throw std::invalid_argument("delay: embedding dimension must be >= 2");
    if (stride < 1) throw std::invalid_argument("delay: stride must be >= 1");
}

std::size_t delay_count(std::size_t n, const DelayParams& params) {
    const std::size_t span = (params.dim - 1) * params.tau;
    if (n <= span) return 0;
    return (n - span - 1) / params.stride + 1;
}

PointCloud delay_embed(const TimeSeries& series, const DelayParams& params) {
    params.validate();
    series.validate();
    const std::size_t count = delay_count(series.values.size(), params);
    if (count == 0)
        throw std::invalid_argument("delay: series of length " + std::to_string(series.values.size()) +
                                    " is too short for the embedding window");
    std::vector<double> coords;
    coords.reserve(count * params.dim);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t start = k * params.stride;
        for (std::size_t c = 0; c < params.dim; ++c) coords.push_back(series.values[start + c * params.tau]);
    }
    return PointCloud(params.dim, std::move(coords), "delay_embed");
}

std::vector<EvolvingDiagram> evolving_diagrams(const TimeSeries& series, const DelayParams& params, double p,
                                               std::size_t step, int degree, const EvolvingOptions& options) {
    if (step < 1) throw std::invalid_argument("evolving: step must be >= 1");
    if (degree < 0) throw std::invalid_argument("evolving: degree must be >= 0");
    const PointCloud cloud = delay_embed(series, params);
    const std::size_t n = cloud.size();

    DistanceMatrix full;
    if (!options.recompute) full = fermat_matrix(cloud, p, {.threads = options.threads, .prune_k = std::nullopt});

    std::vector<EvolvingDiagram> out(n / step);
    parallel_for(out.size(), options.threads, [&](std::size_t k) {
        const std::size_t j = (k + 1) * step;
        auto& entry = out[k];
        entry.points = j;
        entry.sample = (j - 1) * params.stride + (params.dim - 1) * params.tau;
        if (options.recompute) {
            std::vector<std::size_t> prefix(j);
            std::iota(prefix.begin(), prefix.end(), std::size_t{0});
            entry.diagram = rips_persistence(fermat_matrix(cloud.subset(prefix), p), degree);
        } else {
            entry.diagram = rips_persistence(full.leading(j), degree);
        }
    });
    return out;
}

std::vector<double> moving_average(const std::vector<double>& values, std::size_t window) {
    if (window < 1) throw std::invalid_argument("moving average: window must be >= 1");
    const std::size_t n = values.size();
    const std::size_t left = (window - 1) / 2;
    const std::size_t right = window / 2;
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + values[i];
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = i >= left ? i - left : 0;
        std::size_t hi = std::min(n, i + right + 1);
        out[i] = window == 1 ? values[i] : (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    }
    return out;
}

ChangePointScore change_point_score(const std::vector<EvolvingDiagram>& diagrams, double dt, int degree,
                                    std::size_t window) {
    if (diagrams.size() < 2) throw std::invalid_argument("change points: need at least two diagrams");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("change points: dt must be positive");
    ChangePointScore score;
    for (std::size_t i = 1; i < diagrams.size(); ++i) {
        const double t0 = static_cast<double>(diagrams[i - 1].sample) * dt;
        const double t1 = static_cast<double>(diagrams[i].sample) * dt;
        if (!(t1 > t0)) throw std::invalid_argument("change points: diagram times must increase");
        double db = bottleneck(diagrams[i].diagram, diagrams[i - 1].diagram, degree).distance;
        score.indices.push_back(diagrams[i].sample);
        score.times.push_back(t1);
        score.raw.push_back(db / (t1 - t0));
    }
    score.smoothed = moving_average(score.raw, window);
    return score;
}

std::vector<std::size_t> detect_peaks(const ChangePointScore& score, double z) {
    if (!(z > 0.0)) throw std::invalid_argument("peaks: z must be positive");
    const auto& s = score.smoothed;
    std::vector<std::size_t> peaks;
    if (s.empty()) return peaks;
    const double n = static_cast<double>(s.size());
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / n;
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    const double cutoff = mean + z * std::sqrt(var / n);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s[i] > cutoff)) continue;
        if (i > 0 && !(s[i] > s[i - 1])) continue;
        if (i + 1 < s.size() && s[i] < s[i + 1]) continue;
        peaks.push_back(i);
    }
    return peaks;
}

std::size_t top_peak(const ChangePointScore& score) {
    if (score.smoothed.empty()) throw std::invalid_argument("peaks: empty score");
    return static_cast<std::size_t>(std::max_element(score.smoothed.begin(), score.smoothed.end()) - score.smoothed.begin());
}

}  // namespace fermat
