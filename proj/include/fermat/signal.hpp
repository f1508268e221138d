#pragma once

#include <cstddef>
#include <vector>

#include "fermat/geometry.hpp"
#include "fermat/persistence.hpp"

namespace fermat {

struct DelayParams {
    std::size_t tau = 1;     // delay in samples
    std::size_t dim = 3;     // embedding dimension D
    std::size_t stride = 1;  // step between consecutive embedded points

    void validate() const;
};

/// Points (x_i, x_{i+tau}, ..., x_{i+(D-1)tau}) for i = 0, stride, 2 stride, ...
/// while i + (D-1)tau < n. Throws when the series is too short.
PointCloud delay_embed(const TimeSeries& series, const DelayParams& params);

/// Number of points delay_embed produces for a series of n samples (0 if too short).
std::size_t delay_count(std::size_t n, const DelayParams& params);

struct EvolvingDiagram {
    std::size_t points = 0;  // prefix size j
    std::size_t sample = 0;  // series index of the last coordinate of the prefix's last point
    PersistenceDiagram diagram;
};

struct EvolvingOptions {
    /// Recompute the Fermat distance on each prefix instead of restricting
    /// the full-sample matrix.
    bool recompute = false;
    unsigned threads = 1;
};

/// Diagrams (degrees 0..degree) of the prefixes X_j, j = step, 2 step, ... <= n
/// of the embedded cloud. By default each prefix carries the metric
/// restricted from the Fermat distance of the whole embedded sample.
std::vector<EvolvingDiagram> evolving_diagrams(const TimeSeries& series, const DelayParams& params, double p,
                                               std::size_t step, int degree, const EvolvingOptions& options = {});

struct ChangePointScore {
    std::vector<std::size_t> indices;  // series sample index of each later prefix end
    std::vector<double> times;         // indices * dt
    std::vector<double> raw;           // d_b(dgm_i, dgm_{i-1}) / (t_i - t_{i-1})
    std::vector<double> smoothed;      // centred moving average of raw
};

/// Centred moving average over `window` entries, truncated at the ends.
std::vector<double> moving_average(const std::vector<double>& values, std::size_t window);

ChangePointScore change_point_score(const std::vector<EvolvingDiagram>& diagrams, double dt, int degree,
                                    std::size_t window);

/// Positions where the smoothed score exceeds mean + z * std and is a local
/// maximum (strictly above its left neighbour, not below its right one).
std::vector<std::size_t> detect_peaks(const ChangePointScore& score, double z = 3.0);

/// Position of the largest smoothed score (first on ties); throws when empty.
std::size_t top_peak(const ChangePointScore& score);

}  // namespace fermat
