#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fermat/metric.hpp"
#include "fermat/persistence.hpp"

namespace fermat {

/// One matched pair. Indices refer to PersistenceDiagram::in_degree(degree)
/// of the respective diagram; an empty side is the diagonal.
struct MatchedPair {
    std::optional<std::size_t> first;
    std::optional<std::size_t> second;
    double cost = 0.0;
};

struct Matching {
    std::vector<MatchedPair> pairs;
    double cost = 0.0;
};

struct BottleneckResult {
    double distance = 0.0;
    Matching matching;
};

/// Exact bottleneck distance between the degree-`degree` parts of two
/// diagrams. Finite bars: binary search over candidate costs with a
/// Hopcroft-Karp feasibility test. Infinite bars are matched by sorted
/// births; unequal counts give +inf. Throws on mismatched thresholds.
BottleneckResult bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b, int degree);

/// `{"pairs": [[i, j | "diag"], ...], "cost": c}`
std::string matching_json(const Matching& matching);

struct Distortion {
    double sup = 0.0;       // max |D1(i, j) - D2(i, j)|
    double gh_bound = 0.0;  // sup / 2
};

Distortion metric_distortion(const DistanceMatrix& a, const DistanceMatrix& b);

struct StabilityReport {
    double bottleneck = 0.0;
    double distortion = 0.0;
    bool holds = false;
};

/// Bottleneck distance of the Rips diagrams in `degree` against the sup
/// difference of the matrices; holds iff the former does not exceed the latter.
StabilityReport check_stability(const DistanceMatrix& a, const DistanceMatrix& b, int degree, int max_degree,
                                double r = kInfinity);

}  // namespace fermat
