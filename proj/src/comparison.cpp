#include "fermat/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include <json.hpp>

namespace fermat {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

/// Maximum bipartite matching (Hopcroft-Karp) on left/right sets of equal size.
class HopcroftKarp {
public:
    explicit HopcroftKarp(const std::vector<std::vector<std::size_t>>& adjacency)
        : adj_(adjacency), n_(adjacency.size()), match_left_(n_, kNone), match_right_(n_, kNone), level_(n_) {}

    std::size_t run() {
        std::size_t size = 0;
        while (layer()) {
            for (std::size_t u = 0; u < n_; ++u)
                if (match_left_[u] == kNone && augment(u)) ++size;
        }
        return size;
    }

    const std::vector<std::size_t>& left_matches() const { return match_left_; }

private:
    bool layer() {
        std::queue<std::size_t> queue;
        bool found = false;
        for (std::size_t u = 0; u < n_; ++u) {
            level_[u] = match_left_[u] == kNone ? 0 : kNone;
            if (level_[u] == 0) queue.push(u);
        }
        while (!queue.empty()) {
            std::size_t u = queue.front();
            queue.pop();
            for (std::size_t v : adj_[u]) {
                std::size_t w = match_right_[v];
                if (w == kNone) found = true;
                else if (level_[w] == kNone) {
                    level_[w] = level_[u] + 1;
                    queue.push(w);
                }
            }
        }
        return found;
    }

    bool augment(std::size_t u) {
        for (std::size_t v : adj_[u]) {
            std::size_t w = match_right_[v];
            if (w == kNone || (level_[w] == level_[u] + 1 && augment(w))) {
                match_left_[u] = v;
                match_right_[v] = u;
                return true;
            }
        }
        level_[u] = kNone;
        return false;
    }

    const std::vector<std::vector<std::size_t>>& adj_;
    std::size_t n_;
    std::vector<std::size_t> match_left_;
    std::vector<std::size_t> match_right_;
    std::vector<std::size_t> level_;
};

double linf(const Bar& a, const Bar& b) { return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death)); }
double to_diagonal(const Bar& a) { return (a.death - a.birth) / 2.0; }

// Left vertices: bars of A (0..m-1), then diagonal copies of B bars.
// Right vertices: bars of B (0..k-1), then diagonal copies of A bars.
struct FiniteProblem {
    std::vector<Bar> a, b;
    std::vector<std::size_t> a_index, b_index;  // positions within in_degree()

    std::vector<std::vector<std::size_t>> graph(double c) const {
        const std::size_t m = a.size(), k = b.size();
        std::vector<std::vector<std::size_t>> adj(m + k);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < k; ++j)
                if (linf(a[i], b[j]) <= c) adj[i].push_back(j);
            if (to_diagonal(a[i]) <= c) adj[i].push_back(k + i);
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (to_diagonal(b[j]) <= c) adj[m + j].push_back(j);
            for (std::size_t i = 0; i < m; ++i) adj[m + j].push_back(k + i);
        }
        return adj;
    }

    bool feasible(double c, std::vector<std::size_t>* matches = nullptr) const {
        auto adj = graph(c);
        HopcroftKarp solver(adj);
        bool perfect = solver.run() == adj.size();
        if (matches) *matches = solver.left_matches();
        return perfect;
    }
};

}  // namespace

BottleneckResult bottleneck(const PersistenceDiagram& first, const PersistenceDiagram& second, int degree) {
    if (first.threshold != second.threshold)
        throw std::invalid_argument("bottleneck: diagrams were computed at different thresholds");
    const auto bars_a = first.in_degree(degree);
    const auto bars_b = second.in_degree(degree);

    FiniteProblem problem;
    std::vector<std::pair<double, std::size_t>> inf_a, inf_b;
    for (std::size_t i = 0; i < bars_a.size(); ++i) {
        if (bars_a[i].is_infinite()) inf_a.emplace_back(bars_a[i].birth, i);
        else {
            problem.a.push_back(bars_a[i]);
            problem.a_index.push_back(i);
        }
    }
    for (std::size_t j = 0; j < bars_b.size(); ++j) {
        if (bars_b[j].is_infinite()) inf_b.emplace_back(bars_b[j].birth, j);
        else {
            problem.b.push_back(bars_b[j]);
            problem.b_index.push_back(j);
        }
    }

    BottleneckResult result;
    auto& pairs = result.matching.pairs;

    // Infinite bars: matched in birth order when the counts agree.
    double infinite_cost = 0.0;
    std::sort(inf_a.begin(), inf_a.end());
    std::sort(inf_b.begin(), inf_b.end());
    if (inf_a.size() != inf_b.size()) {
        infinite_cost = kInfinity;
        for (const auto& [birth, i] : inf_a) pairs.push_back({i, std::nullopt, kInfinity});
        for (const auto& [birth, j] : inf_b) pairs.push_back({std::nullopt, j, kInfinity});
    } else {
        for (std::size_t q = 0; q < inf_a.size(); ++q) {
            double cost = std::abs(inf_a[q].first - inf_b[q].first);
            infinite_cost = std::max(infinite_cost, cost);
            pairs.push_back({inf_a[q].second, inf_b[q].second, cost});
        }
    }

    // Finite bars: the optimum is one of the candidate costs.
    const std::size_t m = problem.a.size(), k = problem.b.size();
    std::vector<double> candidates{0.0};
    for (const auto& bar : problem.a) candidates.push_back(to_diagonal(bar));
    for (const auto& bar : problem.b) candidates.push_back(to_diagonal(bar));
    for (const auto& x : problem.a)
        for (const auto& y : problem.b) candidates.push_back(linf(x, y));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::size_t lo = 0, hi = candidates.size() - 1;  // the largest candidate is always feasible
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (problem.feasible(candidates[mid])) hi = mid;
        else lo = mid + 1;
    }
    const double finite_cost = candidates[lo];
    std::vector<std::size_t> matches;
    problem.feasible(finite_cost, &matches);
    double realised = 0.0;
    for (std::size_t u = 0; u < m + k; ++u) {
        std::size_t v = matches[u];
        if (u < m && v < k) {
            double cost = linf(problem.a[u], problem.b[v]);
            pairs.push_back({problem.a_index[u], problem.b_index[v], cost});
            realised = std::max(realised, cost);
        } else if (u < m) {
            double cost = to_diagonal(problem.a[u]);
            pairs.push_back({problem.a_index[u], std::nullopt, cost});
            realised = std::max(realised, cost);
        } else if (v < k) {
            double cost = to_diagonal(problem.b[v]);
            pairs.push_back({std::nullopt, problem.b_index[v], cost});
            realised = std::max(realised, cost);
        }
    }

    result.distance = std::max(finite_cost, infinite_cost);
    result.matching.cost = std::max(realised, infinite_cost);
    return result;
}

std::string matching_json(const Matching& matching) {
    auto side = [](const std::optional<std::size_t>& index) -> nlohmann::json {
        if (index) return *index;
        return "diag";
    };
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& pair : matching.pairs) pairs.push_back({side(pair.first), side(pair.second)});
    nlohmann::json out;
    out["pairs"] = pairs;
    if (std::isinf(matching.cost)) out["cost"] = "inf";
    else out["cost"] = matching.cost;
    return out.dump();
}

Distortion metric_distortion(const DistanceMatrix& a, const DistanceMatrix& b) {
    if (a.size() != b.size()) throw std::invalid_argument("distortion: matrices differ in size");
    Distortion out;
    out.sup = sup_difference(a, b);
    out.gh_bound = out.sup / 2.0;
    return out;
}

StabilityReport check_stability(const DistanceMatrix& a, const DistanceMatrix& b, int degree, int max_degree,
                                double r) {
    if (a.size() != b.size()) throw std::invalid_argument("stability: matrices differ in size");
    if (degree < 0 || degree > max_degree) throw std::invalid_argument("stability: degree outside 0..max_degree");
    StabilityReport report;
    report.bottleneck = bottleneck(rips_persistence(a, max_degree, r), rips_persistence(b, max_degree, r), degree).distance;
    report.distortion = metric_distortion(a, b).sup;
    report.holds = report.bottleneck <= report.distortion;
    return report;
}

}  // namespace fermat
