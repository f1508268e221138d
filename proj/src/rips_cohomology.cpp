// Implicit Vietoris-Rips persistence: simplices are identified with their
// rank in the combinatorial number system and never stored as vertex lists.
// Cohomology is reduced dimension by dimension with clearing, emergent
// pairs, and a lazily stored reduction matrix.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "fermat/persistence.hpp"

namespace fermat {

namespace {

using Index = std::int64_t;

struct Entry {
    double diam;
    Index index;
};

// Filtration order is (diam ascending, index descending); the heap keeps the
// earliest entry on top.
struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
        return a.diam > b.diam || (a.diam == b.diam && a.index < b.index);
    }
};

using Heap = std::priority_queue<Entry, std::vector<Entry>, Later>;

std::optional<Entry> pop_pivot(Heap& heap) {
    while (!heap.empty()) {
        Entry pivot = heap.top();
        heap.pop();
        if (!heap.empty() && heap.top().index == pivot.index) {
            heap.pop();
            continue;
        }
        return pivot;
    }
    return std::nullopt;
}

std::optional<Entry> get_pivot(Heap& heap) {
    auto pivot = pop_pivot(heap);
    if (pivot) heap.push(*pivot);
    return pivot;
}

class Engine {
public:
    Engine(const DistanceMatrix& distances, int max_degree, bool inclusive, double limit)
        : dist_(distances),
          n_(static_cast<int>(distances.size())),
          max_degree_(max_degree),
          inclusive_(inclusive),
          limit_(limit) {
        build_binomials();
    }

    PersistenceDiagram run(double threshold) {
        PersistenceDiagram diagram;
        diagram.threshold = threshold;
        std::vector<Entry> columns = reduce_degree_zero(diagram);
        for (int dim = 1; dim <= max_degree_ && !columns.empty(); ++dim) {
            std::unordered_map<Index, std::size_t> pivots;
            reduce(dim, columns, pivots, diagram);
            if (dim < max_degree_) columns = assemble(dim, pivots);
        }
        diagram.canonicalize();
        return diagram;
    }

private:
    bool admissible(double diam) const { return inclusive_ ? diam <= limit_ : diam < limit_; }

    Index binom(int v, int k) const { return binom_[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)]; }

    void build_binomials() {
        const int top = max_degree_ + 2;
        binom_.assign(static_cast<std::size_t>(top) + 1, std::vector<Index>(static_cast<std::size_t>(n_) + 1, 0));
        for (int v = 0; v <= n_; ++v) {
            binom_[0][static_cast<std::size_t>(v)] = 1;
            for (int k = 1; k <= std::min(v, top); ++k) {
                Index a = binom_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(v - 1)];
                Index b = binom_[static_cast<std::size_t>(k)][static_cast<std::size_t>(v - 1)];
                if (a > std::numeric_limits<Index>::max() - b)
                    throw std::overflow_error("rips: simplex count exceeds 64-bit indexing");
                binom_[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)] = a + b;
            }
        }
    }

    /// Vertices of a dim-simplex in decreasing order.
    void vertices_of(Index index, int dim, std::vector<int>& out) const {
        out.resize(static_cast<std::size_t>(dim) + 1);
        int bound = n_;
        for (int k = dim + 1; k >= 1; --k) {
            const auto& row = binom_[static_cast<std::size_t>(k)];
            auto it = std::upper_bound(row.begin(), row.begin() + bound, index);
            int v = static_cast<int>(it - row.begin()) - 1;
            out[static_cast<std::size_t>(dim + 1 - k)] = v;
            index -= row[static_cast<std::size_t>(v)];
            bound = v;
        }
    }

    /// Calls f(cofacet) for admissible cofacets in decreasing index order
    /// until f returns false. With only_top, just cofacets whose new vertex
    /// exceeds every vertex of the simplex.
    template <typename F>
    void for_each_cofacet(const Entry& simplex, int dim, bool only_top, F&& f) {
        vertices_of(simplex.index, dim, scratch_);
        Index above = 0;
        Index below = simplex.index;
        int t = 0;
        for (int w = n_ - 1; w >= 0; --w) {
            if (t <= dim && w == scratch_[static_cast<std::size_t>(t)]) {
                int u = scratch_[static_cast<std::size_t>(t)];
                below -= binom(u, dim + 1 - t);
                above += binom(u, dim + 2 - t);
                ++t;
                continue;
            }
            if (only_top && t > 0) break;
            double diam = simplex.diam;
            for (int q = 0; q <= dim && admissible(diam); ++q)
                diam = std::max(diam, dist_(static_cast<std::size_t>(w), static_cast<std::size_t>(scratch_[static_cast<std::size_t>(q)])));
            if (!admissible(diam)) continue;
            if (!f(Entry{diam, above + binom(w, dim + 2 - t) + below})) return;
        }
    }

    std::vector<Entry> reduce_degree_zero(PersistenceDiagram& diagram) {
        std::vector<Entry> edges;
        for (int i = 1; i < n_; ++i)
            for (int j = 0; j < i; ++j) {
                double d = dist_(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
                if (admissible(d)) edges.push_back({d, static_cast<Index>(DistanceMatrix::offset(static_cast<std::size_t>(i), static_cast<std::size_t>(j)))});
            }
        std::sort(edges.begin(), edges.end(), [](const Entry& a, const Entry& b) { return Later{}(b, a); });
        simplices_ = edges;

        std::vector<int> parent(static_cast<std::size_t>(n_));
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[static_cast<std::size_t>(x)] != x) {
                parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
                x = parent[static_cast<std::size_t>(x)];
            }
            return x;
        };
        std::vector<Entry> columns;
        std::vector<int> ends;
        for (const auto& edge : edges) {
            vertices_of(edge.index, 1, ends);
            int a = find(ends[0]);
            int b = find(ends[1]);
            if (a == b) {
                columns.push_back(edge);
                continue;
            }
            // All vertices are born at 0; keep the smaller root as the survivor.
            if (a < b) std::swap(a, b);
            parent[static_cast<std::size_t>(a)] = b;
            if (edge.diam > 0.0) diagram.bars.push_back({0, 0.0, edge.diam});
        }
        for (int v = 0; v < n_; ++v)
            if (find(v) == v) diagram.bars.push_back({0, 0.0, kInfinity});
        std::reverse(columns.begin(), columns.end());
        return columns;
    }

    void reduce(int dim, const std::vector<Entry>& columns, std::unordered_map<Index, std::size_t>& pivots,
                PersistenceDiagram& diagram) {
        std::vector<std::vector<Entry>> reduction(columns.size());
        Heap coboundary;
        Heap added;
        for (std::size_t j = 0; j < columns.size(); ++j) {
            const Entry sigma = columns[j];
            coboundary = Heap();
            added = Heap();

            std::optional<Entry> pivot;
            bool check_emergent = true;
            bool emergent = false;
            for_each_cofacet(sigma, dim, false, [&](const Entry& cofacet) {
                if (check_emergent && cofacet.diam == sigma.diam) {
                    if (!pivots.contains(cofacet.index)) {
                        pivot = cofacet;
                        emergent = true;
                        return false;
                    }
                    check_emergent = false;
                }
                coboundary.push(cofacet);
                return true;
            });
            if (!emergent) pivot = get_pivot(coboundary);

            while (true) {
                if (!pivot) {
                    diagram.bars.push_back({dim, sigma.diam, kInfinity});
                    break;
                }
                auto hit = pivots.find(pivot->index);
                if (hit == pivots.end()) {
                    if (pivot->diam > sigma.diam) diagram.bars.push_back({dim, sigma.diam, pivot->diam});
                    pivots.emplace(pivot->index, j);
                    auto& stored = reduction[j];
                    while (auto entry = pop_pivot(added)) stored.push_back(*entry);
                    break;
                }
                const std::size_t other = hit->second;
                auto add_simplex = [&](const Entry& simplex) {
                    added.push(simplex);
                    for_each_cofacet(simplex, dim, false, [&](const Entry& cofacet) {
                        coboundary.push(cofacet);
                        return true;
                    });
                };
                add_simplex(columns[other]);
                for (const auto& entry : reduction[other]) add_simplex(entry);
                pivot = get_pivot(coboundary);
            }
        }
    }

    /// Simplices of dimension dim + 1 that are not pivots of the dim
    /// reduction, in column order (diam descending, index ascending).
    std::vector<Entry> assemble(int dim, const std::unordered_map<Index, std::size_t>& pivots) {
        std::vector<Entry> next;
        for (const auto& simplex : simplices_) {
            for_each_cofacet(simplex, dim, true, [&](const Entry& cofacet) {
                next.push_back(cofacet);
                return true;
            });
        }
        simplices_ = next;
        std::vector<Entry> columns;
        columns.reserve(next.size());
        for (const auto& simplex : next)
            if (!pivots.contains(simplex.index)) columns.push_back(simplex);
        std::sort(columns.begin(), columns.end(), Later{});
        return columns;
    }

    const DistanceMatrix& dist_;
    int n_;
    int max_degree_;
    bool inclusive_;
    double limit_;
    std::vector<std::vector<Index>> binom_;
    std::vector<int> scratch_;
    std::vector<Entry> simplices_;  // every admissible simplex of the current dimension
};

}  // namespace

PersistenceDiagram rips_persistence(const DistanceMatrix& distances, int max_degree, double r) {
    if (max_degree < 0) throw std::invalid_argument("rips: max_degree must be >= 0");
    if (!(r > 0.0)) throw std::invalid_argument("rips: threshold must be positive");
    if (std::isinf(r) && distances.has_infinite())
        throw std::invalid_argument("rips: infinite distance within the threshold");
    // Above the enclosing radius the complex is a cone, so positive-degree
    // homology is trivial there and every merge has already happened.
    const double enclosing = enclosing_radius(distances);
    const bool capped = std::isinf(r) || r > enclosing;
    Engine engine(distances, max_degree, capped, capped ? enclosing : r);
    return engine.run(r);
}

}  // namespace fermat
