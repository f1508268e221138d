#include "fermat/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fermat {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void attach(std::size_t child_root, std::size_t parent_root) { parent_[child_root] = parent_root; }

private:
    std::vector<std::size_t> parent_;
};

/// Z/2 sum of two sorted index columns.
void add_column(std::vector<std::size_t>& target, const std::vector<std::size_t>& source) {
    std::vector<std::size_t> out;
    out.reserve(target.size() + source.size());
    std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(), std::back_inserter(out));
    target.swap(out);
}

}  // namespace

// ---------------------------------------------------------------------------
// PersistenceDiagram

std::vector<Bar> PersistenceDiagram::in_degree(int degree) const {
    std::vector<Bar> out;
    for (const auto& bar : bars)
        if (bar.degree == degree) out.push_back(bar);
    return out;
}

std::size_t PersistenceDiagram::count(int degree) const {
    return static_cast<std::size_t>(
        std::count_if(bars.begin(), bars.end(), [degree](const Bar& b) { return b.degree == degree; }));
}

std::size_t PersistenceDiagram::count_infinite(int degree) const {
    return static_cast<std::size_t>(std::count_if(
        bars.begin(), bars.end(), [degree](const Bar& b) { return b.degree == degree && b.is_infinite(); }));
}

void PersistenceDiagram::canonicalize() { std::sort(bars.begin(), bars.end()); }

PersistenceDiagram truncate_diagram(const PersistenceDiagram& diagram, double r) {
    require(r <= diagram.threshold, "truncate: new threshold exceeds the diagram's threshold");
    PersistenceDiagram out;
    out.threshold = r;
    for (Bar bar : diagram.bars) {
        if (bar.birth >= r) continue;
        if (bar.death >= r) bar.death = kInfinity;
        out.bars.push_back(bar);
    }
    out.canonicalize();
    return out;
}

std::size_t salient_bars(const PersistenceDiagram& diagram, int degree, double ratio) {
    require(ratio > 0.0 && ratio < 1.0, "salient_bars: ratio must lie in (0, 1)");
    double longest = 0.0;
    bool any = false;
    for (const auto& bar : diagram.bars) {
        if (bar.degree != degree || bar.is_infinite()) continue;
        longest = std::max(longest, bar.persistence());
        any = true;
    }
    if (!any) return 0;
    return static_cast<std::size_t>(std::count_if(diagram.bars.begin(), diagram.bars.end(), [&](const Bar& b) {
        return b.degree == degree && !b.is_infinite() && b.persistence() >= ratio * longest;
    }));
}

// ---------------------------------------------------------------------------
// Explicit filtration

bool filtration_less(const FiltrationSimplex& a, const FiltrationSimplex& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.vertices.size() != b.vertices.size()) return a.vertices.size() < b.vertices.size();
    return a.vertices < b.vertices;
}

Filtration rips_filtration(const DistanceMatrix& distances, int max_degree, double r) {
    require(max_degree >= 0, "rips: max_degree must be >= 0");
    require(r > 0.0, "rips: threshold must be positive");
    const int n = static_cast<int>(distances.size());
    const int top = max_degree + 1;

    Filtration filtration;
    filtration.max_degree = max_degree;
    filtration.threshold = r;
    auto& out = filtration.simplices;

    // Depth-first extension of increasing vertex tuples; a tuple is extended
    // only while its diameter stays below r, since diameters only grow.
    std::vector<int> tuple;
    auto extend = [&](auto&& self, double value) -> void {
        out.push_back({tuple, value});
        if (static_cast<int>(tuple.size()) > top) return;
        for (int v = tuple.back() + 1; v < n; ++v) {
            double next = value;
            for (int u : tuple) next = std::max(next, distances(static_cast<std::size_t>(u), static_cast<std::size_t>(v)));
            if (std::isinf(next) && std::isinf(r))
                throw std::invalid_argument("rips: infinite distance within the threshold");
            if (!(next < r)) continue;
            tuple.push_back(v);
            self(self, next);
            tuple.pop_back();
        }
    };
    for (int v = 0; v < n; ++v) {
        tuple.assign(1, v);
        extend(extend, 0.0);
    }
    std::sort(out.begin(), out.end(), filtration_less);
    return filtration;
}

PersistenceDiagram persistent_homology(const Filtration& filtration) {
    const auto& simplices = filtration.simplices;
    const std::size_t count = simplices.size();
    require(filtration.max_degree >= 0, "persistence: max_degree must be >= 0");

    // Validate ordering and face closure, and build boundary columns.
    std::map<std::vector<int>, std::size_t> position;
    std::vector<std::vector<std::size_t>> boundary(count);
    for (std::size_t pos = 0; pos < count; ++pos) {
        const auto& s = simplices[pos];
        require(!s.vertices.empty(), "persistence: empty simplex");
        require(std::is_sorted(s.vertices.begin(), s.vertices.end()) &&
                    std::adjacent_find(s.vertices.begin(), s.vertices.end()) == s.vertices.end(),
                "persistence: simplex vertices must be strictly increasing");
        require(s.value < filtration.threshold || std::isinf(filtration.threshold),
                "persistence: simplex value beyond the filtration threshold");
        if (pos > 0) require(!filtration_less(s, simplices[pos - 1]), "persistence: filtration is not sorted");
        if (s.dim() > 0) {
            std::vector<int> face(s.vertices.size() - 1);
            for (std::size_t drop = 0; drop < s.vertices.size(); ++drop) {
                std::size_t f = 0;
                for (std::size_t i = 0; i < s.vertices.size(); ++i)
                    if (i != drop) face[f++] = s.vertices[i];
                auto it = position.find(face);
                require(it != position.end(), "persistence: filtration is not closed under faces");
                boundary[pos].push_back(it->second);
            }
            std::sort(boundary[pos].begin(), boundary[pos].end());
        }
        require(position.emplace(s.vertices, pos).second, "persistence: duplicate simplex");
    }

    PersistenceDiagram diagram;
    diagram.threshold = filtration.threshold;
    auto emit = [&](int degree, double birth, double death) {
        if (death > birth) diagram.bars.push_back({degree, birth, death});
    };

    // Degree 0: union-find over edges in filtration order. On a merge the
    // component born later dies; equal births keep the smaller vertex id.
    std::vector<std::size_t> vertex_pos;
    for (std::size_t pos = 0; pos < count; ++pos)
        if (simplices[pos].dim() == 0) vertex_pos.push_back(pos);
    std::map<int, std::size_t> vertex_slot;
    for (std::size_t slot = 0; slot < vertex_pos.size(); ++slot)
        vertex_slot[simplices[vertex_pos[slot]].vertices[0]] = slot;
    UnionFind components(vertex_pos.size());
    std::vector<double> root_birth(vertex_pos.size());
    std::vector<int> root_vertex(vertex_pos.size());
    for (std::size_t slot = 0; slot < vertex_pos.size(); ++slot) {
        root_birth[slot] = simplices[vertex_pos[slot]].value;
        root_vertex[slot] = simplices[vertex_pos[slot]].vertices[0];
    }
    std::vector<char> positive(count, 0);  // creates a class (column reduces to zero)
    for (std::size_t pos = 0; pos < count; ++pos) {
        const auto& s = simplices[pos];
        if (s.dim() == 0) {
            positive[pos] = 1;
            continue;
        }
        if (s.dim() != 1) continue;
        std::size_t a = components.find(vertex_slot.at(s.vertices[0]));
        std::size_t b = components.find(vertex_slot.at(s.vertices[1]));
        if (a == b) {
            positive[pos] = 1;
            continue;
        }
        bool a_elder = root_birth[a] < root_birth[b] || (root_birth[a] == root_birth[b] && root_vertex[a] < root_vertex[b]);
        std::size_t elder = a_elder ? a : b;
        std::size_t younger = a_elder ? b : a;
        emit(0, root_birth[younger], s.value);
        components.attach(younger, elder);
    }
    for (std::size_t slot = 0; slot < vertex_pos.size(); ++slot)
        if (components.find(slot) == slot) diagram.bars.push_back({0, root_birth[slot], kInfinity});

    // Degrees >= 1: reduce columns of dimension d = max_degree + 1 down to 2.
    // A column whose pivot is row i clears column i (it is positive).
    std::vector<char> cleared(count, 0);
    std::vector<char> paired(count, 0);
    std::vector<std::ptrdiff_t> column_of_low(count, -1);
    for (int d = filtration.max_degree + 1; d >= 2; --d) {
        for (std::size_t pos = 0; pos < count; ++pos) {
            if (simplices[pos].dim() != d) continue;
            if (cleared[pos]) {
                positive[pos] = 1;
                boundary[pos].clear();
                continue;
            }
            auto& column = boundary[pos];
            while (!column.empty() && column_of_low[column.back()] >= 0)
                add_column(column, boundary[static_cast<std::size_t>(column_of_low[column.back()])]);
            if (column.empty()) {
                positive[pos] = 1;
                continue;
            }
            std::size_t low = column.back();
            column_of_low[low] = static_cast<std::ptrdiff_t>(pos);
            cleared[low] = 1;
            paired[low] = 1;
            emit(d - 1, simplices[low].value, simplices[pos].value);
        }
    }
    for (std::size_t pos = 0; pos < count; ++pos) {
        int d = simplices[pos].dim();
        if (d >= 1 && d <= filtration.max_degree && positive[pos] && !paired[pos])
            diagram.bars.push_back({d, simplices[pos].value, kInfinity});
    }
    diagram.canonicalize();
    return diagram;
}

PersistenceDiagram h0_mst(const DistanceMatrix& distances) {
    const std::size_t n = distances.size();
    PersistenceDiagram diagram;
    if (n == 0) return diagram;
    std::vector<double> link(n, kInfinity);
    std::vector<char> in_tree(n, 0);
    in_tree[0] = 1;
    std::size_t u = 0;
    std::size_t components = 1;
    for (std::size_t added = 1; added < n; ++added) {
        std::size_t next = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            link[v] = std::min(link[v], distances(u, v));
            if (next == n || link[v] < link[next]) next = v;
        }
        if (std::isinf(link[next])) ++components;  // disconnected: start a new tree
        else if (link[next] > 0.0) diagram.bars.push_back({0, 0.0, link[next]});
        in_tree[next] = 1;
        u = next;
    }
    for (std::size_t c = 0; c < components; ++c) diagram.bars.push_back({0, 0.0, kInfinity});
    diagram.canonicalize();
    return diagram;
}

}  // namespace fermat
