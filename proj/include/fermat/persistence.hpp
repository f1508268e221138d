#pragma once

#include <compare>
#include <cstddef>
#include <limits>
#include <vector>

#include "fermat/metric.hpp"

namespace fermat {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// One interval [birth, death) of a persistence diagram over Z/2.
struct Bar {
    int degree = 0;
    double birth = 0.0;
    double death = kInfinity;

    double persistence() const { return death - birth; }
    bool is_infinite() const { return death == kInfinity; }

    friend auto operator<=>(const Bar&, const Bar&) = default;
};

/// Multiset of bars computed under the filtration truncation `threshold`
/// (+inf for the full filtration). Zero-persistence bars are never stored.
struct PersistenceDiagram {
    std::vector<Bar> bars;
    double threshold = kInfinity;

    std::vector<Bar> in_degree(int degree) const;
    std::size_t count(int degree) const;
    std::size_t count_infinite(int degree) const;
    /// Sorts bars by (degree, birth, death) so that equal diagrams compare equal.
    void canonicalize();

    friend bool operator==(const PersistenceDiagram&, const PersistenceDiagram&) = default;
};

/// A simplex of a Vietoris-Rips filtration: strictly increasing vertex
/// indices, entering at the largest pairwise distance among its vertices.
struct FiltrationSimplex {
    std::vector<int> vertices;
    double value = 0.0;

    int dim() const { return static_cast<int>(vertices.size()) - 1; }
};

/// Total order used by rips_filtration: (value, dimension, lexicographic vertices).
bool filtration_less(const FiltrationSimplex& a, const FiltrationSimplex& b);

/// Simplices of dimension <= max_degree + 1 (enough to compute homology up
/// to degree max_degree) together with the truncation they were built under.
struct Filtration {
    std::vector<FiltrationSimplex> simplices;
    int max_degree = 1;
    double threshold = kInfinity;
};

/// Every simplex of dimension <= max_degree + 1 with value < r, sorted by
/// filtration_less. With r = +inf the filtration is complete. Throws when an
/// admitted simplex would have an infinite value.
Filtration rips_filtration(const DistanceMatrix& distances, int max_degree, double r = kInfinity);

/// Boundary-matrix reduction over Z/2 with clearing, dimensions processed top
/// down; degree 0 by union-find with the elder rule. Classes alive at the end
/// of the filtration get death = +inf. Throws std::invalid_argument on an
/// unsorted or non-face-closed filtration.
PersistenceDiagram persistent_homology(const Filtration& filtration);

/// Degree-0 diagram read off a minimum spanning tree: one bar [0, w) per MST
/// edge of positive weight w plus one infinite bar.
PersistenceDiagram h0_mst(const DistanceMatrix& distances);

/// Vietoris-Rips persistence in degrees 0..max_degree computed without
/// materialising the filtration: cofacets are enumerated on the fly from a
/// combinatorial number system indexing, and cohomology is reduced with
/// clearing and emergent pairs. The result equals
/// persistent_homology(rips_filtration(distances, max_degree, r)).
/// For r = +inf (or r above the enclosing radius) simplices beyond the
/// enclosing radius are skipped, which leaves the diagram unchanged.
PersistenceDiagram rips_persistence(const DistanceMatrix& distances, int max_degree, double r = kInfinity);

/// Number of finite bars in `degree` whose persistence is at least
/// ratio * (largest finite persistence in that degree).
std::size_t salient_bars(const PersistenceDiagram& diagram, int degree, double ratio);

/// Diagram of a truncation r' <= threshold derived from a diagram computed
/// at a larger threshold: bars born at or after r' are dropped, bars still
/// alive at r' become infinite.
PersistenceDiagram truncate_diagram(const PersistenceDiagram& diagram, double r);

}  // namespace fermat
