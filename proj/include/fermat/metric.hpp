#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fermat/geometry.hpp"

namespace fermat {

enum class MetricKind { euclidean, fermat, knn, quotient };

std::string to_string(MetricKind kind);
MetricKind parse_metric_kind(const std::string& name);

/// Provenance of a distance matrix. `p` is meaningful for fermat and
/// quotient kinds, `k` for knn (and for a pruned fermat matrix).
struct MetricTag {
    MetricKind kind = MetricKind::euclidean;
    double p = std::numeric_limits<double>::quiet_NaN();
    std::size_t k = 0;
    bool rescaled = false;
};

/// Symmetric n x n matrix with zero diagonal. Only the strict lower triangle
/// is stored (row-major: entry (i, j), i > j, lives at i(i-1)/2 + j), which
/// makes symmetry exact. Entries are non-negative; +inf marks disconnected
/// pairs. Immutable once built.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(std::size_t n, std::vector<double> lower, MetricTag tag = {});

    /// Builds from a callable f(i, j) evaluated for every i > j.
    template <typename F>
    static DistanceMatrix from_function(std::size_t n, F&& f, MetricTag tag = {}) {
        std::vector<double> lower(n < 2 ? 0 : n * (n - 1) / 2);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) lower[offset(i, j)] = f(i, j);
        return DistanceMatrix(n, std::move(lower), tag);
    }

    std::size_t size() const { return n_; }
    const MetricTag& tag() const { return tag_; }
    MetricKind kind() const { return tag_.kind; }
    const std::vector<double>& lower() const { return lower_; }

    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        return i > j ? lower_[offset(i, j)] : lower_[offset(j, i)];
    }

    bool has_infinite() const;
    double max_entry() const;

    /// Matrix restricted to the first m points (a prefix of the stored triangle).
    DistanceMatrix leading(std::size_t m) const;
    /// Matrix restricted to `indices`, in that order.
    DistanceMatrix submatrix(std::span<const std::size_t> indices) const;
    DistanceMatrix with_tag(MetricTag tag) const { return DistanceMatrix(n_, lower_, tag); }

    static std::size_t offset(std::size_t i, std::size_t j) { return i * (i - 1) / 2 + j; }

    friend bool operator==(const DistanceMatrix& a, const DistanceMatrix& b) {
        return a.n_ == b.n_ && a.lower_ == b.lower_;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> lower_;
    MetricTag tag_;
};

struct FermatParams {
    double p = 2.0;
    int d = 1;  // intrinsic dimension
    std::optional<double> mu;

    void validate() const;
};

DistanceMatrix euclidean_matrix(const PointCloud& cloud);

struct FermatOptions {
    unsigned threads = 1;  // 0 = all hardware threads
    /// Restrict paths to the symmetric k-NN graph. This is an approximation
    /// (it can only overestimate distances); with k = n - 1 it is exact.
    std::optional<std::size_t> prune_k;
};

/// Sample Fermat distance: shortest paths in the complete graph on the cloud
/// with edge cost |a - b|^p. One Dijkstra per source with a linear-scan
/// frontier, O(n^2) per source. Rows are independent and results do not
/// depend on the thread count.
DistanceMatrix fermat_matrix(const PointCloud& cloud, double p, const FermatOptions& options = {});

/// Entrywise multiplication by n^{(p-1)/d} / mu.
DistanceMatrix rescale_fermat(const DistanceMatrix& fermat, const FermatParams& params);

/// Ground truth for a sample on a manifold with known population distance.
struct PopulationOracle {
    std::function<double(std::size_t, std::size_t)> population;  // d_{f,p}(x_i, x_j)
    std::function<double(std::size_t, std::size_t)> geodesic;    // d_M(x_i, x_j)
    double diameter = 0.0;                                        // diam(M, d_M)
};

/// Oracle for a uniform sample of a unit manifold: d_{f,p} = Vol^{(p-1)/d} d_M.
PopulationOracle uniform_manifold_oracle(ManifoldKind kind, const PointCloud& cloud, double p);

/// Median over pairs with d_M >= min_separation_fraction * diameter of
/// n^{(p-1)/d} d_{X_n,p} / d_{f,p}. Throws when fewer than 10 pairs qualify.
double estimate_mu(const DistanceMatrix& fermat, int intrinsic_dim, const PopulationOracle& oracle,
                   double min_separation_fraction = 0.1);

/// Ratios n^{(p-1)/d} d_{X_n,p} / d_M over pairs with d_M >= fraction * diameter.
std::vector<double> fermat_geodesic_ratios(const DistanceMatrix& fermat, int intrinsic_dim,
                                           const PopulationOracle& oracle, double min_separation_fraction = 0.1);

/// Shortest paths on the symmetric k-NN graph with Euclidean edge weights;
/// +inf between disconnected points.
DistanceMatrix knn_matrix(const PointCloud& cloud, std::size_t k, unsigned threads = 1);

/// min over y of d_E(y, Y \ {y}); +inf for a single point.
double minimal_spacing(const PointCloud& points);

/// Euclidean distance between two finite sets.
double set_distance(const PointCloud& a, const PointCloud& b);

/// min{ minimal_spacing(Y), d_E(X, Y) }.
double outlier_delta(const PointCloud& x, const PointCloud& y);

/// Longest edge of a Euclidean minimum spanning tree (0 for a single point).
/// The epsilon-graph uses |x - y| < eps, so it is connected for every eps
/// strictly above this value: Y are geometric outliers iff delta > eps_star.
double epsilon_star(const PointCloud& cloud);

/// Quotient metric on (Y u X)/X. Index 0 is the collapsed class [X], index
/// 1 + i is Y[i]. Shortest paths over X u Y with edge cost |a - b|^p, except
/// that edges between two X points cost nothing.
DistanceMatrix quotient_matrix(const PointCloud& x, const PointCloud& y, double p);

/// Classical MDS into R^dim. Axes are the top eigenvectors of -1/2 J D^2 J
/// scaled by sqrt(max(lambda, 0)); each axis is flipped so that its first
/// non-negligible coordinate is positive.
PointCloud mds_project(const DistanceMatrix& distances, std::size_t dim);

/// Eigenvalues of the double-centred Gram matrix -1/2 J D^2 J, descending.
std::vector<double> mds_gram_eigenvalues(const DistanceMatrix& distances);

/// min_i max_j D(i, j); Rips homology in positive degree is trivial above it.
double enclosing_radius(const DistanceMatrix& distances);

/// max_{i,j} |D1(i, j) - D2(i, j)|; half of it bounds the Gromov-Hausdorff
/// distance for the identity correspondence.
double sup_difference(const DistanceMatrix& a, const DistanceMatrix& b);

}  // namespace fermat
