#include "fermat/metric.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "fermat/parallel.hpp"

namespace fermat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

/// Full row-major n x n matrix of edge costs |x_a - x_b|^p.
std::vector<double> power_weights(const PointCloud& cloud, double p) {
    const std::size_t n = cloud.size();
    std::vector<double> w(n * n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            double d = euclidean_distance(cloud.point(i), cloud.point(j));
            double c = p == 1.0 ? d : std::pow(d, p);
            w[i * n + j] = c;
            w[j * n + i] = c;
        }
    }
    return w;
}

/// Dijkstra on a dense graph. The frontier is an unordered list of unsettled
/// vertices scanned linearly; the next vertex is the one with the smallest
/// (distance, index). Stops once the first `needed` vertices are settled.
void dense_dijkstra(std::size_t source, std::size_t n, const std::vector<double>& weights, std::size_t needed,
                    std::vector<double>& dist) {
    dist.assign(n, kInf);
    std::vector<std::size_t> active;
    active.reserve(n);
    for (std::size_t v = 0; v < n; ++v)
        if (v != source) active.push_back(v);
    dist[source] = 0.0;
    std::size_t u = source;
    std::size_t settled_needed = source < needed ? 1 : 0;
    while (!active.empty() && settled_needed < needed) {
        const double du = dist[u];
        const double* row = weights.data() + u * n;
        std::size_t best_pos = 0;
        double best = kInf;
        std::size_t best_vertex = n;
        for (std::size_t pos = 0; pos < active.size(); ++pos) {
            std::size_t v = active[pos];
            double cand = du + row[v];
            if (cand < dist[v]) dist[v] = cand;
            double dv = dist[v];
            if (dv < best || (dv == best && v < best_vertex)) {
                best = dv;
                best_vertex = v;
                best_pos = pos;
            }
        }
        if (best == kInf) break;
        u = best_vertex;
        active[best_pos] = active.back();
        active.pop_back();
        if (u < needed) ++settled_needed;
    }
}

using Adjacency = std::vector<std::vector<std::pair<std::size_t, double>>>;

/// Dijkstra with a binary heap ordered by (distance, index).
void sparse_dijkstra(std::size_t source, const Adjacency& graph, std::vector<double>& dist) {
    const std::size_t n = graph.size();
    dist.assign(n, kInf);
    std::vector<char> done(n, 0);
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        auto [du, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = 1;
        for (auto [v, w] : graph[u]) {
            if (done[v]) continue;
            double cand = du + w;
            if (cand < dist[v]) {
                dist[v] = cand;
                heap.emplace(cand, v);
            }
        }
    }
}

/// Symmetric k-NN graph: an edge whenever either endpoint is among the k
/// nearest (ties by index) of the other. Edge weight cost(d).
template <typename Cost>
Adjacency knn_graph(const PointCloud& cloud, std::size_t k, Cost cost) {
    const std::size_t n = cloud.size();
    std::vector<std::vector<char>> linked(n, std::vector<char>(n, 0));
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < n; ++i) {
        order.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) order.emplace_back(euclidean_distance(cloud.point(i), cloud.point(j)), j);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
        for (std::size_t r = 0; r < k; ++r) {
            std::size_t j = order[r].second;
            linked[i][j] = linked[j][i] = 1;
        }
    }
    Adjacency graph(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (linked[i][j]) graph[i].emplace_back(j, cost(euclidean_distance(cloud.point(i), cloud.point(j))));
    return graph;
}

DistanceMatrix rows_to_matrix(std::size_t n, const std::vector<std::vector<double>>& rows, MetricTag tag) {
    return DistanceMatrix::from_function(n, [&](std::size_t i, std::size_t j) { return rows[i][j]; }, tag);
}

}  // namespace

std::string to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::euclidean: return "euclidean";
        case MetricKind::fermat: return "fermat";
        case MetricKind::knn: return "knn";
        case MetricKind::quotient: return "quotient";
    }
    return "?";
}

MetricKind parse_metric_kind(const std::string& name) {
    if (name == "euclidean") return MetricKind::euclidean;
    if (name == "fermat") return MetricKind::fermat;
    if (name == "knn") return MetricKind::knn;
    if (name == "quotient") return MetricKind::quotient;
    throw std::invalid_argument("unknown metric kind: " + name);
}

// ---------------------------------------------------------------------------
// DistanceMatrix

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> lower, MetricTag tag)
    : n_(n), lower_(std::move(lower)), tag_(tag) {
    require(lower_.size() == (n < 2 ? 0 : n * (n - 1) / 2), "distance matrix: wrong number of entries");
    for (double v : lower_) require(v >= 0.0, "distance matrix: entries must be non-negative and not NaN");
}

bool DistanceMatrix::has_infinite() const {
    return std::any_of(lower_.begin(), lower_.end(), [](double v) { return std::isinf(v); });
}

double DistanceMatrix::max_entry() const {
    return lower_.empty() ? 0.0 : *std::max_element(lower_.begin(), lower_.end());
}

DistanceMatrix DistanceMatrix::leading(std::size_t m) const {
    require(m <= n_, "distance matrix: leading size exceeds matrix size");
    std::size_t count = m < 2 ? 0 : m * (m - 1) / 2;
    return DistanceMatrix(m, std::vector<double>(lower_.begin(), lower_.begin() + static_cast<std::ptrdiff_t>(count)),
                          tag_);
}

DistanceMatrix DistanceMatrix::submatrix(std::span<const std::size_t> indices) const {
    for (std::size_t i : indices) require(i < n_, "distance matrix: submatrix index out of range");
    return from_function(indices.size(), [&](std::size_t a, std::size_t b) { return (*this)(indices[a], indices[b]); },
                         tag_);
}

void FermatParams::validate() const {
    require(std::isfinite(p) && p > 1.0, "fermat: p must be > 1");
    require(d >= 1, "fermat: intrinsic dimension must be >= 1");
    require(!mu || (std::isfinite(*mu) && *mu > 0.0), "fermat: mu must be positive");
}

// ---------------------------------------------------------------------------
// Estimators

DistanceMatrix euclidean_matrix(const PointCloud& cloud) {
    return DistanceMatrix::from_function(
        cloud.size(), [&](std::size_t i, std::size_t j) { return euclidean_distance(cloud.point(i), cloud.point(j)); },
        MetricTag{MetricKind::euclidean});
}

DistanceMatrix fermat_matrix(const PointCloud& cloud, double p, const FermatOptions& options) {
    require(std::isfinite(p) && p >= 1.0, "fermat: p must be >= 1");
    require(!cloud.empty(), "fermat: empty point cloud");
    const std::size_t n = cloud.size();
    MetricTag tag{MetricKind::fermat, p};
    std::vector<std::vector<double>> rows(n);

    if (options.prune_k) {
        std::size_t k = *options.prune_k;
        require(k >= 1 && k < n, "fermat: prune k must satisfy 1 <= k < n");
        tag.k = k;
        Adjacency graph = knn_graph(cloud, k, [p](double d) { return p == 1.0 ? d : std::pow(d, p); });
        parallel_for(n, options.threads, [&](std::size_t i) { sparse_dijkstra(i, graph, rows[i]); });
    } else {
        const std::vector<double> weights = power_weights(cloud, p);
        // Row i only contributes entries (i, j) with j < i.
        parallel_for(n, options.threads, [&](std::size_t i) { dense_dijkstra(i, n, weights, i, rows[i]); });
    }
    return rows_to_matrix(n, rows, tag);
}

DistanceMatrix rescale_fermat(const DistanceMatrix& fermat, const FermatParams& params) {
    require(fermat.kind() == MetricKind::fermat, "rescale: matrix must be of fermat kind");
    require(params.mu.has_value(), "rescale: mu is required");
    params.validate();
    const double n = static_cast<double>(fermat.size());
    const double scale = std::pow(n, (params.p - 1.0) / params.d) / *params.mu;
    std::vector<double> lower = fermat.lower();
    for (double& v : lower) v *= scale;
    MetricTag tag = fermat.tag();
    tag.rescaled = true;
    return DistanceMatrix(fermat.size(), std::move(lower), tag);
}

PopulationOracle uniform_manifold_oracle(ManifoldKind kind, const PointCloud& cloud, double p) {
    const double factor = std::pow(manifold_volume(kind), (p - 1.0) / manifold_dimension(kind));
    PopulationOracle oracle;
    oracle.geodesic = [kind, &cloud](std::size_t i, std::size_t j) {
        return manifold_geodesic(kind, cloud.point(i), cloud.point(j));
    };
    oracle.population = [kind, &cloud, factor](std::size_t i, std::size_t j) {
        return factor * manifold_geodesic(kind, cloud.point(i), cloud.point(j));
    };
    oracle.diameter = manifold_diameter(kind);
    return oracle;
}

namespace {

template <typename Reference>
std::vector<double> scaled_ratios(const DistanceMatrix& fermat, int intrinsic_dim, const PopulationOracle& oracle,
                                  double fraction, Reference reference) {
    require(fermat.kind() == MetricKind::fermat && !fermat.tag().rescaled,
            "ratios: expected an unscaled fermat matrix");
    require(intrinsic_dim >= 1, "ratios: intrinsic dimension must be >= 1");
    const double p = fermat.tag().p;
    const std::size_t n = fermat.size();
    const double scale = std::pow(static_cast<double>(n), (p - 1.0) / intrinsic_dim);
    const double floor = fraction * oracle.diameter;
    std::vector<double> ratios;
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (oracle.geodesic(i, j) < floor) continue;
            double ref = reference(i, j);
            if (ref > 0.0) ratios.push_back(scale * fermat(i, j) / ref);
        }
    }
    return ratios;
}

double median(std::vector<double> values) {
    auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    double upper = *mid;
    if (values.size() % 2 == 1) return upper;
    double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace

double estimate_mu(const DistanceMatrix& fermat, int intrinsic_dim, const PopulationOracle& oracle,
                   double min_separation_fraction) {
    auto ratios = scaled_ratios(fermat, intrinsic_dim, oracle, min_separation_fraction, oracle.population);
    if (ratios.size() < 10) throw std::runtime_error("estimate_mu: fewer than 10 admissible pairs");
    return median(std::move(ratios));
}

std::vector<double> fermat_geodesic_ratios(const DistanceMatrix& fermat, int intrinsic_dim,
                                           const PopulationOracle& oracle, double min_separation_fraction) {
    return scaled_ratios(fermat, intrinsic_dim, oracle, min_separation_fraction, oracle.geodesic);
}

DistanceMatrix knn_matrix(const PointCloud& cloud, std::size_t k, unsigned threads) {
    const std::size_t n = cloud.size();
    require(k >= 1 && k < n, "knn: k must satisfy 1 <= k < n");
    Adjacency graph = knn_graph(cloud, k, [](double d) { return d; });
    std::vector<std::vector<double>> rows(n);
    parallel_for(n, threads, [&](std::size_t i) { sparse_dijkstra(i, graph, rows[i]); });
    return rows_to_matrix(n, rows, MetricTag{MetricKind::knn, std::numeric_limits<double>::quiet_NaN(), k});
}

double minimal_spacing(const PointCloud& points) {
    require(!points.empty(), "minimal spacing: empty set");
    double best = kInf;
    for (std::size_t i = 1; i < points.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) best = std::min(best, euclidean_distance(points.point(i), points.point(j)));
    return best;
}

double set_distance(const PointCloud& a, const PointCloud& b) {
    require(!a.empty() && !b.empty(), "set distance: empty set");
    require(a.dim() == b.dim(), "set distance: dimension mismatch");
    double best = kInf;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) best = std::min(best, euclidean_distance(a.point(i), b.point(j)));
    return best;
}

double outlier_delta(const PointCloud& x, const PointCloud& y) {
    return std::min(minimal_spacing(y), set_distance(x, y));
}

double epsilon_star(const PointCloud& cloud) {
    require(!cloud.empty(), "epsilon_star: empty cloud");
    const std::size_t n = cloud.size();
    // Prim on the complete Euclidean graph.
    std::vector<double> link(n, kInf);
    std::vector<char> in_tree(n, 0);
    std::size_t u = 0;
    in_tree[0] = 1;
    double longest = 0.0;
    for (std::size_t added = 1; added < n; ++added) {
        std::size_t next = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            link[v] = std::min(link[v], euclidean_distance(cloud.point(u), cloud.point(v)));
            if (next == n || link[v] < link[next]) next = v;
        }
        longest = std::max(longest, link[next]);
        in_tree[next] = 1;
        u = next;
    }
    return longest;
}

DistanceMatrix quotient_matrix(const PointCloud& x, const PointCloud& y, double p) {
    require(!x.empty(), "quotient: X must be non-empty");
    require(std::isfinite(p) && p >= 1.0, "quotient: p must be >= 1");
    MetricTag tag{MetricKind::quotient, p};
    if (y.empty()) return DistanceMatrix(1, {}, tag);

    const PointCloud all = x.concat(y);
    const std::size_t nx = x.size();
    const std::size_t n = all.size();
    std::vector<double> weights = power_weights(all, p);
    for (std::size_t a = 0; a < nx; ++a)
        for (std::size_t b = 0; b < nx; ++b) weights[a * n + b] = 0.0;

    const std::size_t m = y.size();
    std::vector<std::vector<double>> rows(m);
    for (std::size_t i = 0; i < m; ++i) dense_dijkstra(nx + i, n, weights, n, rows[i]);
    // Every X point is at the same distance from a Y source (X-X edges are free).
    return DistanceMatrix::from_function(
        m + 1,
        [&](std::size_t a, std::size_t b) {
            const auto& row = rows[a - 1];
            return b == 0 ? row[0] : row[nx + b - 1];
        },
        tag);
}

// ---------------------------------------------------------------------------
// MDS

namespace {

Eigen::MatrixXd double_centered_gram(const DistanceMatrix& distances) {
    require(!distances.has_infinite(), "mds: distance matrix has infinite entries");
    const auto n = static_cast<Eigen::Index>(distances.size());
    Eigen::MatrixXd sq(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double d = distances(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            sq(i, j) = d * d;
        }
    Eigen::VectorXd row_mean = sq.rowwise().mean();
    double total_mean = row_mean.mean();
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) gram(i, j) = -0.5 * (sq(i, j) - row_mean(i) - row_mean(j) + total_mean);
    return gram;
}

}  // namespace

std::vector<double> mds_gram_eigenvalues(const DistanceMatrix& distances) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(double_centered_gram(distances), Eigen::EigenvaluesOnly);
    std::vector<double> values(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
    std::reverse(values.begin(), values.end());
    return values;
}

PointCloud mds_project(const DistanceMatrix& distances, std::size_t dim) {
    const std::size_t n = distances.size();
    require(n >= 2, "mds: need at least two points");
    require(dim >= 1 && dim <= n - 1, "mds: target dimension must satisfy 1 <= dim <= n - 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(double_centered_gram(distances));
    if (solver.info() != Eigen::Success) throw std::runtime_error("mds: eigendecomposition failed");
    const auto& values = solver.eigenvalues();    // ascending
    const auto& vectors = solver.eigenvectors();  // columns
    std::vector<double> coords(n * dim);
    for (std::size_t axis = 0; axis < dim; ++axis) {
        auto col = static_cast<Eigen::Index>(n - 1 - axis);
        Eigen::VectorXd v = vectors.col(col);
        double cutoff = 1e-12 * v.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (std::abs(v(i)) > cutoff) {
                if (v(i) < 0.0) v = -v;
                break;
            }
        }
        double scale = std::sqrt(std::max(values(col), 0.0));
        for (std::size_t i = 0; i < n; ++i) coords[i * dim + axis] = scale * v(static_cast<Eigen::Index>(i));
    }
    return PointCloud(dim, std::move(coords), "mds");
}

double enclosing_radius(const DistanceMatrix& distances) {
    const std::size_t n = distances.size();
    if (n <= 1) return 0.0;
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        double worst = 0.0;
        for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, distances(i, j));
        best = std::min(best, worst);
    }
    return best;
}

double sup_difference(const DistanceMatrix& a, const DistanceMatrix& b) {
    require(a.size() == b.size(), "distortion: matrices differ in size");
    double sup = 0.0;
    for (std::size_t k = 0; k < a.lower().size(); ++k) {
        double x = a.lower()[k];
        double y = b.lower()[k];
        if (x == y) continue;  // also covers matching infinities
        sup = std::max(sup, std::abs(x - y));
    }
    return sup;
}

}  // namespace fermat
