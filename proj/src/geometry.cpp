#include "fermat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fermat/metric.hpp"
#include "fermat/random.hpp"

namespace fermat {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords, std::string generator,
                       std::uint64_t seed)
    : dim_(dim), coords_(std::move(coords)), generator_(std::move(generator)), seed_(seed) {
    require(dim_ > 0 || coords_.empty(), "point cloud: dimension must be positive");
    require(dim_ == 0 || coords_.size() % dim_ == 0, "point cloud: ragged coordinates");
    require(std::all_of(coords_.begin(), coords_.end(), finite),
            "point cloud: coordinates must be finite");
}

PointCloud PointCloud::concat(const PointCloud& other) const {
    if (other.empty()) return *this;
    if (empty()) return other;
    require(dim_ == other.dim_, "point cloud: dimension mismatch in concat");
    std::vector<double> coords = coords_;
    coords.insert(coords.end(), other.coords_.begin(), other.coords_.end());
    return PointCloud(dim_, std::move(coords), generator_, seed_);
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
    std::vector<double> coords;
    coords.reserve(indices.size() * dim_);
    for (std::size_t i : indices) {
        require(i < size(), "point cloud: subset index out of range");
        auto p = point(i);
        coords.insert(coords.end(), p.begin(), p.end());
    }
    return PointCloud(dim_, std::move(coords), generator_, seed_);
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double d = a[k] - b[k];
        sum += d * d;
    }
    return std::sqrt(sum);
}

void TimeSeries::validate() const {
    require(dt > 0.0 && std::isfinite(dt), "time series: dt must be positive and finite");
    require(std::all_of(values.begin(), values.end(), finite),
            "time series: values must be finite");
}

// ---------------------------------------------------------------------------
// Eyeglasses

EyeglassesCurve::EyeglassesCurve(Params params) : params_(params) {
    require(finite(params.reach) && params.reach > 0.0 && params.reach < 1.0,
            "eyeglasses: reach must lie in (0, 1)");
    require(finite(params.neck_length) && params.neck_length >= 0.0,
            "eyeglasses: neck length must be non-negative");

    const double rho = params.reach;  // fillet radius
    const double h = params.reach;    // half neck gap
    const double a = 0.5 * params.neck_length;
    const double fy = h + rho;  // fillet centre height
    lens_center_ = a + std::sqrt((1.0 + rho) * (1.0 + rho) - fy * fy);
    const double c = lens_center_;

    // Direction from the top-right fillet centre to the right lens centre.
    const double phi = std::atan2(-fy, c - a);  // in (-pi/2, 0)
    const double fillet_sweep = 0.5 * kPi + phi;
    const double lens_sweep = 2.0 * kPi + 2.0 * phi;

    auto arc = [](std::array<double, 2> centre, double radius, double angle0, double sweep) {
        return Piece{true, centre, {}, radius, angle0, sweep, radius * std::abs(sweep)};
    };
    auto segment = [](std::array<double, 2> from, std::array<double, 2> to) {
        return Piece{false, from, to, 0.0, 0.0, 0.0, std::hypot(to[0] - from[0], to[1] - from[1])};
    };

    pieces_ = {
        segment({-a, h}, {a, h}),
        arc({a, fy}, rho, -0.5 * kPi, fillet_sweep),
        arc({c, 0.0}, 1.0, kPi + phi, -lens_sweep),
        arc({a, -fy}, rho, -phi, fillet_sweep),
        segment({a, -h}, {-a, -h}),
        arc({-a, -fy}, rho, 0.5 * kPi, fillet_sweep),
        arc({-c, 0.0}, 1.0, phi, -lens_sweep),
        arc({-a, fy}, rho, -kPi - phi, fillet_sweep),
    };
    total_length_ = 0.0;
    for (const auto& piece : pieces_) total_length_ += piece.length;
}

std::array<double, 2> EyeglassesCurve::point_at(double s) const {
    s = std::fmod(s, total_length_);
    if (s < 0.0) s += total_length_;
    for (const auto& piece : pieces_) {
        if (s <= piece.length || &piece == &pieces_.back()) {
            double t = piece.length > 0.0 ? std::min(s / piece.length, 1.0) : 0.0;
            if (piece.is_arc) {
                double angle = piece.angle0 + piece.sweep * t;
                return {piece.a[0] + piece.radius * std::cos(angle),
                        piece.a[1] + piece.radius * std::sin(angle)};
            }
            return {piece.a[0] + t * (piece.b[0] - piece.a[0]), piece.a[1] + t * (piece.b[1] - piece.a[1])};
        }
        s -= piece.length;
    }
    return {};  // unreachable
}

double EyeglassesCurve::distance_to(std::array<double, 2> q) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& piece : pieces_) {
        if (piece.is_arc) {
            double dx = q[0] - piece.a[0];
            double dy = q[1] - piece.a[1];
            double offset = std::atan2(dy, dx) - piece.angle0;
            if (piece.sweep < 0.0) offset = -offset;
            offset = std::fmod(offset, 2.0 * kPi);
            if (offset < 0.0) offset += 2.0 * kPi;
            if (offset <= std::abs(piece.sweep)) {
                best = std::min(best, std::abs(std::hypot(dx, dy) - piece.radius));
            } else {
                for (double angle : {piece.angle0, piece.angle0 + piece.sweep}) {
                    best = std::min(best, std::hypot(q[0] - piece.a[0] - piece.radius * std::cos(angle),
                                                     q[1] - piece.a[1] - piece.radius * std::sin(angle)));
                }
            }
        } else {
            double ux = piece.b[0] - piece.a[0];
            double uy = piece.b[1] - piece.a[1];
            double len2 = ux * ux + uy * uy;
            double t = len2 > 0.0 ? ((q[0] - piece.a[0]) * ux + (q[1] - piece.a[1]) * uy) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            best = std::min(best, std::hypot(q[0] - piece.a[0] - t * ux, q[1] - piece.a[1] - t * uy));
        }
    }
    return best;
}

PointCloud gen_eyeglasses(std::size_t n, double noise_sd, std::uint64_t seed,
                          EyeglassesCurve::Params shape) {
    require(n >= 10, "eyeglasses: need n >= 10");
    require(finite(noise_sd) && noise_sd >= 0.0, "eyeglasses: noise_sd must be finite and >= 0");
    EyeglassesCurve curve(shape);
    Rng rng(seed);
    std::vector<double> coords;
    coords.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        auto p = curve.point_at(rng.uniform() * curve.length());
        coords.push_back(p[0]);
        coords.push_back(p[1]);
    }
    if (noise_sd > 0.0) {
        for (double& x : coords) x += rng.normal(0.0, noise_sd);
    }
    return PointCloud(2, std::move(coords), "eyeglasses", seed);
}

// ---------------------------------------------------------------------------
// Trefoil

std::array<double, 3> trefoil_point(double t) {
    return {std::sin(t) + 2.0 * std::sin(2.0 * t), std::cos(t) - 2.0 * std::cos(2.0 * t), -std::sin(3.0 * t)};
}

PointCloud gen_trefoil(std::size_t n, double noise_sd, std::uint64_t seed) {
    require(n >= 10, "trefoil: need n >= 10");
    require(finite(noise_sd) && noise_sd >= 0.0, "trefoil: noise_sd must be finite and >= 0");
    Rng rng(seed);
    std::vector<double> coords;
    coords.reserve(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        for (double x : trefoil_point(t)) coords.push_back(noise_sd > 0.0 ? x + rng.normal(0.0, noise_sd) : x);
    }
    return PointCloud(3, std::move(coords), "trefoil", seed);
}

// ---------------------------------------------------------------------------
// Outliers

PointCloud gen_outliers(const PointCloud& cloud, std::size_t m, double min_gap, std::uint64_t seed,
                        OutlierOptions options) {
    require(!cloud.empty(), "outliers: empty base cloud");
    require(m >= 1, "outliers: need m >= 1");
    require(finite(min_gap) && min_gap > 0.0, "outliers: min_gap must be positive");
    require(options.box_inflation >= 0.0, "outliers: box inflation must be >= 0");

    const std::size_t dim = cloud.dim();
    std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto p = cloud.point(i);
        for (std::size_t k = 0; k < dim; ++k) {
            lo[k] = std::min(lo[k], p[k]);
            hi[k] = std::max(hi[k], p[k]);
        }
    }
    for (std::size_t k = 0; k < dim; ++k) {
        double mid = 0.5 * (lo[k] + hi[k]);
        double half = 0.5 * (hi[k] - lo[k]) * (1.0 + options.box_inflation);
        lo[k] = mid - half;
        hi[k] = mid + half;
    }

    Rng rng(seed);
    std::vector<double> accepted;
    std::vector<double> candidate(dim);
    std::size_t attempts = 0;
    while (accepted.size() < m * dim) {
        if (attempts++ >= options.max_attempts) {
            throw OutlierPlacementError("cannot place outliers: attempt budget exhausted after " +
                                        std::to_string(accepted.size() / dim) + " of " + std::to_string(m));
        }
        for (std::size_t k = 0; k < dim; ++k) candidate[k] = rng.uniform(lo[k], hi[k]);
        bool ok = true;
        for (std::size_t i = 0; ok && i < cloud.size(); ++i) ok = euclidean_distance(cloud.point(i), candidate) >= min_gap;
        for (std::size_t j = 0; ok && j < accepted.size(); j += dim)
            ok = euclidean_distance({accepted.data() + j, dim}, candidate) >= min_gap;
        if (ok) accepted.insert(accepted.end(), candidate.begin(), candidate.end());
    }
    PointCloud outliers(dim, std::move(accepted), "outliers", seed);
    // Re-verify through the metric module's definitions.
    if (outlier_delta(cloud, outliers) < min_gap) throw OutlierPlacementError("cannot place outliers: gap check failed");
    return outliers;
}

// ---------------------------------------------------------------------------
// Lorenz

namespace {

using State = std::array<double, 3>;

State lorenz_rhs(const State& v, const LorenzParams& p) {
    return {p.sigma * (v[1] - v[0]), v[0] * (p.rho - v[2]) - v[1], v[0] * v[1] - p.beta * v[2]};
}

State axpy(const State& x, double a, const State& k) { return {x[0] + a * k[0], x[1] + a * k[1], x[2] + a * k[2]}; }

State rk4_step(const State& v, double h, const LorenzParams& p) {
    State k1 = lorenz_rhs(v, p);
    State k2 = lorenz_rhs(axpy(v, 0.5 * h, k1), p);
    State k3 = lorenz_rhs(axpy(v, 0.5 * h, k2), p);
    State k4 = lorenz_rhs(axpy(v, h, k3), p);
    State out;
    for (int i = 0; i < 3; ++i) out[i] = v[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace

std::vector<std::array<double, 3>> lorenz_states(double t_max, double dt, const LorenzParams& params) {
    require(finite(dt) && dt > 0.0, "lorenz: dt must be positive");
    require(finite(t_max) && t_max >= dt, "lorenz: t_max must be at least dt");
    for (double x : params.x0) require(finite(x), "lorenz: initial state must be finite");
    auto steps = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
    std::vector<State> states;
    states.reserve(steps);
    State v = params.x0;
    for (std::size_t i = 0; i < steps; ++i) {
        v = rk4_step(v, dt, params);
        if (!finite(v[0]) || !finite(v[1]) || !finite(v[2]))
            throw std::runtime_error("lorenz: trajectory diverged (non-finite state)");
        states.push_back(v);
    }
    return states;
}

TimeSeries lorenz_series(double t_max, double dt, const LorenzParams& params, double noise_sd,
                         std::uint64_t seed) {
    require(finite(noise_sd) && noise_sd >= 0.0, "lorenz: noise_sd must be finite and >= 0");
    auto states = lorenz_states(t_max, dt, params);
    Rng rng(seed);
    TimeSeries ts;
    ts.dt = dt;
    ts.values.reserve(states.size());
    for (const auto& s : states) ts.values.push_back(noise_sd > 0.0 ? s[0] + rng.normal(0.0, noise_sd) : s[0]);
    return ts;
}

TimeSeries sine_switch_series(std::size_t n, double period, std::size_t switch_at, double noise_sd,
                              std::uint64_t seed, double dt) {
    require(n >= 2, "sine switch: need at least two samples");
    require(finite(period) && period > 0.0, "sine switch: period must be positive");
    require(finite(noise_sd) && noise_sd >= 0.0, "sine switch: noise_sd must be finite and >= 0");
    Rng rng(seed);
    TimeSeries ts;
    ts.dt = dt;
    ts.values.reserve(n);
    double phase = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = std::sin(phase);
        ts.values.push_back(noise_sd > 0.0 ? v + rng.normal(0.0, noise_sd) : v);
        phase += (i < switch_at ? 2.0 : 4.0) * std::numbers::pi / period;
    }
    ts.validate();
    return ts;
}

// ---------------------------------------------------------------------------
// Uniform manifolds

ManifoldKind parse_manifold_kind(const std::string& name) {
    if (name == "circle") return ManifoldKind::circle;
    if (name == "sphere") return ManifoldKind::sphere;
    if (name == "flat_torus" || name == "torus") return ManifoldKind::flat_torus;
    throw std::invalid_argument("unknown manifold kind: " + name);
}

std::string to_string(ManifoldKind kind) {
    switch (kind) {
        case ManifoldKind::circle: return "circle";
        case ManifoldKind::sphere: return "sphere";
        case ManifoldKind::flat_torus: return "flat_torus";
    }
    return "?";
}

PointCloud gen_uniform_manifold(ManifoldKind kind, std::size_t n, double noise_sd, std::uint64_t seed) {
    require(n >= 1, "manifold: need n >= 1");
    require(finite(noise_sd) && noise_sd >= 0.0, "manifold: noise_sd must be finite and >= 0");
    Rng rng(seed);
    std::size_t dim = kind == ManifoldKind::circle ? 2 : kind == ManifoldKind::sphere ? 3 : 4;
    std::vector<double> coords;
    coords.reserve(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
        switch (kind) {
            case ManifoldKind::circle: {
                double t = 2.0 * kPi * rng.uniform();
                coords.insert(coords.end(), {std::cos(t), std::sin(t)});
                break;
            }
            case ManifoldKind::sphere: {
                double x, y, z, r;
                do {
                    x = rng.normal();
                    y = rng.normal();
                    z = rng.normal();
                    r = std::sqrt(x * x + y * y + z * z);
                } while (r < 1e-12);
                coords.insert(coords.end(), {x / r, y / r, z / r});
                break;
            }
            case ManifoldKind::flat_torus: {
                double s = 2.0 * kPi * rng.uniform();
                double t = 2.0 * kPi * rng.uniform();
                coords.insert(coords.end(), {std::cos(s), std::sin(s), std::cos(t), std::sin(t)});
                break;
            }
        }
    }
    if (noise_sd > 0.0) {
        for (double& x : coords) x += rng.normal(0.0, noise_sd);
    }
    return PointCloud(dim, std::move(coords), to_string(kind), seed);
}

namespace {

double planar_angle(double ax, double ay, double bx, double by) {
    return std::atan2(std::abs(ax * by - ay * bx), ax * bx + ay * by);
}

}  // namespace

double manifold_geodesic(ManifoldKind kind, std::span<const double> a, std::span<const double> b) {
    switch (kind) {
        case ManifoldKind::circle: return planar_angle(a[0], a[1], b[0], b[1]);
        case ManifoldKind::sphere: {
            double cx = a[1] * b[2] - a[2] * b[1];
            double cy = a[2] * b[0] - a[0] * b[2];
            double cz = a[0] * b[1] - a[1] * b[0];
            return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
        }
        case ManifoldKind::flat_torus: {
            double u = planar_angle(a[0], a[1], b[0], b[1]);
            double v = planar_angle(a[2], a[3], b[2], b[3]);
            return std::hypot(u, v);
        }
    }
    return 0.0;
}

double manifold_diameter(ManifoldKind kind) {
    return kind == ManifoldKind::flat_torus ? kPi * std::numbers::sqrt2 : kPi;
}

double manifold_volume(ManifoldKind kind) {
    switch (kind) {
        case ManifoldKind::circle: return 2.0 * kPi;
        case ManifoldKind::sphere: return 4.0 * kPi;
        case ManifoldKind::flat_torus: return 4.0 * kPi * kPi;
    }
    return 0.0;
}

int manifold_dimension(ManifoldKind kind) { return kind == ManifoldKind::circle ? 1 : 2; }

}  // namespace fermat
