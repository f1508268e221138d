#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fermat {

/// n points in R^D stored row-major. Every point has exactly `dim` finite
/// coordinates.
class PointCloud {
public:
    PointCloud() = default;
    PointCloud(std::size_t dim, std::vector<double> coords, std::string generator = {},
               std::uint64_t seed = 0);

    std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    std::size_t dim() const { return dim_; }
    bool empty() const { return coords_.empty(); }

    std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
    const std::vector<double>& coords() const { return coords_; }

    const std::string& generator() const { return generator_; }
    std::uint64_t seed() const { return seed_; }

    /// Points of `this` followed by the points of `other`; same dimension required.
    PointCloud concat(const PointCloud& other) const;
    PointCloud subset(std::span<const std::size_t> indices) const;

    friend bool operator==(const PointCloud& a, const PointCloud& b) {
        return a.dim_ == b.dim_ && a.coords_ == b.coords_;
    }

private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
    std::string generator_;
    std::uint64_t seed_ = 0;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Uniformly sampled scalar signal.
struct TimeSeries {
    std::vector<double> values;
    double dt = 1.0;

    void validate() const;
};

/// Closed planar "eyeglasses" curve: two unit lenses centred at (+-c, 0)
/// joined by a neck made of two horizontal segments at y = +-reach. Each
/// segment meets a lens through a fillet arc of radius `reach`, so the curve
/// is C1 and its reach is exactly `reach` (attained at the fillets and
/// across the neck, whose width is 2 * reach).
class EyeglassesCurve {
public:
    struct Params {
        double reach = 0.5;
        double neck_length = 1.0;  // length of each straight neck segment
    };

    explicit EyeglassesCurve(Params params);
    EyeglassesCurve() : EyeglassesCurve(Params{}) {}

    double length() const { return total_length_; }
    double lens_center() const { return lens_center_; }
    double neck_gap() const { return 2.0 * params_.reach; }
    const Params& params() const { return params_; }

    /// Point at arclength s, taken modulo length().
    std::array<double, 2> point_at(double s) const;
    /// Euclidean distance from q to the curve.
    double distance_to(std::array<double, 2> q) const;

private:
    struct Piece {
        bool is_arc;
        std::array<double, 2> a;  // arc centre, or segment start
        std::array<double, 2> b;  // segment end (unused for arcs)
        double radius;
        double angle0;  // arc start angle
        double sweep;   // signed sweep in radians
        double length;
    };

    Params params_;
    double lens_center_ = 0.0;
    double total_length_ = 0.0;
    std::vector<Piece> pieces_;
};

PointCloud gen_eyeglasses(std::size_t n, double noise_sd, std::uint64_t seed,
                          EyeglassesCurve::Params shape = {});

/// Trefoil knot (sin t + 2 sin 2t, cos t - 2 cos 2t, -sin 3t).
std::array<double, 3> trefoil_point(double t);

/// n points at equally spaced parameters t_i = 2 pi i / n plus isotropic noise.
PointCloud gen_trefoil(std::size_t n, double noise_sd, std::uint64_t seed);

struct OutlierOptions {
    std::size_t max_attempts = 1'000'000;  // total rejection-sampling budget
    double box_inflation = 0.25;           // bounding box is scaled by 1 + inflation
};

/// m points inside the inflated bounding box of `cloud` whose minimal spacing
/// and distance to `cloud` are both at least min_gap. Throws
/// OutlierPlacementError when the attempt budget runs out.
PointCloud gen_outliers(const PointCloud& cloud, std::size_t m, double min_gap, std::uint64_t seed,
                        OutlierOptions options = {});

class OutlierPlacementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LorenzParams {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    std::array<double, 3> x0{1.0, 1.0, 1.0};
};

/// States after steps 1..N of fixed-step RK4, N = floor(t_max / dt).
std::vector<std::array<double, 3>> lorenz_states(double t_max, double dt, const LorenzParams& params);

/// x-coordinate of the RK4 trajectory with additive N(0, noise_sd^2) noise.
TimeSeries lorenz_series(double t_max, double dt, const LorenzParams& params, double noise_sd,
                         std::uint64_t seed);

/// Sine of period `period` (in samples) that switches to twice the frequency
/// at sample `switch_at`, with continuous phase, plus N(0, noise_sd^2) noise.
TimeSeries sine_switch_series(std::size_t n, double period, std::size_t switch_at, double noise_sd,
                              std::uint64_t seed, double dt = 1.0);

enum class ManifoldKind { circle, sphere, flat_torus };

ManifoldKind parse_manifold_kind(const std::string& name);
std::string to_string(ManifoldKind kind);

/// Uniform sample w.r.t. the volume measure of the unit circle in R^2, the
/// unit sphere in R^3, or the flat torus S^1 x S^1 in R^4.
PointCloud gen_uniform_manifold(ManifoldKind kind, std::size_t n, double noise_sd, std::uint64_t seed);

/// Intrinsic (geodesic) distance on the noiseless manifold between two of its points.
double manifold_geodesic(ManifoldKind kind, std::span<const double> a, std::span<const double> b);
double manifold_diameter(ManifoldKind kind);
double manifold_volume(ManifoldKind kind);
int manifold_dimension(ManifoldKind kind);

}  // namespace fermat
