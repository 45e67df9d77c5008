#pragma once

#include <array>
#include <span>
#include <vector>

namespace tomosar {

/// Planar coordinates and heights of m points, in meters.
struct PointCloud3D {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> z;

    std::size_t size() const noexcept { return z.size(); }
    /// Throws InvalidArgument on unequal lengths or non-finite coordinates.
    void validate() const;
};

/// Plane a x + b y + z + d = 0 (the z coefficient is fixed to 1).
struct FittedPlane {
    double a = 0.0;
    double b = 0.0;
    double d = 0.0;
    int iterations = 0;
    double final_residual = 0.0; // sum_i |a x_i + b y_i + d + z_i|
    double primal_residual = 0.0;
    double dual_residual = 0.0;

    std::array<double, 3> normal() const noexcept { return {a, b, 1.0}; }
};

struct AdmmOptions {
    double rho = 1.0;
    double abs_tol = 1e-8; // scaled by sqrt(m) (primal) and sqrt(3) (dual)
    double rel_tol = 1e-6;
    int max_iter = 200000;
};

/// (w - lambda)_+ - (-w - lambda)_+ elementwise.
std::vector<double> soft_threshold(std::span<const double> w, double lambda);

/// Least-absolute-deviation plane: minimizes ||A x - b||_1 with A = [x y 1], b = -z,
/// by ADMM with a cached factorization of A^T A.
///
/// Throws RankDeficient when the planar coordinates are collinear and
/// ConvergenceError when the residual test is not met within max_iter.
FittedPlane fit_plane_l1(const PointCloud3D& cloud, const AdmmOptions& options = {});

/// a x_i + b y_i + d + z_i, the height misfit along z.
std::vector<double> vertical_residuals(const PointCloud3D& cloud, const FittedPlane& plane);

/// Vertical residuals divided by ||n||_2: the signed Euclidean distance to the plane.
std::vector<double> signed_distances(const PointCloud3D& cloud, const FittedPlane& plane);

} // namespace tomosar
