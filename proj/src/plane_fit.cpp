#include "tomosar/plane_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "tomosar/error.hpp"

namespace tomosar {

void PointCloud3D::validate() const {
    if (x.size() != z.size() || y.size() != z.size())
        throw InvalidArgument("point cloud coordinate vectors differ in length");
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]) || !std::isfinite(z[i]))
            throw InvalidArgument("point " + std::to_string(i) + " has a non-finite coordinate");
    }
}

std::vector<double> soft_threshold(std::span<const double> w, double lambda) {
    if (!(lambda >= 0.0))
        throw InvalidArgument("soft-threshold lambda must be nonnegative");
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        out[i] = std::max(w[i] - lambda, 0.0) - std::max(-w[i] - lambda, 0.0);
    return out;
}

FittedPlane fit_plane_l1(const PointCloud3D& cloud, const AdmmOptions& options) {
    cloud.validate();
    const std::size_t m = cloud.size();
    if (m < 3)
        throw InvalidArgument("plane fitting needs at least 3 points");
    if (!(options.rho > 0.0))
        throw InvalidArgument("ADMM penalty rho must be positive");

    // Working in centered planar coordinates spans the same column space as [x y 1],
    // so the z and y iterates are exactly those of the uncentered problem.
    const auto rows = static_cast<Eigen::Index>(m);
    const Eigen::Map<const Eigen::VectorXd> xs(cloud.x.data(), rows);
    const Eigen::Map<const Eigen::VectorXd> ys(cloud.y.data(), rows);
    const Eigen::Map<const Eigen::VectorXd> zs(cloud.z.data(), rows);
    const double x_mean = xs.mean();
    const double y_mean = ys.mean();
    Eigen::MatrixXd a(rows, 3);
    a.col(0) = xs.array() - x_mean;
    a.col(1) = ys.array() - y_mean;
    a.col(2).setOnes();
    const Eigen::VectorXd b = -zs;

    const Eigen::Matrix3d ata = a.transpose() * a;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> planar(ata.topLeftCorner<2, 2>());
    if (!(planar.eigenvalues()(0) > 1e-12 * planar.eigenvalues()(1)))
        throw RankDeficient("planar coordinates are collinear; the plane is not identifiable");
    const Eigen::LLT<Eigen::Matrix3d> factor(ata);

    const double rho = options.rho;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(rows);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(rows);
    Eigen::VectorXd z_prev(rows);
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    Eigen::VectorXd ax(rows);
    const double b_norm = b.norm();
    const double sqrt_m = std::sqrt(static_cast<double>(m));

    FittedPlane plane;
    for (int it = 1; it <= options.max_iter; ++it) {
        x = factor.solve(a.transpose() * (b + z - y / rho));
        ax = a * x;
        z_prev = z;
        const Eigen::VectorXd w = ax - b + y / rho;
        const auto shrunk = soft_threshold(std::span<const double>(w.data(), m), 1.0 / rho);
        z = Eigen::Map<const Eigen::VectorXd>(shrunk.data(), rows);
        const Eigen::VectorXd r = ax - b - z;
        y += rho * r;

        const double primal = r.norm();
        const double dual = rho * (a.transpose() * (z - z_prev)).norm();
        const double eps_primal =
            sqrt_m * options.abs_tol + options.rel_tol * std::max({ax.norm(), z.norm(), b_norm});
        const double eps_dual =
            std::sqrt(3.0) * options.abs_tol + options.rel_tol * (a.transpose() * y).norm();
        plane.iterations = it;
        plane.primal_residual = primal;
        plane.dual_residual = dual;
        if (primal <= eps_primal && dual <= eps_dual)
            break;
        if (it == options.max_iter)
            throw ConvergenceError("ADMM plane fit did not converge", it, std::max(primal, dual));
    }

    plane.a = x[0];
    plane.b = x[1];
    plane.d = x[2] - x[0] * x_mean - x[1] * y_mean;
    plane.final_residual = (a * x - b).lpNorm<1>();
    return plane;
}

std::vector<double> vertical_residuals(const PointCloud3D& cloud, const FittedPlane& plane) {
    cloud.validate();
    std::vector<double> out(cloud.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = plane.a * cloud.x[i] + plane.b * cloud.y[i] + plane.d + cloud.z[i];
    return out;
}

std::vector<double> signed_distances(const PointCloud3D& cloud, const FittedPlane& plane) {
    const auto n = plane.normal();
    const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    auto out = vertical_residuals(cloud, plane);
    for (auto& v : out)
        v /= norm;
    return out;
}

} // namespace tomosar
