#include "tomosar/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tomosar/error.hpp"

namespace tomosar {

namespace {

double l1_norm(const CVector& x) {
    double acc = 0.0;
    for (const auto& v : x)
        acc += std::abs(v);
    return acc;
}

// Complex soft thresholding: shrinks each modulus by `threshold`, keeps the phase.
void shrink(CVector& x, double threshold) {
    for (auto& v : x) {
        const double mag = std::abs(v);
        v = mag > threshold ? v * ((mag - threshold) / mag) : cdouble{0.0, 0.0};
    }
}

double spectral_norm_squared(const CMatrix& r) {
    const CMatrix gram = r.rows() <= r.cols() ? CMatrix(r * r.adjoint()) : CMatrix(r.adjoint() * r);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
}

} // namespace

double l1_objective(const CMatrix& r, const CVector& g, const CVector& gamma, double epsilon) {
    return (r * gamma - g).squaredNorm() + epsilon * l1_norm(gamma);
}

double l1_duality_gap(const CMatrix& r, const CVector& g, const CVector& gamma, double epsilon) {
    const CVector residual = g - r * gamma;
    const double primal = residual.squaredNorm() + epsilon * l1_norm(gamma);
    const double corr = (r.adjoint() * residual).cwiseAbs().maxCoeff();
    const double scale = corr > 0.0 ? std::min(1.0, epsilon / (2.0 * corr)) : 1.0;
    const CVector u = scale * residual;
    const double dual = -u.squaredNorm() + 2.0 * u.dot(g).real();
    return std::max(0.0, primal - dual);
}

SpectrumEstimate l1_solve(const TomoDictionary& dictionary, const CVector& g, double epsilon,
                          double tol, int max_iter) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw InvalidArgument("l1 epsilon must be positive");
    if (!(tol > 0.0))
        throw InvalidArgument("l1 tolerance must be positive");
    if (max_iter < 1)
        throw InvalidArgument("l1 max_iter must be at least 1");
    if (static_cast<std::size_t>(g.size()) != dictionary.rows())
        throw DimensionError("measurement length does not match the dictionary");

    const CMatrix& r = dictionary.matrix();
    SpectrumEstimate out;
    out.method = SolverKind::l1;
    out.regularization = epsilon;
    out.gamma = CVector::Zero(r.cols());

    const CVector rhs = r.adjoint() * g;
    // gamma = 0 is optimal iff every correlation is within epsilon / 2.
    if (rhs.size() == 0 || rhs.cwiseAbs().maxCoeff() <= epsilon / 2.0) {
        out.certificate = 0.0;
        return out;
    }

    const double step = 1.0 / (2.0 * spectral_norm_squared(r));
    const auto gradient = [&](const CVector& at) -> CVector {
        return 2.0 * (r.adjoint() * (r * at - g));
    };

    CVector x = out.gamma;
    CVector x_prev = x;
    CVector y = x;
    double momentum = 1.0;
    double objective = l1_objective(r, g, x, epsilon);
    constexpr int check_every = 10;

    for (int it = 1; it <= max_iter; ++it) {
        x_prev = x;
        x = y - step * gradient(y);
        shrink(x, step * epsilon);

        const double next_objective = l1_objective(r, g, x, epsilon);
        if (next_objective > objective) {
            // adaptive restart: drop the momentum and take a plain proximal step
            momentum = 1.0;
            x = x_prev - step * gradient(x_prev);
            shrink(x, step * epsilon);
            y = x;
            objective = l1_objective(r, g, x, epsilon);
        } else {
            const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
            y = x + ((momentum - 1.0) / next_momentum) * (x - x_prev);
            momentum = next_momentum;
            objective = next_objective;
        }

        if (it % check_every == 0 || it == max_iter) {
            const double gap = l1_duality_gap(r, g, x, epsilon);
            const double rel = gap / std::max(objective, std::numeric_limits<double>::min());
            out.iterations = it;
            out.certificate = rel;
            if (rel <= tol) {
                out.gamma = std::move(x);
                return out;
            }
        }
    }
    throw ConvergenceError("l1 solver did not reach the requested duality gap", max_iter,
                           out.certificate);
}

} // namespace tomosar
