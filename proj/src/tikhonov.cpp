#include "tomosar/estimators.hpp"

#include <cmath>

#include "tomosar/error.hpp"

namespace tomosar {

const char* to_string(SolverKind kind) {
    return kind == SolverKind::tikhonov ? "tikhonov" : "l1";
}

SolverKind solver_from_string(const std::string& name) {
    if (name == "tikhonov")
        return SolverKind::tikhonov;
    if (name == "l1")
        return SolverKind::l1;
    throw InvalidArgument("unknown solver '" + name + "' (expected tikhonov or l1)");
}

SpectrumEstimate tikhonov_solve(const TomoDictionary& dictionary, const CVector& g, double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw InvalidArgument("Tikhonov delta must be positive");
    if (static_cast<std::size_t>(g.size()) != dictionary.rows())
        throw DimensionError("measurement length does not match the dictionary");

    const CMatrix& r = dictionary.matrix();
    SpectrumEstimate out;
    out.method = SolverKind::tikhonov;
    out.regularization = delta;

    const CVector rhs = r.adjoint() * g;
    CVector grad;
    if (r.rows() <= r.cols()) {
        // gamma = R^H x with (R R^H + delta I) x = g; then R gamma = (R R^H) x.
        CMatrix k = dictionary.gram();
        k.diagonal().array() += delta;
        Eigen::LLT<CMatrix> llt(k);
        if (llt.info() != Eigen::Success)
            throw RankDeficient("Tikhonov system is not positive definite");
        const CVector x = llt.solve(g);
        out.gamma = r.adjoint() * x;
        grad = r.adjoint() * (dictionary.gram() * x + delta * x - g);
    } else {
        CMatrix k = dictionary.gram();
        k.diagonal().array() += delta;
        Eigen::LLT<CMatrix> llt(k);
        if (llt.info() != Eigen::Success)
            throw RankDeficient("Tikhonov system is not positive definite");
        out.gamma = llt.solve(rhs);
        grad = dictionary.gram() * out.gamma + delta * out.gamma - rhs;
    }

    const double scale = rhs.norm();
    out.certificate = scale > 0.0 ? grad.norm() / scale : grad.norm();
    return out;
}

} // namespace tomosar
