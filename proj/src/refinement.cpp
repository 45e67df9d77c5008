#include "tomosar/estimators.hpp"

#include <cmath>
#include <numbers>

#include "tomosar/error.hpp"

namespace tomosar {

namespace {

struct LocalAxis {
    std::vector<double> samples;
    bool truncated = false;
};

// Samples spanning one coarse cell on each side of axis[index] at `factor` times the
// coarse density. A side that would leave the axis is dropped.
LocalAxis local_axis(std::span<const double> axis, std::size_t index, int factor) {
    LocalAxis out;
    const double center = axis[index];
    if (axis.size() == 1) {
        out.samples = {center};
        return out;
    }
    const bool has_lower = index > 0;
    const bool has_upper = index + 1 < axis.size();
    out.truncated = !has_lower || !has_upper;
    if (has_lower) {
        const double step = (center - axis[index - 1]) / factor;
        for (int k = factor; k >= 1; --k)
            out.samples.push_back(center - k * step);
    }
    out.samples.push_back(center);
    if (has_upper) {
        const double step = (axis[index + 1] - center) / factor;
        for (int k = 1; k <= factor; ++k)
            out.samples.push_back(center + k * step);
    }
    return out;
}

// exp(-i c_n x) for every sample x, laid out one column per sample.
CMatrix phasor_table(const RVector& coeff, const std::vector<double>& samples) {
    CMatrix table(coeff.size(), static_cast<Eigen::Index>(samples.size()));
    for (Eigen::Index p = 0; p < table.cols(); ++p)
        for (Eigen::Index n = 0; n < table.rows(); ++n)
            table(n, p) = std::polar(1.0, -coeff[n] * samples[static_cast<std::size_t>(p)]);
    return table;
}

CVector refined_steering(const StackGeometry& geometry, const ElevationMotionGrid& grid,
                         const ScattererEstimate& e) {
    return steering_vector(geometry, {e.s, e.v, e.a}, grid.seasonal());
}

void refit_amplitudes(const StackGeometry& geometry, const ElevationMotionGrid& grid,
                      const CVector& g, std::vector<ScattererEstimate>& estimates) {
    const auto k = static_cast<Eigen::Index>(estimates.size());
    CMatrix basis(g.size(), k);
    for (Eigen::Index c = 0; c < k; ++c)
        basis.col(c) = refined_steering(geometry, grid, estimates[static_cast<std::size_t>(c)]);
    const CMatrix gram = basis.adjoint() * basis;
    Eigen::LDLT<CMatrix> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().real().minCoeff() <= 1e-10 * gram.diagonal().real().maxCoeff())
        return;
    const CVector amp = ldlt.solve(basis.adjoint() * g);
    for (Eigen::Index c = 0; c < k; ++c) {
        auto& e = estimates[static_cast<std::size_t>(c)];
        e.complex_amplitude = amp[c];
        e.amplitude = std::abs(amp[c]);
    }
}

} // namespace

ScattererEstimate offgrid_refine(const StackGeometry& geometry, const ElevationMotionGrid& grid,
                                 const CVector& g_residual, const ScattererEstimate& coarse,
                                 int factor) {
    if (factor < 2)
        throw InvalidArgument("oversampling factor must be at least 2");
    if (static_cast<std::size_t>(g_residual.size()) != geometry.size())
        throw DimensionError("measurement length does not match the geometry");
    if (coarse.column >= grid.size())
        throw InvalidArgument("coarse estimate column outside the grid");
    const GridPoint node = grid.point(coarse.column);
    if (node.s != coarse.s || node.v != coarse.v || node.a != coarse.a)
        throw InvalidArgument("coarse estimate does not lie on its grid node");

    const auto [i, j, k] = grid.axis_indices(coarse.column);
    const LocalAxis s_local = local_axis(grid.s_axis(), i, factor);
    const LocalAxis v_local = local_axis(grid.v_axis(), j, factor);
    const LocalAxis a_local = local_axis(grid.a_axis(), k, factor);

    // phase_n = 2 pi (xi_n s + 2 d_n / lambda) separates into s, v and a terms.
    const auto n_rows = static_cast<Eigen::Index>(geometry.size());
    RVector cs(n_rows), cv(n_rows), ca(n_rows);
    const double two_pi = 2.0 * std::numbers::pi;
    for (Eigen::Index n = 0; n < n_rows; ++n) {
        const auto idx = static_cast<std::size_t>(n);
        const double t = geometry.temporal_baselines()[idx];
        const double per_mm = two_pi * 2.0 * 1e-3 / geometry.wavelength();
        cs[n] = two_pi * geometry.elevation_frequency(idx);
        cv[n] = per_mm * displacement({1.0, 0.0}, t, grid.seasonal());
        ca[n] = per_mm * displacement({0.0, 1.0}, t, grid.seasonal());
    }
    const CMatrix es = phasor_table(cs, s_local.samples);
    const CMatrix ev = phasor_table(cv, v_local.samples);
    const CMatrix ea = phasor_table(ca, a_local.samples);

    double best = -1.0;
    ScattererEstimate out = coarse;
    CVector h(n_rows);
    for (std::size_t r = 0; r < a_local.samples.size(); ++r) {
        for (std::size_t q = 0; q < v_local.samples.size(); ++q) {
            // h_n = conj(motion phasor) * g_n, so the s sweep is a single correlation.
            h = (ev.col(static_cast<Eigen::Index>(q)).cwiseProduct(ea.col(static_cast<Eigen::Index>(r))))
                    .conjugate()
                    .cwiseProduct(g_residual);
            for (std::size_t p = 0; p < s_local.samples.size(); ++p) {
                const cdouble corr = es.col(static_cast<Eigen::Index>(p)).dot(h);
                const double mag = std::abs(corr);
                if (mag > best) {
                    best = mag;
                    out.s = s_local.samples[p];
                    out.v = v_local.samples[q];
                    out.a = a_local.samples[r];
                    out.complex_amplitude = corr / static_cast<double>(n_rows);
                }
            }
        }
    }
    out.amplitude = std::abs(out.complex_amplitude);
    out.truncated = s_local.truncated || v_local.truncated || a_local.truncated;
    return out;
}

PixelResult refine_pixel(const StackGeometry& geometry, const ElevationMotionGrid& grid,
                         const CVector& g, PixelResult result, int factor, int rounds) {
    auto& est = result.estimates;
    if (est.empty())
        return result;
    if (est.size() == 1) {
        est[0] = offgrid_refine(geometry, grid, g, est[0], factor);
        return result;
    }
    const std::vector<ScattererEstimate> coarse = est;
    for (int round = 0; round < std::max(rounds, 1); ++round) {
        for (std::size_t k = 0; k < est.size(); ++k) {
            CVector residual = g;
            for (std::size_t o = 0; o < est.size(); ++o) {
                if (o != k)
                    residual -= est[o].complex_amplitude * refined_steering(geometry, grid, est[o]);
            }
            est[k] = offgrid_refine(geometry, grid, residual, coarse[k], factor);
        }
        refit_amplitudes(geometry, grid, g, est);
    }
    return result;
}

} // namespace tomosar
