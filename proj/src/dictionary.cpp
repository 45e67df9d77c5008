#include "tomosar/dictionary.hpp"

#include <cmath>
#include <numbers>

#include <omp.h>

#include "tomosar/error.hpp"

namespace tomosar {

double steering_phase(const StackGeometry& geometry, std::size_t n, const GridPoint& p,
                      const SeasonalModel& seasonal) {
    const double d_m = displacement({p.v, p.a}, geometry.temporal_baselines()[n], seasonal) * 1e-3;
    return 2.0 * std::numbers::pi *
           (geometry.elevation_frequency(n) * p.s + 2.0 * d_m / geometry.wavelength());
}

CVector steering_vector(const StackGeometry& geometry, const GridPoint& p,
                        const SeasonalModel& seasonal) {
    const auto n_rows = static_cast<Eigen::Index>(geometry.size());
    CVector out(n_rows);
    for (Eigen::Index n = 0; n < n_rows; ++n)
        out[n] = std::polar(1.0, -steering_phase(geometry, static_cast<std::size_t>(n), p, seasonal));
    return out;
}

TomoDictionary::TomoDictionary(StackGeometry geometry, ElevationMotionGrid grid, CMatrix matrix)
    : geometry_(std::move(geometry)), grid_(std::move(grid)), matrix_(std::move(matrix)) {
    if (rows() != geometry_.size() || cols() != grid_.size())
        throw DimensionError("dictionary shape does not match geometry and grid");
    if (rows() <= cols())
        gram_ = matrix_ * matrix_.adjoint();
    else
        gram_ = matrix_.adjoint() * matrix_;
}

namespace {

void check_budget(const StackGeometry& geometry, const ElevationMotionGrid& grid,
                  const DictionaryOptions& options) {
    const std::size_t n = geometry.size();
    const std::size_t l = grid.size();
    const std::size_t entry = sizeof(cdouble);
    const bool overflow = l != 0 && n > options.memory_budget_bytes / entry / l;
    if (overflow) {
        throw DimensionError("dictionary needs " + std::to_string(n) + " x " + std::to_string(l) +
                             " x " + std::to_string(entry) + " bytes, budget is " +
                             std::to_string(options.memory_budget_bytes) + " bytes");
    }
}

// Fills one column; shared by the parallel and serial builders so both produce
// identical bits.
void fill_column(const StackGeometry& geometry, const ElevationMotionGrid& grid, CMatrix& m,
                 Eigen::Index l) {
    const GridPoint p = grid.point(static_cast<std::size_t>(l));
    for (Eigen::Index n = 0; n < m.rows(); ++n)
        m(n, l) = std::polar(1.0, -steering_phase(geometry, static_cast<std::size_t>(n), p,
                                                  grid.seasonal()));
}

double column_response(const CMatrix& m, Eigen::Index l, const CVector& g) {
    cdouble acc{0.0, 0.0};
    for (Eigen::Index n = 0; n < m.rows(); ++n)
        acc += std::conj(m(n, l)) * g[n];
    return std::abs(acc) / static_cast<double>(m.rows());
}

void check_measurement(const TomoDictionary& dictionary, const CVector& g) {
    if (static_cast<std::size_t>(g.size()) != dictionary.rows())
        throw DimensionError("measurement length " + std::to_string(g.size()) +
                             " does not match N = " + std::to_string(dictionary.rows()));
}

} // namespace

TomoDictionary build_dictionary(const StackGeometry& geometry, const ElevationMotionGrid& grid,
                                const DictionaryOptions& options) {
    check_budget(geometry, grid, options);
    CMatrix m(static_cast<Eigen::Index>(geometry.size()), static_cast<Eigen::Index>(grid.size()));
    const Eigen::Index cols = m.cols();
    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (Eigen::Index l = 0; l < cols; ++l)
        fill_column(geometry, grid, m, l);
    return TomoDictionary(geometry, grid, std::move(m));
}

RVector steering_response(const TomoDictionary& dictionary, const CVector& g, int threads) {
    check_measurement(dictionary, g);
    const CMatrix& m = dictionary.matrix();
    RVector out(m.cols());
    const Eigen::Index cols = m.cols();
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (Eigen::Index l = 0; l < cols; ++l)
        out[l] = column_response(m, l, g);
    return out;
}

namespace reference {

TomoDictionary build_dictionary(const StackGeometry& geometry, const ElevationMotionGrid& grid,
                                const DictionaryOptions& options) {
    check_budget(geometry, grid, options);
    CMatrix m(static_cast<Eigen::Index>(geometry.size()), static_cast<Eigen::Index>(grid.size()));
    for (Eigen::Index l = 0; l < m.cols(); ++l)
        fill_column(geometry, grid, m, l);
    return TomoDictionary(geometry, grid, std::move(m));
}

RVector steering_response(const TomoDictionary& dictionary, const CVector& g) {
    check_measurement(dictionary, g);
    const CMatrix& m = dictionary.matrix();
    RVector out(m.cols());
    for (Eigen::Index l = 0; l < m.cols(); ++l)
        out[l] = column_response(m, l, g);
    return out;
}

} // namespace reference

} // namespace tomosar
