#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "tomosar/geometry.hpp"
#include "tomosar/grid.hpp"

namespace tomosar {

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Unit-modulus steering vector exp(-i 2 pi (xi_n s + 2 d(t_n) / lambda)) for one
/// parameter point; d is converted from millimeters to meters.
CVector steering_vector(const StackGeometry& geometry, const GridPoint& p,
                        const SeasonalModel& seasonal = {});

/// Phase of a single steering entry, in radians (without the leading minus sign
/// folded in: the entry is exp(-i * phase)).
double steering_phase(const StackGeometry& geometry, std::size_t n, const GridPoint& p,
                      const SeasonalModel& seasonal = {});

struct DictionaryOptions {
    std::size_t memory_budget_bytes = std::size_t{2} << 30;
    int threads = 0; // 0: OpenMP default
};

/// The N x L steering matrix R of g = R gamma over an elevation-motion grid.
class TomoDictionary {
public:
    TomoDictionary(StackGeometry geometry, ElevationMotionGrid grid, CMatrix matrix);

    const CMatrix& matrix() const noexcept { return matrix_; }
    const StackGeometry& geometry() const noexcept { return geometry_; }
    const ElevationMotionGrid& grid() const noexcept { return grid_; }

    std::size_t rows() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(matrix_.cols()); }

    auto column(std::size_t l) const { return matrix_.col(static_cast<Eigen::Index>(l)); }

    /// R R^H when N <= L, otherwise R^H R.
    const CMatrix& gram() const noexcept { return gram_; }

private:
    StackGeometry geometry_;
    ElevationMotionGrid grid_;
    CMatrix matrix_;
    CMatrix gram_;
};

/// Builds R column by column in parallel.
/// Throws DimensionError when N*L complex entries exceed the memory budget.
TomoDictionary build_dictionary(const StackGeometry& geometry, const ElevationMotionGrid& grid,
                                const DictionaryOptions& options = {});

/// Matched-filter magnitude |R^H g| / N per column.
///
/// Each value lies in [0, mean_n |g_n|]; a column equal to g (any unit-modulus
/// vector) scores exactly 1.
RVector steering_response(const TomoDictionary& dictionary, const CVector& g, int threads = 0);

namespace reference {

/// Serial reference implementations; bit-identical to the parallel kernels.
TomoDictionary build_dictionary(const StackGeometry& geometry, const ElevationMotionGrid& grid,
                                const DictionaryOptions& options = {});
RVector steering_response(const TomoDictionary& dictionary, const CVector& g);

} // namespace reference

} // namespace tomosar
