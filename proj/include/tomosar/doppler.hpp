#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

namespace tomosar {

/// f_DC(t) = c0 + c1 (t - reference_time), Hz, with t in raw data time (s).
struct DopplerPolynomial {
    double c0 = 0.0;
    double c1 = 0.0;
    double reference_time = 0.0;

    double operator()(double t_raw) const noexcept { return c0 + c1 * (t_raw - reference_time); }
};

struct TimeConversionOptions {
    /// When given, inputs whose FM rate is within `staring_tolerance` of the beam sweep
    /// rate are rejected: the conversion does not hold in staring spotlight mode.
    std::optional<double> beam_sweep_rate;
    double staring_tolerance = 1e-6; // Hz/s
};

/// t_image = t_raw - f_DC(t_raw) / FM for sliding spotlight acquisitions.
double raw_to_image_time(double t_raw, const DopplerPolynomial& fdc, double fm_rate,
                         const TimeConversionOptions& options = {});

/// Doppler centroid annotation sampled on {start, center, stop} image time x
/// {near, mid, far} range. values[i][j] belongs to times[i] and ranges[j].
struct DopplerGrid {
    std::array<double, 3> times{};
    std::array<double, 3> ranges{};
    std::array<std::array<double, 3>, 3> values{};

    void validate() const;
};

enum class Extrapolation { reject, allow };

struct FdcSample {
    double value = 0.0; // Hz
    bool extrapolated = false;
};

/// Tensor-product quadratic Lagrange interpolation; exact for biquadratic surfaces.
/// Queries outside the grid box throw with Extrapolation::reject, and are evaluated
/// but flagged with Extrapolation::allow.
FdcSample interpolate_fdc(const DopplerGrid& grid, double t_image, double range,
                          Extrapolation policy = Extrapolation::reject);

/// Reads one grid per record of 15 numbers: 3 times, 3 ranges, 9 values row-major
/// (time-major). '#' starts a comment. Several records describe per-burst grids.
std::vector<DopplerGrid> read_doppler_grids(std::istream& in);

} // namespace tomosar
