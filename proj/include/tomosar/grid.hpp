#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace tomosar {

/// Parameters of the periodic part of the displacement model.
///
/// The seasonal term is a*(sin(2 pi t / period + phase_offset) - sin(phase_offset)),
/// which keeps the master acquisition (t = 0) at zero displacement for any offset.
struct SeasonalModel {
    double period = 1.0;       // years
    double phase_offset = 0.0; // radians
};

/// Linear rate (mm/year) and seasonal amplitude (mm) of a scatterer.
struct MotionParams {
    double v = 0.0;
    double a = 0.0;
};

/// Line-of-sight displacement in millimeters at temporal baseline t (years).
double displacement(MotionParams motion, double t, const SeasonalModel& seasonal = {});

/// A point of the elevation-motion parameter space.
struct GridPoint {
    double s = 0.0; // m
    double v = 0.0; // mm/year
    double a = 0.0; // mm
};

/// Inclusive uniform axis description: start, stop and step.
struct AxisSpec {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    std::vector<double> samples() const;
};

/// Discretized (s, v, a) axes of the TomoSAR dictionary.
///
/// Columns are flattened with s fastest, then v, then a:
///   l = i + n_s * (j + n_v * k)   for s_axis[i], v_axis[j], a_axis[k].
class ElevationMotionGrid {
public:
    ElevationMotionGrid(std::vector<double> s_axis, std::vector<double> v_axis,
                        std::vector<double> a_axis, SeasonalModel seasonal = {});

    static ElevationMotionGrid uniform(const AxisSpec& s, const AxisSpec& v, const AxisSpec& a,
                                       SeasonalModel seasonal = {});

    /// Elevation-only grid (v and a fixed at zero).
    static ElevationMotionGrid elevation_only(const AxisSpec& s, SeasonalModel seasonal = {});

    std::span<const double> s_axis() const noexcept { return s_; }
    std::span<const double> v_axis() const noexcept { return v_; }
    std::span<const double> a_axis() const noexcept { return a_; }
    const SeasonalModel& seasonal() const noexcept { return seasonal_; }

    std::size_t size() const noexcept { return s_.size() * v_.size() * a_.size(); }

    std::size_t column_index(std::size_t i, std::size_t j, std::size_t k) const;
    std::array<std::size_t, 3> axis_indices(std::size_t column) const;
    GridPoint point(std::size_t column) const;

private:
    std::vector<double> s_;
    std::vector<double> v_;
    std::vector<double> a_;
    SeasonalModel seasonal_;
};

} // namespace tomosar
