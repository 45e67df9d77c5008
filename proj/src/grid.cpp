#include "tomosar/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tomosar/error.hpp"

namespace tomosar {

double displacement(MotionParams motion, double t, const SeasonalModel& seasonal) {
    if (!(seasonal.period > 0.0))
        throw InvalidArgument("seasonal period must be positive");
    if (!std::isfinite(motion.v) || !std::isfinite(motion.a) || !std::isfinite(t) ||
        !std::isfinite(seasonal.phase_offset) || !std::isfinite(seasonal.period))
        throw InvalidArgument("displacement inputs must be finite");
    const double arg = 2.0 * std::numbers::pi * t / seasonal.period;
    double periodic = 0.0;
    if (seasonal.phase_offset == 0.0)
        periodic = std::sin(arg);
    else
        periodic = std::sin(arg + seasonal.phase_offset) - std::sin(seasonal.phase_offset);
    return motion.v * t + motion.a * periodic;
}

std::vector<double> AxisSpec::samples() const {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
        throw InvalidArgument("axis bounds must be finite");
    if (stop < start)
        throw InvalidArgument("axis stop must not precede start");
    if (stop == start)
        return {start};
    if (!(step > 0.0))
        throw InvalidArgument("axis step must be positive");
    // Round so that start/stop/step from text survive the division.
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = start + static_cast<double>(i) * step;
    return out;
}

namespace {

void check_axis(const std::vector<double>& axis, const char* name) {
    if (axis.empty())
        throw InvalidArgument(std::string(name) + " axis is empty");
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (!std::isfinite(axis[i]))
            throw InvalidArgument(std::string(name) + " axis has a non-finite sample");
        if (i > 0 && !(axis[i] > axis[i - 1]))
            throw InvalidArgument(std::string(name) + " axis is not strictly increasing");
    }
}

} // namespace

ElevationMotionGrid::ElevationMotionGrid(std::vector<double> s_axis, std::vector<double> v_axis,
                                         std::vector<double> a_axis, SeasonalModel seasonal)
    : s_(std::move(s_axis)), v_(std::move(v_axis)), a_(std::move(a_axis)), seasonal_(seasonal) {
    check_axis(s_, "s");
    check_axis(v_, "v");
    check_axis(a_, "a");
    if (!(seasonal_.period > 0.0))
        throw InvalidArgument("seasonal period must be positive");
    if (s_.size() > 2) {
        const double step = s_[1] - s_[0];
        for (std::size_t i = 2; i < s_.size(); ++i) {
            if (std::abs((s_[i] - s_[i - 1]) - step) > 1e-9 * std::max(1.0, std::abs(step)))
                throw InvalidArgument("s axis must be uniformly spaced");
        }
    }
}

ElevationMotionGrid ElevationMotionGrid::uniform(const AxisSpec& s, const AxisSpec& v,
                                                 const AxisSpec& a, SeasonalModel seasonal) {
    return ElevationMotionGrid(s.samples(), v.samples(), a.samples(), seasonal);
}

ElevationMotionGrid ElevationMotionGrid::elevation_only(const AxisSpec& s, SeasonalModel seasonal) {
    return ElevationMotionGrid(s.samples(), {0.0}, {0.0}, seasonal);
}

std::size_t ElevationMotionGrid::column_index(std::size_t i, std::size_t j, std::size_t k) const {
    if (i >= s_.size() || j >= v_.size() || k >= a_.size())
        throw InvalidArgument("grid index out of range");
    return i + s_.size() * (j + v_.size() * k);
}

std::array<std::size_t, 3> ElevationMotionGrid::axis_indices(std::size_t column) const {
    if (column >= size())
        throw InvalidArgument("column index out of range");
    const std::size_t i = column % s_.size();
    const std::size_t rest = column / s_.size();
    return {i, rest % v_.size(), rest / v_.size()};
}

GridPoint ElevationMotionGrid::point(std::size_t column) const {
    const auto [i, j, k] = axis_indices(column);
    return {s_[i], v_[j], a_[k]};
}

} // namespace tomosar
