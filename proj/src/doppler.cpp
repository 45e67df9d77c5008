#include "tomosar/doppler.hpp"

#include <cmath>
#include <istream>
#include <sstream>
#include <string>

#include "tomosar/error.hpp"

namespace tomosar {

double raw_to_image_time(double t_raw, const DopplerPolynomial& fdc, double fm_rate,
                         const TimeConversionOptions& options) {
    if (!std::isfinite(t_raw) || !std::isfinite(fm_rate))
        throw InvalidArgument("time conversion inputs must be finite");
    if (fm_rate == 0.0)
        throw InvalidArgument("FM rate must be nonzero");
    if (options.beam_sweep_rate &&
        std::abs(fm_rate - *options.beam_sweep_rate) < options.staring_tolerance)
        throw InvalidArgument("FM rate equals the beam sweep rate (staring spotlight); "
                              "raw-to-image time conversion does not apply, use the Doppler grid");
    return t_raw - fdc(t_raw) / fm_rate;
}

void DopplerGrid::validate() const {
    for (int i = 1; i < 3; ++i) {
        if (!(times[i] > times[i - 1]))
            throw InvalidArgument("Doppler grid times must be strictly increasing");
        if (!(ranges[i] > ranges[i - 1]))
            throw InvalidArgument("Doppler grid ranges must be strictly increasing");
    }
    for (const auto& row : values)
        for (double v : row)
            if (!std::isfinite(v))
                throw InvalidArgument("Doppler grid holds a non-finite value");
}

namespace {

std::array<double, 3> lagrange_weights(const std::array<double, 3>& nodes, double x) {
    std::array<double, 3> w{};
    for (int i = 0; i < 3; ++i) {
        double num = 1.0;
        double den = 1.0;
        for (int j = 0; j < 3; ++j) {
            if (j == i)
                continue;
            num *= x - nodes[j];
            den *= nodes[i] - nodes[j];
        }
        w[i] = num / den;
    }
    return w;
}

} // namespace

FdcSample interpolate_fdc(const DopplerGrid& grid, double t_image, double range,
                          Extrapolation policy) {
    grid.validate();
    if (!std::isfinite(t_image) || !std::isfinite(range))
        throw InvalidArgument("Doppler grid query must be finite");
    FdcSample out;
    out.extrapolated = t_image < grid.times[0] || t_image > grid.times[2] ||
                       range < grid.ranges[0] || range > grid.ranges[2];
    if (out.extrapolated && policy == Extrapolation::reject)
        throw InvalidArgument("Doppler grid query lies outside the annotated box");
    const auto wt = lagrange_weights(grid.times, t_image);
    const auto wr = lagrange_weights(grid.ranges, range);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.value += wt[i] * wr[j] * grid.values[i][j];
    return out;
}

std::vector<DopplerGrid> read_doppler_grids(std::istream& in) {
    std::vector<double> numbers;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string token;
        while (ls >> token) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size())
                throw InvalidArgument("Doppler grid: '" + token + "' is not a number");
            numbers.push_back(v);
        }
    }
    if (numbers.empty() || numbers.size() % 15 != 0)
        throw InvalidArgument("Doppler grid records need 15 numbers each, got " +
                              std::to_string(numbers.size()));
    std::vector<DopplerGrid> grids(numbers.size() / 15);
    for (std::size_t g = 0; g < grids.size(); ++g) {
        const double* p = numbers.data() + 15 * g;
        for (int i = 0; i < 3; ++i) {
            grids[g].times[i] = p[i];
            grids[g].ranges[i] = p[3 + i];
            for (int j = 0; j < 3; ++j)
                grids[g].values[i][j] = p[6 + 3 * i + j];
        }
        grids[g].validate();
    }
    return grids;
}

} // namespace tomosar
