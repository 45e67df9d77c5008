#include "tomosar/metrology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "tomosar/error.hpp"

namespace tomosar {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw InvalidArgument(std::string(name) + " must be positive and finite");
}

} // namespace

double elevation_resolution(double wavelength, double range, double aperture) {
    require_positive(wavelength, "wavelength");
    require_positive(range, "range");
    require_positive(aperture, "elevation aperture");
    return wavelength * range / (2.0 * aperture);
}

double crlb_elevation(double wavelength, double range, std::size_t n_images, double snr_linear,
                      double sigma_b) {
    require_positive(wavelength, "wavelength");
    require_positive(range, "range");
    require_positive(snr_linear, "SNR");
    require_positive(sigma_b, "baseline standard deviation");
    if (n_images == 0)
        throw InvalidArgument("number of images must be positive");
    return wavelength * range /
           (4.0 * std::numbers::pi * std::sqrt(static_cast<double>(n_images)) *
            std::sqrt(2.0 * snr_linear) * sigma_b);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) {
    require_positive(linear, "linear power ratio");
    return 10.0 * std::log10(linear);
}

double median(std::vector<double> values) {
    if (values.empty())
        throw InvalidArgument("median of an empty set");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                     values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1)
        return upper;
    const double lower =
        *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

AccuracyReport accuracy_report(std::span<const double> errors) {
    if (errors.empty())
        throw InvalidArgument("accuracy report needs at least one error value");
    AccuracyReport out;
    out.count = errors.size();
    std::vector<double> values(errors.begin(), errors.end());
    out.median = median(values);
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(out.count);
    std::vector<double> deviations(values.size());
    std::transform(values.begin(), values.end(), deviations.begin(),
                   [&](double e) { return std::abs(e - out.median); });
    out.mad = median(std::move(deviations));
    if (out.count > 1) {
        double ss = 0.0;
        for (double e : values)
            ss += (e - out.mean) * (e - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(out.count - 1));
    }
    return out;
}

CloudStats cloud_stats_from_counts(std::span<const std::size_t> per_pixel, double area_km2) {
    require_positive(area_km2, "area");
    CloudStats out;
    out.area_km2 = area_km2;
    for (std::size_t count : per_pixel) {
        if (count == 1)
            ++out.n_single;
        else if (count == 2)
            ++out.n_double;
        else if (count > 2)
            throw InvalidArgument("a pixel holds more than two scatterers");
    }
    out.n_total = out.n_single + out.n_double;
    out.scatterer_count = out.n_single + 2 * out.n_double;
    out.density = static_cast<double>(out.n_total) / area_km2;
    out.single_double_ratio =
        out.n_double > 0 ? static_cast<double>(out.n_single) / static_cast<double>(out.n_double)
                         : 0.0;
    return out;
}

CloudStats cloud_stats(std::span<const PixelResult> results, double area_km2) {
    std::vector<std::size_t> counts;
    counts.reserve(results.size());
    for (const auto& r : results)
        counts.push_back(r.surviving());
    return cloud_stats_from_counts(counts, area_km2);
}

double comparison_ratio(double lhs, double rhs) {
    if (!(lhs > 0.0) || !(rhs > 0.0))
        return std::numeric_limits<double>::quiet_NaN();
    return std::max(lhs, rhs) / std::min(lhs, rhs);
}

std::vector<ComparisonRow> cloud_rows(const CloudStats& lhs, const CloudStats& rhs) {
    const auto d = [](std::size_t v) { return static_cast<double>(v); };
    return {
        {"No. of single scatterers", d(lhs.n_single), d(rhs.n_single), 0, true},
        {"No. of double scatterers", d(lhs.n_double), d(rhs.n_double), 0, true},
        {"Total no. of scatterers", d(lhs.n_total), d(rhs.n_total), 0, true},
        {"Single-to-double-scatterer ratio", lhs.single_double_ratio, rhs.single_double_ratio, 2,
         true},
        {"Scatterer density [million/km^2]", lhs.density * 1e-6, rhs.density * 1e-6, 2, true},
    };
}

std::vector<ComparisonRow> accuracy_rows(const AccuracyReport& lhs, const AccuracyReport& rhs) {
    return {
        {"Median [m]", lhs.median, rhs.median, 2, false},
        {"Mean [m]", lhs.mean, rhs.mean, 2, false},
        {"Median absolute deviation [m]", lhs.mad, rhs.mad, 2, true},
        {"Standard deviation [m]", lhs.std, rhs.std, 2, true},
    };
}

std::string render_comparison(const std::string& lhs_name, const std::string& rhs_name,
                              const std::vector<ComparisonRow>& rows) {
    const auto fmt = [](double v, int decimals) {
        std::ostringstream os;
        os << std::fixed << std::setprecision(decimals) << v;
        return os.str();
    };
    std::size_t label_w = 0;
    for (const auto& r : rows)
        label_w = std::max(label_w, r.label.size());
    std::vector<std::array<std::string, 3>> cells;
    std::size_t w1 = lhs_name.size();
    std::size_t w2 = rhs_name.size();
    std::size_t w3 = 5;
    for (const auto& r : rows) {
        std::string ratio = "n.a.";
        if (r.with_ratio) {
            const double q = comparison_ratio(r.lhs, r.rhs);
            ratio = std::isnan(q) ? "n.a." : fmt(q, 2);
        }
        cells.push_back({fmt(r.lhs, r.decimals), fmt(r.rhs, r.decimals), ratio});
        w1 = std::max(w1, cells.back()[0].size());
        w2 = std::max(w2, cells.back()[1].size());
        w3 = std::max(w3, cells.back()[2].size());
    }
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(label_w)) << "" << "  " << std::right
       << std::setw(static_cast<int>(w1)) << lhs_name << "  " << std::setw(static_cast<int>(w2))
       << rhs_name << "  " << std::setw(static_cast<int>(w3)) << "Ratio" << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << std::left << std::setw(static_cast<int>(label_w)) << rows[i].label << "  "
           << std::right << std::setw(static_cast<int>(w1)) << cells[i][0] << "  "
           << std::setw(static_cast<int>(w2)) << cells[i][1] << "  "
           << std::setw(static_cast<int>(w3)) << cells[i][2] << '\n';
    }
    return os.str();
}

} // namespace tomosar
