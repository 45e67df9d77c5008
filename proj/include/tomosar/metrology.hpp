#pragma once

#include <span>
#include <string>
#include <vector>

#include "tomosar/estimators.hpp"

namespace tomosar {

/// Rayleigh elevation resolution lambda r / (2 aperture).
double elevation_resolution(double wavelength, double range, double aperture);

/// Lower bound on the elevation error of a single scatterer:
/// lambda r / (4 pi sqrt(N) sqrt(2 SNR) sigma_b), with SNR linear.
double crlb_elevation(double wavelength, double range, std::size_t n_images, double snr_linear,
                      double sigma_b);

double db_to_linear(double db);
double linear_to_db(double linear);

/// Location and spread of height errors.
struct AccuracyReport {
    double median = 0.0;
    double mean = 0.0;
    double mad = 0.0; // median(|e - median(e)|)
    double std = 0.0; // sample standard deviation (0 for a single value)
    std::size_t count = 0;
};

double median(std::vector<double> values);

AccuracyReport accuracy_report(std::span<const double> errors);

/// Point-cloud counts per scene.
///
/// n_total counts pixels holding a single or a double scatterer (the convention of
/// the published comparison tables); scatterer_count counts each double as two points.
struct CloudStats {
    std::size_t n_single = 0;
    std::size_t n_double = 0;
    std::size_t n_total = 0;
    std::size_t scatterer_count = 0;
    double area_km2 = 0.0;
    double density = 0.0;             // n_total per km^2
    double single_double_ratio = 0.0; // 0 when there are no doubles
};

/// Counts surviving (non-rejected) scatterers per pixel.
CloudStats cloud_stats(std::span<const PixelResult> results, double area_km2);

/// Same, from per-pixel surviving-scatterer counts.
CloudStats cloud_stats_from_counts(std::span<const std::size_t> per_pixel, double area_km2);

/// Larger value divided by the smaller; NaN when either is not positive.
double comparison_ratio(double lhs, double rhs);

/// One row of a two-column comparison table.
struct ComparisonRow {
    std::string label;
    double lhs = 0.0;
    double rhs = 0.0;
    int decimals = 2;
    bool with_ratio = true;
};

/// Aligned text table with a ratio column (larger divided by smaller).
std::string render_comparison(const std::string& lhs_name, const std::string& rhs_name,
                              const std::vector<ComparisonRow>& rows);

std::vector<ComparisonRow> cloud_rows(const CloudStats& lhs, const CloudStats& rhs);
std::vector<ComparisonRow> accuracy_rows(const AccuracyReport& lhs, const AccuracyReport& rhs);

} // namespace tomosar
