#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tomosar {

/// Acquisition geometry of an interferometric stack referenced to one master scene.
///
/// Baselines are effective (perpendicular) baselines in meters, temporal baselines
/// are in years relative to the master. Exactly one acquisition must have both
/// baselines equal to zero; it is the master interferogram.
class StackGeometry {
public:
    StackGeometry(double wavelength, double master_range, std::vector<double> baselines,
                  std::vector<double> temporal_baselines);

    double wavelength() const noexcept { return wavelength_; }
    double master_range() const noexcept { return master_range_; }
    std::size_t size() const noexcept { return baselines_.size(); }
    std::size_t master_index() const noexcept { return master_index_; }

    std::span<const double> baselines() const noexcept { return baselines_; }
    std::span<const double> temporal_baselines() const noexcept { return temporal_baselines_; }

    /// 2 b_n / (lambda r), in cycles per meter of elevation.
    double elevation_frequency(std::size_t n) const;

    /// max(b) - min(b)
    double elevation_aperture() const noexcept;

    /// Population standard deviation of the baselines.
    double baseline_std() const noexcept;

private:
    double wavelength_;
    double master_range_;
    std::vector<double> baselines_;
    std::vector<double> temporal_baselines_;
    std::size_t master_index_ = 0;
};

/// One line of a geometry text file.
struct AcquisitionRecord {
    std::string date; // YYYY-MM-DD
    double baseline = 0.0;
    bool master = false;
};

/// Parses acquisition records, one per line: `YYYY-MM-DD <baseline_m> [master]`.
/// Blank lines and everything after '#' are ignored.
std::vector<AcquisitionRecord> parse_acquisitions(std::istream& in);

/// Builds a geometry from dated records. The master is the record flagged `master`,
/// otherwise the unique record with zero baseline. Temporal baselines become
/// (date - master date) / 365.25 years.
StackGeometry geometry_from_records(const std::vector<AcquisitionRecord>& records,
                                    double wavelength, double master_range);

/// Days since 1970-01-01 for an ISO date; throws InvalidArgument on malformed input.
long days_from_iso_date(const std::string& date);

/// Temporal baselines (years) for `count` acquisitions at a constant repeat interval,
/// referenced to acquisition `master_index`.
std::vector<double> uniform_temporal_baselines(std::size_t count, double interval_days,
                                               std::size_t master_index);

} // namespace tomosar
