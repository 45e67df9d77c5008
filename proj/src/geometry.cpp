#include "tomosar/geometry.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <numeric>
#include <sstream>

#include "tomosar/error.hpp"

namespace tomosar {

StackGeometry::StackGeometry(double wavelength, double master_range, std::vector<double> baselines,
                             std::vector<double> temporal_baselines)
    : wavelength_(wavelength),
      master_range_(master_range),
      baselines_(std::move(baselines)),
      temporal_baselines_(std::move(temporal_baselines)) {
    if (!(wavelength_ > 0.0) || !std::isfinite(wavelength_))
        throw InvalidArgument("wavelength must be positive and finite");
    if (!(master_range_ > 0.0) || !std::isfinite(master_range_))
        throw InvalidArgument("master range must be positive and finite");
    if (baselines_.empty())
        throw InvalidArgument("geometry needs at least one acquisition");
    if (baselines_.size() != temporal_baselines_.size())
        throw DimensionError("baseline and temporal baseline counts differ");

    std::size_t masters = 0;
    for (std::size_t n = 0; n < baselines_.size(); ++n) {
        if (!std::isfinite(baselines_[n]) || !std::isfinite(temporal_baselines_[n]))
            throw InvalidArgument("non-finite baseline at acquisition " + std::to_string(n));
        if (baselines_[n] == 0.0 && temporal_baselines_[n] == 0.0) {
            master_index_ = n;
            ++masters;
        }
    }
    if (masters != 1)
        throw InvalidArgument("expected exactly one master acquisition (b = 0, t = 0), found " +
                              std::to_string(masters));
    for (std::size_t n = 0; n < baselines_.size(); ++n) {
        if (!std::isfinite(elevation_frequency(n)))
            throw InvalidArgument("elevation frequency overflows at acquisition " +
                                  std::to_string(n));
    }
}

double StackGeometry::elevation_frequency(std::size_t n) const {
    return 2.0 * baselines_.at(n) / (wavelength_ * master_range_);
}

double StackGeometry::elevation_aperture() const noexcept {
    auto [lo, hi] = std::minmax_element(baselines_.begin(), baselines_.end());
    return *hi - *lo;
}

double StackGeometry::baseline_std() const noexcept {
    const double n = static_cast<double>(baselines_.size());
    const double mean = std::accumulate(baselines_.begin(), baselines_.end(), 0.0) / n;
    double ss = 0.0;
    for (double b : baselines_)
        ss += (b - mean) * (b - mean);
    return std::sqrt(ss / n);
}

long days_from_iso_date(const std::string& date) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    char dash1 = 0;
    char dash2 = 0;
    std::istringstream ss(date);
    ss >> y >> dash1 >> m >> dash2 >> d;
    if (!ss || dash1 != '-' || dash2 != '-' || !ss.eof())
        throw InvalidArgument("malformed date '" + date + "', expected YYYY-MM-DD");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok())
        throw InvalidArgument("invalid calendar date '" + date + "'");
    return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

std::vector<AcquisitionRecord> parse_acquisitions(std::istream& in) {
    std::vector<AcquisitionRecord> records;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        AcquisitionRecord rec;
        if (!(ls >> rec.date))
            continue;
        if (!(ls >> rec.baseline))
            throw InvalidArgument("line " + std::to_string(lineno) + ": missing baseline");
        std::string flag;
        if (ls >> flag) {
            if (flag != "master")
                throw InvalidArgument("line " + std::to_string(lineno) + ": unknown flag '" +
                                      flag + "'");
            rec.master = true;
        }
        days_from_iso_date(rec.date);
        records.push_back(std::move(rec));
    }
    return records;
}

StackGeometry geometry_from_records(const std::vector<AcquisitionRecord>& records,
                                    double wavelength, double master_range) {
    if (records.empty())
        throw InvalidArgument("no acquisition records");

    std::ptrdiff_t master = -1;
    const auto flagged = std::count_if(records.begin(), records.end(),
                                       [](const auto& r) { return r.master; });
    if (flagged > 1)
        throw InvalidArgument("more than one record flagged as master");
    if (flagged == 1) {
        master = std::find_if(records.begin(), records.end(),
                              [](const auto& r) { return r.master; }) -
                 records.begin();
    } else {
        for (std::size_t n = 0; n < records.size(); ++n) {
            if (records[n].baseline == 0.0) {
                if (master >= 0)
                    throw InvalidArgument("several zero-baseline records; flag the master");
                master = static_cast<std::ptrdiff_t>(n);
            }
        }
    }
    if (master < 0)
        throw InvalidArgument("no master record (zero baseline or 'master' flag)");

    const long master_day = days_from_iso_date(records[static_cast<std::size_t>(master)].date);
    const double master_b = records[static_cast<std::size_t>(master)].baseline;
    std::vector<double> b;
    std::vector<double> t;
    for (const auto& r : records) {
        b.push_back(r.baseline - master_b);
        t.push_back(static_cast<double>(days_from_iso_date(r.date) - master_day) / 365.25);
    }
    return StackGeometry(wavelength, master_range, std::move(b), std::move(t));
}

std::vector<double> uniform_temporal_baselines(std::size_t count, double interval_days,
                                               std::size_t master_index) {
    if (master_index >= count)
        throw InvalidArgument("master index outside the acquisition range");
    if (!(interval_days > 0.0))
        throw InvalidArgument("repeat interval must be positive");
    std::vector<double> t(count);
    for (std::size_t n = 0; n < count; ++n) {
        const double offset = static_cast<double>(n) - static_cast<double>(master_index);
        t[n] = offset * interval_days / 365.25;
    }
    return t;
}

} // namespace tomosar
