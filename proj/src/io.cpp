#include "tomosar/io.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "tomosar/error.hpp"

namespace tomosar {

using nlohmann::json;

namespace {

void check_version(const json& doc, const char* what) {
    if (!doc.contains("format_version"))
        throw InvalidArgument(std::string(what) + " lacks format_version");
    const int version = doc.at("format_version").get<int>();
    if (version != kFormatVersion)
        throw InvalidArgument(std::string(what) + " has unsupported format_version " +
                              std::to_string(version));
}

json complex_array(const CVector& g) {
    json arr = json::array();
    for (const auto& v : g)
        arr.push_back({v.real(), v.imag()});
    return arr;
}

CVector complex_from(const json& arr) {
    CVector g(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t n = 0; n < arr.size(); ++n) {
        const auto& pair = arr.at(n);
        if (!pair.is_array() || pair.size() != 2)
            throw InvalidArgument("complex samples must be [re, im] pairs");
        g[static_cast<Eigen::Index>(n)] = {pair[0].get<double>(), pair[1].get<double>()};
    }
    return g;
}

template <class T>
std::optional<T> optional_field(const json& obj, const char* key) {
    if (!obj.contains(key) || obj.at(key).is_null())
        return std::nullopt;
    return obj.at(key).get<T>();
}

} // namespace

json stack_to_json(const StackData& stack) {
    json acquisitions = json::array();
    const auto& geo = stack.geometry;
    for (std::size_t n = 0; n < geo.size(); ++n)
        acquisitions.push_back(
            {{"baseline", geo.baselines()[n]}, {"temporal_baseline", geo.temporal_baselines()[n]}});
    json pixels = json::array();
    for (const auto& p : stack.pixels) {
        json jp = {{"id", p.id}, {"x", p.x}, {"y", p.y}, {"g", complex_array(p.g)}};
        if (p.scr_db)
            jp["scr_db"] = *p.scr_db;
        if (p.sidelobe_likelihood)
            jp["sidelobe_likelihood"] = *p.sidelobe_likelihood;
        if (p.aps)
            jp["aps"] = *p.aps;
        if (!p.truth.empty()) {
            json truth = json::array();
            for (const auto& t : p.truth)
                truth.push_back({{"s", t.s}, {"v", t.v}, {"a", t.a}, {"amplitude", t.amplitude},
                                 {"phase", t.phase}});
            jp["truth"] = std::move(truth);
        }
        pixels.push_back(std::move(jp));
    }
    json doc = {
        {"format_version", kFormatVersion},
        {"geometry",
         {{"wavelength", geo.wavelength()},
          {"master_range", geo.master_range()},
          {"seasonal_period", stack.seasonal.period},
          {"seasonal_phase_offset", stack.seasonal.phase_offset},
          {"acquisitions", std::move(acquisitions)}}},
        {"pixels", std::move(pixels)},
    };
    if (stack.snr_db)
        doc["snr_db"] = *stack.snr_db;
    if (stack.seed)
        doc["seed"] = *stack.seed;
    if (stack.area_km2)
        doc["area_km2"] = *stack.area_km2;
    return doc;
}

StackData stack_from_json(const json& doc) {
    try {
        check_version(doc, "stack file");
        const auto& jg = doc.at("geometry");
        std::vector<double> b;
        std::vector<double> t;
        for (const auto& acq : jg.at("acquisitions")) {
            b.push_back(acq.at("baseline").get<double>());
            t.push_back(acq.at("temporal_baseline").get<double>());
        }
        StackGeometry geometry(jg.at("wavelength").get<double>(),
                               jg.at("master_range").get<double>(), std::move(b), std::move(t));
        SeasonalModel seasonal;
        seasonal.period = jg.value("seasonal_period", 1.0);
        seasonal.phase_offset = jg.value("seasonal_phase_offset", 0.0);

        StackData stack{std::move(geometry), seasonal, {}, optional_field<double>(doc, "snr_db"),
                        optional_field<std::uint64_t>(doc, "seed"),
                        optional_field<double>(doc, "area_km2")};
        for (const auto& jp : doc.at("pixels")) {
            QualityPixel p;
            p.id = jp.at("id").get<std::size_t>();
            p.x = jp.value("x", 0.0);
            p.y = jp.value("y", 0.0);
            p.g = complex_from(jp.at("g"));
            if (static_cast<std::size_t>(p.g.size()) != stack.geometry.size())
                throw DimensionError("pixel " + std::to_string(p.id) + " has " +
                                     std::to_string(p.g.size()) + " samples, expected " +
                                     std::to_string(stack.geometry.size()));
            p.scr_db = optional_field<double>(jp, "scr_db");
            p.sidelobe_likelihood = optional_field<double>(jp, "sidelobe_likelihood");
            p.aps = optional_field<std::vector<double>>(jp, "aps");
            if (jp.contains("truth")) {
                for (const auto& jt : jp.at("truth"))
                    p.truth.push_back({jt.at("s").get<double>(), jt.at("v").get<double>(),
                                       jt.at("a").get<double>(), jt.at("amplitude").get<double>(),
                                       jt.at("phase").get<double>()});
            }
            stack.pixels.push_back(std::move(p));
        }
        return stack;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed stack file: ") + e.what());
    }
}

StackData read_stack(std::istream& in) {
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("stack file is not valid JSON: ") + e.what());
    }
    return stack_from_json(doc);
}

void write_stack(std::ostream& out, const StackData& stack) { out << stack_to_json(stack) << '\n'; }

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

constexpr const char* kCloudHeader =
    "pixel_id,scatterer_index,s_m,v_mm_yr,a_mm,amplitude,coherence,rejected_flag,x_m,y_m";

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_number(const std::string& text, std::size_t lineno) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw InvalidArgument("line " + std::to_string(lineno) + ": '" + text +
                              "' is not a number");
    return v;
}

std::size_t parse_index(const std::string& text, std::size_t lineno) {
    std::size_t v = 0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw InvalidArgument("line " + std::to_string(lineno) + ": '" + text +
                              "' is not an index");
    return v;
}

struct CsvTable {
    std::map<std::string, std::size_t> columns;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows; // (line, fields)
};

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto pos = line.find("format_version=");
            if (pos != std::string::npos &&
                std::stoi(line.substr(pos + 15)) != kFormatVersion)
                throw InvalidArgument("unsupported CSV format_version");
            continue;
        }
        auto fields = split_csv(line);
        if (!header) {
            for (std::size_t i = 0; i < fields.size(); ++i)
                table.columns[fields[i]] = i;
            header = true;
            continue;
        }
        if (fields.size() != table.columns.size())
            throw InvalidArgument("line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(table.columns.size()) + " fields");
        table.rows.emplace_back(lineno, std::move(fields));
    }
    if (!header)
        throw InvalidArgument("CSV has no header line");
    return table;
}

std::size_t column(const CsvTable& t, const std::string& name) {
    const auto it = t.columns.find(name);
    if (it == t.columns.end())
        throw InvalidArgument("CSV lacks column '" + name + "'");
    return it->second;
}

} // namespace

void write_point_cloud_csv(std::ostream& out, std::span<const PointRecord> points) {
    out << "# format_version=" << kFormatVersion << '\n' << kCloudHeader << '\n';
    for (const auto& p : points) {
        out << p.pixel_id << ',' << p.scatterer_index << ',' << format_double(p.s) << ','
            << format_double(p.v) << ',' << format_double(p.a) << ','
            << format_double(p.amplitude) << ',' << format_double(p.coherence) << ','
            << (p.rejected ? 1 : 0) << ',' << format_double(p.x) << ',' << format_double(p.y)
            << '\n';
    }
}

std::vector<PointRecord> read_point_cloud_csv(std::istream& in) {
    const auto table = read_csv(in);
    const std::size_t c_pixel = column(table, "pixel_id");
    const std::size_t c_index = column(table, "scatterer_index");
    const std::size_t c_s = column(table, "s_m");
    const std::size_t c_v = column(table, "v_mm_yr");
    const std::size_t c_a = column(table, "a_mm");
    const std::size_t c_amp = column(table, "amplitude");
    const std::size_t c_coh = column(table, "coherence");
    const std::size_t c_rej = column(table, "rejected_flag");
    const auto c_x = table.columns.find("x_m");
    const auto c_y = table.columns.find("y_m");
    std::vector<PointRecord> out;
    for (const auto& [lineno, f] : table.rows) {
        PointRecord p;
        p.pixel_id = parse_index(f[c_pixel], lineno);
        p.scatterer_index = parse_index(f[c_index], lineno);
        p.s = parse_number(f[c_s], lineno);
        p.v = parse_number(f[c_v], lineno);
        p.a = parse_number(f[c_a], lineno);
        p.amplitude = parse_number(f[c_amp], lineno);
        p.coherence = parse_number(f[c_coh], lineno);
        p.rejected = parse_index(f[c_rej], lineno) != 0;
        if (c_x != table.columns.end())
            p.x = parse_number(f[c_x->second], lineno);
        if (c_y != table.columns.end())
            p.y = parse_number(f[c_y->second], lineno);
        out.push_back(p);
    }
    return out;
}

PointCloud3D read_xyz_csv(std::istream& in) {
    const auto table = read_csv(in);
    PointCloud3D cloud;
    const bool point_cloud = table.columns.count("s_m") > 0;
    const std::size_t cx = column(table, point_cloud ? "x_m" : "x");
    const std::size_t cy = column(table, point_cloud ? "y_m" : "y");
    const std::size_t cz = column(table, point_cloud ? "s_m" : "z");
    const auto crej = table.columns.find("rejected_flag");
    for (const auto& [lineno, f] : table.rows) {
        if (crej != table.columns.end() && parse_index(f[crej->second], lineno) != 0)
            continue;
        cloud.x.push_back(parse_number(f[cx], lineno));
        cloud.y.push_back(parse_number(f[cy], lineno));
        cloud.z.push_back(parse_number(f[cz], lineno));
    }
    return cloud;
}

std::vector<std::size_t> surviving_counts(std::span<const PointRecord> points) {
    std::map<std::size_t, std::size_t> per_pixel;
    for (const auto& p : points) {
        auto& count = per_pixel[p.pixel_id];
        if (!p.rejected)
            ++count;
    }
    std::vector<std::size_t> out;
    out.reserve(per_pixel.size());
    for (const auto& [id, count] : per_pixel)
        out.push_back(count);
    return out;
}

json to_json(const CloudStats& s) {
    return {{"n_single", s.n_single},
            {"n_double", s.n_double},
            {"n_total", s.n_total},
            {"scatterer_count", s.scatterer_count},
            {"area_km2", s.area_km2},
            {"density_per_km2", s.density},
            {"single_double_ratio", s.single_double_ratio}};
}

json to_json(const AccuracyReport& r) {
    return {{"median", r.median}, {"mean", r.mean}, {"mad", r.mad}, {"std", r.std},
            {"count", r.count}};
}

json to_json(const Scoring& s) {
    return {{"truth_scatterers", s.truth_scatterers},
            {"detected", s.detected},
            {"missed", s.missed},
            {"false_alarms", s.false_alarms},
            {"match_radius_m", s.match_radius},
            {"rmse_s_m", s.rmse_s},
            {"rmse_v_mm_yr", s.rmse_v},
            {"rmse_a_mm", s.rmse_a}};
}

json to_json(const FittedPlane& p) {
    return {{"a", p.a},
            {"b", p.b},
            {"c", 1.0},
            {"d", p.d},
            {"iterations", p.iterations},
            {"objective", p.final_residual},
            {"primal_residual", p.primal_residual},
            {"dual_residual", p.dual_residual}};
}

json error_record(const std::string& stage, std::optional<std::size_t> pixel,
                  const std::string& message) {
    json err = {{"stage", stage}, {"message", message}};
    err["pixel"] = pixel ? json(*pixel) : json(nullptr);
    return {{"format_version", kFormatVersion}, {"error", std::move(err)}};
}

} // namespace tomosar
