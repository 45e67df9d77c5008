#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tomosar/pipeline.hpp"
#include "tomosar/plane_fit.hpp"

namespace tomosar {

inline constexpr int kFormatVersion = 1;

/// Stack documents: geometry, per-pixel measurements with quality annotations and
/// optional ground truth. Complex samples are stored as [re, im] pairs.
nlohmann::json stack_to_json(const StackData& stack);
StackData stack_from_json(const nlohmann::json& doc);

StackData read_stack(std::istream& in);
void write_stack(std::ostream& out, const StackData& stack);

/// Point-cloud CSV, preceded by a `# format_version=1` line. Columns:
/// pixel_id,scatterer_index,s_m,v_mm_yr,a_mm,amplitude,coherence,rejected_flag,x_m,y_m
void write_point_cloud_csv(std::ostream& out, std::span<const PointRecord> points);
std::vector<PointRecord> read_point_cloud_csv(std::istream& in);

/// Reads planar coordinates and heights for plane fitting. Accepts either a point-cloud
/// CSV (x_m, y_m, s_m; rejected rows skipped) or a CSV with x, y, z columns.
PointCloud3D read_xyz_csv(std::istream& in);

/// Per-pixel surviving-scatterer counts from exported points.
std::vector<std::size_t> surviving_counts(std::span<const PointRecord> points);

nlohmann::json to_json(const CloudStats& stats);
nlohmann::json to_json(const AccuracyReport& report);
nlohmann::json to_json(const Scoring& scoring);
nlohmann::json to_json(const FittedPlane& plane);

/// {"error": {"stage": ..., "pixel": ..., "message": ...}, "format_version": 1}
nlohmann::json error_record(const std::string& stage, std::optional<std::size_t> pixel,
                            const std::string& message);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

} // namespace tomosar
