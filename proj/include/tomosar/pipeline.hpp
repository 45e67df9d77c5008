#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tomosar/error.hpp"
#include "tomosar/estimators.hpp"
#include "tomosar/metrology.hpp"

namespace tomosar {

/// A raster pixel with its upstream quality annotations.
struct QualityPixel {
    std::size_t id = 0;
    CVector g;
    std::optional<double> scr_db;
    std::optional<double> sidelobe_likelihood;
    std::optional<std::vector<double>> aps; // radians, one per acquisition
    std::vector<GroundTruthScatterer> truth;
    double x = 0.0; // m, planar position of the pixel
    double y = 0.0;
};

/// In-memory form of a stack file.
struct StackData {
    StackGeometry geometry;
    SeasonalModel seasonal;
    std::vector<QualityPixel> pixels;
    std::optional<double> snr_db;
    std::optional<std::uint64_t> seed;
    std::optional<double> area_km2;
};

struct PipelineConfig {
    double scr_threshold_db = 1.7;
    double sidelobe_threshold = 0.45;
    double coherence_threshold = 0.6;
    int max_scatterers = 2;
    int oversample_factor = 10;
    double target_fpr = 1e-3;

    SolverKind solver = SolverKind::tikhonov;
    std::optional<double> delta;
    std::optional<double> epsilon;
    double l1_tol = 1e-6;
    std::size_t candidate_count = 2;

    AxisSpec s_axis{-40.0, 40.0, 2.0};
    AxisSpec v_axis{-10.0, 10.0, 2.0};
    AxisSpec a_axis{-6.0, 6.0, 1.5};

    // Penalty coefficient; calibrated on the stack geometry when absent.
    std::optional<double> penalty_coefficient;
    std::size_t calibration_trials = 0; // 0: ceil(10 / target_fpr)
    std::uint64_t calibration_seed = 1;
    double calibration_snr_db_min = 0.0;
    double calibration_snr_db_max = 10.0;

    std::optional<double> area_km2; // overrides the stack's scene area
    int threads = 0;

    void validate() const;
    InversionSettings inversion() const;
    ElevationMotionGrid grid(const SeasonalModel& seasonal) const;
};

struct CandidateSet {
    std::vector<std::size_t> indices; // positions in the pixel list
    double retained_fraction = 0.0;
};

/// Keeps pixels with SCR >= threshold and sidelobe likelihood <= threshold.
/// Throws InvalidArgument when a pixel lacks either annotation.
CandidateSet mask_candidates(std::span<const QualityPixel> pixels, const PipelineConfig& config);

/// g_n exp(-i aps_n)
CVector compensate_aps(const CVector& g, std::span<const double> aps_phases);

/// One exported scatterer.
struct PointRecord {
    std::size_t pixel_id = 0;
    std::size_t scatterer_index = 0;
    double s = 0.0;
    double v = 0.0;
    double a = 0.0;
    double amplitude = 0.0;
    double coherence = 0.0;
    bool rejected = false;
    double x = 0.0;
    double y = 0.0;

    bool operator==(const PointRecord&) const = default;
};

/// Detection and localization scores against simulated ground truth.
struct Scoring {
    std::size_t truth_scatterers = 0;
    std::size_t detected = 0;
    std::size_t missed = 0;
    std::size_t false_alarms = 0;
    double match_radius = 0.0; // m
    double rmse_s = 0.0;
    double rmse_v = 0.0;
    double rmse_a = 0.0;
};

struct PipelineResult {
    CandidateSet candidates;
    ModelPenalty penalty;
    std::vector<PixelResult> pixel_results; // parallel to candidates.indices
    std::vector<PointRecord> points;
    CloudStats stats;
    std::optional<Scoring> scoring;
};

/// Failure inside the pipeline, tagged with the stage and the pixel id.
class PipelineError : public Error {
public:
    PipelineError(std::string stage, std::optional<std::size_t> pixel, const std::string& what);

    const std::string& stage() const noexcept { return stage_; }
    std::optional<std::size_t> pixel() const noexcept { return pixel_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string stage_;
    std::optional<std::size_t> pixel_;
    std::string detail_;
};

/// Mask, APS compensation, inversion, refinement, rejection and export. Pixel results
/// are ordered by pixel position regardless of the worker count.
PipelineResult run_pipeline(const StackData& stack, const PipelineConfig& config);

/// Serial pipeline used to check the parallel one.
namespace reference {
PipelineResult run_pipeline(const StackData& stack, const PipelineConfig& config);
}

/// Nearest-elevation matching of surviving estimates to ground truth within `radius`.
Scoring score_against_truth(const StackData& stack, const CandidateSet& candidates,
                            std::span<const PixelResult> results, double radius);

/// Synthetic raster scene for end-to-end runs.
struct SceneOptions {
    std::size_t rows = 64;
    std::size_t cols = 64;
    std::size_t n_images = 41;
    double baseline_span = 250.0;
    double wavelength = 0.031;
    double master_range = 661820.0;
    double interval_days = 22.0;
    std::optional<double> snr_db = 10.0; // nullopt: noise-free
    std::uint64_t seed = 1;

    double candidate_fraction = 0.12; // pixels that pass the quality mask
    double sidelobe_fraction = 0.05;  // bright pixels flagged as likely sidelobes
    double double_fraction = 0.2;     // share of candidates holding two scatterers
    bool on_grid = false;             // snap ground truth onto the grid nodes
    double aps_std = 0.0;             // rad, std of the per-acquisition phase ramp
    double pixel_spacing = 1.0;       // m

    AxisSpec s_axis{-40.0, 40.0, 2.0};
    AxisSpec v_axis{-10.0, 10.0, 2.0};
    AxisSpec a_axis{-6.0, 6.0, 1.5};
    SeasonalModel seasonal;
};

StackData simulate_scene(const SceneOptions& options);

} // namespace tomosar
