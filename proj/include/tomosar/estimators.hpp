#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tomosar/dictionary.hpp"
#include "tomosar/simulator.hpp"

namespace tomosar {

enum class SolverKind { tikhonov, l1 };

const char* to_string(SolverKind kind);
SolverKind solver_from_string(const std::string& name);

/// Reflectivity spectrum gamma over the dictionary columns.
struct SpectrumEstimate {
    CVector gamma;
    SolverKind method = SolverKind::tikhonov;
    double regularization = 0.0; // delta (Tikhonov) or epsilon (l1)
    int iterations = 0;
    // Relative gradient norm (Tikhonov) or relative duality gap (l1) at return.
    double certificate = 0.0;
};

/// Minimizer of ||R gamma - g||^2 + delta ||gamma||^2.
///
/// Solved through the smaller of the two regularized normal systems
/// (R^H R + delta I) or (R R^H + delta I) with a Cholesky factorization.
SpectrumEstimate tikhonov_solve(const TomoDictionary& dictionary, const CVector& g, double delta);

/// ||R gamma - g||^2 + epsilon * sum_l |gamma_l|
double l1_objective(const CMatrix& r, const CVector& g, const CVector& gamma, double epsilon);

/// Primal objective minus the value of the dual point obtained by scaling the
/// residual into the feasible set max_l |R_l^H u| <= epsilon / 2. Always >= 0.
double l1_duality_gap(const CMatrix& r, const CVector& g, const CVector& gamma, double epsilon);

/// Minimizer of ||R gamma - g||^2 + epsilon ||gamma||_1 over complex gamma, where the
/// l1 norm sums complex moduli.
///
/// Accelerated proximal gradient (FISTA with adaptive restart). Returns once the
/// duality gap relative to the objective is below `tol`; throws ConvergenceError
/// carrying the final gap otherwise.
SpectrumEstimate l1_solve(const TomoDictionary& dictionary, const CVector& g, double epsilon,
                          double tol = 1e-9, int max_iter = 50000);

/// A reconstructed point scatterer.
struct ScattererEstimate {
    double s = 0.0;             // m
    double v = 0.0;             // mm/year
    double a = 0.0;             // mm
    double amplitude = 0.0;     // |complex_amplitude|
    double coherence = 0.0;     // |eta| of the pixel model
    cdouble complex_amplitude{};
    std::size_t column = 0;     // coarse dictionary column
    bool truncated = false;     // refinement neighborhood clipped at the grid edge
};

/// Per-pixel outcome of model selection, refinement and outlier rejection.
struct PixelResult {
    std::vector<ScattererEstimate> estimates;
    int selected_model = 0;
    std::vector<bool> rejected;
    cdouble coherence{0.0, 0.0};

    std::size_t surviving() const;
};

/// penalty(K) = coefficient * K * ln N
struct ModelPenalty {
    double coefficient = 0.0;

    double operator()(int order, std::size_t n) const;
};

/// Least-squares fit of g on a support of 0, 1 or 2 dictionary columns.
struct HypothesisFit {
    std::vector<std::size_t> support;
    CVector amplitudes;
    double rss = 0.0;
    bool valid = false;
};

struct SelectionOptions {
    int max_scatterers = 2;
    std::size_t candidate_count = 2; // strongest spectrum columns seeding the pair search
};

/// Best-fitting support of each order (index = K). Order 1 is the exact best column; order 2
/// completes the strongest spectrum columns and the matched-filter peak with their best
/// partner over the grid, alternating until the pair settles.
/// Pairs of numerically identical columns are skipped.
std::array<HypothesisFit, 3> fit_hypotheses(const TomoDictionary& dictionary, const CVector& g,
                                            const SpectrumEstimate& candidates,
                                            const SelectionOptions& options = {});

/// Order minimizing 2 N ln(RSS_K) + penalty(K); ties go to the smaller order.
int choose_order(const std::array<HypothesisFit, 3>& fits, const ModelPenalty& penalty,
                 std::size_t n, int max_scatterers = 2);

/// Penalty coefficient at and above which order 2 is no longer selected for these fits
/// (-infinity if order 2 is never selected).
double double_selection_threshold(const std::array<HypothesisFit, 3>& fits, std::size_t n);

/// Model order selection by penalized negative log-likelihood under circular Gaussian
/// noise with variance RSS_K / N. Amplitudes come from the support re-fit.
PixelResult select_model(const TomoDictionary& dictionary, const CVector& g,
                         const SpectrumEstimate& candidates, const ModelPenalty& penalty,
                         const SelectionOptions& options = {});

/// Spectrum estimation settings shared by the pipeline and the calibration.
struct InversionSettings {
    SolverKind solver = SolverKind::tikhonov;
    std::optional<double> delta;   // default: estimated noise variance
    std::optional<double> epsilon; // default: 2 sigma sqrt(N ln L)
    double l1_tol = 1e-6;
    int l1_max_iter = 50000;
    SelectionOptions selection;
};

/// Noise variance guess from the residual of the best single-column fit.
double estimate_noise_variance(const TomoDictionary& dictionary, const CVector& g);

SpectrumEstimate estimate_spectrum(const TomoDictionary& dictionary, const CVector& g,
                                   const InversionSettings& settings);

struct CalibrationOptions {
    double target_fpr = 1e-3;
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    double snr_db_min = 0.0; // single-scatterer SNR drawn uniformly from this range
    double snr_db_max = 10.0;
    double max_coefficient = 1e4;
    InversionSettings inversion;
    int threads = 0;
};

struct CalibrationResult {
    ModelPenalty penalty;
    double training_fpr = 0.0;
    std::size_t trials = 0;
};

/// Smallest penalty coefficient whose empirical rate of selecting two scatterers on
/// single-scatterer-plus-noise trials is at most `target_fpr`.
CalibrationResult calibrate_penalty(const TomoDictionary& dictionary,
                                    const CalibrationOptions& options);

/// Rate of order-2 selections on fresh single-scatterer trials drawn like the calibration's.
double double_false_positive_rate(const TomoDictionary& dictionary, const ModelPenalty& penalty,
                                  const CalibrationOptions& options);

/// One single-scatterer calibration trial (exposed for tests).
CVector calibration_trial(const TomoDictionary& dictionary, const CalibrationOptions& options,
                          std::size_t index, GroundTruthScatterer* truth = nullptr);

/// Matched-filter search on a local grid of +-1 coarse cell per axis at `factor`
/// times the coarse density. `g_residual` must already exclude other scatterers.
/// Throws InvalidArgument for factor < 2 or a coarse estimate that is not a grid node.
ScattererEstimate offgrid_refine(const StackGeometry& geometry, const ElevationMotionGrid& grid,
                                 const CVector& g_residual, const ScattererEstimate& coarse,
                                 int factor);

/// Refines every estimate of a pixel, alternating over scatterers while subtracting the
/// others, then re-fits the complex amplitudes jointly.
PixelResult refine_pixel(const StackGeometry& geometry, const ElevationMotionGrid& grid,
                         const CVector& g, PixelResult result, int factor, int rounds = 2);

/// eta = (1/N) sum_n exp(-i (arg(model_n) - arg(g_n))). A zero model entry
/// contributes with model phase 0.
cdouble ensemble_coherence(const CVector& model, const CVector& g);

/// Model signal sum_k A_k r(s_k, v_k, a_k).
CVector model_signal(const StackGeometry& geometry, const SeasonalModel& seasonal,
                     const std::vector<ScattererEstimate>& estimates);

/// Computes the pixel coherence and stores |eta| into each estimate.
void assign_coherence(const StackGeometry& geometry, const SeasonalModel& seasonal,
                      const CVector& g, PixelResult& result);

/// Marks estimates with coherence below `threshold` as rejected.
PixelResult reject_outliers(PixelResult result, double threshold);

struct PixelInversionOptions {
    InversionSettings inversion;
    ModelPenalty penalty;
    int oversample_factor = 10;
    int refinement_rounds = 2;
    double coherence_threshold = 0.6;
};

/// Spectrum estimation, model selection, off-grid refinement and outlier rejection
/// for one pixel.
PixelResult invert_pixel(const TomoDictionary& dictionary, const CVector& g,
                         const PixelInversionOptions& options);

} // namespace tomosar
