#include "tomosar/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <omp.h>

namespace tomosar {

PipelineError::PipelineError(std::string stage, std::optional<std::size_t> pixel,
                             const std::string& what)
    : Error("stage '" + stage + "'" +
            (pixel ? ", pixel " + std::to_string(*pixel) : std::string()) + ": " + what),
      stage_(std::move(stage)),
      pixel_(pixel),
      detail_(what) {}

void PipelineConfig::validate() const {
    if (!std::isfinite(scr_threshold_db))
        throw InvalidArgument("SCR threshold must be finite");
    if (!(sidelobe_threshold >= 0.0 && sidelobe_threshold <= 1.0))
        throw InvalidArgument("sidelobe threshold must lie in [0, 1]");
    if (!(coherence_threshold >= 0.0 && coherence_threshold <= 1.0))
        throw InvalidArgument("coherence threshold must lie in [0, 1]");
    if (max_scatterers < 1 || max_scatterers > 2)
        throw InvalidArgument("max_scatterers must be 1 or 2");
    if (oversample_factor < 2)
        throw InvalidArgument("oversampling factor must be at least 2");
    if (!(target_fpr > 0.0 && target_fpr < 1.0))
        throw InvalidArgument("target false-positive rate must lie in (0, 1)");
    if (delta && !(*delta > 0.0))
        throw InvalidArgument("delta must be positive");
    if (epsilon && !(*epsilon > 0.0))
        throw InvalidArgument("epsilon must be positive");
    if (penalty_coefficient && !(*penalty_coefficient >= 0.0))
        throw InvalidArgument("penalty coefficient must be nonnegative");
    if (area_km2 && !(*area_km2 > 0.0))
        throw InvalidArgument("area must be positive");
    if (candidate_count < 1)
        throw InvalidArgument("candidate count must be at least 1");
}

InversionSettings PipelineConfig::inversion() const {
    InversionSettings s;
    s.solver = solver;
    s.delta = delta;
    s.epsilon = epsilon;
    s.l1_tol = l1_tol;
    s.selection.max_scatterers = max_scatterers;
    s.selection.candidate_count = candidate_count;
    return s;
}

ElevationMotionGrid PipelineConfig::grid(const SeasonalModel& seasonal) const {
    return ElevationMotionGrid::uniform(s_axis, v_axis, a_axis, seasonal);
}

CandidateSet mask_candidates(std::span<const QualityPixel> pixels, const PipelineConfig& config) {
    CandidateSet out;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const auto& p = pixels[i];
        if (!p.scr_db || !p.sidelobe_likelihood)
            throw InvalidArgument("pixel " + std::to_string(p.id) +
                                  " lacks its SCR or sidelobe-likelihood annotation");
        if (*p.scr_db >= config.scr_threshold_db &&
            *p.sidelobe_likelihood <= config.sidelobe_threshold)
            out.indices.push_back(i);
    }
    out.retained_fraction =
        pixels.empty() ? 0.0
                       : static_cast<double>(out.indices.size()) / static_cast<double>(pixels.size());
    return out;
}

CVector compensate_aps(const CVector& g, std::span<const double> aps_phases) {
    if (static_cast<std::size_t>(g.size()) != aps_phases.size())
        throw DimensionError("APS length " + std::to_string(aps_phases.size()) +
                             " does not match the measurement length " + std::to_string(g.size()));
    CVector out(g.size());
    for (Eigen::Index n = 0; n < g.size(); ++n)
        out[n] = g[n] * std::polar(1.0, -aps_phases[static_cast<std::size_t>(n)]);
    return out;
}

Scoring score_against_truth(const StackData& stack, const CandidateSet& candidates,
                            std::span<const PixelResult> results, double radius) {
    Scoring sc;
    sc.match_radius = radius;
    std::vector<const PixelResult*> by_pixel(stack.pixels.size(), nullptr);
    for (std::size_t c = 0; c < candidates.indices.size(); ++c)
        by_pixel[candidates.indices[c]] = &results[c];

    double ss_s = 0.0, ss_v = 0.0, ss_a = 0.0;
    for (std::size_t i = 0; i < stack.pixels.size(); ++i) {
        const auto& truth = stack.pixels[i].truth;
        sc.truth_scatterers += truth.size();
        std::vector<const ScattererEstimate*> open;
        if (by_pixel[i]) {
            const auto& r = *by_pixel[i];
            for (std::size_t k = 0; k < r.estimates.size(); ++k)
                if (!r.rejected[k])
                    open.push_back(&r.estimates[k]);
        }
        for (const auto& t : truth) {
            auto best = open.end();
            double best_dist = radius;
            for (auto it = open.begin(); it != open.end(); ++it) {
                const double dist = std::abs((*it)->s - t.s);
                if (dist <= best_dist) {
                    best_dist = dist;
                    best = it;
                }
            }
            if (best == open.end()) {
                ++sc.missed;
                continue;
            }
            ++sc.detected;
            ss_s += std::pow((*best)->s - t.s, 2);
            ss_v += std::pow((*best)->v - t.v, 2);
            ss_a += std::pow((*best)->a - t.a, 2);
            open.erase(best);
        }
        sc.false_alarms += open.size();
    }
    if (sc.detected > 0) {
        const double n = static_cast<double>(sc.detected);
        sc.rmse_s = std::sqrt(ss_s / n);
        sc.rmse_v = std::sqrt(ss_v / n);
        sc.rmse_a = std::sqrt(ss_a / n);
    }
    return sc;
}

namespace {

PipelineResult run(const StackData& stack, const PipelineConfig& config, bool serial) {
    try {
        config.validate();
    } catch (const Error& e) {
        throw PipelineError("config", std::nullopt, e.what());
    }

    const auto dictionary = [&] {
        try {
            const auto grid = config.grid(stack.seasonal);
            DictionaryOptions opts;
            opts.threads = config.threads;
            return serial ? reference::build_dictionary(stack.geometry, grid, opts)
                          : build_dictionary(stack.geometry, grid, opts);
        } catch (const Error& e) {
            throw PipelineError("dictionary", std::nullopt, e.what());
        }
    }();

    PipelineResult out;
    try {
        out.candidates = mask_candidates(stack.pixels, config);
    } catch (const Error& e) {
        throw PipelineError("mask", std::nullopt, e.what());
    }

    if (config.penalty_coefficient) {
        out.penalty = ModelPenalty{*config.penalty_coefficient};
    } else {
        try {
            CalibrationOptions cal;
            cal.target_fpr = config.target_fpr;
            cal.trials = config.calibration_trials > 0
                             ? config.calibration_trials
                             : static_cast<std::size_t>(std::ceil(10.0 / config.target_fpr));
            cal.seed = config.calibration_seed;
            cal.snr_db_min = config.calibration_snr_db_min;
            cal.snr_db_max = config.calibration_snr_db_max;
            cal.inversion = config.inversion();
            cal.threads = serial ? 1 : config.threads;
            out.penalty = calibrate_penalty(dictionary, cal).penalty;
        } catch (const Error& e) {
            throw PipelineError("calibrate", std::nullopt, e.what());
        }
    }

    PixelInversionOptions inv;
    inv.inversion = config.inversion();
    inv.penalty = out.penalty;
    inv.oversample_factor = config.oversample_factor;
    inv.coherence_threshold = config.coherence_threshold;

    const auto count = static_cast<std::ptrdiff_t>(out.candidates.indices.size());
    out.pixel_results.resize(out.candidates.indices.size());
    std::vector<std::string> failures(out.candidates.indices.size());
    std::vector<std::string> failure_stage(out.candidates.indices.size());

    const auto process = [&](std::ptrdiff_t c) {
        const auto& pixel = stack.pixels[out.candidates.indices[static_cast<std::size_t>(c)]];
        const char* stage = "aps";
        try {
            CVector g = pixel.aps ? compensate_aps(pixel.g, *pixel.aps) : pixel.g;
            stage = "invert";
            out.pixel_results[static_cast<std::size_t>(c)] = invert_pixel(dictionary, g, inv);
        } catch (const std::exception& e) {
            failures[static_cast<std::size_t>(c)] = e.what();
            failure_stage[static_cast<std::size_t>(c)] = stage;
        }
    };
    if (serial) {
        for (std::ptrdiff_t c = 0; c < count; ++c)
            process(c);
    } else {
        const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
        for (std::ptrdiff_t c = 0; c < count; ++c)
            process(c);
    }
    for (std::size_t c = 0; c < failures.size(); ++c) {
        if (!failures[c].empty())
            throw PipelineError(failure_stage[c], stack.pixels[out.candidates.indices[c]].id,
                                failures[c]);
    }

    for (std::size_t c = 0; c < out.pixel_results.size(); ++c) {
        const auto& pixel = stack.pixels[out.candidates.indices[c]];
        const auto& r = out.pixel_results[c];
        for (std::size_t k = 0; k < r.estimates.size(); ++k) {
            const auto& e = r.estimates[k];
            out.points.push_back(
                {pixel.id, k, e.s, e.v, e.a, e.amplitude, e.coherence, r.rejected[k], pixel.x,
                 pixel.y});
        }
    }

    const auto area = config.area_km2 ? config.area_km2 : stack.area_km2;
    if (!area)
        throw PipelineError("stats", std::nullopt,
                            "scene area unknown; set area_km2 in the stack or the config");
    try {
        out.stats = cloud_stats(out.pixel_results, *area);
    } catch (const Error& e) {
        throw PipelineError("stats", std::nullopt, e.what());
    }

    const bool has_truth = std::any_of(stack.pixels.begin(), stack.pixels.end(),
                                       [](const auto& p) { return !p.truth.empty(); });
    if (has_truth) {
        const auto& geo = stack.geometry;
        const double rho =
            geo.elevation_aperture() > 0.0
                ? elevation_resolution(geo.wavelength(), geo.master_range(), geo.elevation_aperture())
                : 0.0;
        out.scoring = score_against_truth(stack, out.candidates, out.pixel_results, rho / 2.0);
    }
    return out;
}

} // namespace

PipelineResult run_pipeline(const StackData& stack, const PipelineConfig& config) {
    return run(stack, config, false);
}

namespace reference {
PipelineResult run_pipeline(const StackData& stack, const PipelineConfig& config) {
    return run(stack, config, true);
}
} // namespace reference

namespace {

double draw_on_axis(std::mt19937_64& rng, const std::vector<double>& axis, bool on_grid) {
    // Interior of the axis so the truth never sits on the grid boundary.
    if (axis.size() <= 2)
        return axis[axis.size() / 2];
    if (on_grid) {
        std::uniform_int_distribution<std::size_t> pick(1, axis.size() - 2);
        return axis[pick(rng)];
    }
    return std::uniform_real_distribution<double>(axis[1], axis[axis.size() - 2])(rng);
}

} // namespace

StackData simulate_scene(const SceneOptions& o) {
    if (o.rows == 0 || o.cols == 0)
        throw InvalidArgument("scene needs at least one pixel");
    if (o.n_images < 2)
        throw InvalidArgument("scene needs at least two acquisitions");
    if (!(o.candidate_fraction >= 0.0 && o.sidelobe_fraction >= 0.0 &&
          o.candidate_fraction + o.sidelobe_fraction <= 1.0))
        throw InvalidArgument("candidate and sidelobe fractions must sum to at most 1");
    if (!(o.double_fraction >= 0.0 && o.double_fraction <= 1.0))
        throw InvalidArgument("double fraction must lie in [0, 1]");
    if (!(o.pixel_spacing > 0.0))
        throw InvalidArgument("pixel spacing must be positive");

    const std::size_t master = o.n_images / 2;
    StackGeometry geometry(o.wavelength, o.master_range,
                           sample_baselines(o.n_images, o.baseline_span, derive_seed(o.seed, 0)),
                           uniform_temporal_baselines(o.n_images, o.interval_days, master));
    const auto s_axis = o.s_axis.samples();
    const auto v_axis = o.v_axis.samples();
    const auto a_axis = o.a_axis.samples();
    const double rho = elevation_resolution(o.wavelength, o.master_range,
                                            std::max(geometry.elevation_aperture(), 1e-9));

    // Per-acquisition APS ramps across the scene; the master carries none.
    std::vector<std::array<double, 3>> ramps(o.n_images, {0.0, 0.0, 0.0});
    if (o.aps_std > 0.0) {
        std::mt19937_64 rng(derive_seed(o.seed, 1));
        std::normal_distribution<double> normal(0.0, o.aps_std);
        for (std::size_t n = 0; n < o.n_images; ++n)
            if (n != master)
                ramps[n] = {normal(rng), normal(rng), normal(rng)};
    }

    StackData stack{geometry, o.seasonal, {}, o.snr_db, o.seed,
                    static_cast<double>(o.rows * o.cols) * o.pixel_spacing * o.pixel_spacing * 1e-6};
    stack.pixels.reserve(o.rows * o.cols);
    const double scr_candidate = o.snr_db.value_or(30.0);
    for (std::size_t row = 0; row < o.rows; ++row) {
        for (std::size_t col = 0; col < o.cols; ++col) {
            const std::size_t id = row * o.cols + col;
            const std::uint64_t pixel_seed = derive_seed(derive_seed(o.seed, 2), id);
            std::mt19937_64 rng(pixel_seed);
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);

            QualityPixel p;
            p.id = id;
            p.x = static_cast<double>(col) * o.pixel_spacing;
            p.y = static_cast<double>(row) * o.pixel_spacing;
            std::vector<GroundTruthScatterer> content;
            const double kind = uni(rng);
            if (kind < o.candidate_fraction) {
                p.scr_db = scr_candidate;
                p.sidelobe_likelihood = 0.4 * uni(rng);
                const std::size_t k = uni(rng) < o.double_fraction ? 2 : 1;
                for (std::size_t i = 0; i < k; ++i) {
                    GroundTruthScatterer sc;
                    for (int attempt = 0; attempt < 100; ++attempt) {
                        sc.s = draw_on_axis(rng, s_axis, o.on_grid);
                        if (i == 0 || std::abs(sc.s - p.truth[0].s) >= 0.8 * rho)
                            break;
                    }
                    sc.v = draw_on_axis(rng, v_axis, o.on_grid);
                    sc.a = draw_on_axis(rng, a_axis, o.on_grid);
                    sc.amplitude = 1.0;
                    sc.phase = phase(rng);
                    p.truth.push_back(sc);
                }
                content = p.truth;
            } else if (kind < o.candidate_fraction + o.sidelobe_fraction) {
                // Bright sidelobe of a neighbour: looks like a scatterer, carries no truth.
                p.scr_db = scr_candidate;
                p.sidelobe_likelihood = 0.5 + 0.5 * uni(rng);
                content.push_back({draw_on_axis(rng, s_axis, false), 0.0, 0.0, 0.5, phase(rng)});
            } else {
                p.scr_db = -5.0 + 6.6 * uni(rng); // below the 1.7 dB mask
                p.sidelobe_likelihood = uni(rng);
            }

            const std::optional<double> snr = o.snr_db;
            p.g = synthesize_pixel(geometry, content, snr, derive_seed(pixel_seed, 1), o.seasonal);
            if (o.aps_std > 0.0) {
                std::vector<double> aps(o.n_images);
                const double u = static_cast<double>(col) / static_cast<double>(o.cols);
                const double w = static_cast<double>(row) / static_cast<double>(o.rows);
                for (std::size_t n = 0; n < o.n_images; ++n)
                    aps[n] = ramps[n][0] + ramps[n][1] * u + ramps[n][2] * w;
                for (std::size_t n = 0; n < o.n_images; ++n)
                    p.g[static_cast<Eigen::Index>(n)] *= std::polar(1.0, aps[n]);
                p.aps = std::move(aps);
            }
            stack.pixels.push_back(std::move(p));
        }
    }
    return stack;
}

} // namespace tomosar
