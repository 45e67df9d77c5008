#include "tomosar/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <omp.h>

#include "tomosar/error.hpp"

namespace tomosar {

namespace {

void check_options(const CalibrationOptions& options) {
    if (!(options.target_fpr > 0.0 && options.target_fpr <= 1.0))
        throw InvalidArgument("target false-positive rate must lie in (0, 1]");
    if (options.trials == 0)
        throw InvalidArgument("calibration needs at least one trial");
    if (!(options.snr_db_min <= options.snr_db_max))
        throw InvalidArgument("calibration SNR range is empty");
}

double uniform_on(std::mt19937_64& rng, std::span<const double> axis) {
    if (axis.size() == 1)
        return axis[0];
    return std::uniform_real_distribution<double>(axis.front(), axis.back())(rng);
}

// Runs `fn(index, g)` for every trial; output slots are per index so the result
// does not depend on the thread count.
template <class Fn>
void for_each_trial(const TomoDictionary& dictionary, const CalibrationOptions& options, Fn&& fn) {
    const auto trials = static_cast<std::ptrdiff_t>(options.trials);
    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < trials; ++i) {
        try {
            const auto index = static_cast<std::size_t>(i);
            fn(index, calibration_trial(dictionary, options, index));
        } catch (...) {
#pragma omp critical(tomosar_calibration_failure)
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace

CVector calibration_trial(const TomoDictionary& dictionary, const CalibrationOptions& options,
                          std::size_t index, GroundTruthScatterer* truth) {
    const std::uint64_t trial_seed = derive_seed(options.seed, index);
    std::mt19937_64 rng(trial_seed);
    const auto& grid = dictionary.grid();
    GroundTruthScatterer sc;
    sc.s = uniform_on(rng, grid.s_axis());
    sc.v = uniform_on(rng, grid.v_axis());
    sc.a = uniform_on(rng, grid.a_axis());
    sc.amplitude = 1.0;
    sc.phase = std::uniform_real_distribution<double>(-std::numbers::pi, std::numbers::pi)(rng);
    const double snr_db =
        options.snr_db_min == options.snr_db_max
            ? options.snr_db_min
            : std::uniform_real_distribution<double>(options.snr_db_min, options.snr_db_max)(rng);
    if (truth)
        *truth = sc;
    return synthesize_pixel(dictionary.geometry(), {sc}, snr_db, derive_seed(trial_seed, 0),
                            grid.seasonal());
}

CalibrationResult calibrate_penalty(const TomoDictionary& dictionary,
                                    const CalibrationOptions& options) {
    check_options(options);
    if (static_cast<double>(options.trials) * options.target_fpr < 1.0 - 1e-9)
        throw InvalidArgument("calibration needs at least 1 / target_fpr trials");
    if (options.inversion.selection.max_scatterers < 2)
        return {ModelPenalty{0.0}, 0.0, options.trials};

    const std::size_t n = dictionary.rows();
    std::vector<double> thresholds(options.trials);
    for_each_trial(dictionary, options, [&](std::size_t i, const CVector& g) {
        const auto spectrum = estimate_spectrum(dictionary, g, options.inversion);
        const auto fits = fit_hypotheses(dictionary, g, spectrum, options.inversion.selection);
        thresholds[i] = double_selection_threshold(fits, n);
    });

    // Trial i is a false positive iff coefficient < thresholds[i]. With the thresholds in
    // decreasing order, allowing k false positives means c = thresholds[k].
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    const auto allowed = static_cast<std::size_t>(
        std::floor(options.target_fpr * static_cast<double>(options.trials) + 1e-9));
    double coefficient = 0.0;
    if (allowed < thresholds.size())
        coefficient = std::max(0.0, thresholds[allowed]);
    if (coefficient > options.max_coefficient)
        throw InvalidArgument("target false-positive rate unreachable: needs penalty coefficient " +
                              std::to_string(coefficient) + " > search limit " +
                              std::to_string(options.max_coefficient));

    std::size_t positives = 0;
    for (double t : thresholds)
        positives += coefficient < t ? 1 : 0;
    return {ModelPenalty{coefficient},
            static_cast<double>(positives) / static_cast<double>(options.trials), options.trials};
}

double double_false_positive_rate(const TomoDictionary& dictionary, const ModelPenalty& penalty,
                                  const CalibrationOptions& options) {
    check_options(options);
    std::vector<char> positive(options.trials, 0);
    for_each_trial(dictionary, options, [&](std::size_t i, const CVector& g) {
        const auto spectrum = estimate_spectrum(dictionary, g, options.inversion);
        const auto fits = fit_hypotheses(dictionary, g, spectrum, options.inversion.selection);
        positive[i] = choose_order(fits, penalty, dictionary.rows(),
                                   options.inversion.selection.max_scatterers) == 2;
    });
    const auto count = std::count(positive.begin(), positive.end(), 1);
    return static_cast<double>(count) / static_cast<double>(options.trials);
}

} // namespace tomosar
