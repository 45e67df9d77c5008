#include "tomosar/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "tomosar/error.hpp"

namespace tomosar {

cdouble ensemble_coherence(const CVector& model, const CVector& g) {
    if (model.size() != g.size())
        throw DimensionError("model and measurement lengths differ");
    if (g.size() == 0)
        throw InvalidArgument("ensemble coherence of an empty measurement");
    cdouble acc{0.0, 0.0};
    for (Eigen::Index n = 0; n < g.size(); ++n) {
        // std::arg(0) == 0, which is the documented convention for a vanishing model
        const double residual = std::arg(model[n]) - std::arg(g[n]);
        acc += std::polar(1.0, -residual);
    }
    return acc / static_cast<double>(g.size());
}

CVector model_signal(const StackGeometry& geometry, const SeasonalModel& seasonal,
                     const std::vector<ScattererEstimate>& estimates) {
    CVector m = CVector::Zero(static_cast<Eigen::Index>(geometry.size()));
    for (const auto& e : estimates)
        m += e.complex_amplitude * steering_vector(geometry, {e.s, e.v, e.a}, seasonal);
    return m;
}

void assign_coherence(const StackGeometry& geometry, const SeasonalModel& seasonal,
                      const CVector& g, PixelResult& result) {
    result.coherence = ensemble_coherence(model_signal(geometry, seasonal, result.estimates), g);
    const double mag = std::min(1.0, std::abs(result.coherence));
    for (auto& e : result.estimates)
        e.coherence = mag;
}

PixelResult reject_outliers(PixelResult result, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw InvalidArgument("coherence threshold must lie in [0, 1]");
    result.rejected.resize(result.estimates.size());
    for (std::size_t k = 0; k < result.estimates.size(); ++k)
        result.rejected[k] = result.estimates[k].coherence < threshold;
    return result;
}

PixelResult invert_pixel(const TomoDictionary& dictionary, const CVector& g,
                         const PixelInversionOptions& options) {
    const auto spectrum = estimate_spectrum(dictionary, g, options.inversion);
    PixelResult result =
        select_model(dictionary, g, spectrum, options.penalty, options.inversion.selection);
    if (result.selected_model > 0) {
        result = refine_pixel(dictionary.geometry(), dictionary.grid(), g, std::move(result),
                              options.oversample_factor, options.refinement_rounds);
    }
    assign_coherence(dictionary.geometry(), dictionary.grid().seasonal(), g, result);
    return reject_outliers(std::move(result), options.coherence_threshold);
}

} // namespace tomosar
