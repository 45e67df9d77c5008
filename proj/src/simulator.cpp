#include "tomosar/simulator.hpp"

#include <cmath>
#include <random>

#include "tomosar/error.hpp"

namespace tomosar {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 finalizer over the combined value
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<double> sample_baselines(std::size_t count, double span, std::uint64_t seed) {
    if (count == 0)
        throw InvalidArgument("baseline count must be at least 1");
    if (!(span > 0.0) || !std::isfinite(span))
        throw InvalidArgument("baseline span must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-span, span);
    std::vector<double> b(count);
    for (auto& x : b)
        x = uni(rng);
    b[count / 2] = 0.0;
    return b;
}

double noise_power(const std::vector<GroundTruthScatterer>& scatterers, double snr_db) {
    if (!std::isfinite(snr_db))
        throw InvalidArgument("SNR must be finite");
    double ref = scatterers.empty() ? 1.0 : 0.0;
    for (const auto& sc : scatterers)
        ref = std::max(ref, sc.amplitude);
    return ref * ref / std::pow(10.0, snr_db / 10.0);
}

CVector complex_noise(std::size_t count, double power, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = std::sqrt(power / 2.0);
    CVector w(static_cast<Eigen::Index>(count));
    for (auto& x : w) {
        const double re = normal(rng);
        const double im = normal(rng);
        x = cdouble(scale * re, scale * im);
    }
    return w;
}

CVector synthesize_pixel(const StackGeometry& geometry,
                         const std::vector<GroundTruthScatterer>& scatterers,
                         std::optional<double> snr_db, std::uint64_t seed,
                         const SeasonalModel& seasonal) {
    for (const auto& sc : scatterers) {
        if (!(sc.amplitude >= 0.0) || !std::isfinite(sc.amplitude) || !std::isfinite(sc.s) ||
            !std::isfinite(sc.v) || !std::isfinite(sc.a) || !std::isfinite(sc.phase))
            throw InvalidArgument("ground-truth scatterer fields must be finite, amplitude >= 0");
    }
    CVector g = CVector::Zero(static_cast<Eigen::Index>(geometry.size()));
    for (const auto& sc : scatterers) {
        const cdouble weight = std::polar(sc.amplitude, sc.phase);
        g += weight * steering_vector(geometry, {sc.s, sc.v, sc.a}, seasonal);
    }
    if (snr_db)
        g += complex_noise(geometry.size(), noise_power(scatterers, *snr_db), seed);
    return g;
}

} // namespace tomosar
