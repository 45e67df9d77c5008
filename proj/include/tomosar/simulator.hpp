#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tomosar/dictionary.hpp"

namespace tomosar {

/// A point scatterer with known parameters.
struct GroundTruthScatterer {
    double s = 0.0;         // m
    double v = 0.0;         // mm/year
    double a = 0.0;         // mm
    double amplitude = 1.0; // linear
    double phase = 0.0;     // rad
};

struct SimulatedPixel {
    CVector g;
    std::vector<GroundTruthScatterer> truth;
    std::uint64_t seed = 0;
};

struct SyntheticStack {
    StackGeometry geometry;
    std::vector<SimulatedPixel> pixels;
    std::optional<double> snr_db;
};

/// `count` baselines uniform on [-span, span] with entry `count / 2` forced to zero.
std::vector<double> sample_baselines(std::size_t count, double span, std::uint64_t seed);

/// Noise power E|w_n|^2 for a scatterer set at the given SNR.
///
/// SNR is A_ref^2 / E|w_n|^2 where A_ref is the strongest amplitude, or 1 when
/// the set is empty. SCR and SNR are treated as the same quantity.
double noise_power(const std::vector<GroundTruthScatterer>& scatterers, double snr_db);

/// Forward model g_n = sum_k A_k e^{i phi_k} R_n(s_k, v_k, a_k) + w_n with circular
/// white Gaussian noise. `snr_db == nullopt` disables the noise.
CVector synthesize_pixel(const StackGeometry& geometry,
                         const std::vector<GroundTruthScatterer>& scatterers,
                         std::optional<double> snr_db, std::uint64_t seed,
                         const SeasonalModel& seasonal = {});

/// Circular complex Gaussian samples with E|w|^2 = power.
CVector complex_noise(std::size_t count, double power, std::uint64_t seed);

/// Derives an independent stream seed for item `index` from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

} // namespace tomosar
