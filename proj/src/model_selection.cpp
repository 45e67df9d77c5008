#include "tomosar/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tomosar/error.hpp"

namespace tomosar {

std::size_t PixelResult::surviving() const {
    std::size_t count = 0;
    for (std::size_t k = 0; k < estimates.size(); ++k)
        count += (k < rejected.size() && rejected[k]) ? 0 : 1;
    return count;
}

double ModelPenalty::operator()(int order, std::size_t n) const {
    return coefficient * static_cast<double>(order) * std::log(static_cast<double>(n));
}

namespace {

// Candidate columns: nonzero |gamma| in decreasing order, then the remaining columns
// by decreasing matched-filter correlation. Ties resolve to the lower index.
std::vector<std::size_t> rank_candidates(const CMatrix& r, const CVector& g, const CVector& gamma,
                                         std::size_t count) {
    const auto cols = static_cast<std::size_t>(r.cols());
    count = std::min(count, cols);
    const RVector corr = (r.adjoint() * g).cwiseAbs();
    std::vector<std::size_t> order(cols);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto better = [&](std::size_t i, std::size_t j) {
        const double gi = std::abs(gamma[static_cast<Eigen::Index>(i)]);
        const double gj = std::abs(gamma[static_cast<Eigen::Index>(j)]);
        if (gi != gj)
            return gi > gj;
        const double ci = corr[static_cast<Eigen::Index>(i)];
        const double cj = corr[static_cast<Eigen::Index>(j)];
        if (ci != cj)
            return ci > cj;
        return i < j;
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count),
                      order.end(), better);
    order.resize(count);
    return order;
}

HypothesisFit fit_single(const CMatrix& r, const CVector& g, std::size_t l) {
    const auto col = r.col(static_cast<Eigen::Index>(l));
    HypothesisFit fit;
    fit.support = {l};
    fit.amplitudes = CVector(1);
    fit.amplitudes[0] = col.dot(g) / col.squaredNorm();
    fit.rss = (g - fit.amplitudes[0] * col).squaredNorm();
    fit.valid = true;
    return fit;
}

HypothesisFit fit_pair(const CMatrix& r, const CVector& g, std::size_t i, std::size_t j) {
    const auto ci = r.col(static_cast<Eigen::Index>(i));
    const auto cj = r.col(static_cast<Eigen::Index>(j));
    const double nii = ci.squaredNorm();
    const double njj = cj.squaredNorm();
    const cdouble nij = ci.dot(cj); // ci^H cj
    const double det = nii * njj - std::norm(nij);
    HypothesisFit fit;
    if (!(det > 1e-10 * nii * njj))
        return fit;
    const cdouble bi = ci.dot(g);
    const cdouble bj = cj.dot(g);
    fit.support = {i, j};
    fit.amplitudes = CVector(2);
    fit.amplitudes[0] = (njj * bi - nij * bj) / det;
    fit.amplitudes[1] = (nii * bj - std::conj(nij) * bi) / det;
    fit.rss = (g - fit.amplitudes[0] * ci - fit.amplitudes[1] * cj).squaredNorm();
    fit.valid = true;
    return fit;
}

double log_rss(double rss, double floor) { return std::log(std::max(rss, floor)); }

double rss_floor(const std::array<HypothesisFit, 3>& fits) {
    return std::max(1e-24 * fits[0].rss, std::numeric_limits<double>::min());
}

} // namespace

std::array<HypothesisFit, 3> fit_hypotheses(const TomoDictionary& dictionary, const CVector& g,
                                            const SpectrumEstimate& candidates,
                                            const SelectionOptions& options) {
    const CMatrix& r = dictionary.matrix();
    if (static_cast<std::size_t>(g.size()) != dictionary.rows())
        throw DimensionError("measurement length does not match the dictionary");
    if (static_cast<std::size_t>(candidates.gamma.size()) != dictionary.cols())
        throw DimensionError("spectrum length does not match the dictionary");
    if (options.max_scatterers < 0 || options.max_scatterers > 2)
        throw InvalidArgument("max_scatterers must be 0, 1 or 2");

    std::array<HypothesisFit, 3> fits;
    fits[0].rss = g.squaredNorm();
    fits[0].amplitudes = CVector(0);
    fits[0].valid = true;
    if (options.max_scatterers == 0 || dictionary.cols() == 0)
        return fits;

    // The best single column over the whole grid is the matched-filter peak.
    const CVector corr = r.adjoint() * g;
    Eigen::Index peak = 0;
    (corr.cwiseAbs2().array() / r.colwise().squaredNorm().transpose().array()).maxCoeff(&peak);
    fits[1] = fit_single(r, g, static_cast<std::size_t>(peak));
    if (options.max_scatterers < 2 || dictionary.cols() < 2)
        return fits;

    // Pair supports: each seed column (spectrum peaks and the matched-filter peak) is
    // completed by its best partner over the grid, then the pair is re-seeded from the
    // partner until it stops changing.
    auto seeds = rank_candidates(r, g, candidates.gamma, std::max<std::size_t>(options.candidate_count, 1));
    if (std::find(seeds.begin(), seeds.end(), static_cast<std::size_t>(peak)) == seeds.end())
        seeds.push_back(static_cast<std::size_t>(peak));

    const RVector norms = r.colwise().squaredNorm().transpose();
    // R^H (g - a_i r_i) = R^H g - a_i R^H r_i, so each seed costs one pass over R.
    const auto best_partner = [&](std::size_t i) {
        const auto ci = r.col(static_cast<Eigen::Index>(i));
        const double nii = norms[static_cast<Eigen::Index>(i)];
        const cdouble ai = corr[static_cast<Eigen::Index>(i)] / nii;
        const CVector cross = r.adjoint() * ci;
        std::size_t best = i;
        double best_gain = -1.0;
        for (Eigen::Index j = 0; j < r.cols(); ++j) {
            if (static_cast<std::size_t>(j) == i)
                continue;
            const double njj = norms[j];
            const double denom = njj - std::norm(cross[j]) / nii;
            if (!(denom > 1e-10 * njj))
                continue;
            const double gain = std::norm(corr[j] - ai * cross[j]) / denom;
            if (gain > best_gain) {
                best_gain = gain;
                best = static_cast<std::size_t>(j);
            }
        }
        return best;
    };
    std::vector<std::size_t> visited;
    for (std::size_t seed : seeds) {
        if (std::find(visited.begin(), visited.end(), seed) != visited.end())
            continue;
        std::size_t i = seed;
        std::size_t j = best_partner(i);
        if (j == i)
            continue;
        HypothesisFit fit = fit_pair(r, g, std::min(i, j), std::max(i, j));
        for (int round = 0; round < 2 && fit.valid; ++round) {
            const std::size_t k = best_partner(j);
            if (k == j || k == i)
                break;
            HypothesisFit next = fit_pair(r, g, std::min(j, k), std::max(j, k));
            if (!next.valid || next.rss >= fit.rss)
                break;
            i = j;
            j = k;
            fit = std::move(next);
        }
        visited.push_back(i);
        visited.push_back(j);
        if (fit.valid && (!fits[2].valid || fit.rss < fits[2].rss))
            fits[2] = std::move(fit);
    }
    return fits;
}

int choose_order(const std::array<HypothesisFit, 3>& fits, const ModelPenalty& penalty,
                 std::size_t n, int max_scatterers) {
    const double floor = rss_floor(fits);
    const double two_n = 2.0 * static_cast<double>(n);
    int best = 0;
    double best_score = two_n * log_rss(fits[0].rss, floor);
    for (int k = 1; k <= std::min(max_scatterers, 2); ++k) {
        if (!fits[static_cast<std::size_t>(k)].valid)
            continue;
        const double score =
            two_n * log_rss(fits[static_cast<std::size_t>(k)].rss, floor) + penalty(k, n);
        if (score < best_score) {
            best = k;
            best_score = score;
        }
    }
    return best;
}

double double_selection_threshold(const std::array<HypothesisFit, 3>& fits, std::size_t n) {
    if (!fits[2].valid)
        return -std::numeric_limits<double>::infinity();
    const double ln_n = std::log(static_cast<double>(n));
    if (!(ln_n > 0.0))
        throw InvalidArgument("penalty calibration needs N >= 2");
    const double floor = rss_floor(fits);
    const double two_n = 2.0 * static_cast<double>(n);
    const double l2 = log_rss(fits[2].rss, floor);
    double threshold = two_n * (log_rss(fits[0].rss, floor) - l2) / (2.0 * ln_n);
    if (fits[1].valid)
        threshold = std::min(threshold, two_n * (log_rss(fits[1].rss, floor) - l2) / ln_n);
    return threshold;
}

PixelResult select_model(const TomoDictionary& dictionary, const CVector& g,
                         const SpectrumEstimate& candidates, const ModelPenalty& penalty,
                         const SelectionOptions& options) {
    const auto fits = fit_hypotheses(dictionary, g, candidates, options);
    PixelResult result;
    result.selected_model = choose_order(fits, penalty, dictionary.rows(), options.max_scatterers);
    const auto& chosen = fits[static_cast<std::size_t>(result.selected_model)];
    for (std::size_t k = 0; k < chosen.support.size(); ++k) {
        const GridPoint p = dictionary.grid().point(chosen.support[k]);
        ScattererEstimate e;
        e.s = p.s;
        e.v = p.v;
        e.a = p.a;
        e.column = chosen.support[k];
        e.complex_amplitude = chosen.amplitudes[static_cast<Eigen::Index>(k)];
        e.amplitude = std::abs(e.complex_amplitude);
        result.estimates.push_back(e);
    }
    result.rejected.assign(result.estimates.size(), false);
    return result;
}

double estimate_noise_variance(const TomoDictionary& dictionary, const CVector& g) {
    const CMatrix& r = dictionary.matrix();
    if (static_cast<std::size_t>(g.size()) != dictionary.rows())
        throw DimensionError("measurement length does not match the dictionary");
    const double n = static_cast<double>(r.rows());
    const double energy = g.squaredNorm();
    const double best = r.cols() > 0 ? (r.adjoint() * g).cwiseAbs2().maxCoeff() / n : 0.0;
    return std::max(energy - best, 0.0) / n;
}

SpectrumEstimate estimate_spectrum(const TomoDictionary& dictionary, const CVector& g,
                                   const InversionSettings& settings) {
    const double n = static_cast<double>(dictionary.rows());
    const double floor = std::max(1e-12 * g.squaredNorm() / n, 1e-300);
    if (settings.solver == SolverKind::tikhonov) {
        // Keeps the normal system factorizable on noiseless input and dense grids.
        const auto& gram = dictionary.gram();
        const double gram_floor =
            gram.rows() > 0 ? 1e-10 * gram.diagonal().real().mean() : 0.0;
        const double delta =
            settings.delta ? *settings.delta
                           : std::max({estimate_noise_variance(dictionary, g), floor, gram_floor});
        return tikhonov_solve(dictionary, g, delta);
    }
    double epsilon = 0.0;
    if (settings.epsilon) {
        epsilon = *settings.epsilon;
    } else {
        const double sigma = std::sqrt(std::max(estimate_noise_variance(dictionary, g), floor));
        const double l = std::max<double>(static_cast<double>(dictionary.cols()), 2.0);
        epsilon = 2.0 * sigma * std::sqrt(n * std::log(l));
    }
    return l1_solve(dictionary, g, epsilon, settings.l1_tol, settings.l1_max_iter);
}

} // namespace tomosar
