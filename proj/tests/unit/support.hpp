#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tomosar/dictionary.hpp"
#include "tomosar/grid.hpp"

namespace testing {

// 41 equally spaced baselines over +-250 m, 22-day repeat, master in the middle.
// Baselines are assigned to acquisitions in a fixed shuffled order so that
// elevation and velocity are not confounded.
inline tomosar::StackGeometry uniform_stack(std::size_t n = 41, double span = 250.0) {
    std::vector<double> b(n, 0.0);
    const std::size_t master = n / 2;
    for (std::size_t i = 0; i < n; ++i)
        b[i] = n > 1 ? -span + 2.0 * span * static_cast<double>(i) / static_cast<double>(n - 1)
                     : 0.0;
    b[master] = 0.0;
    std::mt19937_64 rng(7);
    std::shuffle(b.begin(), b.end(), rng);
    std::swap(*std::find(b.begin(), b.end(), 0.0), b[master]);
    return {0.031, 661820.0, b, tomosar::uniform_temporal_baselines(n, 22.0, master)};
}

// Wraps an arbitrary N x L matrix into a dictionary over a placeholder geometry and grid.
inline tomosar::TomoDictionary wrap_matrix(const tomosar::CMatrix& m) {
    const auto n = static_cast<std::size_t>(m.rows());
    const auto l = static_cast<std::size_t>(m.cols());
    std::vector<double> b(n, 0.0);
    std::vector<double> t(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        b[i] = static_cast<double>(i);
        t[i] = 0.1 * static_cast<double>(i);
    }
    std::vector<double> s(l);
    for (std::size_t i = 0; i < l; ++i)
        s[i] = static_cast<double>(i);
    return {tomosar::StackGeometry(0.031, 661820.0, b, t),
            tomosar::ElevationMotionGrid(s, {0.0}, {0.0}), m};
}

inline nlohmann::json load_json(const std::string& name) {
    std::ifstream in(std::string(TOMOSAR_TEST_DATA) + "/" + name);
    return nlohmann::json::parse(in);
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace testing
