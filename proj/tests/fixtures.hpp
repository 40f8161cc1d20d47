#pragma once

// Shared test helpers: seeded normal series and the bridge from a fitted filter
// to the 1-based oracle layout.

#include <random>

#include "maxcorr/filters.hpp"
#include "oracles.hpp"

namespace fixtures {

inline Eigen::VectorXd normal_series(maxcorr::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    Eigen::VectorXd x(n);
    for (maxcorr::Index i = 0; i < n; ++i) x(i) = d(rng);
    return x;
}

inline oracle::PlugIn to_oracle(const maxcorr::FittedFilter& f) {
    const int n = static_cast<int>(f.size());
    const int k = static_cast<int>(f.parameter_count());
    oracle::PlugIn p;
    p.k = k;
    p.eps = oracle::one_based(f.residuals.data(), n);
    p.sigma = oracle::one_based(f.sigma.data(), n);
    p.S.assign(n + 1, oracle::Vec(k, 0.0));
    p.G.assign(n + 1, oracle::Vec(k, 0.0));
    p.m.assign(n + 1, oracle::Vec(f.m.cols(), 0.0));
    for (int t = 1; t <= n; ++t) {
        for (int j = 0; j < k; ++j) {
            p.S[t][j] = f.S(t - 1, j);
            p.G[t][j] = f.G(t - 1, j);
        }
        for (int j = 0; j < f.m.cols(); ++j) p.m[t][j] = f.m(t - 1, j);
    }
    p.A.assign(k, oracle::Vec(f.A.cols(), 0.0));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < f.A.cols(); ++j) p.A[i][j] = f.A(i, j);
    return p;
}

}  // namespace fixtures
