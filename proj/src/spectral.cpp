#include "maxcorr/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace maxcorr {

double psi_basis(Index h, double lambda) {
    if (h < 0) throw InvalidArgument("psi_h needs h >= 0");
    if (h == 0) return lambda / (2.0 * std::numbers::pi);
    const double hd = static_cast<double>(h);
    return std::sin(hd * lambda) / (hd * std::numbers::pi);
}

SpectralGrid SpectralGrid::make(double delta) {
    if (!(delta > 0.0) || delta > std::numbers::pi) throw InvalidArgument("spectral step must lie in (0, pi]");
    const Index cells = static_cast<Index>(std::ceil(std::numbers::pi / delta - 1e-12));
    SpectralGrid grid;
    grid.delta = delta;
    grid.midpoints.resize(cells);
    grid.widths.resize(cells);
    for (Index k = 0; k < cells; ++k) {
        const double lo = static_cast<double>(k) * delta;
        const double hi = std::min(lo + delta, std::numbers::pi);
        grid.midpoints(k) = 0.5 * (lo + hi);
        grid.widths(k) = hi - lo;
    }
    return grid;
}

Eigen::MatrixXd psi_matrix(const SpectralGrid& grid, Index max_lag) {
    Eigen::MatrixXd psi(grid.size(), max_lag);
    for (Index h = 1; h <= max_lag; ++h)
        for (Index k = 0; k < grid.size(); ++k) psi(k, h - 1) = psi_basis(h, grid.midpoints(k));
    return psi;
}

std::shared_ptr<const Eigen::MatrixXd> weighted_psi_matrix(Index max_lag, double delta) {
    if (max_lag < 1) throw InvalidArgument("spectral sum needs at least one lag");
    static std::mutex mutex;
    static std::map<std::pair<Index, double>, std::shared_ptr<const Eigen::MatrixXd>> cache;

    const std::lock_guard lock(mutex);
    auto& slot = cache[{max_lag, delta}];
    if (!slot) {
        const SpectralGrid grid = SpectralGrid::make(delta);
        auto r = std::make_shared<Eigen::MatrixXd>(psi_matrix(grid, max_lag));
        *r = grid.widths.cwiseSqrt().asDiagonal() * *r;
        slot = std::move(r);
    }
    return slot;
}

double cvm_from_autocovariances(const Eigen::Ref<const Eigen::VectorXd>& gamma, Index n, double delta) {
    const auto r = weighted_psi_matrix(gamma.size(), delta);
    return static_cast<double>(n) * (*r * gamma).squaredNorm();
}

}  // namespace maxcorr
