#include <cmath>
#include <random>

#include "maxcorr/competing_tests.hpp"

namespace maxcorr {

double BrwbWeightLaw::low() { return 0.5 * (3.0 - std::sqrt(5.0)); }
double BrwbWeightLaw::high() { return 0.5 * (3.0 + std::sqrt(5.0)); }
double BrwbWeightLaw::low_probability() { return (1.0 + std::sqrt(5.0)) / (2.0 * std::sqrt(5.0)); }

Eigen::VectorXd draw_brwb_weights(const BlockScheme& scheme, Engine& rng) {
    std::bernoulli_distribution is_low(BrwbWeightLaw::low_probability());
    Eigen::VectorXd delta(scheme.count());
    for (Index s = 0; s < delta.size(); ++s)
        delta(s) = is_low(rng) ? BrwbWeightLaw::low() : BrwbWeightLaw::high();
    return expand_multipliers(scheme, delta);
}

double brwb_draw(const FittedFilter& filter, const Eigen::VectorXd& gamma, const Eigen::MatrixXd& gradients,
                 const Eigen::VectorXd& weights, const BrwbOptions& options) {
    const Index n = filter.size();
    const Index H = gamma.size();
    const double nd = static_cast<double>(n);
    const FittedFilter refit = refit_weighted(filter, weights);
    if (!refit.converged) throw NonConvergence("weighted re-estimation did not converge");
    const Eigen::VectorXd& e = refit.residuals;

    Eigen::MatrixXd correction;  // n x H, D(h)' A m_t(theta*)
    const bool expand = options.use_expansion && filter.parameter_count() > 0;
    if (expand) correction = refit.influence() * gradients.transpose();

    // suffix[h] = sum_{t>h} omega*_t (1-based t)
    Eigen::VectorXd suffix(n + 1);
    suffix(n) = 0.0;
    for (Index t = n - 1; t >= 0; --t) suffix(t) = suffix(t + 1) + weights(t);

    Eigen::VectorXd delta(H);
    for (Index h = 1; h <= H; ++h) {
        double sum = 0.0;
        for (Index t = h; t < n; ++t) {
            double term = e(t) * e(t - h);
            if (expand) term -= correction(t, h - 1);
            sum += weights(t) * term;
        }
        const double star = sum / nd;
        const double z = (suffix(h) - nd + static_cast<double>(h)) * gamma(h - 1) / nd;
        delta(h - 1) = star - gamma(h - 1) - z;
    }
    return cvm_from_autocovariances(delta, n, options.delta);
}

TestResult brwb_test(const FittedFilter& filter, const BootstrapSpec& spec_in, const BrwbOptions& options) {
    BootstrapSpec spec = spec_in.normalized();
    spec.method = BootstrapMethod::brwb;
    const Index n = filter.size();
    const Index b = spec.block.resolve(n);
    const BlockScheme scheme = make_blocks(n, b);
    const Eigen::VectorXd gamma = all_autocovariances(filter.residuals);
    Eigen::MatrixXd gradients;
    if (options.use_expansion && filter.parameter_count() > 0) gradients = expansion_gradients(filter, n - 1);

    TestResult r;
    r.test = "cvm-brwb";
    r.statistic = cvm_from_autocovariances(gamma, n, options.delta);
    r.lag = n - 1;
    r.block_size = b;
    r.draws_requested = spec.draws;
    r.seed = spec.seed;

    const Index allowed = static_cast<Index>(std::floor(options.max_discard_fraction * static_cast<double>(spec.draws)));
    std::vector<double> kept;
    kept.reserve(static_cast<std::size_t>(spec.draws));
    std::uint64_t digest = hash_key("brwb");
    for (Index i = 0; i < spec.draws; ++i) {
        Engine rng = make_stream(spec.seed, static_cast<std::uint64_t>(i));
        const Eigen::VectorXd w = draw_brwb_weights(scheme, rng);
        digest = mix64(digest ^ stream_digest(w));
        try {
            kept.push_back(brwb_draw(filter, gamma, gradients, w, options));
        } catch (const NonConvergence&) {
            if (++r.discarded > allowed)
                throw NonConvergence("random weighting bootstrap discarded more than " +
                                     std::to_string(allowed) + " of " + std::to_string(spec.draws) + " draws");
        }
    }
    if (r.discarded > 0) r.warnings.push_back(std::to_string(r.discarded) + " non-converged draws discarded");
    r.stream_digest = digest;
    r.draws = Eigen::Map<const Eigen::VectorXd>(kept.data(), static_cast<Index>(kept.size()));
    r.p_value = bootstrap_p_value(r.draws, r.statistic);
    return r;
}

TestResult brwb_test(const Eigen::Ref<const Eigen::VectorXd>& y, const FilterSpec& filter,
                     const BootstrapSpec& spec, const BrwbOptions& options) {
    return brwb_test(fit_filter(y, filter), spec, options);
}

}  // namespace maxcorr
