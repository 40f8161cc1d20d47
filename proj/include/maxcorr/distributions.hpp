#pragma once

namespace maxcorr {

double normal_cdf(double x);

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double regularized_gamma_q(double a, double x);

/// P(chi2(dof) > x).
double chi2_upper_tail(double x, double dof);

}  // namespace maxcorr
