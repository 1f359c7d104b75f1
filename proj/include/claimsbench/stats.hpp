#pragma once

#include <optional>
#include <span>

namespace claimsbench::stats {

enum class CiMethod { PoissonExact, NormalApprox };

const char* to_string(CiMethod m);

// A claims-per-million-miles point estimate with its confidence interval.
// claim_count and exposure_mmi are carried when the estimate came straight
// from a count over an exposure; a mixed estimate leaves them unset.
struct RateEstimate {
    double rate_cpmm = 0.0;
    double ci_low_cpmm = 0.0;
    double ci_high_cpmm = 0.0;
    double confidence = 0.95;
    CiMethod method = CiMethod::PoissonExact;
    std::optional<long long> claim_count;
    std::optional<double> exposure_mmi;
};

enum class Verdict { Significant, NotSignificant };

const char* to_string(Verdict v);

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double regularized_lower_gamma(double shape, double x);

// Solves P(shape, x) = probability by bracketed bisection. The gamma CDF is
// strictly increasing in x, so the root is unique. Throws NoConvergence with
// the residual when the iteration cap is hit.
double inverse_regularized_lower_gamma(double shape, double probability);

double normal_cdf(double x);
double normal_quantile(double p);

// Garwood exact interval for a Poisson rate observed as claim_count events
// over exposure_mmi million miles. The lower expected-count bound solves
// P(k, L) = alpha/2 (zero when k = 0); the upper solves
// P(k + 1, U) = 1 - alpha/2; both are divided by the exposure.
RateEstimate poisson_exact_rate_ci(long long claim_count, double exposure_mmi, double confidence);

// rate +- z * SE with the lower bound clamped at zero.
RateEstimate normal_rate_ci(double rate_cpmm, double standard_error_cpmm, double confidence);

// sqrt(sum_r w_r^2 * f_r / E_r): standard error of a weighted sum of
// independent per-region Poisson rate estimates (rate f_r over E_r Mmi).
double mixture_standard_error(std::span<const double> weights, std::span<const double> rates_cpmm,
                              std::span<const double> exposures_mmi);

// 100 * (1 - fleet/baseline), from unrounded rates.
double percent_reduction(double fleet_rate_cpmm, double baseline_rate_cpmm);

// Significant iff the intervals are strictly disjoint; a shared endpoint
// counts as overlap.
Verdict significance(const RateEstimate& a, const RateEstimate& b);

// Display rounding: half-up at the given number of decimals.
double round_half_up(double value, int decimals);
long long round_half_up_int(double value);

}  // namespace claimsbench::stats
