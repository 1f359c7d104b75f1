#include "claimsbench/stats.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "claimsbench/errors.hpp"

namespace claimsbench::stats {

const char* to_string(CiMethod m) {
    return m == CiMethod::PoissonExact ? "PoissonExact" : "NormalApprox";
}

const char* to_string(Verdict v) {
    return v == Verdict::Significant ? "Significant" : "NotSignificant";
}

namespace {

// Series expansion of P(a, x), converges fast for x < a + 1.
double lower_gamma_series(double a, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * eps) {
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    fail(ErrorKind::NoConvergence, "lower gamma series did not converge (shape=" +
                                       std::to_string(a) + ", x=" + std::to_string(x) + ")");
}

// Continued fraction for Q(a, x) = 1 - P(a, x), for x >= a + 1 (Lentz).
double upper_gamma_cf(double a, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) {
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
        }
    }
    fail(ErrorKind::NoConvergence, "upper gamma continued fraction did not converge (shape=" +
                                       std::to_string(a) + ", x=" + std::to_string(x) + ")");
}

}  // namespace

double regularized_lower_gamma(double shape, double x) {
    if (shape <= 0.0) fail(ErrorKind::InvariantViolation, "gamma shape must be positive");
    if (x < 0.0) fail(ErrorKind::InvariantViolation, "gamma argument must be non-negative");
    if (x == 0.0) return 0.0;
    if (x < shape + 1.0) return lower_gamma_series(shape, x);
    return 1.0 - upper_gamma_cf(shape, x);
}

double inverse_regularized_lower_gamma(double shape, double probability) {
    if (shape <= 0.0) fail(ErrorKind::InvariantViolation, "gamma shape must be positive");
    if (probability <= 0.0 || probability >= 1.0) {
        fail(ErrorKind::InvariantViolation, "probability must lie in (0, 1)");
    }

    double lo = 0.0;
    double hi = shape + 20.0 * std::sqrt(shape) + 20.0;
    int expansions = 0;
    while (regularized_lower_gamma(shape, hi) < probability) {
        hi *= 2.0;
        if (++expansions > 60) {
            fail(ErrorKind::NoConvergence,
                 "gamma inverse bracket expansion failed (shape=" + std::to_string(shape) +
                     ", probability=" + std::to_string(probability) + ")");
        }
    }

    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-12; ++iter) {
        mid = 0.5 * (lo + hi);
        if (regularized_lower_gamma(shape, mid) < probability) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid = 0.5 * (lo + hi);
    const double residual = regularized_lower_gamma(shape, mid) - probability;
    if ((hi - lo) > 1e-12 || std::fabs(residual) > 1e-10) {
        fail(ErrorKind::NoConvergence,
             "gamma inverse bisection residual " + std::to_string(residual) +
                 " (shape=" + std::to_string(shape) + ", probability=" + std::to_string(probability) +
                 ")");
    }
    return mid;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_quantile(double p) {
    if (p <= 0.0 || p >= 1.0) fail(ErrorKind::InvariantViolation, "probability must lie in (0, 1)");
    double lo = -40.0;
    double hi = 40.0;
    while (hi - lo > 1e-13) {
        double mid = 0.5 * (lo + hi);
        if (normal_cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

RateEstimate poisson_exact_rate_ci(long long claim_count, double exposure_mmi, double confidence) {
    if (claim_count < 0) fail(ErrorKind::InvariantViolation, "claim count must be non-negative");
    if (!(exposure_mmi > 0.0)) fail(ErrorKind::ZeroExposure, "exposure must be positive");
    if (confidence <= 0.0 || confidence >= 1.0) {
        fail(ErrorKind::InvariantViolation, "confidence must lie in (0, 1)");
    }

    const double alpha = 1.0 - confidence;
    const double k = static_cast<double>(claim_count);

    const double lower_count =
        claim_count == 0 ? 0.0 : inverse_regularized_lower_gamma(k, alpha / 2.0);
    const double upper_count = inverse_regularized_lower_gamma(k + 1.0, 1.0 - alpha / 2.0);

    RateEstimate est;
    est.rate_cpmm = k / exposure_mmi;
    est.ci_low_cpmm = lower_count / exposure_mmi;
    est.ci_high_cpmm = upper_count / exposure_mmi;
    est.confidence = confidence;
    est.method = CiMethod::PoissonExact;
    est.claim_count = claim_count;
    est.exposure_mmi = exposure_mmi;
    return est;
}

RateEstimate normal_rate_ci(double rate_cpmm, double standard_error_cpmm, double confidence) {
    if (rate_cpmm < 0.0) fail(ErrorKind::InvariantViolation, "rate must be non-negative");
    if (standard_error_cpmm < 0.0) {
        fail(ErrorKind::InvariantViolation, "standard error must be non-negative");
    }
    if (confidence <= 0.0 || confidence >= 1.0) {
        fail(ErrorKind::InvariantViolation, "confidence must lie in (0, 1)");
    }

    const double z = normal_quantile(1.0 - (1.0 - confidence) / 2.0);
    RateEstimate est;
    est.rate_cpmm = rate_cpmm;
    est.ci_low_cpmm = std::max(0.0, rate_cpmm - z * standard_error_cpmm);
    est.ci_high_cpmm = rate_cpmm + z * standard_error_cpmm;
    est.confidence = confidence;
    est.method = CiMethod::NormalApprox;
    return est;
}

double mixture_standard_error(std::span<const double> weights, std::span<const double> rates_cpmm,
                              std::span<const double> exposures_mmi) {
    if (weights.size() != rates_cpmm.size() || weights.size() != exposures_mmi.size()) {
        fail(ErrorKind::InvariantViolation, "mixture inputs must have matching lengths");
    }
    double weight_sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) fail(ErrorKind::WeightSumInvalid, "mixture weights must be non-negative");
        weight_sum += w;
    }
    if (std::fabs(weight_sum - 1.0) > 1e-9) {
        fail(ErrorKind::WeightSumInvalid,
             "mixture weights sum to " + std::to_string(weight_sum) + ", expected 1");
    }
    double variance = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        if (!(exposures_mmi[i] > 0.0)) fail(ErrorKind::ZeroExposure, "exposure must be positive");
        if (rates_cpmm[i] < 0.0) fail(ErrorKind::InvariantViolation, "rate must be non-negative");
        variance += weights[i] * weights[i] * rates_cpmm[i] / exposures_mmi[i];
    }
    return std::sqrt(variance);
}

double percent_reduction(double fleet_rate_cpmm, double baseline_rate_cpmm) {
    if (!(baseline_rate_cpmm > 0.0)) {
        fail(ErrorKind::BaselineZero, "baseline rate must be positive for percent reduction");
    }
    return 100.0 * (1.0 - fleet_rate_cpmm / baseline_rate_cpmm);
}

Verdict significance(const RateEstimate& a, const RateEstimate& b) {
    if (std::fabs(a.confidence - b.confidence) > 1e-12) {
        fail(ErrorKind::ConfidenceMismatch, "intervals built at different confidence levels");
    }
    const bool disjoint = a.ci_high_cpmm < b.ci_low_cpmm || b.ci_high_cpmm < a.ci_low_cpmm;
    return disjoint ? Verdict::Significant : Verdict::NotSignificant;
}

double round_half_up(double value, int decimals) {
    double scale = std::pow(10.0, decimals);
    return std::floor(value * scale + 0.5) / scale;
}

long long round_half_up_int(double value) {
    return static_cast<long long>(std::floor(value + 0.5));
}

}  // namespace claimsbench::stats
