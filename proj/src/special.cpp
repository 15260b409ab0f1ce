#include "ppc/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ppc {

namespace {

constexpr double kEps = 1e-15;
constexpr int kMaxIter = 500;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw std::domain_error(std::string(what) + " must be finite");
}

// Lower incomplete gamma by series, x < a+1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxIter; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by Lentz continued fraction, x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Incomplete beta continued fraction (Numerical Recipes `betacf`).
double beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0 || !std::isfinite(a) || !std::isfinite(x))
        throw std::domain_error("gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0 || !std::isfinite(a) || !std::isfinite(x))
        throw std::domain_error("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw std::domain_error("incomplete_beta: need a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p in (0,1) required");
    // Acklam's rational approximation, then one Halley step.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = normal_cdf(x) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double chisq_cdf(double x, double df) {
    if (x <= 0.0) return 0.0;
    return gamma_p(0.5 * df, 0.5 * x);
}

double chisq_tail(double x, double df) {
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * x);
}

double noncentral_chisq_tail(double x, double df, double noncentrality) {
    if (df <= 0.0 || noncentrality < 0.0)
        throw std::domain_error("noncentral_chisq_tail: need df > 0, noncentrality >= 0");
    if (x <= 0.0) return 1.0;
    if (noncentrality == 0.0) return chisq_tail(x, df);
    // Poisson mixture of central tails, summed outward from the Poisson mode.
    const double r = 0.5 * noncentrality;
    const long mode = static_cast<long>(r);
    double logw = -r + mode * std::log(r) - std::lgamma(mode + 1.0);
    double w_mode = std::exp(logw);
    double sum = 0.0, mass = 0.0;
    double w = w_mode;
    for (long j = mode;; ++j) {
        double term = w * chisq_tail(x, df + 2.0 * j);
        sum += term;
        mass += w;
        if (w < 1e-17 * (1.0 + w_mode) && j > mode + 4) break;
        if (1.0 - mass < 1e-14) break;
        w *= r / (j + 1);
    }
    w = w_mode;
    for (long j = mode; j > 0;) {
        w *= j / r;
        --j;
        sum += w * chisq_tail(x, df + 2.0 * j);
        mass += w;
        if (w < 1e-17 * (1.0 + w_mode)) break;
    }
    return std::min(1.0, sum);
}

double kolmogorov_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * sum));
}

double noncentral_f_cdf(const NoncentralFParams& params) {
    const double v = params.v, kappa = params.kappa;
    const int p = params.p;
    require_finite(v, "noncentral_f_cdf: v");
    require_finite(kappa, "noncentral_f_cdf: kappa");
    if (v <= 0.0 || kappa < 0.0 || p < 1)
        throw std::domain_error("noncentral_f_cdf: need v > 0, kappa >= 0, p >= 1");

    const double x = v / (1.0 + v);  // chi2_p(kappa)/(chi2_p(kappa)+chi2_p) <= x
    const double a = 0.5 * p, b = 0.5 * p;
    if (kappa == 0.0) return incomplete_beta(a, b, x);

    // Poisson(kappa/2) mixture of I_x(a+j, b), expanded around the Poisson
    // mode so neither the weights nor e^{-kappa/2} underflow.  Truncation
    // keeps the neglected mixture mass below 1e-12 (each beta term is <= 1
    // and decreasing in j).
    const double r = 0.5 * kappa;
    const long mode = static_cast<long>(r);
    const double logx = std::log(x), log1mx = std::log1p(-x);

    double logw_mode = -r + mode * std::log(r) - std::lgamma(mode + 1.0);
    double w_mode = std::exp(logw_mode);
    // B_j = I_x(a+j, b) at the mode, and the stepping term
    // D_j = x^(a+j) (1-x)^b * Gamma(a+j+b)/(Gamma(a+j+1) Gamma(b)),
    // with I_x(a+j+1, b) = I_x(a+j, b) - D_j.
    double b_mode = incomplete_beta(a + mode, b, x);
    double logd_mode = std::lgamma(a + mode + b) - std::lgamma(a + mode + 1.0) -
                       std::lgamma(b) + (a + mode) * logx + b * log1mx;
    double d_mode = std::exp(logd_mode);

    const double tol = 1e-12;
    double sum = w_mode * b_mode;
    double mass = w_mode;

    double w = w_mode, betaterm = b_mode, d = d_mode;
    for (long j = mode; j < mode + 100000; ++j) {
        // advance j -> j+1
        w *= r / (j + 1);
        betaterm -= d;
        if (betaterm < 0.0) betaterm = 0.0;
        d *= x * (a + j + b) / (a + j + 1.0);
        sum += w * betaterm;
        mass += w;
        if ((1.0 - mass) * betaterm < tol) break;
    }
    w = w_mode;
    betaterm = b_mode;
    d = d_mode;
    for (long j = mode; j > 0; --j) {
        w *= j / r;
        d *= (a + j) / (x * (a + j + b - 1.0));
        betaterm += d;
        if (betaterm > 1.0) betaterm = 1.0;
        sum += w * betaterm;
        mass += w;
        if ((1.0 - mass) < tol) break;
    }
    return std::min(1.0, sum);
}

double noncentral_f_cdf(double v, double kappa, int p) {
    return noncentral_f_cdf(NoncentralFParams{v, kappa, p});
}

double noncentral_f_excentre_inverse(double v, double u, int p) {
    if (!(u > 0.0)) throw std::domain_error("noncentral_f_excentre_inverse: u must be > 0");
    const double f0 = noncentral_f_cdf(v, 0.0, p);
    if (u > f0)
        throw std::domain_error("noncentral_f_excentre_inverse: no solution, u exceeds F(v,0,p)");
    if (u == f0) return 0.0;

    // F is strictly decreasing in kappa: bracket by doubling, then bisect.
    double lo = 0.0, hi = 1.0;
    while (noncentral_f_cdf(v, hi, p) > u) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e9)
            throw std::domain_error("noncentral_f_excentre_inverse: failed to bracket root");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = noncentral_f_cdf(v, mid, p);
        if (fm > u)
            lo = mid;
        else
            hi = mid;
        if (std::fabs(fm - u) <= 1e-9 && (hi - lo) <= 1e-9 * (1.0 + mid)) return mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace ppc
