#pragma once

namespace ppc {

// --- classical special functions -------------------------------------------

// Regularized lower/upper incomplete gamma P(a,x), Q(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a,b).
double incomplete_beta(double a, double b, double x);

// Standard normal cdf, upper tail and quantile.
double normal_cdf(double x);
double normal_tail(double x);
double normal_quantile(double p);

// Central chi-square with `df` degrees of freedom.
double chisq_cdf(double x, double df);
double chisq_tail(double x, double df);

// Upper tail of the noncentral chi-square chi2_df(noncentrality).
double noncentral_chisq_tail(double x, double df, double noncentrality);

// Asymptotic Kolmogorov distribution, Q(lambda) = Pr{sup|B(t)| > lambda}.
double kolmogorov_tail(double lambda);

// --- the noncentral F of the ppp formulas -----------------------------------

// Distribution of chi2_p(kappa) / chi2_p with the two chi-squares independent
// and *no* degrees-of-freedom normalization (for equal dfs the normalization
// would cancel anyway).  For p = 1 this is the law of (X + sqrt(kappa))^2/Y^2
// with X, Y standard normal.
struct NoncentralFParams {
    double v;      // evaluation point, > 0
    double kappa;  // excentricity, >= 0
    int p;         // common degrees of freedom, >= 1
};

// Pr{chi2_p(kappa)/chi2_p <= v}; absolute accuracy ~1e-10.
double noncentral_f_cdf(const NoncentralFParams& params);
double noncentral_f_cdf(double v, double kappa, int p);

// The excentricity kappa solving F_{p,p}(v, kappa) = u.  Requires
// 0 < u < F_{p,p}(v, 0) (the cdf is strictly decreasing in kappa, with the
// kappa = 0 value as supremum).  Throws std::domain_error otherwise.
double noncentral_f_excentre_inverse(double v, double u, int p);

}  // namespace ppc
