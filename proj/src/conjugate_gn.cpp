#include "ppc/conjugate_gn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "ppc/distributions.hpp"
#include "ppc/special.hpp"

namespace ppc {

namespace {

constexpr double kMaxCondition = 1e12;

// Symmetric solve with a condition-number guard; ill-conditioned systems
// raise instead of silently degrading.
Eigen::MatrixXd guarded_inverse(const Eigen::MatrixXd& m, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success)
        throw std::runtime_error(std::string(what) + ": eigendecomposition failed");
    double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxCondition)
        throw std::runtime_error(std::string(what) + ": matrix not positive definite or "
                                                     "condition number above 1e12");
    return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

// Adaptive Simpson on [lo, hi].
double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi, double fl,
                        double fm, double fh, double whole, double tol, int depth) {
    double mid = 0.5 * (lo + hi);
    double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    double flm = f(lm), frm = f(rm);
    double left = (mid - lo) / 6.0 * (fl + 4.0 * flm + fm);
    double right = (hi - mid) / 6.0 * (fm + 4.0 * frm + fh);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, lo, mid, fl, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, mid, hi, fm, frm, fh, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol) {
    double fl = f(lo), fh = f(hi), fm = f(0.5 * (lo + hi));
    double whole = (hi - lo) / 6.0 * (fl + 4.0 * fm + fh);
    return adaptive_simpson(f, lo, hi, fl, fm, fh, whole, tol, 48);
}

// Wilson-Hilferty bounds that keep the omitted gamma tail mass below ~1e-13.
std::pair<double, double> gamma_support(double shape2, double rate2) {
    // lambda ~ Gam(shape2/2, rate2/2) == chi^2_{shape2} / rate2
    double k = shape2;
    auto wh = [&](double z) {
        double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
        return k * t * t * t / rate2;
    };
    double lo = std::max(wh(-7.5), 1e-12 / rate2);
    double hi = wh(7.5) + 16.0 / rate2;
    return {lo, hi};
}

// Expectation of f(lambda) under Gam(a_n/2, b_n/2).
double gamma_mixture(const std::function<double(double)>& f, double a_n, double b_n,
                     const GnIntegration& integration) {
    if (integration.method == GnIntegration::Method::kQuadrature) {
        auto [lo, hi] = gamma_support(a_n, b_n);
        double lognorm = 0.5 * a_n * std::log(0.5 * b_n) - std::lgamma(0.5 * a_n);
        auto g = [&](double lam) {
            double logpdf = lognorm + (0.5 * a_n - 1.0) * std::log(lam) - 0.5 * b_n * lam;
            return f(lam) * std::exp(logpdf);
        };
        return integrate(g, lo, hi, 1e-10);
    }
    RngStream rng(integration.seed, 0);
    double sum = 0.0;
    for (long j = 0; j < integration.draws; ++j)
        sum += f(sample_gamma(0.5 * a_n, 0.5 * b_n, rng));
    return sum / integration.draws;
}

}  // namespace

void GnParams::validate() const {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("GnParams: a, b > 0 required");
    if (!(c0 > 0.0)) throw std::domain_error("GnParams: c0 > 0 required");
    if (mu0.size() == 0 || omega0.rows() != mu0.size() || omega0.cols() != mu0.size())
        throw std::domain_error("GnParams: inconsistent dimensions");
    if (!omega0.isApprox(omega0.transpose(), 1e-10))
        throw std::domain_error("GnParams: omega0 must be symmetric");
}

GnParams GnParams::scalar(double a, double b, double mu0, double c0) {
    GnParams p;
    p.a = a;
    p.b = b;
    p.mu0 = Eigen::VectorXd::Constant(1, mu0);
    p.c0 = c0;
    p.omega0 = Eigen::MatrixXd::Identity(1, 1);
    p.validate();
    return p;
}

void RegressionData::validate() const {
    if (X.rows() != y.size()) throw std::domain_error("RegressionData: X rows must match y");
    if (X.rows() <= X.cols()) throw std::domain_error("RegressionData: need n > p");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(X);
    if (lu.rank() < X.cols()) throw std::domain_error("RegressionData: X is rank deficient");
}

Eigen::VectorXd RegressionData::beta_hat() const {
    return (X.transpose() * X).llt().solve(X.transpose() * y);
}

double RegressionData::q0() const {
    Eigen::VectorXd r = y - X * beta_hat();
    return r.squaredNorm();
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> complete_square(const Eigen::VectorXd& a0,
                                                            const Eigen::MatrixXd& g0,
                                                            const Eigen::VectorXd& a1,
                                                            const Eigen::MatrixXd& g1) {
    Eigen::MatrixXd sum_inv = guarded_inverse(g0 + g1, "complete_square");
    Eigen::VectorXd a_tilde = sum_inv * (g0 * a0 + g1 * a1);
    Eigen::MatrixXd m = guarded_inverse(
        guarded_inverse(g0, "complete_square") + guarded_inverse(g1, "complete_square"),
        "complete_square");
    return {a_tilde, m};
}

GnPosterior gn_update(const GnParams& prior, const RegressionData& data) {
    prior.validate();
    if (data.n() == 0) {  // empty data: posterior equals prior
        GnPosterior post;
        post.a_n = prior.a;
        post.b_n = prior.b;
        post.beta_tilde = prior.mu0;
        post.precision = prior.c0 * prior.omega0;
        post.K = Eigen::MatrixXd::Zero(prior.dim(), prior.dim());
        return post;
    }
    data.validate();
    if (data.p() != prior.dim())
        throw std::domain_error("gn_update: prior and design dimensions differ");

    Eigen::MatrixXd omega_n = data.omega_n();
    Eigen::MatrixXd c0o0 = prior.c0 * prior.omega0;
    Eigen::VectorXd bhat = data.beta_hat();

    GnPosterior post;
    post.precision = c0o0 + omega_n;
    Eigen::MatrixXd prec_inv = guarded_inverse(post.precision, "gn_update");
    post.beta_tilde = prec_inv * (c0o0 * prior.mu0 + omega_n * bhat);
    post.K = guarded_inverse(
        guarded_inverse(c0o0, "gn_update") + guarded_inverse(omega_n, "gn_update"), "gn_update");
    Eigen::VectorXd diff = bhat - prior.mu0;
    post.a_n = prior.a + data.n();
    post.b_n = prior.b + data.q0() + diff.dot(post.K * diff);
    return post;
}

GnPosterior gn_update_scalar(const GnParams& prior, double ybar, double q0, long n) {
    prior.validate();
    if (prior.dim() != 1) throw std::domain_error("gn_update_scalar: prior must be scalar");
    if (n < 0 || q0 < 0.0) throw std::domain_error("gn_update_scalar: bad sufficient statistics");
    GnPosterior post;
    if (n == 0) {
        post.a_n = prior.a;
        post.b_n = prior.b;
        post.beta_tilde = prior.mu0;
        post.precision = Eigen::MatrixXd::Constant(1, 1, prior.c0);
        post.K = Eigen::MatrixXd::Zero(1, 1);
        return post;
    }
    double c0 = prior.c0;
    double k = 1.0 / (1.0 / c0 + 1.0 / n);
    double d = ybar - prior.mu0[0];
    post.a_n = prior.a + n;
    post.b_n = prior.b + q0 + k * d * d;
    post.beta_tilde = Eigen::VectorXd::Constant(1, (c0 * prior.mu0[0] + n * ybar) / (c0 + n));
    post.precision = Eigen::MatrixXd::Constant(1, 1, c0 + n);
    post.K = Eigen::MatrixXd::Constant(1, 1, k);
    return post;
}

double ppp_gn_scalar(const GnParams& prior, double ybar, double q0, long n,
                     const GnIntegration& integration) {
    GnPosterior post = gn_update_scalar(prior, ybar, q0, n);
    double c0 = prior.c0;
    double v = (c0 + n) / static_cast<double>(n);
    double d = ybar - prior.mu0[0];
    double coef = c0 * c0 / (c0 + n) * d * d;
    return gamma_mixture([&](double lam) { return noncentral_f_cdf(v, coef * lam, 1); },
                         post.a_n, post.b_n, integration);
}

double ppp_regression_known_sigma(const Eigen::VectorXd& beta0, double c0,
                                  const Eigen::MatrixXd& omega0, const RegressionData& data,
                                  double sigma, long mc_size, RngStream rng) {
    data.validate();
    if (!(sigma > 0.0)) throw std::domain_error("ppp_regression_known_sigma: sigma > 0");
    const int p = data.p();
    Eigen::MatrixXd omega_n = data.omega_n();
    Eigen::MatrixXd g = guarded_inverse(c0 * omega0 + omega_n, "ppp_regression_known_sigma");
    Eigen::VectorXd f = g * (c0 * omega0 * (data.beta_hat() - beta0)) / sigma;
    Eigen::MatrixXd l = cholesky_factor(g);

    double sum = 0.0;
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(p);
    for (long j = 0; j < mc_size; ++j) {
        Eigen::VectorXd w = sample_mvnormal(zero, l, rng) + f;
        sum += chisq_tail(w.dot(omega_n * w), p);
    }
    return sum / mc_size;
}

PppEstimate ppp_regression_gn(const GnParams& prior, const RegressionData& data, long A,
                              RngStream rng) {
    if (A < 1) throw std::invalid_argument("ppp_regression_gn: A >= 1 required");
    GnPosterior post = gn_update(prior, data);
    const int p = data.p();
    Eigen::MatrixXd omega_n = data.omega_n();
    Eigen::MatrixXd prec_inv = guarded_inverse(post.precision, "ppp_regression_gn");
    Eigen::MatrixXd l = cholesky_factor(prec_inv);
    Eigen::VectorXd h = prec_inv * (prior.c0 * prior.omega0 * (data.beta_hat() - prior.mu0));
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(p);

    double sum = 0.0, sumsq = 0.0;
    for (long j = 0; j < A; ++j) {
        double lam = sample_gamma(0.5 * post.a_n, 0.5 * post.b_n, rng);
        Eigen::VectorXd w = std::sqrt(lam) * h + sample_mvnormal(zero, l, rng);
        double tail = chisq_tail(w.dot(omega_n * w), p);
        sum += tail;
        sumsq += tail * tail;
    }
    PppEstimate est;
    est.value = sum / A;
    est.mc_se = std::sqrt(std::max(0.0, sumsq / A - est.value * est.value) / A);
    est.replicates_a = A;
    est.seed = rng.seed();
    est.rao_blackwell = true;
    return est;
}

namespace {

void require_proportional(const GnParams& prior, const RegressionData& data, const char* what) {
    Eigen::MatrixXd expected = data.omega_n() / static_cast<double>(data.n());
    if (!prior.omega0.isApprox(expected, 1e-8))
        throw std::domain_error(std::string(what) +
                                ": requires Omega0 = Omega_n / n (proportional case)");
}

}  // namespace

double ppp_regression_proportional(const GnParams& prior, const RegressionData& data,
                                   const GnIntegration& integration) {
    require_proportional(prior, data, "ppp_regression_proportional");
    GnPosterior post = gn_update(prior, data);
    const int p = data.p();
    const double n = static_cast<double>(data.n());
    const double c0 = prior.c0;
    Eigen::VectorXd diff = data.beta_hat() - prior.mu0;
    double kappa_n = diff.dot(data.omega_n() * diff) / n;
    double v = 1.0 + c0 / n;
    double coef = c0 * c0 / (c0 + n) * kappa_n;
    return gamma_mixture([&](double lam) { return noncentral_f_cdf(v, coef * lam, p); },
                         post.a_n, post.b_n, integration);
}

std::vector<double> null_ppp_regression_proportional(int p, double c0, long n, long m,
                                                     RngStream rng) {
    if (p < 1 || n <= 0 || !(c0 > 0.0))
        throw std::domain_error("null_ppp_regression_proportional: bad parameters");
    std::vector<double> out(m);
    double v = 1.0 + c0 / n;
    for (long k = 0; k < m; ++k) {
        double z = sample_chisq(p, rng);
        out[k] = noncentral_f_cdf(v, c0 / n * z, p);
    }
    return out;
}

double cppp_regression_proportional(const GnParams& prior, const RegressionData& data, long m,
                                    RngStream rng, const GnIntegration& integration) {
    double ppp_obs = ppp_regression_proportional(prior, data, integration);
    std::vector<double> null =
        null_ppp_regression_proportional(data.p(), prior.c0, data.n(), m, rng);
    long below = 0;
    for (double u : null)
        if (u <= ppp_obs) ++below;
    return static_cast<double>(below) / m;
}

double cppp_regression_known_sigma_closed(const Eigen::VectorXd& beta0, double c0,
                                          const Eigen::MatrixXd& omega0,
                                          const RegressionData& data, double sigma) {
    data.validate();
    GnParams proxy;
    proxy.a = 1.0;
    proxy.b = 1.0;
    proxy.mu0 = beta0;
    proxy.c0 = c0;
    proxy.omega0 = omega0;
    require_proportional(proxy, data, "cppp_regression_known_sigma_closed");
    Eigen::VectorXd diff = data.beta_hat() - beta0;
    double quad = diff.dot(data.omega_n() * diff) / (sigma * sigma);
    return chisq_tail(c0 / (c0 + data.n()) * quad, data.p());
}

// --- engine adapters ---------------------------------------------------------

GnScalarDataModel::GnScalarDataModel(GnParams prior, long n) : prior_(std::move(prior)), n_(n) {
    prior_.validate();
    if (prior_.dim() != 1) throw std::domain_error("GnScalarDataModel: scalar prior required");
    if (n_ < 2) throw std::domain_error("GnScalarDataModel: n >= 2 required");
}

GnScalarDataModel GnScalarDataModel::vague(long n) {
    GnScalarDataModel m;
    m.prior_ = GnParams::scalar(1.0, 1.0, 0.0, 1.0);  // placeholder, unused when vague
    m.n_ = n;
    m.vague_ = true;
    if (n < 2) throw std::domain_error("GnScalarDataModel: n >= 2 required");
    return m;
}

GnTheta GnScalarDataModel::sample_prior(RngStream& rng) const {
    if (vague_)
        throw ImproperPriorError("GnScalarDataModel: the vague-limit prior is improper and "
                                 "cannot be sampled");
    double lam = sample_gamma(0.5 * prior_.a, 0.5 * prior_.b, rng);
    double sigma = 1.0 / std::sqrt(lam);
    double mu = prior_.mu0[0] + sample_normal(rng) / std::sqrt(prior_.c0 * lam);
    return {mu, sigma};
}

std::vector<double> GnScalarDataModel::sample_data(const GnTheta& theta, RngStream& rng) const {
    std::vector<double> y(n_);
    for (long i = 0; i < n_; ++i) y[i] = theta.mu + theta.sigma * sample_normal(rng);
    return y;
}

GnScalarDataModel::Posterior GnScalarDataModel::make_posterior(const Data& y, RngStream&) const {
    if (static_cast<long>(y.size()) != n_)
        throw std::invalid_argument("GnScalarDataModel: data length mismatch");
    double ybar = 0.0;
    for (double v : y) ybar += v;
    ybar /= y.size();
    double q0 = 0.0;
    for (double v : y) q0 += (v - ybar) * (v - ybar);
    if (vague_) {
        // uniform (mu, log sigma) posterior
        return Posterior{static_cast<double>(n_ - 1), q0, ybar, static_cast<double>(n_)};
    }
    GnPosterior post = gn_update_scalar(prior_, ybar, q0, n_);
    return Posterior{post.a_n, post.b_n, post.beta_tilde[0], post.precision(0, 0)};
}

GnTheta GnScalarDataModel::Posterior::draw(RngStream& rng) const {
    double lam = sample_gamma(0.5 * a_n, 0.5 * b_n, rng);
    double sigma = 1.0 / std::sqrt(lam);
    double mu = mean + sample_normal(rng) / std::sqrt(c_n * lam);
    return {mu, sigma};
}

double GnMeanPivot::evaluate(const std::vector<double>& y, const GnTheta& theta) const {
    double ybar = 0.0;
    for (double v : y) ybar += v;
    ybar /= y.size();
    double d = ybar - theta.mu;
    return y.size() * d * d / (theta.sigma * theta.sigma);
}

double GnMeanPivot::replicate_tail(double d_obs, const GnTheta&) const {
    return chisq_tail(d_obs, 1.0);
}

double OrderGapDiscrepancy::evaluate(const std::vector<double>& y, const GnTheta& theta) const {
    if (upper < 1 || lower < 1 || upper > static_cast<int>(y.size()) ||
        lower > static_cast<int>(y.size()))
        throw std::domain_error("OrderGapDiscrepancy: order-statistic index out of range");
    std::vector<double> s(y);
    std::sort(s.begin(), s.end());
    return std::fabs(s[upper - 1] - theta.mu) - std::fabs(s[lower - 1] - theta.mu);
}

GnRegressionModel::GnRegressionModel(GnParams prior, Eigen::MatrixXd X)
    : prior_(std::move(prior)), X_(std::move(X)) {
    prior_.validate();
    if (X_.cols() != prior_.dim())
        throw std::domain_error("GnRegressionModel: design/prior dimension mismatch");
    prior_cov_factor_ =
        cholesky_factor(guarded_inverse(prior_.c0 * prior_.omega0, "GnRegressionModel"));
}

RegressionTheta GnRegressionModel::sample_prior(RngStream& rng) const {
    double lam = sample_gamma(0.5 * prior_.a, 0.5 * prior_.b, rng);
    double sigma = 1.0 / std::sqrt(lam);
    Eigen::VectorXd z(prior_.dim());
    for (int i = 0; i < prior_.dim(); ++i) z[i] = sample_normal(rng);
    return {prior_.mu0 + sigma * (prior_cov_factor_ * z), sigma};
}

Eigen::VectorXd GnRegressionModel::sample_data(const RegressionTheta& theta,
                                               RngStream& rng) const {
    Eigen::VectorXd eps(X_.rows());
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps[i] = theta.sigma * sample_normal(rng);
    return X_ * theta.beta + eps;
}

GnRegressionModel::Posterior GnRegressionModel::make_posterior(const Data& y, RngStream&) const {
    RegressionData data{X_, y};
    GnPosterior post = gn_update(prior_, data);
    Posterior out;
    out.a_n = post.a_n;
    out.b_n = post.b_n;
    out.beta_tilde = post.beta_tilde;
    out.precision_factor_inv =
        cholesky_factor(guarded_inverse(post.precision, "GnRegressionModel::make_posterior"));
    return out;
}

RegressionTheta GnRegressionModel::Posterior::draw(RngStream& rng) const {
    double lam = sample_gamma(0.5 * a_n, 0.5 * b_n, rng);
    double sigma = 1.0 / std::sqrt(lam);
    Eigen::VectorXd z(beta_tilde.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sample_normal(rng);
    return {beta_tilde + sigma * (precision_factor_inv * z), sigma};
}

RegressionPivot::RegressionPivot(const Eigen::MatrixXd& X)
    : X_(X), omega_llt_((X.transpose() * X).eval()), omega_n_(X.transpose() * X) {
    if (omega_llt_.info() != Eigen::Success)
        throw std::runtime_error("RegressionPivot: X'X not positive definite");
}

double RegressionPivot::evaluate(const Eigen::VectorXd& y, const RegressionTheta& theta) const {
    Eigen::VectorXd bhat = omega_llt_.solve(X_.transpose() * y);
    Eigen::VectorXd d = bhat - theta.beta;
    return d.dot(omega_n_ * d) / (theta.sigma * theta.sigma);
}

double RegressionPivot::replicate_tail(double d_obs, const RegressionTheta&) const {
    return chisq_tail(d_obs, static_cast<double>(X_.cols()));
}

}  // namespace ppc
