#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "ppc/engine.hpp"
#include "ppc/rng.hpp"

namespace ppc {

// The GN_p family: lambda = 1/sigma^2 ~ Gam(a/2, b/2) and, given lambda,
// the mean vector ~ N_p(mu0, (lambda c0 Omega0)^{-1}).  The scalar family of
// the full normal model is the p = 1 case with Omega0 = [1].
struct GnParams {
    double a = 1.0;
    double b = 1.0;
    Eigen::VectorXd mu0;
    double c0 = 1.0;
    Eigen::MatrixXd omega0;

    void validate() const;
    int dim() const { return static_cast<int>(mu0.size()); }

    static GnParams scalar(double a, double b, double mu0, double c0);
};

struct RegressionData {
    Eigen::MatrixXd X;  // n x p, full rank
    Eigen::VectorXd y;  // n

    void validate() const;
    long n() const { return X.rows(); }
    int p() const { return static_cast<int>(X.cols()); }

    Eigen::MatrixXd omega_n() const { return X.transpose() * X; }
    Eigen::VectorXd beta_hat() const;
    double q0() const;  // residual sum of squares
};

struct GnPosterior {
    double a_n = 0.0;
    double b_n = 0.0;
    Eigen::VectorXd beta_tilde;
    Eigen::MatrixXd precision;  // c0 Omega0 + Omega_n (times lambda)
    Eigen::MatrixXd K;          // (c0^{-1} Omega0^{-1} + Omega_n^{-1})^{-1}
};

// For vectors a0, a1 and positive definite G0, G1:
//   (x-a0)'G0(x-a0) + (x-a1)'G1(x-a1)
//     = (x-at)'(G0+G1)(x-at) + (a1-a0)'M(a1-a0),
// with at = (G0+G1)^{-1}(G0 a0 + G1 a1) and M = (G0^{-1}+G1^{-1})^{-1}.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> complete_square(const Eigen::VectorXd& a0,
                                                            const Eigen::MatrixXd& g0,
                                                            const Eigen::VectorXd& a1,
                                                            const Eigen::MatrixXd& g1);

GnPosterior gn_update(const GnParams& prior, const RegressionData& data);

// Scalar shortcut taking the sufficient statistics directly.
GnPosterior gn_update_scalar(const GnParams& prior, double ybar, double q0, long n);

// How the one-dimensional lambda integrals are evaluated.
struct GnIntegration {
    enum class Method { kGammaDraws, kQuadrature };
    Method method = Method::kGammaDraws;
    long draws = 100000;
    std::uint64_t seed = 20240101;
};

// Exact scalar ppp of the full normal model: the lambda-mixture of
// noncentral-F values with the posterior gamma weight.
double ppp_gn_scalar(const GnParams& prior, double ybar, double q0, long n,
                     const GnIntegration& integration = {});

// Known-sigma regression ppp: Monte Carlo over U ~ N_p(0, (c0 Omega0 +
// Omega_n)^{-1}) of the chi^2_p upper tail at (U+f)' Omega_n (U+f).
double ppp_regression_known_sigma(const Eigen::VectorXd& beta0, double c0,
                                  const Eigen::MatrixXd& omega0, const RegressionData& data,
                                  double sigma, long mc_size, RngStream rng);

// Rao-Blackwellized GN_p regression ppp over (lambda_j, U_j) draws.
PppEstimate ppp_regression_gn(const GnParams& prior, const RegressionData& data, long A,
                              RngStream rng);

// One-dimensional gamma integral in the proportional Omega0 = Omega_n/n case.
double ppp_regression_proportional(const GnParams& prior, const RegressionData& data,
                                   const GnIntegration& integration = {});

// Null ppp draws for the proportional case: F_{p,p}(1 + c0/n, (c0/n) Z) with
// Z ~ chi^2_p.  sigma cancels, so only (p, c0, n) matter.
std::vector<double> null_ppp_regression_proportional(int p, double c0, long n, long m,
                                                     RngStream rng);

double cppp_regression_proportional(const GnParams& prior, const RegressionData& data, long m,
                                    RngStream rng, const GnIntegration& integration = {});

// Known-sigma closed-form cppp; requires Omega0 proportional to Omega_n.
double cppp_regression_known_sigma_closed(const Eigen::VectorXd& beta0, double c0,
                                          const Eigen::MatrixXd& omega0,
                                          const RegressionData& data, double sigma);

// --- engine adapters ---------------------------------------------------------

struct GnTheta {
    double mu = 0.0;
    double sigma = 1.0;
};

// Full-data scalar GN model: data sets are i.i.d. normal vectors of fixed
// length.  c0 = 0 encodes the vague limit with the uniform (mu, log sigma)
// posterior; its prior cannot be sampled.
class GnScalarDataModel {
  public:
    using Theta = GnTheta;
    using Data = std::vector<double>;

    GnScalarDataModel(GnParams prior, long n);
    static GnScalarDataModel vague(long n);  // improper c0 = 0 limit

    bool prior_samplable() const { return !vague_; }

    Theta sample_prior(RngStream& rng) const;
    Data sample_data(const Theta& theta, RngStream& rng) const;

    struct Posterior {
        double a_n, b_n, mean, c_n;
        Theta draw(RngStream& rng) const;
    };
    Posterior make_posterior(const Data& y, RngStream&) const;

    const GnParams& prior() const { return prior_; }
    long n() const { return n_; }

  private:
    GnScalarDataModel() = default;
    GnParams prior_;
    long n_ = 0;
    bool vague_ = false;
};

// D(y, theta) = n (ybar - mu)^2 / sigma^2 with the chi^2_1 replicate law.
struct GnMeanPivot {
    double evaluate(const std::vector<double>& y, const GnTheta& theta) const;
    double replicate_tail(double d_obs, const GnTheta&) const;
};

// D = |y_(upper) - mu| - |y_(lower) - mu| on order statistics, the
// "middle asymmetry" discrepancy for the speed-of-light data (61 and 6 of 66).
struct OrderGapDiscrepancy {
    int upper = 61;
    int lower = 6;
    double evaluate(const std::vector<double>& y, const GnTheta& theta) const;
};

struct RegressionTheta {
    Eigen::VectorXd beta;
    double sigma = 1.0;
};

// GN_p regression model with the design matrix held fixed.
class GnRegressionModel {
  public:
    using Theta = RegressionTheta;
    using Data = Eigen::VectorXd;

    GnRegressionModel(GnParams prior, Eigen::MatrixXd X);

    bool prior_samplable() const { return true; }

    Theta sample_prior(RngStream& rng) const;
    Data sample_data(const Theta& theta, RngStream& rng) const;

    struct Posterior {
        double a_n, b_n;
        Eigen::VectorXd beta_tilde;
        Eigen::MatrixXd precision_factor_inv;  // L with L L' = precision^{-1}
        Theta draw(RngStream& rng) const;
    };
    Posterior make_posterior(const Data& y, RngStream&) const;

    const GnParams& prior() const { return prior_; }
    const Eigen::MatrixXd& design() const { return X_; }

  private:
    GnParams prior_;
    Eigen::MatrixXd X_;
    Eigen::MatrixXd prior_cov_factor_;  // chol of (c0 Omega0)^{-1}
};

// D = (beta_hat(y) - beta)' Omega_n (beta_hat(y) - beta) / sigma^2, chi^2_p
// replicate law.
class RegressionPivot {
  public:
    explicit RegressionPivot(const Eigen::MatrixXd& X);
    double evaluate(const Eigen::VectorXd& y, const RegressionTheta& theta) const;
    double replicate_tail(double d_obs, const RegressionTheta&) const;

  private:
    Eigen::MatrixXd X_;
    Eigen::LLT<Eigen::MatrixXd> omega_llt_;
    Eigen::MatrixXd omega_n_;
};

}  // namespace ppc
