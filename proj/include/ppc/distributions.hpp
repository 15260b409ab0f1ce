#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ppc/rng.hpp"

namespace ppc {

double sample_normal(RngStream& rng);

// Gamma(shape, rate) with density proportional to x^(shape-1) exp(-rate x).
double sample_gamma(double shape, double rate, RngStream& rng);

double sample_chisq(double df, RngStream& rng);

// chi2_df(kappa) for integer df >= 1: (N + sqrt(kappa))^2 + chi2_{df-1}.
double sample_noncentral_chisq(int df, double kappa, RngStream& rng);

double sample_beta(double a, double b, RngStream& rng);

// mean + L z with z iid standard normal; L a lower-triangular factor of the
// covariance (L L^t = Sigma).
Eigen::VectorXd sample_mvnormal(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov_factor,
                                RngStream& rng);

// Cholesky factor of a symmetric positive-definite matrix; throws
// std::runtime_error when the factorization fails.
Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& cov);

// Counts over k cells from `trials` independent categorical draws.
std::vector<long> sample_multinomial(long trials, const std::vector<double>& probs,
                                     RngStream& rng);

}  // namespace ppc
