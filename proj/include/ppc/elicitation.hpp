#pragma once

#include <Eigen/Dense>
#include <utility>

#include "ppc/conjugate_gn.hpp"
#include "ppc/rng.hpp"

namespace ppc {

// Prior beliefs about the outcome-covariate correlations, to be turned into
// a conjugate GN_p prior for a regression with centred covariates.
struct CorrelationBelief {
    Eigen::VectorXd rho0;   // prior guesses, |rho0_j| < 1
    double sigma0_guess;    // prior guess for the residual sd
    double tau;             // spread parameter; c0 = 1/tau^2
    Eigen::MatrixXd Sn;     // empirical covariate covariance (p x p)

    void validate() const;
    Eigen::VectorXd dn_sqrt() const;  // per-covariate sds s_j
    Eigen::VectorXd v0() const { return dn_sqrt().cwiseProduct(rho0); }
    // the moment equations' right-hand side Sn^{-1/2} Dn^{1/2} rho0
    Eigen::VectorXd target() const;
};

struct ElicitedPrior {
    Eigen::VectorXd z0;
    Eigen::VectorXd b_bar;  // Sn^{-1/2} z0, prior mean of the slope vector
    double tau = 0.0;
    double a0 = 0.0;        // gamma hyperparameters; the prior is Gam(a0/2, b0/2)
    double b0 = 0.0;
    double b0_intercept = 0.0;
};

// Symmetric positive-definite square root and its inverse.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m);
Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& m);

// Solves the p moment equations g(z0) = Sn^{-1/2} Dn^{1/2} rho0 where
//   g(z0) = E (z0/sigma0 + tau N) / (1 + ||z0/sigma0 + tau N||^2)^{1/2}.
// The expectation uses mc_size common random numbers held fixed across
// iterations, so the objective is a smooth deterministic function of z0.
Eigen::VectorXd solve_z0(const CorrelationBelief& belief, long mc_size, RngStream rng);

struct RhoPriorSummary {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;
    Eigen::MatrixXd correlation;
    Eigen::MatrixXd draws;  // M x p
};

// Draws from the induced correlation prior.  sigma is fixed at sigma0_guess
// unless draw_sigma is set, in which case it comes from Gam(a0/2, b0/2).
RhoPriorSummary sample_rho_prior(const Eigen::VectorXd& z0, const CorrelationBelief& belief,
                                 long m, RngStream rng, bool draw_sigma = false, double a0 = 0.0,
                                 double b0 = 0.0);

// Gamma hyperparameters matched to the moments of 1/sigma^2 implied by the
// observed outcome sd kappa_hat on m = n-1 degrees of freedom.
std::pair<double, double> match_gamma_hyperparams(double kappa_hat, const Eigen::VectorXd& v0,
                                                  const Eigen::MatrixXd& Sn, long n);

// Centres the columns of X; returns the centred matrix and the column means.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> center_covariates(const Eigen::MatrixXd& X);

// Full elicitation: solve z0, match the gamma prior, fill in the intercept.
ElicitedPrior elicit_prior(const CorrelationBelief& belief, double kappa_hat, long n,
                           double intercept_guess, long mc_size, RngStream rng);

// The (p+1)-dimensional GN prior for (intercept, slopes): mean
// (intercept_guess, b_bar), precision block-diag(1, Sn) times c0 = 1/tau^2.
GnParams assemble_prior(const ElicitedPrior& prior, const CorrelationBelief& belief);

}  // namespace ppc
