#pragma once

#include <optional>
#include <vector>

#include "ppc/rng.hpp"

namespace ppc {

// i.i.d. N(theta, sigma^2) data with a N(theta0, sigma0^2) prior on theta and
// known sigma.  The discrepancy throughout is the pivot n(ybar - theta)^2 /
// sigma^2.  sigma0 = 0 is legal and means a point prior; every formula takes
// its analytic rho_n -> 0 limit there.
struct NormalNormalConfig {
    long n;
    double sigma;
    double theta0;
    double sigma0;

    double rho_n() const;  // n sigma0^2 / (n sigma0^2 + sigma^2)
    void validate() const;
};

// The exact ppp as a function of the observed mean.
double ppp_closed_form(const NormalNormalConfig& cfg, double ybar_obs);

// Draws from the null-null distribution of ppp(Y), Y from the prior
// predictive.
std::vector<double> null_ppp_sample(const NormalNormalConfig& cfg, long m, RngStream rng);

// G(u) = Pr{ppp(Y) <= u}; exact via the excentre inversion.  Returns 1 for u
// at or above the sharp cut-off F_{1,1}(1/rho_n, 0).
double null_ppp_cdf(const NormalNormalConfig& cfg, double u);

// The calibrated ppp, Pr{chi^2_1 >= z_obs / (1 + n sigma0^2/sigma^2)}.
double cppp_closed_form(const NormalNormalConfig& cfg, double ybar_obs);

// The posterior-predictive ("data twice") calibration of the same ppp.
double cppp_star_closed_form(const NormalNormalConfig& cfg, double ybar_obs);

// Scalar conflict |theta_tr - theta0| / sigma0.
double conflict_measure(double theta_tr, const NormalNormalConfig& cfg);

// The most conservative prior sd that keeps cppp(y_obs) at alpha.  Returns
// nullopt when the data already accept theta0 at level alpha, in which case
// an arbitrarily sharp prior at theta0 does not clash with the data.
std::optional<double> calibrate_prior_sigma0(long n, double sigma, double theta0,
                                             double ybar_obs, double alpha = 0.10);

// --- mixture priors ----------------------------------------------------------

struct MixtureComponent {
    double weight;
    double theta0;
    double sigma0;
};

struct MixturePrior {
    std::vector<MixtureComponent> components;
    void validate() const;  // weights positive, summing to 1 within 1e-12
};

double mixture_ppp(const MixturePrior& mix, long n, double sigma, double ybar_obs);

// Posterior component weights at ybar_obs (computed in log space).
std::vector<double> mixture_posterior_weights(const MixturePrior& mix, long n, double sigma,
                                              double ybar_obs);

// --- curve emission for the cli ---------------------------------------------

struct CurvePoint {
    double ybar;
    double ppp;
    double cppp;
    double cppp_star;
};

std::vector<CurvePoint> ppp_curves(const NormalNormalConfig& cfg, double ybar_lo, double ybar_hi,
                                   int points);

// --- engine adapter ----------------------------------------------------------

// The sample mean is sufficient for everything this model is used for, so a
// data set is represented by its mean.
struct NormalNormalModel {
    using Theta = double;
    using Data = double;  // ybar

    NormalNormalConfig cfg;

    explicit NormalNormalModel(NormalNormalConfig c) {
        c.validate();
        cfg = c;
    }

    bool prior_samplable() const { return true; }

    Theta sample_prior(RngStream& rng) const;
    Data sample_data(const Theta& theta, RngStream& rng) const;

    struct Posterior {
        double mean, sd;
        Theta draw(RngStream& rng) const;
    };
    Posterior make_posterior(const Data& ybar, RngStream&) const;
};

// D(y, theta) = n (ybar - theta)^2 / sigma^2.  The tail-aware variant knows
// that D(y_rep, theta) is chi^2_1 for every theta.
struct NormalNormalPivot {
    NormalNormalConfig cfg;
    double evaluate(double ybar, double theta) const {
        double d = ybar - theta;
        return cfg.n * d * d / (cfg.sigma * cfg.sigma);
    }
};

struct NormalNormalPivotRb : NormalNormalPivot {
    double replicate_tail(double d_obs, double /*theta*/) const;
};

// Same data model under a mixture prior for the mean; the posterior is the
// reweighted mixture of the component posteriors.
struct MixtureNormalModel {
    using Theta = double;
    using Data = double;  // ybar

    MixturePrior mix;
    long n = 0;
    double sigma = 1.0;

    MixtureNormalModel(MixturePrior m, long n_, double sigma_);

    bool prior_samplable() const { return true; }
    Theta sample_prior(RngStream& rng) const;
    Data sample_data(const Theta& theta, RngStream& rng) const;

    struct Posterior {
        const MixtureNormalModel* model;
        std::vector<double> weights;
        double ybar;
        Theta draw(RngStream& rng) const;
    };
    Posterior make_posterior(const Data& ybar, RngStream&) const;
};

}  // namespace ppc
