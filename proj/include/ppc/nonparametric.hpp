#pragma once

#include <vector>

#include "ppc/conjugate_gn.hpp"
#include "ppc/empirical.hpp"
#include "ppc/engine.hpp"
#include "ppc/rng.hpp"

namespace ppc {

// Dirichlet-process prior Dir(a F0) with a normal centre distribution.
struct DpPrior {
    double a = 1.0;
    double f0_mean = 0.0;
    double f0_sd = 1.0;
    long truncation_level = 0;  // 0: derived from the residual-mass bound

    void validate() const;
    // smallest L with ((c+1)/c)^{-L} < 1e-6 for concentration c
    static long required_truncation(double concentration);
};

// A realized draw of the process: finitely many atoms with weights summing
// to one (the residual stick mass is folded into one extra atom).
class RealizedCdf {
  public:
    RealizedCdf(std::vector<double> atoms, std::vector<double> weights);

    double operator()(double t) const;
    double sample(RngStream& rng) const;
    const std::vector<double>& atoms() const { return atoms_; }
    const std::vector<double>& cum_weights() const { return cum_; }

  private:
    std::vector<double> atoms_;  // sorted
    std::vector<double> cum_;
};

// Truncated stick-breaking draw from Dir(a F0 + n F_n); pass empty data for
// a draw from the prior.
RealizedCdf dp_posterior_sample(const DpPrior& prior, const std::vector<double>& data,
                                RngStream& rng);

// --- engine adapters ----------------------------------------------------------

class DpModel {
  public:
    using Theta = RealizedCdf;
    using Data = std::vector<double>;

    DpModel(DpPrior prior, long n);

    bool prior_samplable() const { return true; }
    Theta sample_prior(RngStream& rng) const;
    Data sample_data(const Theta& f, RngStream& rng) const;

    struct Posterior {
        const DpModel* model;
        std::vector<double> y;
        Theta draw(RngStream& rng) const;
    };
    Posterior make_posterior(const Data& y, RngStream&) const;

    const DpPrior& prior() const { return prior_; }
    long n() const { return n_; }

  private:
    DpPrior prior_;
    long n_ = 0;
};

// D(y, F) = sqrt(n) sup_t |F_n(t) - F(t)| against the realized step cdf.
struct KsAgainstRealized {
    double evaluate(const std::vector<double>& y, const RealizedCdf& f) const;
};

// Same discrepancy against the normal cdf with theta = (mu, sigma).
struct KsAgainstNormal {
    double evaluate(const std::vector<double>& y, const GnTheta& theta) const;
};

PppEstimate ppp_np(const std::vector<double>& data, const DpPrior& prior, long A, RngStream rng);

PppEstimate ppp_parametric_ks(const std::vector<double>& data, const GnParams& gn_prior, long A,
                              RngStream rng);

struct NpComparison {
    CpppEstimate dirichlet;
    CpppEstimate parametric;
};

// The parametric-vs-nonparametric comparison: the same data and discrepancy, calibrated under
// the two priors, reported on the common uniform scale.
NpComparison compare_np(const std::vector<double>& data, const DpPrior& dp_prior,
                        const GnParams& gn_prior, long A, long B, RngStream rng,
                        int workers = 0);

}  // namespace ppc
