#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppc/parallel.hpp"
#include "ppc/rng.hpp"

namespace ppc {

// A generative model supplies the triple the double simulation needs:
//   Theta sample_prior(RngStream&) const
//   Data  sample_data(const Theta&, RngStream&) const
//   auto  make_posterior(const Data& y, RngStream&) const
// where the returned posterior sampler has Theta draw(RngStream&).
// Markov-chain posteriors do their burn-in inside make_posterior and
// decorrelate inside draw(); the engine treats them as black boxes.
//
// A discrepancy supplies double evaluate(const Data&, const Theta&) and may
// additionally supply double replicate_tail(double d_obs, const Theta&)
// returning Pr{D(y_rep, theta) >= d_obs} when the replicate-discrepancy law
// is known; estimate_ppp then averages tail probabilities instead of
// indicators (the Rao-Blackwellized estimate).

template <class M>
concept GenerativeModel = requires(const M& m, RngStream& rng) {
    typename M::Theta;
    typename M::Data;
    { m.sample_prior(rng) } -> std::convertible_to<typename M::Theta>;
};

struct EstimationError : std::runtime_error {
    explicit EstimationError(const std::string& what, std::string diag = {})
        : std::runtime_error(what), diagnostics(std::move(diag)) {}
    std::string diagnostics;
};

struct ImproperPriorError : std::runtime_error {
    explicit ImproperPriorError(const std::string& what) : std::runtime_error(what) {}
};

struct PppEstimate {
    double value = 0.0;
    double mc_se = 0.0;
    long replicates_a = 0;
    std::uint64_t seed = 0;
    long tie_count = 0;
    bool rao_blackwell = false;
    std::string sampler_diagnostics;  // filled when the posterior sampler reports any
};

struct CpppEstimate {
    double value = 0.0;
    std::pair<double, double> binomial_ci_95;
    int outer_b = 0;
    long inner_a = 0;
    PppEstimate ppp_obs;
    std::vector<double> ppp_null_samples;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::pair<double, double> wilson_interval(double phat, double n) {
    const double z = 1.959963984540054;
    double denom = 1.0 + z * z / n;
    double centre = (phat + z * z / (2.0 * n)) / denom;
    double half = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

template <class M>
void require_proper_prior(const M& model, const char* op) {
    if constexpr (requires { model.prior_samplable(); }) {
        if (!model.prior_samplable())
            throw ImproperPriorError(std::string(op) +
                                     ": the model's prior cannot be sampled; calibration "
                                     "against an improper prior is undefined");
    }
}

}  // namespace detail

// Plain Monte Carlo ppp.  Ties D(y_rep) == D(y_obs) count as
// successes, matching the ">=" in the definition.
template <GenerativeModel M, class D>
PppEstimate estimate_ppp(const M& model, const D& disc, const typename M::Data& y_obs, long A,
                         RngStream rng) {
    if (A < 1) throw std::invalid_argument("estimate_ppp: A >= 1 required");
    auto posterior = model.make_posterior(y_obs, rng);

    PppEstimate est;
    est.replicates_a = A;
    est.seed = rng.seed();

    constexpr bool kHasTail =
        requires(const D& d, const typename M::Theta& th) { d.replicate_tail(0.0, th); };

    if constexpr (kHasTail) {
        double sum = 0.0, sumsq = 0.0;
        for (long j = 0; j < A; ++j) {
            typename M::Theta theta = posterior.draw(rng);
            double tail = disc.replicate_tail(disc.evaluate(y_obs, theta), theta);
            sum += tail;
            sumsq += tail * tail;
        }
        est.value = sum / A;
        double var = std::max(0.0, sumsq / A - est.value * est.value);
        est.mc_se = std::sqrt(var / A);
        est.rao_blackwell = true;
    } else {
        long count = 0, ties = 0;
        for (long j = 0; j < A; ++j) {
            typename M::Theta theta = posterior.draw(rng);
            double d_obs = disc.evaluate(y_obs, theta);
            typename M::Data y_rep = model.sample_data(theta, rng);
            double d_rep = disc.evaluate(y_rep, theta);
            if (d_rep >= d_obs) ++count;
            if (d_rep == d_obs) ++ties;
        }
        est.value = static_cast<double>(count) / A;
        est.mc_se = std::sqrt(est.value * (1.0 - est.value) / A);
        est.tie_count = ties;
    }
    if constexpr (requires { { posterior.diagnostics() } -> std::convertible_to<std::string>; })
        est.sampler_diagnostics = posterior.diagnostics();
    return est;
}

// The double simulation.  The same inner A is used for the observed
// data set and for every simulated one, so the finite-A noise enters both
// sides of the comparison symmetrically.  Outer replicates run in parallel,
// one RNG substream each; the reduction is exact counting, which makes the
// result independent of the worker count.
template <GenerativeModel M, class D>
CpppEstimate calibrate_cppp(const M& model, const D& disc, const typename M::Data& y_obs, long A,
                            long B, RngStream rng, int workers = 0) {
    if (A < 1 || B < 1) throw std::invalid_argument("calibrate_cppp: A, B >= 1 required");
    detail::require_proper_prior(model, "calibrate_cppp");

    CpppEstimate est;
    est.inner_a = A;
    est.outer_b = static_cast<int>(B);
    est.seed = rng.seed();
    est.ppp_obs = estimate_ppp(model, disc, y_obs, A, rng.substream(0));

    est.ppp_null_samples.assign(B, 0.0);
    parallel_for(static_cast<std::size_t>(B), workers, [&](std::size_t k) {
        RngStream sub = rng.substream(k + 1);
        typename M::Theta theta = model.sample_prior(sub);
        typename M::Data y_k = model.sample_data(theta, sub);
        est.ppp_null_samples[k] = estimate_ppp(model, disc, y_k, A, sub).value;
    });

    long below = 0;
    for (double u : est.ppp_null_samples)
        if (u <= est.ppp_obs.value) ++below;
    est.value = static_cast<double>(below) / B;
    est.binomial_ci_95 = detail::wilson_interval(est.value, static_cast<double>(B));
    return est;
}

// What-if calibration: the ppp value is referred to the ppp(Y*)
// distribution with Y* drawn by `alt_sampler` (e.g. the posterior predictive
// instead of the prior predictive).
template <GenerativeModel M, class D, class AltSampler>
double calibrate_against(double ppp_value, AltSampler&& alt_sampler, const M& model,
                         const D& disc, long A, long B, RngStream rng, int workers = 0) {
    if (A < 1 || B < 1) throw std::invalid_argument("calibrate_against: A, B >= 1 required");
    if (!(ppp_value >= 0.0 && ppp_value <= 1.0))
        throw std::invalid_argument("calibrate_against: ppp_value must lie in [0,1]");

    std::vector<double> null_ppp(B, 0.0);
    parallel_for(static_cast<std::size_t>(B), workers, [&](std::size_t k) {
        RngStream sub = rng.substream(k + 1);
        typename M::Data y_star = alt_sampler(sub);
        null_ppp[k] = estimate_ppp(model, disc, y_star, A, sub).value;
    });
    long below = 0;
    for (double u : null_ppp)
        if (u <= ppp_value) ++below;
    return static_cast<double>(below) / B;
}

// Box's prior predictive p-value for a statistic of the data only.
template <GenerativeModel M, class Statistic>
PppEstimate estimate_prpp(const M& model, Statistic&& statistic, const typename M::Data& y_obs,
                          long A, RngStream rng) {
    if (A < 1) throw std::invalid_argument("estimate_prpp: A >= 1 required");
    detail::require_proper_prior(model, "estimate_prpp");

    const double t_obs = statistic(y_obs);
    long count = 0, ties = 0;
    for (long j = 0; j < A; ++j) {
        typename M::Theta theta = model.sample_prior(rng);
        typename M::Data y = model.sample_data(theta, rng);
        double t = statistic(y);
        if (t >= t_obs) ++count;
        if (t == t_obs) ++ties;
    }
    PppEstimate est;
    est.value = static_cast<double>(count) / A;
    est.mc_se = std::sqrt(est.value * (1.0 - est.value) / A);
    est.replicates_a = A;
    est.seed = rng.seed();
    est.tie_count = ties;
    return est;
}

}  // namespace ppc
