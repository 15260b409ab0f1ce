#include "ppc/nonparametric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ppc/distributions.hpp"
#include "ppc/special.hpp"

namespace ppc {

void DpPrior::validate() const {
    if (!(a > 0.0)) throw std::domain_error("DpPrior: concentration a > 0 required");
    if (!(f0_sd > 0.0)) throw std::domain_error("DpPrior: f0_sd > 0 required");
    if (truncation_level < 0) throw std::domain_error("DpPrior: negative truncation level");
}

long DpPrior::required_truncation(double concentration) {
    // residual mass after L sticks has mean (c/(c+1))^L
    double per_stick = std::log1p(1.0 / concentration);  // -log(c/(c+1))
    return static_cast<long>(std::ceil(-std::log(1e-6) / per_stick)) + 1;
}

RealizedCdf::RealizedCdf(std::vector<double> atoms, std::vector<double> weights) {
    if (atoms.size() != weights.size() || atoms.empty())
        throw std::invalid_argument("RealizedCdf: atoms/weights mismatch");
    std::vector<std::size_t> order(atoms.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return atoms[i] < atoms[j]; });
    atoms_.reserve(atoms.size());
    cum_.reserve(atoms.size());
    double acc = 0.0;
    for (std::size_t k : order) {
        acc += weights[k];
        if (!atoms_.empty() && atoms[k] == atoms_.back()) {
            cum_.back() = acc;  // merge duplicate atoms
        } else {
            atoms_.push_back(atoms[k]);
            cum_.push_back(acc);
        }
    }
    if (std::fabs(acc - 1.0) > 1e-9)
        throw std::invalid_argument("RealizedCdf: weights must sum to 1");
    cum_.back() = 1.0;
}

double RealizedCdf::operator()(double t) const {
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), t);
    return it == atoms_.begin() ? 0.0 : cum_[it - atoms_.begin() - 1];
}

double RealizedCdf::sample(RngStream& rng) const {
    double u = rng.uniform01();
    auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
    if (it == cum_.end()) --it;
    return atoms_[it - cum_.begin()];
}

RealizedCdf dp_posterior_sample(const DpPrior& prior, const std::vector<double>& data,
                                RngStream& rng) {
    prior.validate();
    const double concentration = prior.a + static_cast<double>(data.size());
    long levels = prior.truncation_level;
    long needed = DpPrior::required_truncation(concentration);
    if (levels == 0) {
        levels = needed;
    } else if (levels < needed) {
        throw std::domain_error("dp_posterior_sample: truncation level leaves residual stick "
                                "mass above 1e-6");
    }

    std::vector<double> atoms(levels + 1), weights(levels + 1);
    const double base_share = prior.a / concentration;
    auto draw_atom = [&]() {
        if (data.empty() || rng.uniform01() < base_share)
            return prior.f0_mean + prior.f0_sd * sample_normal(rng);
        std::size_t idx = static_cast<std::size_t>(rng.uniform01() * data.size());
        if (idx >= data.size()) idx = data.size() - 1;
        return data[idx];
    };

    double remaining = 1.0;
    for (long l = 0; l < levels; ++l) {
        double v = sample_beta(1.0, concentration, rng);
        weights[l] = v * remaining;
        remaining *= (1.0 - v);
        atoms[l] = draw_atom();
    }
    weights[levels] = remaining;  // residual mass onto one final atom
    atoms[levels] = draw_atom();
    return RealizedCdf(std::move(atoms), std::move(weights));
}

DpModel::DpModel(DpPrior prior, long n) : prior_(prior), n_(n) {
    prior_.validate();
    if (n_ < 1) throw std::domain_error("DpModel: n >= 1 required");
}

RealizedCdf DpModel::sample_prior(RngStream& rng) const {
    return dp_posterior_sample(prior_, {}, rng);
}

std::vector<double> DpModel::sample_data(const RealizedCdf& f, RngStream& rng) const {
    std::vector<double> y(n_);
    for (long i = 0; i < n_; ++i) y[i] = f.sample(rng);
    return y;
}

DpModel::Posterior DpModel::make_posterior(const Data& y, RngStream&) const {
    return Posterior{this, y};
}

RealizedCdf DpModel::Posterior::draw(RngStream& rng) const {
    return dp_posterior_sample(model->prior(), y, rng);
}

double KsAgainstRealized::evaluate(const std::vector<double>& y, const RealizedCdf& f) const {
    EmpiricalCdf fn(y);
    return std::sqrt(static_cast<double>(y.size())) *
           ks_distance_step(fn, f.atoms(), f.cum_weights());
}

double KsAgainstNormal::evaluate(const std::vector<double>& y, const GnTheta& theta) const {
    EmpiricalCdf fn(y);
    double mu = theta.mu, sd = theta.sigma;
    return std::sqrt(static_cast<double>(y.size())) *
           ks_distance(fn, [&](double t) { return normal_cdf((t - mu) / sd); });
}

PppEstimate ppp_np(const std::vector<double>& data, const DpPrior& prior, long A, RngStream rng) {
    DpModel model(prior, static_cast<long>(data.size()));
    return estimate_ppp(model, KsAgainstRealized{}, data, A, rng);
}

PppEstimate ppp_parametric_ks(const std::vector<double>& data, const GnParams& gn_prior, long A,
                              RngStream rng) {
    GnScalarDataModel model(gn_prior, static_cast<long>(data.size()));
    return estimate_ppp(model, KsAgainstNormal{}, data, A, rng);
}

NpComparison compare_np(const std::vector<double>& data, const DpPrior& dp_prior,
                        const GnParams& gn_prior, long A, long B, RngStream rng, int workers) {
    NpComparison out;
    DpModel dp_model(dp_prior, static_cast<long>(data.size()));
    out.dirichlet =
        calibrate_cppp(dp_model, KsAgainstRealized{}, data, A, B, rng.substream(100), workers);
    GnScalarDataModel gn_model(gn_prior, static_cast<long>(data.size()));
    out.parametric =
        calibrate_cppp(gn_model, KsAgainstNormal{}, data, A, B, rng.substream(200), workers);
    return out;
}

}  // namespace ppc
