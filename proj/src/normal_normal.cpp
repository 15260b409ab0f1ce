#include "ppc/normal_normal.hpp"

#include <cmath>
#include <stdexcept>

#include "ppc/distributions.hpp"
#include "ppc/special.hpp"

namespace ppc {

double NormalNormalConfig::rho_n() const {
    double ns2 = static_cast<double>(n) * sigma0 * sigma0;
    return ns2 / (ns2 + sigma * sigma);
}

void NormalNormalConfig::validate() const {
    if (n <= 0) throw std::domain_error("NormalNormalConfig: n > 0 required");
    if (!(sigma > 0.0)) throw std::domain_error("NormalNormalConfig: sigma > 0 required");
    if (sigma0 < 0.0) throw std::domain_error("NormalNormalConfig: sigma0 >= 0 required");
}

namespace {

double z_obs(const NormalNormalConfig& cfg, double ybar_obs) {
    double d = ybar_obs - cfg.theta0;
    return cfg.n * d * d / (cfg.sigma * cfg.sigma);
}

}  // namespace

double ppp_closed_form(const NormalNormalConfig& cfg, double ybar_obs) {
    cfg.validate();
    if (cfg.sigma0 == 0.0) return chisq_tail(z_obs(cfg, ybar_obs), 1.0);  // classic p-value
    double rho = cfg.rho_n();
    double kappa = (1.0 - rho) * (1.0 - rho) / rho * z_obs(cfg, ybar_obs);
    return noncentral_f_cdf(1.0 / rho, kappa, 1);
}

std::vector<double> null_ppp_sample(const NormalNormalConfig& cfg, long m, RngStream rng) {
    cfg.validate();
    std::vector<double> out(m);
    double rho = cfg.rho_n();
    for (long i = 0; i < m; ++i) {
        double mm = sample_normal(rng);
        if (rho == 0.0) {
            out[i] = chisq_tail(mm * mm, 1.0);  // exactly uniform in the sharp-prior limit
        } else {
            out[i] = noncentral_f_cdf(1.0 / rho, (1.0 - rho) / rho * mm * mm, 1);
        }
    }
    return out;
}

double null_ppp_cdf(const NormalNormalConfig& cfg, double u) {
    cfg.validate();
    if (u <= 0.0) return 0.0;
    double rho = cfg.rho_n();
    if (rho == 0.0) return std::min(1.0, u);  // ppp(Y) uniform for a point prior
    double cutoff = noncentral_f_cdf(1.0 / rho, 0.0, 1);
    if (u >= cutoff) return 1.0;
    double q = noncentral_f_excentre_inverse(1.0 / rho, u, 1);
    return chisq_tail(q * rho / (1.0 - rho), 1.0);
}

double cppp_closed_form(const NormalNormalConfig& cfg, double ybar_obs) {
    cfg.validate();
    double scale = 1.0 + cfg.n * cfg.sigma0 * cfg.sigma0 / (cfg.sigma * cfg.sigma);
    return chisq_tail(z_obs(cfg, ybar_obs) / scale, 1.0);
}

double cppp_star_closed_form(const NormalNormalConfig& cfg, double ybar_obs) {
    cfg.validate();
    double rho = cfg.rho_n();
    double z = z_obs(cfg, ybar_obs);
    return noncentral_chisq_tail(z / (1.0 + rho), 1.0, rho * rho * z / (1.0 + rho));
}

double conflict_measure(double theta_tr, const NormalNormalConfig& cfg) {
    cfg.validate();
    if (cfg.sigma0 == 0.0)
        throw std::domain_error("conflict_measure: undefined for a point prior (sigma0 = 0)");
    return std::fabs(theta_tr - cfg.theta0) / cfg.sigma0;
}

std::optional<double> calibrate_prior_sigma0(long n, double sigma, double theta0, double ybar_obs,
                                             double alpha) {
    if (n <= 0 || !(sigma > 0.0)) throw std::domain_error("calibrate_prior_sigma0: bad n/sigma");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("calibrate_prior_sigma0: alpha in (0,1) required");
    double z = normal_quantile(1.0 - alpha / 2.0);
    double z_crit = z * z;
    double d = ybar_obs - theta0;
    double zobs = n * d * d / (sigma * sigma);
    if (zobs < z_crit) return std::nullopt;  // sharp prior at theta0 allowed
    return sigma / std::sqrt(static_cast<double>(n)) * std::sqrt(zobs / z_crit - 1.0);
}

void MixturePrior::validate() const {
    if (components.empty()) throw std::domain_error("MixturePrior: no components");
    double total = 0.0;
    for (const auto& c : components) {
        if (!(c.weight > 0.0)) throw std::domain_error("MixturePrior: weights must be positive");
        if (c.sigma0 < 0.0) throw std::domain_error("MixturePrior: sigma0 >= 0 required");
        total += c.weight;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::domain_error("MixturePrior: weights must sum to 1");
}

std::vector<double> mixture_posterior_weights(const MixturePrior& mix, long n, double sigma,
                                              double ybar_obs) {
    mix.validate();
    // p~_j proportional to p_j N(ybar; theta0_j, sigma0_j^2 + sigma^2/n),
    // in log space with max subtraction so sharp components do not underflow.
    std::vector<double> logw(mix.components.size());
    for (std::size_t j = 0; j < mix.components.size(); ++j) {
        const auto& c = mix.components[j];
        double var = c.sigma0 * c.sigma0 + sigma * sigma / n;
        double d = ybar_obs - c.theta0;
        logw[j] = std::log(c.weight) - 0.5 * std::log(var) - 0.5 * d * d / var;
    }
    double mx = logw[0];
    for (double lw : logw) mx = std::max(mx, lw);
    double total = 0.0;
    std::vector<double> w(logw.size());
    for (std::size_t j = 0; j < logw.size(); ++j) {
        w[j] = std::exp(logw[j] - mx);
        total += w[j];
    }
    for (double& x : w) x /= total;
    return w;
}

double mixture_ppp(const MixturePrior& mix, long n, double sigma, double ybar_obs) {
    std::vector<double> w = mixture_posterior_weights(mix, n, sigma, ybar_obs);
    double out = 0.0;
    for (std::size_t j = 0; j < mix.components.size(); ++j) {
        const auto& c = mix.components[j];
        NormalNormalConfig cfg{n, sigma, c.theta0, c.sigma0};
        out += w[j] * ppp_closed_form(cfg, ybar_obs);
    }
    return out;
}

std::vector<CurvePoint> ppp_curves(const NormalNormalConfig& cfg, double ybar_lo, double ybar_hi,
                                   int points) {
    if (points < 2) throw std::invalid_argument("ppp_curves: points >= 2 required");
    std::vector<CurvePoint> out(points);
    for (int i = 0; i < points; ++i) {
        double y = ybar_lo + (ybar_hi - ybar_lo) * i / (points - 1);
        out[i] = {y, ppp_closed_form(cfg, y), cppp_closed_form(cfg, y),
                  cppp_star_closed_form(cfg, y)};
    }
    return out;
}

double NormalNormalModel::sample_prior(RngStream& rng) const {
    return cfg.theta0 + cfg.sigma0 * sample_normal(rng);
}

double NormalNormalModel::sample_data(const double& theta, RngStream& rng) const {
    return theta + cfg.sigma / std::sqrt(static_cast<double>(cfg.n)) * sample_normal(rng);
}

NormalNormalModel::Posterior NormalNormalModel::make_posterior(const double& ybar,
                                                               RngStream&) const {
    double rho = cfg.rho_n();
    double mean = (1.0 - rho) * cfg.theta0 + rho * ybar;
    double sd = std::sqrt(rho / cfg.n) * cfg.sigma;
    return Posterior{mean, sd};
}

double NormalNormalModel::Posterior::draw(RngStream& rng) const {
    return mean + sd * sample_normal(rng);
}

double NormalNormalPivotRb::replicate_tail(double d_obs, double) const {
    return chisq_tail(d_obs, 1.0);
}

MixtureNormalModel::MixtureNormalModel(MixturePrior m, long n_, double sigma_)
    : mix(std::move(m)), n(n_), sigma(sigma_) {
    mix.validate();
    if (n < 1 || !(sigma > 0.0)) throw std::domain_error("MixtureNormalModel: bad n or sigma");
}

double MixtureNormalModel::sample_prior(RngStream& rng) const {
    double u = rng.uniform01(), acc = 0.0;
    for (const auto& c : mix.components) {
        acc += c.weight;
        if (u <= acc) return c.theta0 + c.sigma0 * sample_normal(rng);
    }
    const auto& last = mix.components.back();
    return last.theta0 + last.sigma0 * sample_normal(rng);
}

double MixtureNormalModel::sample_data(const double& theta, RngStream& rng) const {
    return theta + sigma / std::sqrt(static_cast<double>(n)) * sample_normal(rng);
}

MixtureNormalModel::Posterior MixtureNormalModel::make_posterior(const double& ybar,
                                                                 RngStream&) const {
    return {this, mixture_posterior_weights(mix, n, sigma, ybar), ybar};
}

double MixtureNormalModel::Posterior::draw(RngStream& rng) const {
    double u = rng.uniform01(), acc = 0.0;
    std::size_t pick = weights.size() - 1;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        acc += weights[j];
        if (u <= acc) {
            pick = j;
            break;
        }
    }
    const auto& c = model->mix.components[pick];
    NormalNormalConfig cfg{model->n, model->sigma, c.theta0, c.sigma0};
    double rho = cfg.rho_n();
    double mean = (1.0 - rho) * c.theta0 + rho * ybar;
    double sd = std::sqrt(rho / model->n) * model->sigma;
    return mean + sd * sample_normal(rng);
}

}  // namespace ppc
