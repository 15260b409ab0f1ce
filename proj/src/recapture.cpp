#include "ppc/recapture.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ppc/distributions.hpp"

namespace ppc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logit(double x) { return std::log(x / (1.0 - x)); }
double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void RecaptureData::validate() const {
    if (releases.empty()) throw std::domain_error("RecaptureData: no release years");
    if (recaptures.size() != releases.size())
        throw std::domain_error("RecaptureData: row count must match releases");
    const long t = occasions();
    for (long i = 1; i <= release_years(); ++i) {
        const auto& row = recaptures[i - 1];
        if (static_cast<long>(row.size()) != t - i)
            throw std::domain_error("RecaptureData: row " + std::to_string(i) +
                                    " must have " + std::to_string(t - i) + " cells");
        long total = 0;
        for (long c : row) {
            if (c < 0) throw std::domain_error("RecaptureData: negative count");
            total += c;
        }
        if (total > releases[i - 1])
            throw std::domain_error("RecaptureData: recaptures exceed releases in row " +
                                    std::to_string(i));
    }
}

RecaptureData RecaptureData::dipper() {
    RecaptureData d;
    d.releases = {22, 60, 78, 80, 88, 98};
    d.recaptures = {
        {11, 2, 0, 0, 0, 0},
        {24, 1, 0, 0, 0},
        {34, 2, 0, 0},
        {45, 1, 2},
        {51, 0},
        {52},
    };
    d.validate();
    return d;
}

CjsParams CjsParams::make(CjsVariant variant, long release_years) {
    CjsParams p;
    p.variant = variant;
    long len = variant == CjsVariant::kConstant ? 1 : release_years;
    p.phi.assign(len, 0.5);
    p.pcap.assign(len, 0.5);
    return p;
}

void CjsParams::validate(long release_years) const {
    long want = variant == CjsVariant::kConstant ? 1 : release_years;
    if (static_cast<long>(phi.size()) != want || static_cast<long>(pcap.size()) != want)
        throw std::domain_error("CjsParams: parameter lengths inconsistent with variant");
    for (double v : phi)
        if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("CjsParams: phi outside [0,1]");
    for (double v : pcap)
        if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("CjsParams: p outside [0,1]");
}

double cell_probability(const CjsParams& params, long i, long j, long occasions) {
    if (i < 1 || j <= i || j > occasions)
        throw std::domain_error("cell_probability: need 1 <= i < j <= T");
    double prod = params.survival(i);
    for (long k = i + 1; k < j; ++k) prod *= params.survival(k) * (1.0 - params.capture(k));
    return prod * params.capture(j);
}

double never_recaptured_probability(const CjsParams& params, long i, long occasions) {
    double total = 0.0;
    for (long j = i + 1; j <= occasions; ++j) total += cell_probability(params, i, j, occasions);
    return 1.0 - total;
}

double log_likelihood(const CjsParams& params, const RecaptureData& data) {
    const long t = data.occasions();
    double ll = 0.0;
    for (long i = 1; i <= data.release_years(); ++i) {
        long seen = 0;
        double row_mass = 0.0;
        for (long j = i + 1; j <= t; ++j) {
            double cell = cell_probability(params, i, j, t);
            row_mass += cell;
            long count = data.recaptures[i - 1][j - i - 1];
            seen += count;
            if (count > 0) {
                if (cell <= 0.0) return kNegInf;
                ll += count * std::log(cell);
            }
        }
        long never = data.releases[i - 1] - seen;
        if (never > 0) {
            double chi = 1.0 - row_mass;
            if (chi <= 0.0) return kNegInf;
            ll += never * std::log(chi);
        }
    }
    return ll;
}

std::vector<std::vector<double>> expected_counts(const CjsParams& params,
                                                 const RecaptureData& data) {
    const long t = data.occasions();
    std::vector<std::vector<double>> e(data.release_years());
    for (long i = 1; i <= data.release_years(); ++i) {
        e[i - 1].resize(t - i);
        for (long j = i + 1; j <= t; ++j)
            e[i - 1][j - i - 1] = data.releases[i - 1] * cell_probability(params, i, j, t);
    }
    return e;
}

double freeman_tukey_discrepancy(const std::vector<std::vector<long>>& y,
                                 const std::vector<std::vector<double>>& e) {
    if (y.size() != e.size()) throw std::domain_error("freeman_tukey: shape mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i].size() != e[i].size()) throw std::domain_error("freeman_tukey: shape mismatch");
        for (std::size_t j = 0; j < y[i].size(); ++j) {
            double diff = std::sqrt(static_cast<double>(y[i][j])) - std::sqrt(e[i][j]);
            d += diff * diff;
        }
    }
    return d;
}

// --- posterior sampling -------------------------------------------------------

DipperModel::DipperModel(RecaptureData data, CjsVariant variant, ChainConfig chain)
    : data_(std::move(data)), variant_(variant), chain_(chain) {
    data_.validate();
    if (chain_.iterations < 1 || chain_.burn_in < 0 || chain_.thin < 1)
        throw std::invalid_argument("DipperModel: bad chain configuration");
}

CjsParams DipperModel::sample_prior(RngStream& rng) const {
    CjsParams p = CjsParams::make(variant_, data_.release_years());
    for (double& v : p.phi) v = rng.uniform01();
    for (double& v : p.pcap) v = rng.uniform01();
    return p;
}

DipperModel::Data DipperModel::sample_data(const Theta& theta, RngStream& rng) const {
    const long t = data_.occasions();
    Data y(data_.release_years());
    for (long i = 1; i <= data_.release_years(); ++i) {
        std::vector<double> probs(t - i + 1);
        for (long j = i + 1; j <= t; ++j)
            probs[j - i - 1] = cell_probability(theta, i, j, t);
        probs[t - i] = never_recaptured_probability(theta, i, t);
        std::vector<long> counts = sample_multinomial(data_.releases[i - 1], probs, rng);
        counts.pop_back();  // drop the never-recaptured cell
        y[i - 1] = std::move(counts);
    }
    return y;
}

DipperModel::Posterior::Posterior(const DipperModel* model, const Data& y, RngStream& rng)
    : model_(model), thin_(model->chain_.thin) {
    data_ = model->data_;
    data_.recaptures = y;
    data_.validate();

    const long npar = CjsParams::make(model->variant_, data_.release_years()).n_parameters();
    logit_.assign(npar, 0.0);
    step_sd_.assign(npar, model->chain_.proposal_sd);
    accepts_.assign(npar, 0);
    proposals_.assign(npar, 0);
    current_ = log_posterior(logit_);

    const long burn = model->chain_.burn_in;
    for (long it = 0; it < burn; ++it) sweep(rng, (it + 1) % 50 == 0);
    for (long& a : accepts_) a = 0;
    for (long& p : proposals_) p = 0;
}

double DipperModel::Posterior::log_posterior(const std::vector<double>& x) const {
    CjsParams p = CjsParams::make(model_->variant_, data_.release_years());
    const std::size_t half = p.phi.size();
    double log_jacobian = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        double v = expit(x[d]);
        (d < half ? p.phi[d] : p.pcap[d - half]) = v;
        log_jacobian += std::log(v) + std::log1p(-v);  // flat prior on [0,1]
    }
    double ll = log_likelihood(p, data_);
    return ll == kNegInf ? kNegInf : ll + log_jacobian;
}

void DipperModel::Posterior::sweep(RngStream& rng, bool adapt_tick) {
    for (std::size_t d = 0; d < logit_.size(); ++d) {
        double old = logit_[d];
        logit_[d] = old + step_sd_[d] * sample_normal(rng);
        double proposed = log_posterior(logit_);
        ++proposals_[d];
        if (std::log(rng.uniform01()) < proposed - current_) {
            current_ = proposed;
            ++accepts_[d];
        } else {
            logit_[d] = old;
        }
    }
    if (adapt_tick) {
        for (std::size_t d = 0; d < logit_.size(); ++d) {
            double rate = proposals_[d] ? static_cast<double>(accepts_[d]) / proposals_[d] : 0.35;
            step_sd_[d] *= std::exp(rate - 0.35);
            accepts_[d] = 0;
            proposals_[d] = 0;
        }
    }
}

CjsParams DipperModel::Posterior::draw(RngStream& rng) {
    for (long s = 0; s < thin_; ++s) sweep(rng, false);
    CjsParams p = CjsParams::make(model_->variant_, data_.release_years());
    const std::size_t half = p.phi.size();
    for (std::size_t d = 0; d < logit_.size(); ++d)
        (d < half ? p.phi[d] : p.pcap[d - half]) = expit(logit_[d]);
    return p;
}

std::vector<double> DipperModel::Posterior::acceptance_rates() const {
    std::vector<double> rates(logit_.size(), 0.0);
    for (std::size_t d = 0; d < logit_.size(); ++d)
        if (proposals_[d] > 0) rates[d] = static_cast<double>(accepts_[d]) / proposals_[d];
    return rates;
}

std::string DipperModel::Posterior::diagnostics() const {
    auto rates = acceptance_rates();
    double lo = 1.0, hi = 0.0;
    int flagged = 0;
    for (double r : rates) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        if (r < 0.1 || r > 0.6) ++flagged;
    }
    if (proposals_.empty() || proposals_[0] == 0) return "mh: no post-burn-in sweeps yet";
    char buf[128];
    std::snprintf(buf, sizeof buf, "mh acceptance %.2f..%.2f over %zu coordinates%s", lo, hi,
                  rates.size(), flagged ? " (outside [0.1,0.6], see warnings)" : "");
    return buf;
}

DipperModel::Posterior DipperModel::make_posterior(const Data& y, RngStream& rng) const {
    return Posterior(this, y, rng);
}

double FreemanTukey::evaluate(const std::vector<std::vector<long>>& y,
                              const CjsParams& theta) const {
    return freeman_tukey_discrepancy(y, expected_counts(theta, *data));
}

McmcRun sample_posterior_mh(const RecaptureData& data, CjsVariant variant,
                            const ChainConfig& chain, RngStream rng) {
    DipperModel model(data, variant, chain);
    auto posterior = model.make_posterior(data.recaptures, rng);

    McmcRun run;
    const long npar = CjsParams::make(variant, data.release_years()).n_parameters();
    std::vector<std::vector<double>> trace(npar);
    for (long it = 0; it < chain.iterations; ++it) {
        CjsParams p = posterior.draw(rng);
        run.draws.push_back(p);
        for (std::size_t d = 0; d < p.phi.size(); ++d) trace[d].push_back(p.phi[d]);
        for (std::size_t d = 0; d < p.pcap.size(); ++d)
            trace[p.phi.size() + d].push_back(p.pcap[d]);
    }
    run.acceptance_rates = posterior.acceptance_rates();
    for (std::size_t d = 0; d < run.acceptance_rates.size(); ++d) {
        double r = run.acceptance_rates[d];
        if (r < 0.1 || r > 0.6)
            run.warnings.push_back("coordinate " + std::to_string(d) +
                                   " acceptance rate " + std::to_string(r) +
                                   " outside [0.1, 0.6]");
    }

    run.posterior_mean.resize(npar);
    run.posterior_sd.resize(npar);
    run.min_effective_sample_size = std::numeric_limits<double>::infinity();
    for (long d = 0; d < npar; ++d) {
        const auto& x = trace[d];
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= x.size();
        double var = 0.0;
        for (double v : x) var += (v - mean) * (v - mean);
        var /= x.size();
        run.posterior_mean[d] = mean;
        run.posterior_sd[d] = std::sqrt(var);

        // initial-positive-sequence ESS on the thinned chain
        double rho_sum = 0.0;
        for (std::size_t lag = 1; lag < x.size() / 2; ++lag) {
            double acf = 0.0;
            for (std::size_t t = 0; t + lag < x.size(); ++t)
                acf += (x[t] - mean) * (x[t + lag] - mean);
            acf /= (x.size() - lag) * var;
            if (acf <= 0.0) break;
            rho_sum += acf;
        }
        double ess = x.size() / (1.0 + 2.0 * rho_sum);
        run.min_effective_sample_size = std::min(run.min_effective_sample_size, ess);
    }
    return run;
}

PppEstimate ppp_dipper(const RecaptureData& data, CjsVariant variant, long A,
                       const ChainConfig& chain, RngStream rng) {
    DipperModel model(data, variant, chain);
    FreemanTukey disc{&model.data()};
    return estimate_ppp(model, disc, data.recaptures, A, rng);
}

CpppEstimate cppp_dipper(const RecaptureData& data, CjsVariant variant, long A, long B,
                         const ChainConfig& chain, RngStream rng, int workers) {
    DipperModel model(data, variant, chain);
    FreemanTukey disc{&model.data()};
    return calibrate_cppp(model, disc, data.recaptures, A, B, rng, workers);
}

}  // namespace ppc
