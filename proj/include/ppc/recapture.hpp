#pragma once

#include <string>
#include <vector>

#include "ppc/engine.hpp"
#include "ppc/rng.hpp"

namespace ppc {

// Triangular recapture counts: y[i][j] birds released at occasion i (1-based,
// i = 1..I) and first recaptured at occasion j (j = i+1..T, T = I+1), plus
// the release totals R_i.
struct RecaptureData {
    std::vector<long> releases;                  // R_i, length I
    std::vector<std::vector<long>> recaptures;   // row i-1 holds y_{i,i+1..T}

    long occasions() const { return static_cast<long>(releases.size()) + 1; }
    long release_years() const { return static_cast<long>(releases.size()); }
    void validate() const;

    // Table 2, the European Dipper 1981-1987.
    static RecaptureData dipper();
};

enum class CjsVariant { kTimeVarying, kConstant };  // T/T and C/C

// phi[i] survives year i (i = 1..I); pcap[j] captured at occasion j
// (j = 2..T).  The constant variant broadcasts single values.
struct CjsParams {
    CjsVariant variant = CjsVariant::kTimeVarying;
    std::vector<double> phi;
    std::vector<double> pcap;

    double survival(long i) const { return variant == CjsVariant::kConstant ? phi[0] : phi[i - 1]; }
    double capture(long j) const {
        return variant == CjsVariant::kConstant ? pcap[0] : pcap[j - 2];
    }
    static CjsParams make(CjsVariant variant, long release_years);
    long n_parameters() const { return static_cast<long>(phi.size() + pcap.size()); }
    void validate(long release_years) const;
};

// phi_i p_j prod_{k=i+1}^{j-1} phi_k (1 - p_k); empty products are 1.
double cell_probability(const CjsParams& params, long i, long j, long occasions);

// chi_i = 1 - sum_{j > i} cell(i, j).
double never_recaptured_probability(const CjsParams& params, long i, long occasions);

// Multinomial log likelihood up to the constant coefficient; -inf when a
// positive count sits on a zero-probability cell.
double log_likelihood(const CjsParams& params, const RecaptureData& data);

// e_{i,j} = R_i cell(i, j), in the same triangular layout as the counts.
std::vector<std::vector<double>> expected_counts(const CjsParams& params,
                                                 const RecaptureData& data);

// Freeman-Tukey: sum over cells of (sqrt(y) - sqrt(e))^2.
double freeman_tukey_discrepancy(const std::vector<std::vector<long>>& y,
                                 const std::vector<std::vector<double>>& e);

struct ChainConfig {
    long iterations = 2000;   // retained draws
    long burn_in = 4000;
    long thin = 10;
    double proposal_sd = 1.0;  // initial logit-scale step, adapted in burn-in
};

struct McmcRun {
    std::vector<CjsParams> draws;
    std::vector<double> acceptance_rates;  // per coordinate, after adaptation
    std::vector<double> posterior_mean;    // phi then pcap
    std::vector<double> posterior_sd;
    double min_effective_sample_size = 0.0;
    std::vector<std::string> warnings;
};

// Random-walk Metropolis on logit-transformed parameters, independent
// uniform priors on [0,1].
McmcRun sample_posterior_mh(const RecaptureData& data, CjsVariant variant,
                            const ChainConfig& chain, RngStream rng);

// --- engine adapter ----------------------------------------------------------

// Replicate data sets are independent multinomials per release cohort with
// the release totals held fixed at the observed values.
class DipperModel {
  public:
    using Theta = CjsParams;
    using Data = std::vector<std::vector<long>>;  // triangular counts

    DipperModel(RecaptureData data, CjsVariant variant, ChainConfig chain);

    bool prior_samplable() const { return true; }

    Theta sample_prior(RngStream& rng) const;
    Data sample_data(const Theta& theta, RngStream& rng) const;

    class Posterior {
      public:
        Posterior(const DipperModel* model, const Data& y, RngStream& rng);
        Theta draw(RngStream& rng);
        std::vector<double> acceptance_rates() const;
        std::string diagnostics() const;  // picked up by the engine's estimates

      private:
        double log_posterior(const std::vector<double>& logit) const;
        void sweep(RngStream& rng, bool adapt_tick);

        const DipperModel* model_;
        RecaptureData data_;
        std::vector<double> logit_, step_sd_;
        double current_ = 0.0;
        long thin_;
        std::vector<long> accepts_, proposals_;
    };
    Posterior make_posterior(const Data& y, RngStream& rng) const;

    const RecaptureData& data() const { return data_; }
    CjsVariant variant() const { return variant_; }
    const ChainConfig& chain() const { return chain_; }

  private:
    RecaptureData data_;
    CjsVariant variant_;
    ChainConfig chain_;
};

struct FreemanTukey {
    const RecaptureData* data;
    double evaluate(const std::vector<std::vector<long>>& y, const CjsParams& theta) const;
};

PppEstimate ppp_dipper(const RecaptureData& data, CjsVariant variant, long A,
                       const ChainConfig& chain, RngStream rng);

CpppEstimate cppp_dipper(const RecaptureData& data, CjsVariant variant, long A, long B,
                         const ChainConfig& chain, RngStream rng, int workers = 0);

}  // namespace ppc
