#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ppc/distributions.hpp"
#include "ppc/empirical.hpp"
#include "ppc/nonparametric.hpp"
#include "ppc/special.hpp"

using namespace ppc;

namespace {

std::vector<double> exponential_sample(long n, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<double> y(n);
    for (long i = 0; i < n; ++i) y[i] = -std::log(rng.uniform01());
    return y;
}

// truncation-free Polya-urn draw of one future observation given data
double polya_urn_draw(const DpPrior& prior, const std::vector<double>& data, RngStream& rng) {
    double total = prior.a + static_cast<double>(data.size());
    if (rng.uniform01() < prior.a / total)
        return prior.f0_mean + prior.f0_sd * sample_normal(rng);
    std::size_t idx = static_cast<std::size_t>(rng.uniform01() * data.size());
    return data[std::min(idx, data.size() - 1)];
}

}  // namespace

TEST_CASE("realized cdfs are valid distribution functions") {
    DpPrior prior;
    prior.a = 2.0;
    RngStream rng(1);
    std::vector<double> data = exponential_sample(40, 2);
    for (int rep = 0; rep < 10; ++rep) {
        RealizedCdf f = dp_posterior_sample(prior, data, rng);
        CHECK(f(-1e9) == 0.0);
        CHECK(f(1e9) == doctest::Approx(1.0));
        double prev = 0.0;
        for (double w : f.cum_weights()) {
            CHECK(w >= prev);
            prev = w;
        }
        for (std::size_t i = 1; i < f.atoms().size(); ++i)
            CHECK(f.atoms()[i] > f.atoms()[i - 1]);
    }
}

TEST_CASE("truncation bookkeeping") {
    // residual mean mass (c/(c+1))^L below 1e-6 at the required level
    for (double c : {0.5, 1.0, 41.0, 501.0}) {
        long level = DpPrior::required_truncation(c);
        CHECK(level * std::log1p(1.0 / c) > -std::log(1e-6));
    }
    DpPrior too_small;
    too_small.a = 1.0;
    too_small.truncation_level = 3;
    RngStream rng(3);
    std::vector<double> data = exponential_sample(30, 4);
    CHECK_THROWS(dp_posterior_sample(too_small, data, rng));
}

TEST_CASE("large concentration pins the realization to the base cdf") {
    DpPrior prior;
    prior.a = 100000.0;
    RngStream rng(5);
    RealizedCdf f = dp_posterior_sample(prior, {}, rng);
    double sup = 0.0;
    for (double t = -4.0; t <= 4.0; t += 0.05)
        sup = std::max(sup, std::fabs(f(t) - normal_cdf(t)));
    CHECK(sup < 0.01);
}

TEST_CASE("tiny concentration concentrates the realization on the data atoms") {
    DpPrior prior;
    prior.a = 1e-6;
    std::vector<double> data = exponential_sample(25, 6);
    std::sort(data.begin(), data.end());
    RngStream rng(7);
    RealizedCdf f = dp_posterior_sample(prior, data, rng);
    // every atom is one of the observations (the base measure holds ~4e-8
    // of the mass), though the weights stay Dirichlet-random
    for (double a : f.atoms()) CHECK(std::binary_search(data.begin(), data.end(), a));
    // averaging over draws recovers the empirical cdf
    EmpiricalCdf fn(data);
    const int reps = 3000;
    for (double t : {data[5], data[12], data[20]}) {
        double acc = 0.0;
        RngStream rng2(8);
        for (int r = 0; r < reps; ++r) acc += dp_posterior_sample(prior, data, rng2)(t);
        CHECK(acc / reps == doctest::Approx(fn(t)).epsilon(0.03));
    }
}

TEST_CASE("posterior mean of F(t) matches the mixture formula") {
    DpPrior prior;
    prior.a = 5.0;
    std::vector<double> data = exponential_sample(20, 8);
    EmpiricalCdf fn(data);
    RngStream rng(9);
    const int reps = 10000;
    for (double t : {0.2, 0.7, 1.5}) {
        double acc = 0.0;
        for (int r = 0; r < reps; ++r) acc += dp_posterior_sample(prior, data, rng)(t);
        acc /= reps;
        double expected = (prior.a * normal_cdf((t - prior.f0_mean) / prior.f0_sd) +
                           data.size() * fn(t)) /
                          (prior.a + data.size());
        CHECK(std::fabs(acc - expected) < 0.01);
    }
}

TEST_CASE("truncated replicate marginal agrees with the polya urn") {
    DpPrior prior;
    prior.a = 3.0;
    std::vector<double> data = exponential_sample(30, 10);
    RngStream rng(11);
    const long m = 100000;
    std::vector<double> via_stick(m), via_urn(m);
    for (long i = 0; i < m; ++i) {
        RealizedCdf f = dp_posterior_sample(prior, data, rng);
        via_stick[i] = f.sample(rng);
        via_urn[i] = polya_urn_draw(prior, data, rng);
    }
    double d = ks_two_sample_statistic(via_stick, via_urn);
    CHECK(ks_two_sample_pvalue(d, m, m) > 0.01);
    // analytic residual-mass bound at the default truncation
    double c = prior.a + data.size();
    CHECK(std::exp(-DpPrior::required_truncation(c) * std::log1p(1.0 / c)) < 1e-4);
}

TEST_CASE("the sqrt(n) factor cancels from the ppp bit-for-bit") {
    struct KsNoScale {
        double evaluate(const std::vector<double>& y, const RealizedCdf& f) const {
            EmpiricalCdf fn(y);
            return ks_distance_step(fn, f.atoms(), f.cum_weights());
        }
    };
    DpPrior prior;
    std::vector<double> data = exponential_sample(60, 12);
    DpModel model(prior, 60);
    auto with = estimate_ppp(model, KsAgainstRealized{}, data, 400, RngStream(13));
    auto without = estimate_ppp(model, KsNoScale{}, data, 400, RngStream(13));
    CHECK(with.value == without.value);
    CHECK(with.tie_count == without.tie_count);
}

TEST_CASE("moderate-n behaviour of the two priors on exponential data") {
    std::vector<double> data = exponential_sample(200, 14);
    DpPrior dp;
    dp.a = 1.0;
    auto np = ppp_np(data, dp, 400, RngStream(15));
    CHECK(std::fabs(np.value - 0.5) < 0.12);

    GnParams gn = GnParams::scalar(2.0, 2.0, 1.0, 1.0);
    auto par = ppp_parametric_ks(data, gn, 400, RngStream(16));
    CHECK(par.value < 0.15);  // normal model cannot track exponential data
}

TEST_CASE("normal prior on matching normal truth: engine cppp is uniform") {
    GnParams gn = GnParams::scalar(6.0, 6.0, 0.0, 2.0);
    const long n = 25;
    GnScalarDataModel model(gn, n);
    KsAgainstNormal disc;
    const int reps = 200;
    std::vector<double> values(reps);
    for (int r = 0; r < reps; ++r) {
        RngStream sub(17, 1000 + r);
        GnTheta theta = model.sample_prior(sub);
        auto y = model.sample_data(theta, sub);
        values[r] = calibrate_cppp(model, disc, y, 120, 120, sub).value;
    }
    EmpiricalCdf fn(values);
    double d = ks_distance(fn, [](double u) { return std::clamp(u, 0.0, 1.0); });
    CHECK(d < 1.3581 / std::sqrt(static_cast<double>(reps)));  // 5% level
}

TEST_CASE("compare-np produces calibrated values for both priors") {
    std::vector<double> data = exponential_sample(80, 18);
    DpPrior dp;
    GnParams gn = GnParams::scalar(4.0, 4.0, 1.0, 1.0);
    auto result = compare_np(data, dp, gn, 120, 150, RngStream(19), 2);
    CHECK(result.dirichlet.outer_b == 150);
    CHECK(result.parametric.outer_b == 150);
    CHECK(result.dirichlet.value >= 0.0);
    CHECK(result.dirichlet.value <= 1.0);
    // exponential data embarrass the normal prior, not the DP prior
    CHECK(result.parametric.value < result.dirichlet.value);
}
