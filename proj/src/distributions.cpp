#include "ppc/distributions.hpp"

#include <cmath>
#include <stdexcept>

#include "ppc/special.hpp"

namespace ppc {

double sample_normal(RngStream& rng) {
    // Inversion keeps the draw a pure function of one uniform, which makes
    // the seed -> sample map identical across platforms and worker layouts.
    return normal_quantile(rng.uniform01());
}

double sample_gamma(double shape, double rate, RngStream& rng) {
    if (shape <= 0.0 || rate <= 0.0)
        throw std::domain_error("sample_gamma: need shape > 0, rate > 0");
    if (shape < 1.0) {
        double x = sample_gamma(shape + 1.0, 1.0, rng);
        double u = rng.uniform01();
        return x * std::pow(u, 1.0 / shape) / rate;
    }
    // Marsaglia-Tsang squeeze.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z = sample_normal(rng);
        double t = 1.0 + c * z;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = rng.uniform01();
        if (u < 1.0 - 0.0331 * z * z * z * z) return d * v / rate;
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

double sample_chisq(double df, RngStream& rng) { return sample_gamma(0.5 * df, 0.5, rng); }

double sample_noncentral_chisq(int df, double kappa, RngStream& rng) {
    if (df < 1 || kappa < 0.0)
        throw std::domain_error("sample_noncentral_chisq: need df >= 1, kappa >= 0");
    double n = sample_normal(rng) + std::sqrt(kappa);
    double x = n * n;
    if (df > 1) x += sample_chisq(df - 1.0, rng);
    return x;
}

double sample_beta(double a, double b, RngStream& rng) {
    if (a == 1.0) return 1.0 - std::pow(rng.uniform01(), 1.0 / b);
    double x = sample_gamma(a, 1.0, rng);
    double y = sample_gamma(b, 1.0, rng);
    return x / (x + y);
}

Eigen::VectorXd sample_mvnormal(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov_factor,
                                RngStream& rng) {
    Eigen::VectorXd z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sample_normal(rng);
    return mean + cov_factor * z;
}

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& cov) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("cholesky_factor: matrix is not positive definite");
    return llt.matrixL();
}

std::vector<long> sample_multinomial(long trials, const std::vector<double>& probs,
                                     RngStream& rng) {
    std::vector<double> cum(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] < 0.0) throw std::domain_error("sample_multinomial: negative probability");
        acc += probs[i];
        cum[i] = acc;
    }
    if (acc <= 0.0) throw std::domain_error("sample_multinomial: zero total mass");
    std::vector<long> counts(probs.size(), 0);
    for (long t = 0; t < trials; ++t) {
        double u = rng.uniform01() * acc;
        std::size_t lo = 0, hi = cum.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (u <= cum[mid])
                hi = mid;
            else
                lo = mid + 1;
        }
        ++counts[lo];
    }
    return counts;
}

}  // namespace ppc
