#include "ppc/elicitation.hpp"

#include <cmath>
#include <stdexcept>

#include "ppc/distributions.hpp"

namespace ppc {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> spd_eigen(const Eigen::MatrixXd& m,
                                                         const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw std::domain_error(std::string(what) + ": matrix must be positive definite");
    return es;
}

}  // namespace

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m) {
    auto es = spd_eigen(m, "spd_sqrt");
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
}

Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& m) {
    auto es = spd_eigen(m, "spd_inv_sqrt");
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

void CorrelationBelief::validate() const {
    if (rho0.size() == 0 || Sn.rows() != rho0.size() || Sn.cols() != rho0.size())
        throw std::domain_error("CorrelationBelief: inconsistent dimensions");
    for (Eigen::Index j = 0; j < rho0.size(); ++j)
        if (!(std::fabs(rho0[j]) < 1.0))
            throw std::domain_error("CorrelationBelief: |rho0_j| < 1 required");
    if (!(sigma0_guess > 0.0)) throw std::domain_error("CorrelationBelief: sigma0_guess > 0");
    if (tau < 0.0) throw std::domain_error("CorrelationBelief: tau >= 0 required");
    spd_eigen(Sn, "CorrelationBelief");
    Eigen::VectorXd v = v0();
    double quad = v.dot(Sn.llt().solve(v));
    if (!(quad < 1.0))
        throw std::domain_error("CorrelationBelief: infeasible, v0' Sn^{-1} v0 must be < 1");
}

Eigen::VectorXd CorrelationBelief::dn_sqrt() const { return Sn.diagonal().cwiseSqrt(); }

Eigen::VectorXd CorrelationBelief::target() const { return spd_inv_sqrt(Sn) * v0(); }

Eigen::VectorXd solve_z0(const CorrelationBelief& belief, long mc_size, RngStream rng) {
    belief.validate();
    const int p = static_cast<int>(belief.rho0.size());
    const Eigen::VectorXd w = belief.target();
    const double sigma0 = belief.sigma0_guess;
    const double tau = belief.tau;

    // tau = 0 is deterministic: z0/sigma0 = w / (1 - ||w||^2)^{1/2}.
    double nw2 = w.squaredNorm();
    Eigen::VectorXd z = sigma0 * w / std::sqrt(1.0 - nw2);
    if (tau == 0.0) return z;

    // common random numbers, fixed across all iterations
    Eigen::MatrixXd noise(mc_size, p);
    for (long i = 0; i < mc_size; ++i)
        for (int j = 0; j < p; ++j) noise(i, j) = sample_normal(rng);

    auto g = [&](const Eigen::VectorXd& z0) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(p);
        Eigen::VectorXd base = z0 / sigma0;
        for (long i = 0; i < mc_size; ++i) {
            Eigen::VectorXd u = base + tau * noise.row(i).transpose();
            acc += u / std::sqrt(1.0 + u.squaredNorm());
        }
        return (acc / mc_size).eval();
    };

    // damped Gauss-Newton with forward-difference Jacobian
    double mu = 1e-4;
    Eigen::VectorXd r = g(z) - w;
    for (int iter = 0; iter < 100; ++iter) {
        if (r.squaredNorm() < 1e-14) break;
        Eigen::MatrixXd jac(p, p);
        for (int j = 0; j < p; ++j) {
            double h = 1e-5 * (1.0 + std::fabs(z[j]));
            Eigen::VectorXd zh = z;
            zh[j] += h;
            jac.col(j) = (g(zh) - r - w) / h;
        }
        Eigen::MatrixXd jtj = jac.transpose() * jac;
        for (int damp = 0; damp < 20; ++damp) {
            Eigen::MatrixXd lhs = jtj + mu * Eigen::MatrixXd::Identity(p, p);
            Eigen::VectorXd step = lhs.llt().solve(-jac.transpose() * r);
            Eigen::VectorXd r_new = g(z + step) - w;
            if (r_new.squaredNorm() < r.squaredNorm()) {
                z += step;
                r = r_new;
                mu = std::max(mu * 0.3, 1e-12);
                break;
            }
            mu *= 10.0;
            if (damp == 19)
                throw EstimationError("solve_z0: solver stagnated",
                                      "objective=" + std::to_string(r.squaredNorm()));
        }
    }
    if (r.squaredNorm() >= 1e-6)
        throw EstimationError("solve_z0: did not reach objective tolerance",
                              "objective=" + std::to_string(r.squaredNorm()));
    return z;
}

RhoPriorSummary sample_rho_prior(const Eigen::VectorXd& z0, const CorrelationBelief& belief,
                                 long m, RngStream rng, bool draw_sigma, double a0, double b0) {
    belief.validate();
    const int p = static_cast<int>(belief.rho0.size());
    Eigen::MatrixXd root = spd_sqrt(belief.Sn);
    Eigen::VectorXd s = belief.dn_sqrt();

    RhoPriorSummary out;
    out.draws.resize(m, p);
    for (long i = 0; i < m; ++i) {
        double sigma = belief.sigma0_guess;
        if (draw_sigma) {
            if (!(a0 > 0.0) || !(b0 > 0.0))
                throw std::domain_error("sample_rho_prior: gamma parameters required");
            sigma = 1.0 / std::sqrt(sample_gamma(0.5 * a0, 0.5 * b0, rng));
        }
        Eigen::VectorXd u = z0 / sigma;
        for (int j = 0; j < p; ++j) u[j] += belief.tau * sample_normal(rng);
        Eigen::VectorXd v = root * (u / std::sqrt(1.0 + u.squaredNorm()));
        out.draws.row(i) = v.cwiseQuotient(s).transpose();
    }
    out.mean = out.draws.colwise().mean();
    Eigen::MatrixXd centred = out.draws.rowwise() - out.mean.transpose();
    Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(m);
    out.sd = cov.diagonal().cwiseSqrt();
    out.correlation = Eigen::MatrixXd::Identity(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (i != j && out.sd[i] > 0.0 && out.sd[j] > 0.0)
                out.correlation(i, j) = cov(i, j) / (out.sd[i] * out.sd[j]);
    return out;
}

std::pair<double, double> match_gamma_hyperparams(double kappa_hat, const Eigen::VectorXd& v0,
                                                  const Eigen::MatrixXd& Sn, long n) {
    if (!(kappa_hat > 0.0)) throw std::domain_error("match_gamma_hyperparams: kappa_hat > 0");
    if (n < 5) throw std::domain_error("match_gamma_hyperparams: need n >= 5 for finite moments");
    double quad = v0.dot(Sn.llt().solve(v0));
    if (!(quad < 1.0)) throw std::domain_error("match_gamma_hyperparams: v0' Sn^{-1} v0 >= 1");
    double s_star = kappa_hat * kappa_hat * (1.0 - quad);
    double m = static_cast<double>(n - 1);
    double a0 = (m - 2.0) * (m - 2.0) * (m - 4.0) / (m * m);
    return {a0, a0 * s_star};
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> center_covariates(const Eigen::MatrixXd& X) {
    Eigen::VectorXd means = X.colwise().mean();
    return {X.rowwise() - means.transpose(), means};
}

ElicitedPrior elicit_prior(const CorrelationBelief& belief, double kappa_hat, long n,
                           double intercept_guess, long mc_size, RngStream rng) {
    ElicitedPrior out;
    out.z0 = solve_z0(belief, mc_size, rng);
    out.b_bar = spd_inv_sqrt(belief.Sn) * out.z0;
    out.tau = belief.tau;
    auto [a0, b0] = match_gamma_hyperparams(kappa_hat, belief.v0(), belief.Sn, n);
    out.a0 = a0;
    out.b0 = b0;
    out.b0_intercept = intercept_guess;
    return out;
}

GnParams assemble_prior(const ElicitedPrior& prior, const CorrelationBelief& belief) {
    if (!(prior.tau > 0.0)) throw std::domain_error("assemble_prior: tau > 0 required");
    const int p = static_cast<int>(prior.b_bar.size());
    GnParams gn;
    gn.a = prior.a0;
    gn.b = prior.b0;
    gn.c0 = 1.0 / (prior.tau * prior.tau);
    gn.mu0.resize(p + 1);
    gn.mu0[0] = prior.b0_intercept;
    gn.mu0.tail(p) = prior.b_bar;
    gn.omega0 = Eigen::MatrixXd::Zero(p + 1, p + 1);
    gn.omega0(0, 0) = 1.0;
    gn.omega0.bottomRightCorner(p, p) = belief.Sn;
    gn.validate();
    return gn;
}

}  // namespace ppc
