// ppcalib: posterior predictive p-values and their calibrated versions for a
// family of concrete models, driven by JSON configs and CSV data files.
//
// exit codes: 0 ok, 2 config error, 3 data error, 4 estimation error

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ppc/conjugate_gn.hpp"
#include "ppc/csv.hpp"
#include "ppc/elicitation.hpp"
#include "ppc/engine.hpp"
#include "ppc/nonparametric.hpp"
#include "ppc/normal_normal.hpp"
#include "ppc/recapture.hpp"
#include "ppc/special.hpp"

using nlohmann::json;
using namespace ppc;

namespace {

constexpr const char* kVersion = "ppcalib 0.1.0";

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flag values; zero/empty means "not given, fall back to the config".
struct Options {
    std::string config_path;
    std::string data_path;
    std::string out_path;
    std::uint64_t seed = 0;
    int workers = -1;
    long inner_a = 0;
    long outer_b = 0;
};

json load_config(const Options& opt) {
    json cfg = json::object();
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw ConfigError("cannot open config file: " + opt.config_path);
        try {
            in >> cfg;
        } catch (const json::exception& e) {
            throw ConfigError("config parse error: " + std::string(e.what()));
        }
    }
    if (!opt.data_path.empty()) cfg["data"] = opt.data_path;
    if (opt.seed != 0) cfg["seed"] = opt.seed;
    if (opt.workers >= 0) cfg["workers"] = opt.workers;
    if (opt.inner_a > 0) cfg["a"] = opt.inner_a;
    if (opt.outer_b > 0) cfg["b"] = opt.outer_b;
    if (!cfg.contains("seed")) cfg["seed"] = 1;
    if (!cfg.contains("workers")) cfg["workers"] = 0;
    if (!cfg.contains("a")) cfg["a"] = 2000;
    if (!cfg.contains("b")) cfg["b"] = 2000;
    return cfg;
}

template <class T>
T require(const json& cfg, const std::string& key) {
    if (!cfg.contains(key)) throw ConfigError("config: missing required field '" + key + "'");
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: field '" + key + "' has the wrong type");
    }
}

template <class T>
T value_or(const json& cfg, const std::string& key, T fallback) {
    if (!cfg.contains(key)) return fallback;
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: field '" + key + "' has the wrong type");
    }
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string config_hash(const json& cfg) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(cfg.dump())));
    return buf;
}

void emit(const json& record, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << record.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw DataError("cannot write output file: " + out_path);
        out << record.dump(2) << "\n";
    }
}

void emit_csv(const std::vector<double>& values, const std::string& header,
              const std::string& hash, const std::string& out_path) {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw DataError("cannot write output file: " + out_path);
        out = &file;
    }
    *out << "# config_hash=" << hash << "\n" << header << "\n";
    out->precision(12);
    for (double v : values) *out << v << "\n";
}

json record_skeleton(const std::string& command, const json& cfg) {
    json rec;
    rec["tool"] = kVersion;
    rec["command"] = command;
    rec["config"] = cfg;
    rec["config_hash"] = config_hash(cfg);
    return rec;
}

json ppp_to_json(const PppEstimate& est) {
    json j{{"value", est.value},
           {"mc_se", est.mc_se},
           {"replicates_a", est.replicates_a},
           {"seed", est.seed},
           {"tie_count", est.tie_count},
           {"rao_blackwell", est.rao_blackwell}};
    if (!est.sampler_diagnostics.empty()) j["sampler_diagnostics"] = est.sampler_diagnostics;
    return j;
}

json cppp_to_json(const CpppEstimate& est, bool with_samples) {
    json j{{"value", est.value},
           {"ci95", {est.binomial_ci_95.first, est.binomial_ci_95.second}},
           {"outer_b", est.outer_b},
           {"inner_a", est.inner_a},
           {"seed", est.seed},
           {"ppp_obs", ppp_to_json(est.ppp_obs)}};
    if (with_samples) j["null_ppp_samples"] = est.ppp_null_samples;
    return j;
}

// ------------------------------------------------------------- model parsing

NormalNormalConfig parse_normal_normal(const json& cfg, std::optional<double>* ybar) {
    json prior = require<json>(cfg, "prior");
    NormalNormalConfig nn{require<long>(cfg, "n"), require<double>(cfg, "sigma"),
                          require<double>(prior, "theta0"), require<double>(prior, "sigma0")};
    nn.validate();
    if (cfg.contains("ybar_obs")) {
        *ybar = cfg.at("ybar_obs").get<double>();
    } else if (cfg.contains("data")) {
        auto y = read_single_column_csv(cfg.at("data").get<std::string>());
        if (static_cast<long>(y.size()) != nn.n)
            throw DataError("data length " + std::to_string(y.size()) +
                            " does not match configured n = " + std::to_string(nn.n));
        double s = 0.0;
        for (double v : y) s += v;
        *ybar = s / y.size();
    } else {
        *ybar = std::nullopt;
    }
    return nn;
}

MixturePrior parse_mixture(const json& cfg) {
    MixturePrior mix;
    for (const auto& c : require<json>(cfg, "prior").at("components")) {
        mix.components.push_back({require<double>(c, "weight"), require<double>(c, "theta0"),
                                  require<double>(c, "sigma0")});
    }
    mix.validate();
    return mix;
}

struct GnScalarSetup {
    GnParams prior;      // meaningful only when !vague
    bool vague = false;  // c0 = 0: the uniform (mu, log sigma) limit
    std::vector<double> y;
};

GnScalarSetup parse_gn_scalar(const json& cfg) {
    GnScalarSetup s;
    json prior = require<json>(cfg, "prior");
    double c0 = require<double>(prior, "c0");
    if (c0 == 0.0) {
        s.vague = true;
    } else {
        s.prior = GnParams::scalar(require<double>(prior, "a0"), require<double>(prior, "b0"),
                                   require<double>(prior, "mu0"), c0);
    }
    s.y = read_single_column_csv(require<std::string>(cfg, "data"));
    return s;
}

struct GnRegressionSetup {
    GnParams prior;
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    bool proportional = false;
};

GnRegressionSetup parse_gn_regression(const json& cfg) {
    GnRegressionSetup s;
    Table table = read_table_csv(require<std::string>(cfg, "data"));
    std::string response = require<std::string>(cfg, "response");
    int y_col = table.column_index(response);
    if (y_col < 0) throw DataError("response column '" + response + "' not in data");
    const long n = table.values.rows();
    const int p = static_cast<int>(table.values.cols()) - 1;
    if (p < 1) throw DataError("regression data needs at least one covariate column");
    s.y = table.values.col(y_col);
    s.x.resize(n, p);
    for (int c = 0, k = 0; c < table.values.cols(); ++c)
        if (c != y_col) s.x.col(k++) = table.values.col(c);
    if (value_or<bool>(cfg, "center_covariates", false)) s.x = center_covariates(s.x).first;

    json prior = require<json>(cfg, "prior");
    s.prior.a = require<double>(prior, "a0");
    s.prior.b = require<double>(prior, "b0");
    s.prior.c0 = require<double>(prior, "c0");
    auto beta0 = require<std::vector<double>>(prior, "beta0");
    if (static_cast<int>(beta0.size()) != p)
        throw ConfigError("prior.beta0 length does not match the covariate count");
    s.prior.mu0 = Eigen::Map<Eigen::VectorXd>(beta0.data(), static_cast<Eigen::Index>(p));
    std::string omega0 = value_or<std::string>(prior, "omega0", "proportional");
    if (omega0 == "proportional") {
        s.prior.omega0 = (s.x.transpose() * s.x) / static_cast<double>(n);
        s.proportional = true;
    } else if (omega0 == "identity") {
        s.prior.omega0 = Eigen::MatrixXd::Identity(p, p);
    } else {
        throw ConfigError("prior.omega0 must be 'proportional' or 'identity'");
    }
    s.prior.validate();
    return s;
}

CjsVariant parse_variant(const std::string& v) {
    if (v == "tt") return CjsVariant::kTimeVarying;
    if (v == "cc") return CjsVariant::kConstant;
    throw ConfigError("variant must be 'tt' or 'cc'");
}

RecaptureData load_recapture(const json& cfg) {
    std::string path = value_or<std::string>(cfg, "data", "");
    return path.empty() ? RecaptureData::dipper() : read_recapture_csv(path);
}

ChainConfig parse_chain(const json& cfg) {
    ChainConfig chain;
    json c = value_or<json>(cfg, "chain", json::object());
    chain.burn_in = value_or<long>(c, "burn_in", 3000);
    chain.thin = value_or<long>(c, "thin", 5);
    chain.proposal_sd = value_or<double>(c, "proposal_sd", 1.0);
    return chain;
}

// --------------------------------------------------------------- subcommands

int cmd_ppp(const Options& opt) {
    json cfg = load_config(opt);
    std::string model = require<std::string>(cfg, "model");
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    const long a = cfg.at("a").get<long>();
    json rec = record_skeleton("ppp", cfg);
    auto t0 = std::chrono::steady_clock::now();

    if (model == "normal-normal") {
        std::optional<double> ybar;
        NormalNormalConfig nn = parse_normal_normal(cfg, &ybar);
        if (!ybar) throw ConfigError("normal-normal ppp needs ybar_obs or a data file");
        rec["path"] = "closed-form";
        rec["ppp"] = {{"value", ppp_closed_form(nn, *ybar)}, {"ybar_obs", *ybar}};
    } else if (model == "mixture") {
        MixturePrior mix = parse_mixture(cfg);
        double ybar = require<double>(cfg, "ybar_obs");
        rec["path"] = "closed-form";
        rec["ppp"] = {
            {"value", mixture_ppp(mix, require<long>(cfg, "n"), require<double>(cfg, "sigma"),
                                  ybar)},
            {"ybar_obs", ybar}};
    } else if (model == "gn-scalar") {
        GnScalarSetup s = parse_gn_scalar(cfg);
        std::string disc = value_or<std::string>(cfg, "discrepancy", "pivot");
        const long n = static_cast<long>(s.y.size());
        if (disc == "pivot" && !s.vague) {
            double ybar = 0.0, q0 = 0.0;
            for (double v : s.y) ybar += v;
            ybar /= n;
            for (double v : s.y) q0 += (v - ybar) * (v - ybar);
            GnIntegration integ;
            integ.draws = std::max<long>(a, 100000);
            integ.seed = seed;
            rec["path"] = "closed-form";
            rec["ppp"] = {{"value", ppp_gn_scalar(s.prior, ybar, q0, n, integ)}};
        } else {
            auto model_obj = s.vague ? GnScalarDataModel::vague(n) : GnScalarDataModel(s.prior, n);
            rec["path"] = "engine";
            if (disc == "pivot") {
                rec["ppp"] =
                    ppp_to_json(estimate_ppp(model_obj, GnMeanPivot{}, s.y, a, RngStream(seed)));
            } else if (disc == "order-gap") {
                OrderGapDiscrepancy gap;
                gap.upper = value_or<int>(cfg, "order_upper", 61);
                gap.lower = value_or<int>(cfg, "order_lower", 6);
                rec["ppp"] = ppp_to_json(estimate_ppp(model_obj, gap, s.y, a, RngStream(seed)));
            } else {
                throw ConfigError("gn-scalar discrepancy must be 'pivot' or 'order-gap'");
            }
        }
    } else if (model == "gn-regression") {
        GnRegressionSetup s = parse_gn_regression(cfg);
        rec["path"] = "rao-blackwell";
        rec["ppp"] =
            ppp_to_json(ppp_regression_gn(s.prior, RegressionData{s.x, s.y}, a, RngStream(seed)));
    } else if (model == "dipper") {
        RecaptureData data = load_recapture(cfg);
        CjsVariant variant = parse_variant(require<std::string>(cfg, "variant"));
        rec["path"] = "engine";
        rec["ppp"] = ppp_to_json(ppp_dipper(data, variant, a, parse_chain(cfg), RngStream(seed)));
    } else if (model == "nonparametric") {
        auto y = read_single_column_csv(require<std::string>(cfg, "data"));
        std::string which = value_or<std::string>(cfg, "np_prior", "dirichlet");
        rec["path"] = "engine";
        if (which == "dirichlet") {
            json dp_cfg = value_or<json>(cfg, "dp", json::object());
            DpPrior dp;
            dp.a = value_or<double>(dp_cfg, "a", 1.0);
            dp.f0_mean = value_or<double>(dp_cfg, "f0_mean", 0.0);
            dp.f0_sd = value_or<double>(dp_cfg, "f0_sd", 1.0);
            rec["ppp"] = ppp_to_json(ppp_np(y, dp, a, RngStream(seed)));
        } else if (which == "normal") {
            json p = require<json>(cfg, "prior");
            GnParams gn = GnParams::scalar(require<double>(p, "a0"), require<double>(p, "b0"),
                                           require<double>(p, "mu0"), require<double>(p, "c0"));
            rec["ppp"] = ppp_to_json(ppp_parametric_ks(y, gn, a, RngStream(seed)));
        } else {
            throw ConfigError("np_prior must be 'dirichlet' or 'normal'");
        }
    } else {
        throw ConfigError("unknown model: " + model);
    }

    rec["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              t0)
            .count();
    emit(rec, opt.out_path);
    return 0;
}

int cmd_cppp(const Options& opt) {
    json cfg = load_config(opt);
    std::string model = require<std::string>(cfg, "model");
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    const long a = cfg.at("a").get<long>();
    const long b = cfg.at("b").get<long>();
    const int workers = cfg.at("workers").get<int>();
    const bool with_samples = value_or<bool>(cfg, "emit_null_samples", false);
    json rec = record_skeleton("cppp", cfg);
    auto t0 = std::chrono::steady_clock::now();

    if (model == "normal-normal") {
        std::optional<double> ybar;
        NormalNormalConfig nn = parse_normal_normal(cfg, &ybar);
        if (!ybar) throw ConfigError("normal-normal cppp needs ybar_obs or a data file");
        rec["path"] = "closed-form";
        rec["ppp"] = {{"value", ppp_closed_form(nn, *ybar)}};
        rec["cppp"] = {{"value", cppp_closed_form(nn, *ybar)}};
        rec["cppp_star"] = {{"value", cppp_star_closed_form(nn, *ybar)}};
    } else if (model == "mixture") {
        MixturePrior mix = parse_mixture(cfg);
        double ybar = require<double>(cfg, "ybar_obs");
        MixtureNormalModel m(mix, require<long>(cfg, "n"), require<double>(cfg, "sigma"));
        NormalNormalPivot disc{{m.n, m.sigma, 0.0, 1.0}};
        rec["path"] = "engine";
        rec["cppp"] =
            cppp_to_json(calibrate_cppp(m, disc, ybar, a, b, RngStream(seed), workers),
                         with_samples);
        rec["ppp"] = {{"value", mixture_ppp(mix, m.n, m.sigma, ybar)}, {"path", "closed-form"}};
    } else if (model == "gn-scalar") {
        GnScalarSetup s = parse_gn_scalar(cfg);
        std::string disc = value_or<std::string>(cfg, "discrepancy", "pivot");
        const long n = static_cast<long>(s.y.size());
        if (s.vague)
            throw ImproperPriorError(
                "cppp needs prior-predictive sampling; the vague c0 = 0 limit has no samplable "
                "prior");
        if (disc == "pivot") {
            // one-dimensional proportional case: closed-form null distribution
            double ybar = 0.0, q0 = 0.0;
            for (double v : s.y) ybar += v;
            ybar /= n;
            for (double v : s.y) q0 += (v - ybar) * (v - ybar);
            GnIntegration integ;
            integ.draws = std::max<long>(a, 100000);
            integ.seed = seed;
            double ppp_obs = ppp_gn_scalar(s.prior, ybar, q0, n, integ);
            auto null = null_ppp_regression_proportional(1, s.prior.c0, n, b, RngStream(seed, 1));
            long below = 0;
            for (double u : null)
                if (u <= ppp_obs) ++below;
            rec["path"] = "closed-form";
            rec["ppp"] = {{"value", ppp_obs}};
            rec["cppp"] = {{"value", static_cast<double>(below) / b}, {"outer_b", b}};
            if (with_samples) rec["cppp"]["null_ppp_samples"] = null;
        } else if (disc == "order-gap") {
            GnScalarDataModel m(s.prior, n);
            OrderGapDiscrepancy gap;
            gap.upper = value_or<int>(cfg, "order_upper", 61);
            gap.lower = value_or<int>(cfg, "order_lower", 6);
            rec["path"] = "engine";
            rec["cppp"] = cppp_to_json(calibrate_cppp(m, gap, s.y, a, b, RngStream(seed), workers),
                                       with_samples);
        } else {
            throw ConfigError("gn-scalar discrepancy must be 'pivot' or 'order-gap'");
        }
    } else if (model == "gn-regression") {
        GnRegressionSetup s = parse_gn_regression(cfg);
        RegressionData data{s.x, s.y};
        if (s.proportional) {
            GnIntegration integ;
            integ.draws = std::max<long>(a, 100000);
            integ.seed = seed;
            rec["path"] = "closed-form";
            rec["ppp"] = {{"value", ppp_regression_proportional(s.prior, data, integ)}};
            rec["cppp"] = {
                {"value", cppp_regression_proportional(s.prior, data, b, RngStream(seed), integ)},
                {"outer_b", b}};
        } else {
            GnRegressionModel m(s.prior, s.x);
            RegressionPivot disc(s.x);
            rec["path"] = "engine";
            rec["cppp"] = cppp_to_json(calibrate_cppp(m, disc, s.y, a, b, RngStream(seed), workers),
                                       with_samples);
        }
    } else if (model == "dipper") {
        RecaptureData data = load_recapture(cfg);
        CjsVariant variant = parse_variant(require<std::string>(cfg, "variant"));
        rec["path"] = "engine";
        rec["cppp"] = cppp_to_json(
            cppp_dipper(data, variant, a, b, parse_chain(cfg), RngStream(seed), workers),
            with_samples);
    } else if (model == "nonparametric") {
        throw ConfigError("use the compare-np command for the nonparametric model");
    } else {
        throw ConfigError("unknown model: " + model);
    }

    rec["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              t0)
            .count();
    emit(rec, opt.out_path);
    return 0;
}

int cmd_null_dist(const Options& opt) {
    json cfg = load_config(opt);
    std::string model = require<std::string>(cfg, "model");
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    const long b = cfg.at("b").get<long>();

    std::vector<double> sample;
    if (model == "normal-normal") {
        std::optional<double> ybar;
        NormalNormalConfig nn = parse_normal_normal(cfg, &ybar);
        sample = null_ppp_sample(nn, b, RngStream(seed));
    } else if (model == "gn-regression") {
        GnRegressionSetup s = parse_gn_regression(cfg);
        if (!s.proportional)
            throw ConfigError("closed-form null distribution needs omega0 = 'proportional'");
        sample = null_ppp_regression_proportional(static_cast<int>(s.x.cols()), s.prior.c0,
                                                  s.x.rows(), b, RngStream(seed));
    } else if (model == "gn-scalar") {
        GnScalarSetup s = parse_gn_scalar(cfg);
        if (s.vague) throw ImproperPriorError("null distribution needs a proper prior");
        sample = null_ppp_regression_proportional(1, s.prior.c0, static_cast<long>(s.y.size()), b,
                                                  RngStream(seed));
    } else if (model == "dipper") {
        RecaptureData data = load_recapture(cfg);
        CjsVariant variant = parse_variant(require<std::string>(cfg, "variant"));
        const long a = cfg.at("a").get<long>();
        auto est = cppp_dipper(data, variant, a, b, parse_chain(cfg), RngStream(seed),
                               cfg.at("workers").get<int>());
        sample = est.ppp_null_samples;
    } else {
        throw ConfigError("null-dist supports normal-normal, gn-scalar, gn-regression, dipper");
    }
    emit_csv(sample, "null_ppp", config_hash(cfg), opt.out_path);
    return 0;
}

int cmd_curves(const Options& opt) {
    json cfg = load_config(opt);
    std::optional<double> ybar;
    NormalNormalConfig nn = parse_normal_normal(cfg, &ybar);
    double lo = value_or<double>(cfg, "ybar_min", nn.theta0 - 3.0);
    double hi = value_or<double>(cfg, "ybar_max", nn.theta0 + 3.0);
    int points = value_or<int>(cfg, "points", 121);
    auto curves = ppp_curves(nn, lo, hi, points);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!opt.out_path.empty()) {
        file.open(opt.out_path);
        if (!file) throw DataError("cannot write output file: " + opt.out_path);
        out = &file;
    }
    *out << "# config_hash=" << config_hash(cfg) << "\n";
    *out << "ybar,ppp,cppp,cppp_star\n";
    out->precision(12);
    for (const auto& pt : curves)
        *out << pt.ybar << "," << pt.ppp << "," << pt.cppp << "," << pt.cppp_star << "\n";
    return 0;
}

int cmd_elicit(const Options& opt) {
    json cfg = load_config(opt);
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();

    CorrelationBelief belief;
    long n = 0;
    double kappa_hat = value_or<double>(cfg, "kappa_hat", 0.0);
    if (cfg.contains("Sn")) {
        auto rows = require<std::vector<std::vector<double>>>(cfg, "Sn");
        const int p = static_cast<int>(rows.size());
        belief.Sn.resize(p, p);
        for (int i = 0; i < p; ++i) {
            if (static_cast<int>(rows[i].size()) != p) throw ConfigError("Sn must be square");
            for (int j = 0; j < p; ++j) belief.Sn(i, j) = rows[i][j];
        }
        n = require<long>(cfg, "n");
    } else if (cfg.contains("data")) {
        Table table = read_table_csv(cfg.at("data").get<std::string>());
        int y_col = -1;
        if (cfg.contains("response")) {
            y_col = table.column_index(cfg.at("response").get<std::string>());
            if (y_col < 0) throw DataError("response column not found");
        }
        std::vector<int> cov_cols;
        for (int c = 0; c < table.values.cols(); ++c)
            if (c != y_col) cov_cols.push_back(c);
        n = table.values.rows();
        Eigen::MatrixXd x(n, static_cast<Eigen::Index>(cov_cols.size()));
        for (std::size_t k = 0; k < cov_cols.size(); ++k) x.col(k) = table.values.col(cov_cols[k]);
        Eigen::MatrixXd centred = center_covariates(x).first;
        belief.Sn = centred.transpose() * centred / static_cast<double>(n);
        if (y_col >= 0 && kappa_hat == 0.0) {
            Eigen::VectorXd y = table.values.col(y_col);
            kappa_hat = std::sqrt((y.array() - y.mean()).square().sum() / (n - 1));
        }
    } else {
        throw ConfigError("elicit needs either an 'Sn' matrix or a covariate data file");
    }
    if (kappa_hat <= 0.0) throw ConfigError("elicit needs kappa_hat (or a response column)");

    auto rho0 = require<std::vector<double>>(cfg, "rho0");
    belief.rho0 = Eigen::Map<Eigen::VectorXd>(rho0.data(), static_cast<Eigen::Index>(rho0.size()));
    belief.sigma0_guess = require<double>(cfg, "sigma0_guess");
    belief.tau = require<double>(cfg, "tau");
    belief.validate();

    long mc_size = value_or<long>(cfg, "mc_size", 100000);
    long rho_draws = value_or<long>(cfg, "rho_draws", 1000000);
    double intercept = value_or<double>(cfg, "intercept_guess", 0.0);

    ElicitedPrior prior = elicit_prior(belief, kappa_hat, n, intercept, mc_size, RngStream(seed));
    auto summary = sample_rho_prior(prior.z0, belief, rho_draws, RngStream(seed, 1));
    GnParams assembled = assemble_prior(prior, belief);

    json rec = record_skeleton("elicit", cfg);
    Eigen::VectorXd target = belief.target();
    rec["target"] = std::vector<double>(target.begin(), target.end());
    rec["z0"] = std::vector<double>(prior.z0.begin(), prior.z0.end());
    rec["b_bar"] = std::vector<double>(prior.b_bar.begin(), prior.b_bar.end());
    rec["a0"] = prior.a0;
    rec["b0"] = prior.b0;
    rec["c0"] = 1.0 / (belief.tau * belief.tau);
    rec["intercept_mean"] = intercept;
    json corr = json::array();
    for (int i = 0; i < summary.correlation.rows(); ++i)
        for (int j = i + 1; j < summary.correlation.cols(); ++j)
            corr.push_back(summary.correlation(i, j));
    rec["rho_prior"] = {{"mean", std::vector<double>(summary.mean.begin(), summary.mean.end())},
                        {"sd", std::vector<double>(summary.sd.begin(), summary.sd.end())},
                        {"pairwise_correlations", corr}};
    json gn;
    gn["a0"] = assembled.a;
    gn["b0"] = assembled.b;
    gn["c0"] = assembled.c0;
    gn["beta0"] = std::vector<double>(assembled.mu0.begin(), assembled.mu0.end());
    std::vector<std::vector<double>> omega(assembled.omega0.rows());
    for (int i = 0; i < assembled.omega0.rows(); ++i)
        omega[i] =
            std::vector<double>(assembled.omega0.row(i).begin(), assembled.omega0.row(i).end());
    gn["omega0"] = omega;
    rec["gn_prior"] = gn;
    emit(rec, opt.out_path);
    return 0;
}

int cmd_dipper(const Options& opt, const std::string& variant_flag) {
    json cfg = load_config(opt);
    cfg["model"] = "dipper";
    if (!variant_flag.empty()) cfg["variant"] = variant_flag;
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    const long a = cfg.at("a").get<long>();
    const long b = opt.outer_b > 0 ? opt.outer_b : value_or<long>(cfg, "b", 500);
    const int workers = cfg.at("workers").get<int>();

    RecaptureData data = load_recapture(cfg);
    CjsVariant variant = parse_variant(require<std::string>(cfg, "variant"));
    ChainConfig chain = parse_chain(cfg);

    json rec = record_skeleton("dipper", cfg);
    auto t0 = std::chrono::steady_clock::now();
    rec["path"] = "engine";
    rec["ppp"] = ppp_to_json(ppp_dipper(data, variant, a, chain, RngStream(seed)));
    if (b > 0) {
        auto est = cppp_dipper(data, variant, a, b, chain, RngStream(seed, 1), workers);
        rec["cppp"] = cppp_to_json(est, value_or<bool>(cfg, "emit_null_samples", false));
    }
    rec["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              t0)
            .count();
    emit(rec, opt.out_path);
    return 0;
}

int cmd_compare_np(const Options& opt) {
    json cfg = load_config(opt);
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    const long a = cfg.at("a").get<long>();
    const long b = cfg.at("b").get<long>();
    const int workers = cfg.at("workers").get<int>();

    auto y = read_single_column_csv(require<std::string>(cfg, "data"));
    double mean = 0.0, var = 0.0;
    for (double v : y) mean += v;
    mean /= y.size();
    for (double v : y) var += (v - mean) * (v - mean);
    var /= (y.size() - 1);

    json dp_cfg = value_or<json>(cfg, "dp", json::object());
    DpPrior dp;
    dp.a = value_or<double>(dp_cfg, "a", 1.0);
    dp.f0_mean = value_or<double>(dp_cfg, "f0_mean", mean);
    dp.f0_sd = value_or<double>(dp_cfg, "f0_sd", std::sqrt(var));

    json p = require<json>(cfg, "prior");
    GnParams gn = GnParams::scalar(require<double>(p, "a0"), require<double>(p, "b0"),
                                   require<double>(p, "mu0"), require<double>(p, "c0"));

    json rec = record_skeleton("compare-np", cfg);
    auto t0 = std::chrono::steady_clock::now();
    NpComparison cmp = compare_np(y, dp, gn, a, b, RngStream(seed), workers);
    rec["dirichlet"] = cppp_to_json(cmp.dirichlet, false);
    rec["parametric"] = cppp_to_json(cmp.parametric, false);
    rec["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              t0)
            .count();
    emit(rec, opt.out_path);
    return 0;
}

int cmd_newcomb_table(const Options& opt) {
    json cfg = load_config(opt);
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    const long a = cfg.at("a").get<long>();
    const long b = cfg.at("b").get<long>();
    const int workers = cfg.at("workers").get<int>();

    auto y = read_single_column_csv(require<std::string>(cfg, "data"));
    const long n = static_cast<long>(y.size());
    OrderGapDiscrepancy gap;
    gap.upper = value_or<int>(cfg, "order_upper", 61);
    gap.lower = value_or<int>(cfg, "order_lower", 6);

    std::vector<double> cs = value_or<std::vector<double>>(
        cfg, "prior_sample_sizes", {0.5, 1, 2, 3, 4, 5, 10, 20, 30, 40, 50, 100});

    json rec = record_skeleton("newcomb-table", cfg);
    auto t0 = std::chrono::steady_clock::now();
    {
        auto vague = GnScalarDataModel::vague(n);
        long vague_a = value_or<long>(cfg, "vague_a", 1000000);
        rec["vague_ppp"] = ppp_to_json(estimate_ppp(vague, gap, y, vague_a, RngStream(seed)));
    }
    json table = json::array();
    for (std::size_t i = 0; i < cs.size(); ++i) {
        double c = cs[i];
        GnParams prior = GnParams::scalar(c / 25.0, c, 30.0, c);
        GnScalarDataModel model(prior, n);
        auto est = calibrate_cppp(model, gap, y, a, b,
                                  RngStream(seed, 100 + static_cast<std::uint64_t>(i)), workers);
        table.push_back({{"c", c}, {"ppp", est.ppp_obs.value}, {"cppp", est.value}});
        std::fprintf(stderr, "c=%-6g ppp=%.3f cppp=%.3f\n", c, est.ppp_obs.value, est.value);
    }
    rec["table"] = table;
    rec["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              t0)
            .count();
    emit(rec, opt.out_path);
    return 0;
}

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config_path, "JSON config file");
    cmd->add_option("--data", opt.data_path, "data file (overrides the config)");
    cmd->add_option("--seed", opt.seed, "RNG seed (overrides the config)");
    cmd->add_option("--workers", opt.workers, "worker threads, 0 = all cores");
    cmd->add_option("--inner-a", opt.inner_a, "inner Monte Carlo replicates A");
    cmd->add_option("--outer-b", opt.outer_b, "outer replicates B");
    cmd->add_option("--out", opt.out_path, "output file (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kVersion) + " -- posterior predictive p-values and calibration"};
    app.require_subcommand(1);

    Options opt;
    std::string dipper_variant;

    auto* ppp = app.add_subcommand("ppp", "posterior predictive p-value of observed data");
    add_common(ppp, opt);
    auto* cppp = app.add_subcommand("cppp", "calibrated ppp (double simulation or closed form)");
    add_common(cppp, opt);
    auto* nulldist = app.add_subcommand("null-dist", "sample the null distribution of ppp(Y)");
    add_common(nulldist, opt);
    auto* curves = app.add_subcommand("curves", "ppp/cppp/cppp* curves over a ybar grid (CSV)");
    add_common(curves, opt);
    auto* elicit = app.add_subcommand("elicit", "build a GN prior from correlation beliefs");
    add_common(elicit, opt);
    auto* dipper = app.add_subcommand("dipper", "dipper recapture analysis (bundled table 2)");
    add_common(dipper, opt);
    dipper->add_option("--variant", dipper_variant, "tt (time-varying) or cc (constant)");
    auto* compare = app.add_subcommand("compare-np", "Dirichlet-process vs normal prior cppp");
    add_common(compare, opt);
    auto* newcomb = app.add_subcommand("newcomb-table", "prior-sensitivity table (user data)");
    add_common(newcomb, opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ppp->parsed()) return cmd_ppp(opt);
        if (cppp->parsed()) return cmd_cppp(opt);
        if (nulldist->parsed()) return cmd_null_dist(opt);
        if (curves->parsed()) return cmd_curves(opt);
        if (elicit->parsed()) return cmd_elicit(opt);
        if (dipper->parsed()) return cmd_dipper(opt, dipper_variant);
        if (compare->parsed()) return cmd_compare_np(opt);
        if (newcomb->parsed()) return cmd_newcomb_table(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const ImproperPriorError& e) {
        std::cerr << "estimation error: " << e.what() << "\n";
        return 4;
    } catch (const EstimationError& e) {
        std::cerr << "estimation error: " << e.what() << " [" << e.diagnostics << "]\n";
        return 4;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
