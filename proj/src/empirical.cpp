#include "ppc/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ppc/special.hpp"

namespace ppc {

EmpiricalCdf::EmpiricalCdf(std::vector<double> data) : sorted_(std::move(data)) {
    if (sorted_.empty()) throw std::invalid_argument("EmpiricalCdf: empty sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double t) const {
    auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
    return static_cast<double>(it - sorted_.begin()) / sorted_.size();
}

double EmpiricalCdf::left_limit(double t) const {
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), t);
    return static_cast<double>(it - sorted_.begin()) / sorted_.size();
}

double ks_distance(const EmpiricalCdf& fn, const std::function<double(double)>& cdf) {
    const auto& x = fn.sorted();
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double f = cdf(x[i]);
        d = std::max(d, std::fabs((i + 1) / n - f));
        d = std::max(d, std::fabs(i / n - f));
    }
    return d;
}

double ks_distance_step(const EmpiricalCdf& fn, const std::vector<double>& atoms,
                        const std::vector<double>& cum_weights) {
    double d = 0.0;
    // both functions are right-continuous steps; the sup is attained at a
    // jump of one of them, approached from either side
    auto step_cdf = [&](double t) {
        auto it = std::upper_bound(atoms.begin(), atoms.end(), t);
        return it == atoms.begin() ? 0.0 : cum_weights[it - atoms.begin() - 1];
    };
    auto step_left = [&](double t) {
        auto it = std::lower_bound(atoms.begin(), atoms.end(), t);
        return it == atoms.begin() ? 0.0 : cum_weights[it - atoms.begin() - 1];
    };
    for (double t : fn.sorted()) {
        d = std::max(d, std::fabs(fn(t) - step_cdf(t)));
        d = std::max(d, std::fabs(fn.left_limit(t) - step_left(t)));
    }
    for (double t : atoms) {
        d = std::max(d, std::fabs(fn(t) - step_cdf(t)));
        d = std::max(d, std::fabs(fn.left_limit(t) - step_left(t)));
    }
    return d;
}

double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= t) ++i;
        while (j < b.size() && b[j] <= t) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / a.size() -
                                  static_cast<double>(j) / b.size()));
    }
    return d;
}

double ks_two_sample_pvalue(double statistic, std::size_t n_a, std::size_t n_b) {
    double ne = static_cast<double>(n_a) * n_b / (n_a + n_b);
    return kolmogorov_tail(std::sqrt(ne) * statistic);
}

double ks_one_sample_pvalue(const EmpiricalCdf& fn, const std::function<double(double)>& cdf) {
    double d = ks_distance(fn, cdf);
    return kolmogorov_tail(std::sqrt(static_cast<double>(fn.size())) * d);
}

double decile_uniformity_statistic(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("decile_uniformity_statistic: empty sample");
    int counts[10] = {0};
    for (double v : values) {
        int bin = static_cast<int>(v * 10.0);
        bin = std::min(9, std::max(0, bin));
        ++counts[bin];
    }
    double expected = values.size() / 10.0;
    double stat = 0.0;
    for (int c : counts) stat += (c - expected) * (c - expected) / expected;
    return stat;
}

}  // namespace ppc
