#pragma once

#include <functional>
#include <vector>

namespace ppc {

// Right-continuous empirical cdf of a sample.
class EmpiricalCdf {
  public:
    explicit EmpiricalCdf(std::vector<double> data);

    double operator()(double t) const;   // F_n(t) = #{x_i <= t}/n
    double left_limit(double t) const;   // F_n(t-) = #{x_i < t}/n
    const std::vector<double>& sorted() const { return sorted_; }
    std::size_t size() const { return sorted_.size(); }

  private:
    std::vector<double> sorted_;
};

// sup_t |F_n(t) - F(t)| for a continuous cdf F, evaluated exactly at the
// jump points from both sides.
double ks_distance(const EmpiricalCdf& fn, const std::function<double(double)>& cdf);

// sup over the union of jump points when the reference is itself a step
// function given by sorted atoms and cumulative weights.
double ks_distance_step(const EmpiricalCdf& fn, const std::vector<double>& atoms,
                        const std::vector<double>& cum_weights);

// Two-sample Kolmogorov-Smirnov statistic and its asymptotic p-value.
double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b);
double ks_two_sample_pvalue(double statistic, std::size_t n_a, std::size_t n_b);

// One-sample KS p-value against a fully specified continuous cdf.
double ks_one_sample_pvalue(const EmpiricalCdf& fn, const std::function<double(double)>& cdf);

// Pearson chi-square statistic of counts over equiprobable deciles of [0,1].
double decile_uniformity_statistic(const std::vector<double>& values);

}  // namespace ppc
