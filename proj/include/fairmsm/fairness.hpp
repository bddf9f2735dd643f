#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fairmsm/pricing.hpp"
#include "fairmsm/rate_model.hpp"
#include "fairmsm/types.hpp"

namespace fairmsm {

struct SensitiveDistribution {
  std::vector<std::string> levels;
  VectorXd weights;  // nonnegative, sums to 1
};

/// Empirical sensitive-attribute distribution over policies (one term per
/// insured, never per exposure row).
SensitiveDistribution policy_level_distribution(const std::vector<Policy>& policies);

/// Discrimination-free rate: the fitted sensitive-aware rate averaged over
/// `dist`. The distribution's level set must equal the model's fit-time set.
double discrimination_free_rate(const RateModel& s_aware, int m, const Covariates& z, double age,
                                const SensitiveDistribution& dist);

/// Rate model scoring the discrimination-free mixture; ignores any sensitive
/// label supplied at query time.
class MixtureRateModel : public RateModel {
 public:
  MixtureRateModel(std::shared_ptr<const RateModel> base, SensitiveDistribution dist);

  int num_transitions() const override { return base_->num_transitions(); }
  bool uses_sensitive() const override { return false; }
  double log_rate(int m, const Covariates& z, double age,
                  const std::string& sensitive) const override;

 private:
  std::shared_ptr<const RateModel> base_;
  SensitiveDistribution dist_;
};

/// Empirical quantile with linear interpolation between order statistics at
/// probability points (i - 0.5) / n; `sorted` must be ascending.
double empirical_quantile(const std::vector<double>& sorted, double p);

/// Two-sample Kolmogorov-Smirnov distance; inputs need not be sorted.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// Per-coordinate optimal-transport preprocessing: within each sensitive
/// group, the named continuous covariates are mapped through the group's
/// empirical quantiles onto the pooled marginal. Other covariates and issue
/// ages pass through unchanged.
std::vector<Policy> ot_preprocess(const std::vector<Policy>& policies,
                                  const std::vector<std::string>& covariate_names);

struct ParityReport {
  double gap = 0.0;  // max pairwise |mean difference|
  struct Pair {
    std::string level_a, level_b;
    double mean_difference = 0.0;
    double ks = 0.0;
  };
  std::vector<Pair> pairs;
  std::map<std::string, double> group_mean;
  std::map<std::string, int> group_size;
  double max_ks = 0.0;
};

/// Demographic-parity summary over quotes computed at a common issue age.
ParityReport demographic_parity_gap(const std::vector<PremiumQuote>& quotes, int common_age);

}  // namespace fairmsm
