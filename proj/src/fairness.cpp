#include "fairmsm/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace fairmsm {

SensitiveDistribution policy_level_distribution(const std::vector<Policy>& policies) {
  require(!policies.empty(), errc::empty_sample, "no policies to build a distribution from");
  std::map<std::string, int> counts;
  for (const auto& p : policies) ++counts[p.sensitive];
  SensitiveDistribution dist;
  dist.weights.resize(static_cast<int>(counts.size()));
  int i = 0;
  for (const auto& [level, count] : counts) {
    dist.levels.push_back(level);
    dist.weights[i++] = static_cast<double>(count) / static_cast<double>(policies.size());
  }
  return dist;
}

namespace {

void check_level_sets(const RateModel& model, const SensitiveDistribution& dist) {
  const auto* glm = dynamic_cast<const GlmRateModel*>(&model);
  if (!glm) return;  // models without an inspectable level set fail per query instead
  std::set<std::string> fit_levels(glm->layout(0).sensitive_levels.begin(),
                                   glm->layout(0).sensitive_levels.end());
  std::set<std::string> dist_levels(dist.levels.begin(), dist.levels.end());
  require(fit_levels == dist_levels, errc::level_mismatch,
          "distribution levels differ from the model's fit-time levels");
}

}  // namespace

double discrimination_free_rate(const RateModel& s_aware, int m, const Covariates& z, double age,
                                const SensitiveDistribution& dist) {
  require(s_aware.uses_sensitive(), errc::mode_model_mismatch,
          "discrimination-free rates require a sensitive-aware model");
  check_level_sets(s_aware, dist);
  double lambda = 0.0;
  for (std::size_t i = 0; i < dist.levels.size(); ++i)
    lambda += dist.weights[static_cast<int>(i)] * s_aware.rate(m, z, age, dist.levels[i]);
  return lambda;
}

MixtureRateModel::MixtureRateModel(std::shared_ptr<const RateModel> base,
                                   SensitiveDistribution dist)
    : base_(std::move(base)), dist_(std::move(dist)) {
  require(base_ != nullptr, errc::invalid_argument, "null base model");
  require(base_->uses_sensitive(), errc::mode_model_mismatch,
          "mixture model requires a sensitive-aware base model");
  require(dist_.weights.size() == static_cast<int>(dist_.levels.size()), errc::invalid_argument,
          "distribution levels/weights mismatch");
  double sum = dist_.weights.sum();
  require(std::abs(sum - 1.0) <= 1e-12 && dist_.weights.minCoeff() >= 0.0, errc::invalid_argument,
          "distribution weights must be nonnegative and sum to 1");
}

double MixtureRateModel::log_rate(int m, const Covariates& z, double age,
                                  const std::string& /*sensitive*/) const {
  return std::log(discrimination_free_rate(*base_, m, z, age, dist_));
}

double empirical_quantile(const std::vector<double>& sorted, double p) {
  require(!sorted.empty(), errc::empty_sample, "quantile of an empty sample");
  const int n = static_cast<int>(sorted.size());
  double h = p * n + 0.5;  // position on the 1-based order-statistic scale
  if (h <= 1.0) return sorted.front();
  if (h >= n) return sorted.back();
  int lo = static_cast<int>(std::floor(h));
  double frac = h - lo;
  return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), errc::empty_sample, "KS distance of an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    double v = i < a.size() && (j == b.size() || a[i] <= b[j]) ? a[i] : b[j];
    while (i < a.size() && a[i] == v) ++i;  // step past ties jointly
    while (j < b.size() && b[j] == v) ++j;
    double fa = static_cast<double>(i) / a.size();
    double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

std::vector<Policy> ot_preprocess(const std::vector<Policy>& policies,
                                  const std::vector<std::string>& covariate_names) {
  require(!policies.empty(), errc::empty_sample, "no policies to transform");
  std::vector<Policy> out = policies;

  for (const auto& name : covariate_names) {
    require(!is_indicator_column(name), errc::non_continuous,
            "covariate '" + name + "' is categorical (indicator column); optimal transport "
            "is defined only for continuous covariates");
    int col = policies.front().z.index_of(name);
    require(col >= 0, errc::unknown_covariate, "unknown covariate: " + name);

    // group values by sensitive level, remembering positions
    std::map<std::string, std::vector<std::pair<double, int>>> groups;
    std::vector<double> pooled;
    pooled.reserve(policies.size());
    for (std::size_t k = 0; k < policies.size(); ++k) {
      double v = policies[k].z.values[col];
      groups[policies[k].sensitive].push_back({v, static_cast<int>(k)});
      pooled.push_back(v);
    }
    std::sort(pooled.begin(), pooled.end());

    for (auto& [level, members] : groups) {
      std::sort(members.begin(), members.end());
      const std::size_t n_g = members.size();
      // mid-ranks with ties averaged, so equal inputs map to equal outputs
      std::size_t i = 0;
      while (i < n_g) {
        std::size_t j = i;
        while (j + 1 < n_g && members[j + 1].first == members[i].first) ++j;
        double rank = 0.5 * static_cast<double>(i + j) + 1.0;  // average 1-based rank
        double u = (rank - 0.5) / static_cast<double>(n_g);
        double mapped = empirical_quantile(pooled, u);
        for (std::size_t k = i; k <= j; ++k) out[members[k].second].z.values[col] = mapped;
        i = j + 1;
      }
    }
  }
  return out;
}

ParityReport demographic_parity_gap(const std::vector<PremiumQuote>& quotes, int common_age) {
  std::map<std::string, std::vector<double>> by_level;
  for (const auto& q : quotes) {
    require(static_cast<int>(std::floor(q.issue_age)) == common_age, errc::invalid_argument,
            "parity gap requires all quotes at the common issue age");
    by_level[q.sensitive].push_back(q.lump_sum);
  }
  require(by_level.size() >= 2, errc::insufficient_groups,
          "parity gap needs at least two sensitive groups");

  ParityReport rep;
  for (const auto& [level, values] : by_level) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    rep.group_mean[level] = mean;
    rep.group_size[level] = static_cast<int>(values.size());
  }
  for (auto a = by_level.begin(); a != by_level.end(); ++a) {
    for (auto b = std::next(a); b != by_level.end(); ++b) {
      ParityReport::Pair pr;
      pr.level_a = a->first;
      pr.level_b = b->first;
      pr.mean_difference = std::abs(rep.group_mean[a->first] - rep.group_mean[b->first]);
      pr.ks = ks_distance(a->second, b->second);
      rep.gap = std::max(rep.gap, pr.mean_difference);
      rep.max_ks = std::max(rep.max_ks, pr.ks);
      rep.pairs.push_back(pr);
    }
  }
  return rep;
}

}  // namespace fairmsm
