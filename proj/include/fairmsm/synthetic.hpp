#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fairmsm/rate_model.hpp"
#include "fairmsm/types.hpp"

namespace fairmsm {

/// One covariate generator. Continuous kinds may shift their location by
/// sensitive level, which is how proxy structure is induced; categorical
/// kinds may vary their level probabilities by sensitive level.
struct CovariateGenerator {
  enum class Kind { normal, lognormal, categorical, wealth, income };
  std::string name;
  Kind kind = Kind::normal;
  double mean = 0.0;
  double sd = 1.0;
  std::map<std::string, double> level_shift;  // sensitive level -> location shift
  std::vector<std::string> levels;            // categorical only
  std::map<std::string, std::vector<double>> level_probs;  // sensitive level -> probs
  std::vector<double> base_probs;                          // fallback when no per-level probs
};

/// Generating truth for one transition: log-linear intensity over the
/// encoded covariate columns, age, and optional direct sensitive effects.
struct TrueRates {
  double intercept = 0.0;
  double age_slope = 0.0;
  std::map<std::string, double> coef;              // encoded column -> coefficient
  std::map<std::string, double> sensitive_effect;  // level -> direct ln-rate shift
};

enum class CensoringMode { exact, biennial_midpoint };

struct ScenarioSpec {
  int n = 0;
  std::vector<std::string> sensitive_levels;
  std::vector<double> sensitive_probs;
  std::vector<CovariateGenerator> covariates;
  std::vector<TrueRates> rates;  // one per transition
  double issue_age_min = 50.0;
  double issue_age_max = 80.0;
  double horizon_age = 110.0;
  std::string start_state = "Healthy";
  CensoringMode censoring = CensoringMode::exact;
  std::uint64_t seed = 1;

  /// Encoded covariate column names implied by the generators.
  std::vector<std::string> encoded_columns() const;
  void validate(const TransitionSpec& spec) const;
};

/// Log-linear generating model over the scenario's encoded columns; reads
/// the sensitive attribute whenever any transition has a direct effect.
class TrueRateModel : public RateModel {
 public:
  TrueRateModel(const ScenarioSpec& scenario);

  int num_transitions() const override { return static_cast<int>(rates_.size()); }
  bool uses_sensitive() const override { return uses_sensitive_; }
  double log_rate(int m, const Covariates& z, double age,
                  const std::string& sensitive) const override;

 private:
  std::vector<TrueRates> rates_;
  bool uses_sensitive_ = false;
};

/// Draws the policy sample; deterministic per individual given the seed.
std::vector<Policy> generate_population(const ScenarioSpec& scenario);

/// Simulates one trajectory per policy from the generating model, healthy at
/// issue. Biennial mode observes states every two years, imputes transition
/// times at interval midpoints, and keeps death times exact.
std::vector<Trajectory> generate_study(const ScenarioSpec& scenario, const TransitionSpec& spec,
                                       const std::vector<Policy>& policies);

}  // namespace fairmsm
