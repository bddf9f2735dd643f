#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "fairmsm/glm.hpp"
#include "fairmsm/types.hpp"

namespace fairmsm {

/// A fitted set of per-transition intensity predictors: covariates and age
/// (and optionally the sensitive attribute) to ln(lambda).
class RateModel {
 public:
  virtual ~RateModel() = default;

  virtual int num_transitions() const = 0;
  virtual bool uses_sensitive() const = 0;

  /// ln(lambda) for transition m. Models that do not use the sensitive
  /// attribute ignore `sensitive` entirely.
  virtual double log_rate(int m, const Covariates& z, double age,
                          const std::string& sensitive) const = 0;

  double rate(int m, const Covariates& z, double age, const std::string& sensitive = {}) const {
    double lr = log_rate(m, z, age, sensitive);
    double lambda = std::exp(lr);
    require(std::isfinite(lambda), errc::non_finite, "non-finite predicted rate");
    return lambda;
  }
};

/// Log-linear (GLM) rate model: one Poisson fit per transition sharing a
/// covariate schema; each transition keeps its own fitted column layout.
class GlmRateModel : public RateModel {
 public:
  GlmRateModel(std::vector<FitResult> fits, std::vector<DesignLayout> layouts);

  int num_transitions() const override { return static_cast<int>(fits_.size()); }
  bool uses_sensitive() const override { return use_sensitive_; }
  double log_rate(int m, const Covariates& z, double age,
                  const std::string& sensitive) const override;

  const FitResult& fit(int m) const { return fits_.at(m); }
  const DesignLayout& layout(int m) const { return layouts_.at(m); }

 private:
  std::vector<FitResult> fits_;
  std::vector<DesignLayout> layouts_;
  bool use_sensitive_ = false;
};

/// Fits one Poisson regression per transition dataset.
GlmRateModel fit_rate_model(const std::vector<ExposureDataset>& per_transition,
                            const DesignOptions& opt);

}  // namespace fairmsm
