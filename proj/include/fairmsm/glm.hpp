#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "fairmsm/types.hpp"

namespace fairmsm {

enum class AgeForm { linear, categorical };

/// Column layout of a fitted design: which covariates entered, how age is
/// coded, and the sensitive-attribute coding. Stored with each fitted model
/// so scoring reuses the fit-time encoding exactly.
struct DesignLayout {
  std::vector<std::string> covariate_names;
  AgeForm age_form = AgeForm::linear;
  std::vector<int> age_levels;  // categorical age only; first level is the reference
  bool use_sensitive = false;
  std::vector<std::string> sensitive_levels;  // first (lexicographic) is the reference

  std::vector<std::string> column_names() const;
  std::vector<std::string> column_sources() const;
  int num_columns() const;

  /// Assembles one design row for a generic query; throws unknown_covariate
  /// for missing covariates and unknown_level for an unseen sensitive level
  /// or (categorical form) an unseen age.
  VectorXd design_row(const Covariates& z, double age, const std::string& sensitive) const;
};

struct DesignOptions {
  AgeForm age_form = AgeForm::linear;
  bool use_sensitive = false;
};

struct DesignMatrix {
  MatrixXd X;
  VectorXd y;       // event counts
  VectorXd offset;  // ln(exposure)
  std::vector<std::string> column_names;
  std::vector<std::string> column_sources;
  DesignLayout layout;
};

/// Builds the Poisson design for one transition's rows. Sensitive levels and
/// (for the categorical form) age levels are derived from the data.
DesignMatrix build_design(const ExposureDataset& data, const DesignOptions& opt);

struct FitResult {
  VectorXd coefficients;
  std::vector<std::string> column_names;
  std::vector<std::string> column_sources;
  double log_likelihood = 0.0;
  double deviance = 0.0;
  int iterations = 0;
  bool converged = false;
  MatrixXd covariance;  // inverse observed information
  VectorXd std_errors;
};

/// IRLS with step halving. Converged when the relative deviance change drops
/// below 1e-10 or the score max-norm below 1e-8; throws diverged after 100
/// iterations, collinear on rank-deficient designs.
FitResult fit_poisson(const DesignMatrix& design);

/// Additional log-likelihood gained by the columns derived from `source`
/// over the model without them; refits the reduced model.
double likelihood_contribution(const DesignMatrix& design, const FitResult& full_fit,
                               const std::string& source);

/// Poisson log-likelihood of `coefficients` on `design` (includes -ln y!).
double poisson_log_likelihood(const DesignMatrix& design, const VectorXd& coefficients);

struct FinancialCovariates {
  double income_log = 0.0;
  double wealth_log = 0.0;
  double wealth_sign = 0.0;
  double wealth_sign_log = 0.0;
  bool income_clamped = false;  // negative income was clamped to zero
};

/// ln(1+Y) income and the three-covariate signed-log wealth coding.
FinancialCovariates transform_financial(double wealth, double income);

/// Sorted unique sensitive labels over a policy set.
std::vector<std::string> sensitive_levels_of(const std::vector<Policy>& policies);

}  // namespace fairmsm
