#pragma once

#include <optional>
#include <string>

#include "fairmsm/multistate.hpp"
#include "fairmsm/types.hpp"

namespace fairmsm {

enum class PricingMode { best_estimate, blind, fairness_adjusted };

std::string to_string(PricingMode mode);
PricingMode pricing_mode_from_string(const std::string& s);

struct PremiumQuote {
  std::string individual_id;
  double issue_age = 0.0;
  std::string sensitive;
  PricingMode mode = PricingMode::best_estimate;
  double epv_benefits = 0.0;
  double epv_premium_annuity = 0.0;  // per unit of level premium
  double lump_sum = 0.0;             // single premium covering all benefits
  std::optional<double> level_premium;
};

/// EPV of a unit level premium paid annually in advance while in a premium
/// state: sum over t of v^t * Pr(J_{x+t} in P). Issue ages are floored to
/// age last birthday.
double epv_premium_annuity(const RateModel& model, const TransitionSpec& spec, const Covariates& z,
                           double issue_age, const ProductSpec& product,
                           const std::string& sensitive = {});

/// EPV of state-contingent benefits B_t paid while in a benefit state.
double epv_benefits(const RateModel& model, const TransitionSpec& spec, const Covariates& z,
                    double issue_age, const ProductSpec& product,
                    const std::string& sensitive = {});

/// EPV of a death benefit paid at the end of the year of death.
double epv_death_benefit(const RateModel& model, const TransitionSpec& spec, const Covariates& z,
                         double issue_age, const ProductSpec& product,
                         const std::string& sensitive = {});

/// Lump-sum premium of the stylized LTCI product: $1 per year disabled,
/// healthy at issue, terminal age 110, v = 1.03^-1 by default.
double lump_sum_ltci(const RateModel& model, const TransitionSpec& spec, const Covariates& z,
                     double issue_age, const std::string& sensitive = {},
                     double discount = 1.0 / 1.03);

/// Prices one policy under one mode; throws mode_model_mismatch when the
/// model's sensitive-attribute use does not match the mode.
PremiumQuote quote(const Policy& policy, const RateModel& model, PricingMode mode,
                   const ProductSpec& product, const TransitionSpec& spec);

}  // namespace fairmsm
