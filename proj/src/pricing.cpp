#include "fairmsm/pricing.hpp"

#include <cmath>

namespace fairmsm {

std::string to_string(PricingMode mode) {
  switch (mode) {
    case PricingMode::best_estimate: return "best_estimate";
    case PricingMode::blind: return "blind";
    case PricingMode::fairness_adjusted: return "fairness_adjusted";
  }
  return "?";
}

PricingMode pricing_mode_from_string(const std::string& s) {
  if (s == "best_estimate") return PricingMode::best_estimate;
  if (s == "blind") return PricingMode::blind;
  if (s == "fairness_adjusted") return PricingMode::fairness_adjusted;
  fail(errc::config_error, "unknown pricing mode: " + s);
}

namespace {

struct Curve {
  MatrixXd occ;  // (horizon+1) x states
  int issue = 0;
  int horizon = 0;
};

Curve occupancy_curve(const RateModel& model, const TransitionSpec& spec, const Covariates& z,
                      double issue_age, const ProductSpec& product, const std::string& sensitive) {
  validate_product(product, spec);
  Curve c;
  c.issue = static_cast<int>(std::floor(issue_age));  // age last birthday at issue
  require(c.issue >= 0, errc::invalid_argument, "negative issue age");
  c.horizon = std::max(0, product.terminal_age - c.issue);
  c.occ = occupancy_probabilities(model, spec, z, c.issue, c.horizon, product.initial_state,
                                  sensitive);
  return c;
}

double in_set_probability(const Curve& c, const TransitionSpec& spec,
                          const std::vector<std::string>& states, int t) {
  double p = 0.0;
  for (const auto& s : states) p += c.occ(t, spec.state_index(s));
  return p;
}

double annuity_from_curve(const Curve& c, const TransitionSpec& spec, const ProductSpec& product) {
  if (product.premium_states.empty()) return 0.0;
  double epv = 0.0;
  double vt = 1.0;
  for (int t = 0; t <= c.horizon; ++t, vt *= product.discount)
    epv += vt * in_set_probability(c, spec, product.premium_states, t);
  return epv;
}

double benefits_from_curve(const Curve& c, const TransitionSpec& spec, const ProductSpec& product) {
  double epv = 0.0;
  double vt = 1.0;
  for (int t = 0; t <= c.horizon; ++t, vt *= product.discount)
    epv += vt * product.benefit_schedule(t) * in_set_probability(c, spec, product.benefit_states, t);
  return epv;
}

double death_benefit_from_curve(const Curve& c, const TransitionSpec& spec,
                                const ProductSpec& product) {
  int dead = spec.state_index("Dead");
  double epv = 0.0;
  double vt1 = product.discount;  // v^{t+1}
  for (int t = 0; t + 1 <= c.horizon; ++t, vt1 *= product.discount)
    epv += vt1 * (c.occ(t + 1, dead) - c.occ(t, dead));
  return epv * (*product.death_benefit);
}

}  // namespace

double epv_premium_annuity(const RateModel& model, const TransitionSpec& spec, const Covariates& z,
                           double issue_age, const ProductSpec& product,
                           const std::string& sensitive) {
  if (product.premium_states.empty()) return 0.0;
  return annuity_from_curve(occupancy_curve(model, spec, z, issue_age, product, sensitive), spec,
                            product);
}

double epv_benefits(const RateModel& model, const TransitionSpec& spec, const Covariates& z,
                    double issue_age, const ProductSpec& product, const std::string& sensitive) {
  return benefits_from_curve(occupancy_curve(model, spec, z, issue_age, product, sensitive), spec,
                             product);
}

double epv_death_benefit(const RateModel& model, const TransitionSpec& spec, const Covariates& z,
                         double issue_age, const ProductSpec& product,
                         const std::string& sensitive) {
  require(product.death_benefit.has_value(), errc::invalid_argument,
          "product carries no death benefit");
  return death_benefit_from_curve(occupancy_curve(model, spec, z, issue_age, product, sensitive),
                                  spec, product);
}

double lump_sum_ltci(const RateModel& model, const TransitionSpec& spec, const Covariates& z,
                     double issue_age, const std::string& sensitive, double discount) {
  ProductSpec product;
  product.premium_states = {};
  product.benefit_states = {"Disabled"};
  product.benefit_schedule = [](int) { return 1.0; };
  product.discount = discount;
  product.terminal_age = 110;
  product.initial_state = "Healthy";
  return epv_benefits(model, spec, z, issue_age, product, sensitive);
}

PremiumQuote quote(const Policy& policy, const RateModel& model, PricingMode mode,
                   const ProductSpec& product, const TransitionSpec& spec) {
  if (mode == PricingMode::best_estimate) {
    require(model.uses_sensitive(), errc::mode_model_mismatch,
            "best-estimate pricing requires a sensitive-aware model");
  } else {
    require(!model.uses_sensitive(), errc::mode_model_mismatch,
            to_string(mode) + " pricing requires a model that does not read the sensitive attribute");
  }

  PremiumQuote q;
  q.individual_id = policy.individual_id;
  q.issue_age = policy.issue_age;
  q.sensitive = policy.sensitive;
  q.mode = mode;
  Curve c = occupancy_curve(model, spec, policy.z, policy.issue_age, product, policy.sensitive);
  q.epv_benefits = benefits_from_curve(c, spec, product);
  double death = product.death_benefit ? death_benefit_from_curve(c, spec, product) : 0.0;
  q.lump_sum = q.epv_benefits + death;
  q.epv_premium_annuity = annuity_from_curve(c, spec, product);
  if (q.epv_premium_annuity > 0.0) q.level_premium = q.lump_sum / q.epv_premium_annuity;
  return q;
}

}  // namespace fairmsm
