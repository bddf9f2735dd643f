#include "fairmsm/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "fairmsm/glm.hpp"
#include "fairmsm/multistate.hpp"
#include "fairmsm/rng.hpp"

namespace fairmsm {

namespace {

constexpr std::uint64_t kPopulationStream = 0x706f70756c617465ULL;
constexpr std::uint64_t kTrajectoryStream = 0x7472616a6563746fULL;

std::vector<std::string> sorted_levels(const CovariateGenerator& g) {
  std::vector<std::string> levels = g.levels;
  std::sort(levels.begin(), levels.end());
  return levels;
}

}  // namespace

std::vector<std::string> ScenarioSpec::encoded_columns() const {
  std::vector<std::string> cols;
  for (const auto& g : covariates) {
    switch (g.kind) {
      case CovariateGenerator::Kind::normal:
      case CovariateGenerator::Kind::lognormal:
        cols.push_back(g.name);
        break;
      case CovariateGenerator::Kind::categorical: {
        auto levels = sorted_levels(g);
        for (std::size_t i = 1; i < levels.size(); ++i) cols.push_back(g.name + "=" + levels[i]);
        break;
      }
      case CovariateGenerator::Kind::wealth:
        cols.push_back(g.name + "_log");
        cols.push_back(g.name + "_sign");
        cols.push_back(g.name + "_signlog");
        break;
      case CovariateGenerator::Kind::income:
        cols.push_back(g.name + "_log");
        break;
    }
  }
  return cols;
}

void ScenarioSpec::validate(const TransitionSpec& spec) const {
  require(n >= 1, errc::invalid_argument, "scenario population size must be at least 1");
  require(!sensitive_levels.empty() && sensitive_levels.size() == sensitive_probs.size(),
          errc::invalid_argument, "sensitive levels/probabilities mismatch");
  double sum = 0.0;
  for (double p : sensitive_probs) {
    require(p >= 0.0, errc::invalid_argument, "negative sensitive probability");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= 1e-9, errc::invalid_argument,
          "sensitive probabilities must sum to 1");
  require(static_cast<int>(rates.size()) == spec.num_transitions(), errc::invalid_argument,
          "one rate specification per transition required");
  auto cols = encoded_columns();
  for (const auto& r : rates) {
    for (const auto& [col, coef] : r.coef)
      require(std::find(cols.begin(), cols.end(), col) != cols.end(), errc::unknown_covariate,
              "rate coefficient references unknown column: " + col);
    for (const auto& [level, effect] : r.sensitive_effect)
      require(std::find(sensitive_levels.begin(), sensitive_levels.end(), level) !=
                  sensitive_levels.end(),
              errc::unknown_level, "rate effect references unknown sensitive level: " + level);
  }
  for (const auto& g : covariates) {
    if (g.kind == CovariateGenerator::Kind::categorical) {
      require(g.levels.size() >= 2, errc::invalid_argument,
              "categorical covariate " + g.name + " needs at least two levels");
    }
    require(g.sd >= 0.0, errc::invalid_argument, "negative sd for covariate " + g.name);
  }
  require(issue_age_min >= 0.0 && issue_age_min <= issue_age_max, errc::invalid_argument,
          "invalid issue-age range");
  require(horizon_age > issue_age_max, errc::invalid_argument,
          "horizon_age must exceed the maximum issue age");
  spec.state_index(start_state);
}

TrueRateModel::TrueRateModel(const ScenarioSpec& scenario) : rates_(scenario.rates) {
  for (const auto& r : rates_)
    for (const auto& [level, effect] : r.sensitive_effect)
      if (effect != 0.0) uses_sensitive_ = true;
}

double TrueRateModel::log_rate(int m, const Covariates& z, double age,
                               const std::string& sensitive) const {
  require(m >= 0 && m < num_transitions(), errc::invalid_argument, "transition index out of range");
  const TrueRates& r = rates_[m];
  double lr = r.intercept + r.age_slope * age;
  for (const auto& [col, coef] : r.coef) lr += coef * z.get(col);
  if (uses_sensitive_) {
    auto it = r.sensitive_effect.find(sensitive);
    if (it != r.sensitive_effect.end()) lr += it->second;
  }
  return lr;
}

std::vector<Policy> generate_population(const ScenarioSpec& scenario) {
  std::vector<std::string> cols = scenario.encoded_columns();
  std::vector<Policy> out;
  out.reserve(scenario.n);

  for (int k = 0; k < scenario.n; ++k) {
    Policy p;
    p.individual_id = std::to_string(k + 1);
    Rng rng(mix_seed(mix_seed(scenario.seed, kPopulationStream), hash_id(p.individual_id)));

    p.sensitive = scenario.sensitive_levels[rng.categorical(scenario.sensitive_probs)];
    p.z.names = cols;
    p.z.values = VectorXd::Zero(static_cast<int>(cols.size()));

    int j = 0;
    for (const auto& g : scenario.covariates) {
      double shift = 0.0;
      if (auto it = g.level_shift.find(p.sensitive); it != g.level_shift.end()) shift = it->second;
      switch (g.kind) {
        case CovariateGenerator::Kind::normal:
          p.z.values[j++] = rng.normal(g.mean + shift, g.sd);
          break;
        case CovariateGenerator::Kind::lognormal:
          p.z.values[j++] = std::exp(rng.normal(g.mean + shift, g.sd));
          break;
        case CovariateGenerator::Kind::categorical: {
          auto levels = sorted_levels(g);
          std::vector<double> probs;
          if (auto it = g.level_probs.find(p.sensitive); it != g.level_probs.end()) {
            probs = it->second;
          } else if (!g.base_probs.empty()) {
            probs = g.base_probs;
          } else {
            probs.assign(levels.size(), 1.0 / static_cast<double>(levels.size()));
          }
          require(probs.size() == levels.size(), errc::invalid_argument,
                  "categorical probabilities do not match levels for " + g.name);
          int idx = rng.categorical(probs);
          for (std::size_t i = 1; i < levels.size(); ++i)
            p.z.values[j++] = idx == static_cast<int>(i) ? 1.0 : 0.0;
          break;
        }
        case CovariateGenerator::Kind::wealth: {
          // signed dollar amount whose log-magnitude is half-normal
          double u = rng.normal(g.mean + shift, g.sd);
          double wealth = (u >= 0.0 ? 1.0 : -1.0) * (std::exp(std::abs(u)) - 1.0);
          FinancialCovariates f = transform_financial(wealth, 0.0);
          p.z.values[j++] = f.wealth_log;
          p.z.values[j++] = f.wealth_sign;
          p.z.values[j++] = f.wealth_sign_log;
          break;
        }
        case CovariateGenerator::Kind::income: {
          double income = std::exp(rng.normal(g.mean + shift, g.sd));
          p.z.values[j++] = transform_financial(0.0, income).income_log;
          break;
        }
      }
    }
    p.issue_age = rng.uniform(scenario.issue_age_min, scenario.issue_age_max);
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

const std::string& state_at(const Trajectory& exact, double t) {
  for (const auto& s : exact.sojourns)
    if (t < s.end_age) return s.state;
  return exact.terminal_state;
}

// Biennial observation with midpoint imputation; death times stay exact.
// Multiple transitions inside one wave interval collapse to the net change.
Trajectory observe_biennial(const Trajectory& exact, double wave_interval) {
  const double entry = exact.sojourns.front().start_age;
  const double exact_end = exact.sojourns.back().end_age;
  const bool died = exact.terminal_state != kCensored;

  Trajectory obs;
  obs.individual_id = exact.individual_id;
  std::string cur_state = exact.sojourns.front().state;
  double cur_start = entry;

  double wave = entry;
  while (true) {
    double next_wave = wave + wave_interval;
    if (died && exact_end <= next_wave + 1e-12) {
      obs.sojourns.push_back({cur_state, cur_start, exact_end});
      obs.terminal_state = exact.terminal_state;
      return obs;
    }
    if (next_wave > exact_end + 1e-12) {
      // study ends: censor at the last completed wave
      double censor = std::max(wave, cur_start);
      if (censor <= cur_start) censor = exact_end;  // degenerate single-wave window
      obs.sojourns.push_back({cur_state, cur_start, censor});
      obs.terminal_state = kCensored;
      return obs;
    }
    const std::string& next_state = state_at(exact, next_wave);
    if (next_state != cur_state) {
      double mid = 0.5 * (wave + next_wave);
      obs.sojourns.push_back({cur_state, cur_start, mid});
      cur_state = next_state;
      cur_start = mid;
    }
    wave = next_wave;
  }
}

}  // namespace

std::vector<Trajectory> generate_study(const ScenarioSpec& scenario, const TransitionSpec& spec,
                                       const std::vector<Policy>& policies) {
  scenario.validate(spec);
  TrueRateModel model(scenario);
  std::vector<Trajectory> out;
  out.reserve(policies.size());
  for (const auto& p : policies) {
    std::uint64_t seed =
        mix_seed(mix_seed(scenario.seed, kTrajectoryStream), hash_id(p.individual_id));
    Trajectory traj = simulate_trajectory(model, spec, p.z, p.sensitive, scenario.start_state,
                                          p.issue_age, scenario.horizon_age - p.issue_age, seed,
                                          p.individual_id);
    if (scenario.censoring == CensoringMode::biennial_midpoint)
      traj = observe_biennial(traj, 2.0);
    out.push_back(std::move(traj));
  }
  return out;
}

}  // namespace fairmsm
