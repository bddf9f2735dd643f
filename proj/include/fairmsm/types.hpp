#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairmsm/errors.hpp"

namespace fairmsm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Sentinel terminal state for trajectories that end without absorption.
inline constexpr const char* kCensored = "censored";

struct Transition {
  std::string from;
  std::string to;
};

/// The state graph: states, allowed transitions (indexed m = 0..M-1 in
/// memory, printed 1-based on every external surface), and the derived
/// absorbing set. Construction validates; an invalid spec cannot exist.
class TransitionSpec {
 public:
  TransitionSpec(std::vector<std::string> states, std::vector<Transition> transitions);

  int num_states() const { return static_cast<int>(states_.size()); }
  int num_transitions() const { return static_cast<int>(transitions_.size()); }

  const std::vector<std::string>& states() const { return states_; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  int state_index(const std::string& label) const;  // throws unknown_state
  const std::string& state_label(int i) const { return states_.at(i); }

  int from_index(int m) const { return from_idx_.at(m); }
  int to_index(int m) const { return to_idx_.at(m); }

  bool is_absorbing(int state) const { return live_[state].empty(); }
  bool is_absorbing(const std::string& label) const { return is_absorbing(state_index(label)); }

  /// Transitions leaving `state`, in transition-index order.
  const std::vector<int>& live_transitions(int state) const { return live_.at(state); }

  /// Index of (from, to) or -1 when the move is not in the spec.
  int find_transition(int from, int to) const;

  /// Healthy/Disabled/Dead with recovery; transitions ordered
  /// H->F, F->H, H->D, F->D.
  static TransitionSpec ltci_three_state();
  static TransitionSpec two_state();  // Alive -> Dead

 private:
  std::vector<std::string> states_;
  std::vector<Transition> transitions_;
  std::vector<int> from_idx_, to_idx_;
  std::vector<std::vector<int>> live_;
  std::unordered_map<std::string, int> state_index_;
};

/// Validates the raw pieces of a TransitionSpec without constructing one.
void validate_transition_spec(const std::vector<std::string>& states,
                              const std::vector<Transition>& transitions);

struct Sojourn {
  std::string state;
  double start_age = 0.0;
  double end_age = 0.0;
};

/// One individual's observed path: contiguous sojourns in transient states
/// plus the terminal state entered at the last end_age (or kCensored).
struct Trajectory {
  std::string individual_id;
  std::vector<Sojourn> sojourns;
  std::string terminal_state = kCensored;
};

void validate_trajectory(const Trajectory& traj, const TransitionSpec& spec);

/// Named real-valued covariate vector (categoricals already one-hot encoded;
/// indicator columns are named "source=level").
struct Covariates {
  std::vector<std::string> names;
  VectorXd values;

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return static_cast<int>(i);
    return -1;
  }
  double get(const std::string& name) const {
    int i = index_of(name);
    require(i >= 0, errc::unknown_covariate, "unknown covariate: " + name);
    return values[i];
  }
};

inline bool is_indicator_column(const std::string& name) {
  return name.find('=') != std::string::npos;
}

struct Policy {
  std::string individual_id;
  Covariates z;
  double issue_age = 0.0;
  std::string sensitive;
};

void validate_policy(const Policy& p);

/// One Poisson observation: Table A.3 schema plus the individual id.
/// Covariates live on the owning dataset's policy table, not per row.
struct ExposureRow {
  std::string individual_id;
  int transition = 0;  // 0-based in memory
  int age = 0;         // age last birthday
  int event = 0;       // 0 or 1
  double exposure = 0.0;
};

/// Exposure rows joined with their policies. All rows reference a policy in
/// `policies`; all policies share the covariate schema in `covariate_names`.
struct ExposureDataset {
  std::vector<std::string> covariate_names;
  std::vector<Policy> policies;
  std::vector<ExposureRow> rows;

  const Policy& policy_of(const ExposureRow& r) const;
  void rebuild_index();

 private:
  std::unordered_map<std::string, int> policy_index_;
};

/// Product cash-flow description for EPV pricing.
struct ProductSpec {
  std::vector<std::string> premium_states;   // empty: single-premium product
  std::vector<std::string> benefit_states;
  std::function<double(int)> benefit_schedule = [](int) { return 1.0; };  // B_t
  std::optional<double> death_benefit;
  double discount = 1.0 / 1.03;  // v
  int terminal_age = 110;
  std::string initial_state;
};

void validate_product(const ProductSpec& product, const TransitionSpec& spec);

}  // namespace fairmsm
