#include "fairmsm/types.hpp"

#include <cmath>
#include <set>
#include <unordered_set>

namespace fairmsm {

void validate_transition_spec(const std::vector<std::string>& states,
                              const std::vector<Transition>& transitions) {
  require(!states.empty(), errc::invalid_argument, "transition spec has no states");
  std::unordered_set<std::string> seen;
  for (const auto& s : states)
    require(seen.insert(s).second, errc::invalid_argument, "duplicate state label: " + s);

  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& t : transitions) {
    require(seen.count(t.from) > 0, errc::unknown_state,
            "transition references unknown state: " + t.from);
    require(seen.count(t.to) > 0, errc::unknown_state,
            "transition references unknown state: " + t.to);
    require(t.from != t.to, errc::self_loop, "self-loop transition on state: " + t.from);
    require(pairs.insert({t.from, t.to}).second, errc::duplicate_transition,
            "duplicate transition: " + t.from + " -> " + t.to);
  }
}

TransitionSpec::TransitionSpec(std::vector<std::string> states, std::vector<Transition> transitions)
    : states_(std::move(states)), transitions_(std::move(transitions)) {
  validate_transition_spec(states_, transitions_);
  for (std::size_t i = 0; i < states_.size(); ++i)
    state_index_[states_[i]] = static_cast<int>(i);
  live_.resize(states_.size());
  for (std::size_t m = 0; m < transitions_.size(); ++m) {
    from_idx_.push_back(state_index_.at(transitions_[m].from));
    to_idx_.push_back(state_index_.at(transitions_[m].to));
    live_[from_idx_.back()].push_back(static_cast<int>(m));
  }
}

int TransitionSpec::state_index(const std::string& label) const {
  auto it = state_index_.find(label);
  require(it != state_index_.end(), errc::unknown_state, "unknown state: " + label);
  return it->second;
}

int TransitionSpec::find_transition(int from, int to) const {
  for (int m : live_[from])
    if (to_idx_[m] == to) return m;
  return -1;
}

TransitionSpec TransitionSpec::ltci_three_state() {
  return TransitionSpec({"Healthy", "Disabled", "Dead"},
                        {{"Healthy", "Disabled"},
                         {"Disabled", "Healthy"},
                         {"Healthy", "Dead"},
                         {"Disabled", "Dead"}});
}

TransitionSpec TransitionSpec::two_state() {
  return TransitionSpec({"Alive", "Dead"}, {{"Alive", "Dead"}});
}

void validate_trajectory(const Trajectory& traj, const TransitionSpec& spec) {
  require(!traj.sojourns.empty(), errc::invalid_trajectory,
          "trajectory " + traj.individual_id + " has no sojourns");
  for (std::size_t i = 0; i < traj.sojourns.size(); ++i) {
    const auto& s = traj.sojourns[i];
    int si = spec.state_index(s.state);
    require(!spec.is_absorbing(si), errc::invalid_trajectory,
            "sojourn in absorbing state " + s.state + " (id " + traj.individual_id + ")");
    require(s.start_age < s.end_age, errc::invalid_trajectory,
            "empty or reversed sojourn in trajectory " + traj.individual_id);
    if (i + 1 < traj.sojourns.size()) {
      const auto& next = traj.sojourns[i + 1];
      require(std::abs(s.end_age - next.start_age) < 1e-12, errc::invalid_trajectory,
              "non-contiguous sojourns in trajectory " + traj.individual_id);
      require(s.state != next.state, errc::invalid_trajectory,
              "consecutive sojourns share a state in trajectory " + traj.individual_id);
      require(spec.find_transition(si, spec.state_index(next.state)) >= 0,
              errc::illegal_transition,
              "illegal transition " + s.state + " -> " + next.state + " (id " +
                  traj.individual_id + ")");
    }
  }
  if (traj.terminal_state != kCensored) {
    int last = spec.state_index(traj.sojourns.back().state);
    int term = spec.state_index(traj.terminal_state);
    require(spec.find_transition(last, term) >= 0, errc::illegal_transition,
            "illegal terminal transition " + traj.sojourns.back().state + " -> " +
                traj.terminal_state + " (id " + traj.individual_id + ")");
  }
}

void validate_policy(const Policy& p) {
  require(p.issue_age >= 0.0, errc::invalid_argument,
          "negative issue age for policy " + p.individual_id);
  require(static_cast<int>(p.z.names.size()) == p.z.values.size(), errc::invalid_argument,
          "covariate name/value size mismatch for policy " + p.individual_id);
  std::unordered_set<std::string> seen;
  for (const auto& n : p.z.names)
    require(seen.insert(n).second, errc::invalid_argument,
            "duplicate covariate name " + n + " for policy " + p.individual_id);
}

const Policy& ExposureDataset::policy_of(const ExposureRow& r) const {
  auto it = policy_index_.find(r.individual_id);
  require(it != policy_index_.end(), errc::missing_individual,
          "row references unknown individual: " + r.individual_id);
  return policies[it->second];
}

void ExposureDataset::rebuild_index() {
  policy_index_.clear();
  for (std::size_t i = 0; i < policies.size(); ++i)
    policy_index_[policies[i].individual_id] = static_cast<int>(i);
}

void validate_product(const ProductSpec& product, const TransitionSpec& spec) {
  for (const auto& s : product.premium_states) spec.state_index(s);
  for (const auto& s : product.benefit_states) spec.state_index(s);
  spec.state_index(product.initial_state);
  require(product.terminal_age > 0, errc::invalid_argument, "terminal_age must be positive");
  require(product.discount > 0.0 && product.discount <= 1.0, errc::invalid_argument,
          "discount factor must lie in (0, 1]");
}

}  // namespace fairmsm
