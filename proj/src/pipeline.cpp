#include "fairmsm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace fairmsm {

namespace {

// Snaps values within tolerance of an integer onto it.
double snap_age(double a) {
  double r = std::round(a);
  return std::abs(a - r) <= kAgeBoundaryTol ? r : a;
}

}  // namespace

int event_age(double t) {
  double s = snap_age(t);
  double f = std::floor(s);
  // an event at an exact integer age belongs to the age just completed
  return static_cast<int>(s == f ? f - 1.0 : f);
}

std::vector<SojournRow> expand_exposure(const Trajectory& traj, const TransitionSpec& spec) {
  validate_trajectory(traj, spec);
  std::vector<SojournRow> out;
  for (std::size_t i = 0; i < traj.sojourns.size(); ++i) {
    const auto& s = traj.sojourns[i];
    int from = spec.state_index(s.state);
    int taken = -1;
    if (i + 1 < traj.sojourns.size()) {
      taken = spec.find_transition(from, spec.state_index(traj.sojourns[i + 1].state));
    } else if (traj.terminal_state != kCensored) {
      taken = spec.find_transition(from, spec.state_index(traj.terminal_state));
    }
    for (int m : spec.live_transitions(from)) {
      out.push_back({traj.individual_id, m, s.start_age, s.end_age, m == taken ? 1 : 0});
    }
  }
  return out;
}

std::vector<ExposureRow> split_by_age(const std::vector<SojournRow>& rows) {
  std::vector<ExposureRow> out;
  for (const auto& r : rows) {
    double a = snap_age(r.start_age);
    double b = snap_age(r.end_age);
    require(a < b, errc::invalid_argument,
            "sojourn row with non-positive exposure (id " + r.individual_id + ")");
    double cursor = a;
    while (cursor < b) {
      double boundary = std::floor(cursor) + 1.0;
      double end = std::min(boundary, b);
      bool last = end >= b;
      out.push_back({r.individual_id, r.transition, static_cast<int>(std::floor(cursor)),
                     last ? r.event : 0, end - cursor});
      cursor = end;
    }
  }
  return out;
}

MergeResult merge_covariates(const std::vector<ExposureRow>& rows,
                             const std::vector<Policy>& policies) {
  MergeResult res;
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    validate_policy(policies[i]);
    index[policies[i].individual_id] = static_cast<int>(i);
  }
  if (!policies.empty()) res.data.covariate_names = policies.front().z.names;

  std::unordered_set<std::string> dropped_ids;
  for (const auto& r : rows) {
    auto it = index.find(r.individual_id);
    if (it == index.end()) {
      ++res.dropped_rows;
      dropped_ids.insert(r.individual_id);
      continue;
    }
    const Policy& p = policies[it->second];
    require(p.z.names == res.data.covariate_names, errc::missing_individual,
            "policy " + p.individual_id + " does not carry the shared covariate schema");
    res.data.rows.push_back(r);
  }
  res.dropped_individuals = dropped_ids.size();
  res.data.policies = policies;
  res.data.rebuild_index();
  return res;
}

std::vector<ExposureDataset> partition_by_transition(const ExposureDataset& data,
                                                     int num_transitions) {
  std::vector<ExposureDataset> out(num_transitions);
  for (auto& d : out) {
    d.covariate_names = data.covariate_names;
    d.policies = data.policies;
  }
  for (const auto& r : data.rows) {
    require(r.transition >= 0 && r.transition < num_transitions, errc::invalid_argument,
            "row transition index out of range");
    out[r.transition].rows.push_back(r);
  }
  for (auto& d : out) d.rebuild_index();
  return out;
}

}  // namespace fairmsm
