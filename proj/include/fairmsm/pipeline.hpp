#pragma once

#include <vector>

#include "fairmsm/types.hpp"

namespace fairmsm {

/// One sojourn-transition pair before age splitting (Table A.2 layout).
struct SojournRow {
  std::string individual_id;
  int transition = 0;
  double start_age = 0.0;
  double end_age = 0.0;
  int event = 0;

  double exposure() const { return end_age - start_age; }
};

/// Ages within this tolerance of an integer are treated as exact integer
/// ages, so decimal inputs do not produce zero-length slivers.
inline constexpr double kAgeBoundaryTol = 1e-9;

/// Integer age credited with an event occurring at exact time `t` within a
/// sojourn: the age interval just completed.
int event_age(double t);

/// Expands each sojourn into one row per transition live from its state,
/// marking the transition actually taken (if any) on its row.
std::vector<SojournRow> expand_exposure(const Trajectory& traj, const TransitionSpec& spec);

/// Splits rows at integer-age boundaries; the event indicator lands on the
/// final interval. Idempotent on already-split rows.
std::vector<ExposureRow> split_by_age(const std::vector<SojournRow>& rows);

struct MergeResult {
  ExposureDataset data;
  std::size_t dropped_rows = 0;         // rows whose individual has no policy
  std::size_t dropped_individuals = 0;  // distinct ids dropped
};

/// Joins rows with policy covariates by individual id. Rows for individuals
/// absent from `policies` are dropped and counted (they correspond to
/// records excluded during covariate cleaning).
MergeResult merge_covariates(const std::vector<ExposureRow>& rows,
                             const std::vector<Policy>& policies);

/// Splits a merged dataset into one dataset per transition type.
std::vector<ExposureDataset> partition_by_transition(const ExposureDataset& data,
                                                     int num_transitions);

}  // namespace fairmsm
