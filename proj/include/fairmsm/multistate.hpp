#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "fairmsm/rate_model.hpp"
#include "fairmsm/types.hpp"

namespace fairmsm {

/// Intensity matrix for one integer age: off-diagonals are transition rates,
/// diagonals balance rows to zero.
struct GeneratorMatrix {
  MatrixXd Q;
  int age = 0;
};

struct ProbabilityMatrix {
  MatrixXd P;
  int from_age = 0;
  int to_age = 0;
};

/// Matrix exponential by scaling and squaring with a [6/6] Pade approximant.
MatrixXd expm(const MatrixXd& A);

GeneratorMatrix build_generator(const RateModel& model, const TransitionSpec& spec,
                                const Covariates& z, int age, const std::string& sensitive = {});

/// exp(Q * 1yr); rows of Q that are exactly zero map to unit rows, other rows
/// are renormalized when their sums drift beyond 1e-12.
ProbabilityMatrix one_year_probs(const GeneratorMatrix& gen);

/// Chapman-Kolmogorov product of one-year matrices from from_age to to_age;
/// equal ages yield the identity.
ProbabilityMatrix multi_year_probs(const RateModel& model, const TransitionSpec& spec,
                                   const Covariates& z, int from_age, int to_age,
                                   const std::string& sensitive = {});

/// State-occupancy probabilities at integer durations 0..horizon starting in
/// `initial_state` at `from_age`; row t is the distribution at from_age + t.
MatrixXd occupancy_probabilities(const RateModel& model, const TransitionSpec& spec,
                                 const Covariates& z, int from_age, int horizon,
                                 const std::string& initial_state,
                                 const std::string& sensitive = {});

/// Competing-risks simulation with one exponential clock per live transition,
/// rates held constant within each integer age. Deterministic given the seed.
Trajectory simulate_trajectory(const RateModel& model, const TransitionSpec& spec,
                               const Covariates& z, const std::string& sensitive,
                               const std::string& start_state, double start_age, double horizon,
                               std::uint64_t seed, const std::string& individual_id = {});

}  // namespace fairmsm
