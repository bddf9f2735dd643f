#pragma once

// Test-only oracles, independent of the library's implementation paths:
// a dense Newton-Raphson Poisson fitter on the explicit likelihood, a
// truncated Taylor-series matrix exponential, and the continuous-time
// multi-state log-likelihood evaluated directly on trajectories.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "fairmsm/glm.hpp"
#include "fairmsm/pipeline.hpp"
#include "fairmsm/types.hpp"

namespace oracles {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Full Newton steps on the explicit Poisson log-likelihood, no step control.
inline VectorXd newton_poisson(const MatrixXd& X, const VectorXd& y, const VectorXd& offset,
                               double tol = 1e-12, int max_iter = 200) {
  VectorXd beta = VectorXd::Zero(X.cols());
  beta[0] = std::log((y.sum() + 0.5) / offset.array().exp().sum());
  for (int it = 0; it < max_iter; ++it) {
    VectorXd mu = (X * beta + offset).array().exp();
    VectorXd grad = X.transpose() * (y - mu);
    if (grad.cwiseAbs().maxCoeff() < tol) break;
    MatrixXd hess = X.transpose() * mu.asDiagonal() * X;
    beta += hess.ldlt().solve(grad);
  }
  return beta;
}

inline MatrixXd taylor_expm(const MatrixXd& A, int terms = 40) {
  MatrixXd sum = MatrixXd::Identity(A.rows(), A.cols());
  MatrixXd term = sum;
  for (int k = 1; k <= terms; ++k) {
    term = term * A / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

// Continuous-time multi-state log-likelihood for exactly observed
// trajectories under piecewise-constant (per integer age) rates:
// sum over sojourns and live transitions of
//   event * ln(rate at event age) - integral of the rate over the sojourn.
inline double multistate_log_likelihood(
    const std::vector<fairmsm::Trajectory>& trajectories, const fairmsm::TransitionSpec& spec,
    const std::function<double(int m, int age)>& rate) {
  double ll = 0.0;
  for (const auto& traj : trajectories) {
    for (std::size_t i = 0; i < traj.sojourns.size(); ++i) {
      const auto& s = traj.sojourns[i];
      int from = spec.state_index(s.state);
      int taken = -1;
      if (i + 1 < traj.sojourns.size()) {
        taken = spec.find_transition(from, spec.state_index(traj.sojourns[i + 1].state));
      } else if (traj.terminal_state != fairmsm::kCensored) {
        taken = spec.find_transition(from, spec.state_index(traj.terminal_state));
      }
      for (int m : spec.live_transitions(from)) {
        // integral of the step-function rate over [start_age, end_age)
        double t = s.start_age;
        while (t < s.end_age - 1e-12) {
          double boundary = std::floor(t + 1e-12) + 1.0;
          double stop = std::min(boundary, s.end_age);
          ll -= rate(m, static_cast<int>(std::floor(t + 1e-12))) * (stop - t);
          t = stop;
        }
        if (m == taken) ll += std::log(rate(m, fairmsm::event_age(s.end_age)));
      }
    }
  }
  return ll;
}

}  // namespace oracles
