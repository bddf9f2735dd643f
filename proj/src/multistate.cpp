#include "fairmsm/multistate.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "fairmsm/rng.hpp"

namespace fairmsm {

MatrixXd expm(const MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  require(A.cols() == n, errc::invalid_argument, "expm requires a square matrix");
  double norm = A.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
  require(norm <= 1e6, errc::numerical_overflow, "expm: matrix norm exceeds 1e6");

  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  MatrixXd As = A / std::pow(2.0, squarings);

  // [6/6] Pade: c_k = (2m-k)! m! / ((2m)! k! (m-k)!), m = 6
  constexpr int m = 6;
  double c[m + 1];
  c[0] = 1.0;
  for (int k = 1; k <= m; ++k) c[k] = c[k - 1] * (m - k + 1.0) / (k * (2.0 * m - k + 1.0));

  MatrixXd U = MatrixXd::Zero(n, n);  // odd terms (times As once below)
  MatrixXd V = MatrixXd::Zero(n, n);  // even terms
  MatrixXd As2 = As * As;
  MatrixXd power = MatrixXd::Identity(n, n);
  for (int k = 0; 2 * k <= m; ++k) {
    V += c[2 * k] * power;
    if (2 * k + 1 <= m) U += c[2 * k + 1] * power;
    power = power * As2;
  }
  U = As * U;
  // N = V + U, D = V - U, exp(As) ~= D^{-1} N
  MatrixXd P = (V - U).partialPivLu().solve(V + U);
  for (int s = 0; s < squarings; ++s) P = P * P;
  return P;
}

GeneratorMatrix build_generator(const RateModel& model, const TransitionSpec& spec,
                                const Covariates& z, int age, const std::string& sensitive) {
  const int n = spec.num_states();
  GeneratorMatrix gen;
  gen.age = age;
  gen.Q = MatrixXd::Zero(n, n);
  for (int m = 0; m < spec.num_transitions(); ++m) {
    double lambda = model.rate(m, z, static_cast<double>(age), sensitive);
    gen.Q(spec.from_index(m), spec.to_index(m)) = lambda;
  }
  for (int i = 0; i < n; ++i) gen.Q(i, i) = -(gen.Q.row(i).sum() - gen.Q(i, i));
  return gen;
}

ProbabilityMatrix one_year_probs(const GeneratorMatrix& gen) {
  const int n = static_cast<int>(gen.Q.rows());
  ProbabilityMatrix pm;
  pm.from_age = gen.age;
  pm.to_age = gen.age + 1;
  pm.P = expm(gen.Q);
  for (int i = 0; i < n; ++i) {
    if (gen.Q.row(i).cwiseAbs().maxCoeff() == 0.0) {
      pm.P.row(i).setZero();
      pm.P(i, i) = 1.0;  // absorbing rows stay exact
      continue;
    }
    double sum = pm.P.row(i).sum();
    if (std::abs(sum - 1.0) > 1e-12) pm.P.row(i) /= sum;
  }
  return pm;
}

ProbabilityMatrix multi_year_probs(const RateModel& model, const TransitionSpec& spec,
                                   const Covariates& z, int from_age, int to_age,
                                   const std::string& sensitive) {
  require(from_age <= to_age, errc::invalid_argument, "from_age must not exceed to_age");
  const int n = spec.num_states();
  ProbabilityMatrix pm;
  pm.from_age = from_age;
  pm.to_age = to_age;
  pm.P = MatrixXd::Identity(n, n);
  for (int age = from_age; age < to_age; ++age)
    pm.P = pm.P * one_year_probs(build_generator(model, spec, z, age, sensitive)).P;
  return pm;
}

MatrixXd occupancy_probabilities(const RateModel& model, const TransitionSpec& spec,
                                 const Covariates& z, int from_age, int horizon,
                                 const std::string& initial_state, const std::string& sensitive) {
  const int n = spec.num_states();
  MatrixXd occ = MatrixXd::Zero(horizon + 1, n);
  Eigen::RowVectorXd pi = Eigen::RowVectorXd::Zero(n);
  pi[spec.state_index(initial_state)] = 1.0;
  occ.row(0) = pi;
  for (int t = 0; t < horizon; ++t) {
    pi = pi * one_year_probs(build_generator(model, spec, z, from_age + t, sensitive)).P;
    occ.row(t + 1) = pi;
  }
  return occ;
}

Trajectory simulate_trajectory(const RateModel& model, const TransitionSpec& spec,
                               const Covariates& z, const std::string& sensitive,
                               const std::string& start_state, double start_age, double horizon,
                               std::uint64_t seed, const std::string& individual_id) {
  Trajectory traj;
  traj.individual_id = individual_id;
  Rng rng(seed);

  int state = spec.state_index(start_state);
  double t = start_age;
  const double end = start_age + horizon;
  double sojourn_start = t;

  while (t < end && !spec.is_absorbing(state)) {
    int age = static_cast<int>(std::floor(t + 1e-12));
    double boundary = std::min(static_cast<double>(age + 1), end);

    // one exponential clock per live transition; first to fire wins
    double best_time = std::numeric_limits<double>::infinity();
    int best_m = -1;
    for (int m : spec.live_transitions(state)) {
      double lambda = model.rate(m, z, static_cast<double>(age), sensitive);
      double wait = rng.exponential(lambda);
      if (wait < best_time) {
        best_time = wait;
        best_m = m;
      }
    }

    if (best_m >= 0 && t + best_time < boundary) {
      t += best_time;
      traj.sojourns.push_back({spec.state_label(state), sojourn_start, t});
      state = spec.to_index(best_m);
      sojourn_start = t;
    } else {
      t = boundary;
    }
  }

  if (spec.is_absorbing(state)) {
    traj.terminal_state = spec.state_label(state);
  } else {
    traj.sojourns.push_back({spec.state_label(state), sojourn_start, end});
    traj.terminal_state = kCensored;
  }
  return traj;
}

}  // namespace fairmsm
