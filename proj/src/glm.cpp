#include "fairmsm/glm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace fairmsm {

namespace {

std::string age_column(int level) { return "age=" + std::to_string(level); }

}  // namespace

std::vector<std::string> DesignLayout::column_names() const {
  std::vector<std::string> out{"(intercept)"};
  for (const auto& c : covariate_names) out.push_back(c);
  if (age_form == AgeForm::linear) {
    out.push_back("age");
  } else {
    for (std::size_t i = 1; i < age_levels.size(); ++i) out.push_back(age_column(age_levels[i]));
  }
  if (use_sensitive)
    for (std::size_t i = 1; i < sensitive_levels.size(); ++i)
      out.push_back("sensitive=" + sensitive_levels[i]);
  return out;
}

std::vector<std::string> DesignLayout::column_sources() const {
  std::vector<std::string> out{"(intercept)"};
  for (const auto& c : covariate_names) out.push_back(c);
  if (age_form == AgeForm::linear) {
    out.push_back("age");
  } else {
    for (std::size_t i = 1; i < age_levels.size(); ++i) out.push_back("age");
  }
  if (use_sensitive)
    for (std::size_t i = 1; i < sensitive_levels.size(); ++i) out.push_back("sensitive");
  return out;
}

int DesignLayout::num_columns() const {
  int n = 1 + static_cast<int>(covariate_names.size());
  n += age_form == AgeForm::linear ? 1 : static_cast<int>(age_levels.size()) - 1;
  if (use_sensitive) n += static_cast<int>(sensitive_levels.size()) - 1;
  return n;
}

VectorXd DesignLayout::design_row(const Covariates& z, double age,
                                  const std::string& sensitive) const {
  VectorXd x = VectorXd::Zero(num_columns());
  int j = 0;
  x[j++] = 1.0;
  for (const auto& name : covariate_names) x[j++] = z.get(name);
  if (age_form == AgeForm::linear) {
    x[j++] = age;
  } else {
    int a = static_cast<int>(std::floor(age));
    auto it = std::find(age_levels.begin(), age_levels.end(), a);
    require(it != age_levels.end(), errc::unknown_level,
            "age " + std::to_string(a) + " was not seen at fit time");
    std::size_t idx = static_cast<std::size_t>(it - age_levels.begin());
    if (idx > 0) x[j + static_cast<int>(idx) - 1] = 1.0;
    j += static_cast<int>(age_levels.size()) - 1;
  }
  if (use_sensitive) {
    auto it = std::find(sensitive_levels.begin(), sensitive_levels.end(), sensitive);
    require(it != sensitive_levels.end(), errc::unknown_level,
            "unseen sensitive level: '" + sensitive + "'");
    std::size_t idx = static_cast<std::size_t>(it - sensitive_levels.begin());
    if (idx > 0) x[j + static_cast<int>(idx) - 1] = 1.0;
  }
  return x;
}

std::vector<std::string> sensitive_levels_of(const std::vector<Policy>& policies) {
  std::set<std::string> levels;
  for (const auto& p : policies) levels.insert(p.sensitive);
  return {levels.begin(), levels.end()};
}

DesignMatrix build_design(const ExposureDataset& data, const DesignOptions& opt) {
  DesignMatrix d;
  d.layout.covariate_names = data.covariate_names;
  d.layout.age_form = opt.age_form;
  d.layout.use_sensitive = opt.use_sensitive;
  if (opt.use_sensitive) d.layout.sensitive_levels = sensitive_levels_of(data.policies);
  if (opt.age_form == AgeForm::categorical) {
    std::set<int> ages;
    for (const auto& r : data.rows) ages.insert(r.age);
    d.layout.age_levels.assign(ages.begin(), ages.end());
  }
  d.column_names = d.layout.column_names();
  d.column_sources = d.layout.column_sources();

  const int n = static_cast<int>(data.rows.size());
  const int p = d.layout.num_columns();
  const int n_cov = static_cast<int>(data.covariate_names.size());
  d.X.resize(n, p);
  d.y.resize(n);
  d.offset.resize(n);

  std::unordered_map<std::string, int> sens_index;
  for (std::size_t i = 0; i < d.layout.sensitive_levels.size(); ++i)
    sens_index[d.layout.sensitive_levels[i]] = static_cast<int>(i);
  std::unordered_map<int, int> age_index;
  for (std::size_t i = 0; i < d.layout.age_levels.size(); ++i)
    age_index[d.layout.age_levels[i]] = static_cast<int>(i);

  for (int i = 0; i < n; ++i) {
    const auto& r = data.rows[i];
    const Policy& pol = data.policy_of(r);
    int j = 0;
    d.X(i, j++) = 1.0;
    // policies in a merged dataset share the schema, so values align by index
    for (int c = 0; c < n_cov; ++c) d.X(i, j++) = pol.z.values[c];
    if (opt.age_form == AgeForm::linear) {
      d.X(i, j++) = static_cast<double>(r.age);
    } else {
      int idx = age_index.at(r.age);
      for (std::size_t k = 1; k < d.layout.age_levels.size(); ++k)
        d.X(i, j++) = idx == static_cast<int>(k) ? 1.0 : 0.0;
    }
    if (opt.use_sensitive) {
      auto it = sens_index.find(pol.sensitive);
      require(it != sens_index.end(), errc::unknown_level,
              "unseen sensitive level: '" + pol.sensitive + "'");
      for (std::size_t k = 1; k < d.layout.sensitive_levels.size(); ++k)
        d.X(i, j++) = it->second == static_cast<int>(k) ? 1.0 : 0.0;
    }
    require(r.exposure > 0.0, errc::invalid_argument, "row with non-positive exposure");
    d.y[i] = static_cast<double>(r.event);
    d.offset[i] = std::log(r.exposure);
  }
  return d;
}

double poisson_log_likelihood(const DesignMatrix& d, const VectorXd& beta) {
  VectorXd eta = d.X * beta + d.offset;
  double ll = 0.0;
  for (int i = 0; i < eta.size(); ++i)
    ll += d.y[i] * eta[i] - std::exp(eta[i]) - std::lgamma(d.y[i] + 1.0);
  return ll;
}

namespace {

double poisson_deviance(const VectorXd& y, const VectorXd& mu) {
  double dev = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    if (y[i] > 0.0) dev += y[i] * std::log(y[i] / mu[i]);
    dev -= y[i] - mu[i];
  }
  return 2.0 * dev;
}

VectorXd mean_from(const MatrixXd& X, const VectorXd& beta, const VectorXd& offset) {
  VectorXd eta = (X * beta + offset).cwiseMin(300.0);
  return eta.array().exp();
}

void check_rank(const MatrixXd& X, const std::vector<std::string>& names) {
  require(X.rows() >= X.cols(), errc::collinear, "design has fewer rows than columns");
  Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  if (rank < X.cols()) {
    std::string dep;
    const auto& perm = qr.colsPermutation().indices();
    for (int k = rank; k < X.cols(); ++k) {
      if (!dep.empty()) dep += ", ";
      dep += names[perm[k]];
    }
    fail(errc::collinear, "rank-deficient design; dependent columns: " + dep);
  }
}

}  // namespace

FitResult fit_poisson(const DesignMatrix& d) {
  const int n = static_cast<int>(d.X.rows());
  const int p = static_cast<int>(d.X.cols());
  require(n > 0, errc::invalid_argument, "empty design");
  check_rank(d.X, d.column_names);

  // working start: mu = y + 0.5
  VectorXd mu = d.y.array() + 0.5;
  VectorXd eta = mu.array().log() - d.offset.array();
  VectorXd beta = VectorXd::Zero(p);
  double dev = poisson_deviance(d.y, mean_from(d.X, beta, d.offset));
  bool converged = false;
  int iter = 0;
  int small_dev_change = 0;  // consecutive iterations under the deviance tolerance

  for (; iter < 100; ++iter) {
    VectorXd w = mu.cwiseSqrt();
    VectorXd z = eta + (d.y - mu).cwiseQuotient(mu);
    MatrixXd Xw = d.X.array().colwise() * w.array();
    VectorXd zw = z.cwiseProduct(w);
    VectorXd beta_new = Xw.colPivHouseholderQr().solve(zw);

    VectorXd mu_new = mean_from(d.X, beta_new, d.offset);
    double dev_new = poisson_deviance(d.y, mu_new);
    // halve on real deviance increases only, not roundoff-level noise
    const double dev_tol = 1e-11 * (std::abs(dev) + 1.0);
    for (int h = 0; h < 20 && (!std::isfinite(dev_new) || dev_new > dev + dev_tol); ++h) {
      beta_new = 0.5 * (beta_new + beta);
      mu_new = mean_from(d.X, beta_new, d.offset);
      dev_new = poisson_deviance(d.y, mu_new);
    }

    beta = beta_new;
    mu = mu_new;
    eta = d.X * beta;
    double grad_inf = (d.X.transpose() * (d.y - mu)).cwiseAbs().maxCoeff();
    double rel_change = std::abs(dev_new - dev) / (std::abs(dev_new) + 0.1);
    dev = dev_new;
    small_dev_change = rel_change < 1e-10 ? small_dev_change + 1 : 0;
    // the deviance criterion alone gets one confirming Newton step, which
    // drives the score to machine precision on regular problems
    if (grad_inf < 1e-8 || small_dev_change >= 2) {
      converged = true;
      ++iter;
      break;
    }
  }
  require(converged, errc::diverged, "IRLS failed to converge within 100 iterations");

  FitResult res;
  res.coefficients = beta;
  res.column_names = d.column_names;
  res.column_sources = d.column_sources;
  res.log_likelihood = poisson_log_likelihood(d, beta);
  res.deviance = dev;
  res.iterations = iter;
  res.converged = converged;
  MatrixXd info = d.X.transpose() * mu.asDiagonal() * d.X;
  res.covariance = info.ldlt().solve(MatrixXd::Identity(p, p));
  res.std_errors = res.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  return res;
}

double likelihood_contribution(const DesignMatrix& d, const FitResult& full_fit,
                               const std::string& source) {
  std::vector<int> keep;
  bool found = false;
  for (std::size_t j = 0; j < d.column_sources.size(); ++j) {
    if (d.column_sources[j] == source) {
      found = true;
    } else {
      keep.push_back(static_cast<int>(j));
    }
  }
  require(found, errc::unknown_covariate, "no design columns derive from: " + source);

  DesignMatrix reduced;
  reduced.X.resize(d.X.rows(), static_cast<int>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    reduced.X.col(static_cast<int>(k)) = d.X.col(keep[k]);
    reduced.column_names.push_back(d.column_names[keep[k]]);
    reduced.column_sources.push_back(d.column_sources[keep[k]]);
  }
  reduced.y = d.y;
  reduced.offset = d.offset;
  FitResult r = fit_poisson(reduced);
  // nested models: true difference is nonnegative, clamp solver noise
  return std::max(0.0, full_fit.log_likelihood - r.log_likelihood);
}

FinancialCovariates transform_financial(double wealth, double income) {
  FinancialCovariates f;
  if (income < 0.0) {
    income = 0.0;
    f.income_clamped = true;
  }
  f.income_log = std::log1p(income);
  double sign = wealth > 0.0 ? 1.0 : (wealth < 0.0 ? -1.0 : 0.0);
  f.wealth_log = std::log1p(std::abs(wealth));
  f.wealth_sign = sign;
  f.wealth_sign_log = sign * f.wealth_log;
  return f;
}

}  // namespace fairmsm
