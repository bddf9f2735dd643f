#include "fairmsm/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "fairmsm/glm.hpp"
#include "fairmsm/rng.hpp"

namespace fairmsm {

namespace {

using Layer = Mlp::Layer;

MatrixXd forward_cached(const Mlp& mlp, const MatrixXd& input, std::vector<MatrixXd>* cache) {
  if (cache) {
    cache->clear();
    cache->push_back(input);
  }
  MatrixXd a = input;
  for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
    const auto& layer = mlp.layers[l];
    MatrixXd z = (layer.W * a).colwise() + layer.b;
    a = l + 1 < mlp.layers.size() ? z.array().tanh().matrix() : z;
    if (cache) cache->push_back(a);
  }
  return a;
}

// Backpropagates grad_out through the cached forward pass; accumulates
// parameter gradients into `grads` and returns the gradient w.r.t. the input.
MatrixXd backward(const Mlp& mlp, const std::vector<MatrixXd>& cache, MatrixXd grad_out,
                  std::vector<Layer>& grads) {
  for (int l = static_cast<int>(mlp.layers.size()) - 1; l >= 0; --l) {
    const auto& layer = mlp.layers[l];
    const MatrixXd& a_out = cache[l + 1];
    const MatrixXd& a_in = cache[l];
    MatrixXd dz = l + 1 < static_cast<int>(mlp.layers.size())
                      ? (grad_out.array() * (1.0 - a_out.array().square())).matrix()
                      : std::move(grad_out);
    grads[l].W.noalias() += dz * a_in.transpose();
    grads[l].b.noalias() += dz.rowwise().sum();
    grad_out = layer.W.transpose() * dz;
  }
  return grad_out;
}

std::vector<Layer> zero_like(const Mlp& mlp) {
  std::vector<Layer> g;
  for (const auto& l : mlp.layers)
    g.push_back({MatrixXd::Zero(l.W.rows(), l.W.cols()), VectorXd::Zero(l.b.size())});
  return g;
}

Mlp make_mlp(const std::vector<int>& dims, Rng& rng) {
  Mlp mlp;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    double r = std::sqrt(6.0 / (dims[l] + dims[l + 1]));
    layer.W.resize(dims[l + 1], dims[l]);
    for (int j = 0; j < layer.W.cols(); ++j)
      for (int i = 0; i < layer.W.rows(); ++i) layer.W(i, j) = rng.uniform(-r, r);
    layer.b = VectorXd::Zero(dims[l + 1]);
    mlp.layers.push_back(std::move(layer));
  }
  return mlp;
}

struct AdamState {
  std::vector<std::vector<Layer>> m, v;
  long t = 0;

  void init(const std::vector<Mlp*>& comps) {
    for (auto* c : comps) {
      m.push_back(zero_like(*c));
      v.push_back(zero_like(*c));
    }
  }

  void step(std::vector<Mlp*>& comps, const std::vector<std::vector<Layer>>& grads, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t;
    double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    for (std::size_t c = 0; c < comps.size(); ++c) {
      for (std::size_t l = 0; l < comps[c]->layers.size(); ++l) {
        auto update = [&](auto& param, auto& mm, auto& vv, const auto& g) {
          mm = b1 * mm + (1.0 - b1) * g;
          vv = b2 * vv + (1.0 - b2) * g.cwiseProduct(g);
          param -= lr * (mm / c1).cwiseQuotient(((vv / c2).cwiseSqrt().array() + eps).matrix());
        };
        update(comps[c]->layers[l].W, m[c][l].W, v[c][l].W, grads[c][l].W);
        update(comps[c]->layers[l].b, m[c][l].b, v[c][l].b, grads[c][l].b);
      }
    }
  }
};

struct TrainRow {
  int m = 0;
  int policy = 0;
  double age_std = 0.0;
  double y = 0.0;
  double log_tau = 0.0;
};

struct Prepared {
  MatrixXd Z;  // standardized covariates, one column per policy
  std::vector<int> s_class;
  std::vector<TrainRow> rows;
  int num_levels = 0;
  int num_transitions = 0;
};

Prepared prepare(const AdversarialNet& net, const std::vector<ExposureDataset>& per_transition,
                 const std::vector<Policy>& policies) {
  Prepared data;
  data.num_levels = static_cast<int>(net.sensitive_levels.size());
  data.num_transitions = static_cast<int>(per_transition.size());

  const int d = static_cast<int>(net.covariate_names.size());
  data.Z.resize(d, static_cast<int>(policies.size()));
  data.s_class.resize(policies.size());
  std::unordered_map<std::string, int> pol_index;
  std::unordered_map<std::string, int> level_index;
  for (std::size_t i = 0; i < net.sensitive_levels.size(); ++i)
    level_index[net.sensitive_levels[i]] = static_cast<int>(i);
  for (std::size_t k = 0; k < policies.size(); ++k) {
    pol_index[policies[k].individual_id] = static_cast<int>(k);
    for (int c = 0; c < d; ++c)
      data.Z(c, static_cast<int>(k)) =
          (policies[k].z.get(net.covariate_names[c]) - net.input_center[c]) / net.input_scale[c];
    auto it = level_index.find(policies[k].sensitive);
    require(it != level_index.end(), errc::unknown_level,
            "unseen sensitive level: '" + policies[k].sensitive + "'");
    data.s_class[k] = it->second;
  }

  for (int m = 0; m < data.num_transitions; ++m) {
    for (const auto& r : per_transition[m].rows) {
      auto it = pol_index.find(r.individual_id);
      require(it != pol_index.end(), errc::missing_individual,
              "exposure row for unknown policy: " + r.individual_id);
      require(r.exposure > 0.0, errc::invalid_argument, "row with non-positive exposure");
      data.rows.push_back({m, it->second, (r.age - net.age_center) / net.age_scale,
                           static_cast<double>(r.event), std::log(r.exposure)});
    }
  }
  return data;
}

struct EvalOut {
  double pred = 0.0;
  double adv = 0.0;
  double total = 0.0;
  double accuracy = 0.0;
};

// Evaluates the joint objective on the given rows/policies and optionally
// accumulates the true gradient of the total loss. `model_grads` covers the
// encoder (index 0) and the regressors (1..M); `adv_grads` the adversary.
EvalOut eval_and_grads(const AdversarialNet& net, const Prepared& data,
                       const std::vector<int>& row_idx, const std::vector<int>& pol_idx,
                       std::vector<std::vector<Layer>>* model_grads,
                       std::vector<Layer>* adv_grads) {
  EvalOut out;
  const int d_w = static_cast<int>(net.encoder.layers.back().W.rows());
  const bool need_encoder_grad = model_grads != nullptr;

  // unique policies touched by this evaluation
  std::vector<int> uniq;
  {
    std::vector<char> seen(data.Z.cols(), 0);
    for (int r : row_idx)
      if (!seen[data.rows[r].policy]) {
        seen[data.rows[r].policy] = 1;
        uniq.push_back(data.rows[r].policy);
      }
    for (int p : pol_idx)
      if (!seen[p]) {
        seen[p] = 1;
        uniq.push_back(p);
      }
  }
  std::vector<int> col_of(data.Z.cols(), -1);
  MatrixXd Zu(data.Z.rows(), uniq.size());
  for (std::size_t j = 0; j < uniq.size(); ++j) {
    col_of[uniq[j]] = static_cast<int>(j);
    Zu.col(static_cast<int>(j)) = data.Z.col(uniq[j]);
  }

  std::vector<MatrixXd> enc_cache;
  MatrixXd Wu = forward_cached(net.encoder, Zu, need_encoder_grad ? &enc_cache : nullptr);
  MatrixXd dWu;
  if (need_encoder_grad) dWu = MatrixXd::Zero(Wu.rows(), Wu.cols());

  // Poisson part over rows, grouped by transition
  if (!row_idx.empty()) {
    std::vector<std::vector<int>> by_m(net.regressors.size());
    for (int r : row_idx) by_m[data.rows[r].m].push_back(r);
    const double inv_n = 1.0 / static_cast<double>(row_idx.size());
    for (std::size_t m = 0; m < by_m.size(); ++m) {
      if (by_m[m].empty()) continue;
      const int bsz = static_cast<int>(by_m[m].size());
      MatrixXd input(d_w + 1, bsz);
      for (int j = 0; j < bsz; ++j) {
        const auto& row = data.rows[by_m[m][j]];
        input.col(j).head(d_w) = Wu.col(col_of[row.policy]);
        input(d_w, j) = row.age_std;
      }
      std::vector<MatrixXd> reg_cache;
      MatrixXd eta = forward_cached(net.regressors[m], input, model_grads ? &reg_cache : nullptr);
      MatrixXd dEta(1, bsz);
      for (int j = 0; j < bsz; ++j) {
        const auto& row = data.rows[by_m[m][j]];
        double eta_full = eta(0, j) + row.log_tau;
        double mu = std::exp(eta_full);
        out.pred += (mu - row.y * eta_full + std::lgamma(row.y + 1.0)) * inv_n;
        dEta(0, j) = (mu - row.y) * inv_n;
      }
      if (model_grads) {
        MatrixXd dInput =
            backward(net.regressors[m], reg_cache, dEta, (*model_grads)[m + 1]);
        for (int j = 0; j < bsz; ++j)
          dWu.col(col_of[data.rows[by_m[m][j]].policy]) += dInput.col(j).head(d_w);
      }
    }
  }

  // adversary part over policies
  if (!pol_idx.empty()) {
    const int bsz = static_cast<int>(pol_idx.size());
    MatrixXd input(d_w, bsz);
    for (int j = 0; j < bsz; ++j) input.col(j) = Wu.col(col_of[pol_idx[j]]);
    std::vector<MatrixXd> adv_cache;
    const bool need_adv_path = model_grads != nullptr || adv_grads != nullptr;
    MatrixXd logits = forward_cached(net.adversary, input, need_adv_path ? &adv_cache : nullptr);

    MatrixXd dLogits(logits.rows(), bsz);
    int correct = 0;
    const double inv_b = 1.0 / static_cast<double>(bsz);
    for (int j = 0; j < bsz; ++j) {
      VectorXd col = logits.col(j);
      double mx = col.maxCoeff();
      VectorXd ex = (col.array() - mx).exp();
      double denom = ex.sum();
      int target = data.s_class[pol_idx[j]];
      out.adv += (std::log(denom) + mx - col[target]) * inv_b;
      int arg = 0;
      col.maxCoeff(&arg);
      if (arg == target) ++correct;
      dLogits.col(j) = ex / denom;
      dLogits(target, j) -= 1.0;
    }
    out.accuracy = static_cast<double>(correct) / bsz;

    if (need_adv_path) {
      // d(total)/d(adversary path) = -alpha * d(mean CE)
      MatrixXd scaled = dLogits * (-net.alpha * inv_b);
      std::vector<Layer> scratch = zero_like(net.adversary);
      MatrixXd dInput =
          backward(net.adversary, adv_cache, scaled, adv_grads ? *adv_grads : scratch);
      if (model_grads)
        for (int j = 0; j < bsz; ++j) dWu.col(col_of[pol_idx[j]]) += dInput.col(j);
    }
  }

  if (model_grads) backward(net.encoder, enc_cache, dWu, (*model_grads)[0]);
  out.total = out.pred - net.alpha * out.adv;
  return out;
}

std::vector<std::vector<Layer>> zero_model_grads(const AdversarialNet& net) {
  std::vector<std::vector<Layer>> g;
  g.push_back(zero_like(net.encoder));
  for (const auto& r : net.regressors) g.push_back(zero_like(r));
  return g;
}

}  // namespace

MatrixXd Mlp::forward(const MatrixXd& input) const { return forward_cached(*this, input, nullptr); }

VectorXd AdversarialNet::encode(const Covariates& z) const {
  VectorXd in(covariate_names.size());
  for (std::size_t c = 0; c < covariate_names.size(); ++c)
    in[static_cast<int>(c)] = (z.get(covariate_names[c]) - input_center[c]) / input_scale[c];
  return encoder.forward(in);
}

double AdversarialNet::predict_log_rate(int m, const Covariates& z, double age) const {
  require(m >= 0 && m < static_cast<int>(regressors.size()), errc::invalid_argument,
          "transition index out of range");
  VectorXd w = encode(z);
  VectorXd in(w.size() + 1);
  in.head(w.size()) = w;
  in[w.size()] = (age - age_center) / age_scale;
  return regressors[m].forward(in)(0, 0);
}

VectorXd AdversarialNet::adversary_probabilities(const Covariates& z) const {
  VectorXd logits = adversary.forward(encode(z));
  VectorXd ex = (logits.array() - logits.maxCoeff()).exp();
  return ex / ex.sum();
}

AdversarialNet adversarial_fit(const std::vector<ExposureDataset>& per_transition,
                               const std::vector<Policy>& policies, double alpha,
                               const AdversarialConfig& net_config,
                               const OptimizerConfig& opt_config, std::uint64_t seed) {
  require(alpha >= 0.0, errc::invalid_argument, "alpha must be nonnegative");
  require(!per_transition.empty(), errc::invalid_argument, "no transition datasets");
  require(!policies.empty(), errc::empty_sample, "no policies");

  AdversarialNet net;
  net.alpha = alpha;
  net.covariate_names = policies.front().z.names;
  net.sensitive_levels = sensitive_levels_of(policies);
  require(net.sensitive_levels.size() >= 2, errc::insufficient_groups,
          "adversarial training needs at least two sensitive levels");

  // input standardization from the policy sample
  const int d = static_cast<int>(net.covariate_names.size());
  net.input_center = VectorXd::Zero(d);
  net.input_scale = VectorXd::Ones(d);
  for (const auto& p : policies) net.input_center += p.z.values;
  net.input_center /= static_cast<double>(policies.size());
  VectorXd ssq = VectorXd::Zero(d);
  for (const auto& p : policies) ssq += (p.z.values - net.input_center).cwiseAbs2();
  for (int c = 0; c < d; ++c) {
    double sd = std::sqrt(ssq[c] / static_cast<double>(policies.size()));
    net.input_scale[c] = sd > 1e-12 ? sd : 1.0;
  }
  {
    double sum = 0.0, n_rows = 0.0;
    for (const auto& ds : per_transition)
      for (const auto& r : ds.rows) {
        sum += r.age;
        n_rows += 1.0;
      }
    net.age_center = n_rows > 0 ? sum / n_rows : 0.0;
    double ssq_age = 0.0;
    for (const auto& ds : per_transition)
      for (const auto& r : ds.rows) ssq_age += (r.age - net.age_center) * (r.age - net.age_center);
    double sd = n_rows > 0 ? std::sqrt(ssq_age / n_rows) : 1.0;
    net.age_scale = sd > 1e-12 ? sd : 1.0;
  }

  Rng rng(seed);
  const int M = static_cast<int>(per_transition.size());
  const int L = static_cast<int>(net.sensitive_levels.size());
  {
    std::vector<int> dims{d};
    for (int h : net_config.encoder_hidden) dims.push_back(h);
    dims.push_back(net_config.representation_dim);
    net.encoder = make_mlp(dims, rng);
  }
  for (int m = 0; m < M; ++m) {
    std::vector<int> dims{net_config.representation_dim + 1};
    for (int h : net_config.regressor_hidden) dims.push_back(h);
    dims.push_back(1);
    net.regressors.push_back(make_mlp(dims, rng));
  }
  {
    std::vector<int> dims{net_config.representation_dim};
    for (int h : net_config.adversary_hidden) dims.push_back(h);
    dims.push_back(L);
    net.adversary = make_mlp(dims, rng);
  }

  Prepared data = prepare(net, per_transition, policies);
  require(!data.rows.empty(), errc::empty_sample, "no exposure rows to train on");

  // policy-level validation split
  std::vector<int> pol_order(policies.size());
  for (std::size_t i = 0; i < pol_order.size(); ++i) pol_order[i] = static_cast<int>(i);
  shuffle(pol_order, rng);
  int n_val = static_cast<int>(std::floor(opt_config.validation_fraction *
                                          static_cast<double>(policies.size())));
  if (n_val >= static_cast<int>(policies.size())) n_val = static_cast<int>(policies.size()) - 1;
  std::vector<char> is_val(policies.size(), 0);
  std::vector<int> val_pols, train_pols;
  for (std::size_t i = 0; i < pol_order.size(); ++i) {
    if (static_cast<int>(i) < n_val) {
      is_val[pol_order[i]] = 1;
      val_pols.push_back(pol_order[i]);
    } else {
      train_pols.push_back(pol_order[i]);
    }
  }
  std::sort(val_pols.begin(), val_pols.end());
  std::sort(train_pols.begin(), train_pols.end());
  std::vector<int> train_rows, val_rows;
  for (std::size_t r = 0; r < data.rows.size(); ++r)
    (is_val[data.rows[r].policy] ? val_rows : train_rows).push_back(static_cast<int>(r));
  require(!train_rows.empty(), errc::empty_sample, "validation split left no training rows");

  std::vector<Mlp*> model_comps{&net.encoder};
  for (auto& reg : net.regressors) model_comps.push_back(&reg);
  std::vector<Mlp*> adv_comps{&net.adversary};
  AdamState adam_model, adam_adv;
  adam_model.init(model_comps);
  adam_adv.init(adv_comps);

  const int batch = std::max(1, std::min<int>(opt_config.batch_size,
                                              static_cast<int>(train_rows.size())));
  const int pol_batch =
      std::max(1, std::min<int>(opt_config.batch_size, static_cast<int>(train_pols.size())));

  std::vector<int> pol_stream = train_pols;
  shuffle(pol_stream, rng);
  std::size_t pol_cursor = 0;
  auto next_policy_batch = [&]() {
    std::vector<int> b;
    b.reserve(pol_batch);
    while (static_cast<int>(b.size()) < pol_batch) {
      if (pol_cursor >= pol_stream.size()) {
        shuffle(pol_stream, rng);
        pol_cursor = 0;
      }
      b.push_back(pol_stream[pol_cursor++]);
    }
    return b;
  };

  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;

  // two-timescale anneal: only the model rate decays, so the adversary ends
  // at its best response to the final representation and its accuracy is an
  // honest readout of what survived the scrub
  double lr_scale = 1.0;
  for (int epoch = 1; epoch <= opt_config.epochs; ++epoch) {
    const double model_lr = opt_config.model_learning_rate * lr_scale;
    const double adversary_lr = opt_config.adversary_learning_rate;
    lr_scale *= opt_config.learning_rate_decay;
    shuffle(train_rows, rng);
    for (std::size_t start = 0; start < train_rows.size(); start += batch) {
      std::size_t stop = std::min(train_rows.size(), start + batch);
      std::vector<int> row_batch(train_rows.begin() + start, train_rows.begin() + stop);
      std::vector<int> adv_batch = next_policy_batch();

      if (alpha > 0.0) {
        std::vector<Layer> adv_grads = zero_like(net.adversary);
        eval_and_grads(net, data, {}, adv_batch, nullptr, &adv_grads);
        // ascend the total objective: descend on its negated gradient
        for (auto& g : adv_grads) {
          g.W = -g.W;
          g.b = -g.b;
        }
        adam_adv.step(adv_comps, {adv_grads}, adversary_lr);
      }

      std::vector<std::vector<Layer>> model_grads = zero_model_grads(net);
      eval_and_grads(net, data, row_batch, adv_batch, &model_grads, nullptr);
      adam_model.step(model_comps, model_grads, model_lr);
    }

    EvalOut train_eval = eval_and_grads(net, data, train_rows, train_pols, nullptr, nullptr);
    EvalOut val_eval = val_pols.empty()
                           ? train_eval
                           : eval_and_grads(net, data, val_rows, val_pols, nullptr, nullptr);
    net.log.push_back({epoch, train_eval.total, train_eval.pred, train_eval.adv,
                       train_eval.accuracy, val_eval.total});
    require(std::isfinite(train_eval.total) && std::isfinite(val_eval.total), errc::non_finite,
            "non-finite loss at epoch " + std::to_string(epoch));

    if (opt_config.early_stop_patience > 0) {
      if (val_eval.total < best_val - 1e-9) {
        best_val = val_eval.total;
        since_best = 0;
      } else if (++since_best >= opt_config.early_stop_patience) {
        break;
      }
    }
  }
  return net;
}

std::vector<AdversarialNet> adversarial_fit_divided(
    const std::vector<ExposureDataset>& per_transition, const std::vector<Policy>& policies,
    double alpha, const AdversarialConfig& net_config, const OptimizerConfig& opt_config,
    std::uint64_t seed) {
  std::vector<AdversarialNet> nets;
  for (std::size_t m = 0; m < per_transition.size(); ++m)
    nets.push_back(adversarial_fit({per_transition[m]}, policies, alpha, net_config, opt_config,
                                   mix_seed(seed, static_cast<std::uint64_t>(m))));
  return nets;
}

double gradient_check(const AdversarialNet& net, const std::vector<ExposureDataset>& sample,
                      const std::vector<Policy>& policies, double epsilon, int max_params,
                      std::uint64_t seed) {
  require(epsilon >= 1e-7 && epsilon <= 1e-3, errc::invalid_argument,
          "epsilon outside [1e-7, 1e-3]");
  AdversarialNet work = net;  // finite differences mutate a copy
  Prepared data = prepare(work, sample, policies);
  std::vector<int> all_rows(data.rows.size()), all_pols(policies.size());
  for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < all_pols.size(); ++i) all_pols[i] = static_cast<int>(i);

  std::vector<std::vector<Layer>> model_grads = zero_model_grads(work);
  std::vector<Layer> adv_grads = zero_like(work.adversary);
  eval_and_grads(work, data, all_rows, all_pols, &model_grads, &adv_grads);

  // flatten (pointer, analytic gradient) pairs across every component
  std::vector<std::pair<double*, double>> params;
  auto collect = [&params](Mlp& mlp, const std::vector<Layer>& grads) {
    for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
      auto& W = mlp.layers[l].W;
      for (int i = 0; i < W.size(); ++i) params.push_back({W.data() + i, grads[l].W.data()[i]});
      auto& b = mlp.layers[l].b;
      for (int i = 0; i < b.size(); ++i) params.push_back({b.data() + i, grads[l].b.data()[i]});
    }
  };
  collect(work.encoder, model_grads[0]);
  for (std::size_t m = 0; m < work.regressors.size(); ++m)
    collect(work.regressors[m], model_grads[m + 1]);
  collect(work.adversary, adv_grads);

  std::vector<int> order(params.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng rng(seed);
  shuffle(order, rng);
  const int n_check = std::min<int>(max_params, static_cast<int>(order.size()));

  auto total = [&]() {
    return eval_and_grads(work, data, all_rows, all_pols, nullptr, nullptr).total;
  };
  double max_rel = 0.0;
  for (int k = 0; k < n_check; ++k) {
    auto [ptr, analytic] = params[order[k]];
    double saved = *ptr;
    *ptr = saved + epsilon;
    double up = total();
    *ptr = saved - epsilon;
    double down = total();
    *ptr = saved;
    double numeric = (up - down) / (2.0 * epsilon);
    double rel = std::abs(analytic - numeric) / (std::abs(analytic) + std::abs(numeric) + 1e-3);
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

VectorXd total_loss_gradient(const AdversarialNet& net, const std::vector<ExposureDataset>& sample,
                             const std::vector<Policy>& policies, int* adversary_offset) {
  Prepared data = prepare(net, sample, policies);
  std::vector<int> all_rows(data.rows.size()), all_pols(policies.size());
  for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < all_pols.size(); ++i) all_pols[i] = static_cast<int>(i);
  std::vector<std::vector<Layer>> model_grads = zero_model_grads(net);
  std::vector<Layer> adv_grads = zero_like(net.adversary);
  eval_and_grads(net, data, all_rows, all_pols, &model_grads, &adv_grads);

  std::vector<double> flat;
  auto append = [&flat](const std::vector<Layer>& grads) {
    for (const auto& l : grads) {
      flat.insert(flat.end(), l.W.data(), l.W.data() + l.W.size());
      flat.insert(flat.end(), l.b.data(), l.b.data() + l.b.size());
    }
  };
  for (const auto& g : model_grads) append(g);
  if (adversary_offset) *adversary_offset = static_cast<int>(flat.size());
  append(adv_grads);
  return Eigen::Map<VectorXd>(flat.data(), static_cast<int>(flat.size()));
}

double adversary_accuracy(const AdversarialNet& net, const std::vector<Policy>& policies) {
  require(!policies.empty(), errc::empty_sample, "no policies");
  int correct = 0;
  for (const auto& p : policies) {
    VectorXd probs = net.adversary_probabilities(p.z);
    int arg = 0;
    probs.maxCoeff(&arg);
    if (net.sensitive_levels[arg] == p.sensitive) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(policies.size());
}

AdversarialRateModel::AdversarialRateModel(AdversarialNet shared) : shared_(true) {
  nets_.push_back(std::move(shared));
}

AdversarialRateModel::AdversarialRateModel(std::vector<AdversarialNet> divided)
    : nets_(std::move(divided)), shared_(false) {
  require(!nets_.empty(), errc::invalid_argument, "no trained nets");
  for (const auto& n : nets_)
    require(n.regressors.size() == 1, errc::invalid_argument,
            "divided nets carry exactly one regressor each");
}

int AdversarialRateModel::num_transitions() const {
  return shared_ ? static_cast<int>(nets_[0].regressors.size()) : static_cast<int>(nets_.size());
}

double AdversarialRateModel::log_rate(int m, const Covariates& z, double age,
                                      const std::string& /*sensitive*/) const {
  require(m >= 0 && m < num_transitions(), errc::invalid_argument, "transition index out of range");
  return shared_ ? nets_[0].predict_log_rate(m, z, age) : nets_[m].predict_log_rate(0, z, age);
}

}  // namespace fairmsm
