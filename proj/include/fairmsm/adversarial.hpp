#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairmsm/rate_model.hpp"
#include "fairmsm/types.hpp"

namespace fairmsm {

/// Dense multilayer perceptron; tanh on hidden layers, linear output.
struct Mlp {
  struct Layer {
    MatrixXd W;
    VectorXd b;
  };
  std::vector<Layer> layers;

  /// Batched forward pass; columns are samples.
  MatrixXd forward(const MatrixXd& input) const;
};

struct AdversarialConfig {
  int representation_dim = 8;
  std::vector<int> encoder_hidden{16, 16};
  std::vector<int> regressor_hidden{16};
  std::vector<int> adversary_hidden{16};
};

struct OptimizerConfig {
  double model_learning_rate = 1e-3;
  double adversary_learning_rate = 1e-3;
  double learning_rate_decay = 0.99;  // per-epoch multiplier on the model rate
  int batch_size = 256;
  int epochs = 200;
  int early_stop_patience = 20;      // 0 disables early stopping
  double validation_fraction = 0.1;  // held-out policies for the stopping metric
};

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;       // prediction loss - alpha * adversary loss
  double loss_pred = 0.0;  // mean Poisson deviance-scale loss over rows
  double loss_adv = 0.0;   // mean cross-entropy over policies
  double adversary_accuracy = 0.0;
  double val_loss = 0.0;
};

/// Shared-representation adversarial model: one encoder Z -> W, one
/// regressor per transition on (W, age), one adversary predicting the
/// sensitive attribute from W.
struct AdversarialNet {
  Mlp encoder;
  std::vector<Mlp> regressors;
  Mlp adversary;
  double alpha = 0.0;
  std::vector<std::string> covariate_names;
  std::vector<std::string> sensitive_levels;
  VectorXd input_center, input_scale;
  double age_center = 0.0, age_scale = 1.0;
  std::vector<EpochLog> log;

  VectorXd encode(const Covariates& z) const;
  double predict_log_rate(int m, const Covariates& z, double age) const;
  /// Class probabilities of the adversary for one policy's representation.
  VectorXd adversary_probabilities(const Covariates& z) const;
};

/// Alternating min-max training of the joint objective: the adversary
/// maximizes, the encoder and regressors minimize. Deterministic given seed.
AdversarialNet adversarial_fit(const std::vector<ExposureDataset>& per_transition,
                               const std::vector<Policy>& policies, double alpha,
                               const AdversarialConfig& net_config,
                               const OptimizerConfig& opt_config, std::uint64_t seed);

/// Divide-and-conquer variant: one independent encoder/regressor/adversary
/// triple per transition.
std::vector<AdversarialNet> adversarial_fit_divided(
    const std::vector<ExposureDataset>& per_transition, const std::vector<Policy>& policies,
    double alpha, const AdversarialConfig& net_config, const OptimizerConfig& opt_config,
    std::uint64_t seed);

/// Compares analytic gradients of the total loss against central finite
/// differences on up to `max_params` randomly chosen parameters; returns the
/// largest relative error.
double gradient_check(const AdversarialNet& net, const std::vector<ExposureDataset>& sample,
                      const std::vector<Policy>& policies, double epsilon, int max_params = 200,
                      std::uint64_t seed = 1);

/// Flattened analytic gradient of the total loss over all parameters, in the
/// order encoder, regressors, adversary. `adversary_offset` receives the
/// index of the first adversary-path component.
VectorXd total_loss_gradient(const AdversarialNet& net,
                             const std::vector<ExposureDataset>& sample,
                             const std::vector<Policy>& policies,
                             int* adversary_offset = nullptr);

/// Fraction of policies whose sensitive level the adversary classifies
/// correctly (argmax over class probabilities).
double adversary_accuracy(const AdversarialNet& net, const std::vector<Policy>& policies);

/// RateModel facade over trained nets (shared: one net; divided: one per
/// transition). Never reads the sensitive attribute at query time.
class AdversarialRateModel : public RateModel {
 public:
  explicit AdversarialRateModel(AdversarialNet shared);
  explicit AdversarialRateModel(std::vector<AdversarialNet> divided);

  int num_transitions() const override;
  bool uses_sensitive() const override { return false; }
  double log_rate(int m, const Covariates& z, double age,
                  const std::string& sensitive) const override;

 private:
  std::vector<AdversarialNet> nets_;  // size 1 (shared) or M (divided)
  bool shared_ = true;
};

}  // namespace fairmsm
