#include "fairmsm/rate_model.hpp"

namespace fairmsm {

GlmRateModel::GlmRateModel(std::vector<FitResult> fits, std::vector<DesignLayout> layouts)
    : fits_(std::move(fits)), layouts_(std::move(layouts)) {
  require(!fits_.empty() && fits_.size() == layouts_.size(), errc::invalid_argument,
          "one fit and layout per transition required");
  use_sensitive_ = layouts_.front().use_sensitive;
  for (const auto& l : layouts_)
    require(l.use_sensitive == use_sensitive_, errc::invalid_argument,
            "transitions disagree on sensitive-attribute use");
}

double GlmRateModel::log_rate(int m, const Covariates& z, double age,
                              const std::string& sensitive) const {
  require(m >= 0 && m < num_transitions(), errc::invalid_argument, "transition index out of range");
  VectorXd x = layouts_[m].design_row(z, age, sensitive);
  return x.dot(fits_[m].coefficients);
}

GlmRateModel fit_rate_model(const std::vector<ExposureDataset>& per_transition,
                            const DesignOptions& opt) {
  std::vector<FitResult> fits;
  std::vector<DesignLayout> layouts;
  for (const auto& data : per_transition) {
    DesignMatrix d = build_design(data, opt);
    fits.push_back(fit_poisson(d));
    layouts.push_back(d.layout);
  }
  return GlmRateModel(std::move(fits), std::move(layouts));
}

}  // namespace fairmsm
