#include "fairmsm/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <thread>

#include "fairmsm/csv.hpp"
#include "fairmsm/fairness.hpp"
#include "fairmsm/glm.hpp"
#include "fairmsm/pipeline.hpp"
#include "fairmsm/pricing.hpp"

namespace fairmsm::cli {

namespace fs = std::filesystem;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case errc::io_error:
      return 3;
    case errc::collinear:
    case errc::diverged:
    case errc::non_finite:
    case errc::numerical_overflow:
      return 4;
    default:
      return 2;
  }
}

namespace {

const std::vector<std::string> kKnownSections = {"transitions", "scenario", "product",
                                                 "paths",       "fit",      "price",
                                                 "fairness"};

// inputs resolve relative to the config file; outputs land in --out
std::string resolve_input(const Config& cfg, const std::string& rel) {
  fs::path p(rel);
  if (p.is_absolute()) return p.string();
  return (fs::path(cfg.origin()).parent_path() / p).string();
}

std::string out_path(const CommonArgs& args, const std::string& name) {
  fs::create_directories(args.out_dir);
  return (fs::path(args.out_dir) / name).string();
}

std::string input_path(const Config& cfg, const std::string& key, const std::string& fallback) {
  return resolve_input(cfg, cfg.get_or("paths", key, fallback));
}

void split_dotted(const std::string& key, std::vector<std::string>& parts) {
  parts.clear();
  std::size_t start = 0;
  while (true) {
    std::size_t dot = key.find('.', start);
    if (dot == std::string::npos) {
      parts.push_back(key.substr(start));
      return;
    }
    parts.push_back(key.substr(start, dot - start));
    start = dot + 1;
  }
}

std::vector<double> parse_prob_list(const std::string& value, const Config& cfg,
                                    const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      fail(errc::config_error, cfg.origin() + ": key '" + key + "' has a non-numeric entry");
    }
  }
  return out;
}

std::uint64_t scenario_seed(const Config& cfg, const CommonArgs& args) {
  if (args.seed) {
    cfg.get_optional("scenario", "seed");  // consume if present
    return *args.seed;
  }
  return cfg.get_seed("scenario", "seed");
}

std::vector<PremiumQuote> batch_quotes(const std::vector<Policy>& policies, const RateModel& model,
                                       PricingMode mode, const ProductSpec& product,
                                       const TransitionSpec& spec, int threads,
                                       std::optional<double> override_age = std::nullopt) {
  std::vector<PremiumQuote> quotes(policies.size());
  auto work = [&](std::size_t i) {
    Policy p = policies[i];
    if (override_age) p.issue_age = *override_age;
    quotes[i] = quote(p, model, mode, product, spec);
  };
  threads = std::max(1, threads);
  if (threads == 1 || policies.size() < 2) {
    for (std::size_t i = 0; i < policies.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    std::size_t chunk = (policies.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      std::size_t lo = t * chunk;
      std::size_t hi = std::min(policies.size(), lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, t, lo, hi]() {
        try {
          for (std::size_t i = lo; i < hi; ++i) work(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return quotes;
}

std::vector<double> moving_average(const std::vector<double>& v, int window) {
  const int half = std::max(0, (window - 1) / 2);
  std::vector<double> out(v.size());
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    int lo = std::max(0, i - half);
    int hi = std::min(static_cast<int>(v.size()) - 1, i + half);
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) sum += v[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

}  // namespace

TransitionSpec parse_transition_spec(const Config& cfg) {
  std::vector<std::string> states = cfg.get_list("transitions", "states");
  std::vector<Transition> transitions;
  for (const auto& t : cfg.get_all("transitions", "transition")) {
    std::size_t arrow = t.find("->");
    require(arrow != std::string::npos, errc::config_error,
            "transition must be written 'From -> To': " + t);
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t");
      std::size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    transitions.push_back({trim(t.substr(0, arrow)), trim(t.substr(arrow + 2))});
  }
  return TransitionSpec(std::move(states), std::move(transitions));
}

ProductSpec parse_product(const Config& cfg, const TransitionSpec& spec) {
  ProductSpec product;
  product.premium_states = cfg.get_list_or("product", "premium_states");
  product.benefit_states = cfg.get_list("product", "benefit_states");
  double benefit = cfg.get_double_or("product", "benefit", 1.0);
  product.benefit_schedule = [benefit](int) { return benefit; };
  if (cfg.has("product", "death_benefit"))
    product.death_benefit = cfg.get_double("product", "death_benefit");
  if (cfg.has("product", "discount_factor")) {
    product.discount = cfg.get_double("product", "discount_factor");
  } else {
    product.discount = 1.0 / (1.0 + cfg.get_double_or("product", "interest_rate", 0.03));
  }
  product.terminal_age = cfg.get_int_or("product", "terminal_age", 110);
  product.initial_state = cfg.get_or("product", "initial_state", "Healthy");
  validate_product(product, spec);
  return product;
}

ScenarioSpec parse_scenario(const Config& cfg, const TransitionSpec& spec) {
  ScenarioSpec sc;
  sc.n = cfg.get_int("scenario", "n");
  sc.sensitive_levels = cfg.get_list("scenario", "sensitive_levels");
  sc.sensitive_probs =
      parse_prob_list(cfg.get("scenario", "sensitive_probs"), cfg, "sensitive_probs");
  sc.issue_age_min = cfg.get_double_or("scenario", "issue_age_min", 50.0);
  sc.issue_age_max = cfg.get_double_or("scenario", "issue_age_max", 80.0);
  sc.horizon_age = cfg.get_double_or("scenario", "horizon_age", 110.0);
  sc.start_state = cfg.get_or("scenario", "start_state", "Healthy");
  std::string censoring = cfg.get_or("scenario", "censoring", "exact");
  if (censoring == "exact") {
    sc.censoring = CensoringMode::exact;
  } else if (censoring == "biennial_midpoint") {
    sc.censoring = CensoringMode::biennial_midpoint;
  } else {
    fail(errc::config_error, "unknown censoring mode: " + censoring);
  }

  // covariate.<name>.<field> blocks, in file order
  std::vector<std::string> parts;
  std::vector<std::string> names;
  for (const auto& key : cfg.keys_with_prefix("scenario", "covariate.")) {
    split_dotted(key, parts);
    require(parts.size() >= 3, errc::config_error, "malformed covariate key: " + key);
    if (std::find(names.begin(), names.end(), parts[1]) == names.end()) names.push_back(parts[1]);
  }
  for (const auto& name : names) {
    CovariateGenerator g;
    g.name = name;
    std::string base = "covariate." + name + ".";
    std::string kind = cfg.get_or("scenario", base + "kind", "normal");
    if (kind == "normal") {
      g.kind = CovariateGenerator::Kind::normal;
    } else if (kind == "lognormal") {
      g.kind = CovariateGenerator::Kind::lognormal;
    } else if (kind == "categorical") {
      g.kind = CovariateGenerator::Kind::categorical;
    } else if (kind == "wealth") {
      g.kind = CovariateGenerator::Kind::wealth;
    } else if (kind == "income") {
      g.kind = CovariateGenerator::Kind::income;
    } else {
      fail(errc::config_error, "unknown covariate kind '" + kind + "' for " + name);
    }
    g.mean = cfg.get_double_or("scenario", base + "mean", 0.0);
    g.sd = cfg.get_double_or("scenario", base + "sd", 1.0);
    if (cfg.has("scenario", base + "levels"))
      g.levels = cfg.get_list("scenario", base + "levels");
    for (const auto& key : cfg.keys_with_prefix("scenario", base + "shift.")) {
      split_dotted(key, parts);
      g.level_shift[parts[3]] = cfg.get_double("scenario", key);
    }
    for (const auto& key : cfg.keys_with_prefix("scenario", base + "probs.")) {
      split_dotted(key, parts);
      g.level_probs[parts[3]] = parse_prob_list(cfg.get("scenario", key), cfg, key);
    }
    if (cfg.has("scenario", base + "probs"))
      g.base_probs = parse_prob_list(cfg.get("scenario", base + "probs"), cfg, base + "probs");
    sc.covariates.push_back(std::move(g));
  }

  // rate.<m>.<field> blocks, one per transition (1-based in config)
  sc.rates.resize(spec.num_transitions());
  for (int m = 1; m <= spec.num_transitions(); ++m) {
    std::string base = "rate." + std::to_string(m) + ".";
    TrueRates& r = sc.rates[m - 1];
    r.intercept = cfg.get_double_or("scenario", base + "intercept", 0.0);
    r.age_slope = cfg.get_double_or("scenario", base + "age_slope", 0.0);
    for (const auto& key : cfg.keys_with_prefix("scenario", base + "coef.")) {
      split_dotted(key, parts);
      r.coef[parts[3]] = cfg.get_double("scenario", key);
    }
    for (const auto& key : cfg.keys_with_prefix("scenario", base + "sensitive.")) {
      split_dotted(key, parts);
      r.sensitive_effect[parts[3]] = cfg.get_double("scenario", key);
    }
  }
  return sc;
}

void write_glm_model(const GlmRateModel& model, const std::string& prefix) {
  const int M = model.num_transitions();
  std::string card;
  card += "type = glm\n";
  card += "transitions = " + std::to_string(M) + "\n";
  card += std::string("uses_sensitive = ") + (model.uses_sensitive() ? "true" : "false") + "\n";
  card += std::string("age_form = ") +
          (model.layout(0).age_form == AgeForm::linear ? "linear" : "categorical") + "\n";
  {
    std::string cov;
    for (const auto& c : model.layout(0).covariate_names) cov += (cov.empty() ? "" : ",") + c;
    card += "covariates = " + cov + "\n";
  }
  if (model.uses_sensitive()) {
    std::string lv;
    for (const auto& l : model.layout(0).sensitive_levels) lv += (lv.empty() ? "" : ",") + l;
    card += "sensitive_levels = " + lv + "\n";
  }
  for (int m = 0; m < M; ++m) {
    card += "[transition " + std::to_string(m + 1) + "]\n";
    if (model.layout(m).age_form == AgeForm::categorical) {
      std::string ages;
      for (int a : model.layout(m).age_levels)
        ages += (ages.empty() ? "" : ",") + std::to_string(a);
      card += "age_levels = " + ages + "\n";
    }
    card += std::string("converged = ") + (model.fit(m).converged ? "true" : "false") + "\n";
    card += "iterations = " + std::to_string(model.fit(m).iterations) + "\n";
    card += "log_likelihood = " + format_double(model.fit(m).log_likelihood) + "\n";
    card += "deviance = " + format_double(model.fit(m).deviance) + "\n";
  }
  write_file(prefix + "_card.txt", card);

  std::string coef = "transition,term,estimate,std_error\n";
  for (int m = 0; m < M; ++m) {
    const FitResult& fit = model.fit(m);
    for (std::size_t j = 0; j < fit.column_names.size(); ++j) {
      coef += std::to_string(m + 1) + ',' + fit.column_names[j] + ',' +
              format_double(fit.coefficients[static_cast<int>(j)]) + ',' +
              format_double(fit.std_errors[static_cast<int>(j)]) + '\n';
    }
  }
  write_file(prefix + "_coefficients.csv", coef);
}

GlmRateModel load_glm_model(const std::string& prefix) {
  Config card = Config::parse_file(prefix + "_card.txt");
  require(card.get("", "type") == "glm", errc::io_error, "unsupported model type in " + prefix);
  const int M = card.get_int("", "transitions");
  bool use_sensitive = card.get_bool_or("", "uses_sensitive", false);
  std::string age_form = card.get("", "age_form");
  std::vector<std::string> covariates = card.get_list_or("", "covariates");
  std::vector<std::string> sensitive_levels;
  if (use_sensitive) sensitive_levels = card.get_list("", "sensitive_levels");

  CsvTable coefs = read_csv(prefix + "_coefficients.csv");
  int c_m = coefs.column("transition");
  int c_term = coefs.column("term");
  int c_est = coefs.column("estimate");
  int c_se = coefs.column("std_error");

  std::vector<FitResult> fits;
  std::vector<DesignLayout> layouts;
  for (int m = 0; m < M; ++m) {
    std::string section = "transition " + std::to_string(m + 1);
    DesignLayout layout;
    layout.covariate_names = covariates;
    layout.age_form = age_form == "linear" ? AgeForm::linear : AgeForm::categorical;
    layout.use_sensitive = use_sensitive;
    layout.sensitive_levels = sensitive_levels;
    if (layout.age_form == AgeForm::categorical)
      for (const auto& a : card.get_list(section, "age_levels"))
        layout.age_levels.push_back(std::stoi(a));

    std::map<std::string, std::pair<double, double>> by_term;
    for (std::size_t r = 0; r < coefs.rows.size(); ++r) {
      if (parse_int(coefs.rows[r][c_m], "transition", r) != m + 1) continue;
      by_term[coefs.rows[r][c_term]] = {parse_double(coefs.rows[r][c_est], "estimate", r),
                                        parse_double(coefs.rows[r][c_se], "std_error", r)};
    }
    FitResult fit;
    fit.column_names = layout.column_names();
    fit.column_sources = layout.column_sources();
    fit.coefficients.resize(static_cast<int>(fit.column_names.size()));
    fit.std_errors.resize(static_cast<int>(fit.column_names.size()));
    for (std::size_t j = 0; j < fit.column_names.size(); ++j) {
      auto it = by_term.find(fit.column_names[j]);
      require(it != by_term.end(), errc::io_error,
              "coefficient file lacks term " + fit.column_names[j] + " for " + section);
      fit.coefficients[static_cast<int>(j)] = it->second.first;
      fit.std_errors[static_cast<int>(j)] = it->second.second;
    }
    fit.converged = card.get_bool_or(section, "converged", true);
    fit.iterations = card.get_int_or(section, "iterations", 0);
    fit.log_likelihood = card.get_double_or(section, "log_likelihood", 0.0);
    fit.deviance = card.get_double_or(section, "deviance", 0.0);
    card.get_optional(section, "age_levels");
    fits.push_back(std::move(fit));
    layouts.push_back(std::move(layout));
  }
  card.ensure_all_consumed();
  return GlmRateModel(std::move(fits), std::move(layouts));
}

void cmd_simulate(const Config& cfg, const CommonArgs& args) {
  TransitionSpec spec = parse_transition_spec(cfg);
  ScenarioSpec scenario = parse_scenario(cfg, spec);
  scenario.seed = scenario_seed(cfg, args);
  cfg.ensure_consumed({"transitions", "scenario"}, kKnownSections);
  scenario.validate(spec);

  std::vector<Policy> policies = generate_population(scenario);
  std::vector<Trajectory> trajectories = generate_study(scenario, spec, policies);

  std::string pol_path = out_path(args, "policies.csv");
  std::string traj_path = out_path(args, "trajectories.csv");
  write_file(pol_path, policies_to_csv(policies));
  write_file(traj_path, trajectories_to_csv(trajectories));
  std::cout << "wrote " << pol_path << " (" << policies.size() << " policies)\n";
  std::cout << "wrote " << traj_path << "\n";
}

void cmd_transform(const Config& cfg, const CommonArgs& args) {
  TransitionSpec spec = parse_transition_spec(cfg);
  std::string traj_path = input_path(cfg, "trajectories", "trajectories.csv");
  std::optional<std::string> pol_key = cfg.get_optional("paths", "policies");
  cfg.ensure_consumed({"transitions"}, kKnownSections);

  std::vector<Trajectory> trajectories = trajectories_from_csv(read_csv(traj_path), spec);
  std::vector<ExposureRow> rows;
  for (const auto& traj : trajectories) {
    auto split = split_by_age(expand_exposure(traj, spec));
    rows.insert(rows.end(), split.begin(), split.end());
  }

  std::string out = out_path(args, "exposure.csv");
  if (pol_key) {
    std::vector<Policy> policies = policies_from_csv(read_csv(resolve_input(cfg, *pol_key)));
    MergeResult merged = merge_covariates(rows, policies);
    write_file(out, exposure_to_csv(merged.data));
    std::cout << "wrote " << out << " (" << merged.data.rows.size() << " rows, "
              << merged.dropped_rows << " dropped for " << merged.dropped_individuals
              << " unmatched individuals)\n";
  } else {
    write_file(out, exposure_to_csv(rows));
    std::cout << "wrote " << out << " (" << rows.size() << " rows)\n";
  }
}

void cmd_fit(const Config& cfg, const CommonArgs& args) {
  TransitionSpec spec = parse_transition_spec(cfg);
  std::string exposure_path = input_path(cfg, "exposure", "exposure.csv");
  DesignOptions opt;
  opt.use_sensitive = cfg.get_bool_or("fit", "use_sensitive", false);
  std::string age_form = cfg.get_or("fit", "age_form", "linear");
  if (age_form == "linear") {
    opt.age_form = AgeForm::linear;
  } else if (age_form == "categorical") {
    opt.age_form = AgeForm::categorical;
  } else {
    fail(errc::config_error, "unknown age_form: " + age_form);
  }
  std::string label = cfg.get_or("fit", "label", opt.use_sensitive ? "best" : "blind");
  bool contributions = cfg.get_bool_or("fit", "contributions", true);
  cfg.ensure_consumed({"transitions", "fit"}, kKnownSections);

  ExposureDataset data = exposure_dataset_from_csv(read_csv(exposure_path));
  auto per_transition = partition_by_transition(data, spec.num_transitions());

  std::vector<FitResult> fits;
  std::vector<DesignLayout> layouts;
  std::vector<DesignMatrix> designs;
  for (const auto& ds : per_transition) {
    DesignMatrix d = build_design(ds, opt);
    fits.push_back(fit_poisson(d));
    layouts.push_back(d.layout);
    designs.push_back(std::move(d));
  }
  GlmRateModel model(fits, layouts);
  std::string prefix = out_path(args, "model_" + label);
  write_glm_model(model, prefix);
  std::cout << "wrote " << prefix << "_card.txt\n";
  std::cout << "wrote " << prefix << "_coefficients.csv\n";

  if (contributions) {
    std::vector<std::string> sources = data.covariate_names;
    sources.push_back("age");
    if (opt.use_sensitive) sources.push_back("sensitive");
    std::string csv = "transition,covariate,contribution\n";
    for (int m = 0; m < spec.num_transitions(); ++m) {
      for (const auto& source : sources) {
        double c = likelihood_contribution(designs[m], fits[m], source);
        csv += std::to_string(m + 1) + ',' + source + ',' + format_double(c) + '\n';
      }
    }
    std::string path = prefix + "_contributions.csv";
    write_file(path, csv);
    std::cout << "wrote " << path << "\n";
  }
}

namespace {

std::string premium_by_age_csv(const std::vector<PremiumQuote>& quotes, int window) {
  // group means by (mode, level, integer age), then a centered moving average
  std::map<std::string, std::map<std::string, std::map<int, std::pair<double, int>>>> acc;
  for (const auto& q : quotes) {
    auto& cell = acc[to_string(q.mode)][q.sensitive][static_cast<int>(std::floor(q.issue_age))];
    cell.first += q.lump_sum;
    cell.second += 1;
  }
  std::string out = "mode,sensitive,age,n,mean_lump_sum,smoothed_lump_sum\n";
  for (const auto& [mode, by_level] : acc) {
    for (const auto& [level, by_age] : by_level) {
      std::vector<int> ages;
      std::vector<double> means;
      for (const auto& [age, cell] : by_age) {
        ages.push_back(age);
        means.push_back(cell.first / cell.second);
      }
      std::vector<double> smooth = moving_average(means, window);
      for (std::size_t i = 0; i < ages.size(); ++i) {
        out += mode + ',' + level + ',' + std::to_string(ages[i]) + ',' +
               std::to_string(by_age.at(ages[i]).second) + ',' + format_double(means[i]) + ',' +
               format_double(smooth[i]) + '\n';
      }
    }
  }
  return out;
}

std::string fairness_report_csv(
    const std::vector<std::pair<std::string, std::vector<PremiumQuote>>>& settings,
    int parity_age) {
  std::string out = "setting,age,sensitive,n,mean_premium,ks_vs_pooled,parity_gap,max_ks\n";
  for (const auto& [setting, quotes] : settings) {
    ParityReport rep = demographic_parity_gap(quotes, parity_age);
    std::vector<double> pooled;
    std::map<std::string, std::vector<double>> by_level;
    for (const auto& q : quotes) {
      pooled.push_back(q.lump_sum);
      by_level[q.sensitive].push_back(q.lump_sum);
    }
    for (const auto& [level, values] : by_level) {
      out += setting + ',' + std::to_string(parity_age) + ',' + level + ',' +
             std::to_string(values.size()) + ',' + format_double(rep.group_mean.at(level)) + ',' +
             format_double(ks_distance(values, pooled)) + ',' + format_double(rep.gap) + ',' +
             format_double(rep.max_ks) + '\n';
    }
  }
  return out;
}

std::string quotes_with_setting_csv(
    const std::vector<std::pair<std::string, std::vector<PremiumQuote>>>& settings) {
  std::string out =
      "setting,individual_id,issue_age,sensitive,mode,lump_sum,epv_benefits,level_premium\n";
  for (const auto& [setting, quotes] : settings) {
    for (const auto& q : quotes) {
      out += setting + ',' + q.individual_id + ',' + format_double(q.issue_age) + ',' +
             q.sensitive + ',' + to_string(q.mode) + ',' + format_double(q.lump_sum) + ',' +
             format_double(q.epv_benefits) + ',' +
             (q.level_premium ? format_double(*q.level_premium) : std::string()) + '\n';
    }
  }
  return out;
}

std::string training_log_csv(const std::vector<std::pair<std::string, const AdversarialNet*>>& nets) {
  std::string out = "net,epoch,loss,loss_pred,loss_adv,adversary_accuracy,val_loss\n";
  for (const auto& [name, net] : nets) {
    for (const auto& e : net->log) {
      out += name + ',' + std::to_string(e.epoch) + ',' + format_double(e.loss) + ',' +
             format_double(e.loss_pred) + ',' + format_double(e.loss_adv) + ',' +
             format_double(e.adversary_accuracy) + ',' + format_double(e.val_loss) + '\n';
    }
  }
  return out;
}

OptimizerConfig parse_optimizer(const Config& cfg) {
  OptimizerConfig oc;
  oc.model_learning_rate = cfg.get_double_or("fairness", "learning_rate", 1e-3);
  oc.adversary_learning_rate = cfg.get_double_or("fairness", "adversary_learning_rate", 1e-3);
  oc.learning_rate_decay = cfg.get_double_or("fairness", "learning_rate_decay", 0.99);
  oc.batch_size = cfg.get_int_or("fairness", "batch_size", 256);
  oc.epochs = cfg.get_int_or("fairness", "epochs", 200);
  oc.early_stop_patience = cfg.get_int_or("fairness", "patience", 20);
  oc.validation_fraction = cfg.get_double_or("fairness", "validation_fraction", 0.1);
  return oc;
}

AdversarialConfig parse_net_config(const Config& cfg) {
  AdversarialConfig nc;
  nc.representation_dim = cfg.get_int_or("fairness", "representation_dim", 8);
  auto dims = [&](const std::string& key, std::vector<int> fallback) {
    if (!cfg.has("fairness", key)) return fallback;
    std::vector<int> out;
    for (const auto& v : cfg.get_list("fairness", key)) out.push_back(std::stoi(v));
    return out;
  };
  nc.encoder_hidden = dims("encoder_hidden", {16, 16});
  nc.regressor_hidden = dims("regressor_hidden", {16});
  nc.adversary_hidden = dims("adversary_hidden", {16});
  return nc;
}

}  // namespace

void cmd_price(const Config& cfg, const CommonArgs& args) {
  TransitionSpec spec = parse_transition_spec(cfg);
  ProductSpec product = parse_product(cfg, spec);
  std::vector<std::string> modes = cfg.get_list_or("price", "modes");
  if (modes.empty()) modes = {"best_estimate", "blind", "fairness_adjusted"};
  int window = cfg.get_int_or("price", "smoothing_window", 5);
  std::string pol_path = input_path(cfg, "policies", "policies.csv");
  std::string best_prefix = input_path(cfg, "model_best", "model_best");
  std::string blind_prefix = input_path(cfg, "model_blind", "model_blind");
  cfg.ensure_consumed({"transitions", "product", "price"}, kKnownSections);

  std::vector<Policy> policies = policies_from_csv(read_csv(pol_path));

  std::shared_ptr<GlmRateModel> best, blind;
  auto need_best = [&]() {
    if (!best) best = std::make_shared<GlmRateModel>(load_glm_model(best_prefix));
    return best;
  };
  auto need_blind = [&]() {
    if (!blind) blind = std::make_shared<GlmRateModel>(load_glm_model(blind_prefix));
    return blind;
  };

  std::vector<PremiumQuote> all;
  for (const auto& mode_name : modes) {
    PricingMode mode = pricing_mode_from_string(mode_name);
    std::vector<PremiumQuote> quotes;
    if (mode == PricingMode::best_estimate) {
      quotes = batch_quotes(policies, *need_best(), mode, product, spec, args.threads);
    } else if (mode == PricingMode::blind) {
      quotes = batch_quotes(policies, *need_blind(), mode, product, spec, args.threads);
    } else {
      MixtureRateModel adjusted(need_best(), policy_level_distribution(policies));
      quotes = batch_quotes(policies, adjusted, mode, product, spec, args.threads);
    }
    all.insert(all.end(), quotes.begin(), quotes.end());
  }

  std::string qpath = out_path(args, "quotes.csv");
  write_file(qpath, quotes_to_csv(all));
  std::string ppath = out_path(args, "premium_by_age.csv");
  write_file(ppath, premium_by_age_csv(all, window));
  std::cout << "wrote " << qpath << " (" << all.size() << " quotes)\n";
  std::cout << "wrote " << ppath << "\n";
}

void cmd_fair(const Config& cfg, const CommonArgs& args) {
  TransitionSpec spec = parse_transition_spec(cfg);
  ProductSpec product = parse_product(cfg, spec);
  std::string mode = cfg.get("fairness", "mode");
  int parity_age = cfg.get_int_or("fairness", "parity_age", 65);
  std::string pol_path = input_path(cfg, "policies", "policies.csv");

  std::vector<std::pair<std::string, std::vector<PremiumQuote>>> settings;

  if (mode == "post") {
    std::string best_prefix = input_path(cfg, "model_best", "model_best");
    std::string blind_prefix = input_path(cfg, "model_blind", "model_blind");
    cfg.ensure_consumed({"transitions", "product", "fairness"}, kKnownSections);
    std::vector<Policy> policies = policies_from_csv(read_csv(pol_path));
    auto best = std::make_shared<GlmRateModel>(load_glm_model(best_prefix));
    GlmRateModel blind = load_glm_model(blind_prefix);
    MixtureRateModel adjusted(best, policy_level_distribution(policies));

    settings.push_back({"best_estimate",
                        batch_quotes(policies, *best, PricingMode::best_estimate, product, spec,
                                     args.threads, parity_age)});
    settings.push_back({"blind", batch_quotes(policies, blind, PricingMode::blind, product, spec,
                                              args.threads, parity_age)});
    settings.push_back({"fairness_adjusted",
                        batch_quotes(policies, adjusted, PricingMode::fairness_adjusted, product,
                                     spec, args.threads, parity_age)});
  } else if (mode == "pre") {
    std::vector<std::string> ot_covariates = cfg.get_list("fairness", "ot_covariates");
    std::string traj_path = input_path(cfg, "trajectories", "trajectories.csv");
    cfg.ensure_consumed({"transitions", "product", "fairness"}, kKnownSections);
    std::vector<Policy> policies = policies_from_csv(read_csv(pol_path));
    std::vector<Trajectory> trajectories = trajectories_from_csv(read_csv(traj_path), spec);

    std::vector<ExposureRow> rows;
    for (const auto& traj : trajectories) {
      auto split = split_by_age(expand_exposure(traj, spec));
      rows.insert(rows.end(), split.begin(), split.end());
    }
    std::vector<Policy> transformed = ot_preprocess(policies, ot_covariates);
    DesignOptions opt;  // blind fits on both sides of the comparison
    auto fit_from = [&](const std::vector<Policy>& pols) {
      auto per_transition =
          partition_by_transition(merge_covariates(rows, pols).data, spec.num_transitions());
      return fit_rate_model(per_transition, opt);
    };
    GlmRateModel baseline = fit_from(policies);
    GlmRateModel adjusted = fit_from(transformed);

    settings.push_back({"baseline", batch_quotes(policies, baseline, PricingMode::blind, product,
                                                 spec, args.threads, parity_age)});
    settings.push_back({"ot", batch_quotes(transformed, adjusted, PricingMode::blind, product,
                                           spec, args.threads, parity_age)});
  } else if (mode == "adv") {
    double alpha = cfg.get_double_or("fairness", "alpha", 1.0);
    std::string variant = cfg.get_or("fairness", "variant", "shared");
    std::uint64_t seed = cfg.has("fairness", "seed") ? cfg.get_seed("fairness", "seed") : 1;
    if (args.seed) seed = *args.seed;
    OptimizerConfig oc = parse_optimizer(cfg);
    AdversarialConfig nc = parse_net_config(cfg);
    std::string exposure_path = input_path(cfg, "exposure", "exposure.csv");
    cfg.ensure_consumed({"transitions", "product", "fairness"}, kKnownSections);
    std::vector<Policy> policies = policies_from_csv(read_csv(pol_path));
    ExposureDataset data = exposure_dataset_from_csv(read_csv(exposure_path));
    auto per_transition = partition_by_transition(data, spec.num_transitions());

    std::vector<std::pair<std::string, const AdversarialNet*>> log_nets;
    std::unique_ptr<AdversarialRateModel> model;
    std::vector<AdversarialNet> divided;
    AdversarialNet shared;
    if (variant == "shared") {
      shared = adversarial_fit(per_transition, policies, alpha, nc, oc, seed);
      log_nets.push_back({"shared", &shared});
      model = std::make_unique<AdversarialRateModel>(shared);
    } else if (variant == "divided") {
      divided = adversarial_fit_divided(per_transition, policies, alpha, nc, oc, seed);
      for (std::size_t m = 0; m < divided.size(); ++m)
        log_nets.push_back({"m" + std::to_string(m + 1), &divided[m]});
      model = std::make_unique<AdversarialRateModel>(divided);
    } else {
      fail(errc::config_error, "unknown adversarial variant: " + variant);
    }
    std::string lpath = out_path(args, "adversarial_log.csv");
    write_file(lpath, training_log_csv(log_nets));
    std::cout << "wrote " << lpath << "\n";

    settings.push_back({"adversarial",
                        batch_quotes(policies, *model, PricingMode::fairness_adjusted, product,
                                     spec, args.threads, parity_age)});
  } else {
    fail(errc::config_error, "unknown fairness mode: " + mode);
  }

  std::string qpath = out_path(args, "fairness_quotes.csv");
  write_file(qpath, quotes_with_setting_csv(settings));
  std::string rpath = out_path(args, "fairness_report.csv");
  write_file(rpath, fairness_report_csv(settings, parity_age));
  std::cout << "wrote " << qpath << "\n";
  std::cout << "wrote " << rpath << "\n";
}

void cmd_report(const Config& cfg, const CommonArgs& args) {
  std::string quotes_path = input_path(cfg, "quotes", "quotes.csv");
  cfg.ensure_consumed({}, kKnownSections);
  CsvTable table = read_csv(quotes_path);
  int c_mode = table.column("mode");
  int c_sens = table.column("sensitive");
  int c_lump = table.column("lump_sum");

  std::map<std::string, std::map<std::string, std::vector<double>>> by_mode_level;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    by_mode_level[table.rows[r][c_mode]][table.rows[r][c_sens]].push_back(
        parse_double(table.rows[r][c_lump], "lump_sum", r));
  }
  std::string out = "mode,level_a,level_b,mean_a,mean_b,mean_gap,ks\n";
  for (const auto& [mode, by_level] : by_mode_level) {
    for (auto a = by_level.begin(); a != by_level.end(); ++a) {
      for (auto b = std::next(a); b != by_level.end(); ++b) {
        auto mean = [](const std::vector<double>& v) {
          double s = 0.0;
          for (double x : v) s += x;
          return s / static_cast<double>(v.size());
        };
        double ma = mean(a->second), mb = mean(b->second);
        out += mode + ',' + a->first + ',' + b->first + ',' + format_double(ma) + ',' +
               format_double(mb) + ',' + format_double(std::abs(ma - mb)) + ',' +
               format_double(ks_distance(a->second, b->second)) + '\n';
      }
    }
  }
  std::string path = out_path(args, "parity_summary.csv");
  write_file(path, out);
  std::cout << "wrote " << path << "\n";
}

int run_command(const std::string& command, const CommonArgs& args) {
  try {
    Config cfg = Config::parse_file(args.config_path);
    if (command == "simulate") {
      cmd_simulate(cfg, args);
    } else if (command == "transform") {
      cmd_transform(cfg, args);
    } else if (command == "fit") {
      cmd_fit(cfg, args);
    } else if (command == "price") {
      cmd_price(cfg, args);
    } else if (command == "fair") {
      cmd_fair(cfg, args);
    } else if (command == "report") {
      cmd_report(cfg, args);
    } else {
      std::cerr << "error: unknown command '" << command << "'\n";
      return 2;
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace fairmsm::cli
