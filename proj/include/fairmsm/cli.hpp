#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fairmsm/adversarial.hpp"
#include "fairmsm/config.hpp"
#include "fairmsm/rate_model.hpp"
#include "fairmsm/synthetic.hpp"
#include "fairmsm/types.hpp"

namespace fairmsm::cli {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides config seeds
  int threads = 1;
};

/// Exit codes: 0 success, 2 config/validation, 3 I/O, 4 numerical failure.
int exit_code_for(const Error& e);

// config section parsers, shared with tests
TransitionSpec parse_transition_spec(const Config& cfg);
ProductSpec parse_product(const Config& cfg, const TransitionSpec& spec);
ScenarioSpec parse_scenario(const Config& cfg, const TransitionSpec& spec);

// model card + coefficient CSV round trip
void write_glm_model(const GlmRateModel& model, const std::string& prefix);
GlmRateModel load_glm_model(const std::string& prefix);

// commands; each throws Error on failure
void cmd_simulate(const Config& cfg, const CommonArgs& args);
void cmd_transform(const Config& cfg, const CommonArgs& args);
void cmd_fit(const Config& cfg, const CommonArgs& args);
void cmd_price(const Config& cfg, const CommonArgs& args);
void cmd_fair(const Config& cfg, const CommonArgs& args);
void cmd_report(const Config& cfg, const CommonArgs& args);

/// Dispatches a named command; returns a process exit code and reports
/// failures on stderr.
int run_command(const std::string& command, const CommonArgs& args);

}  // namespace fairmsm::cli
