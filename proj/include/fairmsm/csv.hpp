#pragma once

#include <string>
#include <vector>

#include "fairmsm/fairness.hpp"
#include "fairmsm/multistate.hpp"
#include "fairmsm/pricing.hpp"
#include "fairmsm/types.hpp"

namespace fairmsm {

/// All CSV surfaces share one dialect: comma-separated, mandatory header
/// row, UTF-8, LF line endings, floats printed with 12 significant digits.
/// Transition indices are printed 1-based.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // io_error when absent
};

CsvTable read_csv(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Field parsers that name the offending row on failure.
double parse_double(const std::string& field, const std::string& column, std::size_t row);
int parse_int(const std::string& field, const std::string& column, std::size_t row);

// trajectories.csv: individual_id,initial_state,ending_state,starting_age,ending_age,exposure
// A censored sojourn repeats its initial state in the ending_state column.
std::string trajectories_to_csv(const std::vector<Trajectory>& trajectories);
std::vector<Trajectory> trajectories_from_csv(const CsvTable& table, const TransitionSpec& spec);

// policies.csv: individual_id,issue_age,sensitive,<encoded covariate columns>
std::string policies_to_csv(const std::vector<Policy>& policies);
std::vector<Policy> policies_from_csv(const CsvTable& table);

// exposure.csv: individual_id,transition,age,event,exposure
// plus covariate columns and sensitive when written from a merged dataset
std::string exposure_to_csv(const std::vector<ExposureRow>& rows);
std::string exposure_to_csv(const ExposureDataset& data);
std::vector<ExposureRow> exposure_rows_from_csv(const CsvTable& table);
ExposureDataset exposure_dataset_from_csv(const CsvTable& table);

std::string quotes_to_csv(const std::vector<PremiumQuote>& quotes);

std::string probability_matrix_to_csv(const ProbabilityMatrix& pm, const TransitionSpec& spec);

}  // namespace fairmsm
