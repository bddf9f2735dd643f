#include "fairmsm/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

namespace fairmsm {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  fail(errc::io_error, "missing CSV column: " + name);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io_error, "cannot open file: " + path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.eof()) break;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      require(fields.size() == table.header.size(), errc::io_error,
              "row " + std::to_string(table.rows.size() + 1) + " of " + path + " has " +
                  std::to_string(fields.size()) + " fields, expected " +
                  std::to_string(table.header.size()));
      table.rows.push_back(std::move(fields));
    }
  }
  require(!first, errc::io_error, "empty CSV file: " + path);
  return table;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write file: " + path);
  out << content;
  require(out.good(), errc::io_error, "write failed: " + path);
}

double parse_double(const std::string& field, const std::string& column, std::size_t row) {
  try {
    std::size_t pos = 0;
    double v = std::stod(field, &pos);
    require(pos == field.size() && std::isfinite(v), errc::invalid_argument, "");
    return v;
  } catch (...) {
    fail(errc::invalid_argument, "malformed " + column + " value '" + field + "' in data row " +
                                     std::to_string(row + 1));
  }
}

int parse_int(const std::string& field, const std::string& column, std::size_t row) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(field, &pos);
    require(pos == field.size(), errc::invalid_argument, "");
    return v;
  } catch (...) {
    fail(errc::invalid_argument, "malformed " + column + " value '" + field + "' in data row " +
                                     std::to_string(row + 1));
  }
}

std::string trajectories_to_csv(const std::vector<Trajectory>& trajectories) {
  std::string out = "individual_id,initial_state,ending_state,starting_age,ending_age,exposure\n";
  for (const auto& t : trajectories) {
    for (std::size_t i = 0; i < t.sojourns.size(); ++i) {
      const auto& s = t.sojourns[i];
      const std::string& ending = i + 1 < t.sojourns.size() ? t.sojourns[i + 1].state
                                  : t.terminal_state == kCensored ? s.state
                                                                  : t.terminal_state;
      out += t.individual_id + ',' + s.state + ',' + ending + ',' + format_double(s.start_age) +
             ',' + format_double(s.end_age) + ',' + format_double(s.end_age - s.start_age) + '\n';
    }
  }
  return out;
}

std::vector<Trajectory> trajectories_from_csv(const CsvTable& table, const TransitionSpec& spec) {
  int c_id = table.column("individual_id");
  int c_init = table.column("initial_state");
  int c_end = table.column("ending_state");
  int c_start_age = table.column("starting_age");
  int c_end_age = table.column("ending_age");

  std::vector<Trajectory> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string& id = row[c_id];
    bool starts_new = out.empty() || out.back().individual_id != id;
    if (starts_new) out.push_back({id, {}, kCensored});
    Trajectory& traj = out.back();

    if (!starts_new) {
      // the previous row must have announced this sojourn's state
      const auto& prev = table.rows[r - 1];
      require(prev[c_end] == row[c_init], errc::invalid_argument,
              "data row " + std::to_string(r + 1) + ": sojourn state " + row[c_init] +
                  " does not match previous ending state " + prev[c_end]);
    }
    double a = parse_double(row[c_start_age], "starting_age", r);
    double b = parse_double(row[c_end_age], "ending_age", r);
    traj.sojourns.push_back({row[c_init], a, b});

    bool last_of_id =
        r + 1 == table.rows.size() || table.rows[r + 1][c_id] != id;
    if (last_of_id) {
      // ending_state equal to the occupied state marks censoring
      if (row[c_end] == row[c_init]) {
        traj.terminal_state = kCensored;
      } else {
        require(spec.is_absorbing(spec.state_index(row[c_end])), errc::invalid_argument,
                "data row " + std::to_string(r + 1) +
                    ": trajectory ends with an unresolved transition to " + row[c_end]);
        traj.terminal_state = row[c_end];
      }
    }
  }
  return out;
}

std::string policies_to_csv(const std::vector<Policy>& policies) {
  std::string out = "individual_id,issue_age,sensitive";
  if (!policies.empty())
    for (const auto& name : policies.front().z.names) out += ',' + name;
  out += '\n';
  for (const auto& p : policies) {
    out += p.individual_id + ',' + format_double(p.issue_age) + ',' + p.sensitive;
    for (int c = 0; c < p.z.values.size(); ++c) out += ',' + format_double(p.z.values[c]);
    out += '\n';
  }
  return out;
}

std::vector<Policy> policies_from_csv(const CsvTable& table) {
  int c_id = table.column("individual_id");
  int c_age = table.column("issue_age");
  int c_sens = table.column("sensitive");
  std::vector<int> cov_cols;
  std::vector<std::string> cov_names;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (static_cast<int>(i) == c_id || static_cast<int>(i) == c_age ||
        static_cast<int>(i) == c_sens)
      continue;
    cov_cols.push_back(static_cast<int>(i));
    cov_names.push_back(table.header[i]);
  }
  std::vector<Policy> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    Policy p;
    p.individual_id = row[c_id];
    p.issue_age = parse_double(row[c_age], "issue_age", r);
    p.sensitive = row[c_sens];
    p.z.names = cov_names;
    p.z.values.resize(static_cast<int>(cov_cols.size()));
    for (std::size_t c = 0; c < cov_cols.size(); ++c)
      p.z.values[static_cast<int>(c)] = parse_double(row[cov_cols[c]], cov_names[c], r);
    validate_policy(p);
    out.push_back(std::move(p));
  }
  return out;
}

std::string exposure_to_csv(const std::vector<ExposureRow>& rows) {
  std::string out = "individual_id,transition,age,event,exposure\n";
  for (const auto& r : rows) {
    out += r.individual_id + ',' + std::to_string(r.transition + 1) + ',' +
           std::to_string(r.age) + ',' + std::to_string(r.event) + ',' +
           format_double(r.exposure) + '\n';
  }
  return out;
}

std::string exposure_to_csv(const ExposureDataset& data) {
  std::string out = "individual_id,transition,age,event,exposure";
  for (const auto& name : data.covariate_names) out += ',' + name;
  out += ",sensitive\n";
  for (const auto& r : data.rows) {
    const Policy& p = data.policy_of(r);
    out += r.individual_id + ',' + std::to_string(r.transition + 1) + ',' +
           std::to_string(r.age) + ',' + std::to_string(r.event) + ',' +
           format_double(r.exposure);
    for (int c = 0; c < p.z.values.size(); ++c) out += ',' + format_double(p.z.values[c]);
    out += ',' + p.sensitive + '\n';
  }
  return out;
}

std::vector<ExposureRow> exposure_rows_from_csv(const CsvTable& table) {
  int c_id = table.column("individual_id");
  int c_m = table.column("transition");
  int c_age = table.column("age");
  int c_event = table.column("event");
  int c_exp = table.column("exposure");
  std::vector<ExposureRow> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    ExposureRow e;
    e.individual_id = row[c_id];
    e.transition = parse_int(row[c_m], "transition", r) - 1;
    e.age = parse_int(row[c_age], "age", r);
    e.event = parse_int(row[c_event], "event", r);
    e.exposure = parse_double(row[c_exp], "exposure", r);
    require(e.transition >= 0, errc::io_error,
            "transition index must be positive in data row " + std::to_string(r + 1));
    out.push_back(std::move(e));
  }
  return out;
}

ExposureDataset exposure_dataset_from_csv(const CsvTable& table) {
  ExposureDataset data;
  data.rows = exposure_rows_from_csv(table);
  int c_sens = table.column("sensitive");
  int c_id = table.column("individual_id");
  std::vector<int> cov_cols;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const std::string& h = table.header[i];
    if (h == "individual_id" || h == "transition" || h == "age" || h == "event" ||
        h == "exposure" || h == "sensitive")
      continue;
    cov_cols.push_back(static_cast<int>(i));
    data.covariate_names.push_back(h);
  }
  // reconstruct one policy per individual from its first row
  std::unordered_map<std::string, int> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (seen.count(row[c_id])) continue;
    seen[row[c_id]] = 1;
    Policy p;
    p.individual_id = row[c_id];
    p.sensitive = row[c_sens];
    p.z.names = data.covariate_names;
    p.z.values.resize(static_cast<int>(cov_cols.size()));
    for (std::size_t c = 0; c < cov_cols.size(); ++c)
      p.z.values[static_cast<int>(c)] = parse_double(row[cov_cols[c]], data.covariate_names[c], r);
    data.policies.push_back(std::move(p));
  }
  data.rebuild_index();
  return data;
}

std::string quotes_to_csv(const std::vector<PremiumQuote>& quotes) {
  std::string out =
      "individual_id,issue_age,sensitive,mode,lump_sum,epv_benefits,level_premium\n";
  for (const auto& q : quotes) {
    out += q.individual_id + ',' + format_double(q.issue_age) + ',' + q.sensitive + ',' +
           to_string(q.mode) + ',' + format_double(q.lump_sum) + ',' +
           format_double(q.epv_benefits) + ',' +
           (q.level_premium ? format_double(*q.level_premium) : std::string()) + '\n';
  }
  return out;
}

std::string probability_matrix_to_csv(const ProbabilityMatrix& pm, const TransitionSpec& spec) {
  std::string out = "from_state,to_state,from_age,to_age,prob\n";
  for (int i = 0; i < pm.P.rows(); ++i)
    for (int j = 0; j < pm.P.cols(); ++j)
      out += spec.state_label(i) + ',' + spec.state_label(j) + ',' + std::to_string(pm.from_age) +
             ',' + std::to_string(pm.to_age) + ',' + format_double(pm.P(i, j)) + '\n';
  return out;
}

}  // namespace fairmsm
