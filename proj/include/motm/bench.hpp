#pragma once

#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "motm/task_sim.hpp"

namespace motm {

inline constexpr std::string_view kResultsHeader =
    "scenario,method,delay_s,success,exec_time_s,first_attempt_s,grasp_s";

struct SweepSpec {
  std::vector<Scenario> scenarios;
  std::vector<Method> methods;
  std::vector<double> delays;
  std::filesystem::path output_dir;

  /// All builtin scenarios and methods, delays 0, 1, ..., 10.
  static SweepSpec defaults();
  /// Throws std::invalid_argument on empty lists or unsorted/negative delays.
  void validate() const;
};

/// 0, step, 2 step, ... up to `max` (inclusive, within rounding).
std::vector<double> delay_range(double max, double step);

struct ResultRow {
  std::string scenario;
  Method method = Method::proposed;
  double delay = 0.0;
  bool success = false;
  std::optional<double> exec_time;
  std::optional<double> first_attempt;
  std::optional<double> grasp;

  bool operator==(const ResultRow&) const = default;
};

struct ResultsTable {
  std::vector<ResultRow> rows;

  /// Rows of one scenario and method, in table order.
  std::vector<ResultRow> select(std::string_view scenario, Method method) const;
  const ResultRow* find(std::string_view scenario, Method method, double delay) const;
};

ResultRow make_row(const std::string& scenario, Method method, double delay, const TrialResult& r);

using SweepProgress = std::function<void(const ResultRow&)>;

/// Runs every (scenario, method, delay) triple with deterministic search on
/// `jobs` worker threads. Rows are ordered by scenario, method and delay as
/// listed in `spec`, regardless of completion order. `base` supplies every
/// other trial setting.
ResultsTable run_sweep(const SweepSpec& spec, const TrialConfig& base, int jobs = 1,
                       const SweepProgress& progress = {});

void write_results_csv(std::ostream& out, const ResultsTable& table);

class CsvError : public std::runtime_error {
 public:
  CsvError(int row, const std::string& what)
      : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}
  int row() const { return row_; }

 private:
  int row_;
};

/// Row numbers in errors count the header as row 1.
ResultsTable read_results_csv(std::istream& in);

/// Line chart of exec time over delay, one polyline per method present in
/// the table; failed trials are left out.
std::string render_svg(const ResultsTable& table, const std::string& scenario);

/// One `<scenario>.svg` per scenario in the table, in first-seen order.
std::vector<std::filesystem::path> write_plots(const ResultsTable& table,
                                               const std::filesystem::path& out_dir);

/// Writes line.json, turn.json and obstructed_turn.json.
std::vector<std::filesystem::path> export_scenarios(const std::filesystem::path& out_dir);

/// Applies overrides from a JSON document of the form
///   {"controller": {...}, "limits": {...}, "placement": {...}, "trial": {...}}
/// Unknown sections or keys throw std::invalid_argument.
void apply_config_json(const std::string& text, TrialConfig& cfg);
void apply_config_file(const std::filesystem::path& path, TrialConfig& cfg);

/// Path waypoints as CSV rows x,y,theta.
void write_path_csv(std::ostream& out, const GlobalPath& path);

}  // namespace motm
