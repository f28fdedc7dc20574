#include "motm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "motm/scenario_io.hpp"

namespace motm {

SweepSpec SweepSpec::defaults() {
  SweepSpec spec;
  spec.scenarios = builtin_scenarios();
  spec.methods = {Method::proposed, Method::reactive, Method::planned};
  spec.delays = delay_range(10.0, 1.0);
  spec.output_dir = "results";
  return spec;
}

void SweepSpec::validate() const {
  if (scenarios.empty() || methods.empty() || delays.empty()) {
    throw std::invalid_argument("sweep needs at least one scenario, method and delay");
  }
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (!(delays[i] >= 0.0)) throw std::invalid_argument("delays must be non-negative");
    if (i > 0 && !(delays[i] > delays[i - 1])) {
      throw std::invalid_argument("delays must be sorted ascending without duplicates");
    }
  }
}

std::vector<double> delay_range(double max, double step) {
  if (!(step > 0.0) || !(max >= 0.0)) throw std::invalid_argument("delay_range: need step > 0, max >= 0");
  std::vector<double> out;
  const long n = std::lround(std::floor(max / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(static_cast<double>(i) * step);
  return out;
}

std::vector<ResultRow> ResultsTable::select(std::string_view scenario, Method method) const {
  std::vector<ResultRow> out;
  for (const auto& r : rows) {
    if (r.scenario == scenario && r.method == method) out.push_back(r);
  }
  return out;
}

const ResultRow* ResultsTable::find(std::string_view scenario, Method method, double delay) const {
  for (const auto& r : rows) {
    if (r.scenario == scenario && r.method == method && std::abs(r.delay - delay) < 1e-9) return &r;
  }
  return nullptr;
}

ResultRow make_row(const std::string& scenario, Method method, double delay, const TrialResult& r) {
  ResultRow row;
  row.scenario = scenario;
  row.method = method;
  row.delay = delay;
  row.success = r.success;
  if (r.success) row.exec_time = r.exec_time;
  row.first_attempt = r.first_attempt_time;
  row.grasp = r.grasp_time;
  return row;
}

ResultsTable run_sweep(const SweepSpec& spec, const TrialConfig& base, int jobs,
                       const SweepProgress& progress) {
  spec.validate();
  struct Task {
    const Scenario* scenario;
    Method method;
    double delay;
  };
  std::vector<Task> tasks;
  for (const auto& s : spec.scenarios) {
    for (Method m : spec.methods) {
      for (double d : spec.delays) tasks.push_back({&s, m, d});
    }
  }

  ResultsTable table;
  table.rows.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      {
        std::lock_guard lock(mutex);
        if (error) return;
      }
      try {
        TrialConfig cfg = base;
        cfg.scenario = *tasks[i].scenario;
        cfg.method = tasks[i].method;
        cfg.failure_delay = tasks[i].delay;
        cfg.deterministic_search = true;
        const TrialResult r = run_trial(cfg);
        table.rows[i] = make_row(cfg.scenario.name, cfg.method, cfg.failure_delay, r);
        if (progress) {
          std::lock_guard lock(mutex);
          progress(table.rows[i]);
        }
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return table;
}

namespace {

std::string fmt_delay(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", d);
  return buf;
}

std::string fmt_time(const std::optional<double>& t) {
  if (!t) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", *t);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, int row, const char* field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CsvError(row, std::string("bad ") + field + " '" + s + "'");
  }
}

std::optional<double> parse_optional(const std::string& s, int row, const char* field) {
  if (s.empty()) return std::nullopt;
  return parse_number(s, row, field);
}

}  // namespace

void write_results_csv(std::ostream& out, const ResultsTable& table) {
  out << kResultsHeader << '\n';
  for (const auto& r : table.rows) {
    out << r.scenario << ',' << to_string(r.method) << ',' << fmt_delay(r.delay) << ','
        << (r.success ? 1 : 0) << ',' << fmt_time(r.success ? r.exec_time : std::nullopt) << ','
        << fmt_time(r.first_attempt) << ',' << fmt_time(r.grasp) << '\n';
  }
}

ResultsTable read_results_csv(std::istream& in) {
  std::string line;
  int row = 1;
  if (!std::getline(in, line)) throw CsvError(row, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw CsvError(row, "unexpected header '" + line + "'");

  ResultsTable table;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 7) throw CsvError(row, "expected 7 fields, got " + std::to_string(f.size()));
    ResultRow r;
    r.scenario = f[0];
    if (r.scenario.empty()) throw CsvError(row, "empty scenario name");
    try {
      r.method = parse_method(f[1]);
    } catch (const std::invalid_argument&) {
      throw CsvError(row, "unknown method '" + f[1] + "'");
    }
    r.delay = parse_number(f[2], row, "delay_s");
    if (r.delay < 0) throw CsvError(row, "negative delay");
    if (f[3] != "0" && f[3] != "1") throw CsvError(row, "success must be 0 or 1");
    r.success = f[3] == "1";
    r.exec_time = parse_optional(f[4], row, "exec_time_s");
    if (r.success != r.exec_time.has_value()) {
      throw CsvError(row, "exec_time_s must be set exactly when success is 1");
    }
    r.first_attempt = parse_optional(f[5], row, "first_attempt_s");
    r.grasp = parse_optional(f[6], row, "grasp_s");
    table.rows.push_back(std::move(r));
  }
  return table;
}

namespace {

const char* method_color(Method m) {
  switch (m) {
    case Method::proposed: return "#1f77b4";
    case Method::reactive: return "#d62728";
    case Method::planned: return "#2ca02c";
  }
  return "#000000";
}

double nice_step(double range) {
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const ResultsTable& table, const std::string& scenario) {
  constexpr double W = 640, H = 420, left = 70, right = 150, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;

  double x_max = 0.0, y_max = 0.0;
  for (const auto& r : table.rows) {
    if (r.scenario != scenario) continue;
    x_max = std::max(x_max, r.delay);
    if (r.success && r.exec_time) y_max = std::max(y_max, *r.exec_time);
  }
  if (x_max <= 0.0) x_max = 10.0;
  if (y_max <= 0.0) y_max = 10.0;
  const double x_step = nice_step(x_max);
  const double y_step = nice_step(y_max);
  x_max = std::ceil(x_max / x_step - 1e-9) * x_step;
  y_max = std::ceil(y_max / y_step - 1e-9) * y_step;
  auto sx = [&](double x) { return left + pw * x / x_max; };
  auto sy = [&](double y) { return top + ph * (1.0 - y / y_max); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << xml_escape(scenario) << "</text>\n";

  o << "<g stroke=\"#dddddd\">\n";
  for (double y = 0; y <= y_max + 1e-9; y += y_step) {
    o << "<line x1=\"" << num(left) << "\" y1=\"" << num(sy(y)) << "\" x2=\"" << num(left + pw)
      << "\" y2=\"" << num(sy(y)) << "\"/>\n";
  }
  o << "</g>\n";
  o << "<g stroke=\"black\">\n";
  o << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(left + pw)
    << "\" y2=\"" << num(top + ph) << "\"/>\n";
  o << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\""
    << num(top + ph) << "\"/>\n";
  o << "</g>\n";
  for (double x = 0; x <= x_max + 1e-9; x += x_step) {
    o << "<text x=\"" << num(sx(x)) << "\" y=\"" << num(top + ph + 18)
      << "\" text-anchor=\"middle\">" << fmt_delay(x) << "</text>\n";
  }
  for (double y = 0; y <= y_max + 1e-9; y += y_step) {
    o << "<text x=\"" << num(left - 8) << "\" y=\"" << num(sy(y) + 4) << "\" text-anchor=\"end\">"
      << fmt_delay(y) << "</text>\n";
  }
  o << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(H - 16)
    << "\" text-anchor=\"middle\">failure delay (s)</text>\n";
  o << "<text transform=\"translate(20 " << num(top + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">execution time (s)</text>\n";

  int legend_row = 0;
  for (Method m : {Method::proposed, Method::reactive, Method::planned}) {
    const auto rows = table.select(scenario, m);
    if (rows.empty()) continue;
    const char* color = method_color(m);
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) {
      if (r.success && r.exec_time) pts.emplace_back(r.delay, *r.exec_time);
    }
    std::sort(pts.begin(), pts.end());
    if (!pts.empty()) {
      o << "<polyline class=\"series\" data-method=\"" << to_string(m) << "\" fill=\"none\" stroke=\""
        << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        o << (i ? " " : "") << num(sx(pts[i].first)) << ',' << num(sy(pts[i].second));
      }
      o << "\"/>\n";
      for (const auto& [x, y] : pts) {
        o << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
      }
    }
    const double ly = top + 10 + 20 * legend_row++;
    o << "<line x1=\"" << num(left + pw + 15) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(left + pw + 40)
      << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << num(left + pw + 46) << "\" y=\"" << num(ly + 4) << "\">" << to_string(m)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::vector<std::filesystem::path> write_plots(const ResultsTable& table,
                                               const std::filesystem::path& out_dir) {
  std::vector<std::string> names;
  for (const auto& r : table.rows) {
    if (std::find(names.begin(), names.end(), r.scenario) == names.end()) names.push_back(r.scenario);
  }
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> files;
  for (const auto& name : names) {
    const auto path = out_dir / (name + ".svg");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << render_svg(table, name);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    files.push_back(path);
  }
  return files;
}

std::vector<std::filesystem::path> export_scenarios(const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> files;
  for (const auto& s : builtin_scenarios()) {
    const auto path = out_dir / (s.name + ".json");
    save_scenario_file(s, path);
    files.push_back(path);
  }
  return files;
}

namespace {

using nlohmann::json;
using Setter = std::function<void(const json&, TrialConfig&)>;

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw std::invalid_argument("config: " + key + " must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw std::invalid_argument("config: " + key + " must be an integer");
  return v.get<int>();
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw std::invalid_argument("config: " + key + " must be a boolean");
  return v.get<bool>();
}

const std::map<std::string, std::map<std::string, Setter>>& config_setters() {
  static const std::map<std::string, std::map<std::string, Setter>> setters = [] {
    std::map<std::string, std::map<std::string, Setter>> m;
#define MOTM_D(section, key, expr) \
  m[section][key] = [](const json& v, TrialConfig& c) { expr = as_double(v, section "." key); }
#define MOTM_I(section, key, expr) \
  m[section][key] = [](const json& v, TrialConfig& c) { expr = as_int(v, section "." key); }
#define MOTM_B(section, key, expr) \
  m[section][key] = [](const json& v, TrialConfig& c) { expr = as_bool(v, section "." key); }
    MOTM_D("controller", "budget_ms", c.controller.budget_ms);
    MOTM_D("controller", "primitive_duration", c.controller.primitive_duration);
    MOTM_I("controller", "horizon", c.controller.horizon);
    MOTM_D("controller", "goal_pos_tol", c.controller.goal_pos_tol);
    MOTM_D("controller", "goal_heading_tol", c.controller.goal_heading_tol);
    MOTM_D("controller", "w_prox", c.controller.w_prox);
    MOTM_D("controller", "local_window", c.controller.local_window);
    MOTM_D("controller", "stop_speed", c.controller.stop_speed);
    MOTM_D("controller", "reverse_penalty", c.controller.reverse_penalty);
    MOTM_I("controller", "max_expansions", c.controller.max_expansions);
    MOTM_B("controller", "proximity_scaling", c.controller.proximity_scaling);
    MOTM_D("limits", "v_max", c.controller.limits.v_max);
    MOTM_D("limits", "omega_max", c.controller.limits.omega_max);
    MOTM_D("limits", "a_max", c.controller.limits.a_max);
    MOTM_D("limits", "alpha_max", c.controller.limits.alpha_max);
    MOTM_D("placement", "ring_radius", c.placement.ring_radius);
    MOTM_D("placement", "angular_step_deg", c.placement.angular_step_deg);
    MOTM_I("placement", "headings_per_position", c.placement.headings_per_position);
    MOTM_D("placement", "hysteresis", c.placement.hysteresis);
    MOTM_D("placement", "tie_tolerance", c.placement.tie_tolerance);
    MOTM_D("trial", "failure_delay", c.failure_delay);
    MOTM_D("trial", "timeout", c.timeout);
    MOTM_D("trial", "reach_radius", c.reach_radius);
    MOTM_B("trial", "deterministic_search", c.deterministic_search);
#undef MOTM_D
#undef MOTM_I
#undef MOTM_B
    // The control period is shared by the trial loop and the controller.
    const Setter set_dt = [](const json& v, TrialConfig& c) {
      c.dt = c.controller.dt = as_double(v, "dt");
    };
    m["controller"]["dt"] = set_dt;
    m["trial"]["dt"] = set_dt;
    return m;
  }();
  return setters;
}

}  // namespace

void apply_config_json(const std::string& text, TrialConfig& cfg) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config: top level must be an object");
  const auto& setters = config_setters();
  TrialConfig next = cfg;
  for (const auto& [section, body] : doc.items()) {
    const auto sec = setters.find(section);
    if (sec == setters.end()) throw std::invalid_argument("config: unknown section '" + section + "'");
    if (!body.is_object()) throw std::invalid_argument("config: section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      const auto it = sec->second.find(key);
      if (it == sec->second.end()) {
        throw std::invalid_argument("config: unknown key '" + section + "." + key + "'");
      }
      it->second(value, next);
    }
  }
  next.validate();
  cfg = next;
}

void apply_config_file(const std::filesystem::path& path, TrialConfig& cfg) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  apply_config_json(ss.str(), cfg);
}

void write_path_csv(std::ostream& out, const GlobalPath& path) {
  out << "x,y,theta\n";
  char buf[128];
  for (const auto& p : path.waypoints) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f\n", p.x(), p.y(), p.theta());
    out << buf;
  }
}

}  // namespace motm
