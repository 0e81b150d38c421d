#include "rotorid/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "rotorid/error.hpp"
#include "rotorid/io.hpp"

namespace rotorid {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) throw std::invalid_argument("expects a number");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("expects a non-negative integer");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("expects true or false");
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> v;
  for (const auto& w : words(s)) v.push_back(to_double(w));
  return v;
}

Matrix matrix_value(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream in(text);
  for (std::string row; std::getline(in, row, ';');) rows.push_back(to_doubles(row));
  if (rows.empty() || rows.front().empty()) throw std::invalid_argument("expects a matrix like '1 2; 3 4'");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw std::invalid_argument("matrix rows differ in length");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& w : v) s += (s.empty() ? "" : " ") + w;
  return s;
}

std::string join(const std::vector<double>& v) {
  std::vector<std::string> w;
  for (double x : v) w.push_back(format_double(x));
  return join(w);
}

std::vector<Axis> to_axes(const std::string& s) {
  std::vector<Axis> out;
  for (const auto& w : words(s)) {
    auto a = parse_axis(w);
    if (!a) throw std::invalid_argument("unknown axis '" + w + "'");
    if (std::find(out.begin(), out.end(), *a) != out.end()) throw std::invalid_argument("axis '" + w + "' repeated");
    out.push_back(*a);
  }
  return out;
}

std::string join(const std::vector<Axis>& v) {
  std::vector<std::string> w;
  for (Axis a : v) w.emplace_back(axis_name(a));
  return join(w);
}

const std::vector<std::string> kSweepKeys = {"omega_min", "omega_max",   "T_rec",      "C1",          "C2",
                                             "amplitude", "noise_fraction", "t_trim_pre", "t_trim_post", "fade_time"};

double* sweep_field(SweepSchedule& s, const std::string& key) {
  if (key == "omega_min") return &s.omega_min;
  if (key == "omega_max") return &s.omega_max;
  if (key == "T_rec") return &s.T_rec;
  if (key == "C1") return &s.C1;
  if (key == "amplitude") return &s.amplitude;
  if (key == "noise_fraction") return &s.noise_fraction;
  if (key == "t_trim_pre") return &s.t_trim_pre;
  if (key == "t_trim_post") return &s.t_trim_post;
  if (key == "fade_time") return &s.fade_time;
  return nullptr;
}

struct Key {
  std::string name;
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

template <class Field>
Key number_key(std::string name, Field field) {
  return {std::move(name), [field](PipelineConfig& c, const std::string& v) { field(c) = to_double(v); },
          [field](const PipelineConfig& c) { return format_double(field(const_cast<PipelineConfig&>(c))); }};
}

template <class Field>
Key bool_key(std::string name, Field field) {
  return {std::move(name), [field](PipelineConfig& c, const std::string& v) { field(c) = to_bool(v); },
          [field](const PipelineConfig& c) { return std::string(field(const_cast<PipelineConfig&>(c)) ? "true" : "false"); }};
}

template <class Field>
Key optional_matrix_key(std::string name, Field field) {
  return {std::move(name),
          [field](PipelineConfig& c, const std::string& v) {
            if (v == "none") field(c).reset();
            else field(c) = matrix_value(v);
          },
          [field](const PipelineConfig& c) {
            const auto& m = field(const_cast<PipelineConfig&>(c));
            return m ? format_matrix(*m) : std::string("none");
          }};
}

void add_pid_keys(std::vector<Key>& keys, const std::string& prefix, std::function<PidGains&(PipelineConfig&)> g) {
  keys.push_back(number_key(prefix + "_kp", [g](PipelineConfig& c) -> double& { return g(c).kp; }));
  keys.push_back(number_key(prefix + "_ki", [g](PipelineConfig& c) -> double& { return g(c).ki; }));
  keys.push_back(number_key(prefix + "_kd", [g](PipelineConfig& c) -> double& { return g(c).kd; }));
  keys.push_back(number_key(prefix + "_min", [g](PipelineConfig& c) -> double& { return g(c).out_min; }));
  keys.push_back(number_key(prefix + "_max", [g](PipelineConfig& c) -> double& { return g(c).out_max; }));
  keys.push_back(number_key(prefix + "_integ_limit", [g](PipelineConfig& c) -> double& { return g(c).integ_limit; }));
}

std::vector<Key> build_keys() {
  std::vector<Key> k;
  using C = PipelineConfig;
  k.push_back({"run.case",
               [](C& c, const std::string& v) {
                 if (v.empty() || v.find_first_of(" /\\\t") != std::string::npos)
                   throw std::invalid_argument("expects a file-name-safe word");
                 c.case_name = v;
               },
               [](const C& c) { return c.case_name; }});
  k.push_back({"run.out_dir",
               [](C& c, const std::string& v) {
                 if (v.empty()) throw std::invalid_argument("expects a directory");
                 c.out_dir = v;
               },
               [](const C& c) { return c.out_dir; }});
  k.push_back({"run.seed", [](C& c, const std::string& v) { c.seed = to_u64(v); },
               [](const C& c) { return std::to_string(c.seed); }});

  k.push_back({"plant.lateral_preset",
               [](C& c, const std::string& v) {
                 if (v != "inband" && v != "paper") throw std::invalid_argument("expects inband or paper");
                 c.plant.lateral_preset = v;
               },
               [](const C& c) { return c.plant.lateral_preset; }});
  k.push_back(optional_matrix_key("plant.lateral_F", [](C& c) -> std::optional<Matrix>& { return c.plant.lateral_F; }));
  k.push_back(optional_matrix_key("plant.lateral_G", [](C& c) -> std::optional<Matrix>& { return c.plant.lateral_G; }));
  k.push_back({"plant.lateral_tau", [](C& c, const std::string& v) { c.plant.lateral_tau = to_doubles(v); },
               [](const C& c) { return join(c.plant.lateral_tau); }});
  k.push_back(number_key("plant.dt", [](C& c) -> double& { return c.plant.dt; }));
  k.push_back({"plant.sensor_noise",
               [](C& c, const std::string& v) {
                 if (v != "none" && v != "realistic") throw std::invalid_argument("expects none or realistic");
                 c.plant.sensor_noise = v;
               },
               [](const C& c) { return c.plant.sensor_noise; }});

  const std::pair<const char*, Axis> loops[] = {
      {"roll", Axis::Lateral}, {"pitch", Axis::Longitudinal}, {"yaw", Axis::Pedal}, {"altitude", Axis::Collective}};
  for (auto [name, axis] : loops) {
    Axis a = axis;
    add_pid_keys(k, std::string("autopilot.") + name + "_outer",
                 [a](C& c) -> PidGains& { return c.autopilot.loop(a).outer; });
    add_pid_keys(k, std::string("autopilot.") + name + "_inner",
                 [a](C& c) -> PidGains& { return c.autopilot.loop(a).inner; });
  }
  k.push_back(number_key("setpoint.phi", [](C& c) -> double& { return c.setpoint.phi; }));
  k.push_back(number_key("setpoint.theta", [](C& c) -> double& { return c.setpoint.theta; }));
  k.push_back(number_key("setpoint.psi", [](C& c) -> double& { return c.setpoint.psi; }));
  k.push_back(number_key("setpoint.h", [](C& c) -> double& { return c.setpoint.h; }));

  k.push_back(number_key("safety.phi_max", [](C& c) -> double& { return c.safety.phi_max; }));
  k.push_back(number_key("safety.theta_max", [](C& c) -> double& { return c.safety.theta_max; }));
  k.push_back(number_key("safety.h_min", [](C& c) -> double& { return c.safety.h_min; }));
  k.push_back(number_key("safety.h_max", [](C& c) -> double& { return c.safety.h_max; }));
  k.push_back(number_key("safety.r_max", [](C& c) -> double& { return c.safety.r_max; }));
  k.push_back(number_key("safety.recovery_margin", [](C& c) -> double& { return c.safety.recovery_margin; }));
  k.push_back(number_key("safety.recovery_hold", [](C& c) -> double& { return c.safety.recovery_hold; }));
  k.push_back(number_key("safety.recovery_timeout", [](C& c) -> double& { return c.safety.recovery_timeout; }));

  k.push_back({"sweep.axes", [](C& c, const std::string& v) { c.sweep.axes = to_axes(v); },
               [](const C& c) { return join(c.sweep.axes); }});
  for (const auto& key : kSweepKeys) {
    if (key == "C2") {
      k.push_back({"sweep.C2",
                   [](C& c, const std::string& v) {
                     if (v == "auto") c.sweep.schedule.C2.reset();
                     else c.sweep.schedule.C2 = to_double(v);
                   },
                   [](const C& c) { return c.sweep.schedule.C2 ? format_double(*c.sweep.schedule.C2) : "auto"; }});
      continue;
    }
    k.push_back(number_key("sweep." + key, [key](C& c) -> double& { return *sweep_field(c.sweep.schedule, key); }));
  }

  k.push_back({"doublet.axes", [](C& c, const std::string& v) { c.doublet.axes = to_axes(v); },
               [](const C& c) { return join(c.doublet.axes); }});
  k.push_back(number_key("doublet.amplitude", [](C& c) -> double& { return c.doublet.spec.amplitude; }));
  k.push_back(number_key("doublet.pulse_width", [](C& c) -> double& { return c.doublet.spec.pulse_width; }));
  k.push_back(number_key("doublet.t_start", [](C& c) -> double& { return c.doublet.spec.t_start; }));
  k.push_back(number_key("doublet.t_trim_pre", [](C& c) -> double& { return c.doublet.spec.t_trim_pre; }));
  k.push_back(number_key("doublet.t_trim_post", [](C& c) -> double& { return c.doublet.spec.t_trim_post; }));

  k.push_back(number_key("spectral.overlap", [](C& c) -> double& { return c.spectral.overlap; }));
  k.push_back({"spectral.detrend",
               [](C& c, const std::string& v) {
                 if (v == "mean") c.spectral.detrend = Detrend::Mean;
                 else if (v == "linear") c.spectral.detrend = Detrend::Linear;
                 else throw std::invalid_argument("expects mean or linear");
               },
               [](const C& c) { return std::string(c.spectral.detrend == Detrend::Mean ? "mean" : "linear"); }});
  k.push_back({"spectral.n_points", [](C& c, const std::string& v) { c.spectral.n_points = to_u64(v); },
               [](const C& c) { return std::to_string(c.spectral.n_points); }});
  k.push_back(number_key("spectral.f_start", [](C& c) -> double& { return c.spectral.f_start; }));
  k.push_back(number_key("spectral.f_end", [](C& c) -> double& { return c.spectral.f_end; }));
  k.push_back(bool_key("spectral.zoh_input", [](C& c) -> bool& { return c.spectral.zoh_input; }));
  k.push_back(bool_key("spectral.include_pads", [](C& c) -> bool& { return c.spectral.include_pads; }));

  k.push_back(number_key("conditioning.max_input_coherence",
                         [](C& c) -> double& { return c.conditioning.max_input_coherence; }));
  k.push_back(number_key("conditioning.max_condition", [](C& c) -> double& { return c.conditioning.max_condition; }));

  k.push_back({"composite.window_lengths",
               [](C& c, const std::string& v) { c.composite.window_lengths = to_doubles(v); },
               [](const C& c) { return join(c.composite.window_lengths); }});
  k.push_back(number_key("composite.min_coherence", [](C& c) -> double& { return c.composite.min_coherence; }));
  k.push_back(number_key("composite.min_cycles", [](C& c) -> double& { return c.composite.min_cycles; }));

  k.push_back({"ssid.free", [](C& c, const std::string& v) { c.ssid.free = words(v); },
               [](const C& c) { return join(c.ssid.free); }});
  k.push_back({"ssid.initial",
               [](C& c, const std::string& v) {
                 c.ssid.initial.clear();
                 for (const auto& w : words(v)) {
                   auto eq = w.find('=');
                   if (eq == std::string::npos) throw std::invalid_argument("expects name=value pairs");
                   c.ssid.initial[w.substr(0, eq)] = to_double(w.substr(eq + 1));
                 }
               },
               [](const C& c) {
                 std::vector<std::string> w;
                 for (const auto& [n, x] : c.ssid.initial) w.push_back(n + "=" + format_double(x));
                 return join(w);
               }});
  k.push_back(number_key("ssid.initial_scale", [](C& c) -> double& { return c.ssid.initial_scale; }));
  k.push_back(optional_matrix_key("ssid.F", [](C& c) -> std::optional<Matrix>& { return c.ssid.F; }));
  k.push_back(optional_matrix_key("ssid.G", [](C& c) -> std::optional<Matrix>& { return c.ssid.G; }));
  k.push_back(number_key("ssid.W_g", [](C& c) -> double& { return c.ssid.weights.W_g; }));
  k.push_back(number_key("ssid.W_p", [](C& c) -> double& { return c.ssid.weights.W_p; }));
  k.push_back(number_key("ssid.coherence_floor", [](C& c) -> double& { return c.ssid.weights.coherence_floor; }));
  k.push_back({"ssid.max_iterations",
               [](C& c, const std::string& v) { c.ssid.options.max_iterations = static_cast<int>(to_u64(v)); },
               [](const C& c) { return std::to_string(c.ssid.options.max_iterations); }});
  k.push_back(number_key("ssid.step_tolerance", [](C& c) -> double& { return c.ssid.options.step_tolerance; }));
  k.push_back(number_key("ssid.cost_tolerance", [](C& c) -> double& { return c.ssid.options.cost_tolerance; }));
  k.push_back({"ssid.multistart",
               [](C& c, const std::string& v) { c.ssid.options.multistart = static_cast<int>(to_u64(v)); },
               [](const C& c) { return std::to_string(c.ssid.options.multistart); }});
  k.push_back(number_key("ssid.omega_lo", [](C& c) -> double& { return c.ssid.omega_lo; }));
  k.push_back(number_key("ssid.omega_hi", [](C& c) -> double& { return c.ssid.omega_hi; }));

  k.push_back(number_key("verify.tail", [](C& c) -> double& { return c.verify.tail; }));
  k.push_back(number_key("verify.bias_span", [](C& c) -> double& { return c.verify.bias_span; }));
  return k;
}

const std::vector<Key>& keys() {
  static const std::vector<Key> k = build_keys();
  return k;
}

std::string section_of(const std::string& key) { return key.substr(0, key.find('.')); }

}  // namespace

std::string format_matrix(const Matrix& m) {
  std::string s;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) s += "; ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += (j ? " " : "") + format_double(m(i, j));
  }
  return s;
}

Matrix parse_matrix(const std::string& text) {
  try {
    return matrix_value(text);
  } catch (const std::invalid_argument& e) {
    fail(ErrorKind::Config, std::string("matrix ") + e.what());
  }
}

SweepSchedule SweepSection::for_axis(Axis a) const {
  SweepSchedule s = schedule;
  auto it = overrides.find(a);
  if (it == overrides.end()) return s;
  for (const auto& [key, v] : it->second) {
    if (key == "C2") s.C2 = v;
    else *sweep_field(s, key) = v;
  }
  return s;
}

LinearPlantModel PipelineConfig::lateral_model() const {
  LinearPlantModel base = plant.lateral_preset == "paper" ? paper_lateral_model() : inband_lateral_model();
  Matrix F = plant.lateral_F.value_or(base.F());
  Matrix G = plant.lateral_G.value_or(base.G());
  std::vector<double> tau = plant.lateral_tau.empty() ? base.tau() : plant.lateral_tau;
  const auto& lab = base.labels();
  if (F.rows() != base.n_states() || G.cols() != base.n_inputs())
    fail(ErrorKind::Config, "plant.lateral_F / lateral_G must keep the states (P R Ay) and inputs (aileron rudder)");
  return LinearPlantModel(base.M(), F, G, base.H(), base.J(), tau, lab);
}

HoverPlantConfig PipelineConfig::plant_config() const {
  HoverPlantConfig p;
  p.lateral = lateral_model();
  p.dt = plant.dt;
  if (plant.sensor_noise == "realistic") p.sensor_noise = realistic_sensor_noise();
  p.seed = seed;
  return p;
}

FlightTestSetup PipelineConfig::setup() const {
  FlightTestSetup s;
  s.plant = plant_config();
  s.autopilot = autopilot;
  s.setpoint = setpoint;
  s.limits = safety;
  return s;
}

SpectralConfig PipelineConfig::spectral_config(double window_length) const {
  SpectralConfig c;
  c.window_length = window_length;
  c.overlap = spectral.overlap;
  c.detrend = spectral.detrend;
  c.zoh_input = spectral.zoh_input;
  c.grid = FrequencyGrid::for_band(sweep.schedule.omega_min, sweep.schedule.omega_max, plant.dt, spectral.n_points);
  if (spectral.f_start > 0) c.grid.f_start = spectral.f_start;
  if (spectral.f_end > 0) c.grid.f_end = spectral.f_end;
  return c;
}

ModelStructure PipelineConfig::model_structure() const {
  const LinearPlantModel truth = lateral_model();
  Matrix F = ssid.F.value_or(truth.F());
  Matrix G = ssid.G.value_or(truth.G());
  if (F.rows() != truth.n_states() || F.cols() != truth.n_states() || G.rows() != truth.n_states() ||
      G.cols() != truth.n_inputs())
    fail(ErrorKind::Config, "ssid.F / ssid.G dimensions do not match the lateral block");
  LinearPlantModel base(truth.M(), F, G, truth.H(), truth.J(), std::vector<double>(truth.tau().size(), 0.0),
                        truth.labels());
  std::vector<EntryRef> free;
  for (const auto& n : ssid.free) free.push_back(EntryRef::parse(n));
  ModelStructure s(base, free);
  for (const auto& [n, v] : ssid.initial)
    if (std::find(ssid.free.begin(), ssid.free.end(), n) == ssid.free.end())
      fail(ErrorKind::Config, "ssid.initial names '" + n + "', which is not a free entry");
  Eigen::VectorXd x0 = s.initial();
  for (std::size_t i = 0; i < ssid.free.size(); ++i) {
    auto it = ssid.initial.find(ssid.free[i]);
    x0[static_cast<Eigen::Index>(i)] =
        it != ssid.initial.end() ? it->second : ssid.initial_scale * x0[static_cast<Eigen::Index>(i)];
  }
  return s.with_initial(x0);
}

void PipelineConfig::validate() const {
  auto section = [](const char* name, const std::function<void()>& check) {
    try {
      check();
    } catch (const Error& e) {
      fail(ErrorKind::Config, std::string(name) + ": " + e.what());
    }
  };
  section("plant", [&] {
    if (!(plant.dt > 0)) fail(ErrorKind::Config, "dt must be positive");
    plant_config().validate();
  });
  section("autopilot", [&] { autopilot.validate(); });
  section("safety", [&] {
    safety.validate();
    if (!(setpoint.h > safety.h_min && setpoint.h < safety.h_max))
      fail(ErrorKind::Config, "setpoint.h must lie inside the altitude limits");
  });
  section("sweep", [&] {
    if (sweep.axes.empty()) fail(ErrorKind::Config, "no sweep axes");
    for (Axis a : kAllAxes) sweep.for_axis(a).validate();
  });
  section("doublet", [&] {
    if (doublet.axes.empty()) fail(ErrorKind::Config, "no doublet axes");
    doublet.spec.validate();
  });
  section("spectral", [&] {
    if (spectral.n_points < 2) fail(ErrorKind::Config, "n_points must be at least 2");
    for (double T : composite.window_lengths) spectral_config(T).validate(sweep.schedule.T_rec);
  });
  section("conditioning", [&] {
    if (!(conditioning.max_input_coherence > 0 && conditioning.max_input_coherence <= 1))
      fail(ErrorKind::Config, "max_input_coherence must be in (0, 1]");
    if (!(conditioning.max_condition >= 1)) fail(ErrorKind::Config, "max_condition must be at least 1");
  });
  section("composite", [&] { composite.validate(); });
  section("ssid", [&] {
    (void)model_structure();
    if (!(ssid.omega_lo < ssid.omega_hi)) fail(ErrorKind::Config, "omega_lo must be below omega_hi");
    if (!(ssid.weights.W_g >= 0 && ssid.weights.W_p >= 0 && ssid.weights.W_g + ssid.weights.W_p > 0))
      fail(ErrorKind::Config, "weights must be non-negative and not both zero");
    if (ssid.options.max_iterations < 1 || ssid.options.multistart < 1)
      fail(ErrorKind::Config, "max_iterations and multistart must be positive");
    if (!(ssid.options.step_tolerance > 0 && ssid.options.cost_tolerance > 0))
      fail(ErrorKind::Config, "tolerances must be positive");
  });
  section("verify", [&] {
    if (!(verify.tail >= 0 && verify.bias_span >= 0)) fail(ErrorKind::Config, "tail and bias_span must be >= 0");
    if (verify.bias_span > doublet.spec.t_trim_pre)
      fail(ErrorKind::Config, "bias_span must fit inside doublet.t_trim_pre");
  });
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;
  std::map<std::string, int> last_line;  // section -> last line that set one of its keys
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto where = [&](int n) { return "config line " + std::to_string(n) + ": "; };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Config, where(lineno) + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (auto it = seen.find(key); it != seen.end())
      fail(ErrorKind::Config, where(lineno) + "'" + key + "' already set on line " + std::to_string(it->second));
    seen[key] = lineno;
    try {
      auto k = std::find_if(keys().begin(), keys().end(), [&](const Key& x) { return x.name == key; });
      if (k != keys().end()) {
        k->set(cfg, value);
      } else if (key.rfind("sweep.", 0) == 0 && std::count(key.begin(), key.end(), '.') == 2) {
        const auto dot = key.find('.', 6);
        auto axis = parse_axis(key.substr(6, dot - 6));
        const std::string field = key.substr(dot + 1);
        if (!axis || std::find(kSweepKeys.begin(), kSweepKeys.end(), field) == kSweepKeys.end())
          fail(ErrorKind::Config, where(lineno) + "unknown key '" + key + "'");
        cfg.sweep.overrides[*axis][field] = to_double(value);
      } else {
        fail(ErrorKind::Config, where(lineno) + "unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      fail(ErrorKind::Config, where(lineno) + "'" + key + "' " + e.what() + ", got '" + value + "'");
    } catch (const Error& e) {
      if (std::string(e.what()).rfind("config line", 0) == 0) throw;
      fail(ErrorKind::Config, where(lineno) + "'" + key + "': " + e.what());
    }
    last_line[section_of(key)] = lineno;
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    const std::string msg = e.what();
    const std::string sec = msg.substr(0, msg.find(':'));
    // setpoint keys are checked with the safety section
    int n = std::max(last_line[sec], sec == "safety" ? last_line["setpoint"] : 0);
    if (sec == "verify") n = std::max(n, last_line["doublet"]);
    if (sec == "spectral") n = std::max({n, last_line["composite"], last_line["sweep"]});
    if (sec == "ssid") n = std::max(n, last_line["plant"]);
    if (n > 0) fail(ErrorKind::Config, where(n) + msg);
    fail(ErrorKind::Config, "config: " + msg);
  }
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Config, "cannot open config " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const PipelineConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& k : keys()) {
    const std::string sec = section_of(k.name);
    if (sec != section) {
      if (!section.empty()) out += "\n";
      section = sec;
    }
    out += k.name + " = " + k.get(cfg) + "\n";
    if (k.name == "sweep.fade_time") {
      for (const auto& [axis, fields] : cfg.sweep.overrides)
        for (const auto& [field, v] : fields)
          out += "sweep." + std::string(axis_name(axis)) + "." + field + " = " + format_double(v) + "\n";
    }
  }
  return out;
}

}  // namespace rotorid
