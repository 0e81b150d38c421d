#include "rotorid/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "rotorid/error.hpp"
#include "rotorid/io.hpp"

namespace rotorid {

namespace fs = std::filesystem;

namespace {

constexpr std::pair<Stage, std::string_view> kStages[] = {
    {Stage::Simulate, "simulate"}, {Stage::Sweep, "sweep"},       {Stage::Frespid, "frespid"},
    {Stage::Misosa, "misosa"},     {Stage::Composite, "composite"}, {Stage::Derivid, "derivid"},
    {Stage::Verify, "verify"},     {Stage::Pipeline, "pipeline"}};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double field_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    fail(ErrorKind::Data, where + ": bad number '" + s + "'");
  return v;
}

std::size_t field_size(const std::string& s, const std::string& where) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    fail(ErrorKind::Data, where + ": bad count '" + s + "'");
  return v;
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string require_file(const std::string& dir, const std::string& name, std::string_view stage) {
  std::string p = path_in(dir, name);
  if (!fs::exists(p))
    fail(ErrorKind::Data, "missing input " + p + " (run the " + std::string(stage) + " stage first)");
  return p;
}

Axis axis_of_control(const std::string& channel) {
  for (Axis a : kAllAxes)
    if (control_channel(a) == channel) return a;
  fail(ErrorKind::Config, "'" + channel + "' is not a control channel");
}

std::string frf_file(std::string_view prefix, const std::string& in, const std::string& out, double window) {
  return std::string(prefix) + "_" + in + "_" + out + "_w" + window_tag(window) + ".csv";
}

std::string composite_file(const std::string& in, const std::string& out) {
  return "composite_" + in + "_" + out + ".csv";
}

std::vector<std::string> lateral_outputs(const PipelineConfig& cfg) { return cfg.lateral_model().labels().outputs; }

// Slice analysed by the spectral stages.
TimeHistory analysis_record(const PipelineConfig& cfg, const TimeHistory& log, const ExperimentRow& row) {
  if (cfg.spectral.include_pads) return log;
  return log.slice(row.record_begin, row.record_end);
}

struct SweepData {
  ExperimentRow row;
  TimeHistory log;
};

std::vector<SweepData> load_sweeps(const PipelineConfig& cfg, const std::string& dir, std::string_view stage) {
  const auto rows = read_experiments_csv(read_text(require_file(dir, "sweeps.csv", "sweep")), "sweeps.csv");
  std::vector<SweepData> out;
  for (Axis a : cfg.sweep.axes) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const ExperimentRow& r) { return r.axis == a; });
    if (it == rows.end())
      fail(ErrorKind::Data, "sweeps.csv has no " + std::string(axis_name(a)) + " sweep (run the sweep stage first)");
    TimeHistory log = read_time_history_file(require_file(dir, it->file, "sweep"));
    if (it->record_end > log.size() || it->record_begin >= it->record_end)
      fail(ErrorKind::Data, it->file + ": record range outside the log");
    out.push_back({*it, std::move(log)});
  }
  (void)stage;
  return out;
}

std::vector<ExperimentRow> run_experiments(const PipelineConfig& cfg, const std::string& dir, const std::vector<Axis>& axes,
                                           std::string_view kind) {
  std::vector<ExperimentRow> rows;
  for (Axis a : axes) {
    FlightTestSetup setup = cfg.setup();
    setup.plant.seed = experiment_seed(cfg.seed, a, std::string(kind) + "-sensor");
    ExperimentResult r = kind == "sweep"
                             ? run_sweep(setup, a, cfg.sweep.for_axis(a), experiment_seed(cfg.seed, a, kind))
                             : run_doublet(setup, a, cfg.doublet.spec);
    ExperimentRow row;
    row.file = experiment_file_name(cfg.case_name, a, kind);
    row.axis = a;
    row.kind = std::string(kind);
    row.status = r.status;
    row.record_begin = r.record_begin;
    row.record_end = r.record_end;
    write_time_history_file(r.history, path_in(dir, row.file));
    rows.push_back(row);
  }
  write_text_atomic(path_in(dir, std::string(kind) + "s.csv"), experiments_csv(rows));
  for (const auto& r : rows)
    if (!r.status.completed && !r.status.recovered)
      fail(ErrorKind::Safety, std::string(axis_name(r.axis)) + " " + r.kind + " aborted (" +
                                  std::string(violation_name(*r.status.violation)) + ") at t = " +
                                  format_double(r.status.t_abort) + " s and did not recover");
  return rows;
}

void stage_simulate(const PipelineConfig& cfg, const std::string& dir) {
  run_experiments(cfg, dir, cfg.doublet.axes, "doublet");
}

void stage_sweep(const PipelineConfig& cfg, const std::string& dir) {
  auto rows = run_experiments(cfg, dir, cfg.sweep.axes, "sweep");
  std::string csv = "axis,t,input\n";
  for (const auto& r : rows) {
    TimeHistory log = read_time_history_file(path_in(dir, r.file));
    auto u = log[control_channel(r.axis)];
    for (std::size_t k = r.record_begin; k < r.record_end; ++k)
      csv += std::string(axis_name(r.axis)) + "," + format_double(log.time(k)) + "," + format_double(u[k]) + "\n";
  }
  write_text_atomic(path_in(dir, "sweep_input.csv"), csv);
}

void stage_frespid(const PipelineConfig& cfg, const std::string& dir) {
  const auto sweeps = load_sweeps(cfg, dir, "frespid");
  const HoverPlantConfig plant = cfg.plant_config();
  const double longest = *std::max_element(cfg.composite.window_lengths.begin(), cfg.composite.window_lengths.end());
  std::vector<std::vector<double>> auto_cols;
  std::vector<double> auto_freq;
  std::string auto_header = "freq_rad_s";
  for (const auto& s : sweeps) {
    const TimeHistory rec = analysis_record(cfg, s.log, s.row);
    const std::string in(control_channel(s.row.axis));
    for (const auto& out : block_outputs(plant, s.row.axis)) {
      for (double T : cfg.composite.window_lengths) {
        SpectralConfig sc = cfg.spectral_config(T);
        sc.validate(rec.duration());
        FrequencyResponse h = frf_siso(rec[in], rec[out], rec.dt(), sc, in, out);
        write_text_atomic(path_in(dir, frf_file("frespid", in, out, T)), frf_csv(h));
      }
    }
    SpectralConfig sc = cfg.spectral_config(longest);
    CrossSpectra xs = cross_spectrum(rec[in], rec[in], rec.dt(), sc);
    auto_freq = xs.freq;
    std::vector<double> db;
    for (double g : xs.Gxx) db.push_back(10.0 * std::log10(std::max(g, 1e-300)));
    auto_cols.push_back(std::move(db));
    auto_header += "," + in + "_db";
  }
  std::string csv = auto_header + "\n";
  for (std::size_t k = 0; k < auto_freq.size(); ++k) {
    csv += format_double(auto_freq[k]);
    for (const auto& c : auto_cols) csv += "," + format_double(c[k]);
    csv += "\n";
  }
  write_text_atomic(path_in(dir, "autospectrum.csv"), csv);
}

void stage_misosa(const PipelineConfig& cfg, const std::string& dir) {
  const auto sweeps = load_sweeps(cfg, dir, "misosa");
  const std::vector<std::string> inputs = miso_inputs(cfg);
  std::vector<TimeHistory> recs;
  for (const auto& s : sweeps)
    if (std::find(inputs.begin(), inputs.end(), std::string(control_channel(s.row.axis))) != inputs.end())
      recs.push_back(analysis_record(cfg, s.log, s.row));
  if (recs.empty()) fail(ErrorKind::Data, "no sweep excites the lateral block (sweep lateral and/or pedal)");
  const double dt = recs.front().dt();
  for (const auto& out : lateral_outputs(cfg)) {
    std::vector<MisoRecord> records;
    for (const auto& r : recs) {
      MisoRecord m;
      for (const auto& in : inputs) m.inputs.push_back(r[in]);
      m.output = r[out];
      records.push_back(m);
    }
    for (double T : cfg.composite.window_lengths) {
      SpectralConfig sc = cfg.spectral_config(T);
      sc.validate(recs.front().duration());
      const SpectralMatrixSet S = spectral_matrix(records, dt, sc, inputs, out);
      const auto H = conditioned_frf(S, cfg.conditioning);
      for (const auto& h : H) write_text_atomic(path_in(dir, frf_file("misosa", h.input, h.output, T)), frf_csv(h));
    }
  }
}

void stage_composite(const PipelineConfig& cfg, const std::string& dir) {
  const std::vector<std::string> inputs = miso_inputs(cfg);
  const auto outputs = cfg.lateral_model().labels().outputs;
  std::vector<FrequencyResponse> comps;
  for (const auto& out : outputs)
    for (const auto& in : inputs) {
      std::vector<FrequencyResponse> wins;
      for (double T : cfg.composite.window_lengths) {
        const std::string name = frf_file("misosa", in, out, T);
        wins.push_back(read_frf_csv(read_text(require_file(dir, name, "misosa")), name));
      }
      FrequencyResponse c = combine(wins, cfg.composite);
      write_text_atomic(path_in(dir, composite_file(in, out)), frf_csv(c));
      comps.push_back(std::move(c));
    }
  std::string mag = "freq_rad_s", ph = "freq_rad_s", coh = "freq_rad_s";
  for (const auto& c : comps) {
    const std::string col = "," + c.input + "_" + c.output;
    mag += col;
    ph += col;
    coh += col;
  }
  mag += "\n";
  ph += "\n";
  coh += "\n";
  std::vector<MagPhase> mp;
  for (const auto& c : comps) mp.push_back(mag_phase(c));
  for (std::size_t k = 0; k < comps.front().size(); ++k) {
    const std::string w = format_double(comps.front().freq[k]);
    mag += w;
    ph += w;
    coh += w;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const bool ok = comps[i].valid[k] && mp[i].valid[k];
      mag += "," + (ok ? format_double(mp[i].mag_db[k]) : std::string());
      ph += "," + (ok ? format_double(mp[i].phase_deg[k]) : std::string());
      coh += "," + format_double(comps[i].coherence[k]);
    }
    mag += "\n";
    ph += "\n";
    coh += "\n";
  }
  write_text_atomic(path_in(dir, "frf_mag.csv"), mag);
  write_text_atomic(path_in(dir, "frf_phase.csv"), ph);
  write_text_atomic(path_in(dir, "coherence.csv"), coh);
}

FrfDataset load_composites(const PipelineConfig& cfg, const std::string& dir) {
  FrfDataset d;
  for (const auto& out : lateral_outputs(cfg))
    for (const auto& in : miso_inputs(cfg)) {
      const std::string name = composite_file(in, out);
      FrfPair p;
      p.frf = read_frf_csv(read_text(require_file(dir, name, "composite")), name);
      p.omega_lo = cfg.ssid.omega_lo;
      p.omega_hi = cfg.ssid.omega_hi;
      d.pairs.push_back(std::move(p));
    }
  return d;
}

void stage_derivid(const PipelineConfig& cfg, const std::string& dir) {
  const FrfDataset data = load_composites(cfg, dir);
  const ModelStructure s = cfg.model_structure();
  FitOptions opt = cfg.ssid.options;
  opt.seed = experiment_seed(cfg.seed, Axis::Lateral, "fit");
  const FitReport rep = fit(s, data, cfg.ssid.weights, opt);
  std::string text = fit_report_text(s, rep);
  if (std::isfinite(rep.cost)) {
    const bool local = is_local_minimum(s, rep.params, data, cfg.ssid.weights);
    text += std::string("local minimum (+-1% per parameter) = ") + (local ? "yes" : "no") + "\n";
  }
  write_text_atomic(path_in(dir, "fit_report.txt"), text);
  write_text_atomic(path_in(dir, "fit_params.csv"), fit_report_csv(s, rep));
  if (!std::isfinite(rep.cost)) fail(ErrorKind::Numerical, "fit failed: " + rep.termination);
}

struct VerifyRun {
  Axis axis;
  VerificationReport report;
};

std::vector<VerifyRun> stage_verify(const PipelineConfig& cfg, const std::string& dir) {
  const ModelStructure s = cfg.model_structure();
  const LinearPlantModel model =
      model_from_fit_csv(s, read_text(require_file(dir, "fit_params.csv", "derivid")));
  const auto rows = read_experiments_csv(read_text(require_file(dir, "doublets.csv", "simulate")), "doublets.csv");
  std::vector<VerifyRun> runs;
  std::string text, csv = "axis,channel,present,rms_error,tic,peak_error\n";
  for (Axis a : cfg.doublet.axes) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const ExperimentRow& r) { return r.axis == a; });
    if (it == rows.end())
      fail(ErrorKind::Data, "doublets.csv has no " + std::string(axis_name(a)) + " doublet (run the simulate stage)");
    if (!it->status.completed)
      fail(ErrorKind::Data, std::string(axis_name(a)) + " doublet did not complete; nothing to verify against");
    const TimeHistory log = read_time_history_file(require_file(dir, it->file, "simulate"));
    VerificationReport r = verify_model(model, log, it->record_begin, it->record_end, cfg.verify);
    text += std::string(axis_name(a)) + " doublet\n" + verification_text(r);
    for (const auto& c : r.channels) {
      csv += std::string(axis_name(a)) + "," + c.channel + "," + (c.present ? "1" : "0") + "," +
             format_double(c.rms_error) + "," + format_double(c.tic) + "," + format_double(c.peak_error) + "\n";
      if (c.present)
        write_text_atomic(path_in(dir, "verify_overlay_" + std::string(axis_name(a)) + "_" + c.channel + ".csv"),
                          overlay_csv(model, log, it->record_begin, it->record_end, c.channel, cfg.verify));
    }
    runs.push_back({a, std::move(r)});
  }
  write_text_atomic(path_in(dir, "verify_report.txt"), text);
  write_text_atomic(path_in(dir, "verify_report.csv"), csv);
  return runs;
}

void write_summary(const PipelineConfig& cfg, const std::string& dir, const std::vector<VerifyRun>& runs) {
  const ModelStructure s = cfg.model_structure();
  const LinearPlantModel fitted = model_from_fit_csv(s, read_text(path_in(dir, "fit_params.csv")));
  const LinearPlantModel truth = cfg.lateral_model();
  const FrfDataset data = load_composites(cfg, dir);
  Eigen::VectorXd params(static_cast<Eigen::Index>(s.n_free()));
  std::ostringstream o;
  o << "case " << cfg.case_name << ", seed " << cfg.seed << "\n";
  o << "parameter,truth,fitted,relative_error\n";
  double worst = 0.0;
  for (std::size_t i = 0; i < s.n_free(); ++i) {
    const EntryRef& e = s.free_entries()[i];
    auto pick = [&](const LinearPlantModel& m) {
      switch (e.matrix) {
        case ModelMatrix::M: return m.M()(e.row, e.col);
        case ModelMatrix::F: return m.F()(e.row, e.col);
        case ModelMatrix::G: return m.G()(e.row, e.col);
        case ModelMatrix::H: return m.H()(e.row, e.col);
        case ModelMatrix::J: return m.J()(e.row, e.col);
        case ModelMatrix::Tau: break;
      }
      return m.tau()[static_cast<std::size_t>(e.col)];
    };
    const double t = pick(truth), f = pick(fitted);
    params[static_cast<Eigen::Index>(i)] = f;
    const double rel = t != 0.0 ? std::abs(f - t) / std::abs(t) : std::abs(f);
    worst = std::max(worst, rel);
    o << e.name() << "," << format_double(t) << "," << format_double(f) << "," << format_double(rel) << "\n";
  }
  o << "max relative parameter error = " << format_double(worst) << "\n";
  o << "fit cost J = " << format_double(cost(s, params, data, cfg.ssid.weights).total) << "\n";
  for (const auto& r : runs)
    o << axis_name(r.axis) << " doublet max tic = " << format_double(r.report.max_tic) << "\n";
  write_text_atomic(path_in(dir, "summary.txt"), o.str());
}

}  // namespace

std::optional<Stage> parse_stage(std::string_view name) {
  for (auto [s, n] : kStages)
    if (n == name) return s;
  return std::nullopt;
}

std::string_view stage_name(Stage s) {
  for (auto [st, n] : kStages)
    if (st == s) return n;
  return "?";
}

std::string window_tag(double window_length) { return format_double(window_length); }

std::uint64_t experiment_seed(std::uint64_t master, Axis axis, std::string_view kind) {
  // splitmix64 over (master, axis, kind)
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(axis) + 1);
  for (char c : kind) z = (z ^ static_cast<unsigned char>(c)) * 0x100000001B3ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::string> block_outputs(const HoverPlantConfig& plant, Axis axis) {
  switch (axis) {
    case Axis::Lateral:
    case Axis::Pedal: return plant.lateral.labels().outputs;
    case Axis::Longitudinal: return plant.longitudinal.labels().outputs;
    case Axis::Collective: break;
  }
  return plant.heave.labels().outputs;
}

std::vector<std::string> miso_inputs(const PipelineConfig& cfg) {
  std::vector<std::string> in = cfg.lateral_model().labels().inputs;
  for (const auto& c : in) (void)axis_of_control(c);
  return in;
}

std::string frf_csv(const FrequencyResponse& frf) {
  std::string s = "# input=" + frf.input + "\n# output=" + frf.output + "\n# window=" +
                  format_double(frf.window_length) + "\nfreq_rad_s,mag_db,phase_deg,coherence,n_d,valid,re,im\n";
  const MagPhase mp = mag_phase(frf);
  for (std::size_t k = 0; k < frf.size(); ++k) {
    const Complex z = frf.response[k];
    s += format_double(frf.freq[k]) + "," + (std::isfinite(mp.mag_db[k]) ? format_double(mp.mag_db[k]) : "") + "," +
         (std::isfinite(mp.phase_deg[k]) ? format_double(mp.phase_deg[k]) : "") + "," +
         format_double(frf.coherence[k]) + "," + format_double(frf.n_d[k]) + "," + (frf.valid[k] ? "1" : "0") + "," +
         format_double(z.real()) + "," + format_double(z.imag()) + "\n";
  }
  return s;
}

FrequencyResponse read_frf_csv(const std::string& text, const std::string& origin) {
  FrequencyResponse f;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  bool header = false;
  bool has_in = false, has_out = false;
  auto where = [&] { return origin + " line " + std::to_string(n); };
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(ErrorKind::Data, where() + ": bad header comment");
      const std::string key = line.substr(2, eq - 2), value = line.substr(eq + 1);
      if (key == "input") {
        f.input = value;
        has_in = true;
      } else if (key == "output") {
        f.output = value;
        has_out = true;
      } else if (key == "window") {
        f.window_length = field_double(value, where());
      } else {
        fail(ErrorKind::Data, where() + ": unknown header '" + key + "'");
      }
      continue;
    }
    if (!header) {
      if (line != "freq_rad_s,mag_db,phase_deg,coherence,n_d,valid,re,im")
        fail(ErrorKind::Data, where() + ": expected the FRF column header");
      header = true;
      continue;
    }
    const auto c = split(line, ',');
    if (c.size() != 8) fail(ErrorKind::Data, where() + ": expected 8 fields, got " + std::to_string(c.size()));
    const double w = field_double(c[0], where());
    if (!f.freq.empty() && !(w > f.freq.back())) fail(ErrorKind::Data, where() + ": frequencies not ascending");
    f.freq.push_back(w);
    f.response.emplace_back(field_double(c[6], where()), field_double(c[7], where()));
    const double g = field_double(c[3], where());
    if (g < 0.0 || g > 1.0) fail(ErrorKind::Data, where() + ": coherence outside [0, 1]");
    f.coherence.push_back(g);
    f.n_d.push_back(field_double(c[4], where()));
    if (c[5] != "0" && c[5] != "1") fail(ErrorKind::Data, where() + ": valid must be 0 or 1");
    f.valid.push_back(c[5] == "1");
  }
  if (!has_in || !has_out || !header) fail(ErrorKind::Data, origin + ": truncated FRF table (missing header)");
  if (f.freq.empty()) fail(ErrorKind::Data, origin + ": FRF table has no rows");
  return f;
}

std::string experiments_csv(const std::vector<ExperimentRow>& rows) {
  std::string s = "file,axis,kind,completed,t_abort,violation,recovered,record_begin,record_end\n";
  for (const auto& r : rows)
    s += r.file + "," + std::string(axis_name(r.axis)) + "," + r.kind + "," + (r.status.completed ? "1" : "0") + "," +
         format_double(r.status.t_abort) + "," +
         (r.status.violation ? std::string(violation_name(*r.status.violation)) : std::string("none")) + "," +
         (r.status.recovered ? "1" : "0") + "," + std::to_string(r.record_begin) + "," + std::to_string(r.record_end) +
         "\n";
  return s;
}

std::vector<ExperimentRow> read_experiments_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  std::vector<ExperimentRow> rows;
  bool header = false;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = origin + " line " + std::to_string(n);
    if (!header) {
      if (line != "file,axis,kind,completed,t_abort,violation,recovered,record_begin,record_end")
        fail(ErrorKind::Data, where + ": bad header");
      header = true;
      continue;
    }
    const auto c = split(line, ',');
    if (c.size() != 9) fail(ErrorKind::Data, where + ": expected 9 fields");
    ExperimentRow r;
    r.file = c[0];
    if (r.file.empty() || r.file.find('/') != std::string::npos) fail(ErrorKind::Data, where + ": bad file name");
    auto a = parse_axis(c[1]);
    if (!a) fail(ErrorKind::Data, where + ": unknown axis '" + c[1] + "'");
    r.axis = *a;
    r.kind = c[2];
    r.status.completed = c[3] == "1";
    r.status.t_abort = field_double(c[4], where);
    if (c[5] != "none") {
      for (Violation v : {Violation::Roll, Violation::Pitch, Violation::AltitudeLow, Violation::AltitudeHigh,
                          Violation::YawRate})
        if (violation_name(v) == c[5]) r.status.violation = v;
      if (!r.status.violation) fail(ErrorKind::Data, where + ": unknown violation '" + c[5] + "'");
    }
    r.status.recovered = c[6] == "1";
    r.record_begin = field_size(c[7], where);
    r.record_end = field_size(c[8], where);
    rows.push_back(r);
  }
  if (!header) fail(ErrorKind::Data, origin + ": empty table");
  return rows;
}

void run_stage(Stage stage, const PipelineConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  fs::create_directories(out_dir);
  switch (stage) {
    case Stage::Simulate: stage_simulate(cfg, out_dir); return;
    case Stage::Sweep: stage_sweep(cfg, out_dir); return;
    case Stage::Frespid: stage_frespid(cfg, out_dir); return;
    case Stage::Misosa: stage_misosa(cfg, out_dir); return;
    case Stage::Composite: stage_composite(cfg, out_dir); return;
    case Stage::Derivid: stage_derivid(cfg, out_dir); return;
    case Stage::Verify: stage_verify(cfg, out_dir); return;
    case Stage::Pipeline: break;
  }
  for (Stage s : {Stage::Simulate, Stage::Sweep, Stage::Frespid, Stage::Misosa, Stage::Composite, Stage::Derivid})
    run_stage(s, cfg, out_dir);
  write_summary(cfg, out_dir, stage_verify(cfg, out_dir));
}

}  // namespace rotorid
