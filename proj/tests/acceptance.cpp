// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "rotorid/composite.hpp"
#include "rotorid/conditioning.hpp"
#include "rotorid/config.hpp"
#include "rotorid/flighttest.hpp"
#include "rotorid/io.hpp"
#include "rotorid/pipeline.hpp"
#include "rotorid/spectral.hpp"
#include "rotorid/ssid.hpp"
#include "rotorid/verify.hpp"
#include "support.hpp"

using namespace rotorid;
using rotorid::testing::db;
using rotorid::testing::phase_error_deg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("rotorid_acc_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> data_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name == "manifest.txt" || name == "summary.txt" || name == "log.txt") continue;
    out[name] = slurp(e.path());
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k)
    w[k] = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 1));
  return w;
}

SpectralConfig band_config(double window, double wmin, double wmax, std::size_t n) {
  SpectralConfig c;
  c.window_length = window;
  c.zoh_input = true;
  c.grid = FrequencyGrid{wmin / (2 * M_PI), wmax / (2 * M_PI), n};
  return c;
}

// 1
Outcome sweep_correctness() {
  SweepSchedule s;
  bool ok = sweep_frequency(0.0, s) == s.omega_min && sweep_frequency(s.T_rec, s) == s.omega_max;
  std::mt19937_64 rng(2024);
  const double h = 1e-5 * s.T_rec;
  std::uniform_real_distribution<double> u(h, s.T_rec - h);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double t = u(rng);
    const double fd = (sweep_phase(t + h, s) - sweep_phase(t - h, s)) / (2 * h);
    worst = std::max(worst, std::abs(fd / sweep_frequency(t, s) - 1.0));
  }
  ok = ok && worst <= 1e-6;
  return {ok, "endpoints exact, worst dtheta/dt rel err " + num(worst)};
}

// 2
Outcome chirp_z_dft() {
  double worst = 0.0;
  for (std::size_t n : {16u, 64u, 257u}) {
    auto w = rotorid::testing::white(2 * n, n);
    std::vector<Complex> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = {w[2 * i], w[2 * i + 1]};
    auto X = chirp_z(x, {0.0, 2 * M_PI / static_cast<double>(n)}, n);
    double err = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      Complex d = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        d += x[i] * std::polar(1.0, -2 * M_PI * static_cast<double>((k * i) % n) / static_cast<double>(n));
      err = std::max(err, std::abs(X[k] - d));
      norm = std::max(norm, std::abs(d));
    }
    worst = std::max(worst, err / norm);
  }
  return {worst <= 1e-9, "worst rel err " + num(worst) + " over N = 16, 64, 257"};
}

// 3
Outcome siso_fidelity() {
  SweepSchedule s;
  const double dt = 0.02;
  auto u = sweep_samples(s, dt, 3);
  auto m = LinearPlantModel::with_full_state_output(Matrix::Constant(1, 1, -2.0), Matrix::Constant(1, 1, 2.0), {"y"},
                                                    {"u"});
  std::vector<double> y(u.size());
  Vector x = Vector::Zero(1);
  for (std::size_t k = 0; k < u.size(); ++k) {
    y[k] = x[0];
    x = rk4_step(m, x, Vector::Constant(1, u[k]), dt);
  }
  // swept band only; the input carries no power outside it
  auto cfg = band_config(20.0, s.omega_min, s.omega_max, 100);
  auto h = frf_siso(u, y, dt, cfg);
  auto mp = mag_phase(h);
  double worst_db = 0.0, worst_deg = 0.0, min_coh = 1.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double w = h.freq[k];
    const Complex truth = 2.0 / Complex(2.0, w);
    if (w >= 2 * s.omega_min && w <= s.omega_max / 2) min_coh = std::min(min_coh, h.coherence[k]);
    if (!h.valid[k] || h.coherence[k] <= 0.95) continue;
    ++used;
    worst_db = std::max(worst_db, std::abs(mp.mag_db[k] - db(truth)));
    worst_deg = std::max(worst_deg, std::abs(mp.phase_deg[k] - std::arg(truth) * 180 / M_PI));
  }
  const bool ok = worst_db <= 0.5 && worst_deg <= 5.0 && min_coh >= 0.95 && used > 0;
  return {ok, "max err " + num(worst_db) + " dB / " + num(worst_deg) + " deg over " + std::to_string(used) +
                  " points; min in-band coherence " + num(min_coh)};
}

// 4
Outcome safety_supervision() {
  FlightTestSetup setup;
  SweepSchedule s;
  auto normal = run_sweep(setup, Axis::Lateral, s, 1);
  setup.limits.phi_max = 0.001;
  auto tight = run_sweep(setup, Axis::Lateral, s, 1);
  const bool ok = normal.status.completed && !tight.status.completed && tight.status.recovered;
  return {ok, std::string("default limits ") + (normal.status.completed ? "completed" : "aborted") +
                  "; phi_max 0.001 aborted at t = " + num(tight.status.t_abort) + " s, " +
                  (tight.status.recovered ? "recovered" : "not recovered")};
}

// 5
Outcome miso_conditioning() {
  rotorid::testing::TwoInputOracle o;
  const double wlo = 0.3, whi = 10.0;
  auto cfg = band_config(40.0, wlo, whi, 60);
  std::vector<MisoRecord> rec{{{o.x1, o.x2}, o.y}};
  auto s = spectral_matrix(rec, o.dt, cfg, {"x1", "x2"}, "y");
  auto h = conditioned_frf(s);
  auto naive = frf_siso(o.x1, o.y, o.dt, cfg);
  double worst_db = 0.0, worst_deg = 0.0, naive_bias = 0.0;
  bool all_valid = true;
  for (std::size_t k = 0; k < s.freq.size(); ++k) {
    const double w = s.freq[k];
    const Complex t[2] = {o.h1(w), o.h2(w)};
    for (int i = 0; i < 2; ++i) {
      all_valid = all_valid && h[i].valid[k];
      worst_db = std::max(worst_db, std::abs(db(h[i].response[k]) - db(t[i])));
      worst_deg = std::max(worst_deg, phase_error_deg(h[i].response[k], t[i]));
    }
    naive_bias = std::max(naive_bias, std::abs(db(naive.response[k]) - db(t[0])));
  }
  const bool ok = all_valid && worst_db <= 1.0 && worst_deg <= 10.0 && naive_bias >= 3.0;
  return {ok, "conditioned max err " + num(worst_db) + " dB / " + num(worst_deg) + " deg; naive SISO bias " +
                  num(naive_bias) + " dB"};
}

struct PipelineRun {
  PipelineConfig cfg;
  fs::path dir;
};

// Runs every stage in-process on the shipped config.
PipelineRun run_default_pipeline() {
  PipelineRun r{load_config(ROTORID_DEFAULT_CONFIG), scratch("pipeline")};
  run_stage(Stage::Pipeline, r.cfg, r.dir.string());
  return r;
}

// 6
Outcome composite_benefit(const PipelineRun& run) {
  const auto truth = run.cfg.lateral_model();
  const auto& cc = run.cfg.composite;
  const double wlo = run.cfg.sweep.schedule.omega_min, whi = run.cfg.sweep.schedule.omega_max;
  const auto inputs = miso_inputs(run.cfg);
  const auto outputs = truth.labels().outputs;
  bool convex = true;
  bool better = true;
  std::string worst_pair;
  double worst_margin = -1e300;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    for (std::size_t o = 0; o < outputs.size(); ++o) {
      const std::string stem = "misosa_" + inputs[i] + "_" + outputs[o] + "_w";
      std::vector<FrequencyResponse> windows;
      for (double T : cc.window_lengths)
        windows.push_back(read_frf_csv(slurp(run.dir / (stem + window_tag(T) + ".csv")), stem));
      auto comp = read_frf_csv(slurp(run.dir / ("composite_" + inputs[i] + "_" + outputs[o] + ".csv")), "composite");
      const auto grid = comp.freq;
      auto analytic = model_frf(truth, grid);

      std::vector<FrequencyResponse> on_grid;
      for (const auto& w : windows) on_grid.push_back(interpolate_to_grid(w, grid));
      std::vector<MagPhase> mp;
      for (const auto& g : on_grid) mp.push_back(mag_phase(g));
      auto cmp = mag_phase(comp);

      // each window is scored against the composite on the in-band points both cover
      std::vector<double> win_err(windows.size(), 0.0), comp_err(windows.size(), 0.0);
      std::vector<std::size_t> n(windows.size(), 0);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double ref_db = db(analytic[k](static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)));
        const bool in_band = grid[k] >= wlo && grid[k] <= whi;
        double lo = 1e300, hi = -1e300;
        for (std::size_t w = 0; w < windows.size(); ++w) {
          const bool cycles = grid[k] >= 2 * M_PI * cc.min_cycles / windows[w].window_length;
          if (!mp[w].valid[k] || on_grid[w].coherence[k] < cc.min_coherence || !cycles) continue;
          lo = std::min(lo, mp[w].mag_db[k]);
          hi = std::max(hi, mp[w].mag_db[k]);
          if (in_band && comp.valid[k]) {
            win_err[w] += std::abs(mp[w].mag_db[k] - ref_db);
            comp_err[w] += std::abs(cmp.mag_db[k] - ref_db);
            ++n[w];
          }
        }
        if (comp.valid[k] && (cmp.mag_db[k] < lo - 1e-9 || cmp.mag_db[k] > hi + 1e-9)) convex = false;
      }
      for (std::size_t w = 0; w < windows.size(); ++w) {
        if (n[w] == 0) continue;
        const double c = comp_err[w] / static_cast<double>(n[w]), b = win_err[w] / static_cast<double>(n[w]);
        if (c - b > worst_margin) {
          worst_margin = c - b;
          worst_pair = inputs[i] + "->" + outputs[o] + " vs " + window_tag(windows[w].window_length) + " s window: composite " +
                       num(c) + " dB, window " + num(b) + " dB over " + std::to_string(n[w]) + " points";
        }
        if (c > b) better = false;
      }
    }
  return {convex && better,
          std::string(convex ? "inside envelope" : "outside envelope") + "; tightest pair " + worst_pair};
}

// 7
Outcome analytic_round_trip() {
  auto truth = paper_lateral_model();
  std::vector<EntryRef> free;
  for (const char* n : {"F11", "F13", "F22", "F31", "F33", "G11", "G22", "G31"}) free.push_back(EntryRef::parse(n));
  ModelStructure s(truth, free);
  auto data = synthesize_dataset(truth, log_grid(0.1, 30.0, 60));
  auto r = fit(s.with_initial(s.initial() * 1.5), data);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < r.params.size(); ++i)
    worst = std::max(worst, std::abs(r.params[i] / s.initial()[i] - 1.0));
  return {worst <= 1e-3 && r.cost < 0.1, "max rel err " + num(worst) + ", J = " + num(r.cost)};
}

struct Recovered {
  LinearPlantModel model;
  double cost;
};

Recovered recovered_model(const PipelineRun& run) {
  auto s = run.cfg.model_structure();
  auto model = model_from_fit_csv(s, slurp(run.dir / "fit_params.csv"));
  const auto text = slurp(run.dir / "fit_report.txt");
  const auto at = text.find("cost J = ");
  double cost = std::numeric_limits<double>::infinity();
  if (at != std::string::npos) cost = std::stod(text.substr(at + 9));
  return {model, cost};
}

// 8
Outcome end_to_end(const PipelineRun& run) {
  auto rec = recovered_model(run);
  const auto truth = run.cfg.lateral_model();
  auto s = run.cfg.model_structure();
  double worst = 0.0;
  std::string which;
  for (const auto& e : s.free_entries()) {
    const Matrix& T = e.matrix == ModelMatrix::F ? truth.F() : truth.G();
    const Matrix& R = e.matrix == ModelMatrix::F ? rec.model.F() : rec.model.G();
    const double err = std::abs(R(e.row, e.col) / T(e.row, e.col) - 1.0);
    if (err > worst) {
      worst = err;
      which = e.name();
    }
  }
  return {worst <= 0.05 && rec.cost < 50.0, "max rel err " + num(100 * worst) + "% (" + which + "), J = " + num(rec.cost)};
}

// 9
Outcome verification(const PipelineRun& run) {
  auto rec = recovered_model(run);
  const auto truth = run.cfg.lateral_model();
  LinearPlantModel wrong(truth.M(), 2.0 * truth.F(), truth.G(), truth.H(), truth.J(), truth.tau(), truth.labels());
  const auto rows = read_experiments_csv(slurp(run.dir / "doublets.csv"), "doublets.csv");
  double fit_tic = 0.0, truth_tic = 0.0, wrong_tic = 0.0;
  bool present = !rows.empty();
  for (const auto& row : rows) {
    auto log = read_time_history_file((run.dir / row.file).string());
    auto a = verify_model(rec.model, log, row.record_begin, row.record_end, run.cfg.verify);
    auto b = verify_model(truth, log, row.record_begin, row.record_end, run.cfg.verify);
    auto c = verify_model(wrong, log, row.record_begin, row.record_end, run.cfg.verify);
    present = present && a.all_present;
    fit_tic = std::max(fit_tic, a.max_tic);
    truth_tic = std::max(truth_tic, b.max_tic);
    wrong_tic = std::max(wrong_tic, c.max_tic);
  }
  const bool ok = present && fit_tic < 0.05 && truth_tic < 1e-6 && wrong_tic > 0.2;
  return {ok, "fitted max TIC " + num(fit_tic) + ", truth " + num(truth_tic) + ", F x2 " + num(wrong_tic)};
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(ROTORID_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 10
Outcome determinism() {
  auto a = scratch("det_a"), b = scratch("det_b");
  const std::string cfg = std::string("--config ") + ROTORID_DEFAULT_CONFIG + " --seed 7 --out ";
  const int ea = run_cli(cfg + a.string(), a / "log.txt");
  const int eb = run_cli(cfg + b.string(), b / "log.txt");
  auto fa = data_files(a), fb = data_files(b);
  const bool ok = ea == 0 && eb == 0 && !fa.empty() && fa == fb;
  fs::remove_all(a);
  fs::remove_all(b);
  return {ok, std::to_string(fa.size()) + " data files compared, exit codes " + std::to_string(ea) + "/" +
                  std::to_string(eb)};
}

// 11
Outcome spectral_coverage() {
  auto cfg = load_config(ROTORID_DEFAULT_CONFIG);
  auto setup = cfg.setup();
  double worst = 1e300;
  std::string which;
  for (Axis axis : kAllAxes) {
    const auto sched = cfg.sweep.for_axis(axis);
    auto r = run_sweep(setup, axis, sched, experiment_seed(cfg.seed, axis, "sweep"));
    if (!r.status.completed) return {false, std::string(axis_name(axis)) + " sweep did not complete"};
    // whole flown channel, spectral defaults (20 s Hann, 50% overlap)
    auto in = r.history[std::string(control_channel(axis))];
    std::vector<double> rec(in.begin(), in.end());
    SpectralConfig sc;
    sc.grid = FrequencyGrid{sched.omega_min / (2 * M_PI), sched.omega_max / (2 * M_PI), 100};
    auto s = cross_spectrum(rec, rec, setup.plant.dt, sc);
    auto sorted = s.Gxx;
    std::sort(sorted.begin(), sorted.end());
    const double ratio = 10.0 * std::log10(sorted.front() / sorted[sorted.size() / 2]);
    if (ratio < worst) {
      worst = ratio;
      which = std::string(axis_name(axis));
    }
  }
  return {worst >= -20.0, "worst min/median " + num(worst) + " dB (" + which + ")"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  std::optional<PipelineRun> pipeline;
  auto with_pipeline = [&](auto f) {
    return [&, f] {
      if (!pipeline) pipeline = run_default_pipeline();
      return f(*pipeline);
    };
  };
  const std::vector<Criterion> criteria = {
      {1, "sweep correctness", 1.0, sweep_correctness},
      {2, "chirp-z equals DFT", 1.0, chirp_z_dft},
      {3, "SISO FRF fidelity", 10.0, siso_fidelity},
      {4, "safety supervision", 30.0, safety_supervision},
      {5, "MISO conditioning", 10.0, miso_conditioning},
      {6, "composite convexity and benefit", 10.0, with_pipeline(composite_benefit)},
      {7, "analytic round trip", 60.0, analytic_round_trip},
      {8, "end-to-end round trip", 300.0, with_pipeline(end_to_end)},
      {9, "time-domain verification", 30.0, with_pipeline(verification)},
      {10, "determinism", 600.0, determinism},
      {11, "sweep spectral coverage", 60.0, spectral_coverage},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs <= c.budget_s;
    if (!pass) ++failed;
    std::printf("%s %2d %-32s %s [%.2f s / %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.budget_s);
  }
  if (pipeline) fs::remove_all(pipeline->dir);
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
