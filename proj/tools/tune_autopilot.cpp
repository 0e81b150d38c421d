// Coordinate search over cascade PID gains. The objective is the worst time to
// settle back into hover from the corners of the safety envelope, taken over the
// flight-identified lateral block and the in-band test plant. Prints the result
// as config lines.
#include <cmath>
#include <iostream>
#include <limits>

#include <CLI11.hpp>

#include "rotorid/config.hpp"
#include "rotorid/error.hpp"

using namespace rotorid;

namespace {

double objective(const AutopilotConfig& gains, const PipelineConfig& base) {
  double worst = 0.0, total = 0.0;
  for (const char* preset : {"paper", "inband"}) {
    PipelineConfig c = base;
    c.plant.lateral_preset = preset;
    c.autopilot = gains;
    const FlightTestSetup setup = c.setup();
    const double t = worst_recovery_time(setup);
    worst = std::max(worst, t);
    total += t;
    // Single-axis offsets so each loop's settling shows up in the objective.
    for (double sign : {-1.0, 1.0}) {
      RigidState roll = RigidState::zero(setup.plant, setup.setpoint.h);
      roll.phi = sign * 0.999 * setup.limits.phi_max;
      RigidState pitch = RigidState::zero(setup.plant, setup.setpoint.h);
      pitch.theta = sign * 0.999 * setup.limits.theta_max;
      RigidState yaw = RigidState::zero(setup.plant, setup.setpoint.h);
      yaw.lateral[1] = sign * 0.999 * setup.limits.r_max;
      for (const RigidState& x0 : {roll, pitch, yaw}) total += hover_recovery_time(setup, x0);
    }
  }
  // Worst case dominates; the sum breaks ties.
  return worst + 0.05 * total;
}

std::vector<double*> tunables(AutopilotConfig& a) {
  std::vector<double*> p;
  for (Axis axis : kAllAxes) {
    CascadeGains& g = a.loop(axis);
    for (double* x : {&g.outer.kp, &g.outer.ki, &g.inner.kp, &g.inner.ki}) p.push_back(x);
  }
  return p;
}

void print_gains(const AutopilotConfig& a) {
  const std::pair<const char*, Axis> loops[] = {
      {"roll", Axis::Lateral}, {"pitch", Axis::Longitudinal}, {"yaw", Axis::Pedal}, {"altitude", Axis::Collective}};
  for (auto [name, axis] : loops)
    for (auto [stage, g] : {std::pair{"outer", a.loop(axis).outer}, std::pair{"inner", a.loop(axis).inner}}) {
      const std::string p = std::string("autopilot.") + name + "_" + stage;
      std::cout << p << "_kp = " << format_double(g.kp) << "\n"
                << p << "_ki = " << format_double(g.ki) << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tune hover autopilot gains by simulation"};
  std::string config_path;
  int rounds = 6;
  double span = 4.0;
  app.add_option("--config", config_path, "Config providing limits, setpoint and starting gains");
  app.add_option("--rounds", rounds, "Coordinate-search rounds");
  app.add_option("--span", span, "Each gain stays within [start / span, start * span]");
  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig base = config_path.empty() ? parse_config("") : load_config(config_path);
    AutopilotConfig best = base.autopilot;
    AutopilotConfig start = best;
    double f_best = objective(best, base);
    std::cerr << "start: worst recovery " << f_best << " s\n";
    double step = 1.5;
    for (int r = 0; r < rounds; ++r) {
      bool improved = false;
      const std::size_t n = tunables(best).size();
      for (std::size_t i = 0; i < n; ++i) {
        for (double factor : {step, 1.0 / step}) {
          AutopilotConfig trial = best;
          *tunables(trial)[i] *= factor;
          const double ratio = *tunables(trial)[i] / *tunables(start)[i];
          if (ratio > span * (1 + 1e-12) || ratio < 1.0 / span * (1 - 1e-12)) continue;
          try {
            trial.validate();
          } catch (const Error&) {
            continue;
          }
          const double f = objective(trial, base);
          if (f < f_best) {
            best = trial;
            f_best = f;
            improved = true;
            break;
          }
        }
      }
      std::cerr << "round " << r + 1 << ": worst recovery " << f_best << " s\n";
      if (!improved) step = std::sqrt(step);
    }
    print_gains(best);
    return std::isfinite(f_best) ? 0 : 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  }
}
