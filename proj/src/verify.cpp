#include "rotorid/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rotorid/error.hpp"

namespace rotorid {

TimeHistory predict(const LinearPlantModel& model, const TimeHistory& recorded,
                    const std::vector<std::string>& input_channels) {
  const auto& names = input_channels.empty() ? model.labels().inputs : input_channels;
  if (static_cast<Eigen::Index>(names.size()) != model.n_inputs())
    fail(ErrorKind::Config, "predict: " + std::to_string(names.size()) + " input channels for a model with " +
                                std::to_string(model.n_inputs()) + " inputs");
  if (!(recorded.dt() > 0)) fail(ErrorKind::Data, "predict: recorded log has no sample interval");
  std::vector<std::span<const double>> u;
  for (const auto& n : names) {
    if (!recorded.has(n)) fail(ErrorKind::Data, "predict: recorded log lacks input channel '" + n + "'");
    u.push_back(recorded[n]);
  }
  const double dt = recorded.dt();
  std::vector<std::size_t> delay;
  for (double t : model.tau()) delay.push_back(static_cast<std::size_t>(std::lround(t / dt)));

  const std::size_t n = recorded.size();
  std::vector<std::vector<double>> y(static_cast<std::size_t>(model.n_outputs()), std::vector<double>(n));
  Vector x = Vector::Zero(model.n_states());
  Vector uk(model.n_inputs());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < u.size(); ++i) uk[static_cast<Eigen::Index>(i)] = k >= delay[i] ? u[i][k - delay[i]] : 0.0;
    Vector yk = model.output(x, uk);
    for (Eigen::Index j = 0; j < yk.size(); ++j) y[static_cast<std::size_t>(j)][k] = yk[j];
    x = rk4_step(model, x, uk, dt);
    if (!x.allFinite()) fail(ErrorKind::Numerical, "predict: state not finite at sample " + std::to_string(k));
  }
  TimeHistory out(dt, recorded.t0());
  for (std::size_t j = 0; j < y.size(); ++j) out.add(model.labels().outputs[j], "", std::move(y[j]));
  return out;
}

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    fail(ErrorKind::Data, "series lengths differ or are empty (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
}

struct Window {
  std::size_t begin, end, bias_begin;
};

Window scoring_window(const TimeHistory& log, std::size_t record_begin, std::size_t record_end,
                      const VerifyOptions& opt) {
  if (record_begin >= record_end || record_end > log.size())
    fail(ErrorKind::Data, "verify: record range outside the log");
  const double dt = log.dt();
  auto bias_n = static_cast<std::size_t>(std::lround(opt.bias_span / dt));
  auto tail_n = static_cast<std::size_t>(std::lround(opt.tail / dt));
  Window w;
  w.begin = record_begin;
  w.end = std::min(log.size(), record_end + tail_n);
  w.bias_begin = record_begin > bias_n ? record_begin - bias_n : 0;
  return w;
}

double pad_mean(std::span<const double> s, const Window& w) {
  if (w.bias_begin >= w.begin) return 0.0;
  double m = 0.0;
  for (std::size_t k = w.bias_begin; k < w.begin; ++k) m += s[k];
  return m / static_cast<double>(w.begin - w.bias_begin);
}

// Log restricted to the window with input channels bias-corrected.
TimeHistory perturbation_inputs(const LinearPlantModel& model, const TimeHistory& log, const Window& w) {
  TimeHistory in(log.dt(), log.time(w.begin));
  for (const auto& n : model.labels().inputs) {
    if (!log.has(n)) fail(ErrorKind::Data, "verify: log lacks input channel '" + n + "'");
    auto s = log[n];
    double b = pad_mean(s, w);
    std::vector<double> v(s.begin() + static_cast<std::ptrdiff_t>(w.begin), s.begin() + static_cast<std::ptrdiff_t>(w.end));
    for (double& x : v) x -= b;
    in.add(n, "", std::move(v));
  }
  return in;
}

std::vector<double> measured_window(const TimeHistory& log, const std::string& ch, const Window& w) {
  auto s = log[ch];
  double b = pad_mean(s, w);
  std::vector<double> v(s.begin() + static_cast<std::ptrdiff_t>(w.begin), s.begin() + static_cast<std::ptrdiff_t>(w.end));
  for (double& x : v) x -= b;
  return v;
}

}  // namespace

double tic(std::span<const double> y, std::span<const double> yh) {
  check_lengths(y, yh);
  double num = 0.0, ny = 0.0, nh = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    num += (y[k] - yh[k]) * (y[k] - yh[k]);
    ny += y[k] * y[k];
    nh += yh[k] * yh[k];
  }
  if (ny == 0.0 && nh == 0.0) fail(ErrorKind::Data, "TIC undefined: both series are identically zero");
  return std::sqrt(num) / (std::sqrt(ny) + std::sqrt(nh));
}

double rms_error(std::span<const double> y, std::span<const double> yh) {
  check_lengths(y, yh);
  double s = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) s += (y[k] - yh[k]) * (y[k] - yh[k]);
  return std::sqrt(s / static_cast<double>(y.size()));
}

VerificationReport verify_model(const LinearPlantModel& model, const TimeHistory& log, std::size_t record_begin,
                                std::size_t record_end, const VerifyOptions& opt) {
  const Window w = scoring_window(log, record_begin, record_end, opt);
  const TimeHistory pred = predict(model, perturbation_inputs(model, log, w));
  VerificationReport r;
  r.window_begin = log.time(w.begin);
  r.window_end = log.time(w.end - 1);
  r.all_present = true;
  for (const auto& ch : model.labels().outputs) {
    ChannelScore c;
    c.channel = ch;
    c.present = log.has(ch);
    if (c.present) {
      auto y = measured_window(log, ch, w);
      auto yh = pred[ch];
      c.rms_error = rms_error(y, yh);
      double both = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k) {
        c.peak_error = std::max(c.peak_error, std::abs(y[k] - yh[k]));
        both += std::abs(y[k]) + std::abs(yh[k]);
      }
      c.tic = both > 0.0 ? tic(y, yh) : 0.0;
      r.max_tic = std::max(r.max_tic, c.tic);
    } else {
      r.all_present = false;
    }
    r.channels.push_back(std::move(c));
  }
  return r;
}

VerificationReport verify_model(const LinearPlantModel& model, const ExperimentResult& doublet,
                                const VerifyOptions& opt) {
  if (!doublet.status.completed) fail(ErrorKind::Data, "verify: doublet experiment did not complete");
  return verify_model(model, doublet.history, doublet.record_begin, doublet.record_end, opt);
}

std::string verification_text(const VerificationReport& r) {
  std::ostringstream o;
  o << "window " << format_double(r.window_begin) << " s to " << format_double(r.window_end) << " s\n";
  for (const auto& c : r.channels) {
    if (!c.present) {
      o << "  " << c.channel << ": missing from log\n";
      continue;
    }
    o << "  " << c.channel << ": rms " << format_double(c.rms_error) << ", tic " << format_double(c.tic)
      << ", peak " << format_double(c.peak_error) << "\n";
  }
  o << "max tic " << format_double(r.max_tic) << "\n";
  o << "all channels present " << (r.all_present ? "yes" : "no") << "\n";
  return o.str();
}

std::string verification_csv(const VerificationReport& r) {
  std::string s = "channel,present,rms_error,tic,peak_error\n";
  for (const auto& c : r.channels)
    s += c.channel + "," + (c.present ? "1" : "0") + "," + format_double(c.rms_error) + "," + format_double(c.tic) +
         "," + format_double(c.peak_error) + "\n";
  return s;
}

std::string overlay_csv(const LinearPlantModel& model, const TimeHistory& log, std::size_t record_begin,
                        std::size_t record_end, const std::string& channel, const VerifyOptions& opt) {
  const Window w = scoring_window(log, record_begin, record_end, opt);
  if (!log.has(channel)) fail(ErrorKind::Data, "overlay: log lacks channel '" + channel + "'");
  const TimeHistory pred = predict(model, perturbation_inputs(model, log, w));
  if (!pred.has(channel)) fail(ErrorKind::Data, "overlay: model has no output '" + channel + "'");
  auto y = measured_window(log, channel, w);
  auto yh = pred[channel];
  std::string s = "t,measured,predicted\n";
  for (std::size_t k = 0; k < y.size(); ++k)
    s += format_double(log.time(w.begin + k)) + "," + format_double(y[k]) + "," + format_double(yh[k]) + "\n";
  return s;
}

}  // namespace rotorid
