#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rotorid {

struct Channel {
  std::string name;
  std::string unit;
  std::vector<double> samples;

  friend bool operator==(const Channel&, const Channel&) = default;
};

/// Uniformly sampled multi-channel record. Sample k sits at t0 + k * dt.
class TimeHistory {
 public:
  TimeHistory() = default;
  explicit TimeHistory(double dt, double t0 = 0.0);

  double dt() const { return dt_; }
  double t0() const { return t0_; }
  double time(std::size_t k) const { return t0_ + static_cast<double>(k) * dt_; }
  std::size_t size() const { return channels_.empty() ? 0 : channels_.front().samples.size(); }
  double duration() const { return static_cast<double>(size()) * dt_; }

  const std::vector<Channel>& channels() const { return channels_; }
  bool has(std::string_view name) const;
  std::span<const double> operator[](std::string_view name) const;
  std::vector<double>& mutable_samples(std::string_view name);

  /// Appends a channel; throws on duplicate name, length mismatch or NaN.
  void add(std::string name, std::string unit, std::vector<double> samples);

  /// Samples [first, last) of every channel; t0 shifts accordingly.
  TimeHistory slice(std::size_t first, std::size_t last) const;

  friend bool operator==(const TimeHistory&, const TimeHistory&) = default;

 private:
  const Channel* find(std::string_view name) const;

  double dt_ = 0.0;
  double t0_ = 0.0;
  std::vector<Channel> channels_;
};

// Text log format:
//   # dt=<seconds>
//   # channels: t(s) name(unit) ...
//   <t> <v1> <v2> ...
// Values use shortest round-trip decimal form, so write/read is lossless.
void write_time_history(const TimeHistory& history, std::ostream& out);
TimeHistory read_time_history(std::istream& in);

void write_time_history_file(const TimeHistory& history, const std::string& path);
TimeHistory read_time_history_file(const std::string& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace rotorid
