#include "rotorid/time_history.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "rotorid/error.hpp"
#include "rotorid/io.hpp"

namespace rotorid {

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& msg) {
  fail(ErrorKind::Data, "time history line " + std::to_string(line) + ": " + msg);
}

bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

TimeHistory::TimeHistory(double dt, double t0) : dt_(dt), t0_(t0) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::Data, "time history dt must be positive");
}

const Channel* TimeHistory::find(std::string_view name) const {
  for (const auto& c : channels_)
    if (c.name == name) return &c;
  return nullptr;
}

bool TimeHistory::has(std::string_view name) const { return find(name) != nullptr; }

std::span<const double> TimeHistory::operator[](std::string_view name) const {
  const Channel* c = find(name);
  if (!c) fail(ErrorKind::Data, "time history has no channel '" + std::string(name) + "'");
  return c->samples;
}

std::vector<double>& TimeHistory::mutable_samples(std::string_view name) {
  for (auto& c : channels_)
    if (c.name == name) return c.samples;
  fail(ErrorKind::Data, "time history has no channel '" + std::string(name) + "'");
}

void TimeHistory::add(std::string name, std::string unit, std::vector<double> samples) {
  if (name.empty() || name.find_first_of(" \t()") != std::string::npos)
    fail(ErrorKind::Data, "invalid channel name '" + name + "'");
  if (has(name)) fail(ErrorKind::Data, "duplicate channel '" + name + "'");
  if (!channels_.empty() && samples.size() != size())
    fail(ErrorKind::Data, "channel '" + name + "' length " + std::to_string(samples.size()) +
                              " != " + std::to_string(size()));
  for (std::size_t k = 0; k < samples.size(); ++k)
    if (std::isnan(samples[k]))
      fail(ErrorKind::Data, "channel '" + name + "' has NaN at sample " + std::to_string(k));
  channels_.push_back({std::move(name), std::move(unit), std::move(samples)});
}

TimeHistory TimeHistory::slice(std::size_t first, std::size_t last) const {
  if (first > last || last > size()) fail(ErrorKind::Data, "time history slice out of range");
  TimeHistory out(dt_, time(first));
  for (const auto& c : channels_)
    out.add(c.name, c.unit, std::vector<double>(c.samples.begin() + first, c.samples.begin() + last));
  return out;
}

void write_time_history(const TimeHistory& h, std::ostream& out) {
  out << "# dt=" << format_double(h.dt()) << '\n';
  out << "# channels: t(s)";
  for (const auto& c : h.channels()) out << ' ' << c.name << '(' << c.unit << ')';
  out << '\n';
  for (std::size_t k = 0; k < h.size(); ++k) {
    out << format_double(h.time(k));
    for (const auto& c : h.channels()) out << ' ' << format_double(c.samples[k]);
    out << '\n';
  }
}

TimeHistory read_time_history(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) parse_error(1, "empty file");
  ++lineno;
  if (line.rfind("# dt=", 0) != 0) parse_error(lineno, "expected '# dt=<seconds>' header");
  double dt = 0.0;
  {
    std::string_view v(line);
    v.remove_prefix(5);
    while (!v.empty() && (v.back() == '\r' || v.back() == ' ')) v.remove_suffix(1);
    if (!parse_double(v, dt) || !(dt > 0.0)) parse_error(lineno, "invalid dt");
  }

  if (!std::getline(in, line)) parse_error(2, "missing channel header");
  ++lineno;
  if (line.rfind("# channels:", 0) != 0) parse_error(lineno, "expected '# channels:' header");
  struct Col {
    std::string name, unit;
  };
  std::vector<Col> cols;
  for (auto tok : split_ws(std::string_view(line).substr(11))) {
    const auto open = tok.find('(');
    if (open == std::string_view::npos || tok.back() != ')' || open == 0)
      parse_error(lineno, "malformed channel spec '" + std::string(tok) + "'");
    cols.push_back({std::string(tok.substr(0, open)),
                    std::string(tok.substr(open + 1, tok.size() - open - 2))});
  }
  if (cols.size() < 2) parse_error(lineno, "file declares no data channels");
  if (cols.front().name != "t") parse_error(lineno, "first column must be t(s)");

  std::vector<std::vector<double>> data(cols.size());
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != cols.size())
      parse_error(lineno, "expected " + std::to_string(cols.size()) + " values, found " +
                              std::to_string(toks.size()));
    for (std::size_t i = 0; i < toks.size(); ++i) {
      double v = 0.0;
      if (!parse_double(toks[i], v) || std::isnan(v))
        parse_error(lineno, "invalid number '" + std::string(toks[i]) + "'");
      data[i].push_back(v);
    }
    const auto& t = data.front();
    const std::size_t k = t.size() - 1;
    if (k > 0 && !(t[k] > t[k - 1])) parse_error(lineno, "non-monotone time");
    const double expect = t.front() + static_cast<double>(k) * dt;
    if (std::abs(t[k] - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
      parse_error(lineno, "time does not match uniform dt");
  }
  if (data.front().empty()) parse_error(lineno, "no samples");

  TimeHistory h(dt, data.front().front());
  for (std::size_t i = 1; i < cols.size(); ++i) h.add(cols[i].name, cols[i].unit, std::move(data[i]));
  return h;
}

void write_time_history_file(const TimeHistory& history, const std::string& path) {
  std::ostringstream ss;
  write_time_history(history, ss);
  write_text_atomic(path, ss.str());
}

TimeHistory read_time_history_file(const std::string& path) {
  std::istringstream ss(read_text(path));
  try {
    return read_time_history(ss);
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

}  // namespace rotorid
