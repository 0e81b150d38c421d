#include "rotorid/composite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rotorid/error.hpp"

namespace rotorid {

void CompositeConfig::validate() const {
  if (window_lengths.empty()) fail(ErrorKind::Config, "composite needs at least one window");
  for (double w : window_lengths)
    if (!(w > 0.0)) fail(ErrorKind::Config, "composite window lengths must be positive");
  for (std::size_t i = 1; i < target_grid.size(); ++i)
    if (!(target_grid[i] > target_grid[i - 1])) fail(ErrorKind::Config, "composite grid must ascend");
  if (!(min_coherence >= 0.0 && min_coherence <= 1.0))
    fail(ErrorKind::Config, "composite min_coherence must lie in [0, 1]");
  if (!(min_cycles >= 0.0)) fail(ErrorKind::Config, "composite min_cycles must be >= 0");
}

double random_error(double gamma2, double n_d) {
  if (!(gamma2 > 0.0)) return std::numeric_limits<double>::infinity();
  const double g2 = std::min(gamma2, 1.0);
  return std::sqrt(1.0 - g2) / (std::sqrt(g2) * std::sqrt(2.0 * n_d));
}

FrequencyResponse interpolate_to_grid(const FrequencyResponse& frf, const std::vector<double>& grid) {
  const MagPhase mp = mag_phase(frf);
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < frf.size(); ++k)
    if (mp.valid[k]) idx.push_back(k);

  FrequencyResponse out;
  out.freq = grid;
  out.response.assign(grid.size(), Complex{});
  out.coherence.assign(grid.size(), 0.0);
  out.n_d.assign(grid.size(), 0.0);
  out.valid.assign(grid.size(), 0);
  out.input = frf.input;
  out.output = frf.output;
  out.window_length = frf.window_length;
  if (idx.size() < 2) return out;

  const double lo = frf.freq[idx.front()], hi = frf.freq[idx.back()];
  std::size_t seg = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double w = grid[g];
    if (w < lo || w > hi) continue;
    while (seg + 2 < idx.size() && frf.freq[idx[seg + 1]] < w) ++seg;
    const std::size_t a = idx[seg], b = idx[seg + 1];
    const bool on_a = w == frf.freq[a], on_b = w == frf.freq[b];
    if (!on_a && !on_b && b != a + 1) continue;  // an invalid source point lies in between
    double t = 0.0;
    if (on_a) {
      t = 0.0;
    } else if (on_b) {
      t = 1.0;
    } else {
      t = (std::log(w) - std::log(frf.freq[a])) / (std::log(frf.freq[b]) - std::log(frf.freq[a]));
    }
    auto lerp = [t](double x, double y) { return t == 0.0 ? x : (t == 1.0 ? y : x + t * (y - x)); };
    const double db = lerp(mp.mag_db[a], mp.mag_db[b]);
    const double ph = lerp(mp.phase_deg[a], mp.phase_deg[b]);
    out.response[g] = std::polar(std::pow(10.0, db / 20.0), ph * std::numbers::pi / 180.0);
    out.coherence[g] = std::clamp(lerp(frf.coherence[a], frf.coherence[b]), 0.0, 1.0);
    out.n_d[g] = lerp(frf.n_d[a], frf.n_d[b]);
    out.valid[g] = 1;
  }
  return out;
}

FrequencyResponse combine(const std::vector<FrequencyResponse>& frfs, const CompositeConfig& cfg) {
  cfg.validate();
  if (frfs.empty()) fail(ErrorKind::Data, "combine: no frequency responses");
  const std::vector<double> grid = cfg.target_grid.empty() ? frfs.front().freq : cfg.target_grid;
  const std::size_t m = grid.size(), nw = frfs.size();

  std::vector<FrequencyResponse> on_grid;
  std::vector<MagPhase> mp;
  for (const auto& f : frfs) {
    on_grid.push_back(interpolate_to_grid(f, grid));
    auto& g = on_grid.back();
    if (cfg.min_cycles > 0.0 && f.window_length > 0.0) {
      const double w_floor = 2.0 * std::numbers::pi * cfg.min_cycles / f.window_length;
      for (std::size_t k = 0; k < m; ++k)
        if (grid[k] < w_floor) g.valid[k] = 0;
    }
    mp.push_back(mag_phase(g));
  }

  // Align phase branches to the longest window.
  std::size_t ref = 0;
  for (std::size_t w = 1; w < nw; ++w)
    if (on_grid[w].window_length > on_grid[ref].window_length) ref = w;
  for (std::size_t w = 0; w < nw; ++w) {
    if (w == ref) continue;
    for (std::size_t k = 0; k < m; ++k) {
      if (!mp[w].valid[k] || !mp[ref].valid[k]) continue;
      const double shift = 360.0 * std::round((mp[ref].phase_deg[k] - mp[w].phase_deg[k]) / 360.0);
      for (double& p : mp[w].phase_deg) p += shift;
      break;
    }
  }

  FrequencyResponse out;
  out.freq = grid;
  out.response.assign(m, Complex{});
  out.coherence.assign(m, 0.0);
  out.n_d.assign(m, 0.0);
  out.valid.assign(m, 0);
  out.input = frfs.front().input;
  out.output = frfs.front().output;
  out.window_length = 0.0;

  for (std::size_t k = 0; k < m; ++k) {
    std::vector<std::size_t> use;
    for (std::size_t w = 0; w < nw; ++w)
      if (mp[w].valid[k] && on_grid[w].coherence[k] >= cfg.min_coherence) use.push_back(w);
    if (use.empty()) continue;

    // A zero random error (coherence exactly 1) dominates; share equally among such windows.
    std::vector<double> weight(use.size());
    bool exact = false;
    for (std::size_t u = 0; u < use.size(); ++u)
      if (random_error(on_grid[use[u]].coherence[k], on_grid[use[u]].n_d[k]) == 0.0) exact = true;
    for (std::size_t u = 0; u < use.size(); ++u) {
      const double e = random_error(on_grid[use[u]].coherence[k], on_grid[use[u]].n_d[k]);
      weight[u] = exact ? (e == 0.0 ? 1.0 : 0.0) : 1.0 / (e * e);
    }
    double wsum = 0.0, db = 0.0, ph = 0.0, coh = 0.0, nd = 0.0;
    for (std::size_t u = 0; u < use.size(); ++u) {
      const std::size_t w = use[u];
      wsum += weight[u];
      db += weight[u] * mp[w].mag_db[k];
      ph += weight[u] * mp[w].phase_deg[k];
      coh += weight[u] * on_grid[w].coherence[k];
      nd += on_grid[w].n_d[k];
    }
    db /= wsum;
    ph /= wsum;
    coh /= wsum;
    // Keep the weighted means inside the contributor envelope despite rounding.
    double db_lo = std::numeric_limits<double>::infinity(), db_hi = -db_lo, ph_lo = db_lo, ph_hi = -db_lo,
           c_lo = db_lo, c_hi = -db_lo;
    for (std::size_t w : use) {
      db_lo = std::min(db_lo, mp[w].mag_db[k]);
      db_hi = std::max(db_hi, mp[w].mag_db[k]);
      ph_lo = std::min(ph_lo, mp[w].phase_deg[k]);
      ph_hi = std::max(ph_hi, mp[w].phase_deg[k]);
      c_lo = std::min(c_lo, on_grid[w].coherence[k]);
      c_hi = std::max(c_hi, on_grid[w].coherence[k]);
    }
    db = std::clamp(db, db_lo, db_hi);
    ph = std::clamp(ph, ph_lo, ph_hi);
    coh = std::clamp(coh, c_lo, c_hi);
    out.response[k] = std::polar(std::pow(10.0, db / 20.0), ph * std::numbers::pi / 180.0);
    out.coherence[k] = coh;
    out.n_d[k] = nd;
    out.valid[k] = 1;
  }
  return out;
}

}  // namespace rotorid
