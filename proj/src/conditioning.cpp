#include "rotorid/conditioning.hpp"

#include <algorithm>
#include <cmath>

#include "rotorid/error.hpp"

namespace rotorid {

SpectralMatrixSet spectral_matrix(std::span<const MisoRecord> records, double dt, const SpectralConfig& cfg,
                                  std::vector<std::string> input_labels, std::string output_label) {
  if (records.empty()) fail(ErrorKind::Data, "spectral_matrix: no records");
  const std::size_t nu = input_labels.size();
  if (nu == 0) fail(ErrorKind::Data, "spectral_matrix: no inputs");
  const std::size_t m = cfg.grid.n_points;

  SpectralMatrixSet out;
  out.freq = cfg.grid.omega();
  out.Gxx.assign(m, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(nu)));
  out.Gxy.assign(m, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(nu)));
  out.Gyy.assign(m, 0.0);
  out.input_labels = std::move(input_labels);
  out.output_label = std::move(output_label);
  out.window_length = cfg.window_length;

  for (const MisoRecord& rec : records) {
    if (rec.inputs.size() != nu) fail(ErrorKind::Data, "spectral_matrix: record input count mismatch");
    for (const auto& in : rec.inputs)
      if (in.size() != rec.output.size()) fail(ErrorKind::Data, "spectral_matrix: series lengths differ");
    std::vector<std::vector<std::vector<Complex>>> X;
    for (const auto& in : rec.inputs) X.push_back(segment_transforms(in, dt, cfg, true));
    const auto Y = segment_transforms(rec.output, dt, cfg, false);
    const std::size_t n_seg = Y.size();
    for (std::size_t s = 0; s < n_seg; ++s)
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i < nu; ++i) {
          const Complex xi = std::conj(X[i][s][k]);
          for (std::size_t j = 0; j < nu; ++j)
            out.Gxx[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += xi * X[j][s][k];
          out.Gxy[k](static_cast<Eigen::Index>(i)) += xi * Y[s][k];
        }
        out.Gyy[k] += std::norm(Y[s][k]);
      }
    out.n_d += n_seg;
  }
  const double scale = density_scale(dt, cfg) / static_cast<double>(out.n_d);
  for (std::size_t k = 0; k < m; ++k) {
    out.Gxx[k] *= scale;
    // Exact Hermitian symmetry and a real diagonal.
    out.Gxx[k] = (0.5 * (out.Gxx[k] + out.Gxx[k].adjoint())).eval();
    for (Eigen::Index i = 0; i < out.Gxx[k].rows(); ++i) out.Gxx[k](i, i) = out.Gxx[k](i, i).real();
    out.Gxy[k] *= scale;
    out.Gyy[k] *= scale;
  }
  return out;
}

std::vector<double> input_coherence(const SpectralMatrixSet& s, std::size_t i, std::size_t j) {
  std::vector<double> out(s.freq.size(), 0.0);
  const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
  for (std::size_t k = 0; k < s.freq.size(); ++k) {
    const double d = s.Gxx[k](ii, ii).real() * s.Gxx[k](jj, jj).real();
    out[k] = d > 0.0 ? std::norm(s.Gxx[k](ii, jj)) / d : 0.0;
  }
  return out;
}

namespace {

/// Inputs carrying power at frequency k.
std::vector<Eigen::Index> active_inputs(const Eigen::MatrixXcd& G, const ConditioningOptions& opt) {
  double peak = 0.0;
  for (Eigen::Index i = 0; i < G.rows(); ++i) peak = std::max(peak, G(i, i).real());
  std::vector<Eigen::Index> act;
  if (!(peak > 0.0)) return act;
  for (Eigen::Index i = 0; i < G.rows(); ++i)
    if (G(i, i).real() > opt.absent_input_ratio * peak) act.push_back(i);
  return act;
}

bool well_conditioned(const Eigen::MatrixXcd& G, const ConditioningOptions& opt) {
  const Eigen::Index n = G.rows();
  if (n <= 1) return true;
  if (n == 2) {
    const double coh = std::norm(G(0, 1)) / (G(0, 0).real() * G(1, 1).real());
    return coh <= opt.max_input_coherence;
  }
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = 1.0 / std::sqrt(G(i, i).real());
  const Eigen::MatrixXcd norm = d.asDiagonal() * G * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(norm, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
  return lo > 0.0 && hi / lo <= opt.max_condition;
}

}  // namespace

std::vector<PartialCoherence> partial_coherence(const SpectralMatrixSet& s, const ConditioningOptions& opt) {
  const std::size_t nu = s.n_inputs(), m = s.freq.size();
  std::vector<PartialCoherence> out(nu);
  for (auto& p : out) {
    p.value.assign(m, 0.0);
    p.valid.assign(m, 0);
  }
  const auto n = static_cast<Eigen::Index>(nu + 1);
  for (std::size_t k = 0; k < m; ++k) {
    // Full (inputs + output) spectral matrix; output at index nu.
    Eigen::MatrixXcd S(n, n);
    S.topLeftCorner(n - 1, n - 1) = s.Gxx[k];
    S.topRightCorner(n - 1, 1) = s.Gxy[k];
    S.bottomLeftCorner(1, n - 1) = s.Gxy[k].adjoint();
    S(n - 1, n - 1) = s.Gyy[k];
    const auto act = active_inputs(s.Gxx[k], opt);

    for (std::size_t i = 0; i < nu; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      if (std::find(act.begin(), act.end(), ii) == act.end()) continue;
      Eigen::MatrixXcd C = S;
      bool ok = true;
      for (Eigen::Index c : act) {
        if (c == ii) continue;
        const double gcc = C(c, c).real();
        if (!(gcc > opt.min_conditioned_ratio * S(c, c).real()) || !(gcc > 0.0)) {
          ok = false;
          break;
        }
        const Eigen::MatrixXcd upd = C.col(c) * C.row(c) / gcc;
        C -= upd;
      }
      const double gii = C(ii, ii).real(), gyy = C(n - 1, n - 1).real();
      if (!ok || !(gii > opt.min_conditioned_ratio * S(ii, ii).real()) ||
          !(gyy > opt.min_conditioned_ratio * S(n - 1, n - 1).real()))
        continue;
      out[i].value[k] = std::clamp(std::norm(C(ii, n - 1)) / (gii * gyy), 0.0, 1.0);
      out[i].valid[k] = 1;
    }
  }
  return out;
}

std::vector<FrequencyResponse> conditioned_frf(const SpectralMatrixSet& s, const ConditioningOptions& opt) {
  const std::size_t nu = s.n_inputs(), m = s.freq.size();
  const auto pc = partial_coherence(s, opt);
  std::vector<FrequencyResponse> out(nu);
  for (std::size_t i = 0; i < nu; ++i) {
    auto& f = out[i];
    f.freq = s.freq;
    f.response.assign(m, Complex{});
    f.coherence.assign(m, 0.0);
    f.n_d.assign(m, static_cast<double>(s.n_d));
    f.valid.assign(m, 0);
    f.input = s.input_labels[i];
    f.output = s.output_label;
    f.window_length = s.window_length;
  }
  for (std::size_t k = 0; k < m; ++k) {
    const auto act = active_inputs(s.Gxx[k], opt);
    if (act.empty()) continue;
    const auto na = static_cast<Eigen::Index>(act.size());
    Eigen::MatrixXcd G(na, na);
    Eigen::VectorXcd g(na);
    for (Eigen::Index a = 0; a < na; ++a) {
      g[a] = s.Gxy[k][act[static_cast<std::size_t>(a)]];
      for (Eigen::Index b = 0; b < na; ++b)
        G(a, b) = s.Gxx[k](act[static_cast<std::size_t>(a)], act[static_cast<std::size_t>(b)]);
    }
    if (!well_conditioned(G, opt)) continue;
    const Eigen::VectorXcd H = G.fullPivLu().solve(g);
    if (!H.allFinite()) continue;
    for (Eigen::Index a = 0; a < na; ++a) {
      const auto i = static_cast<std::size_t>(act[static_cast<std::size_t>(a)]);
      if (!pc[i].valid[k]) continue;
      out[i].response[k] = H[a];
      out[i].coherence[k] = pc[i].value[k];
      out[i].valid[k] = 1;
    }
  }
  return out;
}

}  // namespace rotorid
