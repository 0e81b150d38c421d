#include "rotorid/ssid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "rotorid/error.hpp"

namespace rotorid {

namespace {

char matrix_letter(ModelMatrix m) {
  switch (m) {
    case ModelMatrix::M: return 'M';
    case ModelMatrix::F: return 'F';
    case ModelMatrix::G: return 'G';
    case ModelMatrix::H: return 'H';
    case ModelMatrix::J: return 'J';
    case ModelMatrix::Tau: return 't';
  }
  return '?';
}

struct Parts {
  Matrix M, F, G, H, J;
  std::vector<double> tau;
};

Parts parts_of(const LinearPlantModel& m) { return {m.M(), m.F(), m.G(), m.H(), m.J(), m.tau()}; }

double& entry(Parts& p, const EntryRef& e) {
  switch (e.matrix) {
    case ModelMatrix::M: return p.M(e.row, e.col);
    case ModelMatrix::F: return p.F(e.row, e.col);
    case ModelMatrix::G: return p.G(e.row, e.col);
    case ModelMatrix::H: return p.H(e.row, e.col);
    case ModelMatrix::J: return p.J(e.row, e.col);
    case ModelMatrix::Tau: return p.tau[static_cast<std::size_t>(e.col)];
  }
  fail(ErrorKind::Config, "bad model entry");
}

bool in_range(const Parts& p, const EntryRef& e) {
  auto ok = [&](const Matrix& m) { return e.row >= 0 && e.col >= 0 && e.row < m.rows() && e.col < m.cols(); };
  switch (e.matrix) {
    case ModelMatrix::M: return ok(p.M);
    case ModelMatrix::F: return ok(p.F);
    case ModelMatrix::G: return ok(p.G);
    case ModelMatrix::H: return ok(p.H);
    case ModelMatrix::J: return ok(p.J);
    case ModelMatrix::Tau: return e.row == 0 && e.col >= 0 && e.col < static_cast<Eigen::Index>(p.tau.size());
  }
  return false;
}

std::size_t index_of(const std::vector<std::string>& v, const std::string& s, const char* what) {
  auto it = std::find(v.begin(), v.end(), s);
  if (it == v.end()) fail(ErrorKind::Data, std::string("unknown ") + what + " channel '" + s + "'");
  return static_cast<std::size_t>(it - v.begin());
}

double mag_db(Complex z) { return 20.0 * std::log10(std::max(std::abs(z), 1e-300)); }
double phase_deg(Complex z) { return std::arg(z) * 180.0 / std::numbers::pi; }

// Points of one pair that enter the cost.
std::vector<std::size_t> usable_points(const FrfPair& p, double floor) {
  std::vector<std::size_t> idx;
  const auto& f = p.frf;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!f.valid[k] || f.coherence[k] < floor) continue;
    if (f.freq[k] < p.omega_lo || f.freq[k] > p.omega_hi) continue;
    if (!std::isfinite(std::abs(f.response[k])) || std::abs(f.response[k]) == 0.0) continue;
    idx.push_back(k);
  }
  return idx;
}

struct Prepared {
  std::vector<std::size_t> in, out;
  std::vector<std::vector<std::size_t>> points;
  std::vector<double> omega;                 // union of used frequencies, ascending
  std::vector<std::vector<std::size_t>> at;  // per pair, per point: index into omega
  std::size_t n_resid = 0;
};

Prepared prepare(const ModelStructure& s, const FrfDataset& data, const CostWeights& w) {
  if (data.pairs.empty()) fail(ErrorKind::Data, "frequency-response dataset has no pairs");
  const auto& lab = s.base().labels();
  Prepared p;
  for (const auto& pair : data.pairs) {
    p.in.push_back(index_of(lab.inputs, pair.frf.input, "input"));
    p.out.push_back(index_of(lab.outputs, pair.frf.output, "output"));
    auto pts = usable_points(pair, w.coherence_floor);
    if (pts.empty())
      fail(ErrorKind::Data, "pair " + pair.frf.input + "->" + pair.frf.output +
                                " has no valid point above the coherence floor");
    for (auto k : pts) p.omega.push_back(pair.frf.freq[k]);
    p.n_resid += 2 * pts.size();
    p.points.push_back(std::move(pts));
  }
  std::sort(p.omega.begin(), p.omega.end());
  p.omega.erase(std::unique(p.omega.begin(), p.omega.end()), p.omega.end());
  for (std::size_t i = 0; i < data.pairs.size(); ++i) {
    std::vector<std::size_t> a;
    for (auto k : p.points[i]) {
      double f = data.pairs[i].frf.freq[k];
      a.push_back(static_cast<std::size_t>(std::lower_bound(p.omega.begin(), p.omega.end(), f) - p.omega.begin()));
    }
    p.at.push_back(std::move(a));
  }
  return p;
}

// Residuals plus per-pair cost; returns false when the model response is singular.
Eigen::VectorXd residual_vector(const ModelStructure& s, const Eigen::VectorXd& params,
                                const FrfDataset& data, const CostWeights& w, const Prepared& p,
                                std::vector<double>* pair_cost) {
  const auto T = model_frf(s, params, p.omega);
  const double n_pairs = static_cast<double>(data.pairs.size());
  Eigen::VectorXd r(static_cast<Eigen::Index>(p.n_resid));
  Eigen::Index j = 0;
  if (pair_cost) pair_cost->assign(data.pairs.size(), 0.0);
  for (std::size_t i = 0; i < data.pairs.size(); ++i) {
    const auto& f = data.pairs[i].frf;
    const double n_w = static_cast<double>(p.points[i].size());
    const double scale = std::sqrt(20.0 / (n_w * n_pairs));
    double c = 0.0;
    for (std::size_t q = 0; q < p.points[i].size(); ++q) {
      const std::size_t k = p.points[i][q];
      const Complex model = T[p.at[i][q]](static_cast<Eigen::Index>(p.out[i]), static_cast<Eigen::Index>(p.in[i]));
      const double d_mag = mag_db(model) - mag_db(f.response[k]);
      const double d_ph = wrap_degrees(phase_deg(model) - phase_deg(f.response[k]));
      const double wc = coherence_weight(f.coherence[k]);
      r[j++] = scale * std::sqrt(wc * w.W_g) * d_mag;
      r[j++] = scale * std::sqrt(wc * w.W_p) * d_ph;
      c += wc * (w.W_g * d_mag * d_mag + w.W_p * d_ph * d_ph);
    }
    if (pair_cost) (*pair_cost)[i] = 20.0 / n_w * c;
  }
  return r;
}

double safe_cost(const ModelStructure& s, const Eigen::VectorXd& params, const FrfDataset& data,
                 const CostWeights& w, const Prepared& p, Eigen::VectorXd* r_out = nullptr) {
  try {
    Eigen::VectorXd r = residual_vector(s, params, data, w, p, nullptr);
    double c = r.squaredNorm();
    if (!std::isfinite(c)) return std::numeric_limits<double>::quiet_NaN();
    if (r_out) *r_out = std::move(r);
    return c;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Numerical) throw;
    return std::numeric_limits<double>::quiet_NaN();
  }
}

double fd_step(double x) { return 1.4901161193847656e-8 * std::max(std::abs(x), 1.0); }

Eigen::MatrixXd jacobian(const ModelStructure& s, const Eigen::VectorXd& params, const FrfDataset& data,
                         const CostWeights& w, const Prepared& p, const Eigen::VectorXd& r0, bool central) {
  Eigen::MatrixXd Jm(r0.size(), params.size());
  for (Eigen::Index c = 0; c < params.size(); ++c) {
    const double h = fd_step(params[c]);
    Eigen::VectorXd xp = params;
    xp[c] += h;
    Eigen::VectorXd rp = residual_vector(s, xp, data, w, p, nullptr);
    if (central) {
      Eigen::VectorXd xm = params;
      xm[c] -= h;
      Jm.col(c) = (rp - residual_vector(s, xm, data, w, p, nullptr)) / (2.0 * h);
    } else {
      Jm.col(c) = (rp - r0) / h;
    }
  }
  return Jm;
}

void project(Eigen::VectorXd& x, const FitOptions& opt) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    auto u = static_cast<std::size_t>(i);
    if (u < opt.lower.size()) x[i] = std::max(x[i], opt.lower[u]);
    if (u < opt.upper.size()) x[i] = std::min(x[i], opt.upper[u]);
  }
}

struct RunResult {
  Eigen::VectorXd x;
  double cost = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool converged = false;
  std::string reason;
};

constexpr double kZeroCost = 1e-20;

RunResult levenberg_marquardt(const ModelStructure& s, const FrfDataset& data, const CostWeights& w,
                              const Prepared& p, Eigen::VectorXd x, const FitOptions& opt) {
  RunResult res;
  project(x, opt);
  Eigen::VectorXd r;
  double c = safe_cost(s, x, data, w, p, &r);
  res.x = x;
  res.cost = c;
  if (!std::isfinite(c)) {
    res.reason = "cost not finite at the starting point";
    return res;
  }
  double lambda = 1e-3;
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (c <= kZeroCost) {
      res.converged = true;
      res.reason = "cost at zero";
      break;
    }
    res.iterations = it + 1;
    Eigen::MatrixXd Jm = jacobian(s, x, data, w, p, r, false);
    Eigen::MatrixXd A = Jm.transpose() * Jm;
    Eigen::VectorXd g = Jm.transpose() * r;
    Eigen::VectorXd d = A.diagonal().cwiseMax(1e-12 * std::max(A.diagonal().maxCoeff(), 1e-300));
    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd Ad = A;
      Ad.diagonal() += lambda * d;
      Eigen::VectorXd step = Ad.ldlt().solve(-g);
      Eigen::VectorXd xn = x + step;
      project(xn, opt);
      Eigen::VectorXd rn;
      double cn = safe_cost(s, xn, data, w, p, &rn);
      if (std::isfinite(cn) && cn < c) {
        const double rel_step = (xn - x).norm() / (x.norm() + opt.step_tolerance);
        const double rel_cost = (c - cn) / c;
        x = xn;
        r = std::move(rn);
        c = cn;
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        if (rel_step <= opt.step_tolerance && rel_cost <= opt.cost_tolerance) {
          res.converged = true;
          res.reason = "step and cost tolerances met";
        }
        break;
      }
      lambda *= 10.0;
    }
    if (res.converged) break;
    if (!accepted) {
      // No descent direction left at any damping: step and cost change are both nil.
      res.converged = true;
      res.reason = "no further decrease at maximum damping";
      break;
    }
  }
  if (!res.converged && res.reason.empty()) res.reason = "iteration limit reached";
  res.x = x;
  res.cost = c;
  return res;
}

}  // namespace

std::string EntryRef::name() const {
  if (matrix == ModelMatrix::Tau) return "tau" + std::to_string(col + 1);
  std::string s(1, matrix_letter(matrix));
  if (row < 9 && col < 9) return s + std::to_string(row + 1) + std::to_string(col + 1);
  return s + "(" + std::to_string(row + 1) + "," + std::to_string(col + 1) + ")";
}

EntryRef EntryRef::parse(const std::string& name) {
  auto bad = [&]() -> EntryRef { fail(ErrorKind::Config, "bad model entry name '" + name + "'"); };
  auto num = [&](std::string_view v) {
    long x = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size() || x < 1) bad();
    return static_cast<Eigen::Index>(x - 1);
  };
  if (name.rfind("tau", 0) == 0) return {ModelMatrix::Tau, 0, num(std::string_view(name).substr(3))};
  if (name.size() < 3) return bad();
  EntryRef e{};
  switch (name[0]) {
    case 'M': e.matrix = ModelMatrix::M; break;
    case 'F': e.matrix = ModelMatrix::F; break;
    case 'G': e.matrix = ModelMatrix::G; break;
    case 'H': e.matrix = ModelMatrix::H; break;
    case 'J': e.matrix = ModelMatrix::J; break;
    default: return bad();
  }
  std::string_view rest = std::string_view(name).substr(1);
  if (rest.front() == '(') {
    if (rest.back() != ')') return bad();
    rest = rest.substr(1, rest.size() - 2);
    auto comma = rest.find(',');
    if (comma == std::string_view::npos) return bad();
    e.row = num(rest.substr(0, comma));
    e.col = num(rest.substr(comma + 1));
  } else {
    if (rest.size() != 2) return bad();
    e.row = num(rest.substr(0, 1));
    e.col = num(rest.substr(1, 1));
  }
  return e;
}

ModelStructure::ModelStructure(const LinearPlantModel& base, std::vector<EntryRef> free)
    : base_(base), free_(std::move(free)) {
  if (free_.empty()) fail(ErrorKind::Config, "model structure has no free entry");
  Parts p = parts_of(base_);
  for (std::size_t i = 0; i < free_.size(); ++i) {
    if (!in_range(p, free_[i])) fail(ErrorKind::Config, "free entry " + free_[i].name() + " is outside the model");
    for (std::size_t j = 0; j < i; ++j)
      if (free_[j] == free_[i]) fail(ErrorKind::Config, "free entry " + free_[i].name() + " listed twice");
  }
}

std::vector<std::string> ModelStructure::parameter_names() const {
  std::vector<std::string> out;
  for (const auto& e : free_) out.push_back(e.name());
  return out;
}

Eigen::VectorXd ModelStructure::initial() const {
  Parts p = parts_of(base_);
  Eigen::VectorXd x(static_cast<Eigen::Index>(free_.size()));
  for (std::size_t i = 0; i < free_.size(); ++i) x[static_cast<Eigen::Index>(i)] = entry(p, free_[i]);
  return x;
}

bool ModelStructure::is_free(const EntryRef& e) const {
  return std::find(free_.begin(), free_.end(), e) != free_.end();
}

LinearPlantModel ModelStructure::extract_model(const Eigen::VectorXd& params) const {
  if (params.size() != static_cast<Eigen::Index>(free_.size()))
    fail(ErrorKind::Config, "parameter vector has " + std::to_string(params.size()) + " entries, structure has " +
                                std::to_string(free_.size()) + " free");
  Parts p = parts_of(base_);
  for (std::size_t i = 0; i < free_.size(); ++i) entry(p, free_[i]) = params[static_cast<Eigen::Index>(i)];
  return LinearPlantModel(p.M, p.F, p.G, p.H, p.J, p.tau, base_.labels());
}

ModelStructure ModelStructure::with_initial(const Eigen::VectorXd& params) const {
  return ModelStructure(extract_model(params), free_);
}

std::vector<Eigen::MatrixXcd> model_frf(const LinearPlantModel& m, const std::vector<double>& omega) {
  const Eigen::MatrixXcd Mc = m.M().cast<Complex>();
  const Eigen::MatrixXcd Fc = m.F().cast<Complex>();
  const Eigen::MatrixXcd Gc = m.G().cast<Complex>();
  const Eigen::MatrixXcd Hc = m.H().cast<Complex>();
  const Eigen::MatrixXcd Jc = m.J().cast<Complex>();
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(omega.size());
  for (double w : omega) {
    Eigen::MatrixXcd S = Complex(0.0, w) * Mc - Fc;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(S);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) {
      std::string ws = std::to_string(w);
      fail(ErrorKind::Numerical, "jwM - F is singular at w = " + ws + " rad/s");
    }
    Eigen::MatrixXcd T = Hc * lu.solve(Gc) + Jc;
    for (Eigen::Index u = 0; u < T.cols(); ++u) {
      double tau = m.tau()[static_cast<std::size_t>(u)];
      if (tau != 0.0) T.col(u) *= std::exp(Complex(0.0, -w * tau));
    }
    out.push_back(std::move(T));
  }
  return out;
}

std::vector<Eigen::MatrixXcd> model_frf(const ModelStructure& s, const Eigen::VectorXd& params,
                                        const std::vector<double>& omega) {
  return model_frf(s.extract_model(params), omega);
}

double coherence_weight(double gamma2) {
  double v = 1.58 * (1.0 - std::exp(-gamma2));
  return v * v;
}

CostResult cost(const ModelStructure& s, const Eigen::VectorXd& params, const FrfDataset& data,
                const CostWeights& w) {
  Prepared p = prepare(s, data, w);
  CostResult out;
  residual_vector(s, params, data, w, p, &out.per_pair);
  for (double c : out.per_pair) out.total += c;
  out.total /= static_cast<double>(data.pairs.size());
  return out;
}

Eigen::VectorXd residuals(const ModelStructure& s, const Eigen::VectorXd& params, const FrfDataset& data,
                          const CostWeights& w) {
  Prepared p = prepare(s, data, w);
  return residual_vector(s, params, data, w, p, nullptr);
}

Eigen::MatrixXd residual_jacobian(const ModelStructure& s, const Eigen::VectorXd& params,
                                  const FrfDataset& data, const CostWeights& w, bool central) {
  Prepared p = prepare(s, data, w);
  Eigen::VectorXd r0 = residual_vector(s, params, data, w, p, nullptr);
  return jacobian(s, params, data, w, p, r0, central);
}

FitReport fit(const ModelStructure& s, const FrfDataset& data, const CostWeights& w, const FitOptions& opt) {
  if (opt.max_iterations < 1 || opt.multistart < 1 || !(opt.step_tolerance > 0) || !(opt.cost_tolerance > 0))
    fail(ErrorKind::Config, "fit options: iterations, starts and tolerances must be positive");
  Prepared p = prepare(s, data, w);
  if (s.n_free() > p.n_resid / 2)
    fail(ErrorKind::Data, "more free parameters (" + std::to_string(s.n_free()) + ") than frequency points used (" +
                              std::to_string(p.n_resid / 2) + ")");

  const Eigen::VectorXd x0 = s.initial();
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> logf(std::log(0.5), std::log(1.5));

  RunResult best;
  int best_start = -1;
  for (int k = 0; k < opt.multistart; ++k) {
    Eigen::VectorXd start = x0;
    if (k > 0)
      for (Eigen::Index i = 0; i < start.size(); ++i) start[i] *= std::exp(logf(rng));
    RunResult r = levenberg_marquardt(s, data, w, p, start, opt);
    if (!std::isfinite(r.cost)) continue;
    if (best_start < 0 || r.cost < best.cost) {
      best = std::move(r);
      best_start = k;
    }
  }

  FitReport rep;
  rep.names = s.parameter_names();
  rep.initial = x0;
  for (const auto& pr : data.pairs) rep.pair_labels.push_back(pr.frf.input + "->" + pr.frf.output);
  if (best_start < 0) {
    rep.params = x0;
    rep.cost = std::numeric_limits<double>::quiet_NaN();
    rep.pair_costs.assign(data.pairs.size(), std::numeric_limits<double>::quiet_NaN());
    rep.converged = false;
    rep.termination = "all starts diverged (cost not finite)";
    return rep;
  }
  rep.params = best.x;
  rep.iterations = best.iterations;
  rep.best_start = best_start;
  rep.converged = best.converged;
  rep.termination = best.reason;
  CostResult c = cost(s, best.x, data, w);
  rep.cost = c.total;
  rep.pair_costs = c.per_pair;
  return rep;
}

bool is_local_minimum(const ModelStructure& s, const Eigen::VectorXd& params, const FrfDataset& data,
                      const CostWeights& w, double rel) {
  const double c0 = cost(s, params, data, w).total;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    for (double sign : {-1.0, 1.0}) {
      Eigen::VectorXd x = params;
      x[i] += sign * rel * (params[i] != 0.0 ? std::abs(params[i]) : 1.0);
      Prepared p = prepare(s, data, w);
      double c = safe_cost(s, x, data, w, p);
      if (std::isfinite(c) && !(c > c0)) return false;
    }
  }
  return true;
}

FrfDataset synthesize_dataset(const LinearPlantModel& model, const std::vector<double>& omega) {
  const auto T = model_frf(model, omega);
  FrfDataset d;
  const auto& lab = model.labels();
  for (Eigen::Index u = 0; u < model.n_inputs(); ++u) {
    for (Eigen::Index y = 0; y < model.n_outputs(); ++y) {
      FrfPair p;
      p.frf.freq = omega;
      p.frf.input = lab.inputs[static_cast<std::size_t>(u)];
      p.frf.output = lab.outputs[static_cast<std::size_t>(y)];
      for (const auto& t : T) p.frf.response.push_back(t(y, u));
      p.frf.coherence.assign(omega.size(), 1.0);
      p.frf.n_d.assign(omega.size(), 1.0);
      p.frf.valid.assign(omega.size(), 1);
      d.pairs.push_back(std::move(p));
    }
  }
  return d;
}

std::string fit_report_text(const ModelStructure& s, const FitReport& r) {
  std::ostringstream o;
  o << "parameters (" << r.names.size() << " free)\n";
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    auto k = static_cast<Eigen::Index>(i);
    o << "  " << r.names[i] << " = " << format_double(r.params[k]) << "  (initial "
      << format_double(r.initial[k]) << ")\n";
  }
  o << "cost J = " << format_double(r.cost) << "\n";
  o << "pair costs\n";
  for (std::size_t i = 0; i < r.pair_costs.size(); ++i)
    o << "  " << r.pair_labels[i] << " = " << format_double(r.pair_costs[i]) << "\n";
  o << "iterations = " << r.iterations << " (start " << r.best_start << ")\n";
  o << "converged = " << (r.converged ? "true" : "false") << "\n";
  o << "termination = " << r.termination << "\n";
  (void)s;
  return o.str();
}

namespace {

template <class Fn>
void for_each_entry(const Parts& p, Fn fn) {
  auto mat = [&](ModelMatrix m, const Matrix& x) {
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j) fn(EntryRef{m, i, j});
  };
  mat(ModelMatrix::M, p.M);
  mat(ModelMatrix::F, p.F);
  mat(ModelMatrix::G, p.G);
  mat(ModelMatrix::H, p.H);
  mat(ModelMatrix::J, p.J);
  for (std::size_t u = 0; u < p.tau.size(); ++u) fn(EntryRef{ModelMatrix::Tau, 0, static_cast<Eigen::Index>(u)});
}

}  // namespace

std::string fit_report_csv(const ModelStructure& s, const FitReport& r) {
  Parts init = parts_of(s.base());
  Parts fitted = parts_of(s.extract_model(r.params));
  std::string out = "parameter,value,initial,status\n";
  for_each_entry(init, [&](const EntryRef& e) {
    out += e.name() + "," + format_double(entry(fitted, e)) + "," + format_double(entry(init, e)) + "," +
           (s.is_free(e) ? "free" : "fixed") + "\n";
  });
  return out;
}

LinearPlantModel model_from_fit_csv(const ModelStructure& s, const std::string& csv) {
  Parts p = parts_of(s.base());
  std::istringstream in(csv);
  std::string line;
  int lineno = 0;
  bool header = true;
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (header) {
      if (line != "parameter,value,initial,status")
        fail(ErrorKind::Data, "fit parameters line " + std::to_string(lineno) + ": bad header");
      header = false;
      continue;
    }
    auto c1 = line.find(',');
    auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) fail(ErrorKind::Data, "fit parameters line " + std::to_string(lineno) + ": too few fields");
    EntryRef e = EntryRef::parse(line.substr(0, c1));
    if (!in_range(p, e)) fail(ErrorKind::Data, "fit parameters line " + std::to_string(lineno) + ": entry outside model");
    std::string v = line.substr(c1 + 1, c2 - c1 - 1);
    double x = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size())
      fail(ErrorKind::Data, "fit parameters line " + std::to_string(lineno) + ": bad value '" + v + "'");
    entry(p, e) = x;
    ++seen;
  }
  if (header) fail(ErrorKind::Data, "fit parameters: empty file");
  (void)seen;
  return LinearPlantModel(p.M, p.F, p.G, p.H, p.J, p.tau, s.base().labels());
}

}  // namespace rotorid
