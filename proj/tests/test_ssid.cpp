#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rotorid/error.hpp"
#include "rotorid/ssid.hpp"

using namespace rotorid;

namespace {

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k)
    w[k] = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 1));
  return w;
}

std::vector<EntryRef> lateral_free() {
  std::vector<EntryRef> f;
  for (const char* n : {"F11", "F13", "F22", "F31", "F33", "G11", "G22", "G31"}) f.push_back(EntryRef::parse(n));
  return f;
}

LinearPlantModel scalar_lag(double a) {
  return LinearPlantModel::with_full_state_output(Matrix::Constant(1, 1, -a), Matrix::Constant(1, 1, a), {"x"},
                                                  {"u"});
}

}  // namespace

TEST_CASE("entry names") {
  CHECK(EntryRef{ModelMatrix::F, 0, 2}.name() == "F13");
  CHECK(EntryRef{ModelMatrix::G, 9, 1}.name() == "G(10,2)");
  CHECK(EntryRef{ModelMatrix::Tau, 0, 0}.name() == "tau1");
  for (const char* n : {"M22", "F13", "G(10,2)", "H31", "J12", "tau2"}) CHECK(EntryRef::parse(n).name() == n);
  CHECK_THROWS_AS(EntryRef::parse("X11"), Error);
  CHECK_THROWS_AS(EntryRef::parse("F0"), Error);
}

TEST_CASE("structure validation") {
  auto m = paper_lateral_model();
  CHECK_THROWS_AS(ModelStructure(m, {}), Error);
  CHECK_THROWS_AS(ModelStructure(m, {EntryRef::parse("F44")}), Error);
  CHECK_THROWS_AS(ModelStructure(m, {EntryRef::parse("F11"), EntryRef::parse("F11")}), Error);
  CHECK_THROWS_AS(ModelStructure(m, {EntryRef::parse("tau3")}), Error);
}

TEST_CASE("extract_model substitutes free entries only") {
  ModelStructure s(paper_lateral_model(), lateral_free());
  Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(8, 1.0, 8.0);
  auto m = s.extract_model(p);
  CHECK(m.F()(0, 0) == 1.0);
  CHECK(m.F()(0, 2) == 2.0);
  CHECK(m.G()(2, 0) == 8.0);
  CHECK(m.G()(0, 1) == 1.0);
  CHECK(m.F()(0, 1) == 0.0);
  CHECK(m.M() == Matrix::Identity(3, 3));
  CHECK(m.labels().states == paper_lateral_model().labels().states);
  CHECK(s.extract_model(s.initial()).F() == paper_lateral_model().F());
  CHECK(s.parameter_names() == std::vector<std::string>{"F11", "F13", "F22", "F31", "F33", "G11", "G22", "G31"});
}

TEST_CASE("model_frf examples") {
  SUBCASE("low-frequency limit is the dc gain") {
    auto m = paper_lateral_model();
    auto T = model_frf(m, {1e-9})[0];
    CHECK((T.real() - dc_gain(m)).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("first-order lag at its corner") {
    auto T = model_frf(scalar_lag(2.5), {2.5})[0](0, 0);
    CHECK(std::abs(T) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::arg(T) * 180.0 / M_PI == doctest::Approx(-45.0).epsilon(1e-12));
  }
  SUBCASE("delay rotates phase only") {
    auto base = scalar_lag(1.0);
    LinearPlantModel d(base.M(), base.F(), base.G(), base.H(), base.J(), {0.1}, base.labels());
    for (double w : {0.5, 3.0, 20.0}) {
      auto a = model_frf(base, {w})[0](0, 0), b = model_frf(d, {w})[0](0, 0);
      CHECK(std::abs(b) == doctest::Approx(std::abs(a)));
      CHECK(std::abs(std::arg(b / a) + 0.1 * w) < 1e-12);
    }
  }
  SUBCASE("singular pencil is reported") {
    auto z = LinearPlantModel::with_full_state_output(Matrix::Zero(1, 1), Matrix::Ones(1, 1), {"x"}, {"u"});
    CHECK_THROWS_AS(model_frf(z, {0.0}), Error);
  }
}

TEST_CASE("cost") {
  ModelStructure s(paper_lateral_model(), lateral_free());
  auto data = synthesize_dataset(paper_lateral_model(), log_grid(0.1, 30.0, 60));
  CHECK(data.pairs.size() == 6);

  SUBCASE("self-match is zero") { CHECK(cost(s, s.initial(), data).total < 1e-9); }

  SUBCASE("+1 dB offset on one pair") {
    auto off = data;
    for (auto& h : off.pairs[0].frf.response) h *= std::pow(10.0, 1.0 / 20.0);
    auto c = cost(s, s.initial(), off);
    CHECK(c.per_pair[0] == doctest::Approx(19.950050543822055).epsilon(1e-12));
    CHECK(c.total == doctest::Approx(19.950050543822055 / 6.0).epsilon(1e-12));
  }

  SUBCASE("order of points and pairs does not matter") {
    auto shuffled = data;
    std::reverse(shuffled.pairs.begin(), shuffled.pairs.end());
    for (auto& p : shuffled.pairs) {
      auto& f = p.frf;
      std::reverse(f.freq.begin(), f.freq.end());
      std::reverse(f.response.begin(), f.response.end());
    }
    Eigen::VectorXd p = s.initial() * 1.1;
    CHECK(cost(s, p, shuffled).total == doctest::Approx(cost(s, p, data).total).epsilon(1e-12));
  }

  SUBCASE("pair with nothing above the floor is an error") {
    auto low = data;
    for (auto& g : low.pairs[2].frf.coherence) g = 0.3;
    CHECK_THROWS_AS(cost(s, s.initial(), low), Error);
  }

  SUBCASE("residual norm squared equals cost") {
    Eigen::VectorXd p = s.initial() * 1.2;
    CHECK(residuals(s, p, data).squaredNorm() == doctest::Approx(cost(s, p, data).total).epsilon(1e-12));
  }
}

TEST_CASE("coherence weight") {
  CHECK(coherence_weight(1.0) == doctest::Approx(std::pow(1.58 * (1 - std::exp(-1.0)), 2)));
  CHECK(coherence_weight(0.0) == 0.0);
}

TEST_CASE("self-match holds for random stable structures") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 3;
    Matrix F = Matrix::NullaryExpr(n, n, [&] { return 0.5 * g(rng); });
    F -= (F.eigenvalues().real().maxCoeff() + 1.0) * Matrix::Identity(n, n);
    Matrix G = Matrix::NullaryExpr(n, 2, [&] { return g(rng); });
    std::vector<std::string> st, in{"a", "b"};
    for (int i = 0; i < n; ++i) st.push_back("s" + std::to_string(i));
    auto m = LinearPlantModel::with_full_state_output(F, G, st, in);
    ModelStructure s(m, {EntryRef{ModelMatrix::F, 0, 0}, EntryRef{ModelMatrix::G, n - 1, 1}});
    CHECK(cost(s, s.initial(), synthesize_dataset(m, log_grid(0.1, 10.0, 30))).total < 1e-9);
  }
}

TEST_CASE("forward and central Jacobians agree at the initial point") {
  ModelStructure truth(paper_lateral_model(), lateral_free());
  auto data = synthesize_dataset(paper_lateral_model(), log_grid(0.1, 30.0, 60));
  ModelStructure s = truth.with_initial(truth.initial() * 1.5);
  auto fwd = residual_jacobian(s, s.initial(), data, {}, false);
  auto ctr = residual_jacobian(s, s.initial(), data, {}, true);
  CHECK((fwd - ctr).norm() <= 1e-4 * ctr.norm());
}

TEST_CASE("fit") {
  auto truth = paper_lateral_model();
  ModelStructure s(truth, lateral_free());
  auto data = synthesize_dataset(truth, log_grid(0.1, 30.0, 60));

  SUBCASE("starting at the truth converges immediately") {
    FitOptions o;
    o.multistart = 1;
    auto r = fit(s, data, {}, o);
    CHECK(r.converged);
    CHECK(r.iterations <= 2);
    CHECK(r.cost < 1e-12);
  }
  SUBCASE("recovers the lateral block from a 1.5x start") {
    auto r = fit(s.with_initial(s.initial() * 1.5), data);
    CHECK(r.converged);
    CHECK(r.cost < 0.1);
    for (Eigen::Index i = 0; i < r.params.size(); ++i)
      CHECK(std::abs(r.params[i] / s.initial()[i] - 1.0) < 1e-3);
    CHECK(r.names == s.parameter_names());
    CHECK(is_local_minimum(s, r.params, data) == (r.cost > 0.0));
  }
  SUBCASE("same seed, same answer") {
    FitOptions o;
    o.multistart = 3;
    auto a = fit(s.with_initial(s.initial() * 1.3), data, {}, o);
    auto b = fit(s.with_initial(s.initial() * 1.3), data, {}, o);
    CHECK(a.params == b.params);
    CHECK(a.best_start == b.best_start);
  }
  SUBCASE("bad options and too few points") {
    FitOptions o;
    o.multistart = 0;
    CHECK_THROWS_AS(fit(s, data, {}, o), Error);
    auto tiny = synthesize_dataset(truth, {1.0});
    tiny.pairs.resize(1);
    CHECK_THROWS_AS(fit(s, tiny), Error);
  }
}

TEST_CASE("local minimum check on a noisy fit") {
  auto truth = scalar_lag(2.0);
  ModelStructure s(truth, {EntryRef::parse("F11"), EntryRef::parse("G11")});
  auto data = synthesize_dataset(truth, log_grid(0.1, 20.0, 40));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 0.05);
  for (auto& h : data.pairs[0].frf.response) h *= std::polar(1.0 + g(rng), g(rng));
  auto r = fit(s.with_initial(s.initial() * 0.7), data);
  CHECK(r.converged);
  CHECK(r.cost > 0.0);
  CHECK(is_local_minimum(s, r.params, data));
  CHECK(std::abs(r.params[0] / -2.0 - 1.0) < 0.05);
}

TEST_CASE("fit report csv round trip") {
  auto truth = paper_lateral_model();
  ModelStructure s(truth, lateral_free());
  FitReport r;
  r.names = s.parameter_names();
  r.params = s.initial() * 0.9;
  r.initial = s.initial();
  auto csv = fit_report_csv(s, r);
  CHECK(csv.rfind("parameter,value,initial,status\n", 0) == 0);
  CHECK(csv.find("F11,") != std::string::npos);
  CHECK(csv.find(",fixed") != std::string::npos);
  auto back = model_from_fit_csv(s, csv);
  CHECK(back.F() == s.extract_model(r.params).F());
  CHECK(back.G() == s.extract_model(r.params).G());
  CHECK(!fit_report_text(s, r).empty());
}
