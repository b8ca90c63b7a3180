#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "models.hpp"
#include "simulate.hpp"

using namespace hopfmean;

namespace {

VectorFieldModel decay_model() {
  return VectorFieldModel("decay", 1, {{"alpha", 1.0}}, "alpha",
                          [](const Vec& x, const ParamMap& p) {
                            return (-p.at("alpha") * x).eval();
                          });
}

VectorFieldModel oscillator_model() {
  return VectorFieldModel("osc", 2, {{"alpha", 1.0}}, "alpha",
                          [](const Vec& x, const ParamMap& p) {
                            Vec f(2);
                            f << x[1], -p.at("alpha") * x[0];
                            return f;
                          });
}

Analysis analyze_builtin(const Builtin& b, double alpha) {
  return analyze(b.model, alpha, b.default_guess(b.model.params_with_alpha(alpha)));
}

}  // namespace

TEST_CASE("exponential decay to high accuracy") {
  VectorFieldModel m = decay_model();
  Vec x0(1);
  x0 << 1.0;
  Trajectory tr = integrate(m, 1.0, x0, 0.0, 1.0);
  CHECK(tr.x.back()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(tr.t.back() == 1.0);
  CHECK(tr.steps_accepted > 0);
  for (std::size_t i = 1; i < tr.t.size(); ++i) CHECK(tr.t[i] > tr.t[i - 1]);
}

TEST_CASE("harmonic oscillator closes after one period") {
  VectorFieldModel m = oscillator_model();
  Vec x0(2);
  x0 << 1.0, 0.0;
  double T = 2 * std::numbers::pi;
  Trajectory tr = integrate(m, 1.0, x0, 0.0, T);
  CHECK((tr.x.back() - x0).norm() <= 1e-7);
}

TEST_CASE("error decreases with the tolerance") {
  VectorFieldModel m = oscillator_model();
  Vec x0(2);
  x0 << 1.0, 0.0;
  double T = 20 * std::numbers::pi;  // long run to accumulate error
  double err_prev = -1;
  for (double rtol : {1e-5, 1e-8, 1e-11}) {
    IntegratorConfig cfg;
    cfg.rtol = rtol;
    cfg.atol = rtol * 1e-2;
    Trajectory tr = integrate(m, 1.0, x0, 0.0, T, cfg);
    double err = (tr.x.back() - x0).norm();
    if (err_prev >= 0) CHECK(err < err_prev / 10);
    err_prev = err;
  }
}

TEST_CASE("invalid spans and states are rejected") {
  VectorFieldModel m = decay_model();
  Vec x0(1);
  x0 << 1.0;
  CHECK_THROWS_AS((void)integrate(m, 1.0, x0, 1.0, 0.0), SimulateError);
  Vec bad = Vec::Constant(1, std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS((void)integrate(m, 1.0, bad, 0.0, 1.0), SimulateError);
}

TEST_CASE("escaping trajectories raise instead of spinning") {
  VectorFieldModel m("blowup", 1, {{"alpha", 1.0}}, "alpha",
                     [](const Vec& x, const ParamMap&) { return (x.array() * x.array() + 1).matrix().eval(); });
  Vec x0(1);
  x0 << 1.0;
  CHECK_THROWS_AS((void)integrate(m, 1.0, x0, 0.0, 10.0), SimulateError);
}

TEST_CASE("trajectory dump file") {
  VectorFieldModel m = decay_model();
  Vec x0(1);
  x0 << 1.0;
  IntegratorConfig cfg;
  cfg.dump_path = "sim_dump_test.csv";
  Trajectory tr = integrate(m, 1.0, x0, 0.0, 0.5, cfg);
  std::ifstream in(cfg.dump_path);
  REQUIRE(in.good());
  int lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == tr.steps_accepted);
  in.close();
  std::remove(cfg.dump_path.c_str());
}

TEST_CASE("cycle observation on the brusselator") {
  auto b = make_builtin("brusselator");
  Analysis a = analyze_builtin(*b, 2.1);  // mu = 0.05
  CycleObservation obs = observe_cycle(b->model, 2.1, a.eq);
  CHECK(obs.converged);
  CHECK(obs.periods_averaged == 8);
  CHECK(obs.period == doctest::Approx(2 * std::numbers::pi / a.pred.omega_w).epsilon(2e-3));
  CHECK((obs.mean - a.pred.predicted_mean).norm() <= 0.05 * 0.05 * 10);
  CHECK(obs.amplitude.minCoeff() > 0);

  // the measured mean must not depend on which section coordinate is used
  IntegratorConfig cfg;
  cfg.section_coordinate = 0;
  CycleObservation o0 = observe_cycle(b->model, 2.1, a.eq, cfg);
  cfg.section_coordinate = 1;
  CycleObservation o1 = observe_cycle(b->model, 2.1, a.eq, cfg);
  CHECK((o0.mean - o1.mean).norm() <= 1e-6);
  CHECK(o0.period == doctest::Approx(o1.period).epsilon(1e-6));
}

TEST_CASE("stable equilibria yield no cycle") {
  auto b = make_builtin("brusselator");
  Analysis a = analyze_builtin(*b, 1.9);
  CHECK(a.eq.stability == Stability::Stable);
  CycleObservation obs = observe_cycle(b->model, 1.9, a.eq);
  CHECK_FALSE(obs.converged);
  CHECK(obs.mean == a.eq.x0);
}

TEST_CASE("measured deviation is tangent to the prediction") {
  auto b = make_builtin("predator-prey");
  double alpha = 4.74;  // mu about 0.01
  Analysis a = analyze_builtin(*b, alpha);
  REQUIRE(a.pred.cycle_predicted);
  DeviationRecord rec = measure_deviation(b->model, alpha, a.eq, a.pred);
  CHECK(rec.obs.converged);
  CHECK(rec.cosine >= 0.99);
  CHECK(rec.amplitude_ratio == doctest::Approx(1.0).epsilon(0.05));
  CHECK(rec.err_norm <= 0.1 * rec.d_num.norm());
}
