#include "models.hpp"

#include <cmath>

namespace hopfmean {

namespace {

double at(const ParamMap& p, const char* k) { return p.at(k); }

Cplx pair2(const CVec& u, const CVec& v, int i, int j) {
  return u[i] * v[j] + u[j] * v[i];
}

}  // namespace

Builtin predator_prey() {
  VectorFieldModel m(
      "predator-prey", 2, {{"c", 2.0}, {"delta", 1.3}, {"beta", 2.0}, {"alpha", 4.0}}, "alpha",
      [](const Vec& x, const ParamMap& p) {
        double c = at(p, "c"), d = at(p, "delta"), b = at(p, "beta"), a = at(p, "alpha");
        Vec f(2);
        f[0] = b * x[0] * (1 - x[0]) * (1 + a * x[0]) - c * a * x[0] * x[1];
        f[1] = -d * x[1] * (1 + a * x[0]) + c * a * x[0] * x[1];
        return f;
      });
  m.set_validator([](const ParamMap& p) {
    if (at(p, "c") <= at(p, "delta"))
      throw EvalError("predator-prey requires c > delta for a positive equilibrium");
  });
  m.set_jacobian([](const Vec& x, const ParamMap& p) {
    double c = at(p, "c"), d = at(p, "delta"), b = at(p, "beta"), a = at(p, "alpha");
    Mat J(2, 2);
    J(0, 0) = b * (1 + 2 * (a - 1) * x[0] - 3 * a * x[0] * x[0]) - c * a * x[1];
    J(0, 1) = -c * a * x[0];
    J(1, 0) = (c - d) * a * x[1];
    J(1, 1) = -d + (c - d) * a * x[0];
    return J;
  });
  m.set_bilinear([](const Vec& x, const ParamMap& p, const CVec& u, const CVec& v) {
    double c = at(p, "c"), d = at(p, "delta"), b = at(p, "beta"), a = at(p, "alpha");
    CVec out(2);
    out[0] = (2 * b * (a - 1) - 6 * b * a * x[0]) * u[0] * v[0] - c * a * pair2(u, v, 0, 1);
    out[1] = (c - d) * a * pair2(u, v, 0, 1);
    return out;
  });
  m.set_trilinear([](const Vec&, const ParamMap& p, const CVec& u, const CVec& v, const CVec& w) {
    double b = at(p, "beta"), a = at(p, "alpha");
    CVec out(2);
    out[0] = -6.0 * b * a * u[0] * v[0] * w[0];
    out[1] = 0;
    return out;
  });

  auto equilibrium = [](const ParamMap& p) {
    double c = at(p, "c"), d = at(p, "delta"), b = at(p, "beta"), a = at(p, "alpha");
    double x1 = d / (a * (c - d));
    Vec x(2);
    x[0] = x1;
    x[1] = b * (1 - x1) * (1 + a * x1) / (c * a);
    return x;
  };
  // at the equilibrium the Jacobian's (2,2) entry vanishes, so
  // trace = J11 and det = -J12 J21
  auto mu_fn = [equilibrium](const ParamMap& p) {
    double b = at(p, "beta"), a = at(p, "alpha");
    double x1 = equilibrium(p)[0];
    return b * x1 * ((a - 1) - 2 * a * x1) / 2;
  };
  auto omega_fn = [equilibrium, mu_fn](const ParamMap& p) {
    double c = at(p, "c"), d = at(p, "delta"), a = at(p, "alpha");
    Vec x = equilibrium(p);
    double det = c * a * a * (c - d) * x[0] * x[1];
    double mu = mu_fn(p);
    return std::sqrt(det - mu * mu);
  };

  Builtin b{std::move(m)};
  b.oracle_equilibrium = equilibrium;
  b.oracle_alpha_star = [](const ParamMap& p) {
    return (at(p, "c") + at(p, "delta")) / (at(p, "c") - at(p, "delta"));
  };
  b.oracle_mu = mu_fn;
  b.oracle_omega = omega_fn;
  b.oracle_g20 = [omega_fn](const ParamMap& p) {
    double c = at(p, "c"), d = at(p, "delta"), bb = at(p, "beta");
    ParamMap ps = p;
    ps["alpha"] = (c + d) / (c - d);
    // the published value is stated in a rotated frame whose frequency is
    // om * (c - d) / (c + d)
    double om = omega_fn(ps) * (c - d) / (c + d);
    return Cplx(c * d * (c * c - d * d - bb * d) / (c + d), om * c * (c + d));
  };
  b.oracle_g11 = [](const ParamMap& p) {
    double c = at(p, "c"), d = at(p, "delta"), bb = at(p, "beta");
    return Cplx(-bb * c * d * d / (c + d), 0);
  };
  b.default_guess = equilibrium;
  return b;
}

Builtin brusselator() {
  VectorFieldModel m("brusselator", 2, {{"A", 1.0}, {"alpha", 2.0}}, "alpha",
                     [](const Vec& x, const ParamMap& p) {
                       double A = at(p, "A"), a = at(p, "alpha");
                       Vec f(2);
                       f[0] = A - (a + 1) * x[0] + x[0] * x[0] * x[1];
                       f[1] = a * x[0] - x[0] * x[0] * x[1];
                       return f;
                     });
  m.set_validator([](const ParamMap& p) {
    if (at(p, "A") <= 0) throw EvalError("brusselator requires A > 0");
  });
  m.set_jacobian([](const Vec& x, const ParamMap& p) {
    double a = at(p, "alpha");
    Mat J(2, 2);
    J(0, 0) = -(a + 1) + 2 * x[0] * x[1];
    J(0, 1) = x[0] * x[0];
    J(1, 0) = a - 2 * x[0] * x[1];
    J(1, 1) = -x[0] * x[0];
    return J;
  });
  m.set_bilinear([](const Vec& x, const ParamMap&, const CVec& u, const CVec& v) {
    CVec out(2);
    out[0] = 2 * x[1] * u[0] * v[0] + 2 * x[0] * pair2(u, v, 0, 1);
    out[1] = -out[0];
    return out;
  });
  m.set_trilinear([](const Vec&, const ParamMap&, const CVec& u, const CVec& v, const CVec& w) {
    CVec out(2);
    out[0] = 2.0 * (u[0] * v[0] * w[1] + u[0] * v[1] * w[0] + u[1] * v[0] * w[0]);
    out[1] = -out[0];
    return out;
  });

  auto equilibrium = [](const ParamMap& p) {
    Vec x(2);
    x[0] = at(p, "A");
    x[1] = at(p, "alpha") / at(p, "A");
    return x;
  };
  Builtin b{std::move(m)};
  b.oracle_equilibrium = equilibrium;
  b.oracle_alpha_star = [](const ParamMap& p) {
    double A = at(p, "A");
    return 1 + A * A;
  };
  b.oracle_mu = [](const ParamMap& p) {
    double A = at(p, "A");
    return (at(p, "alpha") - 1 - A * A) / 2;
  };
  b.oracle_omega = [](const ParamMap& p) {
    double A = at(p, "A");
    double mu = (at(p, "alpha") - 1 - A * A) / 2;
    return std::sqrt(A * A - mu * mu);
  };
  b.oracle_g20 = [](const ParamMap& p) { return Cplx(at(p, "A"), -1); };
  b.oracle_g11 = [](const ParamMap& p) {
    double A = at(p, "A");
    return Cplx(A, -1) * (A * A - 1) / (A * A + 1);
  };
  b.default_guess = equilibrium;
  return b;
}

Builtin wilson_cowan() {
  VectorFieldModel m("wilson-cowan", 2,
                     {{"tau1", 4.0},
                      {"tau2", 12.0},
                      {"beta", 0.1},
                      {"wee", 3.6},
                      {"wei", 8.0},
                      {"wie", 4.0},
                      {"wii", 8.8},
                      {"I", 1.0}},
                     "I", [](const Vec& u, const ParamMap& p) {
                       double beta = at(p, "beta");
                       auto sig = [beta](double x) { return 1 / (1 + std::exp(-x / beta)); };
                       Vec f(2);
                       f[0] = (-u[0] + sig(at(p, "wee") * u[0] - at(p, "wei") * u[1] + at(p, "I"))) /
                              at(p, "tau1");
                       f[1] = (-u[1] + sig(at(p, "wie") * u[0] - at(p, "wii") * u[1] + at(p, "I"))) /
                              at(p, "tau2");
                       return f;
                     });
  m.set_validator([](const ParamMap& p) {
    if (at(p, "beta") == 0) throw EvalError("wilson-cowan requires beta != 0");
    if (at(p, "tau1") <= 0 || at(p, "tau2") <= 0)
      throw EvalError("wilson-cowan requires positive timescales");
  });
  Builtin b{std::move(m)};
  b.default_guess = [](const ParamMap&) {
    Vec x(2);
    x << 0.1, 0.1;
    return x;
  };
  return b;
}

Builtin feedback_control() {
  VectorFieldModel m("feedback-control", 3, {{"beta", 1.0}, {"alpha", 1.0}}, "alpha",
                     [](const Vec& x, const ParamMap& p) {
                       Vec f(3);
                       f[0] = x[1];
                       f[1] = x[2];
                       f[2] = -at(p, "alpha") * x[2] - at(p, "beta") * x[1] + x[0] * (x[0] - 1);
                       return f;
                     });
  m.set_validator([](const ParamMap& p) {
    if (at(p, "alpha") <= 0 || at(p, "beta") <= 0)
      throw EvalError("feedback-control requires alpha > 0 and beta > 0");
  });
  m.set_jacobian([](const Vec& x, const ParamMap& p) {
    Mat J = Mat::Zero(3, 3);
    J(0, 1) = 1;
    J(1, 2) = 1;
    J(2, 0) = 2 * x[0] - 1;
    J(2, 1) = -at(p, "beta");
    J(2, 2) = -at(p, "alpha");
    return J;
  });
  m.set_bilinear([](const Vec&, const ParamMap&, const CVec& u, const CVec& v) {
    CVec out = CVec::Zero(3);
    out[2] = 2.0 * u[0] * v[0];
    return out;
  });
  m.set_trilinear([](const Vec&, const ParamMap&, const CVec&, const CVec&, const CVec&) {
    return CVec::Zero(3).eval();
  });
  Builtin b{std::move(m)};
  b.oracle_equilibrium = [](const ParamMap&) { return Vec::Zero(3).eval(); };
  b.oracle_alpha_star = [](const ParamMap& p) { return 1 / at(p, "beta"); };
  b.oracle_omega = [](const ParamMap& p) { return std::sqrt(at(p, "beta")); };
  b.default_guess = [](const ParamMap&) { return Vec::Zero(3).eval(); };
  return b;
}

std::optional<Builtin> make_builtin(const std::string& name) {
  if (name == "predator-prey") return predator_prey();
  if (name == "brusselator") return brusselator();
  if (name == "wilson-cowan") return wilson_cowan();
  if (name == "feedback-control") return feedback_control();
  return std::nullopt;
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"predator-prey", "brusselator", "wilson-cowan",
                                                 "feedback-control"};
  return names;
}

}  // namespace hopfmean
