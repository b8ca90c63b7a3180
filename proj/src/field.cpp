#include "field.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "expr.hpp"
#include "json.hpp"

namespace hopfmean {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

VectorFieldModel::VectorFieldModel(std::string name, int dimension, ParamMap defaults,
                                   std::string bifurcation_parameter, RhsFn rhs)
    : name_(std::move(name)),
      n_(dimension),
      params_(std::move(defaults)),
      bif_param_(std::move(bifurcation_parameter)),
      rhs_(std::move(rhs)) {
  if (n_ < 1) throw std::invalid_argument("dimension must be positive");
  if (!params_.count(bif_param_))
    throw std::invalid_argument("bifurcation parameter '" + bif_param_ +
                                "' is not among the model parameters");
  scale_ = Vec::Ones(n_);
}

void VectorFieldModel::set_scale(Vec s) {
  if (s.size() != n_) throw std::invalid_argument("scale has wrong dimension");
  if ((s.array() <= 0).any()) throw std::invalid_argument("scale entries must be positive");
  scale_ = std::move(s);
  scale_norm_ = scale_.norm() / std::sqrt(static_cast<double>(n_));
}

void VectorFieldModel::set_validator(ValidateFn fn) {
  validate_ = std::move(fn);
  if (validate_) validate_(params_);
}

void VectorFieldModel::set_param(const std::string& name, double value) {
  auto it = params_.find(name);
  if (it == params_.end())
    throw std::invalid_argument("unknown parameter '" + name + "' for model " + name_);
  ParamMap trial = params_;
  trial[name] = value;
  if (validate_) validate_(trial);
  it->second = value;
}

double VectorFieldModel::param(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end())
    throw std::invalid_argument("unknown parameter '" + name + "' for model " + name_);
  return it->second;
}

ParamMap VectorFieldModel::params_with_alpha(double alpha) const {
  ParamMap p = params_;
  p[bif_param_] = alpha;
  return p;
}

Vec VectorFieldModel::rhs(const Vec& x, double alpha) const {
  if (x.size() != n_) throw std::invalid_argument("state has wrong dimension");
  return rhs_(x, params_with_alpha(alpha));
}

Mat VectorFieldModel::jacobian(const Vec& x, double alpha) const {
  ParamMap p = params_with_alpha(alpha);
  if (jac_) return jac_(x, p);
  Mat J(n_, n_);
  for (int j = 0; j < n_; ++j) {
    double h = std::cbrt(kEps) * scale_[j];
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (rhs_(xp, p) - rhs_(xm, p)) / (2 * h);
  }
  return J;
}

Vec VectorFieldModel::fd_b_real(const Vec& x0, const ParamMap& p, const Vec& u,
                                const Vec& v) const {
  // polarization: B(u,v) = (D2[u+v] - D2[u-v]) / 4 with the second
  // directional difference D2[w] = (f(x0+hw) - 2 f(x0) + f(x0-hw)) / h^2
  double h = std::pow(kEps, 0.25) * scale_norm_;
  auto d2 = [&](const Vec& w) -> Vec {
    return (rhs_(x0 + h * w, p) - 2 * rhs_(x0, p) + rhs_(x0 - h * w, p)) / (h * h);
  };
  double un = u.norm(), vn = v.norm();
  if (un == 0 || vn == 0) return Vec::Zero(n_);
  // normalize directions so the step is well-scaled, restore afterwards
  Vec uu = u / un, vv = v / vn;
  return (un * vn / 4.0) * (d2(uu + vv) - d2(uu - vv));
}

Vec VectorFieldModel::fd_c_real(const Vec& x0, const ParamMap& p, const Vec& u, const Vec& v,
                                const Vec& w) const {
  double h = std::pow(kEps, 0.2) * scale_norm_;
  auto d3 = [&](const Vec& d) -> Vec {
    return (rhs_(x0 + 2 * h * d, p) - 2 * rhs_(x0 + h * d, p) + 2 * rhs_(x0 - h * d, p) -
            rhs_(x0 - 2 * h * d, p)) /
           (2 * h * h * h);
  };
  double un = u.norm(), vn = v.norm(), wn = w.norm();
  if (un == 0 || vn == 0 || wn == 0) return Vec::Zero(n_);
  Vec uu = u / un, vv = v / vn, ww = w / wn;
  Vec acc = Vec::Zero(n_);
  for (int s1 : {1, -1})
    for (int s2 : {1, -1})
      for (int s3 : {1, -1})
        acc += (s1 * s2 * s3) * d3(s1 * uu + s2 * vv + s3 * ww);
  // 8 sign patterns x 6 orderings of a symmetric form -> divisor 48
  return (un * vn * wn / 48.0) * acc;
}

CVec VectorFieldModel::fd_bilinear(const Vec& x0, double alpha, const CVec& u,
                                   const CVec& v) const {
  ParamMap p = params_with_alpha(alpha);
  Vec ur = u.real(), ui = u.imag(), vr = v.real(), vi = v.imag();
  Vec re = fd_b_real(x0, p, ur, vr) - fd_b_real(x0, p, ui, vi);
  Vec im = fd_b_real(x0, p, ur, vi) + fd_b_real(x0, p, ui, vr);
  CVec out(n_);
  for (int i = 0; i < n_; ++i) out[i] = Cplx(re[i], im[i]);
  return out;
}

CVec VectorFieldModel::fd_trilinear(const Vec& x0, double alpha, const CVec& u, const CVec& v,
                                    const CVec& w) const {
  ParamMap p = params_with_alpha(alpha);
  const Vec parts_u[2] = {u.real(), u.imag()};
  const Vec parts_v[2] = {v.real(), v.imag()};
  const Vec parts_w[2] = {w.real(), w.imag()};
  const Cplx unit[2] = {Cplx(1, 0), Cplx(0, 1)};
  CVec tot = CVec::Zero(n_);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        tot += unit[a] * unit[b] * unit[c] *
               fd_c_real(x0, p, parts_u[a], parts_v[b], parts_w[c]).cast<Cplx>();
  return tot;
}

CVec VectorFieldModel::bilinear(const Vec& x0, double alpha, const CVec& u, const CVec& v) const {
  if (bilinear_) return bilinear_(x0, params_with_alpha(alpha), u, v);
  return fd_bilinear(x0, alpha, u, v);
}

CVec VectorFieldModel::trilinear(const Vec& x0, double alpha, const CVec& u, const CVec& v,
                                 const CVec& w) const {
  if (trilinear_) return trilinear_(x0, params_with_alpha(alpha), u, v, w);
  return fd_trilinear(x0, alpha, u, v, w);
}

TensorReport VectorFieldModel::verify_analytic_tensors(const Vec& x0, double alpha, int trials,
                                                       unsigned seed) const {
  TensorReport rep;
  rep.analytic_present = has_analytic_tensors();
  rep.trials = trials;
  if (!rep.analytic_present) {
    rep.note = "no analytic tensors registered";
    return rep;
  }
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  ParamMap p = params_with_alpha(alpha);
  auto rand_dir = [&] {
    CVec d(n_);
    for (int i = 0; i < n_; ++i) d[i] = Cplx(nd(rng), nd(rng));
    d /= d.norm();
    return d;
  };
  for (int t = 0; t < trials; ++t) {
    CVec u = rand_dir(), v = rand_dir(), w = rand_dir();
    CVec ba = bilinear_(x0, p, u, v);
    CVec bf = fd_bilinear(x0, alpha, u, v);
    double denom_b = std::max(ba.norm(), 1.0);
    rep.max_rel_err_B = std::max(rep.max_rel_err_B, (ba - bf).norm() / denom_b);
    CVec ca = trilinear_(x0, p, u, v, w);
    CVec cf = fd_trilinear(x0, alpha, u, v, w);
    double denom_c = std::max(ca.norm(), 1.0);
    rep.max_rel_err_C = std::max(rep.max_rel_err_C, (ca - cf).norm() / denom_c);
  }
  return rep;
}

VectorFieldModel VectorFieldModel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw EvalError(std::string("model file is not valid JSON: ") + e.what());
  }
  for (const char* key : {"dimension", "parameters", "bifurcation_parameter", "equations"})
    if (!j.contains(key)) throw EvalError(std::string("model file missing key '") + key + "'");

  int n = j["dimension"].get<int>();
  if (n < 1) throw EvalError("dimension must be positive");
  ParamMap defaults;
  std::vector<std::string> pnames;
  for (auto& [k, v] : j["parameters"].items()) {
    defaults[k] = v.get<double>();
    pnames.push_back(k);
  }
  std::string bif = j["bifurcation_parameter"].get<std::string>();
  if (!defaults.count(bif))
    throw EvalError("bifurcation parameter '" + bif + "' not listed in parameters");
  auto eqs = j["equations"];
  if (!eqs.is_array() || static_cast<int>(eqs.size()) != n)
    throw EvalError("equations must be an array of length equal to dimension");

  auto asts = std::make_shared<std::vector<expr::Ast>>();
  for (int i = 0; i < n; ++i) {
    try {
      asts->push_back(expr::Ast::parse(eqs[i].get<std::string>(), n, pnames));
    } catch (const expr::SyntaxError& e) {
      throw EvalError("equation " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  auto order = std::make_shared<std::vector<std::string>>(pnames);
  std::string name = j.value("name", std::string("custom"));

  VectorFieldModel m(name, n, std::move(defaults), bif,
                     [asts, order, n](const Vec& x, const ParamMap& params) {
                       std::vector<double> pv(order->size());
                       for (std::size_t i = 0; i < order->size(); ++i) {
                         auto it = params.find((*order)[i]);
                         if (it == params.end()) throw expr::MissingParameter((*order)[i]);
                         pv[i] = it->second;
                       }
                       Vec out(n);
                       std::span<const double> st(x.data(), static_cast<std::size_t>(n));
                       for (int i = 0; i < n; ++i) out[i] = (*asts)[static_cast<std::size_t>(i)].eval(st, pv);
                       return out;
                     });
  return m;
}

VectorFieldModel VectorFieldModel::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EvalError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace hopfmean
