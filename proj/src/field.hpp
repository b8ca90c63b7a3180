#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hopfmean {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using ParamMap = std::map<std::string, double>;

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Diagnostic record of one finite-difference tensor probe.
struct TensorProbe {
  Vec base;
  std::vector<CVec> directions;
  double step = 0;
  CVec result;
};

struct TensorReport {
  bool analytic_present = false;
  int trials = 0;
  double max_rel_err_B = 0;
  double max_rel_err_C = 0;
  std::string note;
};

/// A parameterized ODE right-hand side f(x; alpha) together with its
/// Jacobian and the second/third-order multilinear forms B and C,
/// analytic when registered and by central finite differences otherwise.
/// Complex directions are handled by multilinear extension over the
/// real and imaginary parts; f itself is only ever evaluated at real
/// states. Instances are immutable after setup and safe to share.
class VectorFieldModel {
public:
  using RhsFn = std::function<Vec(const Vec& x, const ParamMap& params)>;
  using JacFn = std::function<Mat(const Vec& x, const ParamMap& params)>;
  using Form2Fn =
      std::function<CVec(const Vec& x, const ParamMap& params, const CVec& u, const CVec& v)>;
  using Form3Fn = std::function<CVec(const Vec& x, const ParamMap& params, const CVec& u,
                                     const CVec& v, const CVec& w)>;
  using ValidateFn = std::function<void(const ParamMap& params)>;

  VectorFieldModel(std::string name, int dimension, ParamMap defaults,
                   std::string bifurcation_parameter, RhsFn rhs);

  /// Model file format:
  /// { "dimension": n, "parameters": {"name": default, ...},
  ///   "bifurcation_parameter": "alpha", "equations": ["...", ...] }
  static VectorFieldModel from_json(const std::string& text);
  static VectorFieldModel from_file(const std::string& path);

  void set_jacobian(JacFn fn) { jac_ = std::move(fn); }
  void set_bilinear(Form2Fn fn) { bilinear_ = std::move(fn); }
  void set_trilinear(Form3Fn fn) { trilinear_ = std::move(fn); }
  void set_scale(Vec s);
  void set_validator(ValidateFn fn);
  void set_param(const std::string& name, double value);

  const std::string& name() const { return name_; }
  int dimension() const { return n_; }
  const ParamMap& params() const { return params_; }
  double param(const std::string& name) const;
  const std::string& bifurcation_parameter() const { return bif_param_; }
  const Vec& scale() const { return scale_; }
  double scale_norm() const { return scale_norm_; }
  bool has_analytic_jacobian() const { return static_cast<bool>(jac_); }
  bool has_analytic_tensors() const {
    return static_cast<bool>(bilinear_) && static_cast<bool>(trilinear_);
  }

  Vec rhs(const Vec& x, double alpha) const;
  Mat jacobian(const Vec& x, double alpha) const;
  CVec bilinear(const Vec& x0, double alpha, const CVec& u, const CVec& v) const;
  CVec trilinear(const Vec& x0, double alpha, const CVec& u, const CVec& v, const CVec& w) const;

  /// Compare analytic and finite-difference B, C on random unit directions.
  TensorReport verify_analytic_tensors(const Vec& x0, double alpha, int trials,
                                       unsigned seed = 12345) const;

  ParamMap params_with_alpha(double alpha) const;

  /// Finite-difference forms, exposed so analytic registrations can be
  /// cross-checked independently of which path bilinear()/trilinear() takes.
  CVec fd_bilinear(const Vec& x0, double alpha, const CVec& u, const CVec& v) const;
  CVec fd_trilinear(const Vec& x0, double alpha, const CVec& u, const CVec& v,
                    const CVec& w) const;

private:
  Vec fd_b_real(const Vec& x0, const ParamMap& p, const Vec& u, const Vec& v) const;
  Vec fd_c_real(const Vec& x0, const ParamMap& p, const Vec& u, const Vec& v,
                const Vec& w) const;

  std::string name_;
  int n_;
  ParamMap params_;
  std::string bif_param_;
  RhsFn rhs_;
  JacFn jac_;
  Form2Fn bilinear_;
  Form3Fn trilinear_;
  ValidateFn validate_;
  Vec scale_;
  double scale_norm_ = 1.0;
};

}  // namespace hopfmean
