#pragma once

#include <optional>

#include "field.hpp"

namespace hopfmean {

/// A registered example system plus whatever closed-form oracles exist
/// for it. Oracle callables are null when no closed form is available;
/// parameter maps passed to them must include the bifurcation parameter.
struct Builtin {
  VectorFieldModel model;
  std::function<Vec(const ParamMap&)> oracle_equilibrium;
  std::function<double(const ParamMap&)> oracle_alpha_star;
  std::function<double(const ParamMap&)> oracle_mu;
  std::function<double(const ParamMap&)> oracle_omega;
  std::function<Cplx(const ParamMap&)> oracle_g20;  // published gauge, at alpha*
  std::function<Cplx(const ParamMap&)> oracle_g11;
  std::function<Vec(const ParamMap&)> default_guess;
};

/// Rescaled predator-prey system (polynomial form); defaults c=2,
/// delta=1.3, beta=2; bifurcation parameter "alpha". Requires c > delta.
Builtin predator_prey();

/// Brusselator; default A=1; bifurcation parameter "alpha". Requires A > 0.
Builtin brusselator();

/// Wilson-Cowan e/i population model; bifurcation parameter "I" (input
/// current); FD tensors only. Requires beta != 0 and positive timescales.
Builtin wilson_cowan();

/// Third-order feedback-control system; default beta=1; bifurcation
/// parameter "alpha". Requires alpha, beta > 0.
Builtin feedback_control();

/// Lookup by registry name: "predator-prey", "brusselator",
/// "wilson-cowan", "feedback-control".
std::optional<Builtin> make_builtin(const std::string& name);

const std::vector<std::string>& builtin_names();

}  // namespace hopfmean
