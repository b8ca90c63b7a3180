#pragma once

#include "field.hpp"
#include "spectral.hpp"

namespace hopfmean {

struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// mu(alpha) does not change sign on the interval handed to
/// locate_bifurcation.
struct BracketError : SolveError {
  using SolveError::SolveError;
};

enum class Stability { Stable, HopfUnstable, OtherUnstable };

struct Equilibrium {
  double alpha = 0;
  Vec x0;
  double residual = 0;
  HopfPair hopf;
  Stability stability = Stability::Stable;
};

enum class Criticality { Supercritical, Subcritical, Degenerate };

struct BifurcationPoint {
  double alpha_star = 0;
  double omega0 = 0;
  double mu_prime = 0;
  Vec x0_star;
  double lyapunov_re_c1 = 0;
  Criticality criticality = Criticality::Degenerate;
};

const char* to_string(Stability s);
const char* to_string(Criticality c);

/// Damped Newton on f(x; alpha) = 0 from x_guess, then attach the Hopf
/// eigenpair (seeded by `previous` when continuing).
Equilibrium solve_equilibrium(const VectorFieldModel& model, double alpha, const Vec& x_guess,
                              const Cplx* previous_pair = nullptr);

/// Natural-parameter continuation: each solve seeded by the previous
/// solution and eigenpair. Grid must be finite; any order is accepted
/// but callers normally pass ascending alphas.
std::vector<Equilibrium> continue_equilibria(const VectorFieldModel& model,
                                             const std::vector<double>& alpha_grid,
                                             const Vec& x_guess);

/// Real/imaginary parts of the selected Hopf eigenvalue at the solved
/// equilibrium.
std::pair<double, double> mu_of_alpha(const VectorFieldModel& model, double alpha,
                                      const Vec& x_guess);

/// Brent root-finding on alpha -> mu(alpha) between a bracketing pair,
/// then mu'(alpha*) by central difference and Re(c1) via the normal form.
BifurcationPoint locate_bifurcation(const VectorFieldModel& model, double alpha_lo,
                                    double alpha_hi, const Vec& x_guess);

}  // namespace hopfmean
