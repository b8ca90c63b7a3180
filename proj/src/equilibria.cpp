#include "equilibria.hpp"

#include <cmath>
#include <limits>

#include "normalform.hpp"

namespace hopfmean {

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::HopfUnstable: return "hopf_unstable";
    case Stability::OtherUnstable: return "other_unstable";
  }
  return "?";
}

const char* to_string(Criticality c) {
  switch (c) {
    case Criticality::Supercritical: return "supercritical";
    case Criticality::Subcritical: return "subcritical";
    case Criticality::Degenerate: return "degenerate";
  }
  return "?";
}

Equilibrium solve_equilibrium(const VectorFieldModel& model, double alpha, const Vec& x_guess,
                              const Cplx* previous_pair) {
  if (x_guess.size() != model.dimension())
    throw SolveError("guess has wrong dimension");
  if (!x_guess.allFinite()) throw SolveError("guess is not finite");

  const double ftol = 1e-12 * model.scale_norm();
  Vec x = x_guess;
  Vec f = model.rhs(x, alpha);
  for (int iter = 0; iter < 100 && f.norm() > ftol; ++iter) {
    Mat J = model.jacobian(x, alpha);
    Eigen::FullPivLU<Mat> lu(J);
    if (!lu.isInvertible())
      throw SolveError("singular Jacobian in Newton iteration at alpha=" +
                       std::to_string(alpha));
    Vec dx = lu.solve(-f);
    // damping: halve until the residual actually decreases
    double t = 1.0;
    Vec xn;
    Vec fn;
    int halvings = 0;
    for (;; ++halvings) {
      xn = x + t * dx;
      fn = model.rhs(xn, alpha);
      if (fn.allFinite() && fn.norm() < f.norm()) break;
      if (halvings >= 20)
        throw SolveError("Newton step failed to reduce the residual at alpha=" +
                         std::to_string(alpha));
      t /= 2;
    }
    x = xn;
    f = fn;
    if (t * dx.norm() <= 1e-14 * (1 + x.norm())) break;
  }
  if (f.norm() > ftol)
    throw SolveError("Newton did not converge at alpha=" + std::to_string(alpha) +
                     " (residual " + std::to_string(f.norm()) + ")");

  Equilibrium eq;
  eq.alpha = alpha;
  eq.x0 = x;
  eq.residual = f.norm();

  Mat A = model.jacobian(x, alpha);
  std::vector<Cplx> ev = eigen_all(A);
  double max_re = -std::numeric_limits<double>::infinity();
  for (const Cplx& l : ev) max_re = std::max(max_re, l.real());

  bool have_pair = false;
  try {
    eq.hopf = select_hopf_pair(A, previous_pair);
    have_pair = true;
  } catch (const SpectralError&) {
    // all-real spectrum: no pair to attach; stability still classified
  }
  if (max_re < 0)
    eq.stability = Stability::Stable;
  else if (have_pair && eq.hopf.lambda.real() >= max_re - 1e-12 * std::max(1.0, std::abs(max_re)))
    eq.stability = Stability::HopfUnstable;
  else
    eq.stability = Stability::OtherUnstable;
  return eq;
}

std::vector<Equilibrium> continue_equilibria(const VectorFieldModel& model,
                                             const std::vector<double>& alpha_grid,
                                             const Vec& x_guess) {
  std::vector<Equilibrium> out;
  out.reserve(alpha_grid.size());
  Vec guess = x_guess;
  Cplx prev;
  bool have_prev = false;
  for (double a : alpha_grid) {
    Equilibrium eq;
    try {
      eq = solve_equilibrium(model, a, guess, have_prev ? &prev : nullptr);
    } catch (const SolveError& e) {
      throw SolveError(std::string(e.what()) + " (continuation at alpha=" + std::to_string(a) +
                       ")");
    }
    guess = eq.x0;
    if (eq.hopf.q.size() > 0) {
      prev = eq.hopf.lambda;
      have_prev = true;
    }
    out.push_back(std::move(eq));
  }
  return out;
}

std::pair<double, double> mu_of_alpha(const VectorFieldModel& model, double alpha,
                                      const Vec& x_guess) {
  Equilibrium eq = solve_equilibrium(model, alpha, x_guess);
  if (eq.hopf.q.size() == 0)
    throw SpectralError("no complex eigenvalue pair at alpha=" + std::to_string(alpha));
  return {eq.hopf.lambda.real(), eq.hopf.lambda.imag()};
}

namespace {

/// Brent's method on [a,b] with f(a) f(b) < 0; terminates when |f| <= ftol
/// or the bracket shrinks below xtol.
template <class F>
double brent(F f, double a, double b, double fa, double fb, double xtol, double ftol) {
  double c = b, fc = fb, d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol1 = 2 * std::numeric_limits<double>::epsilon() * std::abs(b) + xtol / 2;
    double xm = (c - b) / 2;
    if (std::abs(xm) <= tol1 || std::abs(fb) <= ftol) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2 * xm * s;
        q = 1 - s;
      } else {
        double qq = fa / fc, r = fb / fc;
        p = s * (2 * xm * qq * (qq - r) - (b - a) * (r - 1));
        q = (qq - 1) * (r - 1) * (s - 1);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      double min1 = 3 * xm * q - std::abs(tol1 * q);
      double min2 = std::abs(e * q);
      if (2 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw SolveError("root finder stagnated");
}

}  // namespace

BifurcationPoint locate_bifurcation(const VectorFieldModel& model, double alpha_lo,
                                    double alpha_hi, const Vec& x_guess) {
  // continuation state threaded through the root-finder evaluations
  Vec seed = x_guess;
  Cplx prev;
  bool have_prev = false;
  auto mu_at = [&](double a) {
    Equilibrium eq = solve_equilibrium(model, a, seed, have_prev ? &prev : nullptr);
    if (eq.hopf.q.size() == 0)
      throw SpectralError("no complex eigenvalue pair at alpha=" + std::to_string(a));
    seed = eq.x0;
    prev = eq.hopf.lambda;
    have_prev = true;
    return eq.hopf.lambda.real();
  };

  double mu_lo = mu_at(alpha_lo);
  double mu_hi = mu_at(alpha_hi);
  if (mu_lo == 0 && mu_hi == 0)
    throw BracketError("mu vanishes at both endpoints");
  if (mu_lo * mu_hi > 0)
    throw BracketError("mu(alpha) does not change sign on [" + std::to_string(alpha_lo) + ", " +
                     std::to_string(alpha_hi) + "]: mu_lo=" + std::to_string(mu_lo) +
                     ", mu_hi=" + std::to_string(mu_hi));

  double xtol = 1e-13 * (1 + std::max(std::abs(alpha_lo), std::abs(alpha_hi)));
  double astar = brent(mu_at, alpha_lo, alpha_hi, mu_lo, mu_hi, xtol, 1e-14);

  Equilibrium eq_star = solve_equilibrium(model, astar, seed, have_prev ? &prev : nullptr);
  if (std::abs(eq_star.hopf.lambda.real()) > 1e-10)
    throw SolveError("bifurcation location did not reach |mu| <= 1e-10 (got " +
                     std::to_string(eq_star.hopf.lambda.real()) + ")");

  double da = 1e-5 * (1 + std::abs(astar));
  Cplx lam_star = eq_star.hopf.lambda;
  Vec seed2 = eq_star.x0;
  Equilibrium ep = solve_equilibrium(model, astar + da, seed2, &lam_star);
  Equilibrium em = solve_equilibrium(model, astar - da, seed2, &lam_star);
  double mu_prime = (ep.hopf.lambda.real() - em.hopf.lambda.real()) / (2 * da);

  NormalFormData nf = compute_normal_form(model, eq_star);

  BifurcationPoint bp;
  bp.alpha_star = astar;
  bp.omega0 = eq_star.hopf.lambda.imag();
  bp.mu_prime = mu_prime;
  bp.x0_star = eq_star.x0;
  bp.lyapunov_re_c1 = nf.ell1;
  if (std::abs(nf.ell1) <= 1e-10)
    bp.criticality = Criticality::Degenerate;
  else
    bp.criticality = nf.ell1 < 0 ? Criticality::Supercritical : Criticality::Subcritical;
  return bp;
}

}  // namespace hopfmean
