#pragma once

#include <optional>

#include "equilibria.hpp"

namespace hopfmean {

struct NormalFormError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateError : NormalFormError {
  using NormalFormError::NormalFormError;
};

/// Poincare normal-form data at one equilibrium: quadratic/cubic
/// projections g_jk, the transverse quadratic data H_jk / eta_jk (zero
/// for n = 2), the resonant cubic coefficient c1 and its real part ell1.
/// h21 is identically zero by the normalization choice; the cubic
/// h-scalars are filled in lazily by predict_orbit when requested.
struct NormalFormData {
  double alpha = 0;
  Vec x0;
  HopfPair hopf;

  Cplx g20, g11, g02, g21;
  Cplx g21_tilde;
  CVec H20, H11, H02;
  CVec eta20, eta11, eta02;
  Vec eta11_real;  // checked-real part of eta11, used by K

  Cplx h20, h11, h02;
  Cplx c1;
  double ell1 = 0;

  // residuals recorded for reporting
  double res_pq = 0;       // |<p,q> - 1|
  double res_pqbar = 0;    // |<p, conj(q)>|
  double res_im_H11 = 0;   // ||Im H11||
  double res_im_eta11 = 0; // ||Im eta11||
  double res_p_eta = 0;    // max_jk |<p, eta_jk>|
};

struct MeanPrediction {
  Vec K;
  double mu = 0;
  std::optional<double> r_w;
  double omega_w = 0;
  Vec predicted_mean;
  bool cycle_predicted = false;
  Criticality criticality = Criticality::Degenerate;
};

struct Analysis {
  Equilibrium eq;
  NormalFormData nf;
  MeanPrediction pred;
};

/// Assemble all normal-form quantities at eq via the model's tensors.
/// Checks resonance distances and "should be real" residuals; any
/// violation is an error, never a silent truncation.
NormalFormData compute_normal_form(const VectorFieldModel& model, const Equilibrium& eq);

/// Mean-deviation direction K; throws DegenerateError when |Re c1| <= 1e-10.
Vec compute_K(const NormalFormData& nf);

MeanPrediction predict_mean(const Equilibrium& eq, const NormalFormData& nf);

/// One predicted cycle, `samples` uniform phases over [0, 2*pi/omega_w).
/// Quadratic embedding always; cubic h-terms on request (three extra
/// third-order tensor contractions).
std::vector<Vec> predict_orbit(const VectorFieldModel& model, const Equilibrium& eq,
                               const NormalFormData& nf, int samples, bool cubic = false);

/// Gain jump of d<x>/dalpha at the bifurcation: K(alpha*) * mu'(alpha*).
Vec oigm_gain_jump(const BifurcationPoint& bp, const NormalFormData& nf_at_star);

/// solve + eigenpair + normal form + prediction in one call.
Analysis analyze(const VectorFieldModel& model, double alpha, const Vec& x_guess,
                 const Cplx* previous_pair = nullptr);

}  // namespace hopfmean
