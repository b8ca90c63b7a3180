#include "normalform.hpp"

#include <cmath>
#include <numbers>

namespace hopfmean {

namespace {

Cplx ip(const CVec& u, const CVec& v) { return (u.adjoint() * v)(0); }

/// <pbar, v> = sum_k p_k v_k (no conjugation) -- the projection onto
/// the conjugate eigendirection.
Cplx ip_bar(const CVec& p, const CVec& v) { return (p.transpose() * v)(0); }

void check_resonance(const Mat& A, const std::vector<Cplx>& spectrum, Cplx shift,
                     const char* label) {
  double Anorm = std::max(A.norm(), 1e-300);
  for (const Cplx& l : spectrum)
    if (std::abs(shift - l) <= 1e-8 * Anorm)
      throw NormalFormError(std::string("resonant shift ") + label +
                            ": distance to the spectrum is " +
                            std::to_string(std::abs(shift - l)));
}

Vec checked_real(const CVec& v, double tol, const char* label) {
  double imn = v.imag().norm();
  if (imn > tol)
    throw NormalFormError(std::string(label) + " has imaginary residue " + std::to_string(imn) +
                          " exceeding tolerance " + std::to_string(tol));
  return v.real();
}

}  // namespace

NormalFormData compute_normal_form(const VectorFieldModel& model, const Equilibrium& eq) {
  if (eq.hopf.q.size() == 0)
    throw NormalFormError("equilibrium carries no eigenpair");
  const int n = model.dimension();
  const Vec& x0 = eq.x0;
  const double alpha = eq.alpha;
  const Cplx lam = eq.hopf.lambda;
  const CVec& q = eq.hopf.q;
  const CVec& p = eq.hopf.p;
  const double scale = model.scale_norm();

  NormalFormData nf;
  nf.alpha = alpha;
  nf.x0 = x0;
  nf.hopf = eq.hopf;
  nf.res_pq = std::abs(ip(p, q) - Cplx(1, 0));
  nf.res_pqbar = std::abs(ip(p, q.conjugate()));

  CVec Bqq = model.bilinear(x0, alpha, q, q);
  CVec Bqqb = model.bilinear(x0, alpha, q, q.conjugate());
  CVec Bqbqb = model.bilinear(x0, alpha, q.conjugate(), q.conjugate());
  nf.g20 = ip(p, Bqq);
  nf.g11 = ip(p, Bqqb);
  nf.g02 = ip(p, Bqbqb);
  nf.g21 = ip(p, model.trilinear(x0, alpha, q, q, q.conjugate()));

  nf.H20 = Bqq - nf.g20 * q - ip_bar(p, Bqq) * q.conjugate();
  nf.H11 = Bqqb - nf.g11 * q - ip_bar(p, Bqqb) * q.conjugate();
  nf.H02 = nf.H20.conjugate();
  nf.res_im_H11 = nf.H11.imag().norm();
  if (nf.res_im_H11 > 1e-10 * scale)
    throw NormalFormError("Im H11 residue " + std::to_string(nf.res_im_H11) +
                          " exceeds tolerance");

  Mat A = model.jacobian(x0, alpha);
  std::vector<Cplx> spectrum = eigen_all(A);
  check_resonance(A, spectrum, 2.0 * lam, "2*lambda");
  check_resonance(A, spectrum, Cplx(2.0 * lam.real(), 0), "2*Re(lambda)");
  check_resonance(A, spectrum, 2.0 * std::conj(lam), "2*conj(lambda)");

  CMat Ac = A.cast<Cplx>();
  CMat I = CMat::Identity(n, n);
  nf.eta20 = (2.0 * lam * I - Ac).partialPivLu().solve(nf.H20);
  nf.eta11 = (Cplx(2.0 * lam.real(), 0) * I - Ac).partialPivLu().solve(nf.H11);
  nf.eta02 = nf.eta20.conjugate();
  nf.res_im_eta11 = nf.eta11.imag().norm();
  nf.eta11_real = checked_real(nf.eta11, 1e-9 * scale, "eta11");
  nf.res_p_eta = std::max({std::abs(ip(p, nf.eta20)), std::abs(ip(p, nf.eta11)),
                           std::abs(ip(p, nf.eta02))});
  if (nf.res_p_eta > 1e-9)
    throw NormalFormError("orthogonality residue |<p, eta_jk>| = " +
                          std::to_string(nf.res_p_eta) + " exceeds tolerance");

  nf.g21_tilde = nf.g21 + 2.0 * ip(p, model.bilinear(x0, alpha, q, nf.eta11)) +
                 ip(p, model.bilinear(x0, alpha, q.conjugate(), nf.eta20));

  if (std::abs(lam) < 1e-12) throw NormalFormError("lambda is numerically zero");
  if (std::abs(2.0 * lam - std::conj(lam)) < 1e-12)
    throw NormalFormError("2*lambda equals conj(lambda): c1 denominator vanishes");
  nf.c1 = (2.0 * lam + std::conj(lam)) / (2.0 * std::norm(lam)) * nf.g20 * nf.g11 +
          std::norm(nf.g11) / lam + std::norm(nf.g02) / (2.0 * (2.0 * lam - std::conj(lam))) +
          0.5 * nf.g21_tilde;
  nf.ell1 = nf.c1.real();

  nf.h20 = nf.g20 / lam;
  nf.h11 = nf.g11 / std::conj(lam);
  nf.h02 = nf.g02 / (2.0 * std::conj(lam) - lam);
  return nf;
}

Vec compute_K(const NormalFormData& nf) {
  if (std::abs(nf.ell1) <= 1e-10)
    throw DegenerateError("Re(c1) = " + std::to_string(nf.ell1) +
                          " is degenerate; K is undefined");
  Cplx G = 2.0 * nf.g11 / (std::conj(nf.hopf.lambda) * nf.ell1);
  Vec K = -G.real() * nf.hopf.q.real() + G.imag() * nf.hopf.q.imag() - nf.eta11_real / nf.ell1;
  return K;
}

MeanPrediction predict_mean(const Equilibrium& eq, const NormalFormData& nf) {
  MeanPrediction mp;
  mp.mu = nf.hopf.lambda.real();
  mp.K = compute_K(nf);
  mp.criticality = nf.ell1 < 0 ? Criticality::Supercritical : Criticality::Subcritical;
  double rw2 = -mp.mu / nf.ell1;
  if (rw2 > 0) {
    mp.cycle_predicted = true;
    mp.r_w = std::sqrt(rw2);
    mp.omega_w = nf.hopf.lambda.imag() - (nf.c1.imag() / nf.ell1) * mp.mu;
    mp.predicted_mean = eq.x0 + mp.K * mp.mu;
  } else {
    mp.cycle_predicted = false;
    mp.omega_w = nf.hopf.lambda.imag();
    mp.predicted_mean = eq.x0;
  }
  return mp;
}

std::vector<Vec> predict_orbit(const VectorFieldModel& model, const Equilibrium& eq,
                               const NormalFormData& nf, int samples, bool cubic) {
  MeanPrediction mp = predict_mean(eq, nf);
  if (!mp.cycle_predicted) throw NormalFormError("no cycle is predicted at this alpha");
  const Cplx lam = nf.hopf.lambda;
  const CVec& q = nf.hopf.q;
  const CVec& p = nf.hopf.p;
  Cplx h30 = 0, h12 = 0, h03 = 0;
  if (cubic) {
    Cplx g30 = (p.adjoint() * model.trilinear(eq.x0, eq.alpha, q, q, q))(0);
    Cplx g12 =
        (p.adjoint() * model.trilinear(eq.x0, eq.alpha, q, q.conjugate(), q.conjugate()))(0);
    Cplx g03 = (p.adjoint() *
                model.trilinear(eq.x0, eq.alpha, q.conjugate(), q.conjugate(), q.conjugate()))(0);
    h30 = g30 / (2.0 * lam);
    h12 = g12 / (2.0 * std::conj(lam));
    h03 = g03 / (3.0 * std::conj(lam) - lam);
  }
  const double rw = *mp.r_w;
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    double phase = 2 * std::numbers::pi * i / samples;
    Cplx w = rw * std::exp(Cplx(0, phase));
    Cplx wb = std::conj(w);
    Cplx z = w + 0.5 * nf.h20 * w * w + nf.h11 * w * wb + 0.5 * nf.h02 * wb * wb;
    if (cubic)
      z += h30 / 6.0 * w * w * w + 0.5 * h12 * w * wb * wb + h03 / 6.0 * wb * wb * wb;
    // x = x0 + z q + conj(z) conj(q) + V(z, zbar), all exactly real
    CVec x = z * q + std::conj(z) * q.conjugate() + 0.5 * z * z * nf.eta20 +
             std::norm(z) * nf.eta11 + 0.5 * std::conj(z * z) * nf.eta02;
    out.push_back(eq.x0 + x.real());
  }
  return out;
}

Vec oigm_gain_jump(const BifurcationPoint& bp, const NormalFormData& nf_at_star) {
  if (std::abs(bp.mu_prime) < 1e-12)
    throw NormalFormError("transversality failure: mu'(alpha*) is numerically zero");
  return compute_K(nf_at_star) * bp.mu_prime;
}

Analysis analyze(const VectorFieldModel& model, double alpha, const Vec& x_guess,
                 const Cplx* previous_pair) {
  Analysis a;
  a.eq = solve_equilibrium(model, alpha, x_guess, previous_pair);
  a.nf = compute_normal_form(model, a.eq);
  a.pred = predict_mean(a.eq, a.nf);
  return a;
}

}  // namespace hopfmean
