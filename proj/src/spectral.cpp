#include "spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace hopfmean {

std::vector<Cplx> eigen_all(const Mat& A) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw SpectralError("matrix is not square");
  if (n == 2) {
    // closed form for the characteristic quadratic
    double tr = A(0, 0) + A(1, 1);
    double det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    double disc = tr * tr / 4 - det;
    if (disc >= 0) {
      double s = std::sqrt(disc);
      return {Cplx(tr / 2 + s, 0), Cplx(tr / 2 - s, 0)};
    }
    double w = std::sqrt(-disc);
    return {Cplx(tr / 2, w), Cplx(tr / 2, -w)};
  }
  Eigen::EigenSolver<Mat> es(A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw SpectralError("eigenvalue iteration failed");
  std::vector<Cplx> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
  return out;
}

namespace {

/// Unit null vector of M via SVD (smallest singular direction).
CVec null_vector(const CMat& M) {
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullV);
  return svd.matrixV().col(M.cols() - 1);
}

}  // namespace

HopfPair select_hopf_pair(const Mat& A, const Cplx* previous) {
  const int n = static_cast<int>(A.rows());
  std::vector<Cplx> ev = eigen_all(A);
  double Anorm = std::max(A.norm(), 1e-300);

  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (ev[static_cast<std::size_t>(i)].imag() <= 0) continue;
    double score = previous ? -std::abs(ev[static_cast<std::size_t>(i)] - *previous)
                            : ev[static_cast<std::size_t>(i)].real();
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  if (best < 0) throw SpectralError("no complex eigenvalue pair present");
  Cplx lam = ev[static_cast<std::size_t>(best)];

  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    if (i != best) gap = std::min(gap, std::abs(ev[static_cast<std::size_t>(i)] - lam));
  if (gap <= 1e-8 * Anorm)
    throw SpectralError("selected eigenvalue pair is not simple (gap " + std::to_string(gap) +
                        ")");

  CMat Ac = A.cast<Cplx>();
  CMat I = CMat::Identity(n, n);
  CVec q = null_vector(Ac - lam * I);
  CVec p = null_vector(Ac.adjoint() - std::conj(lam) * I);

  // fix the gauge: largest-magnitude component of q real positive, unit norm
  int k = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(q[i]) > std::abs(q[k])) k = i;
  q *= std::conj(q[k]) / std::abs(q[k]);
  q /= q.norm();

  Cplx pq = (p.adjoint() * q)(0);
  if (std::abs(pq) < 1e-12)
    throw SpectralError("left/right eigenvectors are numerically orthogonal");
  p /= std::conj(pq);

  HopfPair hp;
  hp.lambda = lam;
  hp.q = q;
  hp.p = p;
  hp.gap = gap;
  hp.residual_right = (Ac * q - lam * q).norm() / Anorm;
  hp.residual_left = (Ac.adjoint() * p - std::conj(lam) * p).norm() / Anorm;
  if (hp.residual_right > 1e-10 || hp.residual_left > 1e-10)
    throw SpectralError("eigenpair residual too large: right " +
                        std::to_string(hp.residual_right) + ", left " +
                        std::to_string(hp.residual_left));
  Cplx pqbar = (p.adjoint() * q.conjugate())(0);
  if (std::abs(pqbar) > 1e-10)
    throw SpectralError("biorthogonality failure: |<p, conj(q)>| = " +
                        std::to_string(std::abs(pqbar)));
  return hp;
}

}  // namespace hopfmean
