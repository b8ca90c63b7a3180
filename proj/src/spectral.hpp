#pragma once

#include "field.hpp"

namespace hopfmean {

struct SpectralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A simple complex-conjugate eigenvalue pair with right eigenvector q
/// (phase-fixed, unit norm) and left eigenvector p normalized so that
/// <p,q> = sum conj(p_k) q_k = 1.
struct HopfPair {
  Cplx lambda;
  CVec q;
  CVec p;
  double residual_right = 0;  // ||A q - lambda q|| / ||A||
  double residual_left = 0;   // ||p^H A - lambda p^H|| / ||A||
  double gap = 0;             // distance to the nearest other eigenvalue
};

/// All eigenvalues of A. 2x2 matrices use the closed-form quadratic
/// solution; larger ones defer to the QR iteration in Eigen.
std::vector<Cplx> eigen_all(const Mat& A);

/// Pick the complex pair with positive imaginary part closest to the axis
/// (largest real part among complex pairs), or, when `previous` is given,
/// the pair nearest to it -- used when continuing in a parameter.
/// Throws SpectralError if A has no complex eigenvalues or the selected
/// pair is not simple.
HopfPair select_hopf_pair(const Mat& A, const Cplx* previous = nullptr);

}  // namespace hopfmean
