#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>

#include "doctest.h"
#include "spectral.hpp"

using namespace hopfmean;

namespace {

void check_pair_invariants(const Mat& A, const HopfPair& hp) {
  CHECK(hp.lambda.imag() > 0);
  CHECK((A.cast<Cplx>() * hp.q - hp.lambda * hp.q).norm() <= 1e-9 * std::max(1.0, A.norm()));
  CHECK((hp.p.adjoint() * A.cast<Cplx>() - hp.lambda * hp.p.adjoint()).norm() <=
        1e-9 * std::max(1.0, A.norm()));
  CHECK(std::abs((hp.p.adjoint() * hp.q)(0) - Cplx(1, 0)) <= 1e-10);
  CHECK(std::abs((hp.p.adjoint() * hp.q.conjugate())(0)) <= 1e-9);
  // phase convention: the largest component of q is real and positive
  int kmax = 0;
  for (int i = 1; i < hp.q.size(); ++i)
    if (std::abs(hp.q[i]) > std::abs(hp.q[kmax])) kmax = i;
  CHECK(std::abs(hp.q[kmax].imag()) <= 1e-12);
  CHECK(hp.q[kmax].real() > 0);
  CHECK(hp.q.norm() == doctest::Approx(1.0));
}

}  // namespace

TEST_CASE("2x2 closed form matches known spectra") {
  Mat R(2, 2);
  R << 0, -3, 3, 0;  // eigenvalues +-3i
  auto ev = eigen_all(R);
  REQUIRE(ev.size() == 2);
  std::sort(ev.begin(), ev.end(), [](Cplx a, Cplx b) { return a.imag() < b.imag(); });
  CHECK(std::abs(ev[0] - Cplx(0, -3)) <= 1e-14);
  CHECK(std::abs(ev[1] - Cplx(0, 3)) <= 1e-14);

  Mat T(2, 2);
  T << 2, 1, 0, -5;  // real eigenvalues 2, -5
  ev = eigen_all(T);
  std::sort(ev.begin(), ev.end(), [](Cplx a, Cplx b) { return a.real() < b.real(); });
  CHECK(std::abs(ev[0] - Cplx(-5, 0)) <= 1e-13);
  CHECK(std::abs(ev[1] - Cplx(2, 0)) <= 1e-13);
}

TEST_CASE("2x2 closed form agrees with the QR path on random matrices") {
  std::mt19937 rng(99);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    Mat A(2, 2);
    for (int i = 0; i < 4; ++i) A(i / 2, i % 2) = g(rng);
    auto mine = eigen_all(A);
    Eigen::EigenSolver<Mat> es(A);
    std::vector<Cplx> ref{es.eigenvalues()[0], es.eigenvalues()[1]};
    auto key = [](Cplx a, Cplx b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    };
    std::sort(mine.begin(), mine.end(), key);
    std::sort(ref.begin(), ref.end(), key);
    for (int i = 0; i < 2; ++i)
      CHECK(std::abs(mine[static_cast<std::size_t>(i)] - ref[static_cast<std::size_t>(i)]) <=
            1e-10 * std::max(1.0, A.norm()));
  }
}

TEST_CASE("hopf pair selection and invariants") {
  Mat A(2, 2);
  A << 0.1, -2, 2, 0.1;  // 0.1 +- 2i
  HopfPair hp = select_hopf_pair(A);
  CHECK(std::abs(hp.lambda - Cplx(0.1, 2)) <= 1e-12);
  check_pair_invariants(A, hp);
}

TEST_CASE("selection picks the complex pair with the largest real part") {
  // block diag: pair at -1 +- i, pair at -0.2 +- 3i
  Mat A = Mat::Zero(4, 4);
  A(0, 0) = -1; A(0, 1) = -1; A(1, 0) = 1; A(1, 1) = -1;
  A(2, 2) = -0.2; A(2, 3) = -3; A(3, 2) = 3; A(3, 3) = -0.2;
  HopfPair hp = select_hopf_pair(A);
  CHECK(std::abs(hp.lambda - Cplx(-0.2, 3)) <= 1e-10);
  check_pair_invariants(A, hp);

  // with a previous eigenvalue nearby, continuation overrides the default
  Cplx prev(-1.05, 0.9);
  hp = select_hopf_pair(A, &prev);
  CHECK(std::abs(hp.lambda - Cplx(-1, 1)) <= 1e-10);
  check_pair_invariants(A, hp);
}

TEST_CASE("3x3 with a real eigenvalue alongside the pair") {
  Mat A = Mat::Zero(3, 3);
  A(0, 0) = -0.5;
  A(1, 1) = 0.05; A(1, 2) = -1.3; A(2, 1) = 1.3; A(2, 2) = 0.05;
  HopfPair hp = select_hopf_pair(A);
  CHECK(std::abs(hp.lambda - Cplx(0.05, 1.3)) <= 1e-12);
  check_pair_invariants(A, hp);
  CHECK(hp.gap > 0.1);
}

TEST_CASE("all-real spectrum throws") {
  Mat A(2, 2);
  A << 1, 0, 0, -2;
  CHECK_THROWS_AS((void)select_hopf_pair(A), SpectralError);
  Mat B(3, 3);
  B.setZero();
  B(0, 0) = 1; B(1, 1) = 2; B(2, 2) = 3;
  CHECK_THROWS_AS((void)select_hopf_pair(B), SpectralError);
}

TEST_CASE("random rotation-conjugated spectra keep invariants") {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 25; ++trial) {
    // build A = S D S^-1 with known complex pair mu +- i omega
    double mu = g(rng) * 0.1, om = 0.5 + std::abs(g(rng));
    Mat D = Mat::Zero(4, 4);
    D(0, 0) = mu; D(0, 1) = -om; D(1, 0) = om; D(1, 1) = mu;
    D(2, 2) = mu - 1.0;
    D(3, 3) = mu - 2.5;
    Mat S(4, 4);
    do {
      for (int i = 0; i < 16; ++i) S(i / 4, i % 4) = g(rng);
    } while (std::abs(S.determinant()) < 0.1);
    Mat A = S * D * S.inverse();
    HopfPair hp = select_hopf_pair(A);
    CHECK(std::abs(hp.lambda - Cplx(mu, om)) <= 1e-8 * std::max(1.0, A.norm()));
    check_pair_invariants(A, hp);
  }
}
