// Independent reference computations and random system generators for the
// test suites. Nothing here calls into the peak search or winding code.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rssd/lti.hpp"

namespace rssd::testing {

inline double static_vgap(double k1, double k2) {
  return std::abs(k1 - k2) / std::sqrt((1.0 + k1 * k1) * (1.0 + k2 * k2));
}

inline StateSpacePlant scalar_tf(double num, double pole, std::string label = {}) {
  Matrix a(1, 1), b(1, 1), c(1, 1), d = Matrix::Zero(1, 1);
  a << pole;
  b << 1.0;
  c << num;
  return StateSpacePlant(a, b, c, d, std::move(label));
}

inline StateSpacePlant static_plant(double k) {
  return StateSpacePlant::static_gain(Matrix::Constant(1, 1, k));
}

// Real matrix with the requested eigenvalues (conjugate pairs given by their
// +imag member), hidden behind a random well-conditioned similarity.
inline Matrix matrix_with_spectrum(const std::vector<std::complex<double>>& eig,
                                   std::mt19937_64& rng) {
  int n = 0;
  for (const auto& e : eig) n += e.imag() != 0.0 ? 2 : 1;
  Matrix blocks = Matrix::Zero(n, n);
  int at = 0;
  for (const auto& e : eig) {
    if (e.imag() == 0.0) {
      blocks(at, at) = e.real();
      at += 1;
    } else {
      blocks(at, at) = e.real();
      blocks(at + 1, at + 1) = e.real();
      blocks(at, at + 1) = e.imag();
      blocks(at + 1, at) = -e.imag();
      at += 2;
    }
  }
  std::normal_distribution<double> normal;
  Matrix t(n, n);
  do {
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) t(i, k) = (i == k ? 2.0 : 0.0) + 0.5 * normal(rng);
  } while (Eigen::JacobiSVD<Matrix>(t).singularValues().minCoeff() < 0.3);
  return t * blocks * t.inverse();
}

inline Matrix random_matrix(int rows, int cols, std::mt19937_64& rng,
                            double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = normal(rng);
  return m;
}

// Random plant of order n; `unstable` eigenvalues get positive real parts.
inline StateSpacePlant random_plant(int n, int m, int r, std::mt19937_64& rng,
                                    int unstable = 0, bool feedthrough = false) {
  std::uniform_real_distribution<double> re(0.2, 3.0), im(0.3, 4.0), coin(0, 1);
  std::vector<std::complex<double>> eig;
  int placed = 0;
  while (placed < n) {
    const bool pair = n - placed >= 2 && coin(rng) < 0.4;
    const double sign = placed < unstable ? 1.0 : -1.0;
    if (pair) {
      eig.emplace_back(sign * re(rng), im(rng));
      placed += 2;
    } else {
      eig.emplace_back(sign * re(rng), 0.0);
      placed += 1;
    }
  }
  Matrix a = matrix_with_spectrum(eig, rng);
  Matrix d = feedthrough ? random_matrix(r, m, rng, 0.3) : Matrix::Zero(r, m);
  return StateSpacePlant(a, random_matrix(n, m, rng), random_matrix(r, n, rng), d);
}

// sigma_max of C (jw - A)^-1 B + D on 10^6 log-spaced points in
// [1e-4, 1e6] rad/s plus w = 0 and the infinite limit, through one
// eigendecomposition of A.
inline double dense_linf(const StateSpacePlant& sys, int points = 1000000) {
  const int n = sys.states();
  const CMatrix d = sys.d().cast<std::complex<double>>();
  double best = Eigen::JacobiSVD<CMatrix>(d).singularValues()(0);
  if (n == 0) return best;
  Eigen::EigenSolver<Matrix> es(sys.a());
  const CMatrix v = es.eigenvectors();
  const CVector lambda = es.eigenvalues();
  const CMatrix cv = sys.c().cast<std::complex<double>>() * v;
  const CMatrix vib = v.inverse() * sys.b().cast<std::complex<double>>();
  auto sigma = [&](double w) {
    CVector inv(n);
    for (int i = 0; i < n; ++i) inv(i) = 1.0 / (std::complex<double>(0.0, w) - lambda(i));
    const CMatrix g = cv * inv.asDiagonal() * vib + d;
    if (g.rows() == 1 && g.cols() == 1) return std::abs(g(0, 0));
    return Eigen::JacobiSVD<CMatrix>(g).singularValues()(0);
  };
  best = std::max(best, sigma(0.0));
  const double lo = std::log10(1e-4), hi = std::log10(1e6);
  for (int k = 0; k < points; ++k) {
    best = std::max(best, sigma(std::pow(10.0, lo + (hi - lo) * k / (points - 1))));
  }
  return best;
}

// Winding number of det(I + P2(-s)^T P1(s)) along the whole imaginary axis,
// w = tan(theta) on a uniform theta grid (no indentation: the plants must be
// free of imaginary-axis poles). Clockwise encirclements count positive, the
// orientation of the right-half-plane boundary traversed upward.
inline int dense_winding(const StateSpacePlant& p1, const StateSpacePlant& p2,
                         int points = 1000000) {
  auto det = [&](double w) {
    const std::complex<double> s(0.0, w);
    const CMatrix g1 = evaluate(p1, s);
    const CMatrix g2 = evaluate(p2, -s).transpose();
    const CMatrix m = CMatrix::Identity(g2.rows(), g1.cols()) + g2 * g1;
    return m.determinant();
  };
  const double half = std::numbers::pi / 2.0;
  double total = 0.0;
  std::complex<double> prev = det(std::tan(-half + 1e-9));
  for (int k = 1; k < points; ++k) {
    const double theta = -half + 1e-9 + (std::numbers::pi - 2e-9) * k / (points - 1);
    const std::complex<double> cur = det(std::tan(theta));
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(-total / (2.0 * std::numbers::pi)));
}

// Closed-loop state matrix for D = 0 plants under u = K y.
inline Matrix closed_loop_oracle(const StateSpacePlant& p, const Matrix& k) {
  return p.a() + p.b() * k * p.c();
}

inline bool hurwitz(const Matrix& a) {
  if (a.rows() == 0) return true;
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(a).eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    if (!(ev(i).real() < -1e-9)) return false;
  }
  return true;
}

}  // namespace rssd::testing
