#pragma once

#include <Eigen/Dense>
#include <numbers>
#include <random>

#include "algebra.hpp"
#include "model.hpp"

namespace heom2q::test {

inline constexpr double kPi = std::numbers::pi;

inline Eigen::MatrixXcd to_eigen(const CMatrix& m) {
  Eigen::MatrixXcd e(m.dim(), m.dim());
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) e(r, c) = m(r, c);
  return e;
}

inline CMatrix from_eigen(const Eigen::MatrixXcd& e) {
  CMatrix m(static_cast<std::size_t>(e.rows()));
  for (Eigen::Index r = 0; r < e.rows(); ++r)
    for (Eigen::Index c = 0; c < e.cols(); ++c) m(r, c) = e(r, c);
  return m;
}

inline Eigen::MatrixXcd random_complex(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n * n; ++i) a.data()[i] = {g(rng), g(rng)};
  return a;
}

inline CMatrix random_hermitian(std::mt19937_64& rng, std::size_t n) {
  const Eigen::MatrixXcd a = random_complex(rng, static_cast<Eigen::Index>(n));
  return from_eigen((a + a.adjoint()) * 0.5);
}

inline Eigen::MatrixXcd random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_complex(rng, n));
  return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

// Random density matrix of the given rank (Ginibre construction).
inline CMatrix random_density(std::mt19937_64& rng, std::size_t n, std::size_t rank) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, rank);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = {g(rng), g(rng)};
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace();
  return from_eigen(rho);
}

// Caption parameters shared by several figures.
inline ModelSpec fig2_baseline() {
  ModelSpec s;
  s.drive1 = {15.0, 4.0, 0.0, kPi};
  s.drive2 = {10.0, 7.0, 0.0, 0.0};
  s.bath.R = 1.0;
  return s;
}

inline ModelSpec fig12_parameters() {
  ModelSpec s;
  s.drive1 = {10.0, 0.3, 0.0, kPi};
  s.drive2 = {10.0, 0.3, 0.0, 0.0};
  s.bath.R = 1.0;
  return s;
}

inline InitialState state_of(StateKind kind, double p = 0.5) {
  InitialState s;
  s.kind = kind;
  s.p = p;
  return s;
}

}  // namespace heom2q::test
