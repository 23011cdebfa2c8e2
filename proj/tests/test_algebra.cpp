#include <doctest.h>

#include <algorithm>

#include "algebra.hpp"
#include "helpers.hpp"

using namespace heom2q;
using namespace heom2q::test;

TEST_CASE("hermitian_eig agrees with Eigen on 1000 random Hermitian matrices") {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> dim(1, 8);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = trial < 600 ? 4 : static_cast<std::size_t>(dim(rng));
    const CMatrix m = random_hermitian(rng, n);
    const HermitianEig eig = hermitian_eig(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ref(to_eigen(m));

    REQUIRE(eig.values.size() == n);
    CHECK(std::is_sorted(eig.values.begin(), eig.values.end()));
    for (std::size_t k = 0; k < n; ++k) CHECK(eig.values[k] == doctest::Approx(ref.eigenvalues()(k)).epsilon(1e-10));

    const Eigen::MatrixXcd v = to_eigen(eig.vectors);
    const Eigen::MatrixXcd d = Eigen::VectorXd::Map(eig.values.data(), n).cast<cplx>().asDiagonal();
    CHECK((v * d * v.adjoint() - to_eigen(m)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((v.adjoint() * v - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("hermitian_eig handles degenerate spectra") {
  const CMatrix id = CMatrix::identity(4);
  const HermitianEig e = hermitian_eig(id);
  for (double v : e.values) CHECK(v == doctest::Approx(1.0));

  std::array<cplx, 4> ket{0.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0};
  const HermitianEig p = hermitian_eig(CMatrix::projector(ket));
  CHECK(p.values[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(p.values[3] == doctest::Approx(1.0));
  CHECK(std::abs(inner(p.vector(3), ket)) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
  CMatrix m(2, {0.0, 1.0, 0.0, 0.0});
  CHECK_THROWS_AS(hermitian_eig(m), AlgebraError);
}

TEST_CASE("psd_sqrt squares back and clamps only tiny negative eigenvalues") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix rho = random_density(rng, 4, 1 + trial % 4);
    const CMatrix s = psd_sqrt(rho);
    CHECK(max_abs(s * s - rho) < 1e-12);
    CHECK(hermiticity_defect(s) < 1e-14);
  }
  const std::array<double, 2> tiny{1.0, -5e-10};
  CHECK_NOTHROW(psd_sqrt(CMatrix::diagonal(tiny)));
  const std::array<double, 2> neg{1.0, -1e-6};
  CHECK_THROWS_AS(psd_sqrt(CMatrix::diagonal(neg)), AlgebraError);
}

TEST_CASE("products, kron and commutators match Eigen") {
  std::mt19937_64 rng(11);
  const CMatrix a = random_hermitian(rng, 2), b = random_hermitian(rng, 2);
  const CMatrix c = random_hermitian(rng, 4), d = random_hermitian(rng, 4);
  const Eigen::MatrixXcd ea = to_eigen(a), eb = to_eigen(b), ec = to_eigen(c), ed = to_eigen(d);

  Eigen::MatrixXcd k(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block(2 * i, 2 * j, 2, 2) = ea(i, j) * eb;
  CHECK((to_eigen(kron(a, b)) - k).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((to_eigen(c * d) - ec * ed).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((to_eigen(commutator(c, d)) - (ec * ed - ed * ec)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((to_eigen(anticommutator(c, d)) - (ec * ed + ed * ec)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(std::abs(c.trace() - ec.trace()) < 1e-14);
  CHECK_THROWS_AS(c * a, AlgebraError);
}

TEST_CASE("single-qubit operators use the (|1>, |0>) ordering") {
  CHECK(pauli::z()(0, 0) == cplx(1.0));
  CHECK(pauli::z()(1, 1) == cplx(-1.0));
  CHECK(pauli::raising()(0, 1) == cplx(1.0));
  CHECK(max_abs(pauli::raising() + pauli::lowering() - pauli::x()) == 0.0);
  CHECK(max_abs(commutator(pauli::x(), pauli::y()) - cplx(0.0, 2.0) * pauli::z()) < 1e-15);
}
