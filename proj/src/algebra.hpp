#pragma once

// Small dense complex linear algebra: products, tensor products,
// commutators, Hermitian eigendecomposition and PSD square roots.
// Matrices here are tiny (4x4 for the qubit pair, up to ~128x128 for the
// dilated oracle), so everything is dense and row-major.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace heom2q {

using cplx = std::complex<double>;

class AlgebraError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  CMatrix(std::size_t dim, std::initializer_list<cplx> rowMajor);

  static CMatrix identity(std::size_t dim);
  static CMatrix diagonal(std::span<const double> diag);
  static CMatrix projector(std::span<const cplx> ket);

  std::size_t dim() const { return dim_; }
  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }
  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  CMatrix adjoint() const;
  CMatrix conj() const;
  cplx trace() const;

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(cplx s);

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
  friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
  bool operator==(const CMatrix&) const = default;

  // Matrix-vector product.
  std::vector<cplx> apply(std::span<const cplx> v) const;

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

struct HermitianEig {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // column k is the eigenvector of values[k]

  std::vector<cplx> vector(std::size_t k) const;
};

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix commutator(const CMatrix& a, const CMatrix& b);
CMatrix anticommutator(const CMatrix& a, const CMatrix& b);

// Max-entry norm, used for all tolerance checks.
double max_abs(const CMatrix& m);
double hermiticity_defect(const CMatrix& m);

// Cyclic complex Jacobi. Input must be Hermitian within 1e-9 (max-entry);
// it is symmetrized before the sweep. Deterministic for identical input.
HermitianEig hermitian_eig(const CMatrix& m);

// Principal square root of a Hermitian PSD matrix. Eigenvalues in
// [-1e-9, 0) are clamped to zero; anything more negative is rejected.
CMatrix psd_sqrt(const CMatrix& m);

// Inner product <a|b>.
cplx inner(std::span<const cplx> a, std::span<const cplx> b);

namespace pauli {
// Single-qubit operators in the (|1>, |0>) ordering.
CMatrix identity();
CMatrix x();
CMatrix y();
CMatrix z();
CMatrix raising();   // |1><0|
CMatrix lowering();  // |0><1|
}  // namespace pauli

}  // namespace heom2q
