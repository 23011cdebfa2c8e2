#include "algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace heom2q {

namespace {

void require_same_dim(const CMatrix& a, const CMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw AlgebraError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                       " vs " + std::to_string(b.dim()) + ")");
  }
}

constexpr double kHermitianTol = 1e-9;

}  // namespace

CMatrix::CMatrix(std::size_t dim, std::initializer_list<cplx> rowMajor) : dim_(dim), data_(rowMajor) {
  if (data_.size() != dim * dim) throw AlgebraError("CMatrix: initializer size does not match dim^2");
}

CMatrix CMatrix::identity(std::size_t dim) {
  CMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const double> diag) {
  CMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix CMatrix::projector(std::span<const cplx> ket) {
  CMatrix m(ket.size());
  for (std::size_t r = 0; r < ket.size(); ++r)
    for (std::size_t c = 0; c < ket.size(); ++c) m(r, c) = ket[r] * std::conj(ket[c]);
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

CMatrix CMatrix::conj() const {
  CMatrix out(dim_);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = std::conj(data_[i]);
  return out;
}

cplx CMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  require_same_dim(*this, o, "operator+");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  require_same_dim(*this, o, "operator-");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "operator*");
  const std::size_t n = a.dim();
  CMatrix out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      const cplx av = a(r, k);
      if (av == cplx{}) continue;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += av * b(k, c);
    }
  return out;
}

std::vector<cplx> CMatrix::apply(std::span<const cplx> v) const {
  if (v.size() != dim_) throw AlgebraError("apply: vector length does not match matrix dimension");
  std::vector<cplx> out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out[r] += (*this)(r, c) * v[c];
  return out;
}

std::vector<cplx> HermitianEig::vector(std::size_t k) const {
  std::vector<cplx> v(vectors.dim());
  for (std::size_t r = 0; r < v.size(); ++r) v[r] = vectors(r, k);
  return v;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  CMatrix out(na * nb);
  for (std::size_t ar = 0; ar < na; ++ar)
    for (std::size_t ac = 0; ac < na; ++ac) {
      const cplx av = a(ar, ac);
      if (av == cplx{}) continue;
      for (std::size_t br = 0; br < nb; ++br)
        for (std::size_t bc = 0; bc < nb; ++bc) out(ar * nb + br, ac * nb + bc) = av * b(br, bc);
    }
  return out;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }
CMatrix anticommutator(const CMatrix& a, const CMatrix& b) { return a * b + b * a; }

double max_abs(const CMatrix& m) {
  double best = 0.0;
  for (const auto& v : m.data()) best = std::max(best, std::abs(v));
  return best;
}

double hermiticity_defect(const CMatrix& m) { return max_abs(m - m.adjoint()); }

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

HermitianEig hermitian_eig(const CMatrix& m) {
  const std::size_t n = m.dim();
  if (hermiticity_defect(m) > kHermitianTol) {
    throw AlgebraError("hermitian_eig: input is not Hermitian (defect " +
                       std::to_string(hermiticity_defect(m)) + ")");
  }
  CMatrix a = (m + m.adjoint()) * 0.5;
  CMatrix v = CMatrix::identity(n);

  double scale = 0.0;
  for (const auto& x : a.data()) scale += std::norm(x);
  scale = std::sqrt(scale);
  const double threshold = 1e-15 * std::max(scale, 1e-300);

  auto offdiag = [&] {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = r + 1; c < n; ++c) s += std::norm(a(r, c));
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && offdiag() > threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300) continue;
        // Phase-rotate q so that a(p,q) becomes real, then apply a real
        // Jacobi rotation that annihilates it.
        const cplx phase = apq / mag;
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // G restricted to (p,q): [[c, s], [-s*conj(phase), c*conj(phase)]]
        const cplx gpp = c, gpq = s;
        const cplx gqp = -s * std::conj(phase), gqq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  HermitianEig out;
  out.values.resize(n);
  out.vectors = CMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

CMatrix psd_sqrt(const CMatrix& m) {
  const HermitianEig eig = hermitian_eig(m);
  const std::size_t n = m.dim();
  CMatrix out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double ev = eig.values[k];
    if (ev < -1e-9) {
      throw AlgebraError("psd_sqrt: matrix is not positive semidefinite (eigenvalue " + std::to_string(ev) + ")");
    }
    const double root = std::sqrt(std::max(ev, 0.0));
    if (root == 0.0) continue;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        out(r, c) += root * eig.vectors(r, k) * std::conj(eig.vectors(c, k));
  }
  return out;
}

namespace pauli {
CMatrix identity() { return CMatrix::identity(2); }
CMatrix x() { return CMatrix(2, {0.0, 1.0, 1.0, 0.0}); }
CMatrix y() { return CMatrix(2, {0.0, cplx(0, -1), cplx(0, 1), 0.0}); }
CMatrix z() { return CMatrix(2, {1.0, 0.0, 0.0, -1.0}); }
CMatrix raising() { return CMatrix(2, {0.0, 1.0, 0.0, 0.0}); }
CMatrix lowering() { return CMatrix(2, {0.0, 0.0, 1.0, 0.0}); }
}  // namespace pauli

}  // namespace heom2q
