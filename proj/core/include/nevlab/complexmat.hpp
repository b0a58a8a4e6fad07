#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>

namespace nevlab {

using cplx = std::complex<double>;

// Everything in this laboratory lives in complex dimension m <= 3, so the
// linear algebra kernel is a fixed-capacity dense matrix with closed-form-scale
// algorithms (partial-pivot LU, Cholesky). Capacity 4 covers homogeneous
// coordinate blocks of size (m+1).
inline constexpr int kMaxDim = 4;

class CVec {
public:
  CVec() : n_(0) {}
  explicit CVec(int n, cplx fill = cplx(0.0, 0.0)) : n_(n) {
    if (n < 0 || n > kMaxDim) throw std::invalid_argument("CVec: bad dimension");
    for (int i = 0; i < n_; ++i) v_[i] = fill;
  }
  CVec(std::initializer_list<cplx> xs) : n_(static_cast<int>(xs.size())) {
    if (n_ > kMaxDim) throw std::invalid_argument("CVec: bad dimension");
    int i = 0;
    for (const cplx& x : xs) v_[i++] = x;
  }

  int size() const { return n_; }
  cplx& operator[](int i) { return v_[i]; }
  const cplx& operator[](int i) const { return v_[i]; }

  double norm2() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += std::norm(v_[i]);
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }

private:
  int n_;
  std::array<cplx, kMaxDim> v_{};
};

// <a,b> = sum_i a_i conj(b_i)
inline cplx hdot(const CVec& a, const CVec& b) {
  cplx s(0.0, 0.0);
  for (int i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

class CMat {
public:
  CMat() : r_(0), c_(0) {}
  CMat(int rows, int cols, cplx fill = cplx(0.0, 0.0)) : r_(rows), c_(cols) {
    if (rows < 0 || rows > kMaxDim || cols < 0 || cols > kMaxDim)
      throw std::invalid_argument("CMat: bad shape");
    for (int i = 0; i < r_ * c_; ++i) a_[i] = fill;
  }
  static CMat identity(int n) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  cplx& operator()(int i, int j) { return a_[i * c_ + j]; }
  const cplx& operator()(int i, int j) const { return a_[i * c_ + j]; }

  CMat adjoint() const {
    CMat m(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }

  CMat operator*(const CMat& o) const {
    if (c_ != o.r_) throw std::invalid_argument("CMat: shape mismatch in *");
    CMat m(r_, o.c_);
    for (int i = 0; i < r_; ++i)
      for (int k = 0; k < c_; ++k) {
        const cplx aik = (*this)(i, k);
        for (int j = 0; j < o.c_; ++j) m(i, j) += aik * o(k, j);
      }
    return m;
  }
  CVec operator*(const CVec& v) const {
    if (c_ != v.size()) throw std::invalid_argument("CMat: shape mismatch in *v");
    CVec out(r_);
    for (int i = 0; i < r_; ++i) {
      cplx s(0.0, 0.0);
      for (int j = 0; j < c_; ++j) s += (*this)(i, j) * v[j];
      out[i] = s;
    }
    return out;
  }
  CMat operator+(const CMat& o) const {
    CMat m(r_, c_);
    for (int i = 0; i < r_ * c_; ++i) m.a_[i] = a_[i] + o.a_[i];
    return m;
  }
  CMat operator-(const CMat& o) const {
    CMat m(r_, c_);
    for (int i = 0; i < r_ * c_; ++i) m.a_[i] = a_[i] - o.a_[i];
    return m;
  }
  CMat operator*(cplx s) const {
    CMat m(r_, c_);
    for (int i = 0; i < r_ * c_; ++i) m.a_[i] = a_[i] * s;
    return m;
  }

  cplx trace() const {
    cplx s(0.0, 0.0);
    for (int i = 0; i < r_; ++i) s += (*this)(i, i);
    return s;
  }

  // Determinant by partial-pivot LU.
  cplx det() const {
    CMat lu = *this;
    int n = r_;
    cplx d(1.0, 0.0);
    for (int k = 0; k < n; ++k) {
      int p = k;
      double best = std::abs(lu(k, k));
      for (int i = k + 1; i < n; ++i)
        if (std::abs(lu(i, k)) > best) { best = std::abs(lu(i, k)); p = i; }
      if (best == 0.0) return cplx(0.0, 0.0);
      if (p != k) {
        for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
        d = -d;
      }
      d *= lu(k, k);
      for (int i = k + 1; i < n; ++i) {
        cplx f = lu(i, k) / lu(k, k);
        for (int j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
      }
    }
    return d;
  }

  CMat inverse() const {
    int n = r_;
    CMat aug = *this;
    CMat inv = identity(n);
    for (int k = 0; k < n; ++k) {
      int p = k;
      double best = std::abs(aug(k, k));
      for (int i = k + 1; i < n; ++i)
        if (std::abs(aug(i, k)) > best) { best = std::abs(aug(i, k)); p = i; }
      if (best == 0.0) throw std::runtime_error("CMat: singular matrix in inverse");
      if (p != k)
        for (int j = 0; j < n; ++j) {
          std::swap(aug(k, j), aug(p, j));
          std::swap(inv(k, j), inv(p, j));
        }
      cplx piv = aug(k, k);
      for (int j = 0; j < n; ++j) { aug(k, j) /= piv; inv(k, j) /= piv; }
      for (int i = 0; i < n; ++i) {
        if (i == k) continue;
        cplx f = aug(i, k);
        if (f == cplx(0.0, 0.0)) continue;
        for (int j = 0; j < n; ++j) {
          aug(i, j) -= f * aug(k, j);
          inv(i, j) -= f * inv(k, j);
        }
      }
    }
    return inv;
  }

  // Cholesky factor L (lower), A = L L^H. Requires Hermitian positive definite.
  CMat cholesky() const {
    int n = r_;
    CMat L(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        cplx s = (*this)(i, j);
        for (int k = 0; k < j; ++k) s -= L(i, k) * std::conj(L(j, k));
        if (i == j) {
          double d = s.real();
          if (d <= 0.0 || !std::isfinite(d))
            throw std::runtime_error("CMat: not positive definite in cholesky");
          L(i, j) = std::sqrt(d);
        } else {
          L(i, j) = s / L(j, j);
        }
      }
    }
    return L;
  }

  bool is_positive_definite() const {
    try { (void)cholesky(); return true; } catch (const std::runtime_error&) { return false; }
  }

private:
  int r_, c_;
  std::array<cplx, kMaxDim * kMaxDim> a_{};
};

// tr(G^{-1} H) for Hermitian G (positive definite) and H.
inline cplx trace_against(const CMat& G, const CMat& H) {
  return (G.inverse() * H).trace();
}

}  // namespace nevlab
