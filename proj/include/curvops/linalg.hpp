#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvops/rng.hpp"

namespace curvops {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator+(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec operator*(double c, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

inline Vec negate(const Vec& a) { return -1.0 * a; }

/// Dense symmetric matrix, stored full row-major. Writes through set() keep
/// the two mirrored entries bitwise identical.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

  static SymMat identity(int n) {
    SymMat m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
  }

  static SymMat diag(const Vec& d) {
    SymMat m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n_; ++i) m.set(i, i, d[static_cast<std::size_t>(i)]);
    return m;
  }

  static SymMat outer(const Vec& v) {  // v v^T
    SymMat m(static_cast<int>(v.size()));
    for (int i = 0; i < m.n_; ++i)
      for (int j = 0; j <= i; ++j) m.set(i, j, v[i] * v[j]);
    return m;
  }

  int dim() const { return n_; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  void set(int i, int j, double v) {
    a_[static_cast<std::size_t>(i) * n_ + j] = v;
    a_[static_cast<std::size_t>(j) * n_ + i] = v;
  }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  double quad(const Vec& v) const {  // v^T A v
    double s = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) s += v[i] * (*this)(i, j) * v[j];
    return s;
  }

  Vec apply(const Vec& v) const {
    Vec r(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  double frobenius() const {
    double s = 0.0;
    for (double x : a_) s += x * x;
    return std::sqrt(s);
  }

  SymMat operator+(const SymMat& o) const {
    SymMat r(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] + o.a_[k];
    return r;
  }

  SymMat operator-(const SymMat& o) const {
    SymMat r(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] - o.a_[k];
    return r;
  }

  SymMat scaled(double c) const {
    SymMat r(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = c * a_[k];
    return r;
  }

  SymMat add_outer(const Vec& v, double c) const {  // A + c v v^T
    SymMat r = *this;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j <= i; ++j) r.set(i, j, r(i, j) + c * v[i] * v[j]);
    return r;
  }

  /// R^T A R for a (not necessarily symmetric) square matrix R given row-major.
  SymMat conjugated(const std::vector<double>& R) const {
    SymMat r(n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = 0.0;
        for (int k = 0; k < n_; ++k)
          for (int l = 0; l < n_; ++l)
            s += R[static_cast<std::size_t>(k) * n_ + i] * (*this)(k, l) *
                 R[static_cast<std::size_t>(l) * n_ + j];
        r.set(i, j, s);
      }
    }
    return r;
  }

 private:
  int n_ = 0;
  Vec a_;
};

/// Random symmetric matrix, entries i.i.d. uniform [-1,1] then symmetrized.
inline SymMat random_sym(int n, Rng& rng) {
  SymMat a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a.set(i, j, rng.uniform(-1.0, 1.0));
  return a;
}

inline SymMat random_psd(int n, Rng& rng) {  // B^T B with uniform B
  std::vector<double> b(static_cast<std::size_t>(n) * n);
  for (auto& x : b) x = rng.uniform(-1.0, 1.0);
  SymMat p(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += b[static_cast<std::size_t>(k) * n + i] * b[static_cast<std::size_t>(k) * n + j];
      p.set(i, j, s);
    }
  return p;
}

inline Vec random_unit(int n, Rng& rng) {
  Vec v(static_cast<std::size_t>(n));
  double nn = 0.0;
  do {
    for (auto& x : v) x = rng.normal();
    nn = norm(v);
  } while (nn < 1e-12);
  return (1.0 / nn) * v;
}

/// Sampling law for gradient slots: unit direction scaled by 10^u,
/// u uniform in [-2, 2], so magnitudes sweep four decades.
inline Vec random_grad(int n, Rng& rng) {
  const double scale = std::pow(10.0, rng.uniform(-2.0, 2.0));
  return scale * random_unit(n, rng);
}

/// Random orthogonal matrix (row-major) via Gram-Schmidt on a normal sample.
inline std::vector<double> random_rotation(int n, Rng& rng) {
  std::vector<double> q(static_cast<std::size_t>(n) * n);
  while (true) {
    std::vector<Vec> rows(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n)));
    for (auto& row : rows)
      for (auto& x : row) x = rng.normal();
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      for (int j = 0; j < i; ++j) rows[i] = rows[i] - dot(rows[i], rows[j]) * rows[j];
      const double nn = norm(rows[i]);
      if (nn < 1e-8) {
        ok = false;
        break;
      }
      rows[i] = (1.0 / nn) * rows[i];
    }
    if (!ok) continue;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) q[static_cast<std::size_t>(i) * n + j] = rows[i][j];
    return q;
  }
}

inline Vec mat_apply(const std::vector<double>& R, const Vec& v) {  // R v, row-major
  const int n = static_cast<int>(v.size());
  Vec r(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r[i] += R[static_cast<std::size_t>(i) * n + j] * v[j];
  return r;
}

/// R A R^T for orthogonal R: the conjugation matching v -> R v.
inline SymMat rotate_sym(const std::vector<double>& R, const SymMat& a) {
  const int n = a.dim();
  std::vector<double> rt(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      rt[static_cast<std::size_t>(i) * n + j] = R[static_cast<std::size_t>(j) * n + i];
  return a.conjugated(rt);
}

}  // namespace curvops
