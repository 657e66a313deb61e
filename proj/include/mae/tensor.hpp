#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace mae {

/// Symmetric 2x2 matrix [[a11, a12], [a12, a22]].
struct Sym2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  static constexpr Sym2 identity() { return {1.0, 0.0, 1.0}; }
  static constexpr Sym2 diagonal(double d1, double d2) { return {d1, 0.0, d2}; }

  double det() const { return a11 * a22 - a12 * a12; }
  double trace() const { return a11 + a22; }

  /// Eigenvalues, largest first.
  std::pair<double, double> eigenvalues() const {
    const double mean = 0.5 * (a11 + a22);
    const double radius = std::hypot(0.5 * (a11 - a22), a12);
    return {mean + radius, mean - radius};
  }
  double min_eigenvalue() const { return eigenvalues().second; }

  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d m;
    m << a11, a12, a12, a22;
    return m;
  }
  Eigen::Vector2d operator*(const Eigen::Vector2d& v) const {
    return {a11 * v.x() + a12 * v.y(), a12 * v.x() + a22 * v.y()};
  }

  Sym2& operator+=(const Sym2& o) {
    a11 += o.a11;
    a12 += o.a12;
    a22 += o.a22;
    return *this;
  }
  friend Sym2 operator+(Sym2 a, const Sym2& b) { return a += b; }
  friend Sym2 operator-(const Sym2& a, const Sym2& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a22 - b.a22};
  }
  friend Sym2 operator*(double s, const Sym2& a) { return {s * a.a11, s * a.a12, s * a.a22}; }
  friend bool operator==(const Sym2&, const Sym2&) = default;

  double frobenius_norm() const { return std::sqrt(a11 * a11 + 2.0 * a12 * a12 + a22 * a22); }
};

using SymTensorField = std::vector<Sym2>;

/// cof([[a, b], [b, c]]) = [[c, -b], [-b, a]], so cof(t) t = det(t) I.
inline Sym2 cofactor(const Sym2& t) { return {t.a22, -t.a12, t.a11}; }

/// Nearest positive semidefinite matrix in the Frobenius norm: negative
/// eigenvalues are clipped to zero.
inline Sym2 project_psd(const Sym2& t) {
  const auto [mu1, mu2] = t.eigenvalues();
  if (mu2 >= 0.0) return t;
  if (mu1 <= 0.0) return {};
  // (t - mu2 I) / (mu1 - mu2) is the spectral projector onto the mu1 eigenspace.
  const double s = mu1 / (mu1 - mu2);
  return {s * (t.a11 - mu2), s * t.a12, s * (t.a22 - mu2)};
}

SymTensorField cofactor(const SymTensorField& field);
SymTensorField project_psd(const SymTensorField& field);

}  // namespace mae
