#pragma once

// Small dense polynomials with real coefficients stored in ascending order:
// c[0] + c[1] x + ... + c[n] x^n.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

namespace optomech {

template <std::floating_point T>
class Polynomial {
 public:
  Polynomial() : c_{T(0)} {}
  Polynomial(std::initializer_list<T> coeffs) : c_(coeffs) { trim(); }
  explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Polynomial constant(T v) { return Polynomial{v}; }
  static Polynomial monomial(std::size_t degree, T v = T(1)) {
    std::vector<T> c(degree + 1, T(0));
    c[degree] = v;
    return Polynomial(std::move(c));
  }

  [[nodiscard]] std::size_t degree() const { return c_.size() - 1; }
  [[nodiscard]] std::span<const T> coefficients() const { return c_; }
  [[nodiscard]] T operator[](std::size_t i) const { return i < c_.size() ? c_[i] : T(0); }

  template <typename U>
  [[nodiscard]] U operator()(U x) const {
    U acc = U(c_.back());
    for (std::size_t i = c_.size() - 1; i-- > 0;) acc = acc * x + U(c_[i]);
    return acc;
  }

  [[nodiscard]] Polynomial derivative() const {
    if (c_.size() == 1) return Polynomial{};
    std::vector<T> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<T>(i) * c_[i];
    return Polynomial(std::move(d));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<T> r(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + b[i];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
  friend Polynomial operator-(const Polynomial& a) {
    std::vector<T> r(a.c_);
    for (auto& x : r) x = -x;
    return Polynomial(std::move(r));
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    std::vector<T> r(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator*(T s, const Polynomial& a) {
    std::vector<T> r(a.c_);
    for (auto& x : r) x *= s;
    return Polynomial(std::move(r));
  }

 private:
  void trim() {
    if (c_.empty()) c_.push_back(T(0));
    while (c_.size() > 1 && c_.back() == T(0)) c_.pop_back();
  }

  std::vector<T> c_;
};

/// All complex roots via the eigenvalues of the companion matrix. The zero
/// polynomial and constants have no roots.
template <std::floating_point T>
std::vector<std::complex<T>> polynomial_roots(const Polynomial<T>& p) {
  const auto c = p.coefficients();
  std::size_t n = p.degree();
  std::vector<std::complex<T>> roots;
  if (n == 0) return roots;
  // Factor out exact zero roots first; they make the companion matrix singular
  // without telling us anything new.
  std::size_t zeros = 0;
  while (zeros < n && c[zeros] == T(0)) ++zeros;
  roots.assign(zeros, std::complex<T>(0));
  const std::size_t m = n - zeros;
  if (m == 0) return roots;
  if (m == 1) {
    roots.emplace_back(-c[zeros] / c[zeros + 1]);
    return roots;
  }
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  Mat companion = Mat::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  const T lead = c[n];
  for (std::size_t i = 0; i < m; ++i) {
    companion(0, static_cast<Eigen::Index>(i)) = -c[n - 1 - i] / lead;
    if (i + 1 < m) companion(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = T(1);
  }
  Eigen::EigenSolver<Mat> solver(companion, false);
  const auto ev = solver.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) roots.push_back(ev[i]);
  return roots;
}

/// Newton iterations from a real starting point; stops when the update is
/// below `rel_tol` relative to |x| or after `max_iter` steps.
template <std::floating_point T>
T newton_polish(const Polynomial<T>& p, T x, int max_iter = 50, T rel_tol = T(4) * std::numeric_limits<T>::epsilon()) {
  const auto dp = p.derivative();
  for (int i = 0; i < max_iter; ++i) {
    const T d = dp(x);
    if (d == T(0)) break;
    const T step = p(x) / d;
    x -= step;
    if (std::abs(step) <= rel_tol * std::max(std::abs(x), T(1e-300))) break;
  }
  return x;
}

}  // namespace optomech
