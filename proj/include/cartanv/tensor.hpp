#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "cartanv/jet.hpp"

namespace cartanv {

/// Dense n x n x n array of doubles.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n, double fill = 0.0) : n_(n), a_(static_cast<std::size_t>(n) * n * n, fill) {}

  [[nodiscard]] int dim() const { return n_; }
  double& operator()(int i, int j, int k) { return a_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }
  double operator()(int i, int j, int k) const {
    return a_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k];
  }
  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  int n_ = 0;
  std::vector<double> a_;
};

/// Row-major matrix of jets.
class JetMat {
 public:
  JetMat() = default;
  JetMat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

  [[nodiscard]] int rows() const { return rows_; }
  [[nodiscard]] int cols() const { return cols_; }
  [[nodiscard]] bool empty() const { return a_.empty(); }
  Jet& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Jet& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  [[nodiscard]] Eigen::MatrixXd values() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).value();
    }
    return m;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Jet> a_;
};

class JetTensor3 {
 public:
  JetTensor3() = default;
  explicit JetTensor3(int n) : n_(n), a_(static_cast<std::size_t>(n) * n * n) {}

  [[nodiscard]] int dim() const { return n_; }
  [[nodiscard]] bool empty() const { return a_.empty(); }
  Jet& operator()(int i, int j, int k) { return a_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }
  const Jet& operator()(int i, int j, int k) const {
    return a_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k];
  }

  [[nodiscard]] Tensor3 values() const {
    Tensor3 t(n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        for (int k = 0; k < n_; ++k) t(i, j, k) = (*this)(i, j, k).value();
      }
    }
    return t;
  }

 private:
  int n_ = 0;
  std::vector<Jet> a_;
};

inline Eigen::VectorXd values(const std::vector<Jet>& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i].value();
  return out;
}

/// Inverse of a matrix of jets: the base value is inverted directly and the
/// higher coefficients follow from the Neumann series of
/// (A0 + E)^{-1} = sum_k (-A0^{-1} E)^k A0^{-1}, which terminates because E
/// has no constant term.
inline JetMat inverse(const JetMat& a) {
  const int n = a.rows();
  const Eigen::MatrixXd a0 = a.values();
  const Eigen::MatrixXd inv0 = a0.inverse();
  int order = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) order = std::max(order, a(i, j).precision().t);
  }
  // m = -inv0 * (a - a0)
  JetMat m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Jet acc = a(0, j) * 0.0;
      for (int k = 0; k < n; ++k) {
        Jet e = a(k, j) - a0(k, j);
        acc -= inv0(i, k) * e;
      }
      m(i, j) = acc;
    }
  }
  JetMat term(n, n);
  JetMat sum(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      term(i, j) = (a(i, j) * 0.0) + inv0(i, j);
      sum(i, j) = term(i, j);
    }
  }
  for (int step = 0; step < order; ++step) {
    JetMat next(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Jet acc = m(i, 0) * term(0, j);
        for (int k = 1; k < n; ++k) acc += m(i, k) * term(k, j);
        next(i, j) = acc;
      }
    }
    term = std::move(next);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) sum(i, j) += term(i, j);
    }
  }
  return sum;
}

/// Pfaffian of an antisymmetric matrix of even size, by expansion along the
/// first row.
inline double pfaffian(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  if (n % 2 != 0) return 0.0;
  if (n == 0) return 1.0;
  if (n == 2) return a(0, 1);
  double sum = 0.0;
  for (Eigen::Index j = 1; j < n; ++j) {
    if (a(0, j) == 0.0) continue;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 1; k < n; ++k) {
      if (k != j) keep.push_back(k);
    }
    Eigen::MatrixXd minor(n - 2, n - 2);
    for (Eigen::Index r = 0; r < n - 2; ++r) {
      for (Eigen::Index c = 0; c < n - 2; ++c) minor(r, c) = a(keep[r], keep[c]);
    }
    const double sign = (j % 2 == 1) ? 1.0 : -1.0;
    sum += sign * a(0, j) * pfaffian(minor);
  }
  return sum;
}

/// Residual normalized by the magnitude of the compared terms.
inline double normalized(double residual, double magnitude) {
  return std::abs(residual) / (1.0 + std::abs(magnitude));
}

}  // namespace cartanv
