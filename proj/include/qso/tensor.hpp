#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

#include "qso/simplex.hpp"

namespace qso {

/// Tolerance for stochasticity (row-sum) validation and coefficient symmetry.
inline constexpr double kStochTol = 1e-9;

struct ApplyResult {
  SimplexPoint point;
  double mass_defect;  // |sum - 1| before renormalization
};

/// Heredity coefficients of a quadratic operator: p(i,j,k) >= 0, symmetric in
/// (i,j), rows summing to 1 over k. Only the i <= j representative is stored.
/// All indices are 0-based; file formats use 1-based indices.
class QsoTensor {
 public:
  class Builder;

  int dim() const { return m_; }
  double p(int i, int j, int k) const {
    if (i > j) std::swap(i, j);
    return v_[static_cast<std::size_t>(pair_id(i, j) * m_ + k)];
  }

  /// Row a_ij = (p(i,j,1), ..., p(i,j,m)).
  std::vector<double> row(int i, int j) const;

  ApplyResult apply(const SimplexPoint& x) const;
  Eigen::MatrixXd jacobian(const SimplexPoint& x) const;

  /// Polynomial evaluation at an arbitrary vector, no validation or
  /// renormalization; root-finding needs values slightly off the simplex.
  std::vector<double> apply_raw(std::span<const double> x) const;
  Eigen::MatrixXd jacobian_raw(std::span<const double> x) const;

  /// Relabels species by permutation sigma: p'(s(i), s(j), s(k)) = p(i, j, k).
  QsoTensor relabeled(const std::vector<int>& sigma) const;

 private:
  QsoTensor(int m, std::vector<double> v) : m_(m), v_(std::move(v)) {}
  int pair_id(int i, int j) const { return i * m_ - i * (i - 1) / 2 + (j - i); }

  int m_ = 0;
  std::vector<double> v_;  // (pair, k), pairs in lexicographic i <= j order
};

/// Coefficient builder; set entries in any index order, then call validated().
class QsoTensor::Builder {
 public:
  explicit Builder(int m);

  Builder& set(int i, int j, int k, double value);
  Builder& add(int i, int j, int k, double value);
  double get(int i, int j, int k) const;

  /// Checks nonnegativity, symmetry (or averages over (i,j) and (j,i) when
  /// symmetrize is set) and row sums within tol.
  QsoTensor validated(bool symmetrize = false, double tol = kStochTol) const;

 private:
  int m_;
  std::vector<double> full_;  // dense m^3, (i*m + j)*m + k
};

/// Fully symmetric cubic coefficients p(i,j,l,k); sorted-triple representative
/// storage, symmetry materialized on read.
class CsoTensor {
 public:
  class Builder;

  int dim() const { return m_; }
  double p(int i, int j, int l, int k) const {
    sort3(i, j, l);
    return v_[static_cast<std::size_t>(triple_id_[flat(i, j, l)] * m_ + k)];
  }

  std::vector<double> row(int i, int j, int l) const;

  ApplyResult apply(const SimplexPoint& x) const;
  Eigen::MatrixXd jacobian(const SimplexPoint& x) const;
  std::vector<double> apply_raw(std::span<const double> x) const;
  Eigen::MatrixXd jacobian_raw(std::span<const double> x) const;

  CsoTensor relabeled(const std::vector<int>& sigma) const;

 private:
  CsoTensor(int m, std::vector<double> v, std::vector<int> ids)
      : m_(m), v_(std::move(v)), triple_id_(std::move(ids)) {}
  static void sort3(int& i, int& j, int& l) {
    if (i > j) std::swap(i, j);
    if (j > l) std::swap(j, l);
    if (i > j) std::swap(i, j);
  }
  std::size_t flat(int i, int j, int l) const {
    return static_cast<std::size_t>((i * m_ + j) * m_ + l);
  }

  int m_ = 0;
  std::vector<double> v_;        // (triple rep, k)
  std::vector<int> triple_id_;   // dense lookup from sorted (i,j,l) to rep index
};

class CsoTensor::Builder {
 public:
  explicit Builder(int m);

  Builder& set(int i, int j, int l, int k, double value);
  Builder& add(int i, int j, int l, int k, double value);
  double get(int i, int j, int l, int k) const;

  CsoTensor validated(bool symmetrize = false, double tol = kStochTol) const;

 private:
  int m_;
  std::vector<double> full_;  // dense m^4
};

/// A named quadratic or cubic stochastic operator.
class Operator {
 public:
  Operator(std::string name, QsoTensor t) : name_(std::move(name)), tensor_(std::move(t)) {}
  Operator(std::string name, CsoTensor t) : name_(std::move(name)), tensor_(std::move(t)) {}

  const std::string& name() const { return name_; }
  int degree() const { return std::holds_alternative<QsoTensor>(tensor_) ? 2 : 3; }
  int dim() const;

  const QsoTensor& qso() const { return std::get<QsoTensor>(tensor_); }
  const CsoTensor& cso() const { return std::get<CsoTensor>(tensor_); }

  ApplyResult apply_with_defect(const SimplexPoint& x) const;
  SimplexPoint apply(const SimplexPoint& x) const { return apply_with_defect(x).point; }
  std::vector<double> apply_raw(std::span<const double> x) const;
  Eigen::MatrixXd jacobian_raw(std::span<const double> x) const;

  /// Analytic Jacobian J(k, i) = d(Vx)_k / dx_i of the homogeneous form.
  /// On the simplex every column sums to the operator degree.
  Eigen::MatrixXd jacobian(const SimplexPoint& x) const;

  /// Max deviation of the Jacobian column sums from the degree; a cheap
  /// consistency check for the analytic derivative.
  double jacobian_column_defect(const SimplexPoint& x) const;

  Operator relabeled(const std::vector<int>& sigma, std::string new_name) const;

 private:
  std::string name_;
  std::variant<QsoTensor, CsoTensor> tensor_;
};

/// Volterra canonical data for a quadratic tensor. A tensor is Volterra when
/// p(i,j,k) vanishes for every k outside {i,j}; then a(k,i) = 2 p(i,k,k) - 1
/// for i != k, and a(k,k) = 0 by convention (the literal 2 p(k,k,k) - 1 = 1
/// is inconsistent with the canonical form's fixed-point structure).
struct VolterraForm {
  bool is_volterra = false;
  double max_off_support = 0.0;  // largest p(i,j,k) with k outside {i,j}
  Eigen::MatrixXd a;             // only meaningful when is_volterra
  bool skew_symmetric = false;
  double skew_defect = 0.0;      // max |a(k,i) + a(i,k)|
};

VolterraForm volterra_form(const QsoTensor& q, double tol = kStochTol);

/// Builds the Volterra tensor with canonical matrix a (skew-symmetric, zero
/// diagonal, entries in [-1, 1]). Inverse of volterra_form on its image.
QsoTensor volterra_from_matrix(const Eigen::MatrixXd& a);

}  // namespace qso
