#include "qso/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace qso {
namespace {

void check_dim(int m) {
  if (m < 2) fail(errc::invalid_dimension, "tensor dimension must be >= 2");
}

void check_index(int idx, int m) {
  if (idx < 0 || idx >= m) fail(errc::invalid_dimension, "index out of range");
}

std::string pair_str(int i, int j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

}  // namespace

// ---------------------------------------------------------------------------
// QsoTensor

std::vector<double> QsoTensor::row(int i, int j) const {
  std::vector<double> r(static_cast<std::size_t>(m_));
  for (int k = 0; k < m_; ++k) r[static_cast<std::size_t>(k)] = p(i, j, k);
  return r;
}

std::vector<double> QsoTensor::apply_raw(std::span<const double> c) const {
  if (static_cast<int>(c.size()) != m_)
    fail(errc::dimension_mismatch, "apply: point dimension != tensor dimension");
  std::vector<double> out(static_cast<std::size_t>(m_), 0.0);
  int pid = 0;
  for (int i = 0; i < m_; ++i) {
    for (int j = i; j < m_; ++j, ++pid) {
      const double w = (i == j) ? c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)]
                                : 2.0 * c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(j)];
      if (w == 0.0) continue;
      const double* pk = &v_[static_cast<std::size_t>(pid) * static_cast<std::size_t>(m_)];
      for (int k = 0; k < m_; ++k) out[static_cast<std::size_t>(k)] += w * pk[k];
    }
  }
  return out;
}

ApplyResult QsoTensor::apply(const SimplexPoint& x) const {
  auto out = apply_raw(x.coords());
  double sum = 0.0;
  for (double v : out) sum += v;
  return {SimplexPoint(std::move(out)), std::abs(sum - 1.0)};
}

Eigen::MatrixXd QsoTensor::jacobian_raw(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != m_)
    fail(errc::dimension_mismatch, "jacobian: point dimension != tensor dimension");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m_, m_);
  for (int k = 0; k < m_; ++k)
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      for (int j = 0; j < m_; ++j) s += p(i, j, k) * x[static_cast<std::size_t>(j)];
      jac(k, i) = 2.0 * s;
    }
  return jac;
}

Eigen::MatrixXd QsoTensor::jacobian(const SimplexPoint& x) const { return jacobian_raw(x.coords()); }

QsoTensor QsoTensor::relabeled(const std::vector<int>& sigma) const {
  Builder b(m_);
  for (int i = 0; i < m_; ++i)
    for (int j = i; j < m_; ++j)
      for (int k = 0; k < m_; ++k) {
        const int si = sigma[static_cast<std::size_t>(i)], sj = sigma[static_cast<std::size_t>(j)],
                  sk = sigma[static_cast<std::size_t>(k)];
        b.set(si, sj, sk, p(i, j, k));
        b.set(sj, si, sk, p(i, j, k));
      }
  return b.validated();
}

QsoTensor::Builder::Builder(int m) : m_(m) {
  check_dim(m);
  full_.assign(static_cast<std::size_t>(m) * m * m, 0.0);
}

QsoTensor::Builder& QsoTensor::Builder::set(int i, int j, int k, double value) {
  check_index(i, m_);
  check_index(j, m_);
  check_index(k, m_);
  full_[static_cast<std::size_t>((i * m_ + j) * m_ + k)] = value;
  return *this;
}

QsoTensor::Builder& QsoTensor::Builder::add(int i, int j, int k, double value) {
  check_index(i, m_);
  check_index(j, m_);
  check_index(k, m_);
  full_[static_cast<std::size_t>((i * m_ + j) * m_ + k)] += value;
  return *this;
}

double QsoTensor::Builder::get(int i, int j, int k) const {
  return full_[static_cast<std::size_t>((i * m_ + j) * m_ + k)];
}

QsoTensor QsoTensor::Builder::validated(bool symmetrize, double tol) const {
  const int m = m_;
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(m * (m + 1) / 2) * static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const double a = get(i, j, k), b = get(j, i, k);
        double val;
        if (symmetrize) {
          val = 0.5 * (a + b);
        } else {
          if (std::abs(a - b) > tol)
            fail(errc::asymmetry, "p" + pair_str(i, j) + " differs from p" + pair_str(j, i) +
                                      " at k=" + std::to_string(k + 1));
          val = a;
        }
        if (val < -tol)
          fail(errc::negative_coefficient,
               "p" + pair_str(i, j) + " k=" + std::to_string(k + 1) + " is " + std::to_string(val));
        v.push_back(std::max(val, 0.0));
      }

  double worst = 0.0;
  int wi = 0, wj = 0;
  std::size_t idx = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      double sum = 0.0;
      for (int k = 0; k < m; ++k) sum += v[idx++];
      if (std::abs(sum - 1.0) > std::abs(worst)) {
        worst = sum - 1.0;
        wi = i;
        wj = j;
      }
    }
  if (std::abs(worst) > tol)
    fail(errc::row_sum_violation,
         "row " + pair_str(wi, wj) + " sums to 1 + (" + std::to_string(worst) + ")");
  return QsoTensor(m, std::move(v));
}

// ---------------------------------------------------------------------------
// CsoTensor

std::vector<double> CsoTensor::row(int i, int j, int l) const {
  std::vector<double> r(static_cast<std::size_t>(m_));
  for (int k = 0; k < m_; ++k) r[static_cast<std::size_t>(k)] = p(i, j, l, k);
  return r;
}

std::vector<double> CsoTensor::apply_raw(std::span<const double> c) const {
  if (static_cast<int>(c.size()) != m_)
    fail(errc::dimension_mismatch, "apply: point dimension != tensor dimension");
  std::vector<double> out(static_cast<std::size_t>(m_), 0.0);
  int rep = 0;
  for (int i = 0; i < m_; ++i)
    for (int j = i; j < m_; ++j)
      for (int l = j; l < m_; ++l, ++rep) {
        // multinomial weight of the monomial x_i x_j x_l
        double mult;
        if (i == j && j == l)
          mult = 1.0;
        else if (i == j || j == l)
          mult = 3.0;
        else
          mult = 6.0;
        const double w = mult * c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(j)] *
                         c[static_cast<std::size_t>(l)];
        if (w == 0.0) continue;
        const double* pk = &v_[static_cast<std::size_t>(rep) * static_cast<std::size_t>(m_)];
        for (int k = 0; k < m_; ++k) out[static_cast<std::size_t>(k)] += w * pk[k];
      }
  return out;
}

ApplyResult CsoTensor::apply(const SimplexPoint& x) const {
  auto out = apply_raw(x.coords());
  double sum = 0.0;
  for (double v : out) sum += v;
  return {SimplexPoint(std::move(out)), std::abs(sum - 1.0)};
}

Eigen::MatrixXd CsoTensor::jacobian_raw(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != m_)
    fail(errc::dimension_mismatch, "jacobian: point dimension != tensor dimension");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m_, m_);
  for (int k = 0; k < m_; ++k)
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      for (int j = 0; j < m_; ++j)
        for (int l = 0; l < m_; ++l)
          s += p(i, j, l, k) * x[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(l)];
      jac(k, i) = 3.0 * s;
    }
  return jac;
}

Eigen::MatrixXd CsoTensor::jacobian(const SimplexPoint& x) const { return jacobian_raw(x.coords()); }

CsoTensor CsoTensor::relabeled(const std::vector<int>& sigma) const {
  Builder b(m_);
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int i = 0; i < m_; ++i)
    for (int j = i; j < m_; ++j)
      for (int l = j; l < m_; ++l)
        for (int k = 0; k < m_; ++k) {
          const int t[3] = {sigma[static_cast<std::size_t>(i)], sigma[static_cast<std::size_t>(j)],
                            sigma[static_cast<std::size_t>(l)]};
          for (const auto& pr : perms)
            b.set(t[pr[0]], t[pr[1]], t[pr[2]], sigma[static_cast<std::size_t>(k)], p(i, j, l, k));
        }
  return b.validated();
}

CsoTensor::Builder::Builder(int m) : m_(m) {
  check_dim(m);
  full_.assign(static_cast<std::size_t>(m) * m * m * m, 0.0);
}

CsoTensor::Builder& CsoTensor::Builder::set(int i, int j, int l, int k, double value) {
  check_index(i, m_);
  check_index(j, m_);
  check_index(l, m_);
  check_index(k, m_);
  full_[static_cast<std::size_t>(((i * m_ + j) * m_ + l) * m_ + k)] = value;
  return *this;
}

CsoTensor::Builder& CsoTensor::Builder::add(int i, int j, int l, int k, double value) {
  check_index(i, m_);
  check_index(j, m_);
  check_index(l, m_);
  check_index(k, m_);
  full_[static_cast<std::size_t>(((i * m_ + j) * m_ + l) * m_ + k)] += value;
  return *this;
}

double CsoTensor::Builder::get(int i, int j, int l, int k) const {
  return full_[static_cast<std::size_t>(((i * m_ + j) * m_ + l) * m_ + k)];
}

CsoTensor CsoTensor::Builder::validated(bool symmetrize, double tol) const {
  const int m = m_;
  std::vector<double> v;
  std::vector<int> ids(static_cast<std::size_t>(m) * m * m, -1);
  int rep = 0;
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      for (int l = j; l < m; ++l, ++rep) {
        ids[static_cast<std::size_t>((i * m + j) * m + l)] = rep;
        const int t[3] = {i, j, l};
        for (int k = 0; k < m; ++k) {
          double sum = 0.0, mn = 0.0, mx = 0.0;
          for (int pi = 0; pi < 6; ++pi) {
            const double val = get(t[perms[pi][0]], t[perms[pi][1]], t[perms[pi][2]], k);
            sum += val;
            if (pi == 0) {
              mn = mx = val;
            } else {
              mn = std::min(mn, val);
              mx = std::max(mx, val);
            }
          }
          double val;
          if (symmetrize) {
            val = sum / 6.0;
          } else {
            if (mx - mn > tol)
              fail(errc::asymmetry, "p(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                        "," + std::to_string(l + 1) +
                                        ") not symmetric at k=" + std::to_string(k + 1));
            val = get(i, j, l, k);
          }
          if (val < -tol)
            fail(errc::negative_coefficient,
                 "p(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                     std::to_string(l + 1) + ") k=" + std::to_string(k + 1) + " is " +
                     std::to_string(val));
          v.push_back(std::max(val, 0.0));
        }
      }

  double worst = 0.0;
  int wi = 0, wj = 0, wl = 0;
  std::size_t idx = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      for (int l = j; l < m; ++l) {
        double sum = 0.0;
        for (int k = 0; k < m; ++k) sum += v[idx++];
        if (std::abs(sum - 1.0) > std::abs(worst)) {
          worst = sum - 1.0;
          wi = i;
          wj = j;
          wl = l;
        }
      }
  if (std::abs(worst) > tol)
    fail(errc::row_sum_violation, "row (" + std::to_string(wi + 1) + "," + std::to_string(wj + 1) +
                                      "," + std::to_string(wl + 1) + ") sums to 1 + (" +
                                      std::to_string(worst) + ")");
  return CsoTensor(m, std::move(v), std::move(ids));
}

// ---------------------------------------------------------------------------
// Operator

int Operator::dim() const {
  return degree() == 2 ? qso().dim() : cso().dim();
}

ApplyResult Operator::apply_with_defect(const SimplexPoint& x) const {
  return degree() == 2 ? qso().apply(x) : cso().apply(x);
}

std::vector<double> Operator::apply_raw(std::span<const double> x) const {
  return degree() == 2 ? qso().apply_raw(x) : cso().apply_raw(x);
}

Eigen::MatrixXd Operator::jacobian(const SimplexPoint& x) const {
  return degree() == 2 ? qso().jacobian(x) : cso().jacobian(x);
}

Eigen::MatrixXd Operator::jacobian_raw(std::span<const double> x) const {
  return degree() == 2 ? qso().jacobian_raw(x) : cso().jacobian_raw(x);
}

double Operator::jacobian_column_defect(const SimplexPoint& x) const {
  const Eigen::MatrixXd jac = jacobian(x);
  const double deg = degree();
  double worst = 0.0;
  for (int i = 0; i < jac.cols(); ++i) worst = std::max(worst, std::abs(jac.col(i).sum() - deg));
  return worst;
}

Operator Operator::relabeled(const std::vector<int>& sigma, std::string new_name) const {
  if (degree() == 2) return Operator(std::move(new_name), qso().relabeled(sigma));
  return Operator(std::move(new_name), cso().relabeled(sigma));
}

// ---------------------------------------------------------------------------
// Volterra canonical form

VolterraForm volterra_form(const QsoTensor& q, double tol) {
  const int m = q.dim();
  VolterraForm out;
  out.max_off_support = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      for (int k = 0; k < m; ++k)
        if (k != i && k != j) out.max_off_support = std::max(out.max_off_support, q.p(i, j, k));
  out.is_volterra = out.max_off_support <= tol;
  if (!out.is_volterra) return out;

  out.a = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      if (i != k) out.a(k, i) = 2.0 * q.p(i, k, k) - 1.0;
  out.skew_defect = (out.a + out.a.transpose()).cwiseAbs().maxCoeff();
  out.skew_symmetric = out.skew_defect <= tol;
  return out;
}

QsoTensor volterra_from_matrix(const Eigen::MatrixXd& a) {
  const int m = static_cast<int>(a.rows());
  check_dim(m);
  if (a.cols() != m) fail(errc::invalid_dimension, "canonical matrix must be square");
  if ((a + a.transpose()).cwiseAbs().maxCoeff() > kStochTol)
    fail(errc::asymmetry, "canonical matrix must be skew-symmetric");
  if (a.cwiseAbs().maxCoeff() > 1.0 + kStochTol)
    fail(errc::param_out_of_range, "canonical matrix entries must lie in [-1, 1]");
  QsoTensor::Builder b(m);
  for (int k = 0; k < m; ++k) b.set(k, k, k, 1.0);
  for (int i = 0; i < m; ++i)
    for (int k = i + 1; k < m; ++k) {
      // pair {i, k}: mass splits between outputs i and k
      const double pik_k = 0.5 * (1.0 + a(k, i));
      b.set(i, k, k, pik_k).set(k, i, k, pik_k);
      b.set(i, k, i, 1.0 - pik_k).set(k, i, i, 1.0 - pik_k);
    }
  return b.validated();
}

}  // namespace qso
