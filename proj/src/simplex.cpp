#include "qso/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qso {

SimplexPoint::SimplexPoint(std::vector<double> coords) : c_(std::move(coords)) {
  if (c_.size() < 2) fail(errc::invalid_dimension, "simplex point needs m >= 2");
  double sum = 0.0;
  for (double v : c_) {
    if (!std::isfinite(v)) fail(errc::invalid_simplex_point, "non-finite coordinate");
    if (v < -kMassTol)
      fail(errc::invalid_simplex_point,
           "coordinate " + std::to_string(v) + " below -" + std::to_string(kMassTol));
    sum += v;
  }
  if (std::abs(sum - 1.0) > kMassTol)
    fail(errc::invalid_simplex_point, "mass " + std::to_string(sum) + " not within tolerance of 1");
  for (double& v : c_)
    if (v < 0.0) v = 0.0;
  sum = std::accumulate(c_.begin(), c_.end(), 0.0);
  for (double& v : c_) v /= sum;
}

SimplexPoint SimplexPoint::vertex(int m, int k) {
  if (m < 2) fail(errc::invalid_dimension, "m must be >= 2");
  if (k < 0 || k >= m) fail(errc::invalid_dimension, "vertex index out of range");
  std::vector<double> c(static_cast<std::size_t>(m), 0.0);
  c[static_cast<std::size_t>(k)] = 1.0;
  return SimplexPoint(std::move(c));
}

SimplexPoint SimplexPoint::barycenter(int m) {
  if (m < 2) fail(errc::invalid_dimension, "m must be >= 2");
  return SimplexPoint(std::vector<double>(static_cast<std::size_t>(m), 1.0 / m));
}

std::vector<double> decreasing_rearrangement(std::span<const double> v) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return v[static_cast<std::size_t>(a)] > v[static_cast<std::size_t>(b)];
  });
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[static_cast<std::size_t>(idx[i])];
  return out;
}

std::vector<double> decreasing_rearrangement(const SimplexPoint& x) {
  return decreasing_rearrangement(std::span<const double>(x.coords()));
}

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::majorizes: return "MAJORIZES";
    case Relation::majorized_by: return "MAJORIZED_BY";
    case Relation::equivalent: return "EQUIVALENT";
    case Relation::incomparable: return "INCOMPARABLE";
  }
  return "UNKNOWN";
}

MajorizationVerdict compare_majorization(const SimplexPoint& x, const SimplexPoint& y, double tol) {
  if (x.dim() != y.dim())
    fail(errc::dimension_mismatch,
         "compare_majorization: " + std::to_string(x.dim()) + " vs " + std::to_string(y.dim()));
  const auto xs = decreasing_rearrangement(x);
  const auto ys = decreasing_rearrangement(y);
  const int m = x.dim();

  // Running prefix difference; the k = m prefix is identically zero on the simplex.
  double diff = 0.0;
  double fwd = 0.0, bwd = 0.0;
  bool first = true;
  for (int k = 0; k + 1 < m; ++k) {
    diff += xs[static_cast<std::size_t>(k)] - ys[static_cast<std::size_t>(k)];
    if (first) {
      fwd = diff;
      bwd = -diff;
      first = false;
    } else {
      fwd = std::min(fwd, diff);
      bwd = std::min(bwd, -diff);
    }
  }

  Relation rel;
  const bool f = fwd >= -tol, b = bwd >= -tol;
  if (f && b)
    rel = Relation::equivalent;
  else if (f)
    rel = Relation::majorizes;
  else if (b)
    rel = Relation::majorized_by;
  else
    rel = Relation::incomparable;
  return {rel, fwd, bwd};
}

SimplexPoint sample_uniform(int m, Rng& rng) {
  if (m < 2) fail(errc::invalid_dimension, "sample_uniform: m must be >= 2");
  std::vector<double> c(static_cast<std::size_t>(m));
  double sum = 0.0;
  for (double& v : c) {
    v = rng.exponential();
    sum += v;
  }
  for (double& v : c) v /= sum;
  return SimplexPoint(std::move(c));
}

}  // namespace qso
