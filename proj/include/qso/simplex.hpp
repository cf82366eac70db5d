#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qso/errors.hpp"
#include "qso/rng.hpp"

namespace qso {

/// Absolute tolerance for simplex membership. Points farther out are rejected;
/// points within are clamped to nonnegative and renormalized.
inline constexpr double kMassTol = 1e-10;

/// Default tolerance for majorization prefix-sum comparisons.
inline constexpr double kCompareTol = 1e-12;

/// A probability vector on the (m-1)-simplex. Immutable after construction;
/// construction clamps coordinates in [-kMassTol, 0) to zero and normalizes
/// the total mass to 1.
class SimplexPoint {
 public:
  explicit SimplexPoint(std::vector<double> coords);

  static SimplexPoint vertex(int m, int k);     // e_k, 0-based k
  static SimplexPoint barycenter(int m);        // (1/m, ..., 1/m)

  int dim() const { return static_cast<int>(c_.size()); }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& coords() const { return c_; }

  bool operator==(const SimplexPoint&) const = default;

 private:
  std::vector<double> c_;
};

/// Coordinates sorted in nonincreasing order. The sort is stable: ties keep
/// their original relative order, so the output is reproducible across runs.
std::vector<double> decreasing_rearrangement(std::span<const double> v);
std::vector<double> decreasing_rearrangement(const SimplexPoint& x);

enum class Relation { majorizes, majorized_by, equivalent, incomparable };

const char* relation_name(Relation r);

/// Outcome of comparing two simplex points under the majorization preorder.
/// min_slack_forward is the most violated prefix-sum margin for "x majorizes y"
/// (nonnegative prefix differences mean the relation holds); min_slack_backward
/// is the same for the reverse direction.
struct MajorizationVerdict {
  Relation relation;
  double min_slack_forward;
  double min_slack_backward;
};

/// Compares x against y: majorizes means x is larger in the preorder.
/// Both directional slacks are minima over the m-1 proper prefixes of the
/// decreasing rearrangements; the total sums agree by the simplex constraint.
MajorizationVerdict compare_majorization(const SimplexPoint& x, const SimplexPoint& y,
                                         double tol = kCompareTol);

/// Uniform (flat Dirichlet) sample obtained by normalizing m unit-rate
/// exponential draws. Deterministic given the generator state.
SimplexPoint sample_uniform(int m, Rng& rng);

inline double linf_distance(const SimplexPoint& a, const SimplexPoint& b) {
  double d = 0.0;
  for (int i = 0; i < a.dim(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double linf_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace qso
