#include "qso/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qso/parallel.hpp"
#include "qso/rng.hpp"

namespace qso {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double residual_at(const Operator& op, const SimplexPoint& x) {
  return linf_distance(op.apply(x), x);
}

long factorial_capped(int m, long cap) {
  long f = 1;
  for (int i = 2; i <= m; ++i) {
    f *= i;
    if (f >= cap) return cap;
  }
  return f;
}

// Evolves a Volterra operator in log coordinates. The growth factor
// 1 + sum_i a(k,i) x_i equals sum_i (1 + a(k,i)) x_i, a nonnegative sum, so it
// is computed by log-sum-exp with no cancellation; coordinates may descend to
// log-scale ~ -1e308 instead of underflowing at ~ -745.
class VolterraLogIterator {
 public:
  VolterraLogIterator(const Eigen::MatrixXd& a, const SimplexPoint& x0)
      : m_(static_cast<int>(a.rows())) {
    lw_.assign(static_cast<std::size_t>(m_) * m_, kNegInf);
    for (int k = 0; k < m_; ++k)
      for (int i = 0; i < m_; ++i) {
        const double w = 1.0 + a(k, i);
        if (w > 0.0) lw_[static_cast<std::size_t>(k * m_ + i)] = std::log(w);
      }
    l_.resize(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) l_[static_cast<std::size_t>(i)] = std::log(x0[i]);
    scratch_.resize(static_cast<std::size_t>(m_));
  }

  void step() {
    for (int k = 0; k < m_; ++k) {
      const double lk = l_[static_cast<std::size_t>(k)];
      if (lk == kNegInf) {
        scratch_[static_cast<std::size_t>(k)] = kNegInf;
        continue;
      }
      scratch_[static_cast<std::size_t>(k)] = lk + lse_row(k);
    }
    const double total = lse(scratch_);
    for (int k = 0; k < m_; ++k) l_[static_cast<std::size_t>(k)] = scratch_[static_cast<std::size_t>(k)] - total;
  }

  std::vector<double> project() const {
    std::vector<double> x(static_cast<std::size_t>(m_));
    double sum = 0.0;
    for (int i = 0; i < m_; ++i) {
      x[static_cast<std::size_t>(i)] = std::exp(l_[static_cast<std::size_t>(i)]);
      sum += x[static_cast<std::size_t>(i)];
    }
    for (double& v : x) v /= sum;
    return x;
  }

 private:
  double lse_row(int k) const {
    double mx = kNegInf;
    for (int i = 0; i < m_; ++i) {
      const double t = lw_[static_cast<std::size_t>(k * m_ + i)] + l_[static_cast<std::size_t>(i)];
      if (t > mx) mx = t;
    }
    if (mx == kNegInf) return kNegInf;
    double s = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double t = lw_[static_cast<std::size_t>(k * m_ + i)] + l_[static_cast<std::size_t>(i)];
      if (t != kNegInf) s += std::exp(t - mx);
    }
    return mx + std::log(s);
  }

  static double lse(const std::vector<double>& v) {
    double mx = kNegInf;
    for (double t : v)
      if (t > mx) mx = t;
    if (mx == kNegInf) return kNegInf;
    double s = 0.0;
    for (double t : v)
      if (t != kNegInf) s += std::exp(t - mx);
    return mx + std::log(s);
  }

  int m_;
  std::vector<double> lw_;
  std::vector<double> l_;
  std::vector<double> scratch_;
};

}  // namespace

Trajectory iterate(const Operator& op, const SimplexPoint& x0, long n, bool renormalize) {
  if (n < 0) fail(errc::param_out_of_range, "iterate needs n >= 0");
  if (x0.dim() != op.dim()) fail(errc::dimension_mismatch, "iterate: start point dimension");
  Trajectory traj;
  traj.op_name = op.name();
  traj.renormalized = renormalize;
  traj.points.reserve(static_cast<std::size_t>(n) + 1);
  traj.points.push_back(x0);
  traj.step_defects.push_back(0.0);
  if (renormalize) {
    SimplexPoint x = x0;
    for (long t = 0; t < n; ++t) {
      auto [next, defect] = op.apply_with_defect(x);
      traj.mass_defect_max = std::max(traj.mass_defect_max, defect);
      traj.step_defects.push_back(defect);
      x = std::move(next);
      traj.points.push_back(x);
    }
    return traj;
  }
  // Diagnostics mode: propagate the raw polynomial output and watch the
  // drift. The total mass is raised to the operator degree each step, so
  // rounding drift compounds geometrically; the mode is meant for short
  // horizons and aborts when the defect leaves the simplex tolerance band
  // by a wide margin.
  std::vector<double> raw = x0.coords();
  for (long t = 0; t < n; ++t) {
    raw = op.apply_raw(raw);
    double sum = 0.0;
    for (double v : raw) sum += v;
    const double defect = std::abs(sum - 1.0);
    if (!std::isfinite(sum) || defect > 1e-6)
      fail(errc::invalid_simplex_point,
           "raw mass defect " + std::to_string(defect) + " at step " + std::to_string(t + 1) +
               "; renormalization is disabled and drift compounds, use shorter horizons");
    traj.mass_defect_max = std::max(traj.mass_defect_max, defect);
    traj.step_defects.push_back(defect);
    std::vector<double> normalized = raw;
    for (double& v : normalized) v /= sum;
    traj.points.push_back(SimplexPoint(std::move(normalized)));
  }
  return traj;
}

ChainCheck majorization_chain_check(const Trajectory& traj, double tol) {
  if (traj.points.empty()) fail(errc::trajectory_too_short, "empty trajectory");
  ChainCheck check;
  bool first = true;
  for (std::size_t t = 0; t + 1 < traj.points.size(); ++t) {
    const auto verdict = compare_majorization(traj.points[t + 1], traj.points[t], tol);
    const double s = verdict.min_slack_forward;
    if (first || s < check.min_slack) {
      check.min_slack = s;
      first = false;
    }
    if (s < -tol && !check.first_violation) {
      check.first_violation = static_cast<long>(t);
      check.holds = false;
    }
  }
  return check;
}

double lyapunov_phi(const SimplexPoint& x, const std::set<int>& excluded) {
  if (excluded.empty() || static_cast<int>(excluded.size()) >= x.dim())
    fail(errc::param_out_of_range, "excluded set must be a nonempty proper subset");
  for (int i : excluded)
    if (i < 0 || i >= x.dim()) fail(errc::param_out_of_range, "excluded index out of range");
  double phi = 0.0;
  for (int i = 0; i < x.dim(); ++i)
    if (!excluded.count(i)) phi += x[i];
  return phi;
}

LyapunovCheck lyapunov_monotone(const Trajectory& traj, const std::set<int>& excluded, double tol) {
  LyapunovCheck check;
  for (std::size_t t = 0; t + 1 < traj.points.size(); ++t) {
    const double increase =
        lyapunov_phi(traj.points[t + 1], excluded) - lyapunov_phi(traj.points[t], excluded);
    check.worst_increase = std::max(check.worst_increase, increase);
  }
  check.nonincreasing = check.worst_increase <= tol;
  return check;
}

CesaroResult cesaro(const Operator& op, const SimplexPoint& x0, long n_max, double tol,
                    std::vector<long> schedule) {
  if (n_max < 10) fail(errc::param_out_of_range, "cesaro needs n_max >= 10");
  if (x0.dim() != op.dim()) fail(errc::dimension_mismatch, "cesaro: start point dimension");

  if (schedule.empty()) {
    for (long n = 1; n <= n_max && n > 0; n *= 2) schedule.push_back(n);
    for (long n = std::max<long>(1, n_max - 9); n <= n_max; ++n) schedule.push_back(n);
  }
  for (long& n : schedule) n = std::clamp<long>(n, 1, n_max);
  std::sort(schedule.begin(), schedule.end());
  schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
  if (schedule.back() != n_max) schedule.push_back(n_max);

  CesaroResult result;
  const int m = op.dim();

  std::optional<VolterraLogIterator> log_iter;
  if (op.degree() == 2) {
    const auto form = volterra_form(op.qso());
    if (form.is_volterra) {
      log_iter.emplace(form.a, x0);
      result.log_domain = true;
    }
  }

  std::vector<double> mean(static_cast<std::size_t>(m), 0.0);
  SimplexPoint x = x0;
  std::size_t next_sample = 0;
  for (long n = 1; n <= n_max; ++n) {
    const std::vector<double> current = result.log_domain ? log_iter->project() : x.coords();
    for (int i = 0; i < m; ++i)
      mean[static_cast<std::size_t>(i)] += (current[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(i)]) / n;
    if (next_sample < schedule.size() && schedule[next_sample] == n) {
      result.partial_means.emplace_back(n, mean);
      ++next_sample;
    }
    if (n == n_max) break;
    if (result.log_domain)
      log_iter->step();
    else
      x = op.apply(x);
  }

  const std::size_t count = result.partial_means.size();
  const std::size_t window = std::min<std::size_t>(10, count);
  double fluct = 0.0;
  for (std::size_t a = count - window; a < count; ++a)
    for (std::size_t b = a + 1; b < count; ++b)
      fluct = std::max(fluct, linf_distance(result.partial_means[a].second,
                                            result.partial_means[b].second));
  result.fluctuation = fluct;
  result.converged = fluct < tol;
  if (result.converged) {
    std::vector<double> limit = result.partial_means.back().second;
    double sum = std::accumulate(limit.begin(), limit.end(), 0.0);
    for (double& v : limit) v /= sum;
    result.limit_estimate = SimplexPoint(std::move(limit));
  }
  return result;
}

double fluctuation_in_range(const CesaroResult& result, long lo, long hi) {
  double fluct = 0.0;
  for (std::size_t a = 0; a < result.partial_means.size(); ++a) {
    if (result.partial_means[a].first < lo || result.partial_means[a].first > hi) continue;
    for (std::size_t b = a + 1; b < result.partial_means.size(); ++b) {
      if (result.partial_means[b].first < lo || result.partial_means[b].first > hi) continue;
      fluct = std::max(fluct, linf_distance(result.partial_means[a].second,
                                            result.partial_means[b].second));
    }
  }
  return fluct;
}

OmegaEstimate omega_estimate(const Trajectory& traj, double tail_fraction, double cluster_radius) {
  const std::size_t len = traj.points.size();
  if (len < 100) fail(errc::trajectory_too_short, "omega_estimate needs >= 100 points");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    fail(errc::param_out_of_range, "tail_fraction must lie in (0, 1]");
  const std::size_t tail_len =
      std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(len))));
  const std::size_t start = len - tail_len;

  OmegaEstimate est;
  for (std::size_t t = start; t < len; ++t) {
    const SimplexPoint& x = traj.points[t];
    bool assigned = false;
    for (auto& cluster : est.clusters)
      if (linf_distance(cluster.representative, x) <= cluster_radius) {
        ++cluster.visits;
        assigned = true;
        break;
      }
    if (!assigned) est.clusters.push_back({x, 1});
  }

  const int m = traj.points.front().dim();
  const long p_max = std::min<long>(static_cast<long>(tail_len) - 1, factorial_capped(m, 10000));
  for (long p = 1; p <= p_max; ++p) {
    bool cyclic = true;
    for (std::size_t t = start; t + static_cast<std::size_t>(p) < len && cyclic; ++t)
      cyclic = linf_distance(traj.points[t], traj.points[t + static_cast<std::size_t>(p)]) <=
               cluster_radius;
    if (cyclic) {
      est.cycle_order = p;
      break;
    }
  }

  est.sorted_limit = decreasing_rearrangement(traj.points.back());
  return est;
}

const char* stability_name(Stability s) {
  switch (s) {
    case Stability::elliptic: return "ELLIPTIC";
    case Stability::hyperbolic: return "HYPERBOLIC";
    case Stability::parabolic: return "PARABOLIC";
    case Stability::mixed: return "MIXED";
  }
  return "UNKNOWN";
}

Eigen::MatrixXd restricted_jacobian(const Operator& op, const SimplexPoint& x) {
  const int m = op.dim();
  const Eigen::MatrixXd jac = op.jacobian(x);
  Eigen::MatrixXd r(m - 1, m - 1);
  for (int i = 0; i + 1 < m; ++i) {
    const Eigen::VectorXd image = jac.col(i) - jac.col(i + 1);  // J (e_i - e_{i+1})
    // coordinates in the basis {e_j - e_{j+1}} are the proper prefix sums
    double prefix = 0.0;
    for (int j = 0; j + 1 < m; ++j) {
      prefix += image(j);
      r(j, i) = prefix;
    }
  }
  return r;
}

FixedPointResult classify_fixed_point(const Operator& op, const SimplexPoint& x0, double tol,
                                      double fp_tol) {
  const double residual = residual_at(op, x0);
  if (residual > fp_tol)
    fail(errc::not_a_fixed_point,
         "residual " + std::to_string(residual) + " exceeds " + std::to_string(fp_tol));

  FixedPointResult result{x0, residual, Stability::mixed, {}, false, std::nullopt};
  const Eigen::MatrixXd r = restricted_jacobian(op, x0);
  const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(r, false).eigenvalues();
  result.restricted_moduli.resize(static_cast<std::size_t>(eig.size()));
  for (int i = 0; i < eig.size(); ++i)
    result.restricted_moduli[static_cast<std::size_t>(i)] = std::abs(eig(i));
  std::sort(result.restricted_moduli.begin(), result.restricted_moduli.end(),
            std::greater<double>());

  const double top = result.restricted_moduli.front();
  const double bottom = result.restricted_moduli.back();
  if (top < 1.0 - tol)
    result.classification = Stability::elliptic;
  else if (bottom > 1.0 + tol)
    result.classification = Stability::hyperbolic;
  else if (top <= 1.0 + tol)
    result.classification = Stability::parabolic;
  else
    result.classification = Stability::mixed;
  return result;
}

// ---------------------------------------------------------------------------
// Fixed-point search

namespace {

std::vector<double> chart_to_full(const Eigen::VectorXd& y, int m) {
  std::vector<double> x(static_cast<std::size_t>(m));
  double sum = 0.0;
  for (int i = 0; i + 1 < m; ++i) {
    x[static_cast<std::size_t>(i)] = y(i);
    sum += y(i);
  }
  x[static_cast<std::size_t>(m - 1)] = 1.0 - sum;
  return x;
}

Eigen::VectorXd chart_residual(const Operator& op, const Eigen::VectorXd& y) {
  const int m = op.dim();
  const auto x = chart_to_full(y, m);
  const auto vx = op.apply_raw(x);
  Eigen::VectorXd f(m - 1);
  for (int k = 0; k + 1 < m; ++k)
    f(k) = vx[static_cast<std::size_t>(k)] - x[static_cast<std::size_t>(k)];
  return f;
}

// Damped pseudo-Newton on the chart; tolerates the rank-deficient Jacobians a
// fixed continuum produces by solving in the least-squares sense. Keeps
// polishing past the acceptance tolerance so that distinct starts converging
// to one root land within the deduplication radius even when the map contracts
// slowly around it.
std::optional<SimplexPoint> newton_from(const Operator& op, const SimplexPoint& start,
                                        double fp_tol) {
  const int m = op.dim();
  Eigen::VectorXd y(m - 1);
  for (int i = 0; i + 1 < m; ++i) y(i) = start[i];

  std::optional<SimplexPoint> best;
  double best_residual = std::numeric_limits<double>::infinity();

  for (int it = 0; it < 100; ++it) {
    if (!y.allFinite() || y.lpNorm<Eigen::Infinity>() > 1e6) break;
    const auto x_simplex = project_to_simplex(chart_to_full(y, m));
    const double r = residual_at(op, x_simplex);
    if (r < best_residual) {
      best = x_simplex;
      best_residual = r;
    }
    if (best_residual <= 1e-15) break;

    const auto x = chart_to_full(y, m);
    const Eigen::MatrixXd jac = op.jacobian_raw(x);
    Eigen::MatrixXd jg(m - 1, m - 1);
    for (int k = 0; k + 1 < m; ++k)
      for (int i = 0; i + 1 < m; ++i)
        jg(k, i) = jac(k, i) - jac(k, m - 1) - (k == i ? 1.0 : 0.0);

    const Eigen::VectorXd f = chart_residual(op, y);
    const double fnorm = f.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(fnorm)) break;
    const Eigen::VectorXd dy = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(jg).solve(-f);
    if (!dy.allFinite()) break;

    double alpha = 1.0;
    bool improved = false;
    for (int h = 0; h < 60; ++h) {
      const Eigen::VectorXd trial = y + alpha * dy;
      if (chart_residual(op, trial).lpNorm<Eigen::Infinity>() < fnorm) {
        y = trial;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }
  if (best && best_residual <= fp_tol) return best;
  return std::nullopt;
}

// Projected gradient descent on 1/2 ||Vx - x||^2, the fallback when Newton
// stalls.
std::optional<SimplexPoint> descent_from(const Operator& op, const SimplexPoint& start,
                                         double fp_tol) {
  const int m = op.dim();
  SimplexPoint x = start;
  for (int it = 0; it < 1000; ++it) {
    if (residual_at(op, x) <= fp_tol) return x;
    const auto vx = op.apply_raw(x.coords());
    Eigen::VectorXd f(m);
    for (int k = 0; k < m; ++k) f(k) = vx[static_cast<std::size_t>(k)] - x[k];
    const double value = 0.5 * f.squaredNorm();
    const Eigen::MatrixXd jac = op.jacobian_raw(x.coords());
    const Eigen::VectorXd grad =
        (jac - Eigen::MatrixXd::Identity(m, m)).transpose() * f;
    const double gnorm2 = grad.squaredNorm();
    if (gnorm2 == 0.0) return std::nullopt;

    double eta = 1.0;
    bool moved = false;
    for (int h = 0; h < 40; ++h) {
      std::vector<double> trial(static_cast<std::size_t>(m));
      for (int k = 0; k < m; ++k) trial[static_cast<std::size_t>(k)] = x[k] - eta * grad(k);
      const SimplexPoint candidate = project_to_simplex(std::move(trial));
      const auto vc = op.apply_raw(candidate.coords());
      double cand_value = 0.0;
      for (int k = 0; k < m; ++k) {
        const double d = vc[static_cast<std::size_t>(k)] - candidate[k];
        cand_value += 0.5 * d * d;
      }
      if (cand_value < value - 1e-4 * eta * gnorm2) {
        x = candidate;
        moved = true;
        break;
      }
      eta *= 0.5;
    }
    if (!moved) return std::nullopt;
  }
  if (residual_at(op, x) <= fp_tol) return x;
  return std::nullopt;
}

SimplexPoint lerp_point(const SimplexPoint& p, const SimplexPoint& q, double t) {
  std::vector<double> c(static_cast<std::size_t>(p.dim()));
  for (int i = 0; i < p.dim(); ++i) {
    c[static_cast<std::size_t>(i)] = (1.0 - t) * p[i] + t * q[i];
    c[static_cast<std::size_t>(i)] = std::max(c[static_cast<std::size_t>(i)], 0.0);
  }
  double sum = std::accumulate(c.begin(), c.end(), 0.0);
  for (double& v : c) v /= sum;
  return SimplexPoint(std::move(c));
}

}  // namespace

SimplexPoint project_to_simplex(std::vector<double> v) {
  // classic sort-based Euclidean projection
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double candidate = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - candidate > 0.0) theta = candidate;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
  double sum = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= sum;
  return SimplexPoint(std::move(v));
}

std::vector<FixedPointResult> find_fixed_points(const Operator& op, int n_starts, double fp_tol,
                                                std::uint64_t seed) {
  if (n_starts < 1) fail(errc::param_out_of_range, "find_fixed_points needs n_starts >= 1");
  const int m = op.dim();

  std::vector<SimplexPoint> found;
  auto record = [&](const SimplexPoint& x) {
    for (const auto& other : found)
      if (linf_distance(other, x) <= 10.0 * fp_tol) return;
    found.push_back(x);
  };

  // vertices admit a direct residual test
  for (int i = 0; i < m; ++i) {
    const SimplexPoint v = SimplexPoint::vertex(m, i);
    if (residual_at(op, v) <= fp_tol) record(v);
  }

  std::vector<SimplexPoint> starts;
  starts.push_back(SimplexPoint::barycenter(m));
  for (int s = 0; s < n_starts; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    starts.push_back(sample_uniform(m, rng));
  }

  auto results = parallel_chunks<std::optional<SimplexPoint>>(
      starts.size(), [&](std::size_t s) -> std::optional<SimplexPoint> {
        auto hit = newton_from(op, starts[s], fp_tol);
        if (!hit) {
          hit = descent_from(op, starts[s], fp_tol);
          if (hit) {
            // polish the descent result so duplicates collapse under dedup
            if (auto polished = newton_from(op, *hit, fp_tol)) hit = polished;
          }
        }
        return hit;
      });
  for (const auto& hit : results)
    if (hit) record(*hit);

  if (found.empty()) fail(errc::no_convergence, "no start converged to a fixed point");

  // Continuum detection along the most distant pair. Pairs closer than
  // 1000 * fp_tol are treated as one multiply-found root, not a segment:
  // probing a microscopic interval proves nothing at the working tolerance.
  std::optional<std::pair<SimplexPoint, SimplexPoint>> segment;
  std::size_t seg_a = 0, seg_b = 0;
  if (found.size() >= 2) {
    double best = -1.0;
    for (std::size_t a = 0; a < found.size(); ++a)
      for (std::size_t b = a + 1; b < found.size(); ++b) {
        const double d = linf_distance(found[a], found[b]);
        if (d > best) {
          best = d;
          seg_a = a;
          seg_b = b;
        }
      }
    const SimplexPoint& p = found[seg_a];
    const SimplexPoint& q = found[seg_b];
    bool all_fixed = best > 1000.0 * fp_tol;
    for (int k = 1; k <= 11 && all_fixed; ++k)
      all_fixed = residual_at(op, lerp_point(p, q, k / 12.0)) <= fp_tol;

    if (all_fixed) {
      // farthest the line stays inside the simplex, measured from t = `from`
      auto boundary_extent = [&](double from, double sign) {
        double lo = 0.0, hi = 64.0;
        while (hi - lo > 1e-13) {
          const double mid = 0.5 * (lo + hi);
          const double t = from + sign * mid;
          bool inside = true;
          for (int i = 0; i < m; ++i)
            if ((1.0 - t) * p[i] + t * q[i] < -kMassTol) inside = false;
          if (inside)
            lo = mid;
          else
            hi = mid;
        }
        return lo;
      };
      // bisect fixedness between a known-fixed t and the boundary
      auto bisect_fixed = [&](double from, double sign) {
        const double extent = boundary_extent(from, sign);
        double good = from, bad = from + sign * extent;
        if (residual_at(op, lerp_point(p, q, bad)) <= fp_tol) return bad;
        while (std::abs(bad - good) > 1e-13) {
          const double mid = 0.5 * (good + bad);
          if (residual_at(op, lerp_point(p, q, mid)) <= fp_tol)
            good = mid;
          else
            bad = mid;
        }
        return good;
      };
      const double t_lo = bisect_fixed(0.0, -1.0);
      const double t_hi = bisect_fixed(1.0, +1.0);
      segment = std::make_pair(lerp_point(p, q, t_lo), lerp_point(p, q, t_hi));
    }
  }

  std::vector<FixedPointResult> out;
  if (segment) {
    const SimplexPoint& p = found[seg_a];
    const SimplexPoint& q = found[seg_b];
    FixedPointResult rep = classify_fixed_point(op, p, 1e-9, fp_tol);
    rep.continuum = true;
    rep.segment = segment;
    out.push_back(std::move(rep));
    // keep points that do not lie on the certified segment
    for (std::size_t idx = 0; idx < found.size(); ++idx) {
      if (idx == seg_a || idx == seg_b) continue;
      const SimplexPoint& z = found[idx];
      double dot = 0.0, norm2 = 0.0;
      for (int i = 0; i < m; ++i) {
        dot += (z[i] - p[i]) * (q[i] - p[i]);
        norm2 += (q[i] - p[i]) * (q[i] - p[i]);
      }
      const double t = norm2 > 0.0 ? dot / norm2 : 0.0;
      const SimplexPoint nearest = lerp_point(p, q, std::clamp(t, -64.0, 64.0));
      if (linf_distance(z, nearest) > 10.0 * fp_tol)
        out.push_back(classify_fixed_point(op, z, 1e-9, fp_tol));
    }
  } else {
    for (const auto& z : found) out.push_back(classify_fixed_point(op, z, 1e-9, fp_tol));
  }
  return out;
}

}  // namespace qso
