#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qso/tensor.hpp"

namespace qso {

/// Residual tolerance for accepting a reported fixed point.
inline constexpr double kFixedPointTol = 1e-10;

struct Trajectory {
  std::vector<SimplexPoint> points;  // x, Vx, V^2 x, ...
  std::vector<double> step_defects;  // |mass - 1| incurred producing points[t]
  std::string op_name;
  bool renormalized = true;
  double mass_defect_max = 0.0;  // worst pre-renormalization |mass - 1|
};

/// n applications of the operator. With renormalize off the raw polynomial
/// output is propagated unchanged (diagnostics mode for measuring drift);
/// recorded points are still normalized simplex points.
Trajectory iterate(const Operator& op, const SimplexPoint& x0, long n, bool renormalize = true);

struct ChainCheck {
  bool holds = true;
  double min_slack = 0.0;
  std::optional<long> first_violation;  // index t of the first failing step x_t -> x_{t+1}
};

/// Verifies that each step of the trajectory majorizes (or is equivalent to)
/// its predecessor, the monotone chain a dissipative operator must produce.
ChainCheck majorization_chain_check(const Trajectory& traj, double tol = kCompareTol);

/// Sum of the coordinates outside `excluded`; decreases along trajectories of
/// the concentrating operator forms.
double lyapunov_phi(const SimplexPoint& x, const std::set<int>& excluded);

struct LyapunovCheck {
  bool nonincreasing = true;
  double worst_increase = 0.0;
};

LyapunovCheck lyapunov_monotone(const Trajectory& traj, const std::set<int>& excluded,
                                double tol = kCompareTol);

struct CesaroResult {
  std::vector<std::pair<long, std::vector<double>>> partial_means;  // (n, mean of first n iterates)
  bool converged = false;
  std::optional<SimplexPoint> limit_estimate;
  double fluctuation = 0.0;  // max pairwise distance among the last 10 sampled means
  bool log_domain = false;   // Volterra operators evolve in log coordinates
};

/// Running Cesaro mean of the trajectory, sampled at geometrically spaced n
/// (default: powers of 2) plus a 10-point tail window ending at n_max; the
/// convergence flag reads the tail window. Non-convergence over the computed
/// range is a diagnosis, never a proof.
///
/// Volterra-form quadratic operators are iterated in log coordinates: direct
/// double-precision iteration hits exact zeros once the boundary approach
/// outruns the exponent range, which freezes the trajectory on an edge and
/// destroys the long-run averaging behavior this probe exists to measure.
CesaroResult cesaro(const Operator& op, const SimplexPoint& x0, long n_max, double tol,
                    std::vector<long> schedule = {});

/// Max pairwise distance among sampled means with lo <= n <= hi.
double fluctuation_in_range(const CesaroResult& result, long lo, long hi);

struct OmegaEstimate {
  struct Cluster {
    SimplexPoint representative;
    long visits = 0;
  };
  std::vector<Cluster> clusters;
  std::optional<long> cycle_order;
  std::vector<double> sorted_limit;  // decreasing rearrangement of the final point
};

/// Greedy radius clustering of the trajectory tail plus stride-based cycle
/// detection (cycle order bounded by m!).
OmegaEstimate omega_estimate(const Trajectory& traj, double tail_fraction = 0.2,
                             double cluster_radius = 1e-4);

enum class Stability { elliptic, hyperbolic, parabolic, mixed };
const char* stability_name(Stability s);

struct FixedPointResult {
  SimplexPoint point;
  double residual = 0.0;
  Stability classification = Stability::mixed;
  std::vector<double> restricted_moduli;  // eigenvalue moduli, descending
  bool continuum = false;
  std::optional<std::pair<SimplexPoint, SimplexPoint>> segment;  // endpoints when continuum
};

/// Jacobian restricted to the invariant hyperplane {sum v = 0} in the basis
/// {e_i - e_{i+1}}; its spectrum drives the fixed-point classification and is
/// invariant under the representation of the operator.
Eigen::MatrixXd restricted_jacobian(const Operator& op, const SimplexPoint& x);

/// Classification bands around modulus 1 with half-width tol: ELLIPTIC all
/// below, HYPERBOLIC all above, PARABOLIC touching from below, MIXED otherwise.
FixedPointResult classify_fixed_point(const Operator& op, const SimplexPoint& x0,
                                      double tol = 1e-9, double fp_tol = kFixedPointTol);

/// Multistart fixed-point search: all vertices analytically, the barycenter,
/// and n_starts random starts refined by damped pseudo-Newton in simplex chart
/// coordinates with a projected-descent fallback. Results are deduplicated;
/// when two distinct fixed points span a pointwise-fixed line the result is
/// flagged as a continuum with endpoints located by bisection.
std::vector<FixedPointResult> find_fixed_points(const Operator& op, int n_starts, double fp_tol,
                                                std::uint64_t seed);

/// Euclidean projection onto the simplex.
SimplexPoint project_to_simplex(std::vector<double> v);

}  // namespace qso
