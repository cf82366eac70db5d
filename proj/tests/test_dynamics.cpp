#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qso/dissipativity.hpp"
#include "qso/dynamics.hpp"
#include "qso/gallery.hpp"

using namespace qso;

namespace {

QsoTensor uniform_tensor(int m) {
  QsoTensor::Builder b(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) b.set(i, j, k, 1.0 / m);
  return b.validated();
}

}  // namespace

TEST_CASE("iterate basics") {
  const auto id = gallery("identity");
  const SimplexPoint x0({0.2, 0.3, 0.5});
  const auto traj = iterate(id, x0, 10);
  REQUIRE(traj.points.size() == 11);
  for (const auto& p : traj.points) CHECK(linf_distance(p, x0) <= 1e-15);

  const auto step = iterate(gallery("example-3d"), SimplexPoint::barycenter(3), 1);
  CHECK(step.points[1][0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(step.points[1][1] == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
  CHECK(step.points[1][2] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));

  CHECK_THROWS_AS(iterate(id, SimplexPoint::barycenter(4), 5), Error);
}

TEST_CASE("form6 instances run to the first vertex") {
  const auto op = gallery("form6-random", {{"seed", 7}});
  const auto traj = iterate(op, SimplexPoint::barycenter(3), 10000);
  CHECK(linf_distance(traj.points.back(), SimplexPoint::vertex(3, 0)) <= 1e-8);
}

TEST_CASE("majorization chain checks") {
  Rng rng(42);
  const auto ex = gallery("example-3d");
  for (int t = 0; t < 10; ++t) {
    const auto traj = iterate(ex, sample_uniform(3, rng), 300);
    const auto chain = majorization_chain_check(traj);
    CHECK(chain.holds);
    CHECK(chain.min_slack >= -1e-12);
  }

  const auto id_chain = majorization_chain_check(iterate(gallery("identity"), SimplexPoint::barycenter(3), 50));
  CHECK(id_chain.holds);
  CHECK(id_chain.min_slack == 0.0);

  const auto bad = iterate(gallery("counterexample-necessary"), SimplexPoint({0.5, 0.49, 0.01}), 20);
  const auto broken = majorization_chain_check(bad);
  CHECK_FALSE(broken.holds);
  REQUIRE(broken.first_violation.has_value());
  CHECK(*broken.first_violation == 0);
}

TEST_CASE("lyapunov sums") {
  CHECK(lyapunov_phi(SimplexPoint::vertex(3, 0), {0}) == 0.0);
  CHECK(lyapunov_phi(SimplexPoint({0.2, 0.3, 0.5}), {0}) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_THROWS_AS(lyapunov_phi(SimplexPoint::barycenter(3), {}), Error);
  CHECK_THROWS_AS(lyapunov_phi(SimplexPoint::barycenter(3), {0, 1, 2}), Error);

  Rng rng(9);
  const auto f6 = gallery("form6-random", {{"seed", 3}});
  const auto t6 = iterate(f6, sample_uniform(3, rng), 100);
  const auto l6 = lyapunov_monotone(t6, {0}, 1e-12);
  CHECK(l6.nonincreasing);

  const auto f8 = gallery("form8-instance");
  const auto t8 = iterate(f8, sample_uniform(4, rng), 100);
  const auto l8 = lyapunov_monotone(t8, {0, 1}, 1e-12);
  CHECK(l8.nonincreasing);
}

TEST_CASE("cesaro means at fixed points and along converging runs") {
  const auto ex = gallery("example-3d");
  const auto at_vertex = cesaro(ex, SimplexPoint::vertex(3, 0), 1000, 1e-9);
  CHECK(at_vertex.converged);
  REQUIRE(at_vertex.limit_estimate.has_value());
  CHECK(linf_distance(*at_vertex.limit_estimate, SimplexPoint::vertex(3, 0)) <= 1e-15);

  const auto from_bary = cesaro(ex, SimplexPoint::barycenter(3), 10000, 1e-6);
  CHECK(from_bary.converged);
  CHECK_FALSE(from_bary.log_domain);

  // every partial mean stays on the simplex
  for (const auto& [n, mean] : from_bary.partial_means) {
    double sum = 0.0;
    for (double v : mean) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }

  const auto id = cesaro(gallery("identity"), SimplexPoint({0.1, 0.2, 0.7}), 100, 1e-12);
  CHECK(id.converged);
  CHECK(id.fluctuation == 0.0);
  CHECK(id.log_domain);  // the identity is Volterra

  CHECK_THROWS_AS(cesaro(ex, SimplexPoint::barycenter(3), 5, 1e-6), Error);
}

TEST_CASE("log-domain evolution agrees with direct iteration while it can") {
  const auto zakh = gallery("zakharevich");
  const SimplexPoint x0({0.3, 0.3, 0.4});
  const auto result = cesaro(zakh, x0, 40, 1e-6);
  REQUIRE(result.log_domain);

  // recompute the same running means through plain renormalized iteration
  const auto traj = iterate(zakh, x0, 40);
  std::vector<double> mean(3, 0.0);
  std::size_t sample = 0;
  for (long n = 1; n <= 40; ++n) {
    for (int i = 0; i < 3; ++i)
      mean[static_cast<std::size_t>(i)] +=
          (traj.points[static_cast<std::size_t>(n - 1)][i] - mean[static_cast<std::size_t>(i)]) / n;
    if (sample < result.partial_means.size() && result.partial_means[sample].first == n) {
      CHECK(linf_distance(result.partial_means[sample].second, mean) <= 1e-12);
      ++sample;
    }
  }
  CHECK(sample == result.partial_means.size());
}

TEST_CASE("zakharevich cesaro means keep moving") {
  const auto zakh = gallery("zakharevich");
  const auto result = cesaro(zakh, SimplexPoint({0.3, 0.3, 0.4}), 100000, 1e-6);
  CHECK(result.log_domain);
  CHECK(fluctuation_in_range(result, 10000, 100000) > 0.01);
}

TEST_CASE("omega estimates") {
  Rng rng(20);
  const auto f6 = gallery("form6-random", {{"seed", 5}});
  const auto t6 = iterate(f6, sample_uniform(3, rng), 2000);
  const auto o6 = omega_estimate(t6);
  CHECK(o6.clusters.size() == 1);
  CHECK(linf_distance(o6.clusters[0].representative, SimplexPoint::vertex(3, 0)) <= 1e-4);
  REQUIRE(o6.cycle_order.has_value());
  CHECK(*o6.cycle_order == 1);
  CHECK(std::abs(o6.sorted_limit[0] - 1.0) <= 1e-6);
  // every cluster representative rearranges to the sorted limit
  CHECK(linf_distance(decreasing_rearrangement(o6.clusters[0].representative),
                      std::span<const double>(o6.sorted_limit)) <= 1e-6);

  const auto id_traj = iterate(gallery("identity"), SimplexPoint({0.6, 0.3, 0.1}), 200);
  const auto oid = omega_estimate(id_traj);
  CHECK(oid.clusters.size() == 1);
  CHECK(linf_distance(oid.clusters[0].representative, SimplexPoint({0.6, 0.3, 0.1})) <= 1e-12);

  const auto f8 = gallery("form8-instance");
  for (int t = 0; t < 5; ++t) {
    const auto traj = iterate(f8, sample_uniform(4, rng), 500);
    const auto est = omega_estimate(traj);
    for (const auto& cluster : est.clusters) {
      CHECK(cluster.representative[2] <= 1e-6);
      CHECK(cluster.representative[3] <= 1e-6);
      CHECK(linf_distance(decreasing_rearrangement(cluster.representative),
                          std::span<const double>(est.sorted_limit)) <= 1e-6);
    }
  }

  CHECK_THROWS_AS(omega_estimate(iterate(f8, SimplexPoint::barycenter(4), 50)), Error);
}

TEST_CASE("restricted jacobian and classification at reference points") {
  const auto ex = gallery("example-3d");
  const auto at_e1 = classify_fixed_point(ex, SimplexPoint::vertex(3, 0));
  CHECK(at_e1.classification == Stability::parabolic);
  REQUIRE(at_e1.restricted_moduli.size() == 2);
  CHECK(at_e1.restricted_moduli[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(at_e1.restricted_moduli[1] == doctest::Approx(0.0).epsilon(1e-12));

  const Operator uni("uniform", uniform_tensor(3));
  const auto at_bary = classify_fixed_point(uni, SimplexPoint::barycenter(3));
  CHECK(at_bary.classification == Stability::elliptic);
  for (double mod : at_bary.restricted_moduli) CHECK(mod <= 1e-12);

  const auto zakh = gallery("zakharevich");
  const auto at_center = classify_fixed_point(zakh, SimplexPoint::barycenter(3));
  CHECK(at_center.classification == Stability::hyperbolic);
  for (double mod : at_center.restricted_moduli)
    CHECK(mod == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-9));

  // its vertices mix an expanding and a contracting direction
  const auto at_zakh_vertex = classify_fixed_point(zakh, SimplexPoint::vertex(3, 0));
  CHECK(at_zakh_vertex.classification == Stability::mixed);
  REQUIRE(at_zakh_vertex.restricted_moduli.size() == 2);
  CHECK(at_zakh_vertex.restricted_moduli[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(at_zakh_vertex.restricted_moduli[1] == doctest::Approx(0.0).epsilon(1e-12));

  const auto contracting = gallery("two-dim-family", {{"a", 1.5}});
  const auto at_vertex = classify_fixed_point(contracting, SimplexPoint::vertex(2, 0));
  CHECK(at_vertex.classification == Stability::elliptic);
  REQUIRE(at_vertex.restricted_moduli.size() == 1);
  CHECK(at_vertex.restricted_moduli[0] == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(classify_fixed_point(ex, SimplexPoint::barycenter(3)), Error);
}

TEST_CASE("form8 segment points are parabolic with moduli {1, 0, 0}") {
  const auto f8 = gallery("form8-instance");
  for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    std::vector<double> c = {lambda, 1.0 - lambda, 0.0, 0.0};
    const SimplexPoint x(std::move(c));
    CHECK(linf_distance(f8.apply(x), x) <= 1e-12);
    const auto cls = classify_fixed_point(f8, x);
    CHECK(cls.classification == Stability::parabolic);
    REQUIRE(cls.restricted_moduli.size() == 3);
    CHECK(std::abs(cls.restricted_moduli[0] - 1.0) <= 1e-12);
    CHECK(cls.restricted_moduli[1] <= 1e-12);
    CHECK(cls.restricted_moduli[2] <= 1e-12);
  }
}

TEST_CASE("classification moduli are invariant under relabeling") {
  Rng rng(2718);
  const auto f8 = gallery("form8-instance");
  std::vector<int> sigma = {2, 0, 3, 1};
  const auto relabeled = f8.relabeled(sigma, "perm");
  const SimplexPoint x({0.5, 0.5, 0.0, 0.0});
  std::vector<double> px(4);
  for (int i = 0; i < 4; ++i) px[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] = x[i];
  const auto base = classify_fixed_point(f8, x);
  const auto perm = classify_fixed_point(relabeled, SimplexPoint(px));
  REQUIRE(base.restricted_moduli.size() == perm.restricted_moduli.size());
  for (std::size_t i = 0; i < base.restricted_moduli.size(); ++i)
    CHECK(base.restricted_moduli[i] == doctest::Approx(perm.restricted_moduli[i]).epsilon(1e-9));
}

TEST_CASE("fixed point search: unique attractor") {
  const auto op = gallery("form6-random", {{"seed", 12}});
  const auto fps = find_fixed_points(op, 16, kFixedPointTol, 1);
  REQUIRE(fps.size() == 1);
  CHECK_FALSE(fps[0].continuum);
  CHECK(linf_distance(fps[0].point, SimplexPoint::vertex(3, 0)) <= 1e-9);
}

TEST_CASE("fixed point search: segment continuum") {
  const auto f8 = gallery("form8-instance");
  const auto fps = find_fixed_points(f8, 16, kFixedPointTol, 2);
  REQUIRE(fps.size() == 1);
  CHECK(fps[0].continuum);
  REQUIRE(fps[0].segment.has_value());
  const auto& [lo, hi] = *fps[0].segment;
  const double d1 = std::min(linf_distance(lo, SimplexPoint::vertex(4, 0)),
                             linf_distance(lo, SimplexPoint::vertex(4, 1)));
  const double d2 = std::min(linf_distance(hi, SimplexPoint::vertex(4, 0)),
                             linf_distance(hi, SimplexPoint::vertex(4, 1)));
  CHECK(d1 <= 1e-9);
  CHECK(d2 <= 1e-9);
  CHECK(linf_distance(lo, hi) > 0.5);
}

TEST_CASE("fixed point search: identity fixes everything") {
  const auto fps = find_fixed_points(gallery("identity"), 8, kFixedPointTol, 3);
  REQUIRE(fps.size() >= 1);
  CHECK(fps[0].continuum);
  // the fixed line through the two most distant hits extends to the boundary
  REQUIRE(fps[0].segment.has_value());
  for (const auto& end : {fps[0].segment->first, fps[0].segment->second}) {
    double min_coord = 1.0;
    for (int i = 0; i < end.dim(); ++i) min_coord = std::min(min_coord, end[i]);
    CHECK(min_coord <= 1e-9);
  }
}

TEST_CASE("fixed point search: isolated points of the volterra cycle operator") {
  const auto zakh = gallery("zakharevich");
  const auto fps = find_fixed_points(zakh, 24, kFixedPointTol, 4);
  // three vertices plus the barycenter, no continuum
  CHECK(fps.size() == 4);
  for (const auto& fp : fps) {
    CHECK_FALSE(fp.continuum);
    CHECK(fp.residual <= kFixedPointTol);
  }
  bool has_center = false;
  for (const auto& fp : fps)
    has_center = has_center || linf_distance(fp.point, SimplexPoint::barycenter(3)) <= 1e-8;
  CHECK(has_center);
}

namespace {

// Dissipative operator whose big part feeds the singleton's coordinate and
// vice versa: trajectories settle on an exact 2-cycle on the first edge.
QsoTensor swap_tensor() {
  QsoTensor::Builder b(3);
  b.set(0, 0, 1, 1.0).set(1, 1, 0, 1.0).set(2, 2, 0, 1.0);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      b.set(i, j, 0, 0.5).set(j, i, 0, 0.5);
      b.set(i, j, 1, 0.5).set(j, i, 1, 0.5);
    }
  return b.validated();
}

// Form-7 shape with the singleton species away from both named parts: the
// minor coordinates die instantly and the edge dynamics concentrate on the
// big part's vertex.
QsoTensor form7_tensor() {
  QsoTensor::Builder b(4);
  b.set(0, 0, 0, 1.0).set(1, 1, 0, 1.0).set(3, 3, 0, 1.0);
  b.set(2, 2, 1, 1.0);
  for (int i : {0, 1, 3}) {
    b.set(i, 2, 0, 0.5).set(2, i, 0, 0.5);
    b.set(i, 2, 1, 0.5).set(2, i, 1, 0.5);
  }
  const int pairs[3][2] = {{0, 1}, {0, 3}, {1, 3}};
  for (const auto& pr : pairs) {
    b.set(pr[0], pr[1], 0, 0.75).set(pr[1], pr[0], 0, 0.75);
    b.set(pr[0], pr[1], 1, 0.25).set(pr[1], pr[0], 1, 0.25);
  }
  return b.validated();
}

}  // namespace

TEST_CASE("a dissipative operator can settle on a 2-cycle") {
  const Operator op("swap", swap_tensor());
  Rng rng(99);
  const auto x0 = sample_uniform(3, rng);
  const auto traj = iterate(op, x0, 1000);

  const auto chain = majorization_chain_check(traj);
  CHECK(chain.holds);
  CHECK(chain.min_slack >= -1e-12);

  const auto est = omega_estimate(traj);
  CHECK(est.clusters.size() == 2);
  REQUIRE(est.cycle_order.has_value());
  CHECK(*est.cycle_order == 2);
  // both cycle points rearrange to the same sorted limit
  for (const auto& cluster : est.clusters)
    CHECK(linf_distance(decreasing_rearrangement(cluster.representative),
                        std::span<const double>(est.sorted_limit)) <= 1e-6);

  // the trajectory does not converge, but its Cesaro means do; the mean
  // zigzags with amplitude ~gap/n, so the 1e-6 window needs n ~ 1e6
  const auto ces = cesaro(op, x0, 1000000, 1e-6);
  CHECK(ces.converged);

  // the unique fixed point is the edge midpoint, parabolic through the
  // period-2 eigenvalue -1
  const auto fps = find_fixed_points(op, 12, kFixedPointTol, 6);
  REQUIRE(fps.size() == 1);
  CHECK_FALSE(fps[0].continuum);
  CHECK(linf_distance(fps[0].point, SimplexPoint({0.5, 0.5, 0.0})) <= 1e-9);
  CHECK(fps[0].classification == Stability::parabolic);
  CHECK(fps[0].restricted_moduli[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("form-7 shape with a detached singleton concentrates on one vertex") {
  const Operator op("form7", form7_tensor());
  const auto partition = extract_alpha_partition(op);
  const auto cls = classify_form(op.qso(), partition);
  CHECK(cls.form == FormClass::form7);
  CHECK(cls.l == 2);
  CHECK(cls.k_singleton == 1);
  CHECK(cls.k_main == 0);
  CHECK(check_necessary(op).overall);

  Rng rng(123);
  for (int s = 0; s < 5; ++s) {
    const auto traj = iterate(op, sample_uniform(4, rng), 200);
    CHECK(linf_distance(traj.points.back(), SimplexPoint::vertex(4, 0)) <= 1e-12);
  }
  const auto fps = find_fixed_points(op, 12, kFixedPointTol, 7);
  REQUIRE(fps.size() == 1);
  CHECK(linf_distance(fps[0].point, SimplexPoint::vertex(4, 0)) <= 1e-9);
}

TEST_CASE("diagnostics mode tracks raw drift over short horizons") {
  Rng rng(31);
  const auto t = oracle::random_qso(3, rng);
  const Operator op("random", t);
  const auto traj = iterate(op, sample_uniform(3, rng), 10, false);
  CHECK_FALSE(traj.renormalized);
  CHECK(traj.mass_defect_max <= 1e-12);
  CHECK(traj.step_defects.size() == traj.points.size());

  // the mass defect compounds geometrically once renormalization is off;
  // long horizons are rejected instead of silently degrading
  CHECK_THROWS_AS(iterate(op, sample_uniform(3, rng), 1000, false), Error);
}
