#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "qso/simplex.hpp"

using namespace qso;

TEST_CASE("construction clamps and normalizes") {
  SimplexPoint x({0.5, 0.5 - 1e-12, 1e-12});
  double sum = std::accumulate(x.coords().begin(), x.coords().end(), 0.0);
  CHECK(std::abs(sum - 1.0) <= 1e-15);

  // a coordinate inside the tolerance band is clamped to zero
  SimplexPoint y({0.6, 0.4 + 5e-11, -5e-11});
  CHECK(y[2] == 0.0);

  CHECK_THROWS_AS(SimplexPoint({0.7, 0.4}), Error);             // mass 1.1
  CHECK_THROWS_AS(SimplexPoint({1.0 + 1e-9, -1e-9}), Error);    // coordinate too negative
  CHECK_THROWS_AS(SimplexPoint({1.0}), Error);                  // m < 2
}

TEST_CASE("vertex and barycenter constructors") {
  const auto e2 = SimplexPoint::vertex(4, 1);
  CHECK(e2[0] == 0.0);
  CHECK(e2[1] == 1.0);
  const auto c = SimplexPoint::barycenter(5);
  for (int i = 0; i < 5; ++i) CHECK(c[i] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(SimplexPoint::vertex(1, 0), Error);
  CHECK_THROWS_AS(SimplexPoint::vertex(3, 3), Error);
}

TEST_CASE("decreasing rearrangement") {
  CHECK(decreasing_rearrangement(SimplexPoint({0.2, 0.5, 0.3})) ==
        std::vector<double>{0.5, 0.3, 0.2});
  const double third = 1.0 / 3.0;
  CHECK(decreasing_rearrangement(SimplexPoint({third, third, third})) ==
        std::vector<double>{third, third, third});
  CHECK(decreasing_rearrangement(SimplexPoint({0.01, 0.5, 0.49})) ==
        std::vector<double>{0.5, 0.49, 0.01});
}

TEST_CASE("rearrangement is a sorted permutation of the input") {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(6));
    const auto x = sample_uniform(m, rng);
    auto sorted = decreasing_rearrangement(x);
    CHECK(std::is_sorted(sorted.rbegin(), sorted.rend()));
    auto a = x.coords();
    auto b = sorted;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("majorization relations on reference points") {
  const auto uniform = SimplexPoint::barycenter(3);
  const auto e1 = SimplexPoint::vertex(3, 0);
  CHECK(compare_majorization(uniform, e1).relation == Relation::majorized_by);
  CHECK(compare_majorization(e1, uniform).relation == Relation::majorizes);

  const SimplexPoint z({0.7, 0.2, 0.1});
  const auto self = compare_majorization(z, z);
  CHECK(self.relation == Relation::equivalent);
  CHECK(self.min_slack_forward == 0.0);
  CHECK(self.min_slack_backward == 0.0);

  // the reference incomparable pair: a point and its image under the
  // counterexample operator
  const SimplexPoint x({0.5, 0.49, 0.01});
  const SimplexPoint y({0.745, 0.196, 0.059});
  const auto v = compare_majorization(x, y);
  CHECK(v.relation == Relation::incomparable);
  CHECK(v.min_slack_forward == doctest::Approx(-0.245).epsilon(1e-9));
  CHECK(v.min_slack_backward == doctest::Approx(-0.049).epsilon(1e-9));
}

TEST_CASE("dimension mismatch is rejected") {
  CHECK_THROWS_AS(compare_majorization(SimplexPoint::barycenter(3), SimplexPoint::barycenter(4)),
                  Error);
}

TEST_CASE("uniform sampling") {
  Rng rng(7);
  const auto x = sample_uniform(2, rng);
  CHECK(x[0] >= 0.0);
  CHECK(x[1] >= 0.0);
  CHECK(std::abs(x[0] + x[1] - 1.0) <= 1e-15);

  Rng a(99), b(99);
  for (int t = 0; t < 10; ++t) CHECK(sample_uniform(3, a) == sample_uniform(3, b));

  CHECK_THROWS_AS(sample_uniform(1, rng), Error);

  Rng stat(12345);
  double mean[3] = {0, 0, 0};
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    const auto p = sample_uniform(3, stat);
    for (int i = 0; i < 3; ++i) mean[i] += p[i];
  }
  for (int i = 0; i < 3; ++i) CHECK(std::abs(mean[i] / n - 1.0 / 3.0) < 0.01);
}

TEST_CASE("bounds between barycenter and vertex hold for random points") {
  Rng rng(2024);
  for (int m = 2; m <= 6; ++m) {
    const auto uniform = SimplexPoint::barycenter(m);
    const auto e1 = SimplexPoint::vertex(m, 0);
    for (int t = 0; t < 2000; ++t) {
      const auto x = sample_uniform(m, rng);
      const auto lower = compare_majorization(uniform, x);
      CHECK((lower.relation == Relation::majorized_by || lower.relation == Relation::equivalent));
      CHECK(lower.min_slack_backward >= -1e-12);
      const auto upper = compare_majorization(x, e1);
      CHECK((upper.relation == Relation::majorized_by || upper.relation == Relation::equivalent));
      CHECK(upper.min_slack_backward >= -1e-12);
    }
  }
}

TEST_CASE("agreement with the naive oracle") {
  Rng rng(555);
  for (int m = 2; m <= 6; ++m) {
    for (int t = 0; t < 2000; ++t) {
      const auto x = sample_uniform(m, rng);
      const auto y = sample_uniform(m, rng);
      const auto got = compare_majorization(x, y);
      const auto want = oracle::naive_majorization(x.coords(), y.coords(), kCompareTol);
      CHECK(static_cast<int>(got.relation) == static_cast<int>(want.rel));
      CHECK(got.min_slack_forward == doctest::Approx(want.fwd).epsilon(1e-13));
      CHECK(got.min_slack_backward == doctest::Approx(want.bwd).epsilon(1e-13));
    }
  }
}

TEST_CASE("transitivity on nested triples") {
  Rng rng(31337);
  auto mix_toward_uniform = [](const SimplexPoint& p, double lambda) {
    std::vector<double> c(static_cast<std::size_t>(p.dim()));
    for (int i = 0; i < p.dim(); ++i)
      c[static_cast<std::size_t>(i)] = lambda / p.dim() + (1.0 - lambda) * p[i];
    return SimplexPoint(std::move(c));
  };
  int checked = 0;
  for (int t = 0; t < 500; ++t) {
    const int m = 2 + static_cast<int>(rng.below(5));
    const auto c = sample_uniform(m, rng);
    const auto b = mix_toward_uniform(c, rng.uniform01());
    const auto a = mix_toward_uniform(b, rng.uniform01());
    const auto ab = compare_majorization(a, b);
    const auto bc = compare_majorization(b, c);
    if (ab.min_slack_backward >= 0.0 && bc.min_slack_backward >= 0.0) {
      const auto ac = compare_majorization(a, c);
      CHECK((ac.relation == Relation::majorized_by || ac.relation == Relation::equivalent));
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("equivalent points have equal rearrangements") {
  Rng rng(808);
  for (int t = 0; t < 300; ++t) {
    const int m = 2 + static_cast<int>(rng.below(5));
    const auto x = sample_uniform(m, rng);
    // a permuted copy is equivalent in the preorder
    std::vector<double> perm = x.coords();
    for (std::size_t i = perm.size() - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.below(i + 1)]);
    const SimplexPoint y(std::move(perm));
    const auto v = compare_majorization(x, y);
    REQUIRE(v.relation == Relation::equivalent);
    CHECK(linf_distance(decreasing_rearrangement(x), decreasing_rearrangement(y)) <= kCompareTol);
  }
}
