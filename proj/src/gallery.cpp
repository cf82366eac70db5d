#include "qso/gallery.hpp"

#include <algorithm>
#include <cmath>

#include "qso/rng.hpp"

namespace qso {
namespace {

double take_param(const ParamMap& params, const std::string& key, double fallback, double lo,
                  double hi, std::vector<std::string>& seen) {
  seen.push_back(key);
  double v = fallback;
  if (auto it = params.find(key); it != params.end()) v = it->second;
  if (!(v >= lo && v <= hi))
    fail(errc::param_out_of_range,
         key + "=" + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
             std::to_string(hi) + "]");
  return v;
}

void reject_unknown(const ParamMap& params, const std::vector<std::string>& seen) {
  for (const auto& [key, value] : params)
    if (std::find(seen.begin(), seen.end(), key) == seen.end())
      fail(errc::param_out_of_range, "unknown parameter '" + key + "'");
}

QsoTensor identity_tensor(int m) {
  QsoTensor::Builder b(m);
  for (int k = 0; k < m; ++k) b.set(k, k, k, 1.0);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      b.set(i, j, i, 0.5).set(j, i, i, 0.5);
      b.set(i, j, j, 0.5).set(j, i, j, 0.5);
    }
  return b.validated();
}

// (Vx)_1 = x1^2+x2^2+x3^2 + x1x2 + x1x3 + x2x3, (Vx)_2 = x1x2 + x1x3, (Vx)_3 = x2x3
QsoTensor example3d_tensor() {
  QsoTensor::Builder b(3);
  b.set(0, 0, 0, 1.0).set(1, 1, 0, 1.0).set(2, 2, 0, 1.0);
  b.set(0, 1, 0, 0.5).set(1, 0, 0, 0.5).set(0, 1, 1, 0.5).set(1, 0, 1, 0.5);
  b.set(0, 2, 0, 0.5).set(2, 0, 0, 0.5).set(0, 2, 1, 0.5).set(2, 0, 1, 0.5);
  b.set(1, 2, 0, 0.5).set(2, 1, 0, 0.5).set(1, 2, 2, 0.5).set(2, 1, 2, 0.5);
  return b.validated();
}

// Same cross terms routed through coordinate 2: the non-convexity partner of v1.
QsoTensor v0_tensor() {
  QsoTensor::Builder b(3);
  b.set(0, 0, 1, 1.0).set(1, 1, 1, 1.0).set(2, 2, 1, 1.0);
  b.set(0, 1, 0, 0.5).set(1, 0, 0, 0.5).set(0, 1, 1, 0.5).set(1, 0, 1, 0.5);
  b.set(0, 2, 0, 0.5).set(2, 0, 0, 0.5).set(0, 2, 1, 0.5).set(2, 0, 1, 0.5);
  b.set(1, 2, 1, 0.5).set(2, 1, 1, 0.5).set(1, 2, 2, 0.5).set(2, 1, 2, 0.5);
  return b.validated();
}

// (Vx)_1 = x1 + x2 - x1x2, (Vx)_2 = 0.8 x1x2, (Vx)_3 = x3 + 0.2 x1x2,
// homogenized through x_i = x_i (x1+x2+x3).
QsoTensor counterexample_tensor() {
  QsoTensor::Builder b(3);
  b.set(0, 0, 0, 1.0).set(1, 1, 0, 1.0).set(2, 2, 2, 1.0);
  b.set(0, 1, 0, 0.5).set(1, 0, 0, 0.5);
  b.set(0, 1, 1, 0.4).set(1, 0, 1, 0.4);
  b.set(0, 1, 2, 0.1).set(1, 0, 2, 0.1);
  b.set(0, 2, 0, 0.5).set(2, 0, 0, 0.5).set(0, 2, 2, 0.5).set(2, 0, 2, 0.5);
  b.set(1, 2, 0, 0.5).set(2, 1, 0, 0.5).set(1, 2, 2, 0.5).set(2, 1, 2, 0.5);
  return b.validated();
}

QsoTensor two_dim_family_tensor(double a) {
  QsoTensor::Builder b(2);
  b.set(0, 0, 0, 1.0).set(1, 1, 0, 1.0);
  b.set(0, 1, 0, a / 2.0).set(1, 0, 0, a / 2.0);
  b.set(0, 1, 1, 1.0 - a / 2.0).set(1, 0, 1, 1.0 - a / 2.0);
  return b.validated();
}

// All squares feed coordinate 1; cross rows put mass >= 1/2 on coordinate 1
// and split the remainder uniformly at random over the other coordinates.
QsoTensor form6_random_tensor(int m, std::uint64_t seed) {
  Rng rng(derive_seed(0xF0836ULL, seed));
  QsoTensor::Builder b(m);
  for (int i = 0; i < m; ++i) b.set(i, i, 0, 1.0);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double p1 = rng.uniform(0.5, 1.0);
      std::vector<double> w(static_cast<std::size_t>(m - 1));
      double sum = 0.0;
      for (double& v : w) {
        v = rng.uniform01();
        sum += v;
      }
      b.set(i, j, 0, p1).set(j, i, 0, p1);
      for (int k = 1; k < m; ++k) {
        const double v = (1.0 - p1) * w[static_cast<std::size_t>(k - 1)] / sum;
        b.set(i, j, k, v).set(j, i, k, v);
      }
    }
  return b.validated();
}

// Square terms all feed coordinate 1, but every cross row leaks strictly
// positive mass to both other coordinates.
QsoTensor form6_nondissipative_tensor(const double t[3][3]) {
  QsoTensor::Builder b(3);
  for (int i = 0; i < 3; ++i) b.set(i, i, 0, 1.0);
  const int pairs[3][2] = {{0, 1}, {1, 2}, {0, 2}};  // x1x2, x2x3, x1x3 triples
  for (int r = 0; r < 3; ++r) {
    const int i = pairs[r][0], j = pairs[r][1];
    for (int k = 0; k < 3; ++k) {
      b.set(i, j, k, t[r][k] / 2.0).set(j, i, k, t[r][k] / 2.0);
    }
  }
  return b.validated();
}

// m = 4: squares of 1, 3, 4 feed coordinate 1, the square of 2 feeds itself;
// rows pairing with species 2 split evenly between coordinates 1 and 2, rows
// (1,3) and (1,4) feed coordinate 1 entirely, row (3,4) splits between 1 and 3.
// The segment between e_1 and e_2 is fixed pointwise.
QsoTensor form8_tensor() {
  QsoTensor::Builder b(4);
  b.set(0, 0, 0, 1.0).set(2, 2, 0, 1.0).set(3, 3, 0, 1.0);
  b.set(1, 1, 1, 1.0);
  for (int i : {0, 2, 3}) {
    b.set(i, 1, 0, 0.5).set(1, i, 0, 0.5);
    b.set(i, 1, 1, 0.5).set(1, i, 1, 0.5);
  }
  b.set(0, 2, 0, 1.0).set(2, 0, 0, 1.0);
  b.set(0, 3, 0, 1.0).set(3, 0, 0, 1.0);
  b.set(2, 3, 0, 0.5).set(3, 2, 0, 0.5);
  b.set(2, 3, 2, 0.5).set(3, 2, 2, 0.5);
  return b.validated();
}

// Two-sex family with species 1 the empty body, species 2 the single female
// and species 3 the male; only mixed pairs produce offspring.
QsoTensor fqso_tensor(double p) {
  QsoTensor::Builder b(3);
  b.set(0, 0, 0, 1.0).set(1, 1, 0, 1.0).set(2, 2, 0, 1.0);
  b.set(0, 1, 0, 1.0).set(1, 0, 0, 1.0);
  b.set(0, 2, 0, 1.0).set(2, 0, 0, 1.0);
  b.set(1, 2, 0, 1.0 - p).set(2, 1, 0, 1.0 - p);
  b.set(1, 2, 1, p / 2.0).set(2, 1, 1, p / 2.0);
  b.set(1, 2, 2, p / 2.0).set(2, 1, 2, p / 2.0);
  return b.validated();
}

// (Vx)_1 = x1^2 + 2 x1x2, (Vx)_2 = x2^2 + 2 x2x3, (Vx)_3 = x3^2 + 2 x1x3.
QsoTensor zakharevich_tensor() {
  QsoTensor::Builder b(3);
  b.set(0, 0, 0, 1.0).set(1, 1, 1, 1.0).set(2, 2, 2, 1.0);
  b.set(0, 1, 0, 1.0).set(1, 0, 0, 1.0);
  b.set(1, 2, 1, 1.0).set(2, 1, 1, 1.0);
  b.set(0, 2, 2, 1.0).set(2, 0, 2, 1.0);
  return b.validated();
}

// Degree-3 example built to satisfy the cubic necessary conditions: cubes feed
// coordinate 1, every mixed triple sends 2/3 to coordinate 1 and 1/3 to 2.
CsoTensor cubic_example_tensor() {
  CsoTensor::Builder b(3);
  const double k1 = 2.0 / 3.0, k2 = 1.0 / 3.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) {
        if (i == j && j == l) {
          b.set(i, j, l, 0, 1.0);
        } else {
          b.set(i, j, l, 0, k1);
          b.set(i, j, l, 1, k2);
        }
      }
  return b.validated();
}

}  // namespace

const std::vector<GalleryEntry>& gallery_roster() {
  static const std::vector<GalleryEntry> roster = {
      {"example-3d",
       "(Vx)1 = x1^2+x2^2+x3^2+x1x2+x1x3+x2x3, (Vx)2 = x1x2+x1x3, (Vx)3 = x2x3; "
       "dissipative, regular with fixed point e1",
       ""},
      {"v0",
       "cross terms as example-3d with squares routed to coordinate 2; dissipative "
       "mixture partner of v1",
       ""},
      {"v1", "alias of example-3d; mixtures of v0 and v1 violate the vertex-row condition", ""},
      {"two-dim-family",
       "m = 2: (Vx)1 = x1^2+x2^2+a*x1x2, (Vx)2 = (2-a)*x1x2; dissipative exactly for a in [1, 2]",
       "a in [0, 2], default 1"},
      {"counterexample-necessary",
       "(Vx)1 = x1+x2-x1x2, (Vx)2 = 0.8*x1x2, (Vx)3 = x3+0.2*x1x2; passes the exact "
       "necessary checks yet fails near (0.5, 0.49, 0.01)",
       ""},
      {"form6-random",
       "random instance with every square feeding coordinate 1 and cross rows "
       "weighted >= 1/2 there; regular with unique fixed point e1",
       "seed (integer, default 1), m in [2, 12], default 3"},
      {"form6-nondissipative",
       "all squares feed coordinate 1 but cross rows leak to both others; regular "
       "yet not dissipative",
       "a2,a3,b2,b3,c2,c3 in [0, 1] with a2+a3 <= 1 etc., default 0.5 each"},
      {"form8-instance",
       "m = 4 operator fixing the whole segment between e1 and e2; every segment "
       "point is parabolic",
       ""},
      {"f-qso",
       "two-sex family (species 1 = empty body, 2 = female, 3 = male); mixed pairs "
       "spawn species 2 or 3 with probability p",
       "p in [0, 1], default 0.5"},
      {"zakharevich",
       "(Vx)1 = x1^2+2x1x2, (Vx)2 = x2^2+2x2x3, (Vx)3 = x3^2+2x1x3; Volterra with "
       "non-convergent Cesaro means",
       ""},
      {"identity", "Volterra identity: p(k,k,k) = 1, p(i,j,i) = p(i,j,j) = 1/2", "m in [2, 12], default 3"},
      {"cubic-example",
       "degree 3: cubes feed coordinate 1, mixed triples send 2/3 to coordinate 1 "
       "and 1/3 to coordinate 2; dissipative",
       ""},
  };
  return roster;
}

Operator gallery(const std::string& name, const ParamMap& params) {
  std::vector<std::string> seen;
  if (name == "example-3d" || name == "v1") {
    reject_unknown(params, seen);
    return Operator(name, example3d_tensor());
  }
  if (name == "v0") {
    reject_unknown(params, seen);
    return Operator(name, v0_tensor());
  }
  if (name == "two-dim-family") {
    const double a = take_param(params, "a", 1.0, 0.0, 2.0, seen);
    reject_unknown(params, seen);
    return Operator(name, two_dim_family_tensor(a));
  }
  if (name == "counterexample-necessary") {
    reject_unknown(params, seen);
    return Operator(name, counterexample_tensor());
  }
  if (name == "form6-random") {
    const double seed = take_param(params, "seed", 1.0, 0.0, 9.007199254740992e15, seen);
    const double m = take_param(params, "m", 3.0, 2.0, 12.0, seen);
    reject_unknown(params, seen);
    return Operator(name, form6_random_tensor(static_cast<int>(m),
                                              static_cast<std::uint64_t>(seed)));
  }
  if (name == "form6-nondissipative") {
    double t[3][3];
    const char* tails[3][2] = {{"a2", "a3"}, {"b2", "b3"}, {"c2", "c3"}};
    for (int r = 0; r < 3; ++r) {
      const double u = take_param(params, tails[r][0], 0.5, 0.0, 1.0, seen);
      const double v = take_param(params, tails[r][1], 0.5, 0.0, 1.0, seen);
      if (u + v > 1.0)
        fail(errc::param_out_of_range,
             std::string(tails[r][0]) + "+" + tails[r][1] + " must not exceed 1");
      t[r][0] = 2.0 - u - v;
      t[r][1] = u;
      t[r][2] = v;
    }
    reject_unknown(params, seen);
    return Operator(name, form6_nondissipative_tensor(t));
  }
  if (name == "form8-instance") {
    reject_unknown(params, seen);
    return Operator(name, form8_tensor());
  }
  if (name == "f-qso") {
    const double p = take_param(params, "p", 0.5, 0.0, 1.0, seen);
    reject_unknown(params, seen);
    return Operator(name, fqso_tensor(p));
  }
  if (name == "zakharevich") {
    reject_unknown(params, seen);
    return Operator(name, zakharevich_tensor());
  }
  if (name == "identity") {
    const double m = take_param(params, "m", 3.0, 2.0, 12.0, seen);
    reject_unknown(params, seen);
    return Operator(name, identity_tensor(static_cast<int>(m)));
  }
  if (name == "cubic-example") {
    reject_unknown(params, seen);
    return Operator(name, cubic_example_tensor());
  }
  fail(errc::unknown_name, "no gallery operator named '" + name + "'");
}

}  // namespace qso
