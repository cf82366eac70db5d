#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qso/tensor.hpp"

namespace qso {

/// Default tolerance for exact coefficient conditions (the inequalities are
/// exact in the underlying theory; floating point needs a declared band).
inline constexpr double kCoeffTol = 1e-9;

/// Partition of the species indices by which output coordinate receives each
/// square (resp. cube) term. parts[k] lists the species i with p(i,i,k) ~ 1;
/// nonempty parts are disjoint and cover all species.
struct AlphaPartition {
  std::vector<std::vector<int>> parts;

  int dim() const { return static_cast<int>(parts.size()); }
  /// Part index owning species i, or -1.
  int part_of(int i) const;
  bool is_singleton(int k, int i) const;
};

struct VertexRowReport {
  std::vector<bool> pass;                        // per species i
  std::vector<std::vector<double>> failing_row;  // offending row when pass[i] is false
  bool all_pass = true;
};

struct HalfBoundViolation {
  int i, j, k0;
  double p;
};

struct ThirdZeroViolation {
  int i, j;
  double value;  // third-largest entry of the cross row
};

struct NecessaryConditionsReport {
  VertexRowReport vertex_rows;
  std::vector<HalfBoundViolation> half_bound;
  std::vector<ThirdZeroViolation> third_zero;
  bool third_zero_checked = false;  // vacuous for m = 2
  bool overall = false;
};

/// Largest entry of every diagonal row must be ~1 for the operator to
/// concentrate vertices; reports the offending row per failing species.
VertexRowReport check_vertex_rows(const Operator& op, double tol = kCoeffTol);

/// alpha_k = { i : p(i,i,k) >= 1 - tol } (cubes for degree 3). Requires the
/// vertex-row condition; throws NOT_A_PARTITION when coverage or disjointness
/// fails.
AlphaPartition extract_alpha_partition(const Operator& op, double tol = kCoeffTol);

/// Checks the cross-row mass bounds implied by majorization growth on edges:
/// p(i,j,k0) >= 1/2 (degree 2) or p(i,j,j,k0) >= 2/3 (degree 3) whenever
/// j lies in part k0, plus vanishing third-largest entries for rows whose two
/// species belong to different parts (m >= 3). The same-part pairs are not
/// subject to the third-entry check; the reference counterexample relies on
/// that distinction.
NecessaryConditionsReport check_half_bound(const Operator& op, const AlphaPartition& partition,
                                           double tol = kCoeffTol);

/// Runs all exact necessary checks in order, stopping after the vertex rows
/// when no partition exists.
NecessaryConditionsReport check_necessary(const Operator& op, double tol = kCoeffTol);

enum class Verdict { consistent, refuted_exact, refuted_sampled };
const char* verdict_name(Verdict v);

struct SampledStats {
  long n_samples = 0;          // points actually tested, probes included
  double min_slack = 0.0;      // worst directional slack observed
  std::optional<SimplexPoint> witness;
  double witness_slack = 0.0;      // slack at the witness, when present
  bool near_vertex_phase = false;  // reported extremum came from the near-vertex phase
};

struct DissipativityReport {
  NecessaryConditionsReport necessary;
  bool exact_checked = false;
  SampledStats sampled;
  Verdict verdict = Verdict::consistent;
};

/// Deterministic points tested before any random sampling: the reference probe
/// (0.5, 0.49, 0.01) when m = 3, all vertices, all edge midpoints, and the
/// barycenter, in that order.
std::vector<SimplexPoint> deterministic_probes(int m);

/// Randomized falsification of "V x majorizes x for every simplex x".
/// Two phases of n samples each: uniform, and near-vertex mixtures
/// (1-lambda) e_j + lambda u with lambda ~ U(0, 0.1), where the known
/// violations of the edge analysis concentrate. CONSISTENT is a sampling
/// diagnosis, not a proof.
DissipativityReport certify_sampled(const Operator& op, long n, double cmp_tol, std::uint64_t seed,
                                    double coeff_tol = kCoeffTol);

/// Dual direction: falsification of "V x is majorized by x" (the bistochastic
/// property). No exact necessary conditions apply in this direction.
DissipativityReport check_bistochastic_sampled(const Operator& op, long n, double cmp_tol,
                                               std::uint64_t seed);

enum class FormClass { form6, form7, form8, other };
const char* form_name(FormClass f);

/// Shape of the alpha-partition for quadratic operators: form6 when one part
/// holds every species; form7 when one part is a singleton {l} and another is
/// its complement; form8 when additionally l equals the index of its own part
/// (the self-feeding singleton, which produces a fixed segment).
struct FormClassification {
  FormClass form = FormClass::other;
  int k_main = -1;       // part holding the complement (form6: the full part)
  int k_singleton = -1;  // part holding {l}
  int l = -1;
};

FormClassification classify_form(const QsoTensor& q, const AlphaPartition& partition);

}  // namespace qso
