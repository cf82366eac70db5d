#include "qso/dissipativity.hpp"

#include <algorithm>
#include <cmath>

#include "qso/parallel.hpp"
#include "qso/rng.hpp"

namespace qso {
namespace {

std::vector<double> diagonal_row(const Operator& op, int i) {
  return op.degree() == 2 ? op.qso().row(i, i) : op.cso().row(i, i, i);
}

std::vector<double> cross_row(const Operator& op, int i, int j) {
  // degree 3 pairs the probe species i with the doubled part species j
  return op.degree() == 2 ? op.qso().row(i, j) : op.cso().row(i, j, j);
}

double cross_bound(const Operator& op) { return op.degree() == 2 ? 0.5 : 2.0 / 3.0; }

}  // namespace

int AlphaPartition::part_of(int i) const {
  for (int k = 0; k < dim(); ++k)
    for (int v : parts[static_cast<std::size_t>(k)])
      if (v == i) return k;
  return -1;
}

bool AlphaPartition::is_singleton(int k, int i) const {
  const auto& part = parts[static_cast<std::size_t>(k)];
  return part.size() == 1 && part[0] == i;
}

VertexRowReport check_vertex_rows(const Operator& op, double tol) {
  const int m = op.dim();
  VertexRowReport rep;
  rep.pass.resize(static_cast<std::size_t>(m));
  rep.failing_row.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    auto row = diagonal_row(op, i);
    const double top = *std::max_element(row.begin(), row.end());
    const bool ok = top >= 1.0 - tol;
    rep.pass[static_cast<std::size_t>(i)] = ok;
    if (!ok) {
      rep.failing_row[static_cast<std::size_t>(i)] = std::move(row);
      rep.all_pass = false;
    }
  }
  return rep;
}

AlphaPartition extract_alpha_partition(const Operator& op, double tol) {
  const int m = op.dim();
  AlphaPartition partition;
  partition.parts.assign(static_cast<std::size_t>(m), {});
  std::vector<int> owner(static_cast<std::size_t>(m), -1);
  for (int i = 0; i < m; ++i) {
    const auto row = diagonal_row(op, i);
    for (int k = 0; k < m; ++k) {
      if (row[static_cast<std::size_t>(k)] >= 1.0 - tol) {
        if (owner[static_cast<std::size_t>(i)] != -1)
          fail(errc::not_a_partition, "species " + std::to_string(i + 1) + " owned by parts " +
                                          std::to_string(owner[static_cast<std::size_t>(i)] + 1) +
                                          " and " + std::to_string(k + 1));
        owner[static_cast<std::size_t>(i)] = k;
        partition.parts[static_cast<std::size_t>(k)].push_back(i);
      }
    }
    if (owner[static_cast<std::size_t>(i)] == -1)
      fail(errc::not_a_partition,
           "species " + std::to_string(i + 1) + " has no unit diagonal coefficient");
  }
  return partition;
}

NecessaryConditionsReport check_half_bound(const Operator& op, const AlphaPartition& partition,
                                           double tol) {
  const int m = op.dim();
  NecessaryConditionsReport rep;
  rep.vertex_rows = check_vertex_rows(op, tol);
  const double bound = cross_bound(op);

  for (int k0 = 0; k0 < m; ++k0)
    for (int j : partition.parts[static_cast<std::size_t>(k0)])
      for (int i = 0; i < m; ++i) {
        const double pv = cross_row(op, i, j)[static_cast<std::size_t>(k0)];
        if (pv < bound - tol) rep.half_bound.push_back({i, j, k0, pv});
      }

  rep.third_zero_checked = m >= 3;
  if (rep.third_zero_checked) {
    for (int k0 = 0; k0 < m; ++k0)
      for (int j : partition.parts[static_cast<std::size_t>(k0)])
        for (int i = 0; i < m; ++i) {
          if (i == j || partition.part_of(i) == k0) continue;
          if (op.degree() == 2 && i < j) continue;  // a_ij = a_ji, report once
          auto row = cross_row(op, i, j);
          std::sort(row.begin(), row.end(), std::greater<double>());
          if (row[2] > tol) rep.third_zero.push_back({i, j, row[2]});
        }
  }

  rep.overall = rep.vertex_rows.all_pass && rep.half_bound.empty() && rep.third_zero.empty();
  return rep;
}

NecessaryConditionsReport check_necessary(const Operator& op, double tol) {
  NecessaryConditionsReport rep;
  rep.vertex_rows = check_vertex_rows(op, tol);
  if (!rep.vertex_rows.all_pass) {
    rep.overall = false;
    return rep;
  }
  return check_half_bound(op, extract_alpha_partition(op, tol), tol);
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "CONSISTENT";
    case Verdict::refuted_exact: return "REFUTED_EXACT";
    case Verdict::refuted_sampled: return "REFUTED_SAMPLED";
  }
  return "UNKNOWN";
}

std::vector<SimplexPoint> deterministic_probes(int m) {
  std::vector<SimplexPoint> probes;
  if (m == 3) probes.push_back(SimplexPoint({0.5, 0.49, 0.01}));
  for (int i = 0; i < m; ++i) probes.push_back(SimplexPoint::vertex(m, i));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      std::vector<double> c(static_cast<std::size_t>(m), 0.0);
      c[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(j)] = 0.5;
      probes.push_back(SimplexPoint(std::move(c)));
    }
  probes.push_back(SimplexPoint::barycenter(m));
  return probes;
}

namespace {

// Directional slack of the tested relation at x. Forward means "apply(x)
// majorizes x" (dissipative direction); backward is the bistochastic dual.
double slack_at(const Operator& op, const SimplexPoint& x, double cmp_tol, bool forward) {
  const SimplexPoint v = op.apply(x);
  const auto verdict = compare_majorization(v, x, cmp_tol);
  return forward ? verdict.min_slack_forward : verdict.min_slack_backward;
}

struct ScanResult {
  double min_slack = 0.0;
  bool has_min = false;
  std::optional<SimplexPoint> witness;
  double witness_slack = 0.0;
  long witness_order = -1;
  bool min_from_near_vertex = false;
  bool witness_from_near_vertex = false;
};

void fold_point(ScanResult& r, const Operator& op, const SimplexPoint& x, double cmp_tol,
                bool forward, long order, bool near_vertex) {
  const double s = slack_at(op, x, cmp_tol, forward);
  if (!r.has_min || s < r.min_slack) {
    r.min_slack = s;
    r.has_min = true;
    r.min_from_near_vertex = near_vertex;
  }
  if (s < -cmp_tol && !r.witness) {
    r.witness = x;
    r.witness_slack = s;
    r.witness_order = order;
    r.witness_from_near_vertex = near_vertex;
  }
}

void merge(ScanResult& into, const ScanResult& part) {
  if (part.has_min && (!into.has_min || part.min_slack < into.min_slack)) {
    into.min_slack = part.min_slack;
    into.has_min = true;
    into.min_from_near_vertex = part.min_from_near_vertex;
  }
  if (part.witness && (!into.witness || part.witness_order < into.witness_order)) {
    into.witness = part.witness;
    into.witness_slack = part.witness_slack;
    into.witness_order = part.witness_order;
    into.witness_from_near_vertex = part.witness_from_near_vertex;
  }
}

// Deterministic probes are scanned first and the scan stops at the first
// refutation, so headline witnesses and their slacks do not depend on the
// random phases. Without a probe witness both phases run in full and the
// worst slack over the entire sample set is reported.
SampledStats run_sampling(const Operator& op, long n, double cmp_tol, std::uint64_t seed,
                          bool forward) {
  const int m = op.dim();
  ScanResult total;
  long order = 0;
  for (const auto& x : deterministic_probes(m)) {
    fold_point(total, op, x, cmp_tol, forward, order++, false);
    if (total.witness) {
      SampledStats stats;
      stats.n_samples = order;
      stats.min_slack = total.min_slack;
      stats.witness = total.witness;
      stats.witness_slack = total.witness_slack;
      stats.near_vertex_phase = false;
      return stats;
    }
  }
  const long probe_count = order;

  constexpr long kChunk = 2048;
  const std::size_t n_chunks = static_cast<std::size_t>((n + kChunk - 1) / kChunk);

  // phase (a): uniform samples
  auto uniform_chunks = parallel_chunks<ScanResult>(n_chunks, [&](std::size_t c) {
    ScanResult r;
    Rng rng(derive_seed(seed, c));
    const long lo = static_cast<long>(c) * kChunk, hi = std::min(n, lo + kChunk);
    for (long t = lo; t < hi; ++t)
      fold_point(r, op, sample_uniform(m, rng), cmp_tol, forward, probe_count + t, false);
    return r;
  });
  for (const auto& r : uniform_chunks) merge(total, r);

  // phase (b): near-vertex mixtures (1 - lambda) e_j + lambda u
  auto vertex_chunks = parallel_chunks<ScanResult>(n_chunks, [&](std::size_t c) {
    ScanResult r;
    Rng rng(derive_seed(seed ^ 0x9e3779b97f4a7c15ULL, c));
    const long lo = static_cast<long>(c) * kChunk, hi = std::min(n, lo + kChunk);
    for (long t = lo; t < hi; ++t) {
      const double lambda = 0.1 * rng.uniform01();
      const SimplexPoint u = sample_uniform(m, rng);
      const int j = static_cast<int>(t % m);
      std::vector<double> coords(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) coords[static_cast<std::size_t>(i)] = lambda * u[i];
      coords[static_cast<std::size_t>(j)] += 1.0 - lambda;
      fold_point(r, op, SimplexPoint(std::move(coords)), cmp_tol, forward, probe_count + n + t,
                 true);
    }
    return r;
  });
  for (const auto& r : vertex_chunks) merge(total, r);

  SampledStats stats;
  stats.n_samples = probe_count + 2 * n;
  stats.min_slack = total.min_slack;
  stats.witness = total.witness;
  stats.witness_slack = total.witness_slack;
  stats.near_vertex_phase = total.witness ? total.witness_from_near_vertex : total.min_from_near_vertex;
  return stats;
}

}  // namespace

DissipativityReport certify_sampled(const Operator& op, long n, double cmp_tol, std::uint64_t seed,
                                    double coeff_tol) {
  if (n < 1) fail(errc::param_out_of_range, "certify_sampled needs n >= 1");
  DissipativityReport report;
  report.necessary = check_necessary(op, coeff_tol);
  report.exact_checked = true;
  report.sampled = run_sampling(op, n, cmp_tol, seed, /*forward=*/true);
  if (!report.necessary.overall)
    report.verdict = Verdict::refuted_exact;
  else if (report.sampled.witness)
    report.verdict = Verdict::refuted_sampled;
  else
    report.verdict = Verdict::consistent;
  return report;
}

DissipativityReport check_bistochastic_sampled(const Operator& op, long n, double cmp_tol,
                                               std::uint64_t seed) {
  if (n < 1) fail(errc::param_out_of_range, "check_bistochastic_sampled needs n >= 1");
  DissipativityReport report;
  report.exact_checked = false;
  report.sampled = run_sampling(op, n, cmp_tol, seed, /*forward=*/false);
  report.verdict = report.sampled.witness ? Verdict::refuted_sampled : Verdict::consistent;
  return report;
}

const char* form_name(FormClass f) {
  switch (f) {
    case FormClass::form6: return "FORM_6";
    case FormClass::form7: return "FORM_7";
    case FormClass::form8: return "FORM_8";
    case FormClass::other: return "OTHER";
  }
  return "UNKNOWN";
}

FormClassification classify_form(const QsoTensor& q, const AlphaPartition& partition) {
  const int m = q.dim();
  FormClassification out;
  for (int k = 0; k < m; ++k)
    if (static_cast<int>(partition.parts[static_cast<std::size_t>(k)].size()) == m) {
      out.form = FormClass::form6;
      out.k_main = k;
      return out;
    }
  for (int ks = 0; ks < m; ++ks) {
    const auto& singleton = partition.parts[static_cast<std::size_t>(ks)];
    if (singleton.size() != 1) continue;
    const int l = singleton[0];
    for (int km = 0; km < m; ++km) {
      if (km == ks) continue;
      if (static_cast<int>(partition.parts[static_cast<std::size_t>(km)].size()) != m - 1) continue;
      // the complement part must be exactly I \ {l}
      bool contains_l = false;
      for (int v : partition.parts[static_cast<std::size_t>(km)]) contains_l |= (v == l);
      if (contains_l) continue;
      out.form = (l == ks) ? FormClass::form8 : FormClass::form7;
      out.k_main = km;
      out.k_singleton = ks;
      out.l = l;
      return out;
    }
  }
  return out;
}

}  // namespace qso
