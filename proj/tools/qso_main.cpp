// Command-line front end: operator validation, dissipativity checks,
// trajectory / Cesaro / fixed-point / omega-limit analysis, and gallery
// export. All randomness is seeded (default seed 0x5EED D15A); identical
// configurations produce byte-identical outputs.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qso/dissipativity.hpp"
#include "qso/dynamics.hpp"
#include "qso/gallery.hpp"
#include "qso/operator_io.hpp"
#include "qso/rng.hpp"

using nlohmann::json;
using namespace qso;

namespace {

// exit codes (documented in --help and README)
constexpr int kExitOk = 0;
constexpr int kExitViolation = 2;     // operator constraint violation
constexpr int kExitInput = 3;         // unreadable/ill-formed input or bad config
constexpr int kExitRefutedExact = 4;
constexpr int kExitRefutedSampled = 5;
constexpr int kExitNoConvergence = 6;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case errc::negative_coefficient:
    case errc::row_sum_violation:
    case errc::asymmetry:
      return kExitViolation;
    case errc::no_convergence:
      return kExitNoConvergence;
    default:
      return kExitInput;
  }
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot write '" + tmp + "'");
    out << content;
    if (!out) fail(errc::io_error, "write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    fail(errc::io_error, "cannot rename into '" + path + "'");
}

struct OperatorSource {
  std::string gallery_name;
  std::vector<std::string> params;
  std::string file;

  Operator resolve() const {
    if (!file.empty()) return load_operator_file(file);
    ParamMap map;
    for (const auto& kv : params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        fail(errc::param_out_of_range, "--param expects key=value, got '" + kv + "'");
      try {
        map[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
      } catch (const std::exception&) {
        fail(errc::param_out_of_range, "cannot parse value in '" + kv + "'");
      }
    }
    return gallery(gallery_name, map);
  }

  void attach(CLI::App* cmd) {
    auto* g = cmd->add_option("--gallery", gallery_name, "built-in operator name");
    cmd->add_option("--param", params, "gallery parameter key=value (repeatable)");
    auto* f = cmd->add_option("--file", file, "operator JSON file");
    g->excludes(f);
  }
};

SimplexPoint parse_x0(const std::string& spec, int m, std::uint64_t seed) {
  if (spec.empty() || spec == "barycenter") return SimplexPoint::barycenter(m);
  if (spec == "random") {
    Rng rng(derive_seed(seed, 0xA110C8ULL));
    return sample_uniform(m, rng);
  }
  if (spec.rfind("vertex:", 0) == 0) {
    const int k = std::stoi(spec.substr(7));
    if (k < 1 || k > m) fail(errc::param_out_of_range, "vertex index outside 1..m");
    return SimplexPoint::vertex(m, k - 1);
  }
  std::vector<double> coords;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) coords.push_back(std::stod(item));
  if (static_cast<int>(coords.size()) != m)
    fail(errc::dimension_mismatch, "--x0 needs " + std::to_string(m) + " coordinates");
  return SimplexPoint(std::move(coords));
}

std::set<int> parse_indices(const std::string& spec, int m) {
  std::set<int> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const int v = std::stoi(item);
    if (v < 1 || v > m) fail(errc::param_out_of_range, "index outside 1..m");
    out.insert(v - 1);
  }
  return out;
}

json point_json(const SimplexPoint& p) {
  json arr = json::array();
  for (int i = 0; i < p.dim(); ++i) arr.push_back(p[i]);
  return arr;
}

json point_text_json(const SimplexPoint& p) {
  json arr = json::array();
  for (int i = 0; i < p.dim(); ++i) arr.push_back(fmt17(p[i]));
  return arr;
}

json necessary_json(const NecessaryConditionsReport& rep) {
  json vertex = json::array();
  for (bool b : rep.vertex_rows.pass) vertex.push_back(b);
  json half = json::array();
  for (const auto& v : rep.half_bound)
    half.push_back({{"i", v.i + 1}, {"j", v.j + 1}, {"k0", v.k0 + 1}, {"p", v.p}});
  json third = json::array();
  for (const auto& v : rep.third_zero)
    third.push_back({{"i", v.i + 1}, {"j", v.j + 1}, {"value", v.value}});
  return json{{"overall", rep.overall},
              {"vertex_rows", std::move(vertex)},
              {"half_bound", std::move(half)},
              {"third_zero", std::move(third)},
              {"third_zero_checked", rep.third_zero_checked}};
}

int cmd_validate(const OperatorSource& source, const std::string& out) {
  json doc;
  try {
    const Operator op = source.resolve();
    doc = {{"valid", true},
           {"operator", {{"name", op.name()}, {"m", op.dim()}, {"degree", op.degree()}}}};
    write_output(out, doc.dump(2) + "\n");
    return kExitOk;
  } catch (const Error& e) {
    doc = {{"valid", false}, {"error", {{"code", errc_name(e.code())}, {"message", e.what()}}}};
    write_output(out, doc.dump(2) + "\n");
    return exit_code_for(e);
  }
}

int cmd_check(const Operator& op, long n, bool bistochastic, double cmp_tol, double coeff_tol,
              std::uint64_t seed, const std::string& out) {
  const DissipativityReport report =
      bistochastic ? check_bistochastic_sampled(op, n, cmp_tol, seed)
                   : certify_sampled(op, n, cmp_tol, seed, coeff_tol);
  json doc = {{"operator", op.name()},
              {"m", op.dim()},
              {"degree", op.degree()},
              {"direction", bistochastic ? "bistochastic" : "dissipative"},
              {"verdict", verdict_name(report.verdict)},
              {"seed", seed},
              {"n", n},
              {"sampled",
               {{"n_samples", report.sampled.n_samples},
                {"min_slack", report.sampled.min_slack},
                {"near_vertex_phase", report.sampled.near_vertex_phase}}}};
  if (report.exact_checked) doc["exact"] = necessary_json(report.necessary);
  if (report.sampled.witness) {
    doc["sampled"]["witness"] = point_json(*report.sampled.witness);
    doc["sampled"]["witness_text"] = point_text_json(*report.sampled.witness);
    doc["sampled"]["witness_slack"] = report.sampled.witness_slack;
  } else {
    doc["sampled"]["witness"] = nullptr;
  }
  write_output(out, doc.dump(2) + "\n");
  switch (report.verdict) {
    case Verdict::consistent: return kExitOk;
    case Verdict::refuted_exact: return kExitRefutedExact;
    case Verdict::refuted_sampled: return kExitRefutedSampled;
  }
  return kExitOk;
}

int cmd_iterate(const Operator& op, const SimplexPoint& x0, long n, const std::set<int>& excluded,
                bool renormalize, const std::string& out) {
  const Trajectory traj = iterate(op, x0, n, renormalize);
  std::string csv = "n";
  for (int i = 1; i <= op.dim(); ++i) csv += ",x" + std::to_string(i);
  csv += ",phi,defect\n";
  for (std::size_t t = 0; t < traj.points.size(); ++t) {
    csv += std::to_string(t);
    for (int i = 0; i < op.dim(); ++i) csv += "," + fmt17(traj.points[t][i]);
    csv += "," + fmt17(lyapunov_phi(traj.points[t], excluded));
    csv += "," + fmt17(traj.step_defects[t]);
    csv += "\n";
  }
  write_output(out, csv);
  return kExitOk;
}

int cmd_cesaro(const Operator& op, const SimplexPoint& x0, long n_max, double tol,
               const std::string& out, const std::string& csv_path) {
  const CesaroResult result = cesaro(op, x0, n_max, tol);
  json samples = json::array();
  for (const auto& [n, mean] : result.partial_means) {
    json row = {{"n", n}, {"mean", mean}};
    samples.push_back(std::move(row));
  }
  json doc = {{"operator", op.name()},
              {"x0", point_json(x0)},
              {"n_max", n_max},
              {"tol", tol},
              {"converged", result.converged},
              {"fluctuation", result.fluctuation},
              {"log_domain", result.log_domain},
              {"limit", result.limit_estimate ? point_json(*result.limit_estimate) : json(nullptr)},
              {"samples", std::move(samples)}};
  write_output(out, doc.dump(2) + "\n");

  if (!csv_path.empty()) {
    std::string csv = "n";
    for (int i = 1; i <= op.dim(); ++i) csv += ",mean" + std::to_string(i);
    csv += ",fluctuation\n";
    for (std::size_t s = 0; s < result.partial_means.size(); ++s) {
      const auto& [n, mean] = result.partial_means[s];
      csv += std::to_string(n);
      for (double v : mean) csv += "," + fmt17(v);
      double spread = 0.0;
      const std::size_t lo = s >= 9 ? s - 9 : 0;
      for (std::size_t a = lo; a <= s; ++a)
        for (std::size_t b = a + 1; b <= s; ++b)
          spread = std::max(spread, linf_distance(result.partial_means[a].second,
                                                  result.partial_means[b].second));
      csv += "," + fmt17(spread) + "\n";
    }
    write_output(csv_path, csv);
  }
  return kExitOk;
}

int cmd_fixed(const Operator& op, int starts, double fp_tol, std::uint64_t seed,
              const std::string& out) {
  const auto results = find_fixed_points(op, starts, fp_tol, seed);
  json list = json::array();
  for (const auto& fp : results) {
    json entry = {{"point", point_json(fp.point)},
                  {"point_text", point_text_json(fp.point)},
                  {"residual", fp.residual},
                  {"classification", stability_name(fp.classification)},
                  {"restricted_moduli", fp.restricted_moduli},
                  {"continuum", fp.continuum}};
    if (fp.segment)
      entry["segment"] = json::array({point_json(fp.segment->first), point_json(fp.segment->second)});
    else
      entry["segment"] = nullptr;
    list.push_back(std::move(entry));
  }
  json doc = {{"operator", op.name()},
              {"n_starts", starts},
              {"seed", seed},
              {"fp_tol", fp_tol},
              {"fixed_points", std::move(list)}};
  write_output(out, doc.dump(2) + "\n");
  return kExitOk;
}

int cmd_omega(const Operator& op, const SimplexPoint& x0, long n, double tail_fraction,
              double cluster_radius, const std::string& out) {
  const auto traj = iterate(op, x0, n);
  const auto est = omega_estimate(traj, tail_fraction, cluster_radius);
  json clusters = json::array();
  for (const auto& c : est.clusters)
    clusters.push_back({{"representative", point_json(c.representative)}, {"visits", c.visits}});
  json doc = {{"operator", op.name()},
              {"x0", point_json(x0)},
              {"steps", n},
              {"tail_fraction", tail_fraction},
              {"cluster_radius", cluster_radius},
              {"clusters", std::move(clusters)},
              {"cycle_order", est.cycle_order ? json(*est.cycle_order) : json(nullptr)},
              {"sorted_limit", est.sorted_limit}};
  write_output(out, doc.dump(2) + "\n");
  return kExitOk;
}

int cmd_gallery(bool list, const std::string& export_name, const std::string& out) {
  if (list) {
    std::string text;
    for (const auto& entry : gallery_roster()) {
      text += entry.name + "\n    " + entry.summary + "\n";
      if (!entry.params.empty()) text += "    parameters: " + entry.params + "\n";
    }
    write_output(out, text);
    return kExitOk;
  }
  const Operator op = gallery(export_name);
  const std::string path = (out.empty() || out == "-") ? export_name + ".json" : out;
  save_operator_file(op, path);
  std::fprintf(stdout, "wrote %s\n", path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Stochastic operator toolkit: quadratic/cubic operators on the probability simplex,\n"
      "majorization-based dissipativity checks, and trajectory/ergodicity analysis.\n"
      "Exit codes: 0 ok/consistent, 2 operator constraint violation, 3 bad input,\n"
      "4 refuted by exact checks, 5 refuted by sampling, 6 no convergence."};
  app.require_subcommand(1);

  std::uint64_t seed = kDefaultSeed;
  std::string out = "-";
  double cmp_tol = kCompareTol;
  double coeff_tol = kCoeffTol;
  double fp_tol = kFixedPointTol;
  app.add_option("--seed", seed, "RNG seed (default 0x5EEDD15A)")->capture_default_str();
  app.add_option("--out", out, "output path, '-' for stdout")->capture_default_str();
  app.add_option("--eps-cmp", cmp_tol, "majorization comparison tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--coeff-tol", coeff_tol, "exact coefficient check tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--fp-tol", fp_tol, "fixed point residual tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* validate = app.add_subcommand("validate", "validate an operator's coefficient constraints");
  OperatorSource validate_src;
  validate_src.attach(validate);

  auto* check = app.add_subcommand("check", "exact + sampled dissipativity check");
  OperatorSource check_src;
  check_src.attach(check);
  long check_n = 10000;
  bool bistochastic = false;
  check->add_option("-n,--samples", check_n, "samples per phase")->capture_default_str();
  check->add_flag("--bistochastic", bistochastic, "test the reverse relation instead");

  auto* iter = app.add_subcommand("iterate", "emit a trajectory as CSV");
  OperatorSource iter_src;
  iter_src.attach(iter);
  long iter_n = 1000;
  std::string iter_x0, phi_excluded = "1";
  bool no_renormalize = false;
  iter->add_option("-n,--steps", iter_n, "iteration count")->capture_default_str();
  iter->add_option("--x0", iter_x0, "barycenter | vertex:k | random | x1,x2,...");
  iter->add_option("--phi-excluded", phi_excluded, "1-based coordinates excluded from phi")
      ->capture_default_str();
  iter->add_flag("--no-renormalize", no_renormalize, "propagate raw polynomial output");

  auto* ces = app.add_subcommand("cesaro", "running Cesaro means and convergence diagnosis");
  OperatorSource ces_src;
  ces_src.attach(ces);
  long ces_n = 100000;
  double ces_tol = 1e-6;
  std::string ces_x0, ces_csv;
  ces->add_option("-n,--n-max", ces_n, "number of averaged iterates")->capture_default_str();
  ces->add_option("--tol", ces_tol, "tail-window convergence tolerance")->capture_default_str();
  ces->add_option("--x0", ces_x0, "start point");
  ces->add_option("--csv", ces_csv, "also write sampled means to this CSV file");

  auto* fixed = app.add_subcommand("fixed", "multistart fixed-point search and classification");
  OperatorSource fixed_src;
  fixed_src.attach(fixed);
  int fixed_starts = 32;
  fixed->add_option("--starts", fixed_starts, "random starts")->capture_default_str();

  auto* omega = app.add_subcommand("omega", "omega-limit estimate from a long trajectory");
  OperatorSource omega_src;
  omega_src.attach(omega);
  long omega_n = 2000;
  double tail_fraction = 0.2, cluster_radius = 1e-4;
  std::string omega_x0;
  omega->add_option("-n,--steps", omega_n, "iteration count")->capture_default_str();
  omega->add_option("--x0", omega_x0, "start point");
  omega->add_option("--tail-fraction", tail_fraction, "fraction of points clustered")
      ->capture_default_str();
  omega->add_option("--cluster-radius", cluster_radius, "clustering radius")->capture_default_str();

  auto* gal = app.add_subcommand("gallery", "list or export built-in operators");
  bool gal_list = false;
  std::string gal_export;
  gal->add_flag("--list", gal_list, "print the roster");
  gal->add_option("--export", gal_export, "write the named operator as JSON");

  // global options (--out, --seed, tolerances) may follow the subcommand
  for (auto* sub : {validate, check, iter, ces, fixed, omega, gal}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate)) return cmd_validate(validate_src, out);
    if (app.got_subcommand(check))
      return cmd_check(check_src.resolve(), check_n, bistochastic, cmp_tol, coeff_tol, seed, out);
    if (app.got_subcommand(iter)) {
      const Operator op = iter_src.resolve();
      return cmd_iterate(op, parse_x0(iter_x0, op.dim(), seed), iter_n,
                         parse_indices(phi_excluded, op.dim()), !no_renormalize, out);
    }
    if (app.got_subcommand(ces)) {
      const Operator op = ces_src.resolve();
      return cmd_cesaro(op, parse_x0(ces_x0, op.dim(), seed), ces_n, ces_tol, out, ces_csv);
    }
    if (app.got_subcommand(fixed))
      return cmd_fixed(fixed_src.resolve(), fixed_starts, fp_tol, seed, out);
    if (app.got_subcommand(omega)) {
      const Operator op = omega_src.resolve();
      return cmd_omega(op, parse_x0(omega_x0, op.dim(), seed), omega_n, tail_fraction,
                       cluster_radius, out);
    }
    if (app.got_subcommand(gal)) {
      if (!gal_list && gal_export.empty())
        fail(errc::param_out_of_range, "gallery needs --list or --export NAME");
      return cmd_gallery(gal_list, gal_export, out);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitOk;
}
