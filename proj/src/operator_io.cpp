#include "qso/operator_io.hpp"

#include <fstream>

namespace qso {

using nlohmann::json;

json operator_to_json(const Operator& op) {
  json entries = json::array();
  const int m = op.dim();
  if (op.degree() == 2) {
    const auto& q = op.qso();
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j)
        for (int k = 0; k < m; ++k)
          if (q.p(i, j, k) != 0.0)
            entries.push_back({{"i", i + 1}, {"j", j + 1}, {"k", k + 1}, {"p", q.p(i, j, k)}});
  } else {
    const auto& c = op.cso();
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j)
        for (int l = j; l < m; ++l)
          for (int k = 0; k < m; ++k)
            if (c.p(i, j, l, k) != 0.0)
              entries.push_back({{"i", i + 1},
                                 {"j", j + 1},
                                 {"l", l + 1},
                                 {"k", k + 1},
                                 {"p", c.p(i, j, l, k)}});
  }
  return json{{"name", op.name()},
              {"m", m},
              {"degree", op.degree()},
              {"entries", std::move(entries)},
              {"symmetrize", false}};
}

Operator operator_from_json(const json& doc) {
  if (!doc.is_object()) fail(errc::bad_operator_file, "document is not an object");
  for (const char* key : {"name", "m", "degree", "entries"})
    if (!doc.contains(key)) fail(errc::bad_operator_file, std::string("missing field '") + key + "'");
  if (!doc["name"].is_string() || !doc["m"].is_number_integer() ||
      !doc["degree"].is_number_integer() || !doc["entries"].is_array())
    fail(errc::bad_operator_file, "field has wrong type");

  const std::string name = doc["name"].get<std::string>();
  const int m = doc["m"].get<int>();
  const int degree = doc["degree"].get<int>();
  const bool symmetrize = doc.value("symmetrize", false);
  if (m < 2) fail(errc::bad_operator_file, "m must be >= 2");
  if (degree != 2 && degree != 3) fail(errc::bad_operator_file, "degree must be 2 or 3");

  auto index = [m](const json& e, const char* key) {
    if (!e.contains(key) || !e[key].is_number_integer())
      fail(errc::bad_operator_file, std::string("entry missing integer '") + key + "'");
    const int v = e[key].get<int>();
    if (v < 1 || v > m)
      fail(errc::bad_operator_file,
           std::string(key) + "=" + std::to_string(v) + " outside 1.." + std::to_string(m));
    return v - 1;
  };
  auto value = [](const json& e) {
    if (!e.contains("p") || !e["p"].is_number())
      fail(errc::bad_operator_file, "entry missing numeric 'p'");
    return e["p"].get<double>();
  };

  // File entries are representatives: each is mirrored onto the index
  // permutations the file did not itself provide, so that rep-only files are
  // complete and explicit conflicting duplicates still surface (strictly, as
  // an asymmetry error; with "symmetrize": true, averaged away).
  if (degree == 2) {
    QsoTensor::Builder b(m);
    std::vector<char> explicit_slot(static_cast<std::size_t>(m) * m * m, 0);
    auto slot = [m](int i, int j, int k) { return static_cast<std::size_t>((i * m + j) * m + k); };
    for (const auto& e : doc["entries"]) {
      if (e.contains("l")) fail(errc::bad_operator_file, "degree-2 entry carries an 'l' index");
      const int i = index(e, "i"), j = index(e, "j"), k = index(e, "k");
      b.set(i, j, k, value(e));
      explicit_slot[slot(i, j, k)] = 1;
      if (!explicit_slot[slot(j, i, k)]) b.set(j, i, k, value(e));
    }
    return Operator(name, b.validated(symmetrize));
  }
  CsoTensor::Builder b(m);
  std::vector<char> explicit_slot(static_cast<std::size_t>(m) * m * m * m, 0);
  auto slot = [m](int i, int j, int l, int k) {
    return static_cast<std::size_t>(((i * m + j) * m + l) * m + k);
  };
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& e : doc["entries"]) {
    const int i = index(e, "i"), j = index(e, "j"), l = index(e, "l"), k = index(e, "k");
    const double p = value(e);
    b.set(i, j, l, k, p);
    explicit_slot[slot(i, j, l, k)] = 1;
    const int t[3] = {i, j, l};
    for (const auto& pr : perms) {
      const int a = t[pr[0]], c = t[pr[1]], d = t[pr[2]];
      if (!explicit_slot[slot(a, c, d, k)]) b.set(a, c, d, k, p);
    }
  }
  return Operator(name, b.validated(symmetrize));
}

Operator load_operator_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(errc::bad_operator_file, std::string("JSON parse error: ") + e.what());
  }
  return operator_from_json(doc);
}

void save_operator_file(const Operator& op, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) fail(errc::io_error, "cannot write '" + tmp + "'");
    out << operator_to_json(op).dump(2) << "\n";
    if (!out) fail(errc::io_error, "write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    fail(errc::io_error, "cannot rename '" + tmp + "' to '" + path + "'");
}

}  // namespace qso
