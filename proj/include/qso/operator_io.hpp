#pragma once

#include <string>

#include <json.hpp>

#include "qso/tensor.hpp"

namespace qso {

/// Operator file schema (1-based indices, omitted entries are zero):
///   {"name": str, "m": int, "degree": 2|3,
///    "entries": [{"i": int, "j": int, ("l": int,) "k": int, "p": float}, ...],
///    "symmetrize": bool}
nlohmann::json operator_to_json(const Operator& op);

/// Parses and validates an operator document. Throws BAD_OPERATOR_FILE on
/// schema problems and the usual validation errors on constraint violations.
Operator operator_from_json(const nlohmann::json& doc);

Operator load_operator_file(const std::string& path);
void save_operator_file(const Operator& op, const std::string& path);

}  // namespace qso
