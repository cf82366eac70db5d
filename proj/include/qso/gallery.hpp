#pragma once

#include <map>
#include <string>
#include <vector>

#include "qso/tensor.hpp"

namespace qso {

using ParamMap = std::map<std::string, double>;

struct GalleryEntry {
  std::string name;
  std::string summary;
  std::string params;  // empty when the operator takes no parameters
};

/// Catalog of built-in operators, in the order reported by listings.
const std::vector<GalleryEntry>& gallery_roster();

/// Constructs a named operator. Throws UNKNOWN_NAME for unrecognized names and
/// PARAM_OUT_OF_RANGE for unknown parameters or values outside the documented
/// range.
Operator gallery(const std::string& name, const ParamMap& params = {});

}  // namespace qso
