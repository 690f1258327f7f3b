#pragma once

#include <cmath>

#include <nlohmann/json.hpp>

namespace mfldp {

/// JSON has no infinities; extended reals are written as "inf" / "-inf".
inline nlohmann::json extended_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

}  // namespace mfldp
