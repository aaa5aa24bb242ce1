#pragma once

#include <cmath>
#include <string>

#include "dlcz/errors.hpp"

namespace dlcz::detail {

template <typename E = DomainError>
inline void require(bool ok, const std::string& what) {
  if (!ok) throw E(what);
}

inline bool in_unit(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }
inline bool in_half_open_unit(double x) { return std::isfinite(x) && x > 0.0 && x <= 1.0; }
inline bool positive(double x) { return !std::isnan(x) && x > 0.0; }

}  // namespace dlcz::detail
