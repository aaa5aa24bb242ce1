#pragma once

#include <cstdint>

#include "dlcz/entanglement.hpp"

namespace dlcz {

/// Singles and coincidence tallies for one analyzer setting. The integer
/// instantiation holds measured or simulated counts; the double one holds
/// expectation values from the analytic model so both go through the same
/// estimators.
template <typename Count>
struct BasicCountsTable {
  AngleSettings settings;
  double storage_time = 0.0;  ///< s
  Count n_pulses{};
  Count n_d1{};
  Count n_d2{};
  Count c13{};
  Count c24{};
  Count c14{};
  Count c23{};

  Count stokes_singles() const { return n_d1 + n_d2; }
  Count matched() const { return c13 + c24; }
  Count crossed() const { return c14 + c23; }
  Count coincidences() const { return matched() + crossed(); }

  /// Tables merge by plain addition of every count.
  BasicCountsTable& operator+=(const BasicCountsTable& o) {
    n_pulses += o.n_pulses;
    n_d1 += o.n_d1;
    n_d2 += o.n_d2;
    c13 += o.c13;
    c24 += o.c24;
    c14 += o.c14;
    c23 += o.c23;
    return *this;
  }

  /// Coincidences involving D1 (D2) cannot exceed the D1 (D2) singles, and
  /// singles cannot exceed pulses.
  bool consistent() const {
    return c13 + c14 <= n_d1 && c24 + c23 <= n_d2 && n_d1 + n_d2 <= n_pulses;
  }

  bool operator==(const BasicCountsTable&) const = default;
};

using CountsTable = BasicCountsTable<std::uint64_t>;
using ExpectedCounts = BasicCountsTable<double>;

}  // namespace dlcz
