#pragma once

// Shared test fixtures. FIX-A is the closed-form single-orbital system, the
// seeded fixtures keep downstream tests deterministic.

#include "mcvqe/integrals.hpp"
#include "oracles.hpp"

namespace mcvqe::testing {

// M = 1: E = E_ext + 2h + J = 0.3 - 2.0 + 0.5 for the doubly occupied state.
inline ActiveSpaceIntegrals fix_a() {
  ActiveSpaceIntegrals ints(1, 0.3);
  ints.set_one_body(0, 0, -1.0);
  ints.set_eri(0, 0, 0, 0, 0.5);
  return ints;
}

inline SectorSpec fix_a_sector() { return {1, 1, 0}; }

// M = 2 seeded random singlet problem.
inline ActiveSpaceIntegrals fix_b() { return random_integrals(2, 7); }
inline SectorSpec fix_b_sector() { return {1, 1, 0}; }

// M = 4 seeded random problem; structural analog of a 4-orbital active space
// with two averaged states and one double layer. ERIs at half strength keep
// the SA-VQE response in a realistically small regime.
inline ActiveSpaceIntegrals fix_c() { return random_integrals(4, 1, 0.5); }
inline SectorSpec fix_c_sector() { return {2, 2, 0}; }

}  // namespace mcvqe::testing
