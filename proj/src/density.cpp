#include "mcvqe/density.hpp"

#include <cmath>
#include <cstdlib>

#include "mcvqe/integrals.hpp"

namespace mcvqe {

std::string to_string(DensityFlavor f) {
  switch (f) {
    case DensityFlavor::Unrelaxed:
      return "unrelaxed";
    case DensityFlavor::Response:
      return "response";
    case DensityFlavor::Relaxed:
      return "relaxed";
  }
  return "?";
}

DensityPair DensityPair::zero(int m, DensityFlavor flavor) {
  DensityPair d;
  d.flavor = flavor;
  d.m = m;
  d.opdm.assign(static_cast<std::size_t>(m) * m, 0.0);
  d.tpdm.assign(static_cast<std::size_t>(m) * m * m * m, 0.0);
  return d;
}

double DensityPair::opdm_trace() const {
  double t = 0.0;
  for (int p = 0; p < m; ++p) t += opdm_at(p, p);
  return t;
}

double DensityPair::symmetry_residual() const {
  double res = 0.0;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      res = std::max(res, std::abs(opdm_at(p, q) - opdm_at(q, p)));
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) {
          const double v = tpdm_at(p, q, r, s);
          res = std::max(res, std::abs(v - tpdm_at(q, p, r, s)));
          res = std::max(res, std::abs(v - tpdm_at(p, q, s, r)));
          res = std::max(res, std::abs(v - tpdm_at(r, s, p, q)));
        }
  return res;
}

double trace_formula_energy(const ActiveSpaceIntegrals& ints,
                            const DensityPair& d) {
  const int m = d.m;
  double e = ints.e_ext();
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) e += d.opdm_at(p, q) * ints.one_body(p, q);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s)
          e += 0.5 * d.tpdm_at(p, q, r, s) * ints.eri(p, q, r, s);
  return e;
}

}  // namespace mcvqe
