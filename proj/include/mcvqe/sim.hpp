#pragma once

#include <array>
#include <string>
#include <vector>

#include "mcvqe/density.hpp"
#include "mcvqe/integrals.hpp"
#include "mcvqe/statevector.hpp"

namespace mcvqe {

// ---------------------------------------------------------------------------
// Elementary fermionic operations (Jordan-Wigner signs in the logical
// alpha-then-beta mode order, amplitudes on the interleaved physical qubits).
// ---------------------------------------------------------------------------

/// In-place a^dag (dagger=true) or a (dagger=false) on spin orbital
/// (spin, p); spin 0 = alpha, 1 = beta.
void apply_ladder(Statevector& state, int m, int spin, int p, bool dagger);

/// y += coeff * a^dag_{spin,p} a_{spin,q} x.
void accumulate_spin_hop(Statevector& y, const Statevector& x, int m, int spin,
                         int p, int q, double coeff);

/// y += coeff * E+_pq x with the spin-summed singlet substitution operator.
void accumulate_excitation(Statevector& y, const Statevector& x, int m, int p,
                           int q, double coeff);

/// H |psi> evaluated directly from the integrals (no Pauli expansion).
Statevector apply_hamiltonian_direct(const ActiveSpaceIntegrals& ints,
                                     const Statevector& state);

double hamiltonian_expectation_direct(const ActiveSpaceIntegrals& ints,
                                      const Statevector& state);

/// <a|H|b> evaluated directly.
double hamiltonian_matrix_element_direct(const ActiveSpaceIntegrals& ints,
                                         const Statevector& a,
                                         const Statevector& b);

/// Unrelaxed spin-summed OPDM/TPDM of a normalized state:
/// gamma_pq = <E+_pq>, Gamma_pqrs = <E+_pq E+_rs> - delta_qr <E+_ps>,
/// completed to the full 8-fold index symmetry.
DensityPair direct_densities(const Statevector& state, int m);

// ---------------------------------------------------------------------------
// Reference states (configuration state functions)
// ---------------------------------------------------------------------------

struct CsfSpec {
  enum class Kind { ClosedShell, SingletSingle, DiagonalDouble };
  Kind kind = Kind::ClosedShell;
  int occ = 0;   // i, among the N_alpha lowest orbitals
  int virt = 0;  // a, among the remaining orbitals

  static CsfSpec closed_shell() { return {}; }
  static CsfSpec single(int i, int a) {
    return {Kind::SingletSingle, i, a};
  }
  static CsfSpec double_exc(int i, int a) {
    return {Kind::DiagonalDouble, i, a};
  }

  bool operator==(const CsfSpec&) const = default;
  bool operator<(const CsfSpec& o) const;
  std::string to_string() const;
};

/// Amplitude-level preparation of the CSF reference states; all are exact
/// N_alpha, N_beta and S^2 = 0 eigenstates. Requires a closed-shell singlet
/// sector (N_alpha == N_beta, S == 0).
Statevector prepare_csf(const CsfSpec& spec, const SectorSpec& sector, int m);

/// (a +/- b)/sqrt(2); inputs must be orthogonal to 1e-12.
Statevector prepare_interference(const Statevector& a, const Statevector& b,
                                 int sign);

// ---------------------------------------------------------------------------
// Quantum-number-preserving gate fabric
// ---------------------------------------------------------------------------

enum class GateKind { PairExchange, OrbitalRotation };

struct FabricGate {
  GateKind kind;
  int orbital;  // acts on spatial orbitals (orbital, orbital+1)
};

/// Brick pattern of 4-qubit QNP elements. One "double layer" applies a full
/// even pass (orbital pairs (0,1), (2,3), ...) followed by a full odd pass
/// ((1,2), (3,4), ...); each element is a pair exchange followed by an
/// orbital rotation, one parameter each.
class FabricLayout {
 public:
  FabricLayout() = default;
  FabricLayout(int m, int n_layers);

  int n_orbitals() const { return m_; }
  int n_layers() const { return n_layers_; }
  int n_parameters() const { return static_cast<int>(gates_.size()); }
  const std::vector<FabricGate>& gates() const { return gates_; }

 private:
  int m_ = 0;
  int n_layers_ = 0;
  std::vector<FabricGate> gates_;
};

using FabricParameters = std::vector<double>;

/// 16x16 real unitary of a single gate in the local basis of qubits
/// (2p, 2p+1, 2p+2, 2p+3); theta = 0 is the identity.
std::array<std::array<double, 16>, 16> gate_matrix(GateKind kind,
                                                   double theta);

void apply_gate_inplace(Statevector& state, const FabricGate& gate,
                        double theta);

Statevector apply_fabric(const Statevector& state, const FabricLayout& layout,
                         const FabricParameters& theta);

void apply_fabric_inplace(Statevector& state, const FabricLayout& layout,
                          const FabricParameters& theta);

}  // namespace mcvqe
