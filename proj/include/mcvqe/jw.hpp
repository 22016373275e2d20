#pragma once

#include <map>
#include <vector>

#include "mcvqe/density.hpp"
#include "mcvqe/integrals.hpp"
#include "mcvqe/pauli.hpp"

namespace mcvqe {

/// Interleaved qubit layout: spatial orbital p maps to qubits (2p, 2p+1) for
/// (alpha, beta). Jordan-Wigner strings are ordered logically alpha-then-beta,
/// so same-spin strings skip the opposite-spin qubits.
struct QubitLayout {
  int m = 0;

  explicit QubitLayout(int m_orbitals) : m(m_orbitals) {}
  int n_qubits() const { return 2 * m; }

  static int alpha_qubit(int p) { return 2 * p; }
  static int beta_qubit(int p) { return 2 * p + 1; }
  static int spin_qubit(int p, int spin) { return 2 * p + spin; }  // 0=a, 1=b

  /// Position of a qubit's mode in the logical alpha-then-beta ordering.
  int logical_index(int qubit) const {
    return (qubit % 2 == 0) ? qubit / 2 : m + qubit / 2;
  }
};

struct IntegralJacobianEntry {
  PauliWord word;
  ElementId element;
  double coeff;  // dH_I / d(element), element moved with its whole orbit
};

/// The sparse linear map from canonical integral elements to Pauli-word
/// coefficients of the qubit Hamiltonian. Structurally independent of the
/// integral values; contracting with integrals (plus E_ext on the identity
/// word) reproduces map_hamiltonian exactly.
class IntegralJacobian {
 public:
  explicit IntegralJacobian(int m);

  int n_orbitals() const { return m_; }
  const std::vector<IntegralJacobianEntry>& entries() const {
    return entries_;
  }

  PauliOperator contract(const ActiveSpaceIntegrals& ints) const;

  /// Words with at least one nonzero Jacobian entry (the Hamiltonian's
  /// structural support).
  std::vector<PauliWord> word_support() const;

  /// Backtransformation of Pauli-word expectation values to spin-summed
  /// orbital density matrices:
  ///   gamma_pq = sum_I dH_I/d(p|h|q) Gamma_I
  ///   Gamma_pqrs = 2 sum_I dH_I/d(pq|rs) Gamma_I,
  /// with the TPDM completed to full 8-fold symmetry. Throws if a word with
  /// a nonzero Jacobian entry is missing from the map.
  DensityPair backtransform(
      const std::map<PauliWord, double>& word_expectations) const;

 private:
  int m_;
  std::vector<IntegralJacobianEntry> entries_;
};

IntegralJacobian integral_jacobian(int m);

/// Qubit Hamiltonian of the active space under the Jordan-Wigner mapping;
/// its dense matrix equals the second-quantized
/// H = E_ext + sum (p|kappa|q) E+_pq + 1/2 sum (pq|rs) E+_pq E+_rs
/// on the full 4^M Fock space.
PauliOperator map_hamiltonian(const ActiveSpaceIntegrals& ints);

struct NumberOperators {
  PauliOperator n_alpha;
  PauliOperator n_beta;
  PauliOperator s2;
};

NumberOperators map_number_operators(int m);

DensityPair backtransform(const std::map<PauliWord, double>& word_expectations,
                          int m);

}  // namespace mcvqe
