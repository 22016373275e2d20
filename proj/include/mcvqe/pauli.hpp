#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mcvqe {

class Statevector;
struct WordProduct;

/// Tensor product of single-qubit Pauli letters over n qubits, stored as an
/// (x-mask, z-mask) pair: (0,0) = I, (1,0) = X, (1,1) = Y, (0,1) = Z.
/// Supports up to 64 qubits.
class PauliWord {
 public:
  PauliWord() = default;
  explicit PauliWord(int n_qubits);

  static PauliWord identity(int n_qubits) { return PauliWord(n_qubits); }
  static PauliWord single(int n_qubits, int qubit, char letter);

  int n_qubits() const { return n_qubits_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }

  char letter(int qubit) const;
  void set_letter(int qubit, char letter);

  bool is_identity() const { return x_ == 0 && z_ == 0; }
  int weight() const;

  /// Phase picked up acting on a computational basis state:
  /// word |b> = i^{#Y} (-1)^{popcount(b & z)} |b ^ x>.
  std::complex<double> basis_phase(std::uint64_t basis) const;

  bool operator==(const PauliWord& o) const {
    return n_qubits_ == o.n_qubits_ && x_ == o.x_ && z_ == o.z_;
  }
  bool operator<(const PauliWord& o) const;

  std::string to_string() const;

 private:
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  int n_qubits_ = 0;

  void check_qubit(int qubit) const;

  friend WordProduct multiply(const PauliWord& a, const PauliWord& b);
};

/// Pauli group product a*b = phase * word with phase = i^k, k in {0..3}.
struct WordProduct {
  std::complex<double> phase;
  PauliWord word;
};

WordProduct multiply(const PauliWord& a, const PauliWord& b);

/// Real-weighted linear combination of Pauli words; Hermitian by
/// construction. Coefficients with magnitude below `drop_tolerance` are
/// removed on accumulation. Immutable use after construction is safe from
/// any number of threads.
class PauliOperator {
 public:
  static constexpr double drop_tolerance = 1e-14;

  PauliOperator() = default;
  explicit PauliOperator(int n_qubits) : n_qubits_(n_qubits) {}

  static PauliOperator identity(int n_qubits, double coeff);

  int n_qubits() const { return n_qubits_; }
  std::size_t n_terms() const { return terms_.size(); }
  const std::map<PauliWord, double>& terms() const { return terms_; }

  void add_term(const PauliWord& word, double coeff);
  double coefficient(const PauliWord& word) const;

  PauliOperator& operator+=(const PauliOperator& other);
  PauliOperator& operator*=(double scale);

  /// sum_I c_I <psi| Pi_I |psi> for a normalized state. The imaginary part
  /// must be negligible (< 1e-12); it is asserted and discarded.
  double expectation(const Statevector& state) const;

  /// Per-word expectation values <psi| Pi_I |psi> over the operator's
  /// support, as used for density-matrix backtransformation.
  std::map<PauliWord, double> word_expectations(const Statevector& state) const;

  Statevector apply(const Statevector& state) const;

  std::string to_string() const;
  static PauliOperator parse(const std::string& text, int n_qubits);

 private:
  int n_qubits_ = 0;
  std::map<PauliWord, double> terms_;
};

/// <psi| word |psi> (complex; real for normalized states and Hermitian words
/// up to roundoff).
std::complex<double> word_expectation(const PauliWord& word,
                                      const Statevector& state);

}  // namespace mcvqe
