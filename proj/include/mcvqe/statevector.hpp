#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace mcvqe {

/// Dense complex amplitude vector over n qubits (dimension 2^n). Basis index
/// bit j holds the occupation of qubit j.
class Statevector {
 public:
  Statevector() = default;
  explicit Statevector(int n_qubits);

  static Statevector basis_state(int n_qubits, std::uint64_t index);
  static Statevector vacuum(int n_qubits) { return basis_state(n_qubits, 0); }

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amp_.size(); }

  std::complex<double>& operator[](std::size_t i) { return amp_[i]; }
  const std::complex<double>& operator[](std::size_t i) const {
    return amp_[i];
  }
  std::vector<std::complex<double>>& amplitudes() { return amp_; }
  const std::vector<std::complex<double>>& amplitudes() const { return amp_; }

  double norm() const;
  void normalize();
  void set_zero();

  Statevector& operator+=(const Statevector& o);
  Statevector& operator-=(const Statevector& o);
  Statevector& operator*=(std::complex<double> c);

  /// y += c * x
  void axpy(std::complex<double> c, const Statevector& x);

 private:
  std::vector<std::complex<double>> amp_;
  int n_qubits_ = 0;
};

/// <a|b> with conjugation on a.
std::complex<double> inner(const Statevector& a, const Statevector& b);

}  // namespace mcvqe
