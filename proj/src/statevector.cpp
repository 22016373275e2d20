#include "mcvqe/statevector.hpp"

#include <cmath>
#include <stdexcept>

namespace mcvqe {

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 0 || n_qubits > 30) {
    throw std::invalid_argument("unsupported qubit count");
  }
  amp_.assign(std::size_t{1} << n_qubits, {0.0, 0.0});
}

Statevector Statevector::basis_state(int n_qubits, std::uint64_t index) {
  Statevector s(n_qubits);
  if (index >= s.dim()) throw std::out_of_range("basis index out of range");
  s.amp_[index] = 1.0;
  return s;
}

double Statevector::norm() const {
  double n2 = 0.0;
  for (const auto& a : amp_) n2 += std::norm(a);
  return std::sqrt(n2);
}

void Statevector::normalize() {
  const double n = norm();
  if (n == 0.0) throw std::runtime_error("cannot normalize zero state");
  const double inv = 1.0 / n;
  for (auto& a : amp_) a *= inv;
}

void Statevector::set_zero() {
  for (auto& a : amp_) a = {0.0, 0.0};
}

Statevector& Statevector::operator+=(const Statevector& o) {
  if (o.dim() != dim()) throw std::invalid_argument("dimension mismatch");
  for (std::size_t i = 0; i < amp_.size(); ++i) amp_[i] += o.amp_[i];
  return *this;
}

Statevector& Statevector::operator-=(const Statevector& o) {
  if (o.dim() != dim()) throw std::invalid_argument("dimension mismatch");
  for (std::size_t i = 0; i < amp_.size(); ++i) amp_[i] -= o.amp_[i];
  return *this;
}

Statevector& Statevector::operator*=(std::complex<double> c) {
  for (auto& a : amp_) a *= c;
  return *this;
}

void Statevector::axpy(std::complex<double> c, const Statevector& x) {
  if (x.dim() != dim()) throw std::invalid_argument("dimension mismatch");
  for (std::size_t i = 0; i < amp_.size(); ++i) amp_[i] += c * x.amp_[i];
}

std::complex<double> inner(const Statevector& a, const Statevector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    acc += std::conj(a[i]) * b[i];
  }
  return acc;
}

}  // namespace mcvqe
