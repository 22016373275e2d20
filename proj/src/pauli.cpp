#include "mcvqe/pauli.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mcvqe/statevector.hpp"

namespace mcvqe {

namespace {

constexpr std::complex<double> kPhases[4] = {
    {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};

}  // namespace

PauliWord::PauliWord(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 64) {
    throw std::invalid_argument("unsupported qubit count for PauliWord");
  }
}

PauliWord PauliWord::single(int n_qubits, int qubit, char letter) {
  PauliWord w(n_qubits);
  w.set_letter(qubit, letter);
  return w;
}

void PauliWord::check_qubit(int qubit) const {
  if (qubit < 0 || qubit >= n_qubits_) {
    throw std::out_of_range("qubit index out of range");
  }
}

char PauliWord::letter(int qubit) const {
  check_qubit(qubit);
  const bool x = (x_ >> qubit) & 1;
  const bool z = (z_ >> qubit) & 1;
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}

void PauliWord::set_letter(int qubit, char letter) {
  check_qubit(qubit);
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  x_ &= ~bit;
  z_ &= ~bit;
  switch (letter) {
    case 'I':
      break;
    case 'X':
      x_ |= bit;
      break;
    case 'Y':
      x_ |= bit;
      z_ |= bit;
      break;
    case 'Z':
      z_ |= bit;
      break;
    default:
      throw std::invalid_argument("invalid Pauli letter");
  }
}

int PauliWord::weight() const { return std::popcount(x_ | z_); }

bool PauliWord::operator<(const PauliWord& o) const {
  if (n_qubits_ != o.n_qubits_) return n_qubits_ < o.n_qubits_;
  if (z_ != o.z_) return z_ < o.z_;
  return x_ < o.x_;
}

WordProduct multiply(const PauliWord& a, const PauliWord& b) {
  if (a.n_qubits_ != b.n_qubits_) {
    throw std::invalid_argument("PauliWord qubit counts differ");
  }
  PauliWord out(a.n_qubits_);
  out.x_ = a.x_ ^ b.x_;
  out.z_ = a.z_ ^ b.z_;
  // Per-qubit phase: +i for cyclic letter pairs (XY, YZ, ZX), -i for the
  // reversed order, 1 otherwise.
  const std::uint64_t ax = a.x_, az = a.z_, bx = b.x_, bz = b.z_;
  const std::uint64_t pos = (ax & ~az & bx & bz)     // X*Y
                            | (ax & az & ~bx & bz)   // Y*Z
                            | (~ax & az & bx & ~bz); // Z*X
  const std::uint64_t neg = (ax & az & bx & ~bz)     // Y*X
                            | (~ax & az & bx & bz)   // Z*Y
                            | (ax & ~az & ~bx & bz); // X*Z
  const int k = (std::popcount(pos) + 3 * std::popcount(neg)) & 3;
  return {kPhases[k], out};
}

std::complex<double> PauliWord::basis_phase(std::uint64_t basis) const {
  const int ny = std::popcount(x_ & z_);
  const int zpar = std::popcount(basis & z_) & 1;
  std::complex<double> phase = kPhases[ny & 3];
  return zpar ? -phase : phase;
}

std::string PauliWord::to_string() const {
  if (is_identity()) return "I";
  std::ostringstream os;
  bool first = true;
  for (int q = 0; q < n_qubits_; ++q) {
    const char l = letter(q);
    if (l == 'I') continue;
    if (!first) os << " ";
    os << l << q;
    first = false;
  }
  return os.str();
}

PauliOperator PauliOperator::identity(int n_qubits, double coeff) {
  PauliOperator op(n_qubits);
  op.add_term(PauliWord::identity(n_qubits), coeff);
  return op;
}

void PauliOperator::add_term(const PauliWord& word, double coeff) {
  if (word.n_qubits() != n_qubits_) {
    throw std::invalid_argument("word qubit count differs from operator");
  }
  auto [it, inserted] = terms_.try_emplace(word, coeff);
  if (!inserted) it->second += coeff;
  if (std::abs(it->second) < drop_tolerance) terms_.erase(it);
}

double PauliOperator::coefficient(const PauliWord& word) const {
  const auto it = terms_.find(word);
  return it == terms_.end() ? 0.0 : it->second;
}

PauliOperator& PauliOperator::operator+=(const PauliOperator& other) {
  if (other.n_qubits_ != n_qubits_) {
    throw std::invalid_argument("operator qubit counts differ");
  }
  for (const auto& [w, c] : other.terms_) add_term(w, c);
  return *this;
}

PauliOperator& PauliOperator::operator*=(double scale) {
  if (scale == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, c] : terms_) c *= scale;
  return *this;
}

std::complex<double> word_expectation(const PauliWord& word,
                                      const Statevector& state) {
  if (word.n_qubits() != state.n_qubits()) {
    throw std::invalid_argument("word/state dimension mismatch");
  }
  const std::uint64_t x = word.x_mask();
  std::complex<double> acc = 0.0;
  for (std::uint64_t b = 0; b < state.dim(); ++b) {
    const std::complex<double> a = state[b];
    if (a == std::complex<double>{0.0, 0.0}) continue;
    acc += std::conj(state[b ^ x]) * word.basis_phase(b) * a;
  }
  return acc;
}

double PauliOperator::expectation(const Statevector& state) const {
  if (state.n_qubits() != n_qubits_) {
    throw std::invalid_argument("operator/state dimension mismatch");
  }
  if (std::abs(state.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("expectation requires a normalized state");
  }
  std::complex<double> acc = 0.0;
  for (const auto& [w, c] : terms_) {
    acc += c * word_expectation(w, state);
  }
  if (std::abs(acc.imag()) > 1e-12) {
    throw std::runtime_error("expectation has non-negligible imaginary part");
  }
  return acc.real();
}

std::map<PauliWord, double> PauliOperator::word_expectations(
    const Statevector& state) const {
  if (state.n_qubits() != n_qubits_) {
    throw std::invalid_argument("operator/state dimension mismatch");
  }
  std::map<PauliWord, double> out;
  for (const auto& [w, c] : terms_) {
    const auto v = word_expectation(w, state);
    if (std::abs(v.imag()) > 1e-12) {
      throw std::runtime_error("word expectation has imaginary part");
    }
    out[w] = v.real();
  }
  return out;
}

Statevector PauliOperator::apply(const Statevector& state) const {
  if (state.n_qubits() != n_qubits_) {
    throw std::invalid_argument("operator/state dimension mismatch");
  }
  Statevector out(state.n_qubits());
  for (const auto& [w, c] : terms_) {
    const std::uint64_t x = w.x_mask();
    for (std::uint64_t b = 0; b < state.dim(); ++b) {
      const std::complex<double> a = state[b];
      if (a == std::complex<double>{0.0, 0.0}) continue;
      out[b ^ x] += c * w.basis_phase(b) * a;
    }
  }
  return out;
}

std::string PauliOperator::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    if (!first) os << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", c);
    os << buf << " " << w.to_string();
    first = false;
  }
  return os.str();
}

PauliOperator PauliOperator::parse(const std::string& text, int n_qubits) {
  PauliOperator op(n_qubits);
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    double coeff;
    if (!(is >> coeff)) {
      throw std::runtime_error("cannot parse coefficient in: " + line);
    }
    PauliWord word(n_qubits);
    std::string tok;
    while (is >> tok) {
      if (tok == "I") continue;
      if (tok.size() < 2) throw std::runtime_error("bad Pauli token: " + tok);
      const char letter = tok[0];
      const int qubit = std::stoi(tok.substr(1));
      word.set_letter(qubit, letter);
    }
    op.add_term(word, coeff);
  }
  return op;
}

}  // namespace mcvqe
