#include "mcvqe/jw.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <utility>

namespace mcvqe {

namespace {

// Hop word A_p <-> B_q for same-spin orbitals p < q: letters A, B at the end
// qubits with a Z string on the same-spin qubits strictly between (the
// logical alpha-then-beta ordering keeps opposite-spin qubits out of the
// string).
PauliWord hop_word(int m, int spin, int p, int q, char a, char b) {
  PauliWord w(2 * m);
  w.set_letter(QubitLayout::spin_qubit(p, spin), a);
  w.set_letter(QubitLayout::spin_qubit(q, spin), b);
  for (int t = p + 1; t < q; ++t) {
    w.set_letter(QubitLayout::spin_qubit(t, spin), 'Z');
  }
  return w;
}

PauliWord z_word(int m, int spin, int p) {
  PauliWord w(2 * m);
  w.set_letter(QubitLayout::spin_qubit(p, spin), 'Z');
  return w;
}

// Merge two words with no letter collisions except Z*Z (which cancels);
// both cases carry a +1 phase.
PauliWord merge(const PauliWord& a, const PauliWord& b) {
  const auto prod = multiply(a, b);
  if (prod.phase != std::complex<double>{1.0, 0.0}) {
    throw std::logic_error("unexpected phase merging disjoint words");
  }
  return prod.word;
}

class JacobianBuilder {
 public:
  explicit JacobianBuilder(int m) : m_(m) {}

  void add(const PauliWord& word, const ElementId& element, double coeff) {
    acc_[{element, word}] += coeff;
  }

  std::vector<IntegralJacobianEntry> take() {
    std::vector<IntegralJacobianEntry> out;
    out.reserve(acc_.size());
    for (const auto& [key, coeff] : acc_) {
      if (std::abs(coeff) < PauliOperator::drop_tolerance) continue;
      out.push_back({key.second, key.first, coeff});
    }
    return out;
  }

 private:
  int m_;
  std::map<std::pair<ElementId, PauliWord>, double> acc_;
};

void add_one_particle(JacobianBuilder& jb, int m, int spin) {
  for (int p = 0; p < m; ++p) {
    const auto el = ElementId::one_body(p, p);
    jb.add(PauliWord::identity(2 * m), el, 0.5);
    jb.add(z_word(m, spin, p), el, -0.5);
  }
  for (int p = 0; p < m; ++p) {
    for (int q = p + 1; q < m; ++q) {
      const auto el = ElementId::one_body(p, q);
      jb.add(hop_word(m, spin, p, q, 'X', 'X'), el, 0.5);
      jb.add(hop_word(m, spin, p, q, 'Y', 'Y'), el, 0.5);
    }
  }
}

// Opposite-spin two-body terms: (pq|rs) couples an alpha pair (p,q) to a
// beta pair (r,s); diagonal pairs give number operators (I - Z)/2, the
// off-diagonal ones (XX + YY)/2 hops.
void add_alpha_beta(JacobianBuilder& jb, int m) {
  const int a = 0, b = 1;
  const PauliWord id = PauliWord::identity(2 * m);
  for (int p = 0; p < m; ++p) {
    for (int r = 0; r < m; ++r) {
      const auto el = ElementId::eri(p, p, r, r);
      jb.add(id, el, 0.25);
      jb.add(z_word(m, b, r), el, -0.25);
      jb.add(z_word(m, a, p), el, -0.25);
      jb.add(merge(z_word(m, a, p), z_word(m, b, r)), el, 0.25);
    }
  }
  for (int p = 0; p < m; ++p) {
    for (int r = 0; r < m; ++r) {
      for (int s = r + 1; s < m; ++s) {
        const auto el = ElementId::eri(p, p, r, s);
        const auto xx = hop_word(m, b, r, s, 'X', 'X');
        const auto yy = hop_word(m, b, r, s, 'Y', 'Y');
        jb.add(xx, el, 0.25);
        jb.add(yy, el, 0.25);
        jb.add(merge(z_word(m, a, p), xx), el, -0.25);
        jb.add(merge(z_word(m, a, p), yy), el, -0.25);
      }
    }
  }
  for (int p = 0; p < m; ++p) {
    for (int q = p + 1; q < m; ++q) {
      for (int r = 0; r < m; ++r) {
        const auto el = ElementId::eri(p, q, r, r);
        const auto xx = hop_word(m, a, p, q, 'X', 'X');
        const auto yy = hop_word(m, a, p, q, 'Y', 'Y');
        jb.add(xx, el, 0.25);
        jb.add(yy, el, 0.25);
        jb.add(merge(z_word(m, b, r), xx), el, -0.25);
        jb.add(merge(z_word(m, b, r), yy), el, -0.25);
      }
    }
  }
  for (int p = 0; p < m; ++p) {
    for (int q = p + 1; q < m; ++q) {
      for (int r = 0; r < m; ++r) {
        for (int s = r + 1; s < m; ++s) {
          const auto el = ElementId::eri(p, q, r, s);
          for (const char la : {'X', 'Y'}) {
            for (const char lb : {'X', 'Y'}) {
              jb.add(merge(hop_word(m, a, p, q, la, la),
                           hop_word(m, b, r, s, lb, lb)),
                     el, 0.25);
            }
          }
        }
      }
    }
  }
}

// Same-spin two-body terms, expressed through the antisymmetrized integrals
// <pq||rs> = (pr|qs) - (ps|qr). Each occurrence is attributed to its two raw
// ERI elements so the Jacobian differentiates the stored symmetric tensor.
void add_same_spin(JacobianBuilder& jb, int m, int spin) {
  const PauliWord id = PauliWord::identity(2 * m);

  auto add_antisym = [&](const PauliWord& w, int p, int q, int r, int s,
                         double coeff) {
    // coeff * <pq||rs>
    jb.add(w, ElementId::eri(p, r, q, s), coeff);
    jb.add(w, ElementId::eri(p, s, q, r), -coeff);
  };

  // Fully contracted: <pq||pq> with number operators.
  for (int p = 0; p < m; ++p) {
    for (int q = p + 1; q < m; ++q) {
      add_antisym(id, p, q, p, q, 0.25);
      add_antisym(merge(z_word(m, spin, p), z_word(m, spin, q)), p, q, p, q,
                  0.25);
    }
  }
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      if (q == p) continue;
      add_antisym(z_word(m, spin, p), p, q, p, q, -0.25);
    }
  }

  // Singly contracted: sum_p <pq||pr> with a q<->r hop; Z_p punches a hole
  // in the string when q < p < r.
  for (int q = 0; q < m; ++q) {
    for (int r = q + 1; r < m; ++r) {
      const auto xx = hop_word(m, spin, q, r, 'X', 'X');
      const auto yy = hop_word(m, spin, q, r, 'Y', 'Y');
      for (int p = 0; p < m; ++p) {
        if (p == q || p == r) continue;
        add_antisym(xx, p, q, p, r, 0.25);
        add_antisym(yy, p, q, p, r, 0.25);
        add_antisym(merge(z_word(m, spin, p), xx), p, q, p, r, -0.25);
        add_antisym(merge(z_word(m, spin, p), yy), p, q, p, r, -0.25);
      }
    }
  }

  // Uncontracted: p < q < r < s double hops.
  for (int p = 0; p < m; ++p) {
    for (int q = p + 1; q < m; ++q) {
      for (int r = q + 1; r < m; ++r) {
        for (int s = r + 1; s < m; ++s) {
          auto two_hop = [&](char a, char b, char c, char d) {
            return merge(hop_word(m, spin, p, q, a, b),
                         hop_word(m, spin, r, s, c, d));
          };
          const auto el_pqrs = ElementId::eri(p, q, r, s);
          const auto el_prqs = ElementId::eri(p, r, q, s);
          const auto el_psqr = ElementId::eri(p, s, q, r);

          const auto xxxx = two_hop('X', 'X', 'X', 'X');
          jb.add(xxxx, el_pqrs, 0.25);
          jb.add(xxxx, el_psqr, -0.25);

          const auto xxyy = two_hop('X', 'X', 'Y', 'Y');
          jb.add(xxyy, el_pqrs, 0.25);
          jb.add(xxyy, el_prqs, -0.25);

          const auto xyyx = two_hop('X', 'Y', 'Y', 'X');
          jb.add(xyyx, el_prqs, 0.25);
          jb.add(xyyx, el_psqr, -0.25);

          const auto yxxy = two_hop('Y', 'X', 'X', 'Y');
          jb.add(yxxy, el_prqs, 0.25);
          jb.add(yxxy, el_psqr, -0.25);

          const auto yyxx = two_hop('Y', 'Y', 'X', 'X');
          jb.add(yyxx, el_pqrs, 0.25);
          jb.add(yyxx, el_prqs, -0.25);

          const auto yyyy = two_hop('Y', 'Y', 'Y', 'Y');
          jb.add(yyyy, el_pqrs, 0.25);
          jb.add(yyyy, el_psqr, -0.25);
        }
      }
    }
  }
}

}  // namespace

IntegralJacobian::IntegralJacobian(int m) : m_(m) {
  if (m < 1) throw std::invalid_argument("need at least one orbital");
  JacobianBuilder jb(m);
  add_one_particle(jb, m, 0);
  add_one_particle(jb, m, 1);
  add_alpha_beta(jb, m);
  add_same_spin(jb, m, 0);
  add_same_spin(jb, m, 1);
  entries_ = jb.take();
}

IntegralJacobian integral_jacobian(int m) { return IntegralJacobian(m); }

PauliOperator IntegralJacobian::contract(
    const ActiveSpaceIntegrals& ints) const {
  if (ints.n_orbitals() != m_) {
    throw std::invalid_argument("integral dimension differs from Jacobian");
  }
  PauliOperator h(2 * m_);
  for (const auto& e : entries_) {
    h.add_term(e.word, e.coeff * ints.element(e.element));
  }
  return h;
}

std::vector<PauliWord> IntegralJacobian::word_support() const {
  std::map<PauliWord, bool> seen;
  for (const auto& e : entries_) seen[e.word] = true;
  std::vector<PauliWord> out;
  out.reserve(seen.size());
  for (const auto& [w, _] : seen) out.push_back(w);
  return out;
}

DensityPair IntegralJacobian::backtransform(
    const std::map<PauliWord, double>& word_expectations) const {
  std::map<ElementId, double> orbit_derivative;
  for (const auto& e : entries_) {
    const auto it = word_expectations.find(e.word);
    if (it == word_expectations.end()) {
      throw std::invalid_argument(
          "missing word expectation for Jacobian word " + e.word.to_string());
    }
    orbit_derivative[e.element] += e.coeff * it->second;
  }

  DensityPair d = DensityPair::zero(m_, DensityFlavor::Unrelaxed);
  for (const auto& [el, deriv] : orbit_derivative) {
    if (el.kind == ElementId::Kind::OneBody) {
      const double v = deriv / el.orbit_size();
      d.opdm_at(el.p, el.q) = v;
      d.opdm_at(el.q, el.p) = v;
    } else {
      const double v = 2.0 * deriv / el.orbit_size();
      const int perms[8][4] = {
          {el.p, el.q, el.r, el.s}, {el.q, el.p, el.r, el.s},
          {el.p, el.q, el.s, el.r}, {el.q, el.p, el.s, el.r},
          {el.r, el.s, el.p, el.q}, {el.s, el.r, el.p, el.q},
          {el.r, el.s, el.q, el.p}, {el.s, el.r, el.q, el.p}};
      for (const auto& t : perms) d.tpdm_at(t[0], t[1], t[2], t[3]) = v;
    }
  }
  return d;
}

PauliOperator map_hamiltonian(const ActiveSpaceIntegrals& ints) {
  const IntegralJacobian jac(ints.n_orbitals());
  PauliOperator h = jac.contract(ints);
  h.add_term(PauliWord::identity(h.n_qubits()), ints.e_ext());
  return h;
}

DensityPair backtransform(const std::map<PauliWord, double>& word_expectations,
                          int m) {
  return IntegralJacobian(m).backtransform(word_expectations);
}

namespace {

// Build-time accumulator for operator products whose individual factors have
// complex Pauli coefficients; the finalized operators must be real.
class ComplexPauliSum {
 public:
  explicit ComplexPauliSum(int n_qubits) : n_(n_qubits) {}

  void add(const PauliWord& w, std::complex<double> c) { terms_[w] += c; }

  ComplexPauliSum times(const ComplexPauliSum& o) const {
    ComplexPauliSum out(n_);
    for (const auto& [wa, ca] : terms_) {
      for (const auto& [wb, cb] : o.terms_) {
        const auto prod = multiply(wa, wb);
        out.add(prod.word, ca * cb * prod.phase);
      }
    }
    return out;
  }

  void accumulate(const ComplexPauliSum& o, std::complex<double> scale) {
    for (const auto& [w, c] : o.terms_) terms_[w] += scale * c;
  }

  PauliOperator finalize() const {
    PauliOperator op(n_);
    for (const auto& [w, c] : terms_) {
      if (std::abs(c.imag()) > 1e-12) {
        throw std::logic_error("operator finalization left imaginary residue");
      }
      op.add_term(w, c.real());
    }
    return op;
  }

 private:
  int n_;
  std::map<PauliWord, std::complex<double>> terms_;
};

// Jordan-Wigner image of a single ladder operator on a spin orbital
// (logical alpha-then-beta string order).
ComplexPauliSum ladder(int m, int spin, int p, bool dagger) {
  const int n = 2 * m;
  PauliWord string(n);
  const int logical = (spin == 0) ? p : m + p;
  for (int l = 0; l < logical; ++l) {
    const int qubit = (l < m) ? QubitLayout::alpha_qubit(l)
                              : QubitLayout::beta_qubit(l - m);
    string.set_letter(qubit, 'Z');
  }
  const int target = QubitLayout::spin_qubit(p, spin);
  PauliWord xw = string, yw = string;
  xw.set_letter(target, 'X');
  yw.set_letter(target, 'Y');
  ComplexPauliSum out(n);
  out.add(xw, 0.5);
  out.add(yw, dagger ? std::complex<double>{0.0, -0.5}
                     : std::complex<double>{0.0, 0.5});
  return out;
}

}  // namespace

NumberOperators map_number_operators(int m) {
  if (m < 1) throw std::invalid_argument("need at least one orbital");
  const int n = 2 * m;
  NumberOperators ops{PauliOperator(n), PauliOperator(n), PauliOperator(n)};

  for (int spin = 0; spin < 2; ++spin) {
    PauliOperator& num = (spin == 0) ? ops.n_alpha : ops.n_beta;
    for (int p = 0; p < m; ++p) {
      num.add_term(PauliWord::identity(n), 0.5);
      num.add_term(z_word(m, spin, p), -0.5);
    }
  }

  // S^2 = S- S+ + Sz + Sz^2 with S+ = sum_p a+_p b_p, Sz = (Na - Nb)/2.
  ComplexPauliSum s_plus(n), s_minus(n), sz(n);
  for (int p = 0; p < m; ++p) {
    s_plus.accumulate(ladder(m, 0, p, true).times(ladder(m, 1, p, false)),
                      1.0);
    s_minus.accumulate(ladder(m, 1, p, true).times(ladder(m, 0, p, false)),
                       1.0);
    sz.add(z_word(m, 0, p), -0.25);
    sz.add(z_word(m, 1, p), 0.25);
  }
  ComplexPauliSum s2 = s_minus.times(s_plus);
  s2.accumulate(sz, 1.0);
  s2.accumulate(sz.times(sz), 1.0);
  ops.s2 = s2.finalize();
  return ops;
}

}  // namespace mcvqe
