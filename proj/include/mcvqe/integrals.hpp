#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mcvqe {

/// Quantum-number sector (N_alpha, N_beta, S) of the active space.
/// `spin_s` is twice the total spin, so the S^2 eigenvalue is
/// S/2 (S/2 + 1) and the parity of `spin_s` matches |N_alpha - N_beta|.
struct SectorSpec {
  int n_alpha = 0;
  int n_beta = 0;
  int spin_s = 0;

  void validate(int n_orbitals) const;
  double s2_eigenvalue() const { return 0.25 * spin_s * (spin_s + 2); }
  int n_electrons() const { return n_alpha + n_beta; }
};

/// Identifies one canonical matrix element of the active-space Hamiltonian:
/// either a one-body pair (p,q) with p <= q or an ERI quadruple stored as
/// the canonical representative of its 8-fold permutation orbit.
struct ElementId {
  enum class Kind { OneBody, Eri };
  Kind kind = Kind::OneBody;
  int p = 0, q = 0, r = 0, s = 0;

  static ElementId one_body(int p, int q);
  static ElementId eri(int p, int q, int r, int s);

  /// Number of distinct index tuples in the symmetry orbit (1 or 2 for
  /// one-body elements, 1..8 for ERIs).
  int orbit_size() const;

  bool operator==(const ElementId&) const = default;
  bool operator<(const ElementId& o) const;
  std::string to_string() const;
};

/// Active-space Hamiltonian matrix elements: external self-energy E_ext,
/// symmetric one-body integrals (p|h|q), and 8-fold symmetric ERIs (pq|rs)
/// in chemists' notation. The ERIs are stored canonically (one value per
/// permutation orbit) and expanded on access, so the 8-fold symmetry holds
/// by construction. Immutable in practice: all mutating helpers return
/// copies, so instances are safe to share across threads after creation.
class ActiveSpaceIntegrals {
 public:
  ActiveSpaceIntegrals() = default;
  explicit ActiveSpaceIntegrals(int n_orbitals, double e_ext = 0.0);

  int n_orbitals() const { return m_; }
  double e_ext() const { return e_ext_; }
  void set_e_ext(double v) { e_ext_ = v; }

  double one_body(int p, int q) const;
  void set_one_body(int p, int q, double v);  // sets (p,q) and (q,p)

  double eri(int p, int q, int r, int s) const;
  void set_eri(int p, int q, int r, int s, double v);  // sets the whole orbit

  /// Returns a copy in which every member of the element's symmetry orbit
  /// is shifted by `delta`.
  ActiveSpaceIntegrals perturbed(const ElementId& id, double delta) const;

  /// Canonical element ids in deterministic order: all one-body pairs
  /// (p <= q), then all canonical ERI quadruples.
  std::vector<ElementId> canonical_elements() const;

  double element(const ElementId& id) const;

  const std::vector<double>& eri_canonical_storage() const { return eri_; }
  std::size_t n_eri_canonical() const { return eri_.size(); }

 private:
  int m_ = 0;
  double e_ext_ = 0.0;
  std::vector<double> one_body_;  // dense M x M, kept symmetric
  std::vector<double> eri_;       // canonical packed, M(M+1)/2 pair-of-pairs

  std::size_t eri_index(int p, int q, int r, int s) const;
  void check_orbital(int p) const;
};

/// Modified one-electron integrals (p|kappa|q) = (p|h|q) - 1/2 sum_r (pr|rq).
std::vector<double> kappa_matrix(const ActiveSpaceIntegrals& ints);

struct FcidumpData {
  ActiveSpaceIntegrals integrals;
  SectorSpec sector;
};

/// Parses an FCIDUMP file: a namelist header declaring NORB, NELEC, MS2
/// terminated by "&END" or "/", followed by whitespace-separated records
/// "value i j k l" with 1-based indices. (0 0 0 0) is the scalar E_ext,
/// (i j 0 0) a one-body element, (i j k l) an ERI in chemists' notation.
/// Unlisted entries are zero. A second record hitting an already-set
/// canonical element is an error.
FcidumpData load_fcidump(const std::string& path);
FcidumpData parse_fcidump(std::istream& in, const std::string& origin);

/// Canonical serialization; load(save(x)) reproduces x bit-identically.
void save_fcidump(const std::string& path, const ActiveSpaceIntegrals& ints,
                  const SectorSpec& sector);
std::string format_fcidump(const ActiveSpaceIntegrals& ints,
                           const SectorSpec& sector);

}  // namespace mcvqe
