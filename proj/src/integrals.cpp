#include "mcvqe/integrals.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mcvqe {

namespace {

std::size_t tri(std::size_t k) { return k * (k + 1) / 2; }

std::size_t pair_index(int p, int q) {
  return p >= q ? tri(p) + q : tri(q) + p;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void SectorSpec::validate(int n_orbitals) const {
  if (n_alpha < 0 || n_beta < 0 || n_alpha > n_orbitals ||
      n_beta > n_orbitals) {
    throw std::invalid_argument("sector: electron counts outside [0, M]");
  }
  const int diff = std::abs(n_alpha - n_beta);
  if (spin_s < diff || spin_s > n_alpha + n_beta) {
    throw std::invalid_argument("sector: spin outside [|Na-Nb|, Na+Nb]");
  }
  if ((spin_s - diff) % 2 != 0) {
    throw std::invalid_argument("sector: spin parity incompatible with Na-Nb");
  }
}

ElementId ElementId::one_body(int p, int q) {
  ElementId id;
  id.kind = Kind::OneBody;
  id.p = std::min(p, q);
  id.q = std::max(p, q);
  return id;
}

ElementId ElementId::eri(int p, int q, int r, int s) {
  // Canonical representative: sort within each pair, then order the pairs.
  int a = std::min(p, q), b = std::max(p, q);
  int c = std::min(r, s), d = std::max(r, s);
  if (pair_index(b, a) > pair_index(d, c)) {
    std::swap(a, c);
    std::swap(b, d);
  }
  ElementId id;
  id.kind = Kind::Eri;
  id.p = a;
  id.q = b;
  id.r = c;
  id.s = d;
  return id;
}

int ElementId::orbit_size() const {
  if (kind == Kind::OneBody) return p == q ? 1 : 2;
  std::set<std::array<int, 4>> members;
  const int perms[8][4] = {{p, q, r, s}, {q, p, r, s}, {p, q, s, r},
                           {q, p, s, r}, {r, s, p, q}, {s, r, p, q},
                           {r, s, q, p}, {s, r, q, p}};
  for (const auto& t : perms) members.insert({t[0], t[1], t[2], t[3]});
  return static_cast<int>(members.size());
}

bool ElementId::operator<(const ElementId& o) const {
  return std::tie(kind, p, q, r, s) < std::tie(o.kind, o.p, o.q, o.r, o.s);
}

std::string ElementId::to_string() const {
  std::ostringstream os;
  if (kind == Kind::OneBody) {
    os << "h(" << p << "," << q << ")";
  } else {
    os << "(" << p << q << "|" << r << s << ")";
  }
  return os.str();
}

ActiveSpaceIntegrals::ActiveSpaceIntegrals(int n_orbitals, double e_ext)
    : m_(n_orbitals), e_ext_(e_ext) {
  if (n_orbitals < 1) throw std::invalid_argument("need at least one orbital");
  one_body_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  eri_.assign(tri(tri(m_)), 0.0);
}

void ActiveSpaceIntegrals::check_orbital(int p) const {
  if (p < 0 || p >= m_) throw std::out_of_range("orbital index out of range");
}

double ActiveSpaceIntegrals::one_body(int p, int q) const {
  check_orbital(p);
  check_orbital(q);
  return one_body_[static_cast<std::size_t>(p) * m_ + q];
}

void ActiveSpaceIntegrals::set_one_body(int p, int q, double v) {
  check_orbital(p);
  check_orbital(q);
  one_body_[static_cast<std::size_t>(p) * m_ + q] = v;
  one_body_[static_cast<std::size_t>(q) * m_ + p] = v;
}

std::size_t ActiveSpaceIntegrals::eri_index(int p, int q, int r, int s) const {
  check_orbital(p);
  check_orbital(q);
  check_orbital(r);
  check_orbital(s);
  return pair_index(static_cast<int>(pair_index(p, q)),
                    static_cast<int>(pair_index(r, s)));
}

double ActiveSpaceIntegrals::eri(int p, int q, int r, int s) const {
  return eri_[eri_index(p, q, r, s)];
}

void ActiveSpaceIntegrals::set_eri(int p, int q, int r, int s, double v) {
  eri_[eri_index(p, q, r, s)] = v;
}

ActiveSpaceIntegrals ActiveSpaceIntegrals::perturbed(const ElementId& id,
                                                     double delta) const {
  ActiveSpaceIntegrals out = *this;
  if (id.kind == ElementId::Kind::OneBody) {
    out.set_one_body(id.p, id.q, one_body(id.p, id.q) + delta);
  } else {
    out.set_eri(id.p, id.q, id.r, id.s, eri(id.p, id.q, id.r, id.s) + delta);
  }
  return out;
}

std::vector<ElementId> ActiveSpaceIntegrals::canonical_elements() const {
  std::vector<ElementId> out;
  for (int p = 0; p < m_; ++p)
    for (int q = p; q < m_; ++q) out.push_back(ElementId::one_body(p, q));
  std::set<ElementId> eris;
  for (int p = 0; p < m_; ++p)
    for (int q = 0; q < m_; ++q)
      for (int r = 0; r < m_; ++r)
        for (int s = 0; s < m_; ++s) eris.insert(ElementId::eri(p, q, r, s));
  out.insert(out.end(), eris.begin(), eris.end());
  return out;
}

double ActiveSpaceIntegrals::element(const ElementId& id) const {
  if (id.kind == ElementId::Kind::OneBody) return one_body(id.p, id.q);
  return eri(id.p, id.q, id.r, id.s);
}

std::vector<double> kappa_matrix(const ActiveSpaceIntegrals& ints) {
  const int m = ints.n_orbitals();
  std::vector<double> k(static_cast<std::size_t>(m) * m, 0.0);
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      double sum = 0.0;
      for (int r = 0; r < m; ++r) sum += ints.eri(p, r, r, q);
      k[static_cast<std::size_t>(p) * m + q] = ints.one_body(p, q) - 0.5 * sum;
    }
  }
  return k;
}

namespace {

struct FcidumpHeader {
  int norb = -1;
  int nelec = -1;
  int ms2 = 0;
  bool has_nelec = false;
};

// The namelist header is a comma/whitespace separated list of KEY=VALUE
// fields; array-valued fields (e.g. ORBSYM=1,1,) are skipped.
FcidumpHeader parse_header(const std::string& text, const std::string& origin) {
  FcidumpHeader h;
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream is(cleaned);
  std::string tok;
  std::string key;
  while (is >> tok) {
    auto eq = tok.find('=');
    std::string value;
    if (eq != std::string::npos) {
      key = tok.substr(0, eq);
      std::transform(key.begin(), key.end(), key.begin(), ::toupper);
      value = tok.substr(eq + 1);
    } else {
      value = tok;  // continuation of the previous key's value list
    }
    if (value.empty()) continue;
    try {
      if (key == "NORB") {
        h.norb = std::stoi(value);
      } else if (key == "NELEC") {
        h.nelec = std::stoi(value);
        h.has_nelec = true;
      } else if (key == "MS2") {
        h.ms2 = std::stoi(value);
      }
    } catch (const std::exception&) {
      throw std::runtime_error(origin + ": malformed header field '" + tok +
                               "'");
    }
  }
  if (h.norb < 1) {
    throw std::runtime_error(origin + ": header must declare NORB >= 1");
  }
  if (!h.has_nelec) {
    throw std::runtime_error(origin + ": header must declare NELEC");
  }
  return h;
}

}  // namespace

FcidumpData parse_fcidump(std::istream& in, const std::string& origin) {
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());

  // Locate end of header: first "&END" or a "/" token.
  std::size_t body_start = std::string::npos;
  std::string header_text;
  const std::size_t amp_end = content.find("&END");
  const std::size_t slash = content.find('/');
  if (amp_end != std::string::npos &&
      (slash == std::string::npos || amp_end < slash)) {
    header_text = content.substr(0, amp_end);
    body_start = amp_end + 4;
  } else if (slash != std::string::npos) {
    header_text = content.substr(0, slash);
    body_start = slash + 1;
  } else {
    throw std::runtime_error(origin + ": header not terminated by &END or /");
  }
  // Strip a leading "&FCI" (or similar) namelist tag.
  const std::size_t amp = header_text.find('&');
  if (amp != std::string::npos) {
    std::size_t tag_end = amp;
    while (tag_end < header_text.size() && !std::isspace(header_text[tag_end]))
      ++tag_end;
    header_text = header_text.substr(tag_end);
  }

  const FcidumpHeader h = parse_header(header_text, origin);

  FcidumpData data;
  data.integrals = ActiveSpaceIntegrals(h.norb);
  data.sector.n_alpha = (h.nelec + h.ms2) / 2;
  data.sector.n_beta = (h.nelec - h.ms2) / 2;
  data.sector.spin_s = std::abs(h.ms2);
  if (data.sector.n_alpha + data.sector.n_beta != h.nelec) {
    throw std::runtime_error(origin + ": NELEC and MS2 have mismatched parity");
  }
  data.sector.validate(h.norb);

  std::istringstream body(content.substr(body_start));
  std::set<ElementId> seen;
  bool seen_scalar = false;
  double value;
  long i, j, k, l;
  while (body >> value) {
    if (!(body >> i >> j >> k >> l)) {
      throw std::runtime_error(origin + ": truncated record");
    }
    if (!std::isfinite(value)) {
      throw std::runtime_error(origin + ": non-finite value in record");
    }
    auto check = [&](long idx) {
      if (idx < 1 || idx > h.norb) {
        throw std::runtime_error(origin + ": index out of range in record");
      }
    };
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      if (seen_scalar) {
        throw std::runtime_error(origin + ": duplicate scalar record");
      }
      seen_scalar = true;
      data.integrals.set_e_ext(value);
    } else if (k == 0 && l == 0) {
      check(i);
      check(j);
      const auto id = ElementId::one_body(static_cast<int>(i) - 1,
                                          static_cast<int>(j) - 1);
      if (!seen.insert(id).second) {
        throw std::runtime_error(origin + ": duplicate one-body record " +
                                 id.to_string());
      }
      data.integrals.set_one_body(id.p, id.q, value);
    } else if (i != 0 && j != 0 && k != 0 && l != 0) {
      check(i);
      check(j);
      check(k);
      check(l);
      const auto id =
          ElementId::eri(static_cast<int>(i) - 1, static_cast<int>(j) - 1,
                         static_cast<int>(k) - 1, static_cast<int>(l) - 1);
      if (!seen.insert(id).second) {
        throw std::runtime_error(origin + ": duplicate ERI record " +
                                 id.to_string());
      }
      data.integrals.set_eri(id.p, id.q, id.r, id.s, value);
    } else {
      throw std::runtime_error(origin + ": malformed index pattern in record");
    }
  }
  if (!body.eof()) {
    throw std::runtime_error(origin + ": unparseable trailing content");
  }
  return data;
}

FcidumpData load_fcidump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open FCIDUMP file: " + path);
  return parse_fcidump(in, path);
}

std::string format_fcidump(const ActiveSpaceIntegrals& ints,
                           const SectorSpec& sector) {
  const int m = ints.n_orbitals();
  std::ostringstream os;
  os << "&FCI NORB=" << m << ",NELEC=" << sector.n_electrons()
     << ",MS2=" << (sector.n_alpha - sector.n_beta) << ",\n&END\n";
  for (const auto& id : ints.canonical_elements()) {
    const double v = ints.element(id);
    if (v == 0.0) continue;
    if (id.kind == ElementId::Kind::OneBody) {
      os << fmt17(v) << " " << id.p + 1 << " " << id.q + 1 << " 0 0\n";
    } else {
      os << fmt17(v) << " " << id.p + 1 << " " << id.q + 1 << " " << id.r + 1
         << " " << id.s + 1 << "\n";
    }
  }
  if (ints.e_ext() != 0.0) {
    os << fmt17(ints.e_ext()) << " 0 0 0 0\n";
  }
  return os.str();
}

void save_fcidump(const std::string& path, const ActiveSpaceIntegrals& ints,
                  const SectorSpec& sector) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write FCIDUMP file: " + path);
  out << format_fcidump(ints, sector);
}

}  // namespace mcvqe
