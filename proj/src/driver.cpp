#include "mcvqe/driver.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "mcvqe/fci.hpp"
#include "mcvqe/jw.hpp"
#include "mcvqe/linalg.hpp"
#include "mcvqe/mcvqe.hpp"
#include "mcvqe/response.hpp"
#include "mcvqe/shift_rules.hpp"

namespace mcvqe {

namespace {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void escape_string(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  out += '"';
}

}  // namespace

DocValue DocValue::array() {
  DocValue v;
  v.kind_ = Kind::Array;
  return v;
}

DocValue DocValue::object() {
  DocValue v;
  v.kind_ = Kind::Object;
  return v;
}

void DocValue::push_back(DocValue v) {
  if (kind_ != Kind::Array) throw std::logic_error("push_back on non-array");
  items_.push_back(std::move(v));
}

DocValue& DocValue::operator[](const std::string& key) {
  if (kind_ == Kind::Null) kind_ = Kind::Object;
  if (kind_ != Kind::Object) throw std::logic_error("key access on non-object");
  for (auto& [k, v] : fields_) {
    if (k == key) return v;
  }
  fields_.emplace_back(key, DocValue());
  return fields_.back().second;
}

void DocValue::write(std::string& out, int indent, int depth) const {
  const std::string pad(indent * depth, ' ');
  const std::string pad_in(indent * (depth + 1), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (kind_) {
    case Kind::Null:
      out += "null";
      break;
    case Kind::Bool:
      out += bool_ ? "true" : "false";
      break;
    case Kind::Int:
      out += std::to_string(int_);
      break;
    case Kind::Double:
      out += format_double(double_);
      break;
    case Kind::String:
      escape_string(out, string_);
      break;
    case Kind::Array: {
      if (items_.empty()) {
        out += "[]";
        break;
      }
      out += "[";
      out += nl;
      for (std::size_t i = 0; i < items_.size(); ++i) {
        out += pad_in;
        items_[i].write(out, indent, depth + 1);
        if (i + 1 < items_.size()) out += ",";
        out += nl;
      }
      out += pad + "]";
      break;
    }
    case Kind::Object: {
      if (fields_.empty()) {
        out += "{}";
        break;
      }
      out += "{";
      out += nl;
      for (std::size_t i = 0; i < fields_.size(); ++i) {
        out += pad_in;
        escape_string(out, fields_[i].first);
        out += ": ";
        fields_[i].second.write(out, indent, depth + 1);
        if (i + 1 < fields_.size()) out += ",";
        out += nl;
      }
      out += pad + "}";
      break;
    }
  }
}

std::string DocValue::serialize(int indent) const {
  std::string out;
  write(out, indent, 0);
  out += "\n";
  return out;
}

RunMode parse_run_mode(const std::string& text) {
  if (text == "energy") return RunMode::Energy;
  if (text == "gradient") return RunMode::Gradient;
  if (text == "validate") return RunMode::Validate;
  if (text == "fd-sweep") return RunMode::FdSweep;
  throw std::invalid_argument("unknown mode: " + text);
}

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Energy:
      return "energy";
    case RunMode::Gradient:
      return "gradient";
    case RunMode::Validate:
      return "validate";
    case RunMode::FdSweep:
      return "fd-sweep";
  }
  return "?";
}

void RunConfig::validate() const {
  if (input.empty()) throw std::invalid_argument("input path is required");
  if (n_states < 1) throw std::invalid_argument("states must be positive");
  if (n_layers < 0) throw std::invalid_argument("layers must be non-negative");
  if (gtol <= 0.0) throw std::invalid_argument("gtol must be positive");
  if (response_tol <= 0.0) {
    throw std::invalid_argument("resp-tol must be positive");
  }
  if (hessian != "exact" && hessian != "matvec" && hessian != "matvec-fd") {
    throw std::invalid_argument("hessian must be exact, matvec or matvec-fd");
  }
  if (n_fd < 2 || n_fd > 10 || n_fd % 2 != 0) {
    throw std::invalid_argument("nfd must be in {2, 4, 6, 8, 10}");
  }
  if (delta_fd <= 0.0) throw std::invalid_argument("dfd must be positive");
  if ((mode == RunMode::Validate || mode == RunMode::FdSweep) && !seed) {
    throw std::invalid_argument("seed is mandatory in validate/fd-sweep mode");
  }
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("weights must be non-negative");
  }
}

namespace {

DocValue vector_doc(const Eigen::VectorXd& v) {
  DocValue arr = DocValue::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

DocValue vector_doc(const std::vector<double>& v) {
  DocValue arr = DocValue::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

DocValue matrix_doc(const Eigen::MatrixXd& m) {
  DocValue rows = DocValue::array();
  for (int r = 0; r < m.rows(); ++r) {
    DocValue row = DocValue::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

DocValue config_doc(const RunConfig& config) {
  DocValue c = DocValue::object();
  c["input"] = config.input;
  c["mode"] = to_string(config.mode);
  c["states"] = config.n_states;
  c["layers"] = config.n_layers;
  DocValue w = DocValue::array();
  for (double x : config.weights) w.push_back(x);
  c["weights"] = std::move(w);
  if (config.seed) {
    c["seed"] = *config.seed;
  } else {
    c["seed"] = DocValue();
  }
  c["gtol"] = config.gtol;
  c["resp_tol"] = config.response_tol;
  c["hessian"] = config.hessian;
  c["nfd"] = config.n_fd;
  c["dfd"] = config.delta_fd;
  return c;
}

DocValue density_summary(const DensityPair& d) {
  DocValue s = DocValue::object();
  s["flavor"] = to_string(d.flavor);
  s["opdm_trace"] = d.opdm_trace();
  s["symmetry_residual"] = d.symmetry_residual();
  DocValue opdm = DocValue::array();
  for (int p = 0; p < d.m; ++p) {
    DocValue row = DocValue::array();
    for (int q = 0; q < d.m; ++q) row.push_back(d.opdm_at(p, q));
    opdm.push_back(std::move(row));
  }
  s["opdm"] = std::move(opdm);
  return s;
}

DocValue gradient_doc(const GradientRecord& rec) {
  DocValue g = DocValue::object();
  g["d_e_ext"] = rec.d_e_ext;
  DocValue one = DocValue::array();
  for (int p = 0; p < rec.m; ++p) {
    DocValue row = DocValue::array();
    for (int q = 0; q < rec.m; ++q) {
      row.push_back(rec.d_one_body[static_cast<std::size_t>(p) * rec.m + q]);
    }
    one.push_back(std::move(row));
  }
  g["d_one_body"] = std::move(one);
  DocValue eri = DocValue::array();
  for (const auto& [id, v] : rec.d_eri) {
    DocValue row = DocValue::array();
    row.push_back(id.p);
    row.push_back(id.q);
    row.push_back(id.r);
    row.push_back(id.s);
    row.push_back(v);
    eri.push_back(std::move(row));
  }
  g["d_eri_orbits"] = std::move(eri);
  return g;
}

DocValue response_doc(const ResponseSolution& r) {
  DocValue d = DocValue::object();
  d["converged"] = r.converged;
  d["iterations"] = r.iterations;
  d["residual_history"] = vector_doc(r.residual_history);
  d["lambda"] = vector_doc(r.lambda);
  return d;
}

GradientOptions gradient_options(const RunConfig& config) {
  GradientOptions o;
  if (config.hessian == "exact") {
    o.mode = HessianMode::Exact;
  } else if (config.hessian == "matvec") {
    o.mode = HessianMode::MatvecExact;
  } else {
    o.mode = HessianMode::MatvecFd;
  }
  o.n_fd = config.n_fd;
  o.delta_fd = config.delta_fd;
  o.response_tol = config.response_tol;
  return o;
}

struct ValidateCheck {
  std::string name;
  double deviation;
  double tolerance;
};

// Invariant suites over the loaded problem; deviations are max-norms.
std::vector<ValidateCheck> run_validation(const McVqeProblem& problem,
                                          const McVqeSolution& solution,
                                          std::uint64_t seed) {
  std::vector<ValidateCheck> checks;
  const int m = problem.ints.n_orbitals();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const auto random_sector_state = [&] {
    Statevector s(2 * m);
    const SectorBasis basis = SectorBasis::build(m, problem.sector);
    for (const auto det : basis.states) s[det] = gauss(rng);
    s.normalize();
    return s;
  };

  const auto h_pauli = map_hamiltonian(problem.ints);
  const IntegralJacobian jacobian(m);

  {
    double dev = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      const auto psi = random_sector_state();
      auto direct = apply_hamiltonian_direct(problem.ints, psi);
      direct -= h_pauli.apply(psi);
      dev = std::max(dev, direct.norm());
    }
    checks.push_back({"hamiltonian_pauli_vs_direct", dev, 1e-11});
  }
  {
    double dev = 0.0, trace_dev = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      const auto psi = random_sector_state();
      const auto direct = direct_densities(psi, m);
      const auto back =
          jacobian.backtransform(h_pauli.word_expectations(psi));
      for (std::size_t i = 0; i < direct.tpdm.size(); ++i) {
        dev = std::max(dev, std::abs(direct.tpdm[i] - back.tpdm[i]));
      }
      for (std::size_t i = 0; i < direct.opdm.size(); ++i) {
        dev = std::max(dev, std::abs(direct.opdm[i] - back.opdm[i]));
      }
      trace_dev = std::max(
          trace_dev, std::abs(trace_formula_energy(problem.ints, direct) -
                              hamiltonian_expectation_direct(problem.ints,
                                                             psi)));
    }
    checks.push_back({"dual_route_densities", dev, 1e-12});
    checks.push_back({"trace_formula", trace_dev, 1e-10});
  }
  {
    const auto ops = map_number_operators(m);
    double dev = 0.0;
    for (const auto& ref : problem.references) {
      dev = std::max(dev, std::abs(ops.n_alpha.expectation(ref) -
                                   problem.sector.n_alpha));
      dev = std::max(dev, std::abs(ops.n_beta.expectation(ref) -
                                   problem.sector.n_beta));
      dev = std::max(dev, std::abs(ops.s2.expectation(ref) -
                                   problem.sector.s2_eigenvalue()));
    }
    checks.push_back({"csf_quantum_numbers", dev, 1e-12});

    double drift = 0.0, unitarity = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      FabricParameters theta(problem.n_parameters());
      for (auto& t : theta) t = gauss(rng);
      const auto psi = random_sector_state();
      const double na0 = ops.n_alpha.expectation(psi);
      const double nb0 = ops.n_beta.expectation(psi);
      const double s20 = ops.s2.expectation(psi);
      const auto evolved = apply_fabric(psi, problem.layout, theta);
      unitarity = std::max(unitarity, std::abs(evolved.norm() - 1.0));
      drift = std::max(drift, std::abs(ops.n_alpha.expectation(evolved) - na0));
      drift = std::max(drift, std::abs(ops.n_beta.expectation(evolved) - nb0));
      drift = std::max(drift, std::abs(ops.s2.expectation(evolved) - s20));
    }
    checks.push_back({"fabric_unitarity", unitarity, 1e-12});
    checks.push_back({"fabric_number_preservation", drift, 1e-12});
  }
  if (problem.n_parameters() > 0) {
    const ThetaFunction f = [&](const std::vector<double>& t) {
      return sa_energy(problem, t);
    };
    FabricParameters theta(problem.n_parameters());
    for (auto& t : theta) t = 0.5 * gauss(rng);
    double dev = 0.0;
    const double h = 1e-6;
    for (int g = 0; g < problem.n_parameters(); ++g) {
      const auto& rule = ShiftRule::for_gate(problem.layout.gates()[g].kind);
      auto tp = theta, tm = theta;
      tp[g] += h;
      tm[g] -= h;
      dev = std::max(dev, std::abs(shift_gradient(f, theta, g, rule) -
                                   (f(tp) - f(tm)) / (2 * h)));
    }
    checks.push_back({"shift_rule_vs_fd", dev, 1e-8});
  }
  {
    double dev = 0.0;
    const auto h_sub = subspace_hamiltonian(problem, solution.opt.theta);
    for (int s = 0; s < problem.n_states(); ++s) {
      const auto gs = entangled_reference(problem, solution.opt.theta, s);
      for (int t = s; t < problem.n_states(); ++t) {
        const auto gt = entangled_reference(problem, solution.opt.theta, t);
        dev = std::max(dev, std::abs(h_sub(s, t) -
                                     hamiltonian_matrix_element_direct(
                                         problem.ints, gs, gt)));
      }
    }
    checks.push_back({"subspace_interference_vs_direct", dev, 1e-12});
  }
  if (m <= 8 && SectorBasis::build(m, problem.sector).size() <= 2000) {
    const auto fci =
        fci_solve(problem.ints, problem.sector, problem.n_states());
    double bound_violation = 0.0;
    for (int s = 0; s < problem.n_states(); ++s) {
      bound_violation = std::max(
          bound_violation, fci.energies[s] - solution.subspace.energies(s));
    }
    checks.push_back({"variational_bound", std::max(bound_violation, 0.0),
                      1e-10});
  }
  if (problem.n_parameters() > 0) {
    const auto a = sa_hessian_exact(problem, solution.opt.theta);
    const auto b = state_gradient_rhs(problem, solution.opt.theta,
                                      solution.subspace.eigenvectors, 0);
    const auto precond = condition_preconditioner(a.diagonal());
    const auto diis = solve_response_diis(
        [&a](const Eigen::VectorXd& x) { return (a * x).eval(); }, b, precond,
        1e-13, 60);
    const auto pinv = pseudoinverse_solve(a, b);
    const double dev = diis.converged
                           ? inf_norm(diis.lambda - pinv)
                           : std::numeric_limits<double>::infinity();
    checks.push_back({"diis_vs_pseudoinverse", dev, 1e-11});

    const auto grad = compute_state_gradient(problem, solution, 0);
    checks.push_back({"response_density_trace",
                      std::abs(grad.response_density.opdm_trace()), 1e-10});
    checks.push_back(
        {"relaxed_trace_formula",
         std::abs(trace_formula_energy(problem.ints, grad.relaxed) -
                  solution.subspace.energies(0)),
         1e-9});
  }
  return checks;
}

}  // namespace

RunResult run(const RunConfig& config) {
  DocValue doc = DocValue::object();
  doc["schema_version"] = 1;
  doc["config"] = config_doc(config);

  try {
    config.validate();
    const auto data = load_fcidump(config.input);
    const int m = data.integrals.n_orbitals();

    auto problem =
        McVqeProblem::build(data.integrals, data.sector,
                            FabricLayout(m, config.n_layers), config.n_states,
                            config.weights);

    DocValue sector = DocValue::object();
    sector["n_orbitals"] = m;
    sector["n_alpha"] = problem.sector.n_alpha;
    sector["n_beta"] = problem.sector.n_beta;
    sector["spin_s"] = problem.sector.spin_s;
    doc["sector"] = std::move(sector);

    DocValue refs = DocValue::array();
    for (const auto& spec : problem.reference_specs) {
      refs.push_back(spec.to_string());
    }
    doc["references"] = std::move(refs);
    DocValue wts = DocValue::array();
    for (double w : problem.weights) wts.push_back(w);
    doc["normalized_weights"] = std::move(wts);

    const auto theta_init =
        initial_parameters(problem.layout, config.seed.value_or(0));
    doc["theta_init"] = vector_doc(theta_init);

    OptimizeOptions opt_options;
    opt_options.gtol = config.gtol;
    const auto solution = [&] {
      McVqeSolution s;
      s.opt = sa_vqe_optimize(problem, theta_init, opt_options);
      s.subspace =
          diagonalize_subspace(subspace_hamiltonian(problem, s.opt.theta));
      return s;
    }();

    bool all_converged = solution.opt.converged;

    DocValue opt = DocValue::object();
    opt["converged"] = solution.opt.converged;
    opt["iterations"] = solution.opt.iterations;
    opt["grad_norm"] = solution.opt.grad_norm;
    opt["energy_trace"] = vector_doc(solution.opt.energy_trace);
    opt["gnorm_trace"] = vector_doc(solution.opt.gnorm_trace);
    doc["optimizer"] = std::move(opt);
    doc["theta"] = vector_doc(
        Eigen::Map<const Eigen::VectorXd>(solution.opt.theta.data(),
                                          solution.opt.theta.size()));

    DocValue sub = DocValue::object();
    sub["hamiltonian"] = matrix_doc(solution.subspace.hamiltonian);
    sub["eigenvectors"] = matrix_doc(solution.subspace.eigenvectors);
    sub["energies"] = vector_doc(solution.subspace.energies);
    sub["min_gap"] = solution.subspace.min_gap;
    sub["conditioning_warning"] = solution.subspace.conditioning_warning;
    doc["subspace"] = std::move(sub);
    doc["energies"] = vector_doc(solution.subspace.energies);

    if (!all_converged) {
      // Mode-specific stages assume a stationary point; report and stop.
      doc["status"] = "not-converged";
      return {doc.serialize(2), 1};
    }

    if (config.mode == RunMode::Gradient) {
      DocValue states = DocValue::array();
      for (int s = 0; s < problem.n_states(); ++s) {
        const auto grad =
            compute_state_gradient(problem, solution, s,
                                   gradient_options(config));
        all_converged = all_converged && grad.response.converged;
        DocValue entry = DocValue::object();
        entry["state"] = s;
        entry["energy"] = solution.subspace.energies(s);
        entry["rhs"] = vector_doc(grad.rhs);
        entry["response"] = response_doc(grad.response);
        DocValue dens = DocValue::object();
        dens["unrelaxed"] = density_summary(grad.unrelaxed);
        dens["response"] = density_summary(grad.response_density);
        dens["relaxed"] = density_summary(grad.relaxed);
        entry["densities"] = std::move(dens);
        entry["gradient"] = gradient_doc(grad.record);
        states.push_back(std::move(entry));
      }
      doc["states"] = std::move(states);
    } else if (config.mode == RunMode::Validate) {
      const auto checks = run_validation(problem, solution, *config.seed);
      DocValue arr = DocValue::array();
      for (const auto& c : checks) {
        const bool pass = c.deviation <= c.tolerance;
        all_converged = all_converged && pass;
        DocValue entry = DocValue::object();
        entry["name"] = c.name;
        entry["max_deviation"] = c.deviation;
        entry["tolerance"] = c.tolerance;
        entry["pass"] = pass;
        arr.push_back(std::move(entry));
      }
      doc["checks"] = std::move(arr);
    } else if (config.mode == RunMode::FdSweep) {
      GradientOptions exact_options = gradient_options(config);
      exact_options.mode = HessianMode::Exact;
      const auto reference =
          compute_state_gradient(problem, solution, 0, exact_options);

      DocValue table = DocValue::array();
      for (const double delta : {0.05, 0.1, 0.2, 0.3}) {
        for (const int nfd : {2, 4, 6, 8, 10}) {
          GradientOptions fd_options = gradient_options(config);
          fd_options.mode = HessianMode::MatvecFd;
          fd_options.n_fd = nfd;
          fd_options.delta_fd = delta;
          const auto grad =
              compute_state_gradient(problem, solution, 0, fd_options);
          all_converged = all_converged && grad.response.converged;
          DocValue entry = DocValue::object();
          entry["n_fd"] = nfd;
          entry["delta_fd"] = delta;
          entry["grad_error_vs_exact"] =
              max_orbit_deviation(grad.record, reference.record);
          entry["lambda_error_vs_exact"] =
              inf_norm(grad.response.lambda - reference.response.lambda);
          entry["diis_iterations"] = grad.response.iterations;
          entry["converged"] = grad.response.converged;
          entry["residual_history"] = vector_doc(grad.response.residual_history);
          table.push_back(std::move(entry));
        }
      }
      doc["fd_sweep"] = std::move(table);
    }

    doc["status"] = all_converged ? "ok" : "not-converged";
    return {doc.serialize(2), all_converged ? 0 : 1};
  } catch (const std::exception& e) {
    DocValue err = DocValue::object();
    err["message"] = std::string(e.what());
    doc["error"] = std::move(err);
    doc["status"] = "error";
    return {doc.serialize(2), 1};
  }
}

}  // namespace mcvqe
