#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mcvqe {

/// Ordered JSON-style document node. Serialization is deterministic: keys
/// keep insertion order and every float is written with 17 significant
/// digits, so identical runs produce byte-identical documents.
class DocValue {
 public:
  DocValue() = default;
  DocValue(bool b) : kind_(Kind::Bool), bool_(b) {}
  DocValue(int v) : kind_(Kind::Int), int_(v) {}
  DocValue(long long v) : kind_(Kind::Int), int_(v) {}
  DocValue(std::uint64_t v) : kind_(Kind::Int), int_(static_cast<long long>(v)) {}
  DocValue(double v) : kind_(Kind::Double), double_(v) {}
  DocValue(const char* s) : kind_(Kind::String), string_(s) {}
  DocValue(std::string s) : kind_(Kind::String), string_(std::move(s)) {}

  static DocValue array();
  static DocValue object();

  void push_back(DocValue v);
  DocValue& operator[](const std::string& key);

  bool is_object() const { return kind_ == Kind::Object; }
  bool is_array() const { return kind_ == Kind::Array; }

  std::string serialize(int indent = 0) const;

 private:
  enum class Kind { Null, Bool, Int, Double, String, Array, Object };
  Kind kind_ = Kind::Null;
  bool bool_ = false;
  long long int_ = 0;
  double double_ = 0.0;
  std::string string_;
  std::vector<DocValue> items_;
  std::vector<std::pair<std::string, DocValue>> fields_;

  void write(std::string& out, int indent, int depth) const;
};

enum class RunMode { Energy, Gradient, Validate, FdSweep };

RunMode parse_run_mode(const std::string& text);
std::string to_string(RunMode mode);

/// Batch-run configuration; mirrors the CLI flags one to one.
struct RunConfig {
  std::string input;
  RunMode mode = RunMode::Energy;
  int n_states = 1;
  int n_layers = 1;
  std::vector<double> weights;  // empty = uniform
  std::optional<std::uint64_t> seed;
  double gtol = 1e-8;
  double response_tol = 1e-9;
  std::string hessian = "exact";  // exact | matvec | matvec-fd
  int n_fd = 4;
  double delta_fd = 0.2;
  std::string output;  // empty = stdout

  void validate() const;
};

struct RunResult {
  std::string document;  // serialized result
  int exit_code = 0;
};

/// Executes one batch run: load integrals, run the requested pipeline, and
/// emit a schema-versioned structured document. Exit code 0 iff every
/// requested stage converged; module failures produce a structured error
/// record and exit code 1.
RunResult run(const RunConfig& config);

}  // namespace mcvqe
