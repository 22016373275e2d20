#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "mcvqe/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "MC-VQE energies and response-relaxed matrix-element gradients for "
      "active-space Hamiltonians"};

  mcvqe::RunConfig config;
  std::string mode = "energy";
  std::string weights_csv;
  long long seed = -1;

  app.set_config("--config", "", "Config file; command-line flags win");
  app.add_option("--input", config.input, "FCIDUMP input file")->required();
  app.add_option("--mode", mode, "energy | gradient | validate | fd-sweep")
      ->capture_default_str();
  app.add_option("--states", config.n_states, "Number of MC-VQE states")
      ->capture_default_str();
  app.add_option("--layers", config.n_layers, "Entangler double layers")
      ->capture_default_str();
  app.add_option("--weights", weights_csv,
                 "Comma-separated non-increasing state weights w0,w1,...");
  app.add_option("--seed", seed,
                 "Seed for the initial-parameter jitter (mandatory in "
                 "validate/fd-sweep modes)");
  app.add_option("--gtol", config.gtol, "SA-VQE gradient tolerance")
      ->capture_default_str();
  app.add_option("--resp-tol", config.response_tol,
                 "Response residual tolerance")
      ->capture_default_str();
  app.add_option("--hessian", config.hessian,
                 "Response solver: exact | matvec | matvec-fd")
      ->capture_default_str();
  app.add_option("--nfd", config.n_fd, "FD matvec stencil size (even, <= 10)")
      ->capture_default_str();
  app.add_option("--dfd", config.delta_fd, "FD matvec step size")
      ->capture_default_str();
  app.add_option("--out", config.output, "Output path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    config.mode = mcvqe::parse_run_mode(mode);
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    if (!weights_csv.empty()) {
      std::string token;
      std::istringstream is(weights_csv);
      while (std::getline(is, token, ',')) {
        config.weights.push_back(std::stod(token));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 1;
  }

  const auto result = mcvqe::run(config);
  if (config.output.empty() || config.output == "-") {
    std::cout << result.document;
  } else {
    std::ofstream out(config.output);
    if (!out) {
      std::cerr << "cannot write output file: " << config.output << "\n";
      return 1;
    }
    out << result.document;
  }
  return result.exit_code;
}
