// kondo_lab: run one experiment and write its CSV/JSON files.
//
//   kondo_lab ehl --n 12 --j2 0 --jp 0.5 --out runs/ehl12
//   kondo_lab --config run.cfg --t-max 40
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <iostream>

#include "kondo/cli_io.hpp"

int main(int argc, char** argv) {
  kondo::RunConfig cfg;
  try {
    if (!kondo::parse_args(argc, argv, cfg)) return 0;
  } catch (const kondo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    for (const auto& f : kondo::run_experiment(cfg)) std::cout << f.string() << "\n";
  } catch (const kondo::ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const kondo::EvolutionError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
