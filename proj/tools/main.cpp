#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "runner.hpp"

namespace {

constexpr const char* kUsage =
    "usage: sgchurn <command> [options]\n"
    "  run            run the experiment matrix and write reports\n"
    "  analyze        print the analytical chain as JSON\n"
    "  predict-bench  predictor error table without search workload\n"
    "Use `sgchurn <command> --help` for the options of a command.\n";

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << kUsage;
    return 2;
  }
  const std::string command = argv[1];
  const std::vector<std::string> args(argv + 2, argv + argc);
  try {
    if (command == "run") return sgchurn::cli::main_run(args);
    if (command == "analyze") return sgchurn::cli::main_analyze(args);
    if (command == "predict-bench") return sgchurn::cli::main_predict_bench(args);
    if (command == "-h" || command == "--help" || command == "help") {
      std::cout << kUsage;
      return 0;
    }
    std::cerr << "sgchurn: unknown command '" << command << "'\n" << kUsage;
    return 2;
  } catch (const CLI::CallForHelp&) {
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "sgchurn: " << e.what() << '\n';
    return 1;
  }
}
