#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "revanneal/errors.hpp"
#include "revanneal/harness/run.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace revanneal;
  CLI::App app{"Reverse and iterated quantum annealing of the p-spin model"};
  harness::RunRequest req;
  std::string out;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  std::string experiment;

  std::string names;
  for (const auto& e : harness::experiments()) names += (names.empty() ? "" : ", ") + e.name;
  app.add_option("experiment", experiment, "one of: " + names)->required();
  app.add_option("--config", req.config_path, "flat JSON config file");
  app.add_option("--set", req.overrides, "override a config key, key=value (repeatable)");
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--workers", workers, "worker threads")->default_val(1);
  app.add_option("--seed", seed, "random seed")->default_val(0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  req.experiment = experiment;
  req.out_dir = out;
  req.context = {workers, seed};

  try {
    harness::run(req);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kOk;
}
