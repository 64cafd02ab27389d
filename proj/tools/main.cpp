// lyafun: continuum prediction for quasar spectra.
//
//   lyafun mockgen   --out mocks/train --seed 7
//   lyafun fit       --manifest mocks/train/manifest.json --out run
//   lyafun predict   --model run/model.json --manifest mocks/test/manifest.json --out run/test
//   lyafun bootstrap --model run/model.json --spectrum quasar.csv --out run/boot
//   lyafun eval      --manifest mocks/test/manifest.json --predictions run/test --out run/eval
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <lyafun/error.hpp>
#include <lyafun/io.hpp>

#include "pipeline.hpp"

using nlohmann::json;
using namespace lyafun;

namespace {

constexpr int exit_validation = 2;
constexpr int exit_numerical = 3;

// Registers every config key as a flag on `cmd`; values set on the command
// line are collected in `overrides`.
void add_config_flags(CLI::App* cmd, json& overrides, std::string& config_path)
{
  cmd->add_option("--config", config_path, "JSON config file");

  auto number = [&](const char* flag, const char* key, const char* help) {
    cmd->add_option_function<double>(flag, [&overrides, key](double v) { overrides[key] = v; }, help);
  };
  auto count = [&](const char* flag, const char* key, const char* help) {
    cmd->add_option_function<std::uint64_t>(flag, [&overrides, key](std::uint64_t v) { overrides[key] = v; }, help);
  };
  auto text = [&](const char* flag, const char* key, const char* help) {
    cmd->add_option_function<std::string>(flag, [&overrides, key](const std::string& v) { overrides[key] = v; },
                                          help);
  };
  auto range = [&](const char* flag, const char* key, const char* help) {
    cmd->add_option_function<std::vector<double>>(
         flag, [&overrides, key](const std::vector<double>& v) { overrides[key] = v; }, help)
      ->expected(2);
  };

  count("--seed", "seed", "Root random seed");
  number("--alpha", "alpha", "Miscoverage level");
  count("--kappa", "kappa", "Neighbor count (0: leave-one-out selection)");
  cmd->add_option_function<std::vector<std::uint64_t>>(
    "--kappa-candidates", [&overrides](const std::vector<std::uint64_t>& v) { overrides["kappa_candidates"] = v; },
    "Neighbor counts tried by leave-one-out");
  text("--semimetric", "semimetric", "l2, deriv1 or deriv2");
  number("--span", "span", "Smoother span (0: two-fold cross-validation)");
  cmd->add_option_function<std::vector<double>>(
    "--span-candidates", [&overrides](const std::vector<double>& v) { overrides["span_candidates"] = v; },
    "Spans tried by cross-validation");
  text("--out", "out", "Output directory");

  range("--predictor-range", "predictor_range", "Predictor wavelengths lo hi (rest frame)");
  range("--response-range", "response_range", "Response wavelengths lo hi (rest frame)");
  count("--predictor-grid-size", "predictor_grid_size", "Points of the predictor grid");
  count("--response-grid-size", "response_grid_size", "Points of the response grid");
  number("--normalization-wavelength", "normalization_wavelength", "Wavelength where spectra are scaled to 1");

  count("--replicates", "replicates", "Bootstrap replicates");
  count("--components", "components", "Principal components for bootstrap bands");

  count("--count", "count", "Number of mock spectra");
  count("--mock-components", "mock_components", "Eigenspectra of the synthetic model");
  number("--eigenvalue-decay", "eigenvalue_decay", "Ratio of consecutive synthetic eigenvalues");
  number("--leading-eigenvalue", "leading_eigenvalue", "Largest synthetic eigenvalue");
  number("--noise-level", "noise_level", "Baseline mock noise sd");
  count("--model-seed", "model_seed", "Seed of the synthetic eigenspectra");
  range("--mock-range", "mock_range", "Mock wavelength range lo hi");
  number("--mock-step", "mock_step", "Mock wavelength step");
  text("--mock-model", "mock_model", "Manifest of an external mock model");

  text("--manifest", "manifest", "Spectrum manifest");
  text("--model", "model", "Fitted model file");
  text("--spectrum", "spectrum", "Single spectrum file");
  number("--redshift", "redshift", "Redshift of --spectrum");
  text("--predictions", "predictions", "Output directory of a predict run");
}

pipeline::PipelineConfig load_config(const std::string& path, const json& overrides)
{
  json doc = path.empty() ? json::object() : io::parse_json_file(path);
  if (!doc.is_object()) {
    throw ValidationError(path + ": config must be a JSON object");
  }
  for (const auto& [key, value] : overrides.items()) {
    doc[key] = value;
  }
  return pipeline::PipelineConfig::from_json(doc);
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Continuum prediction with functional kNN regression and prediction bands"};
  app.require_subcommand(1);

  using Runner = std::function<void(const pipeline::PipelineConfig&, std::ostream&)>;
  struct Command {
    const char* name;
    const char* help;
    Runner run;
  };
  const std::vector<Command> commands = {
    {"mockgen", "Generate mock spectra, their true continua and a manifest", pipeline::run_mockgen},
    {"fit", "Smooth training spectra, select kappa and save the model", pipeline::run_fit},
    {"predict", "Predict continua with conformal bands; evaluate when truths are listed", pipeline::run_predict},
    {"bootstrap", "Wild-bootstrap confidence band for one spectrum", pipeline::run_bootstrap},
    {"eval", "Evaluate saved predictions against known continua", pipeline::run_eval},
  };

  std::vector<json> overrides(commands.size(), json::object());
  std::vector<std::string> config_paths(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    subs.push_back(app.add_subcommand(commands[c].name, commands[c].help));
    add_config_flags(subs.back(), overrides[c], config_paths[c]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_validation;
  }

  for (std::size_t c = 0; c < commands.size(); ++c) {
    if (!subs[c]->parsed()) {
      continue;
    }
    try {
      commands[c].run(load_config(config_paths[c], overrides[c]), std::cout);
      return 0;
    } catch (const ValidationError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return exit_validation;
    } catch (const NumericalError& e) {
      std::cerr << "numerical failure: " << e.what() << "\n";
      return exit_numerical;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}
