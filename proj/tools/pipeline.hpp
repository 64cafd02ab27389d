#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <lyafun/conformal.hpp>
#include <lyafun/curves.hpp>
#include <lyafun/evaluation.hpp>
#include <lyafun/funreg.hpp>
#include <lyafun/mockgen.hpp>
#include <lyafun/smoothing.hpp>

namespace lyafun::pipeline {

//! Settings shared by every command. Config-file keys and command-line flags
//! carry the same names (flags use dashes).
struct PipelineConfig {
  WavelengthRange predictor_range{1300.0, 1600.0};
  WavelengthRange response_range{1050.0, 1185.0};
  std::size_t predictor_grid_size = 300;
  std::size_t response_grid_size = 200;
  double normalization_wavelength = 1300.0;

  std::string semimetric = "l2";
  //! 0 selects kappa by leave-one-out over kappa_candidates.
  std::size_t kappa = 0;
  std::vector<std::size_t> kappa_candidates = {2, 4, 8, 16, 32};
  //! 0 selects the span of every segment by two-fold cross-validation.
  double span = 0.0;
  std::vector<double> span_candidates = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  double alpha = 0.1;
  std::size_t replicates = 500;
  std::size_t components = 5;
  std::uint64_t seed = 0;

  std::size_t count = 100;
  std::size_t mock_components = 10;
  double eigenvalue_decay = 0.5;
  double leading_eigenvalue = 5.0;
  double noise_level = 0.05;
  std::uint64_t model_seed = 0;
  WavelengthRange mock_range{1050.0, 1600.0};
  double mock_step = 1.0;
  std::string mock_model;

  std::string out = "out";
  std::string manifest;
  std::string model;
  std::string spectrum;
  std::string predictions;
  double redshift = 0.0;

  void validate() const;

  //! Starts from the defaults; unknown keys are rejected.
  static PipelineConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  GridPtr predictor_grid() const;
  GridPtr response_grid() const;
  WavelengthGrid mock_grid() const;
  SemimetricSpec semimetric_spec() const;
  SmootherConfig smoother() const;
  SyntheticModelConfig synthetic() const;
};

//! Seed streams derived from the root seed.
inline constexpr std::uint64_t split_stream = 1;
inline constexpr std::uint64_t bootstrap_stream = 2;

//! A spectrum smoothed onto the analysis grids and divided by `scale`, the
//! smoothed predictor flux at the normalization wavelength.
struct PreparedSpectrum {
  Curve predictor;
  std::optional<Curve> response;
  double scale = 1.0;
  double predictor_span = 0.0;
  double response_span = 0.0;
};

PreparedSpectrum prepare(const RawSpectrum& spectrum, const PipelineConfig& config, bool with_response);

struct FitOutcome {
  FittedRegression model;
  std::optional<KappaSelection> selection;
};

FitOutcome fit_pairs(std::vector<CurvePair> pairs, const PipelineConfig& config);

//! Split-conformal calibration on the pairs stored in `model`.
ConformalCalibration calibrate_model(const FittedRegression& model, const PipelineConfig& config);

//! Pointwise error curves and coverage of a set of predictions against known
//! continua, all in observed flux units except the bands (normalized units).
struct Evaluation {
  ErrorSummary relative;
  ErrorSummary plain;
  double coverage = 0.0;
  //! Share of grid points whose 95% interval for the mean plain error holds 0.
  double zero_in_ci_fraction = 0.0;
  std::size_t count = 0;
};

struct EvaluationItem {
  Curve prediction;
  Curve truth;
  ConformalBand band;
  double scale = 1.0;
};

Evaluation evaluate(const std::vector<EvaluationItem>& items);

nlohmann::json evaluation_to_json(const Evaluation& evaluation);

void run_mockgen(const PipelineConfig& config, std::ostream& log);
void run_fit(const PipelineConfig& config, std::ostream& log);
void run_predict(const PipelineConfig& config, std::ostream& log);
void run_bootstrap(const PipelineConfig& config, std::ostream& log);
void run_eval(const PipelineConfig& config, std::ostream& log);

} // namespace lyafun::pipeline
