#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <lyafun/error.hpp>
#include <lyafun/fpca.hpp>
#include <lyafun/io.hpp>
#include <lyafun/random.hpp>
#include <lyafun/wild_bootstrap.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace lyafun::pipeline {

namespace {

WavelengthRange range_from_json(const json& value, const std::string& key)
{
  if (!value.is_array() || value.size() != 2) {
    throw ValidationError("config key '" + key + "' must be a [lo, hi] pair");
  }
  return {value[0].get<double>(), value[1].get<double>()};
}

void check_range(WavelengthRange r, const char* what)
{
  if (!(r.lo > 0.0 && r.hi > r.lo) || !std::isfinite(r.hi)) {
    throw ValidationError(std::string(what) + " must satisfy 0 < lo < hi");
  }
}

std::string entry_label(const io::ManifestEntry& entry)
{
  return "spectrum '" + entry.id + "' (" + entry.path.string() + ")";
}

std::string require_path(const std::string& value, const char* key)
{
  if (value.empty()) {
    throw ValidationError(std::string("missing --") + key);
  }
  return value;
}

std::string safe_id(const std::string& id)
{
  std::string out = id;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    if (!ok) {
      c = '_';
    }
  }
  return out;
}

std::string padded(std::size_t value, std::size_t width)
{
  std::string s = std::to_string(value);
  return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

//! The preprocessing settings stored alongside a fitted model, so later
//! commands smooth new spectra exactly as the training spectra were.
json preprocessing_to_json(const PipelineConfig& c)
{
  return {
    {"predictor_range", {c.predictor_range.lo, c.predictor_range.hi}},
    {"response_range", {c.response_range.lo, c.response_range.hi}},
    {"predictor_grid_size", c.predictor_grid_size},
    {"response_grid_size", c.response_grid_size},
    {"normalization_wavelength", c.normalization_wavelength},
    {"span", c.span},
    {"span_candidates", c.span_candidates},
  };
}

struct LoadedModel {
  FittedRegression regression;
  PipelineConfig config;
};

LoadedModel load_model(const PipelineConfig& config)
{
  const fs::path path = require_path(config.model, "model");
  const json doc = io::parse_json_file(path);
  PipelineConfig merged = config;
  try {
    const json& pre = doc.at("preprocessing");
    json patch = merged.to_json();
    for (const auto& [key, value] : pre.items()) {
      patch[key] = value;
    }
    merged = PipelineConfig::from_json(patch);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": malformed preprocessing block: " + e.what());
  }
  auto regression = io::regression_from_json(doc);
  if (!(regression.predictor_grid() == *merged.predictor_grid()) ||
      !(regression.response_grid() == *merged.response_grid())) {
    throw ValidationError(path.string() + ": stored grids disagree with the preprocessing block");
  }
  return {std::move(regression), std::move(merged)};
}

Curve observed(const Curve& normalized, double scale)
{
  return scale * normalized;
}

json band_document(const ConformalBand& band, const std::string& id, double scale, const Curve& prediction)
{
  json doc = io::band_to_json(band);
  doc["id"] = id;
  doc["normalization_scale"] = scale;
  doc["prediction"] = io::curve_to_json(prediction);
  return doc;
}

void write_evaluation(const fs::path& out, const Evaluation& ev, std::ostream& log)
{
  io::write_file_atomic(out / "summary_relative_error.csv", io::summary_to_text(ev.relative));
  io::write_file_atomic(out / "summary_plain_error.csv", io::summary_to_text(ev.plain));
  io::write_file_atomic(out / "evaluation.json", io::dump(evaluation_to_json(ev)));
  log << "evaluated " << ev.count << " spectra: mean relative error " << ev.relative.overall_mean << " (q1 "
      << ev.relative.overall_q1 << ", q3 " << ev.relative.overall_q3 << "), band coverage " << ev.coverage
      << ", zero inside the mean-error CI at " << ev.zero_in_ci_fraction << " of the grid\n";
}

Curve load_truth(const io::ManifestEntry& entry, const GridPtr& grid)
{
  try {
    return resample(io::read_curve(*entry.truth), grid);
  } catch (const ValidationError& e) {
    throw ValidationError(entry_label(entry) + ": truth: " + e.what());
  }
}

} // namespace

void PipelineConfig::validate() const
{
  check_range(predictor_range, "predictor_range");
  check_range(response_range, "response_range");
  if (!(response_range.hi < predictor_range.lo)) {
    throw ValidationError("response_range must end below the start of predictor_range");
  }
  if (predictor_grid_size < 4 || response_grid_size < 2) {
    throw ValidationError("grid sizes must be at least 4 (predictor) and 2 (response)");
  }
  if (!predictor_range.contains(normalization_wavelength)) {
    throw ValidationError("normalization_wavelength must lie inside predictor_range");
  }
  (void)semimetric_spec();
  if (kappa_candidates.empty() && kappa == 0) {
    throw ValidationError("kappa_candidates must not be empty when kappa is selected by cross-validation");
  }
  for (auto k : kappa_candidates) {
    if (k == 0) {
      throw ValidationError("kappa candidates must be positive");
    }
  }
  if (!(span >= 0.0 && span <= 1.0)) {
    throw ValidationError("span must lie in (0, 1], or be 0 for cross-validation");
  }
  smoother().validate();
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("alpha must lie in (0, 1)");
  }
  if (count == 0) {
    throw ValidationError("count must be at least 1");
  }
  check_range(mock_range, "mock_range");
  if (!(mock_step > 0.0) || mock_step > mock_range.length()) {
    throw ValidationError("mock_step must be positive and no longer than mock_range");
  }
}

PipelineConfig PipelineConfig::from_json(const json& doc)
{
  if (!doc.is_object()) {
    throw ValidationError("config must be a JSON object");
  }
  PipelineConfig c;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "schema_version") {
        if (value.get<int>() != io::schema_version) {
          throw ValidationError("unsupported config schema_version");
        }
      } else if (key == "predictor_range") {
        c.predictor_range = range_from_json(value, key);
      } else if (key == "response_range") {
        c.response_range = range_from_json(value, key);
      } else if (key == "predictor_grid_size") {
        c.predictor_grid_size = value.get<std::size_t>();
      } else if (key == "response_grid_size") {
        c.response_grid_size = value.get<std::size_t>();
      } else if (key == "normalization_wavelength") {
        c.normalization_wavelength = value.get<double>();
      } else if (key == "semimetric") {
        c.semimetric = value.get<std::string>();
      } else if (key == "kappa") {
        c.kappa = value.get<std::size_t>();
      } else if (key == "kappa_candidates") {
        c.kappa_candidates = value.get<std::vector<std::size_t>>();
      } else if (key == "span") {
        c.span = value.get<double>();
      } else if (key == "span_candidates") {
        c.span_candidates = value.get<std::vector<double>>();
      } else if (key == "alpha") {
        c.alpha = value.get<double>();
      } else if (key == "replicates") {
        c.replicates = value.get<std::size_t>();
      } else if (key == "components") {
        c.components = value.get<std::size_t>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "count") {
        c.count = value.get<std::size_t>();
      } else if (key == "mock_components") {
        c.mock_components = value.get<std::size_t>();
      } else if (key == "eigenvalue_decay") {
        c.eigenvalue_decay = value.get<double>();
      } else if (key == "leading_eigenvalue") {
        c.leading_eigenvalue = value.get<double>();
      } else if (key == "noise_level") {
        c.noise_level = value.get<double>();
      } else if (key == "model_seed") {
        c.model_seed = value.get<std::uint64_t>();
      } else if (key == "mock_range") {
        c.mock_range = range_from_json(value, key);
      } else if (key == "mock_step") {
        c.mock_step = value.get<double>();
      } else if (key == "mock_model") {
        c.mock_model = value.get<std::string>();
      } else if (key == "out") {
        c.out = value.get<std::string>();
      } else if (key == "manifest") {
        c.manifest = value.get<std::string>();
      } else if (key == "model") {
        c.model = value.get<std::string>();
      } else if (key == "spectrum") {
        c.spectrum = value.get<std::string>();
      } else if (key == "predictions") {
        c.predictions = value.get<std::string>();
      } else if (key == "redshift") {
        c.redshift = value.get<double>();
      } else {
        throw ValidationError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: wrong value type: ") + e.what());
  }
  return c;
}

json PipelineConfig::to_json() const
{
  json doc = preprocessing_to_json(*this);
  doc["schema_version"] = io::schema_version;
  doc["semimetric"] = semimetric;
  doc["kappa"] = kappa;
  doc["kappa_candidates"] = kappa_candidates;
  doc["alpha"] = alpha;
  doc["replicates"] = replicates;
  doc["components"] = components;
  doc["seed"] = seed;
  doc["count"] = count;
  doc["mock_components"] = mock_components;
  doc["eigenvalue_decay"] = eigenvalue_decay;
  doc["leading_eigenvalue"] = leading_eigenvalue;
  doc["noise_level"] = noise_level;
  doc["model_seed"] = model_seed;
  doc["mock_range"] = {mock_range.lo, mock_range.hi};
  doc["mock_step"] = mock_step;
  doc["mock_model"] = mock_model;
  doc["out"] = out;
  doc["manifest"] = manifest;
  doc["model"] = model;
  doc["spectrum"] = spectrum;
  doc["predictions"] = predictions;
  doc["redshift"] = redshift;
  return doc;
}

GridPtr PipelineConfig::predictor_grid() const
{
  return std::make_shared<const WavelengthGrid>(
    WavelengthGrid::uniform(predictor_range.lo, predictor_range.hi, predictor_grid_size));
}

GridPtr PipelineConfig::response_grid() const
{
  return std::make_shared<const WavelengthGrid>(
    WavelengthGrid::uniform(response_range.lo, response_range.hi, response_grid_size));
}

WavelengthGrid PipelineConfig::mock_grid() const
{
  const auto steps = static_cast<std::size_t>(std::llround(mock_range.length() / mock_step));
  return WavelengthGrid::uniform(mock_range.lo, mock_range.lo + static_cast<double>(steps) * mock_step, steps + 1);
}

SemimetricSpec PipelineConfig::semimetric_spec() const
{
  return SemimetricSpec::parse(semimetric);
}

SmootherConfig PipelineConfig::smoother() const
{
  SmootherConfig s;
  if (span > 0.0) {
    s.span = span;
  }
  s.candidate_spans = span_candidates;
  return s;
}

SyntheticModelConfig PipelineConfig::synthetic() const
{
  SyntheticModelConfig s;
  s.components = mock_components;
  s.eigenvalue_decay = eigenvalue_decay;
  s.leading_eigenvalue = leading_eigenvalue;
  s.noise_level = noise_level;
  s.normalization_wavelength = normalization_wavelength;
  s.seed = model_seed;
  return s;
}

PreparedSpectrum prepare(const RawSpectrum& spectrum, const PipelineConfig& config, bool with_response)
{
  const RawSpectrum rest = to_rest_frame(spectrum);
  SmootherConfig smoother = config.smoother();

  auto smooth_segment = [&](WavelengthRange range, const GridPtr& grid, double& chosen) {
    if (config.span > 0.0) {
      chosen = config.span;
    } else {
      chosen = select_span_cv(rest, range, smoother).span;
    }
    smoother.span = chosen;
    return smooth(rest, range, smoother, grid);
  };

  PreparedSpectrum out{Curve::constant(config.predictor_grid(), 0.0), std::nullopt, 1.0, 0.0, 0.0};
  const Curve predictor = smooth_segment(config.predictor_range, config.predictor_grid(), out.predictor_span);
  out.scale = normalization_factor(predictor, config.normalization_wavelength);
  out.predictor = (1.0 / out.scale) * predictor;
  if (with_response) {
    const Curve response = smooth_segment(config.response_range, config.response_grid(), out.response_span);
    out.response = (1.0 / out.scale) * response;
  }
  return out;
}

FitOutcome fit_pairs(std::vector<CurvePair> pairs, const PipelineConfig& config)
{
  const std::size_t n = pairs.size();
  if (n < 3) {
    std::ostringstream msg;
    msg << "fitting needs at least 3 usable spectra; got " << n;
    throw ValidationError(msg.str());
  }
  const auto semimetric = config.semimetric_spec();
  if (config.kappa > 0) {
    return {FittedRegression(std::move(pairs), semimetric, config.kappa), std::nullopt};
  }
  std::vector<std::size_t> candidates;
  for (auto k : config.kappa_candidates) {
    if (k <= n - 1) {
      candidates.push_back(k);
    }
  }
  if (candidates.empty()) {
    std::ostringstream msg;
    msg << "no kappa candidate is below the " << n << " training spectra";
    throw ValidationError(msg.str());
  }
  auto selection = select_kappa_cv(pairs, semimetric, {}, std::move(candidates));
  const std::size_t kappa = selection.kappa;
  return {FittedRegression(std::move(pairs), semimetric, kappa), std::move(selection)};
}

ConformalCalibration calibrate_model(const FittedRegression& model, const PipelineConfig& config)
{
  std::vector<std::size_t> candidates =
    config.kappa > 0 ? std::vector<std::size_t>{config.kappa} : config.kappa_candidates;
  return calibrate(model.pairs(), config.alpha, model.semimetric(), model.kernel(), std::move(candidates),
                   derive_seed(config.seed, split_stream));
}

Evaluation evaluate(const std::vector<EvaluationItem>& items)
{
  if (items.size() < 2) {
    throw ValidationError("evaluation needs at least 2 spectra with known continua");
  }
  std::vector<Curve> relative;
  std::vector<Curve> plain;
  std::vector<ConformalBand> bands;
  std::vector<Curve> truths;
  for (const auto& item : items) {
    relative.push_back(relative_error(item.prediction, item.truth));
    plain.push_back(plain_error(item.prediction, item.truth));
    bands.push_back(item.band);
    truths.push_back((1.0 / item.scale) * item.truth);
  }
  Evaluation ev{summarize(relative), summarize(plain), coverage_rate(bands, truths), 0.0, items.size()};
  std::size_t zero_inside = 0;
  for (std::size_t k = 0; k < ev.plain.mean.size(); ++k) {
    if (ev.plain.ci_lower[k] <= 0.0 && ev.plain.ci_upper[k] >= 0.0) {
      ++zero_inside;
    }
  }
  ev.zero_in_ci_fraction = static_cast<double>(zero_inside) / static_cast<double>(ev.plain.mean.size());
  return ev;
}

json evaluation_to_json(const Evaluation& ev)
{
  return {
    {"schema_version", io::schema_version},
    {"kind", "evaluation"},
    {"count", ev.count},
    {"mean_relative_error", ev.relative.overall_mean},
    {"mean_relative_error_q1", ev.relative.overall_q1},
    {"mean_relative_error_q3", ev.relative.overall_q3},
    {"mean_plain_error", ev.plain.overall_mean},
    {"band_coverage", ev.coverage},
    {"zero_in_ci_fraction", ev.zero_in_ci_fraction},
  };
}

void run_mockgen(const PipelineConfig& config, std::ostream& log)
{
  config.validate();
  const fs::path out = config.out;
  MockModel model = config.mock_model.empty() ? synthetic_model(config.mock_grid(), config.synthetic())
                                              : load_mock_model(config.mock_model);
  save_mock_model(model, out / "model");
  const auto mocks = generate(model, config.count, config.seed);
  const std::size_t width = std::max<std::size_t>(4, std::to_string(config.count).size());
  io::SpectrumManifest manifest;
  for (std::size_t r = 0; r < mocks.size(); ++r) {
    const std::string id = "mock_" + padded(r + 1, width);
    const fs::path spectrum = out / "spectra" / (id + ".csv");
    const fs::path truth = out / "truths" / (id + ".csv");
    io::write_spectrum(spectrum, mocks[r].noisy);
    io::write_curve(truth, mocks[r].true_continuum);
    manifest.entries.push_back({id, spectrum, 0.0, truth, false});
  }
  io::write_manifest(out / "manifest.json", manifest);
  log << "wrote " << mocks.size() << " mock spectra to " << out.string() << "\n";
}

void run_fit(const PipelineConfig& config, std::ostream& log)
{
  config.validate();
  const fs::path manifest_path = require_path(config.manifest, "manifest");
  const auto manifest = io::read_manifest(manifest_path);
  std::vector<CurvePair> pairs;
  json spans = json::array();
  for (const auto& entry : manifest.entries) {
    if (entry.predict_only) {
      throw ValidationError(entry_label(entry) + " is flagged predict_only and cannot be used for fitting");
    }
    const RawSpectrum raw = io::read_spectrum(entry.path, entry.redshift);
    const RawSpectrum rest = to_rest_frame(raw);
    if (rest.count_in(config.response_range) < 3 * (SmootherConfig::degree + 1)) {
      throw ValidationError(entry_label(entry) + " does not cover the response range; flag it predict_only");
    }
    PreparedSpectrum prepared = [&] {
      try {
        return prepare(raw, config, true);
      } catch (const ValidationError& e) {
        throw ValidationError(entry_label(entry) + ": " + e.what());
      } catch (const NumericalError& e) {
        throw NumericalError(entry_label(entry) + ": " + e.what());
      }
    }();
    spans.push_back({{"id", entry.id},
                     {"predictor_span", prepared.predictor_span},
                     {"response_span", prepared.response_span},
                     {"scale", prepared.scale}});
    pairs.emplace_back(std::move(prepared.predictor), std::move(*prepared.response));
  }

  auto outcome = fit_pairs(std::move(pairs), config);
  json doc = io::regression_to_json(outcome.model);
  doc["preprocessing"] = preprocessing_to_json(config);
  json report = {{"schema_version", io::schema_version},
                 {"kind", "fit_report"},
                 {"kappa", outcome.model.kappa()},
                 {"spectra", std::move(spans)}};
  log << "selected kappa " << outcome.model.kappa() << "\n";
  if (outcome.selection) {
    json table = json::array();
    log << "kappa,loo_score\n";
    for (std::size_t c = 0; c < outcome.selection->candidates.size(); ++c) {
      table.push_back({{"kappa", outcome.selection->candidates[c]}, {"score", outcome.selection->scores[c]}});
      log << outcome.selection->candidates[c] << ',' << outcome.selection->scores[c] << "\n";
    }
    report["cv"] = table;
    doc["cv"] = std::move(table);
  }
  const fs::path out = config.out;
  io::write_file_atomic(out / "model.json", io::dump(doc));
  io::write_file_atomic(out / "fit_report.json", io::dump(report));
  log << "wrote " << (out / "model.json").string() << "\n";
}

void run_predict(const PipelineConfig& config, std::ostream& log)
{
  config.validate();
  const auto loaded = load_model(config);
  const PipelineConfig& cfg = loaded.config;
  const auto manifest = io::read_manifest(require_path(cfg.manifest, "manifest"));
  const auto calibration = calibrate_model(loaded.regression, cfg);
  const fs::path out = cfg.out;
  const GridPtr response_grid = loaded.regression.response_grid_ptr();

  std::vector<EvaluationItem> items;
  bool warned = false;
  for (const auto& entry : manifest.entries) {
    const RawSpectrum raw = io::read_spectrum(entry.path, entry.redshift);
    PreparedSpectrum prepared = [&] {
      try {
        return prepare(raw, cfg, false);
      } catch (const ValidationError& e) {
        throw ValidationError(entry_label(entry) + ": " + e.what());
      }
    }();
    const Curve x(loaded.regression.predictor_grid(), {prepared.predictor.values().begin(),
                                                       prepared.predictor.values().end()});
    const Curve prediction = loaded.regression.predict(x);
    const ConformalBand b = band(calibration, x);
    if (b.degenerate && !warned) {
      std::ostringstream msg;
      msg << "warning: alpha " << cfg.alpha << " is too small for " << calibration.calibration_size()
          << " calibration spectra; bands are unbounded\n";
      log << msg.str();
      warned = true;
    }
    const std::string name = safe_id(entry.id);
    io::write_curve(out / "predictions" / (name + ".csv"), observed(prediction, prepared.scale));
    io::write_file_atomic(out / "bands" / (name + ".json"),
                          io::dump(band_document(b, entry.id, prepared.scale, prediction)));
    if (entry.truth) {
      items.push_back({observed(prediction, prepared.scale), load_truth(entry, response_grid), b, prepared.scale});
    }
  }
  log << "predicted " << manifest.entries.size() << " spectra (fit " << calibration.fit_size() << ", calibration "
      << calibration.calibration_size() << ", half-width " << calibration.half_width(cfg.alpha) << ")\n";
  if (!items.empty()) {
    write_evaluation(out, evaluate(items), log);
  }
}

void run_bootstrap(const PipelineConfig& config, std::ostream& log)
{
  config.validate();
  const auto loaded = load_model(config);
  const PipelineConfig& cfg = loaded.config;
  const auto& regression = loaded.regression;
  const RawSpectrum raw = io::read_spectrum(require_path(cfg.spectrum, "spectrum"), cfg.redshift);
  const PreparedSpectrum prepared = prepare(raw, cfg, false);
  const Curve x(regression.predictor_grid(), {prepared.predictor.values().begin(), prepared.predictor.values().end()});

  WildBootstrapConfig boot{cfg.replicates, cfg.components, cfg.alpha, derive_seed(cfg.seed, bootstrap_stream)};
  boot.validate();
  std::vector<Curve> responses;
  for (const auto& p : regression.pairs()) {
    responses.push_back(p.response());
  }
  const std::size_t available = std::min(responses.size(), regression.response_grid().size());
  if (cfg.components > available) {
    std::ostringstream msg;
    msg << cfg.components << " components requested; at most " << available << " are available";
    throw ValidationError(msg.str());
  }
  // keep a few extra components for the scree output
  const auto fpca = fit_fpca(responses, std::min(available, std::max<std::size_t>(cfg.components, 10)));
  const auto result = bootstrap_bands(regression.pairs(), regression, x, fpca, boot);

  json doc = io::bootstrap_band_to_json(result, fpca);
  doc["normalization_scale"] = prepared.scale;
  doc["seed"] = cfg.seed;
  const fs::path out = cfg.out;
  io::write_file_atomic(out / "bootstrap_band.json", io::dump(doc));
  io::write_file_atomic(out / "scree.csv", io::scree_to_text(fpca));
  log << "bootstrap band from " << result.replicates << " replicates on " << result.intervals.size()
      << " components; explained variance " << explained_variance(fpca)[cfg.components - 1] << "\n";
}

void run_eval(const PipelineConfig& config, std::ostream& log)
{
  config.validate();
  const auto manifest = io::read_manifest(require_path(config.manifest, "manifest"));
  const fs::path predictions = require_path(config.predictions, "predictions");
  std::vector<EvaluationItem> items;
  for (const auto& entry : manifest.entries) {
    if (!entry.truth) {
      continue;
    }
    const std::string name = safe_id(entry.id);
    const Curve prediction = io::read_curve(predictions / "predictions" / (name + ".csv"));
    const json doc = io::parse_json_file(predictions / "bands" / (name + ".json"));
    const ConformalBand b = io::band_from_json(doc);
    const double scale = doc.at("normalization_scale").get<double>();
    const Curve truth = load_truth(entry, prediction.grid_ptr());
    items.push_back({prediction, truth, b, scale});
  }
  write_evaluation(config.out, evaluate(items), log);
}

} // namespace lyafun::pipeline
