#include "lyafun/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "lyafun/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace lyafun::io {

namespace {

std::string trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line, char delim)
{
  std::vector<std::string> out;
  if (delim == ' ') {
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
      out.push_back(tok);
    }
    return out;
  }
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, delim)) {
    out.push_back(trim(field));
  }
  return out;
}

char detect_delimiter(const std::string& header)
{
  if (header.find(',') != std::string::npos) {
    return ',';
  }
  if (header.find('\t') != std::string::npos) {
    return '\t';
  }
  return ' ';
}

double parse_number(const std::string& text, const fs::path& path, std::size_t row)
{
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << path.string() << ": row " << row << ": '" << text << "' is not a finite number";
    throw ValidationError(msg.str());
  }
  return value;
}

std::vector<SpectralSample> read_samples(const fs::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open " + path.string());
  }
  std::string line;
  std::size_t row = 0;
  std::string header;
  while (header.empty() && std::getline(in, line)) {
    ++row;
    header = trim(line);
    if (!header.empty() && header.front() == '#') {
      header.clear();
    }
  }
  if (header.empty()) {
    throw ValidationError(path.string() + ": empty file");
  }
  const char delim = detect_delimiter(header);
  const auto names = split_fields(header, delim);
  int col_w = -1;
  int col_f = -1;
  int col_s = -1;
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (names[c] == "wavelength") {
      col_w = static_cast<int>(c);
    } else if (names[c] == "flux") {
      col_f = static_cast<int>(c);
    } else if (names[c] == "noise_sd") {
      col_s = static_cast<int>(c);
    }
  }
  if (col_w < 0 || col_f < 0) {
    throw ValidationError(path.string() + ": header must name 'wavelength' and 'flux' columns");
  }

  std::vector<SpectralSample> samples;
  while (std::getline(in, line)) {
    ++row;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    const auto fields = split_fields(text, delim);
    if (fields.size() != names.size()) {
      std::ostringstream msg;
      msg << path.string() << ": row " << row << " has " << fields.size() << " fields; header has "
          << names.size();
      throw ValidationError(msg.str());
    }
    SpectralSample s;
    s.wavelength = parse_number(fields[static_cast<std::size_t>(col_w)], path, row);
    s.flux = parse_number(fields[static_cast<std::size_t>(col_f)], path, row);
    s.noise_sd = col_s >= 0 ? parse_number(fields[static_cast<std::size_t>(col_s)], path, row) : 0.0;
    samples.push_back(s);
  }
  return samples;
}

json grid_to_json(const WavelengthGrid& grid)
{
  return json(std::vector<double>(grid.points().begin(), grid.points().end()));
}

GridPtr grid_from_json(const json& doc)
{
  return std::make_shared<const WavelengthGrid>(doc.get<std::vector<double>>());
}

void check_schema(const json& doc, const char* kind)
{
  if (!doc.contains("schema_version") || doc.at("schema_version").get<int>() != schema_version) {
    throw ValidationError(std::string(kind) + ": unsupported or missing schema_version");
  }
}

std::string resolve_relative(const fs::path& base, const fs::path& p)
{
  if (p.is_relative()) {
    return (base / p).lexically_normal().string();
  }
  return p.string();
}

std::string make_relative(const fs::path& base, const fs::path& p)
{
  const auto rel = p.lexically_relative(base);
  if (!rel.empty() && rel.native().rfind("..", 0) != 0) {
    return rel.generic_string();
  }
  return p.generic_string();
}

} // namespace

std::string format_double(double value)
{
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) {
    throw NumericalError("cannot format number");
  }
  return std::string(buffer, ptr);
}

std::string read_file(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open " + path.string());
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file_atomic(const fs::path& path, std::string_view contents)
{
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw ValidationError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ValidationError("cannot write " + tmp.string());
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      throw ValidationError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw ValidationError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

RawSpectrum read_spectrum(const fs::path& path, double redshift)
{
  auto samples = read_samples(path);
  try {
    return RawSpectrum(std::move(samples), redshift);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string spectrum_to_text(const RawSpectrum& spectrum)
{
  std::string out = "wavelength,flux,noise_sd\n";
  for (const auto& s : spectrum.samples()) {
    out += format_double(s.wavelength) + ',' + format_double(s.flux) + ',' + format_double(s.noise_sd) + '\n';
  }
  return out;
}

void write_spectrum(const fs::path& path, const RawSpectrum& spectrum)
{
  write_file_atomic(path, spectrum_to_text(spectrum));
}

Curve read_curve(const fs::path& path)
{
  const auto samples = read_samples(path);
  std::vector<double> grid;
  std::vector<double> values;
  grid.reserve(samples.size());
  values.reserve(samples.size());
  for (const auto& s : samples) {
    grid.push_back(s.wavelength);
    values.push_back(s.flux);
  }
  try {
    return Curve(WavelengthGrid(std::move(grid)), std::move(values));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string curve_to_text(const Curve& curve)
{
  std::string out = "wavelength,flux\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out += format_double(curve.grid()[i]) + ',' + format_double(curve[i]) + '\n';
  }
  return out;
}

void write_curve(const fs::path& path, const Curve& curve)
{
  write_file_atomic(path, curve_to_text(curve));
}

SpectrumManifest read_manifest(const fs::path& path)
{
  const json doc = parse_json_file(path);
  check_schema(doc, path.string().c_str());
  const fs::path base = path.parent_path();
  SpectrumManifest out;
  try {
    for (const auto& item : doc.at("spectra")) {
      ManifestEntry e;
      e.id = item.at("id").get<std::string>();
      e.path = resolve_relative(base, item.at("path").get<std::string>());
      e.redshift = item.value("z", 0.0);
      if (item.contains("truth") && !item.at("truth").is_null()) {
        e.truth = resolve_relative(base, item.at("truth").get<std::string>());
      }
      e.predict_only = item.value("predict_only", false);
      out.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": malformed manifest: " + e.what());
  }
  return out;
}

void write_manifest(const fs::path& path, const SpectrumManifest& manifest)
{
  const fs::path base = path.parent_path();
  json spectra = json::array();
  for (const auto& e : manifest.entries) {
    json item = {{"id", e.id}, {"path", make_relative(base, e.path)}, {"z", e.redshift}};
    if (e.truth) {
      item["truth"] = make_relative(base, *e.truth);
    }
    if (e.predict_only) {
      item["predict_only"] = true;
    }
    spectra.push_back(std::move(item));
  }
  write_file_atomic(path, dump({{"schema_version", schema_version}, {"spectra", std::move(spectra)}}));
}

std::string dump(const json& doc)
{
  return doc.dump(2) + "\n";
}

json parse_json_file(const fs::path& path)
{
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
}

json curve_to_json(const Curve& curve)
{
  return json(std::vector<double>(curve.values().begin(), curve.values().end()));
}

Curve curve_from_json(const json& doc, const GridPtr& grid)
{
  return Curve(grid, doc.get<std::vector<double>>());
}

json regression_to_json(const FittedRegression& model)
{
  json predictors = json::array();
  json responses = json::array();
  for (const auto& p : model.pairs()) {
    predictors.push_back(curve_to_json(p.predictor()));
    responses.push_back(curve_to_json(p.response()));
  }
  return {
    {"schema_version", schema_version},
    {"kind", "functional_knn_regression"},
    {"kernel", "quadratic"},
    {"semimetric", model.semimetric().name()},
    {"kappa", model.kappa()},
    {"predictor_grid", grid_to_json(model.predictor_grid())},
    {"response_grid", grid_to_json(model.response_grid())},
    {"predictors", std::move(predictors)},
    {"responses", std::move(responses)},
  };
}

FittedRegression regression_from_json(const json& doc)
{
  check_schema(doc, "regression model");
  try {
    if (doc.at("kernel").get<std::string>() != "quadratic") {
      throw ValidationError("regression model: unsupported kernel");
    }
    const auto pgrid = grid_from_json(doc.at("predictor_grid"));
    const auto rgrid = grid_from_json(doc.at("response_grid"));
    const auto& xs = doc.at("predictors");
    const auto& ys = doc.at("responses");
    if (xs.size() != ys.size()) {
      throw ValidationError("regression model: predictor and response counts differ");
    }
    std::vector<CurvePair> pairs;
    pairs.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      pairs.emplace_back(curve_from_json(xs[i], pgrid), curve_from_json(ys[i], rgrid));
    }
    return FittedRegression(std::move(pairs), SemimetricSpec::parse(doc.at("semimetric").get<std::string>()),
                            doc.at("kappa").get<std::size_t>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("regression model: malformed: ") + e.what());
  }
}

json band_to_json(const ConformalBand& band)
{
  json doc = {
    {"schema_version", schema_version},
    {"kind", "conformal_band"},
    {"alpha", band.alpha},
    {"degenerate", band.degenerate},
    {"half_width", band.degenerate ? json(nullptr) : json(band.half_width)},
    {"grid", grid_to_json(band.center.grid())},
    {"center", curve_to_json(band.center)},
  };
  if (!band.degenerate) {
    doc["lower"] = curve_to_json(band.lower());
    doc["upper"] = curve_to_json(band.upper());
  }
  return doc;
}

ConformalBand band_from_json(const json& doc)
{
  check_schema(doc, "conformal band");
  try {
    const auto grid = grid_from_json(doc.at("grid"));
    ConformalBand band{curve_from_json(doc.at("center"), grid), 0.0, doc.at("alpha").get<double>(),
                       doc.at("degenerate").get<bool>()};
    band.half_width = band.degenerate ? std::numeric_limits<double>::infinity()
                                      : doc.at("half_width").get<double>();
    return band;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("conformal band: malformed: ") + e.what());
  }
}

json bootstrap_band_to_json(const BootstrapBand& band, const FpcaModel& fpca)
{
  json intervals = json::array();
  for (const auto& iv : band.intervals) {
    intervals.push_back({{"lower", iv.lower}, {"upper", iv.upper}});
  }
  json components = json::array();
  for (std::size_t j = 0; j < band.intervals.size(); ++j) {
    components.push_back(curve_to_json(fpca.components()[j]));
  }
  return {
    {"schema_version", schema_version},
    {"kind", "wild_bootstrap_band"},
    {"alpha", band.alpha},
    {"replicates", band.replicates},
    {"components", band.intervals.size()},
    {"grid", grid_to_json(band.center.grid())},
    {"center", curve_to_json(band.center)},
    {"lower", curve_to_json(band.lower)},
    {"upper", curve_to_json(band.upper)},
    {"intervals", std::move(intervals)},
    {"point_coefficients", band.point_coefficients},
    {"fpca_mean", curve_to_json(fpca.mean())},
    {"fpca_components", std::move(components)},
    {"fpca_eigenvalues", std::vector<double>(fpca.eigenvalues().begin(),
                                             fpca.eigenvalues().begin() +
                                               static_cast<std::ptrdiff_t>(band.intervals.size()))},
  };
}

std::string scree_to_text(const FpcaModel& fpca)
{
  const auto cumulative = explained_variance(fpca);
  std::string out = "index,eigenvalue,cumulative_fraction\n";
  for (std::size_t j = 0; j < fpca.size(); ++j) {
    out += std::to_string(j + 1) + ',' + format_double(fpca.eigenvalues()[j]) + ',' +
           format_double(cumulative[j]) + '\n';
  }
  return out;
}

std::string summary_to_text(const ErrorSummary& summary)
{
  std::string out = "wavelength,mean,median,q1,q3,ci_lo,ci_hi\n";
  for (std::size_t k = 0; k < summary.mean.size(); ++k) {
    out += format_double(summary.grid()[k]) + ',' + format_double(summary.mean[k]) + ',' +
           format_double(summary.median[k]) + ',' + format_double(summary.q1[k]) + ',' +
           format_double(summary.q3[k]) + ',' + format_double(summary.ci_lower[k]) + ',' +
           format_double(summary.ci_upper[k]) + '\n';
  }
  return out;
}

} // namespace lyafun::io
