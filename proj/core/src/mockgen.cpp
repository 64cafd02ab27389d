#include "lyafun/mockgen.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "lyafun/error.hpp"
#include "lyafun/io.hpp"
#include "lyafun/random.hpp"

namespace fs = std::filesystem;

namespace lyafun {

namespace {

struct EmissionLine {
  double center;
  double amplitude;
  double width;
};

// Broad lines of a quasar template; amplitudes relative to the power law.
constexpr EmissionLine template_lines[] = {
  {1034.0, 0.30, 8.0},  {1085.0, 0.05, 6.0},  {1176.0, 0.04, 6.0},  {1216.0, 3.00, 12.0}, {1240.0, 0.60, 8.0},
  {1304.0, 0.10, 6.0},  {1335.0, 0.08, 6.0},  {1400.0, 0.25, 14.0}, {1549.0, 1.20, 14.0},
};

double template_value(double wavelength, double normalization)
{
  double bumps = 1.0;
  for (const auto& line : template_lines) {
    const double u = (wavelength - line.center) / line.width;
    bumps += line.amplitude * std::exp(-0.5 * u * u);
  }
  return std::pow(wavelength / normalization, -1.0) * bumps;
}

std::vector<double> scaled(std::span<const double> v, double s)
{
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) {
    x *= s;
  }
  return out;
}

double weighted_dot(std::span<const double> w, const std::vector<double>& a, const std::vector<double>& b)
{
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sum += w[i] * a[i] * b[i];
  }
  return sum;
}

std::vector<double> read_eigenvalues(const fs::path& path)
{
  // Header line, then rows of index,eigenvalue.
  std::istringstream in(io::read_file(path));
  std::string line;
  std::size_t row = 0;
  std::vector<double> out;
  bool header = true;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    if (header) {
      header = false;
      continue;
    }
    std::istringstream fields(line);
    std::string index_text;
    std::string value_text;
    if (!std::getline(fields, index_text, ',') || !std::getline(fields, value_text)) {
      std::ostringstream msg;
      msg << path.string() << ": row " << row << ": expected 'index,eigenvalue'";
      throw ValidationError(msg.str());
    }
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(value_text, &used);
      if (value_text.find_first_not_of(" \t\r", used) != std::string::npos) {
        throw std::invalid_argument("trailing text");
      }
    } catch (const std::exception&) {
      std::ostringstream msg;
      msg << path.string() << ": row " << row << ": '" << value_text << "' is not a number";
      throw ValidationError(msg.str());
    }
    if (!std::isfinite(value) || value < 0.0) {
      std::ostringstream msg;
      msg << path.string() << ": row " << row << ": eigenvalue must be finite and non-negative";
      throw ValidationError(msg.str());
    }
    out.push_back(value);
  }
  return out;
}

} // namespace

void MockModel::validate() const
{
  if (xi.empty()) {
    throw ValidationError("mock model needs at least one eigenspectrum");
  }
  if (eigenvalues.size() != xi.size()) {
    std::ostringstream msg;
    msg << "mock model has " << xi.size() << " eigenspectra but " << eigenvalues.size() << " eigenvalues";
    throw ValidationError(msg.str());
  }
  for (std::size_t j = 0; j < xi.size(); ++j) {
    require_same_grid(mu, xi[j], "mock model eigenspectrum");
    if (!(eigenvalues[j] >= 0.0)) {
      throw ValidationError("mock model eigenvalues must be non-negative");
    }
  }
  require_same_grid(mu, sigma, "mock model sigma");
  for (double s : sigma.values()) {
    if (s < 0.0) {
      throw ValidationError("mock model sigma must be non-negative");
    }
  }
}

std::vector<MockRealization> generate(const MockModel& model, std::size_t count, std::uint64_t seed)
{
  if (count == 0) {
    throw ValidationError("mock count must be at least 1");
  }
  model.validate();
  const std::size_t p = model.grid().size();
  const std::size_t n_comp = model.size();
  std::vector<MockRealization> out;
  out.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    Rng rng(derive_seed(seed, r));
    std::vector<double> omega(n_comp);
    for (std::size_t j = 0; j < n_comp; ++j) {
      omega[j] = std::sqrt(model.eigenvalues[j]) * rng.normal();
    }
    std::vector<double> truth(model.mu.values().begin(), model.mu.values().end());
    for (std::size_t j = 0; j < n_comp; ++j) {
      for (std::size_t k = 0; k < p; ++k) {
        truth[k] += omega[j] * model.xi[j][k];
      }
    }
    std::vector<SpectralSample> samples(p);
    for (std::size_t k = 0; k < p; ++k) {
      const double sd = model.sigma[k];
      samples[k] = {model.grid()[k], truth[k] + sd * rng.normal(), sd};
    }
    out.push_back({RawSpectrum(std::move(samples)), Curve(model.mu.grid_ptr(), std::move(truth)), std::move(omega)});
  }
  return out;
}

MockModel synthetic_model(const WavelengthGrid& grid, const SyntheticModelConfig& config)
{
  if (config.components == 0) {
    throw ValidationError("synthetic model needs at least one component");
  }
  if (!(config.eigenvalue_decay > 0.0) || !(config.leading_eigenvalue > 0.0)) {
    throw ValidationError("eigenvalue decay and leading eigenvalue must be positive");
  }
  if (!(config.noise_level >= 0.0)) {
    throw ValidationError("noise level must be non-negative");
  }
  if (config.components > grid.size()) {
    std::ostringstream msg;
    msg << config.components << " components exceed the rank of a " << grid.size() << "-point grid";
    throw ValidationError(msg.str());
  }

  const auto shared = std::make_shared<const WavelengthGrid>(grid);
  const std::size_t p = grid.size();
  const double lo = grid.front();
  const double width = grid.back() - lo;

  std::vector<double> mu(p);
  for (std::size_t k = 0; k < p; ++k) {
    mu[k] = template_value(grid[k], config.normalization_wavelength);
  }
  const double norm = mu[grid.nearest_index(config.normalization_wavelength)];
  mu = scaled(mu, 1.0 / norm);

  // Eigenspectra of normalized spectra vanish where the spectra are pinned to 1.
  const double pivot = grid[grid.nearest_index(config.normalization_wavelength)];
  Rng rng(config.seed);
  const auto w = grid.trapezoid_weights();
  std::vector<std::vector<double>> basis;
  for (std::size_t j = 0; j < config.components; ++j) {
    const double phase = std::numbers::pi * rng.uniform();
    std::vector<double> v(p);
    for (std::size_t k = 0; k < p; ++k) {
      const double s = (grid[k] - lo) / width;
      v[k] = (1.0 - 0.3 * s) * ((grid[k] - pivot) / width) *
             std::cos(std::numbers::pi * static_cast<double>(j) * s + phase);
    }
    const double original = std::sqrt(weighted_dot(w, v, v));
    // Two passes of modified Gram-Schmidt keep orthogonality near machine precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const double c = weighted_dot(w, v, b);
        for (std::size_t k = 0; k < p; ++k) {
          v[k] -= c * b[k];
        }
      }
    }
    const double length = std::sqrt(weighted_dot(w, v, v));
    if (!(length > 1e-10 * original)) {
      std::ostringstream msg;
      msg << "component " << j + 1 << " is not orthonormalizable on this grid";
      throw NumericalError(msg.str());
    }
    basis.push_back(scaled(v, 1.0 / length));
  }

  MockModel model{Curve(shared, std::move(mu)), {}, {}, Curve::constant(shared, 0.0)};
  for (std::size_t j = 0; j < config.components; ++j) {
    model.xi.emplace_back(shared, std::move(basis[j]));
    model.eigenvalues.push_back(config.leading_eigenvalue * std::pow(config.eigenvalue_decay, static_cast<double>(j)));
  }
  std::vector<double> sigma(p);
  for (std::size_t k = 0; k < p; ++k) {
    const double s = (grid[k] - lo) / width;
    sigma[k] = config.noise_level * (1.0 + 3.0 * std::pow(std::abs(2.0 * s - 1.0), 4));
  }
  model.sigma = Curve(shared, std::move(sigma));
  return model;
}

double cumulative_eigenvalue_fraction(const std::vector<double>& eigenvalues, std::size_t k)
{
  if (k > eigenvalues.size()) {
    throw ValidationError("cumulative fraction beyond the number of eigenvalues");
  }
  double total = 0.0;
  double head = 0.0;
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    total += eigenvalues[j];
    if (j < k) {
      head += eigenvalues[j];
    }
  }
  if (!(total > 0.0)) {
    throw NumericalError("eigenvalues sum to zero");
  }
  return head / total;
}

void save_mock_model(const MockModel& model, const fs::path& directory)
{
  model.validate();
  nlohmann::json xi = nlohmann::json::array();
  for (std::size_t j = 0; j < model.size(); ++j) {
    std::ostringstream name;
    name << "xi_" << (j + 1 < 10 ? "0" : "") << j + 1 << ".csv";
    io::write_curve(directory / name.str(), model.xi[j]);
    xi.push_back(name.str());
  }
  std::string eig = "index,eigenvalue\n";
  for (std::size_t j = 0; j < model.size(); ++j) {
    eig += std::to_string(j + 1) + ',' + io::format_double(model.eigenvalues[j]) + '\n';
  }
  io::write_curve(directory / "mu.csv", model.mu);
  io::write_curve(directory / "sigma.csv", model.sigma);
  io::write_file_atomic(directory / "eigenvalues.csv", eig);
  const nlohmann::json manifest = {
    {"schema_version", io::schema_version},
    {"kind", "mock_model"},
    {"mu", "mu.csv"},
    {"xi", std::move(xi)},
    {"eigenvalues", "eigenvalues.csv"},
    {"sigma", "sigma.csv"},
  };
  io::write_file_atomic(directory / "manifest.json", io::dump(manifest));
}

MockModel load_mock_model(const fs::path& manifest)
{
  const auto doc = io::parse_json_file(manifest);
  const fs::path base = manifest.parent_path();
  auto resolve = [&](const nlohmann::json& entry) {
    const fs::path p = entry.get<std::string>();
    return p.is_relative() ? base / p : p;
  };
  try {
    Curve mu = io::read_curve(resolve(doc.at("mu")));
    const GridPtr grid = mu.grid_ptr();
    MockModel model{mu, {}, {}, resample(io::read_curve(resolve(doc.at("sigma"))), grid)};
    for (const auto& entry : doc.at("xi")) {
      model.xi.push_back(resample(io::read_curve(resolve(entry)), grid));
    }
    const fs::path eig_path = resolve(doc.at("eigenvalues"));
    model.eigenvalues = read_eigenvalues(eig_path);
    if (model.eigenvalues.size() != model.xi.size()) {
      std::ostringstream msg;
      msg << eig_path.string() << ": " << model.eigenvalues.size() << " eigenvalue rows for " << model.xi.size()
          << " eigenspectra";
      throw ValidationError(msg.str());
    }
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(manifest.string() + ": malformed mock model manifest: " + e.what());
  }
}

} // namespace lyafun
