#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lyafun/conformal.hpp"
#include "lyafun/curves.hpp"
#include "lyafun/evaluation.hpp"
#include "lyafun/fpca.hpp"
#include "lyafun/funreg.hpp"
#include "lyafun/wild_bootstrap.hpp"

namespace lyafun::io {

//! Version stamped into every structured output file.
inline constexpr int schema_version = 1;

//! Shortest decimal text that parses back to the same double.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);
//! Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

//! Delimited text with a header naming `wavelength`, `flux` and optionally
//! `noise_sd` (default 0). Comma, tab or whitespace delimiters.
RawSpectrum read_spectrum(const std::filesystem::path& path, double redshift = 0.0);
std::string spectrum_to_text(const RawSpectrum& spectrum);
void write_spectrum(const std::filesystem::path& path, const RawSpectrum& spectrum);

//! A curve stored in the spectrum format (flux column holds the values).
Curve read_curve(const std::filesystem::path& path);
std::string curve_to_text(const Curve& curve);
void write_curve(const std::filesystem::path& path, const Curve& curve);

struct ManifestEntry {
  std::string id;
  std::filesystem::path path;
  double redshift = 0.0;
  //! Known continuum for evaluation (mocks).
  std::optional<std::filesystem::path> truth;
  //! Spectrum may lack the response range; usable for prediction only.
  bool predict_only = false;
};

//! Sidecar listing of spectrum files. Relative paths are resolved against the
//! manifest's directory when read.
struct SpectrumManifest {
  std::vector<ManifestEntry> entries;
};

SpectrumManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const SpectrumManifest& manifest);

std::string dump(const nlohmann::json& doc);
nlohmann::json parse_json_file(const std::filesystem::path& path);

nlohmann::json curve_to_json(const Curve& curve);
Curve curve_from_json(const nlohmann::json& doc, const GridPtr& grid);

nlohmann::json regression_to_json(const FittedRegression& model);
FittedRegression regression_from_json(const nlohmann::json& doc);

nlohmann::json band_to_json(const ConformalBand& band);
ConformalBand band_from_json(const nlohmann::json& doc);

nlohmann::json bootstrap_band_to_json(const BootstrapBand& band, const FpcaModel& fpca);

//! Rows of (index, eigenvalue, cumulative fraction).
std::string scree_to_text(const FpcaModel& fpca);

//! Rows of (wavelength, mean, median, q1, q3, ci_lo, ci_hi).
std::string summary_to_text(const ErrorSummary& summary);

} // namespace lyafun::io
