#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "marcuslab/config.hpp"
#include "marcuslab/fastslow.hpp"
#include "marcuslab/intermittent_maps.hpp"
#include "marcuslab/stable_levy.hpp"
#include "marcuslab/vector_field.hpp"

namespace marcuslab {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Philox stream purposes (see substream()).
enum Purpose : std::uint64_t {
  kSampling = 0,
  kCalibration = 1,
  kInvariantStats = 2,
  kLevy = 3,
  kAuxiliary = 4,
};

const std::vector<std::string>& experiment_kinds();
const std::vector<std::string>& suite_names();

struct ManifestEntry {
  std::string file;
  std::int64_t rows = 0;
  std::string sha256;
};

struct RunManifest {
  std::string experiment;
  std::string config_digest;
  std::string version = kArtifactVersion;
  double wall_clock_seconds = 0.0;
  std::vector<ManifestEntry> files;
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();

  nlohmann::ordered_json to_json() const;
};

/// Runs `experiment` (one of experiment_kinds()) with the given config and
/// writes its outputs plus manifest.json below cfg["out"]. Identical
/// config and seed give byte-identical data files.
/// Throws ConfigError on unknown names or bad ranges, UnknownSuite for validate.
RunManifest run(const std::string& experiment, const Config& cfg);

/// Runs one acceptance suite and returns its report
///   {suite, seed, pass, criteria: [{id, name, gating, pass, numbers, threshold}]}.
/// Throws UnknownSuite.
nlohmann::ordered_json run_suite(const std::string& suite, const Config& cfg);

// Building blocks shared by experiments and suites.

IntermittentMap map_from(const Config& cfg);
VectorField field_from(const Config& cfg);

/// Centering from observable.centering when present, otherwise a calibration
/// orbit of observable.calibration iterates.
Observable observable_from(const Config& cfg, const IntermittentMap& map);

struct LimitSetup {
  IntermittentMap map;
  Observable observable;
  InvariantStats stats;
  LimitLaw limit;
};

/// Observable plus empirical h and tau_bar (stats.h_orbit iterates) and the
/// resulting limit law.
LimitSetup limit_setup(const Config& cfg);

/// Spectral measure parsed from "s_1 ... s_d w; s_1 ... s_d w; ...".
SpectralMeasure parse_spectral_measure(const std::string& text);

/// Circle-ramp driver: 0 on [0, 1/2], linear to theta on [1/2, 1/2 + 1/n],
/// sampled at `substeps` equal steps along the ramp, theta afterwards.
CadlagPath ramp_driver(double theta, std::int64_t n, int substeps);

}  // namespace marcuslab
