#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ieim/core.hpp"

namespace ieim {

/// Motion-mode settings for the non-modulated (shaken image) simulation.
struct MotionConfig {
  double frame_interval_s = 0.001;
  int amplitude_px = 1;
  int n_frames = 0;  // 0 means derived from the shake amplitude (one full period)
};

/// Parsed scenario JSON: field image path(s), modulation schedule,
/// photometric model, sensor configuration and tick resolution.
struct Scenario {
  std::vector<std::string> field_paths;
  ModulationSchedule schedule;
  PhotometricModel photometric;
  SensorConfig sensor;
  std::uint32_t tick_ns = 1000;
  MotionConfig motion;

  /// Parses the JSON document; relative field paths resolve against
  /// base_dir. Throws std::runtime_error with a descriptive message.
  static Scenario from_json_text(const std::string& text, const std::string& base_dir);

  /// Reads and parses a scenario file; checks referenced files exist.
  static Scenario load(const std::string& path);

  /// Loads the referenced PGM image(s) as a density field in [0, 1].
  FluoroField load_field() const;
};

}  // namespace ieim
