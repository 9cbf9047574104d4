#include "ieim/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ieim/codec.hpp"

namespace ieim {

namespace fs = std::filesystem;
using nlohmann::json;

Scenario Scenario::from_json_text(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario: ") + e.what());
  }

  Scenario sc;
  if (!j.contains("field")) throw std::runtime_error("scenario: missing \"field\"");
  auto resolve = [&base_dir](const std::string& p) {
    fs::path fp(p);
    return fp.is_absolute() || base_dir.empty() ? fp.string() : (fs::path(base_dir) / fp).string();
  };
  if (j["field"].is_string()) {
    sc.field_paths.push_back(resolve(j["field"].get<std::string>()));
  } else if (j["field"].is_array()) {
    for (const auto& p : j["field"]) sc.field_paths.push_back(resolve(p.get<std::string>()));
  } else {
    throw std::runtime_error("scenario: \"field\" must be a path or list of paths");
  }
  if (sc.field_paths.empty()) throw std::runtime_error("scenario: no field paths");

  const json& sch = j.at("schedule");
  sc.schedule.period_s = sch.at("period_s").get<double>();
  sc.schedule.duty = sch.value("duty", 0.5);
  sc.schedule.amplitude = sch.at("amplitude").get<double>();
  sc.schedule.cycles = sch.value("cycles", 1);
  // Default ramps take a tenth of the on phase each.
  const double default_ramp = 0.1 * sc.schedule.duty * sc.schedule.period_s;
  sc.schedule.rise_s = sch.value("rise_s", default_ramp);
  sc.schedule.fall_s = sch.value("fall_s", default_ramp);

  const json& ph = j.at("photometric");
  sc.photometric.gain_k = ph.at("K").get<double>();
  sc.photometric.c_thr = ph.at("c_thr").get<double>();

  if (j.contains("sensor")) {
    const json& se = j["sensor"];
    sc.sensor.refractory_ticks = se.value("refractory_ticks", std::int64_t{1});
    sc.sensor.threshold_sigma = se.value("threshold_sigma", 0.0);
    sc.sensor.noise_rate_hz = se.value("noise_rate_hz", 0.0);
    sc.sensor.rng_seed = se.value("seed", std::uint64_t{0});
  }

  sc.tick_ns = j.value("tick_ns", 1000u);

  if (j.contains("motion")) {
    const json& mo = j["motion"];
    sc.motion.frame_interval_s = mo.value("frame_interval_s", 0.001);
    sc.motion.amplitude_px = mo.value("amplitude_px", 1);
    sc.motion.n_frames = mo.value("n_frames", 0);
  }
  return sc;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("scenario not found: " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Scenario sc = from_json_text(text, fs::path(path).parent_path().string());
  for (const std::string& p : sc.field_paths)
    if (!fs::exists(p)) throw std::runtime_error("field not found: " + p);
  return sc;
}

FluoroField Scenario::load_field() const {
  FluoroField field;
  for (const std::string& p : field_paths) {
    Grid g = load_density_pgm(p);
    if (field.frames.empty()) {
      field.width = g.width;
      field.height = g.height;
    } else if (g.width != field.width || g.height != field.height) {
      throw std::runtime_error("field frames have differing dimensions: " + p);
    }
    field.frames.push_back(std::move(g));
  }
  return field;
}

}  // namespace ieim
