// Command-line front end: scenario simulation, reconstruction, evaluation,
// stream inspection and benchmarking.
//
// Exit codes: 0 success, 1 warning (high-intensity regime flagged),
// 2 usage or data error.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ieim/codec.hpp"
#include "ieim/core.hpp"
#include "ieim/errors.hpp"
#include "ieim/metrics.hpp"
#include "ieim/reconstruct.hpp"
#include "ieim/scenario.hpp"
#include "ieim/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ieim;

namespace {

double wall_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json scenario_parameters(const Scenario& sc) {
  return json{
      {"schedule",
       {{"period_s", sc.schedule.period_s},
        {"duty", sc.schedule.duty},
        {"amplitude", sc.schedule.amplitude},
        {"rise_s", sc.schedule.rise_s},
        {"fall_s", sc.schedule.fall_s},
        {"cycles", sc.schedule.cycles}}},
      {"photometric", {{"K", sc.photometric.gain_k}, {"c_thr", sc.photometric.c_thr}}},
      {"sensor",
       {{"refractory_ticks", sc.sensor.refractory_ticks},
        {"threshold_sigma", sc.sensor.threshold_sigma},
        {"noise_rate_hz", sc.sensor.noise_rate_hz},
        {"seed", sc.sensor.rng_seed}}},
      {"tick_ns", sc.tick_ns}};
}

std::vector<Grid> motion_frames(const Scenario& sc, const FluoroField& field) {
  const int n = sc.motion.n_frames > 0 ? sc.motion.n_frames : 4 * sc.motion.amplitude_px + 1;
  return shake_sequence(field.frames.front(), sc.motion.amplitude_px, n);
}

int cmd_simulate(const std::string& scenario_path, const std::string& mode,
                 const std::string& out_path) {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario sc = Scenario::load(scenario_path);
  FluoroField field = sc.load_field();

  EventStream stream;
  double duration_s = 0;
  if (mode == "pulse") {
    stream = simulate_pulse_stream(field, sc.schedule, sc.photometric, sc.sensor, sc.tick_ns);
    duration_s = sc.schedule.total_seconds();
  } else if (mode == "motion") {
    const auto frames = motion_frames(sc, field);
    stream = simulate_motion_stream(frames, sc.motion.frame_interval_s, sc.photometric,
                                    sc.sensor, sc.tick_ns);
    duration_s = (frames.size() - 1) * sc.motion.frame_interval_s;
  } else {
    std::cerr << "unknown mode: " << mode << "\n";
    return 2;
  }

  write_file(out_path, encode_events(stream));

  json manifest = {{"mode", mode},
                   {"width", stream.width},
                   {"height", stream.height},
                   {"tick_ns", stream.tick_ns},
                   {"event_count", stream.events.size()},
                   {"duration_s", duration_s},
                   {"cycles", sc.schedule.cycles},
                   {"wall_time_s", wall_seconds(t0)},
                   {"parameters", scenario_parameters(sc)}};
  write_file(out_path + ".manifest.json", manifest.dump(2) + "\n");

  std::cout << "wrote " << out_path << " (" << stream.events.size() << " events, "
            << duration_s << " s)\n";
  return 0;
}

std::string frame_name(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04zu.pgm", prefix, i);
  return buf;
}

json regime_to_json(const RegimeReport& regime) {
  json r = {{"ratio_mean", regime.ratio_mean}, {"flagged", regime.flagged}};
  if (std::isfinite(regime.ratio_cv))
    r["ratio_cv"] = regime.ratio_cv;
  else
    r["ratio_cv"] = nullptr;
  return r;
}

int cmd_reconstruct(const std::string& stream_path, const std::string& scenario_path,
                    const std::string& method, const std::string& estimator_name,
                    bool normalize, double guard, int min_events, double frame_interval,
                    const std::string& out_dir) {
  Scenario sc = Scenario::load(scenario_path);
  EventStream stream = decode_events(read_file(stream_path));
  if (auto violations = validate_stream(stream); !violations.empty())
    throw ValidationError(std::move(violations));

  ReconResult res;
  RegimeReport regime;
  if (method == "iei") {
    IeiOptions opts;
    opts.guard = guard;
    opts.min_events = min_events;
    if (estimator_name == "first-pair")
      opts.estimator = IeiEstimator::FirstPair;
    else if (estimator_name == "median-interval")
      opts.estimator = IeiEstimator::MedianInterval;
    else {
      std::cerr << "unknown estimator: " << estimator_name << "\n";
      return 2;
    }
    res = reconstruct_iei(stream, sc.schedule, sc.photometric, opts);
    regime = regime_check(stream, sc.schedule);
  } else if (method == "integrate") {
    const double interval =
        frame_interval > 0 ? frame_interval : sc.schedule.period_s;
    res = reconstruct_integration(stream, interval, sc.photometric.c_thr);
    regime = regime_check(stream, sc.schedule);
  } else {
    std::cerr << "unknown method: " << method << "\n";
    return 2;
  }

  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < res.frames.frames.size(); ++i) {
    Grid frame = res.frames.frames[i];
    if (normalize) {
      double maxv = 0;
      for (double v : frame.data) maxv = std::max(maxv, v);
      if (maxv > 0)
        for (double& v : frame.data) v /= maxv;
    }
    store_density_pgm(frame, (fs::path(out_dir) / frame_name("frame", i)).string());

    Grid conf(res.frames.width, res.frames.height);
    for (std::size_t k = 0; k < conf.size(); ++k)
      conf.data[k] = res.frames.confidence[i][k];
    write_file((fs::path(out_dir) / frame_name("conf", i)).string(), write_pgm(conf, 255));
  }

  json report = {{"cycles", res.frames.frames.size()},
                 {"measured_px", res.measured_px},
                 {"single_event_px", res.single_event_px},
                 {"empty_px", res.empty_px},
                 {"trailing_events_ignored", res.trailing_events_ignored},
                 {"regime", regime_to_json(regime)}};
  write_file((fs::path(out_dir) / "report.json").string(), report.dump(2) + "\n");

  std::cout << "wrote " << res.frames.frames.size() << " frames to " << out_dir << "\n";
  if (regime.flagged) {
    std::cerr << "warning: event pattern matches the high-intensity regime; "
                 "interval estimates may not track density\n";
    return 1;
  }
  return 0;
}

Grid normalized_by_max(Grid g) {
  double maxv = 0;
  for (double v : g.data) maxv = std::max(maxv, v);
  if (maxv > 0)
    for (double& v : g.data) v /= maxv;
  return g;
}

int cmd_metrics(const std::string& recon_dir, const std::vector<std::string>& truth_paths,
                const std::string& out_path, const std::string& manifest_path) {
  std::vector<std::string> frame_files;
  for (const auto& entry : fs::directory_iterator(recon_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("frame_", 0) == 0 && entry.path().extension() == ".pgm")
      frame_files.push_back(entry.path().string());
  }
  std::sort(frame_files.begin(), frame_files.end());
  if (frame_files.empty()) {
    std::cerr << "no frame_*.pgm in " << recon_dir << "\n";
    return 2;
  }
  if (truth_paths.size() != 1 && truth_paths.size() != frame_files.size()) {
    std::cerr << "need 1 truth image or one per frame (" << frame_files.size() << ")\n";
    return 2;
  }

  std::vector<Grid> truths;
  for (const std::string& p : truth_paths) truths.push_back(normalized_by_max(load_density_pgm(p)));

  json frames_json = json::array();
  double mse_sum = 0, ssim_sum = 0, dr_sum = 0;
  std::size_t dr_count = 0;
  for (std::size_t i = 0; i < frame_files.size(); ++i) {
    Grid recon_raw = load_density_pgm(frame_files[i]);
    Grid recon = normalized_by_max(recon_raw);
    const Grid& truth = truths.size() == 1 ? truths[0] : truths[i];
    if (recon.width != truth.width || recon.height != truth.height) {
      std::cerr << "shape mismatch: " << frame_files[i] << "\n";
      return 2;
    }
    const double m = mse(recon, truth);
    const double s = ssim(recon, truth);

    json rec = {{"frame", i}, {"mse", m}, {"ssim", s}};
    const std::string conf_path =
        (fs::path(recon_dir) / frame_name("conf", i)).string();
    std::optional<double> dr;
    if (fs::exists(conf_path)) {
      Grid conf = read_pgm(read_file(conf_path));
      std::vector<std::uint8_t> flags(conf.size());
      for (std::size_t k = 0; k < conf.size(); ++k)
        flags[k] = static_cast<std::uint8_t>(conf.data[k]);
      dr = dynamic_range_db(recon_raw, flags);
    } else {
      std::vector<std::uint8_t> flags(recon_raw.size());
      for (std::size_t k = 0; k < recon_raw.size(); ++k)
        flags[k] = static_cast<std::uint8_t>(recon_raw.data[k] > 0 ? Confidence::Measured
                                                                   : Confidence::Empty);
      dr = dynamic_range_db(recon_raw, flags);
    }
    if (dr) {
      rec["dynamic_range_db"] = *dr;
      dr_sum += *dr;
      ++dr_count;
    } else {
      rec["dynamic_range_db"] = nullptr;
    }
    frames_json.push_back(rec);
    mse_sum += m;
    ssim_sum += s;
  }

  json aggregate = {{"mse", mse_sum / frame_files.size()},
                    {"ssim", ssim_sum / frame_files.size()}};
  if (dr_count > 0)
    aggregate["dynamic_range_db"] = dr_sum / static_cast<double>(dr_count);
  else
    aggregate["dynamic_range_db"] = nullptr;

  if (!manifest_path.empty()) {
    std::ifstream mf(manifest_path);
    if (!mf) {
      std::cerr << "manifest not found: " << manifest_path << "\n";
      return 2;
    }
    json manifest = json::parse(mf);
    EventStream pseudo;
    pseudo.events.resize(manifest.value("event_count", std::size_t{0}));
    const double duration = manifest.value("duration_s", 0.0);
    FrameEquivalent fe{manifest.value("width", 0), manifest.value("height", 0), 16,
                       duration > 0 ? manifest.value("cycles", 1) / duration : 0.0};
    if (duration > 0) {
      BandwidthReport bw = stream_stats(pseudo, duration, fe);
      aggregate["events_per_s"] = bw.events_per_s;
      aggregate["bytes_per_s"] = bw.bytes_per_s;
      aggregate["frame_equiv_bytes_per_s"] = bw.frame_equiv_bytes_per_s;
      aggregate["ratio"] = bw.ratio;
    }
  }

  json report = {{"frames", frames_json}, {"aggregate", aggregate}};
  write_file(out_path, report.dump(2) + "\n");
  std::cout << "aggregate mse " << aggregate["mse"] << ", ssim " << aggregate["ssim"] << "\n";
  return 0;
}

int cmd_inspect(const std::string& stream_path) {
  EventStream stream = decode_events(read_file(stream_path));
  std::uint64_t pos = 0, neg = 0;
  for (const Event& e : stream.events) (e.polarity > 0 ? pos : neg)++;
  const double duration = stream.duration_seconds();

  std::printf("width        %u\n", stream.width);
  std::printf("height       %u\n", stream.height);
  std::printf("tick_ns      %u\n", stream.tick_ns);
  std::printf("events       %zu\n", stream.events.size());
  std::printf("  +1         %" PRIu64 "\n", pos);
  std::printf("  -1         %" PRIu64 "\n", neg);
  std::printf("duration_s   %.6f\n", duration);
  std::printf("events_per_s %.1f\n", duration > 0 ? stream.events.size() / duration : 0.0);

  const auto violations = validate_stream(stream);
  if (violations.empty()) {
    std::printf("validation   OK\n");
    return 0;
  }
  std::printf("validation   %zu violations\n", violations.size());
  for (std::size_t i = 0; i < violations.size() && i < 10; ++i)
    std::printf("  [%zu] %s\n", violations[i].index, violations[i].message.c_str());
  return 2;
}

int cmd_bench(const std::string& scenario_path, int repeat) {
  Scenario sc = Scenario::load(scenario_path);
  FluoroField field = sc.load_field();

  auto median_of = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };

  std::vector<double> sim_rate, rec_rate, rec_rate_serial;
  std::size_t events = 0;
  for (int r = 0; r < repeat; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    EventStream stream =
        simulate_pulse_stream(field, sc.schedule, sc.photometric, sc.sensor, sc.tick_ns);
    const double sim_s = wall_seconds(t0);
    events = stream.events.size();
    sim_rate.push_back(events / std::max(sim_s, 1e-9));

    t0 = std::chrono::steady_clock::now();
    ReconResult res = reconstruct_iei(stream, sc.schedule, sc.photometric);
    const double rec_s = wall_seconds(t0);
    rec_rate.push_back(events / std::max(rec_s, 1e-9));

    t0 = std::chrono::steady_clock::now();
    ReconResult res_serial = reconstruct_iei_serial(stream, sc.schedule, sc.photometric);
    const double rec_serial_s = wall_seconds(t0);
    rec_rate_serial.push_back(events / std::max(rec_serial_s, 1e-9));

    if (res.frames.frames.size() != res_serial.frames.frames.size())
      throw std::runtime_error("bench: serial/parallel frame count mismatch");
  }

  json out = {{"repeats", repeat},
              {"events", events},
              {"simulate_events_per_s", median_of(sim_rate)},
              {"reconstruct_events_per_s", median_of(rec_rate)},
              {"reconstruct_events_per_s_serial", median_of(rec_rate_serial)}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inter-event interval microscopy pipeline"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, stream_path, mode = "pulse";
  std::string method = "iei", estimator = "median-interval", recon_dir, manifest_path;
  std::vector<std::string> truth_paths;
  bool normalize = false;
  double guard = 0.0, frame_interval = 0.0;
  int min_events = 2, repeat = 3;

  auto* sim = app.add_subcommand("simulate", "synthesize an event stream from a scenario");
  sim->add_option("scenario", scenario_path)->required();
  sim->add_option("--mode", mode)->check(CLI::IsMember({"pulse", "motion"}));
  sim->add_option("--out", out_path)->required();

  auto* rec = app.add_subcommand("reconstruct", "reconstruct density frames from a stream");
  rec->add_option("stream", stream_path)->required();
  rec->add_option("scenario", scenario_path)->required();
  rec->add_option("--method", method)->check(CLI::IsMember({"iei", "integrate"}));
  rec->add_option("--estimator", estimator)
      ->check(CLI::IsMember({"first-pair", "median-interval"}));
  rec->add_flag("--normalize", normalize, "rescale each frame to [0,1] by its max");
  rec->add_option("--guard", guard);
  rec->add_option("--min-events", min_events);
  rec->add_option("--frame-interval", frame_interval, "integration frame interval (s)");
  rec->add_option("--out", recon_dir)->required();

  auto* met = app.add_subcommand("metrics", "evaluate reconstructions against ground truth");
  met->add_option("recon_dir", recon_dir)->required();
  met->add_option("truth", truth_paths)->required();
  met->add_option("--out", out_path)->required();
  met->add_option("--manifest", manifest_path, "stream manifest for bandwidth stats");

  auto* ins = app.add_subcommand("inspect", "print stream header, stats and validation");
  ins->add_option("stream", stream_path)->required();

  auto* ben = app.add_subcommand("bench", "simulate/reconstruct throughput (median of N)");
  ben->add_option("scenario", scenario_path)->required();
  ben->add_option("--repeat", repeat)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(scenario_path, mode, out_path);
    if (rec->parsed())
      return cmd_reconstruct(stream_path, scenario_path, method, estimator, normalize, guard,
                             min_events, frame_interval, recon_dir);
    if (met->parsed()) return cmd_metrics(recon_dir, truth_paths, out_path, manifest_path);
    if (ins->parsed()) return cmd_inspect(stream_path);
    if (ben->parsed()) return cmd_bench(scenario_path, repeat);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
