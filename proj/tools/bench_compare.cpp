// Compares the OpenMP kernels against their serial reference
// implementations: wall time for pulse simulation and IEI reconstruction,
// plus a byte-level check that both produce identical results.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "ieim/codec.hpp"
#include "ieim/phantom.hpp"
#include "ieim/reconstruct.hpp"
#include "ieim/simulator.hpp"
#include "ieim/threads.hpp"

using namespace ieim;

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
  double best = 1e30;
  for (int i = 0; i < reps; ++i) {
    const double t0 = now_s();
    fn();
    best = std::min(best, now_s() - t0);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int side = argc > 1 ? std::atoi(argv[1]) : 192;
  int reps = argc > 2 ? std::atoi(argv[2]) : 3;

  FluoroField field;
  field.width = side;
  field.height = side;
  field.frames.push_back(make_target_phantom(side, side));

  ModulationSchedule sched;
  sched.period_s = 0.01;
  sched.duty = 0.5;
  sched.amplitude = 0.05;
  sched.rise_s = 0.004;
  sched.fall_s = 0.001;
  sched.cycles = 40;
  PhotometricModel photo{1.0, 0.001};
  SensorConfig sensor;

  std::printf("field %dx%d, %d cycles, %d workers\n", side, side, sched.cycles,
              worker_count());

  EventStream parallel_stream, serial_stream;
  const double sim_par = time_best_of(reps, [&] {
    parallel_stream = simulate_pulse_stream(field, sched, photo, sensor);
  });
  const double sim_ser = time_best_of(reps, [&] {
    serial_stream = simulate_pulse_stream_serial(field, sched, photo, sensor);
  });

  const bool sim_equal = encode_events(parallel_stream) == encode_events(serial_stream);
  const double ev = static_cast<double>(parallel_stream.events.size());

  ReconResult rec_par, rec_ser;
  const double rec_par_s = time_best_of(
      reps, [&] { rec_par = reconstruct_iei(parallel_stream, sched, photo); });
  const double rec_ser_s = time_best_of(
      reps, [&] { rec_ser = reconstruct_iei_serial(parallel_stream, sched, photo); });

  bool rec_equal = rec_par.frames.frames.size() == rec_ser.frames.frames.size();
  for (std::size_t i = 0; rec_equal && i < rec_par.frames.frames.size(); ++i)
    rec_equal = rec_par.frames.frames[i].data == rec_ser.frames.frames[i].data &&
                rec_par.frames.confidence[i] == rec_ser.frames.confidence[i];

  std::printf("%-22s %12s %12s %9s %8s\n", "kernel", "serial", "openmp", "speedup",
              "match");
  std::printf("%-22s %9.3f s %9.3f s %8.2fx %8s\n", "simulate_pulse", sim_ser, sim_par,
              sim_ser / sim_par, sim_equal ? "yes" : "NO");
  std::printf("%-22s %9.3f s %9.3f s %8.2fx %8s\n", "reconstruct_iei", rec_ser_s, rec_par_s,
              rec_ser_s / rec_par_s, rec_equal ? "yes" : "NO");
  std::printf("events %.0f  sim %.2f Mev/s (omp)  recon %.2f Mev/s (omp)\n", ev,
              ev / sim_par / 1e6, ev / rec_par_s / 1e6);

  return (sim_equal && rec_equal) ? 0 : 1;
}
