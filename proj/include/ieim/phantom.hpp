#pragma once

#include "ieim/core.hpp"

namespace ieim {

/// Resolution-target-style synthetic density field: dark background with
/// filled disks and bar triplets at graded levels, quantized to 8-bit steps
/// in [0, 1]. Deterministic in (width, height).
Grid make_target_phantom(int width, int height);

/// Density field whose structure translates horizontally by dx_per_cycle
/// pixels each cycle, wrapping around; used for dynamic-scene tests.
FluoroField make_translating_field(int width, int height, int cycles, int dx_per_cycle);

}  // namespace ieim
