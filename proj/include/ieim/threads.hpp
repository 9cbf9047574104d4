#pragma once

namespace ieim {

/// Worker count for parallel kernels: OpenMP's maximum, optionally capped
/// by the IEIM_THREADS environment variable. Output never depends on it.
int worker_count();

}  // namespace ieim
