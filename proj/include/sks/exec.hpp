#pragma once

namespace sks {

/// Selects between the serial reference path of a kernel and its OpenMP
/// path. Both produce bit-identical results; the serial path is kept for
/// testing and benchmarking.
enum class ExecPolicy { kSerial, kParallel };

/// Number of OpenMP threads the parallel path will use (1 without OpenMP).
int max_threads();

}  // namespace sks
