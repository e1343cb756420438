#pragma once

namespace wrinkle {

/// Number of OpenMP threads used by the parallel kernels.
int thread_count();

/// Sets the kernel thread count; values < 1 restore the runtime default.
void set_thread_count(int n);

/// Applies WRINKLE_THREADS from the environment when set.
void apply_thread_env();

}  // namespace wrinkle
