#include "wrinkle/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace wrinkle {
namespace {
int default_threads = 0;
}

int thread_count() { return omp_get_max_threads(); }

void set_thread_count(int n) {
  if (default_threads == 0) default_threads = omp_get_max_threads();
  omp_set_num_threads(n >= 1 ? n : default_threads);
}

void apply_thread_env() {
  if (const char* env = std::getenv("WRINKLE_THREADS")) {
    try {
      set_thread_count(std::stoi(env));
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
}

}  // namespace wrinkle
