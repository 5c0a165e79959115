#include "pulsedtls/numerics/parallel.hpp"

#include <cstdlib>
#include <string>

namespace pulsedtls::numerics {

unsigned default_worker_count() {
  if (const char* env = std::getenv("PULSEDTLS_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

}  // namespace pulsedtls::numerics
