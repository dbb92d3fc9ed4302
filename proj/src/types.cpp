// SPDX-License-Identifier: Apache-2.0
#include "latres/types.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

namespace latres {

void ensure_finite(const CMatrix& m, const std::string& what) {
  if (!m.allFinite())
    throw NumericalError(what + ": matrix contains NaN or Inf entries");
}

int engine_threads() {
  if (const char* env = std::getenv("ENGINE_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace latres
