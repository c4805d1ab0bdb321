#include "lslasso/parallel.hpp"

#include <omp.h>

#include <stdexcept>

namespace lslasso {

int resolve_threads(int requested) {
  if (requested < 0) throw std::invalid_argument("thread count must be >= 0");
  if (requested == 0) return omp_get_num_procs();
  return requested;
}

}  // namespace lslasso
