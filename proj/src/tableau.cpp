#include "sks/tableau.hpp"

#include <omp.h>

namespace sks {

int max_threads() { return omp_get_max_threads(); }

namespace {

inline void eliminate(std::span<double> target, std::span<const double> pivot_row, double factor) {
  for (std::size_t c = 0; c < target.size(); ++c) {
    if (pivot_row[c] != 0.0) target[c] -= factor * pivot_row[c];
  }
}

}  // namespace

void pivot(Tableau& t, std::size_t row, std::size_t col, ExecPolicy policy) {
  auto prow = t.row(row);
  const double inv = 1.0 / prow[col];
  for (double& v : prow) v *= inv;
  prow[col] = 1.0;

  const long nrows = static_cast<long>(t.rows());
  if (policy == ExecPolicy::kSerial) {
    for (long r = 0; r < nrows; ++r) {
      if (r == static_cast<long>(row)) continue;
      auto target = t.row(static_cast<std::size_t>(r));
      const double factor = target[col];
      if (factor == 0.0) continue;
      eliminate(target, prow, factor);
      target[col] = 0.0;
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (long r = 0; r < nrows; ++r) {
    if (r == static_cast<long>(row)) continue;
    auto target = t.row(static_cast<std::size_t>(r));
    const double factor = target[col];
    if (factor == 0.0) continue;
    eliminate(target, prow, factor);
    target[col] = 0.0;
  }
}

}  // namespace sks
