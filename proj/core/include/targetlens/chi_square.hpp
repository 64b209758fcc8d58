#pragma once

#include <cstdint>
#include <vector>

namespace targetlens {

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  std::vector<std::vector<std::int64_t>> observed;
  std::vector<std::vector<double>> expected;

  bool operator==(const ChiSquareResult&) const = default;
};

// Pearson test of independence, no continuity correction. Throws
// DegenerateTableError for fewer than 2 rows or columns, ragged or negative
// input, or any all-zero row or column.
ChiSquareResult chi_square_independence(const std::vector<std::vector<std::int64_t>>& observed);

// Regularized upper incomplete gamma Q(a, x) for a > 0, x >= 0.
double regularized_gamma_q(double a, double x);

// Survival function of the chi-square distribution: P(X >= statistic).
double chi_square_sf(double statistic, double dof);

}  // namespace targetlens
