#include "targetlens/chi_square.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "targetlens/error.hpp"

namespace targetlens {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 10000;

// P(a, x) by its power series; converges quickly for x < a + 1.
double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by its continued fraction (modified Lentz); for x >= a + 1.
double upper_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || std::isnan(x)) {
    throw ParameterError(fmt::format("incomplete gamma undefined for a={}, x={}", a, x));
  }
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - lower_series(a, x);
  return upper_fraction(a, x);
}

double chi_square_sf(double statistic, double dof) {
  if (!(dof > 0.0)) throw ParameterError("chi-square degrees of freedom must be positive");
  if (statistic <= 0.0) return 1.0;
  return regularized_gamma_q(dof / 2.0, statistic / 2.0);
}

ChiSquareResult chi_square_independence(const std::vector<std::vector<std::int64_t>>& observed) {
  const std::size_t rows = observed.size();
  if (rows < 2) throw DegenerateTableError("chi-square table needs at least 2 rows");
  const std::size_t cols = observed.front().size();
  if (cols < 2) throw DegenerateTableError("chi-square table needs at least 2 columns");

  std::vector<double> row_total(rows, 0.0);
  std::vector<double> col_total(cols, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (observed[i].size() != cols) throw DegenerateTableError("chi-square table is ragged");
    for (std::size_t j = 0; j < cols; ++j) {
      if (observed[i][j] < 0) throw DegenerateTableError("chi-square counts must be nonnegative");
      const auto v = static_cast<double>(observed[i][j]);
      row_total[i] += v;
      col_total[j] += v;
      grand += v;
    }
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_total[i] == 0.0) {
      throw DegenerateTableError(fmt::format("chi-square table row {} is all zero", i));
    }
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (col_total[j] == 0.0) {
      throw DegenerateTableError(fmt::format("chi-square table column {} is all zero", j));
    }
  }

  ChiSquareResult result;
  result.observed = observed;
  result.expected.assign(rows, std::vector<double>(cols, 0.0));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double e = row_total[i] * col_total[j] / grand;
      result.expected[i][j] = e;
      if (e > 0.0) {
        const double diff = static_cast<double>(observed[i][j]) - e;
        result.statistic += diff * diff / e;
      }
    }
  }
  result.degrees_of_freedom = static_cast<int>((rows - 1) * (cols - 1));
  result.p_value = chi_square_sf(result.statistic, result.degrees_of_freedom);
  return result;
}

}  // namespace targetlens
