#include <gtest/gtest.h>

#include "oracles.hpp"
#include "targetlens/chi_square.hpp"

namespace targetlens {
namespace {

TEST(ChiSquareOracle, QuadratureIsSelfConsistent) {
  // Closed forms: dof 2 is exponential, dof 1 is 2 * upper normal tail.
  for (double s : {0.1, 1.0, 5.0, 20.0}) {
    EXPECT_NEAR(oracle::chi_square_sf_quadrature(s, 2), std::exp(-s / 2), 1e-13);
    EXPECT_NEAR(oracle::chi_square_sf_quadrature(s, 1), std::erfc(std::sqrt(s / 2)), 1e-13);
  }
}

TEST(ChiSquareOracle, CriticalValueAtFivePercent) {
  EXPECT_NEAR(oracle::chi_square_sf_quadrature(3.841, 1), 0.05, 5e-4);
  EXPECT_NEAR(chi_square_sf(3.841, 1), oracle::chi_square_sf_quadrature(3.841, 1), 1e-12);
}

TEST(ChiSquareOracle, SurvivalFunctionMatchesOverGrid) {
  double worst = 0.0;
  for (int dof = 1; dof <= 10; ++dof) {
    for (int step = 0; step <= 200; ++step) {
      const double s = 0.25 * step;
      const double diff = std::abs(chi_square_sf(s, dof) - oracle::chi_square_sf_quadrature(s, dof));
      worst = std::max(worst, diff);
      ASSERT_LE(diff, 1e-8) << "dof " << dof << " statistic " << s;
    }
  }
  RecordProperty("max_abs_error", std::to_string(worst));
}

TEST(ChiSquareOracle, OffGridPoints) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> stat(0.0, 50.0);
  std::uniform_int_distribution<int> dof(1, 10);
  for (int i = 0; i < 500; ++i) {
    const double s = stat(rng);
    const int k = dof(rng);
    ASSERT_NEAR(chi_square_sf(s, k), oracle::chi_square_sf_quadrature(s, k), 1e-8);
  }
}

TEST(ChiSquareOracle, PearsonStatisticFromDefinition) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<std::size_t> dim(2, 5);
    const std::size_t r = dim(rng);
    const std::size_t c = dim(rng);
    std::uniform_int_distribution<std::int64_t> cell(1, 30);
    std::vector<std::vector<std::int64_t>> table(r, std::vector<std::int64_t>(c));
    for (auto& row : table) {
      for (auto& v : row) v = cell(rng);
    }
    double n = 0;
    std::vector<double> rows(r, 0), cols(c, 0);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        rows[i] += table[i][j];
        cols[j] += table[i][j];
        n += table[i][j];
      }
    }
    double stat = 0;
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        const double e = rows[i] * cols[j] / n;
        stat += (table[i][j] - e) * (table[i][j] - e) / e;
      }
    }
    const auto result = chi_square_independence(table);
    ASSERT_NEAR(result.statistic, stat, 1e-9 * std::max(1.0, stat));
    ASSERT_EQ(result.degrees_of_freedom, static_cast<int>((r - 1) * (c - 1)));
    ASSERT_NEAR(result.p_value,
                oracle::chi_square_sf_quadrature(stat, result.degrees_of_freedom), 1e-8);
  }
}

}  // namespace
}  // namespace targetlens
