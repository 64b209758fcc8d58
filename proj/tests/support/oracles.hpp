#pragma once

// Independent reference implementations. None of these call into the library
// code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace targetlens::oracle {

// ---------------------------------------------------------------------------
// Chi-square survival function by quadrature.

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Roots of P_n by Newton iteration from the Chebyshev guesses.
inline GaussLegendre gauss_legendre(int n) {
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

// Composite Gauss-Legendre over [a, b].
template <typename Fn>
double integrate(Fn f, double a, double b, int panels = 200) {
  static const GaussLegendre rule = gauss_legendre(16);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      sum += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    }
  }
  return 0.5 * h * sum;
}

// With x = u^2 the chi-square density becomes smooth at the origin for every
// dof >= 1: f(x) dx = 2 u^(k-1) e^(-u^2/2) / (2^(k/2) Gamma(k/2)) du.
inline double chi_square_sf_quadrature(double statistic, int dof) {
  if (statistic <= 0.0) return 1.0;
  const double k = dof;
  const double log_norm = std::log(2.0) - 0.5 * k * std::log(2.0) - std::lgamma(0.5 * k);
  auto density_u = [&](double u) {
    if (u <= 0.0) return dof == 1 ? std::exp(log_norm) : 0.0;
    return std::exp(log_norm + (k - 1.0) * std::log(u) - 0.5 * u * u);
  };
  const double root = std::sqrt(statistic);
  const double cdf = integrate(density_u, 0.0, root);
  if (cdf < 0.5) return 1.0 - cdf;
  // Far tail integrated directly so tiny p-values keep their relative accuracy.
  return integrate(density_u, root, root + 40.0, 400);
}

// ---------------------------------------------------------------------------
// N-gram counting by exhaustive enumeration.

using Words = std::vector<std::string>;

struct RankedNgram {
  Words ngram;
  std::int64_t count = 0;
};

struct BruteTopK {
  std::vector<RankedNgram> entries;
  std::int64_t total_windows = 0;
};

inline BruteTopK brute_force_top_k(const std::vector<Words>& documents, int order, std::size_t k) {
  // Every window, as a flat list.
  std::vector<Words> windows;
  for (const auto& doc : documents) {
    for (std::size_t i = 0; i + order <= doc.size(); ++i) {
      windows.emplace_back(doc.begin() + static_cast<std::ptrdiff_t>(i),
                           doc.begin() + static_cast<std::ptrdiff_t>(i) + order);
    }
  }
  // Distinct n-grams, each counted by a full scan.
  std::vector<RankedNgram> distinct;
  for (const auto& w : windows) {
    bool known = false;
    for (const auto& d : distinct) known = known || d.ngram == w;
    if (known) continue;
    std::int64_t count = 0;
    for (const auto& other : windows) count += other == w ? 1 : 0;
    distinct.push_back({w, count});
  }
  // Selection: highest count first, lexicographically smallest among ties.
  BruteTopK out;
  out.total_windows = static_cast<std::int64_t>(windows.size());
  std::vector<bool> taken(distinct.size(), false);
  while (out.entries.size() < k) {
    std::ptrdiff_t best = -1;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      if (taken[i]) continue;
      if (best < 0 || distinct[i].count > distinct[best].count ||
          (distinct[i].count == distinct[best].count && distinct[i].ngram < distinct[best].ngram)) {
        best = static_cast<std::ptrdiff_t>(i);
      }
    }
    if (best < 0) break;
    taken[best] = true;
    out.entries.push_back(distinct[best]);
  }
  return out;
}

inline std::string serialize(const std::vector<RankedNgram>& entries) {
  std::string out;
  for (const auto& e : entries) {
    for (std::size_t i = 0; i < e.ngram.size(); ++i) out += (i ? " " : "") + e.ngram[i];
    out += "\t" + std::to_string(e.count) + "\n";
  }
  return out;
}

// A random corpus of lowercase words from a small vocabulary, so ties are common.
struct RandomCorpus {
  std::vector<Words> documents;
  std::vector<std::string> texts;  // same words with case and punctuation noise
};

inline RandomCorpus random_corpus(std::mt19937_64& rng) {
  static const std::vector<std::string> vocab = {"clean", "energy", "climate", "change", "act",
                                                 "now",   "vote",   "solar",   "jobs",   "kids",
                                                 "water", "future"};
  static const std::vector<std::string> separators = {" ", " ", ", ", "! ", " - ", ".\n", "  "};
  std::uniform_int_distribution<std::size_t> vocab_size(3, vocab.size());
  std::uniform_int_distribution<int> doc_count(1, 12);
  std::uniform_int_distribution<int> doc_length(0, 25);
  std::bernoulli_distribution capitalize(0.3);
  const std::size_t v = vocab_size(rng);
  std::uniform_int_distribution<std::size_t> pick(0, v - 1);
  std::uniform_int_distribution<std::size_t> sep(0, separators.size() - 1);
  RandomCorpus corpus;
  const int docs = doc_count(rng);
  for (int d = 0; d < docs; ++d) {
    Words words;
    std::string text;
    const int length = doc_length(rng);
    for (int i = 0; i < length; ++i) {
      std::string w = vocab[pick(rng)];
      words.push_back(w);
      if (capitalize(rng)) w[0] = static_cast<char>(w[0] - 'a' + 'A');
      if (i) text += separators[sep(rng)];
      text += w;
    }
    corpus.documents.push_back(std::move(words));
    corpus.texts.push_back(std::move(text));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Metrics from their definitions, by walking individual predictions.

using Matrix = std::vector<std::vector<std::int64_t>>;

struct Sample {
  std::size_t actual;
  std::size_t predicted;
};

inline std::vector<Sample> expand(const Matrix& m) {
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      for (std::int64_t n = 0; n < m[i][j]; ++n) samples.push_back({i, j});
    }
  }
  return samples;
}

struct DefinitionalGroup {
  double dp = 0.0;   // P(pred = g) / P(actual = g)
  double tpr = 0.0;  // P(pred = g | actual = g)
  double fpr = 0.0;  // P(pred = g | actual != g)
  double precision = 0.0;  // P(actual = g | pred = g); 0 when undefined
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
  bool dp_defined = false;
  bool fpr_defined = false;
};

inline std::vector<DefinitionalGroup> definitional_metrics(const Matrix& m) {
  const auto samples = expand(m);
  std::vector<DefinitionalGroup> out(m.size());
  for (std::size_t g = 0; g < m.size(); ++g) {
    std::int64_t actual = 0, predicted = 0, hit = 0, negatives = 0, false_alarm = 0;
    for (const auto& s : samples) {
      const bool is_g = s.actual == g;
      const bool said_g = s.predicted == g;
      actual += is_g;
      predicted += said_g;
      hit += is_g && said_g;
      negatives += !is_g;
      false_alarm += !is_g && said_g;
    }
    auto& r = out[g];
    r.support = actual;
    r.dp_defined = actual > 0;
    r.fpr_defined = negatives > 0;
    if (actual > 0) {
      r.dp = static_cast<double>(predicted) / static_cast<double>(actual);
      r.tpr = static_cast<double>(hit) / static_cast<double>(actual);
    }
    if (negatives > 0) r.fpr = static_cast<double>(false_alarm) / static_cast<double>(negatives);
    r.precision = predicted > 0 ? static_cast<double>(hit) / static_cast<double>(predicted) : 0.0;
    r.recall = r.tpr;
    r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0;
  }
  return out;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t k, std::int64_t max_cell,
                            bool nonempty_rows) {
  std::uniform_int_distribution<std::int64_t> cell(0, max_cell);
  Matrix m(k, std::vector<std::int64_t>(k));
  for (auto& row : m) {
    for (auto& c : row) c = cell(rng);
    if (nonempty_rows && std::all_of(row.begin(), row.end(), [](auto v) { return v == 0; })) {
      row[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)] = 1;
    }
  }
  return m;
}

}  // namespace targetlens::oracle
