#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "targetlens/tokenizer.hpp"

namespace targetlens {

using Ngram = std::vector<std::string>;
using NgramCounts = std::map<Ngram, std::int64_t>;

struct NgramCount {
  Ngram ngram;
  std::int64_t count = 0;

  bool operator==(const NgramCount&) const = default;
};

// Entries sorted by count descending, then n-gram ascending.
struct NgramTable {
  std::string group;
  int order = 2;
  std::vector<NgramCount> entries;
  std::int64_t total_windows = 0;

  bool operator==(const NgramTable&) const = default;
};

std::string join_ngram(const Ngram& ngram);

// Throws ParameterError unless order is 2 or 3.
void check_ngram_order(int order);

// Windows never cross document boundaries.
NgramCounts count_ngrams(std::span<const std::vector<std::string>> documents, int order);

NgramTable top_k(const NgramCounts& counts, int order, std::size_t k, std::string group = {});

// Tokenizes each text, counts and keeps the k most frequent n-grams.
NgramTable top_k_ngrams(std::span<const std::string> texts, int order, std::size_t k,
                        const TokenizerOptions& tokenizer = {}, std::string group = {});

// Rows are groups, columns the union of every group's top-k n-grams (sorted),
// cells each group's full count of that n-gram.
struct ContingencyTable {
  std::vector<std::string> rows;
  std::vector<Ngram> columns;
  std::vector<std::vector<std::int64_t>> counts;

  bool operator==(const ContingencyTable&) const = default;
};

ContingencyTable contingency_table(std::span<const NgramTable> tops,
                                   std::span<const NgramCounts> full_counts);

}  // namespace targetlens
