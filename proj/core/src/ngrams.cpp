#include "targetlens/ngrams.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "targetlens/error.hpp"

namespace targetlens {

std::string join_ngram(const Ngram& ngram) {
  std::string out;
  for (const auto& token : ngram) {
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

void check_ngram_order(int order) {
  if (order != 2 && order != 3) {
    throw ParameterError(fmt::format("n-gram order must be 2 or 3, got {}", order));
  }
}

NgramCounts count_ngrams(std::span<const std::vector<std::string>> documents, int order) {
  check_ngram_order(order);
  const auto n = static_cast<std::size_t>(order);
  NgramCounts counts;
  for (const auto& tokens : documents) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      ++counts[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                     tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
    }
  }
  return counts;
}

NgramTable top_k(const NgramCounts& counts, int order, std::size_t k, std::string group) {
  check_ngram_order(order);
  if (k == 0) throw ParameterError("top-k needs k >= 1");
  NgramTable table;
  table.group = std::move(group);
  table.order = order;
  for (const auto& [ngram, count] : counts) {
    table.total_windows += count;
    table.entries.push_back({ngram, count});
  }
  // std::map already iterates n-grams in ascending order; a stable sort on
  // count keeps that as the tie-break.
  std::stable_sort(table.entries.begin(), table.entries.end(),
                   [](const NgramCount& a, const NgramCount& b) { return a.count > b.count; });
  if (table.entries.size() > k) table.entries.resize(k);
  return table;
}

NgramTable top_k_ngrams(std::span<const std::string> texts, int order, std::size_t k,
                        const TokenizerOptions& tokenizer, std::string group) {
  check_ngram_order(order);
  if (k == 0) throw ParameterError("top-k needs k >= 1");
  std::vector<std::vector<std::string>> documents;
  documents.reserve(texts.size());
  for (const auto& text : texts) documents.push_back(tokenize(text, tokenizer));
  return top_k(count_ngrams(documents, order), order, k, std::move(group));
}

ContingencyTable contingency_table(std::span<const NgramTable> tops,
                                   std::span<const NgramCounts> full_counts) {
  if (tops.size() != full_counts.size()) {
    throw ParameterError("contingency table needs one count map per group");
  }
  std::set<Ngram> columns;
  for (const auto& table : tops) {
    for (const auto& entry : table.entries) columns.insert(entry.ngram);
  }
  ContingencyTable out;
  out.columns.assign(columns.begin(), columns.end());
  for (std::size_t g = 0; g < tops.size(); ++g) {
    out.rows.push_back(tops[g].group);
    std::vector<std::int64_t> row;
    for (const auto& column : out.columns) {
      auto it = full_counts[g].find(column);
      row.push_back(it == full_counts[g].end() ? 0 : it->second);
    }
    out.counts.push_back(std::move(row));
  }
  return out;
}

}  // namespace targetlens
