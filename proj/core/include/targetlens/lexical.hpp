#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "targetlens/chi_square.hpp"
#include "targetlens/corpus.hpp"
#include "targetlens/ngrams.hpp"
#include "targetlens/tokenizer.hpp"

namespace targetlens {

struct LexicalOptions {
  std::vector<int> orders = {2, 3};
  std::size_t top_k = 5;
  // Groups with fewer exclusively targeted ads are left out of the tables.
  std::size_t min_group_size = 10;
  TokenizerOptions tokenizer;
  TextAssembly text;
};

// Independence test between the groups of one axis and their top n-grams.
struct LexicalTest {
  Task axis = Task::kGender;
  int order = 2;
  ContingencyTable table;
  std::optional<ChiSquareResult> result;  // empty when skipped
  std::string skipped_reason;

  bool operator==(const LexicalTest&) const = default;
};

struct LexicalAnalysis {
  std::vector<NgramTable> tables;  // per (order, axis, group) in label order
  std::vector<LexicalTest> tests;  // per (order, axis)
  std::vector<std::string> excluded_groups;  // below min_group_size

  bool operator==(const LexicalAnalysis&) const = default;
};

// Texts of the ads whose ground truth for `task` is `group`, in ad_id order.
std::vector<std::string> group_texts(std::span<const LabeledAd> ads, Task task,
                                     std::string_view group, const TextAssembly& text = {});

LexicalAnalysis analyze_lexical(std::span<const LabeledAd> ads, const LexicalOptions& options = {});

}  // namespace targetlens
