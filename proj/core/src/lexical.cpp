#include "targetlens/lexical.hpp"

#include <algorithm>

#include "targetlens/error.hpp"

namespace targetlens {

std::vector<std::string> group_texts(std::span<const LabeledAd> ads, Task task,
                                     std::string_view group, const TextAssembly& text) {
  std::vector<const LabeledAd*> members;
  for (const auto& ad : ads) {
    auto target = ad.target_key(task);
    if (target && *target == group) members.push_back(&ad);
  }
  std::sort(members.begin(), members.end(),
            [](const LabeledAd* a, const LabeledAd* b) { return a->ad.ad_id < b->ad.ad_id; });
  std::vector<std::string> out;
  out.reserve(members.size());
  for (const auto* ad : members) out.push_back(ad_text(ad->ad, text));
  return out;
}

LexicalAnalysis analyze_lexical(std::span<const LabeledAd> ads, const LexicalOptions& options) {
  if (options.orders.empty()) throw ParameterError("lexical analysis needs at least one order");
  for (int order : options.orders) check_ngram_order(order);
  if (options.top_k == 0) throw ParameterError("top-k needs k >= 1");

  struct Group {
    Task axis;
    std::string key;
    std::vector<std::vector<std::string>> documents;
  };
  LexicalAnalysis analysis;
  std::vector<Group> groups;
  for (Task axis : kPredictionTasks) {
    for (const auto& label : label_keys(axis)) {
      auto texts = group_texts(ads, axis, label, options.text);
      if (texts.empty()) continue;
      if (texts.size() < options.min_group_size) {
        analysis.excluded_groups.push_back(label);
        continue;
      }
      Group g{axis, label, {}};
      for (const auto& t : texts) g.documents.push_back(tokenize(t, options.tokenizer));
      groups.push_back(std::move(g));
    }
  }

  for (int order : options.orders) {
    for (Task axis : kPredictionTasks) {
      std::vector<NgramTable> tops;
      std::vector<NgramCounts> counts;
      for (const auto& g : groups) {
        if (g.axis != axis) continue;
        counts.push_back(count_ngrams(g.documents, order));
        tops.push_back(top_k(counts.back(), order, options.top_k, g.key));
      }
      if (tops.empty()) continue;
      analysis.tables.insert(analysis.tables.end(), tops.begin(), tops.end());

      LexicalTest test;
      test.axis = axis;
      test.order = order;
      test.table = contingency_table(tops, counts);
      if (tops.size() < 2) {
        test.skipped_reason = "fewer than two groups meet the minimum size";
      } else {
        test.result = chi_square_independence(test.table.counts);
      }
      analysis.tests.push_back(std::move(test));
    }
  }
  return analysis;
}

}  // namespace targetlens
