#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "targetlens/evaluator.hpp"
#include "targetlens/prompt.hpp"
#include "targetlens/provider.hpp"
#include "targetlens/runner.hpp"

namespace targetlens {

struct Aspect {
  std::string name;
  std::string description;

  bool operator==(const Aspect&) const = default;
};

struct ThemeSet {
  std::string group;
  Task task = Task::kGender;
  std::string theme;
  std::vector<Aspect> aspects;
  std::size_t source_count = 0;
  std::string provider;
  std::string model;
  std::string request_hash;

  bool operator==(const ThemeSet&) const = default;
};

nlohmann::ordered_json to_json(const ThemeSet& themes);
ThemeSet theme_set_from_json(const nlohmann::json& j);

// Explanations of Parsed records of `task` whose prediction and truth are
// both `group`, in ad_id order.
std::vector<std::string> collect_explanations(std::span<const PredictionRecord> records, Task task,
                                              const TruthTable& truth, std::string_view group);

// Numbered, newline-joined list used as the prompt payload.
std::string pack_explanations(std::span<const std::string> explanations);

// Phrase substituted for {group}: "male", "young adults (18-24)", ...
std::string audience_phrase(std::string_view group);

// Parses "Theme: ..." and the bulleted lines after "Aspects:". Bullets may be
// "-", "*", "•" or "1." / "1)". Throws ThemeParseError carrying the raw text.
std::pair<std::string, std::vector<Aspect>> parse_theme_response(std::string_view raw);

// Renders the theme prompt for `group`, calls the provider once and parses the
// reply. Throws InputError on an empty explanation list.
ThemeSet synthesize_themes(std::span<const std::string> explanations, std::string_view group,
                           Task task, Provider& provider, const PromptSpec& spec,
                           const std::string& model);

// The request synthesize_themes would send; the fixture builder uses it too.
CompletionRequest theme_request(std::span<const std::string> explanations, std::string_view group,
                                const PromptSpec& spec, const std::string& model);

}  // namespace targetlens
