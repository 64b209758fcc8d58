#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "targetlens/labels.hpp"

namespace targetlens {

// One allowed answer. `key` is what gets recorded; `display` is what the model
// sees; `synonyms` are extra spellings accepted when parsing.
struct LabelOption {
  std::string key;
  std::string display;
  std::vector<std::string> synonyms;

  bool operator==(const LabelOption&) const = default;
};

// A zero-shot prompt template. Construction enforces the invariants: the
// payload placeholder ({ad_text} for prediction tasks, {explanations} for
// theme synthesis) appears exactly once, prediction tasks carry a nonempty
// label set and theme synthesis an empty one.
//
// Optional placeholders: {labels}, {max_words}, and {group} (theme only).
class PromptSpec {
 public:
  PromptSpec(Task task, std::string instruction_template, std::vector<LabelOption> label_set,
             std::string output_format_clause, int max_explanation_words,
             std::string version = "custom");

  Task task() const noexcept { return task_; }
  const std::string& instruction_template() const noexcept { return instruction_; }
  const std::vector<LabelOption>& label_set() const noexcept { return labels_; }
  const std::string& output_format_clause() const noexcept { return format_; }
  int max_explanation_words() const noexcept { return max_words_; }
  const std::string& version() const noexcept { return version_; }

  std::string_view payload_placeholder() const noexcept;
  std::vector<std::string> label_keys() const;

  bool operator==(const PromptSpec&) const = default;

 private:
  Task task_;
  std::string instruction_;
  std::vector<LabelOption> labels_;
  std::string format_;
  int max_words_;
  std::string version_;
};

// Label options for the two prediction tasks, in confusion-matrix order.
std::vector<LabelOption> gender_label_options();
std::vector<LabelOption> age_label_options();

// Built-in templates; identical to the files under data/prompts/v1.
PromptSpec default_gender_spec();
PromptSpec default_age_spec();
PromptSpec default_theme_spec();

struct PromptSet {
  PromptSpec gender;
  PromptSpec age;
  PromptSpec theme;

  const PromptSpec& for_task(Task task) const;
  const std::string& version() const noexcept { return gender.version(); }

  static PromptSet defaults();
};

// Prompt configuration file:
//
//   version: v1
//   task: gender
//   max_explanation_words: 40
//   [instruction]
//   ...template text...
//   [format]
//   ...output format clause...
PromptSpec parse_prompt_file(std::string_view contents);
std::string serialize_prompt_file(const PromptSpec& spec);

// Loads gender.prompt, age.prompt and theme.prompt from `dir`.
PromptSet load_prompt_set(const std::filesystem::path& dir);

// Substitutes the payload and optional placeholders, enumerating the label
// set verbatim, then appends the output-format clause. Pure. Throws
// InputError on an empty payload.
std::string render_prompt(const PromptSpec& spec, std::string_view payload,
                          std::string_view group = {});

struct LabelParse {
  std::optional<std::string> label;  // a key from the label set
  std::string explanation;

  bool operator==(const LabelParse&) const = default;
};

// Total: never throws. Prefers a "Label:" line; otherwise accepts a single
// unambiguous mention of one label (or a synonym) anywhere in the text.
LabelParse parse_label_response(std::string_view raw, const std::vector<LabelOption>& label_set);

}  // namespace targetlens
