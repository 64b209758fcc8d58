#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "targetlens/error.hpp"
#include "targetlens/prompt.hpp"

namespace targetlens {

namespace {

constexpr std::string_view kAdText = "{ad_text}";
constexpr std::string_view kExplanations = "{explanations}";

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

constexpr std::string_view kGenderInstruction =
    "The following text is a climate-related advertisement that ran on social media.\n"
    "\n"
    "Text: {ad_text}\n"
    "\n"
    "Which gender is this ad targeting? Choose one of: {labels}. "
    "Then explain the reasoning behind your prediction.";

constexpr std::string_view kAgeInstruction =
    "The following text is a climate-related advertisement that ran on social media.\n"
    "\n"
    "Text: {ad_text}\n"
    "\n"
    "Which age group is this ad targeting? Choose one of: {labels}. "
    "Then explain the reasoning behind your prediction.";

constexpr std::string_view kPredictionFormat =
    "Answer in exactly this format:\n"
    "Label: <one of: {labels}>\n"
    "Explanation: <your reasoning in at most {max_words} words>";

constexpr std::string_view kThemeInstruction =
    "Below are explanations a language model gave for predicting that climate-related "
    "ads target {group}.\n"
    "\n"
    "Explanations:\n"
    "{explanations}\n"
    "\n"
    "What is the common theme of these explanations, and which aspects fall under that theme?";

constexpr std::string_view kThemeFormat =
    "Answer in exactly this format:\n"
    "Theme: <short title of the common theme>\n"
    "Aspects:\n"
    "- <aspect name>: <description in at most {max_words} words>\n"
    "(one aspect per line)";

constexpr int kPredictionMaxWords = 40;
constexpr int kThemeMaxWords = 30;

}  // namespace

PromptSpec::PromptSpec(Task task, std::string instruction_template,
                       std::vector<LabelOption> label_set, std::string output_format_clause,
                       int max_explanation_words, std::string version)
    : task_(task),
      instruction_(std::move(instruction_template)),
      labels_(std::move(label_set)),
      format_(std::move(output_format_clause)),
      max_words_(max_explanation_words),
      version_(std::move(version)) {
  const bool theme = task_ == Task::kTheme;
  const std::string_view own = theme ? kExplanations : kAdText;
  const std::string_view other = theme ? kAdText : kExplanations;
  if (count_occurrences(instruction_, own) != 1) {
    throw ConfigError(fmt::format("{} prompt template must contain {} exactly once",
                                  key(task_), own));
  }
  if (count_occurrences(instruction_, other) != 0 || count_occurrences(format_, own) != 0 ||
      count_occurrences(format_, other) != 0) {
    throw ConfigError(fmt::format("{} prompt uses a payload placeholder out of place", key(task_)));
  }
  if (!theme && count_occurrences(instruction_, "{group}") != 0) {
    throw ConfigError("{group} is only available to theme synthesis prompts");
  }
  if (theme != labels_.empty()) {
    throw ConfigError(theme ? "theme synthesis prompts take no label set"
                            : "prediction prompts need a nonempty label set");
  }
  std::set<std::string> keys;
  for (const auto& option : labels_) {
    if (option.key.empty() || option.display.empty() || !keys.insert(option.key).second) {
      throw ConfigError("label set entries need unique nonempty keys and display names");
    }
  }
  if (format_.empty()) throw ConfigError("output format clause must be nonempty");
  if (max_words_ <= 0) throw ConfigError("max_explanation_words must be positive");
}

std::string_view PromptSpec::payload_placeholder() const noexcept {
  return task_ == Task::kTheme ? kExplanations : kAdText;
}

std::vector<std::string> PromptSpec::label_keys() const {
  std::vector<std::string> out;
  for (const auto& option : labels_) out.push_back(option.key);
  return out;
}

std::vector<LabelOption> gender_label_options() {
  return {
      {"female", "female", {"women", "woman", "females", "female audience"}},
      {"male", "male", {"men", "man", "males", "male audience"}},
  };
}

std::vector<LabelOption> age_label_options() {
  return {
      {"young",
       "young adults (18-24)",
       {"young adults", "young adult", "young", "18-24"}},
      {"early_working",
       "early working (25-44)",
       {"early working age", "early working", "early working-age", "25-44"}},
      {"late_working",
       "late working (45-64)",
       {"late working age", "late working", "late working-age", "45-64"}},
      {"senior",
       "senior citizens (65+)",
       {"senior citizens", "senior citizen", "seniors", "senior", "65+"}},
  };
}

PromptSpec default_gender_spec() {
  return PromptSpec(Task::kGender, std::string(kGenderInstruction), gender_label_options(),
                    std::string(kPredictionFormat), kPredictionMaxWords, "v1");
}

PromptSpec default_age_spec() {
  return PromptSpec(Task::kAge, std::string(kAgeInstruction), age_label_options(),
                    std::string(kPredictionFormat), kPredictionMaxWords, "v1");
}

PromptSpec default_theme_spec() {
  return PromptSpec(Task::kTheme, std::string(kThemeInstruction), {},
                    std::string(kThemeFormat), kThemeMaxWords, "v1");
}

const PromptSpec& PromptSet::for_task(Task task) const {
  switch (task) {
    case Task::kGender:
      return gender;
    case Task::kAge:
      return age;
    case Task::kTheme:
      return theme;
  }
  return theme;
}

PromptSet PromptSet::defaults() {
  return {default_gender_spec(), default_age_spec(), default_theme_spec()};
}

PromptSpec parse_prompt_file(std::string_view contents) {
  std::string version = "custom";
  std::optional<Task> task;
  int max_words = kPredictionMaxWords;
  std::string instruction;
  std::string format;
  std::string* section = nullptr;

  std::istringstream in{std::string(contents)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "[instruction]") {
      section = &instruction;
      continue;
    }
    if (line == "[format]") {
      section = &format;
      continue;
    }
    if (section) {
      *section += line;
      *section += '\n';
      continue;
    }
    const auto stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto colon = stripped.find(':');
    if (colon == std::string_view::npos) {
      throw ConfigError(fmt::format("prompt header line '{}' is not 'key: value'", stripped));
    }
    const auto name = trim(stripped.substr(0, colon));
    const auto value = trim(stripped.substr(colon + 1));
    if (name == "version") {
      version = std::string(value);
    } else if (name == "task") {
      task = parse_task(value);
      if (!task) throw ConfigError(fmt::format("unknown prompt task '{}'", value));
    } else if (name == "max_explanation_words") {
      try {
        max_words = std::stoi(std::string(value));
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("max_explanation_words '{}' is not an integer", value));
      }
    } else {
      throw ConfigError(fmt::format("unknown prompt header '{}'", name));
    }
  }
  if (!task) throw ConfigError("prompt file lacks a 'task:' header");
  std::vector<LabelOption> labels;
  if (*task == Task::kGender) labels = gender_label_options();
  if (*task == Task::kAge) labels = age_label_options();
  return PromptSpec(*task, std::string(trim(instruction)), std::move(labels),
                    std::string(trim(format)), max_words, version);
}

std::string serialize_prompt_file(const PromptSpec& spec) {
  return fmt::format(
      "version: {}\ntask: {}\nmax_explanation_words: {}\n[instruction]\n{}\n[format]\n{}\n",
      spec.version(), key(spec.task()), spec.max_explanation_words(),
      spec.instruction_template(), spec.output_format_clause());
}

PromptSet load_prompt_set(const std::filesystem::path& dir) {
  auto load = [&dir](const char* name, Task expected) {
    const auto path = dir / name;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open prompt file '{}'", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    PromptSpec spec = parse_prompt_file(buffer.str());
    if (spec.task() != expected) {
      throw ConfigError(fmt::format("'{}' declares task '{}'", path.string(), key(spec.task())));
    }
    return spec;
  };
  PromptSet set{load("gender.prompt", Task::kGender), load("age.prompt", Task::kAge),
                load("theme.prompt", Task::kTheme)};
  if (set.gender.version() != set.age.version() || set.gender.version() != set.theme.version()) {
    throw ConfigError("prompt files in one directory must share a version");
  }
  return set;
}

std::string render_prompt(const PromptSpec& spec, std::string_view payload,
                          std::string_view group) {
  if (trim(payload).empty()) {
    throw InputError(fmt::format("{} prompt payload is empty", key(spec.task())));
  }
  std::string labels;
  for (const auto& option : spec.label_set()) {
    if (!labels.empty()) labels += ", ";
    labels += option.display;
  }
  const std::string max_words = std::to_string(spec.max_explanation_words());

  // Single pass, so placeholder-like text inside the payload stays literal.
  auto substitute = [&](std::string_view tmpl) {
    std::string out;
    out.reserve(tmpl.size() + payload.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
      if (tmpl[i] == '{') {
        const auto close = tmpl.find('}', i);
        if (close != std::string_view::npos) {
          const auto token = tmpl.substr(i, close - i + 1);
          const std::string_view* value = nullptr;
          std::string_view payload_view = payload;
          std::string_view labels_view = labels;
          std::string_view words_view = max_words;
          if (token == spec.payload_placeholder()) value = &payload_view;
          if (token == "{labels}") value = &labels_view;
          if (token == "{max_words}") value = &words_view;
          if (token == "{group}") value = &group;
          if (value) {
            out += *value;
            i = close + 1;
            continue;
          }
        }
      }
      out.push_back(tmpl[i++]);
    }
    return out;
  };

  std::string prompt = substitute(spec.instruction_template());
  if (!spec.label_set().empty() &&
      spec.instruction_template().find("{labels}") == std::string::npos) {
    prompt += "\n\nLabels: " + labels;
  }
  prompt += "\n\n";
  prompt += substitute(spec.output_format_clause());
  return prompt;
}

}  // namespace targetlens
