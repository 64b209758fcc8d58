#include "targetlens/thematics.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <fmt/format.h>

#include "targetlens/error.hpp"

namespace targetlens {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Strips markdown emphasis the models like to wrap headings in.
std::string_view unwrap(std::string_view s) {
  s = trim(s);
  while (s.size() >= 2 && (s.front() == '*' || s.front() == '_') && s.back() == s.front()) {
    s = trim(s.substr(1, s.size() - 2));
  }
  return s;
}

// Value after a "heading:" prefix, case-insensitive, ignoring leading emphasis.
std::optional<std::string_view> after_heading(std::string_view line, std::string_view heading) {
  std::string_view s = trim(line);
  while (!s.empty() && (s.front() == '*' || s.front() == '#' || s.front() == '_')) {
    s.remove_prefix(1);
  }
  if (s.size() < heading.size() || lower(s.substr(0, heading.size())) != heading) {
    return std::nullopt;
  }
  s.remove_prefix(heading.size());
  while (!s.empty() && (s.front() == '*' || s.front() == '_')) s.remove_prefix(1);
  s = trim(s);
  if (s.empty() || s.front() != ':') return std::nullopt;
  s.remove_prefix(1);
  while (!s.empty() && (s.front() == '*' || s.front() == '_')) s.remove_prefix(1);
  return trim(s);
}

std::optional<std::string_view> strip_bullet(std::string_view line) {
  std::string_view s = trim(line);
  if (s.empty()) return std::nullopt;
  constexpr std::string_view kDot = "\xE2\x80\xA2";  // U+2022
  if (s.starts_with(kDot)) return trim(s.substr(kDot.size()));
  if (s.front() == '-' || s.front() == '*') return trim(s.substr(1));
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')')) return trim(s.substr(i + 1));
  return std::nullopt;
}

Aspect split_aspect(std::string_view item) {
  item = trim(item);
  // "**Name**: description" or "Name: description" or "Name - description".
  std::size_t cut = std::string_view::npos;
  std::size_t skip = 0;
  if (item.starts_with("**")) {
    auto close = item.find("**", 2);
    if (close != std::string_view::npos) {
      Aspect a{std::string(trim(item.substr(2, close - 2))), {}};
      std::string_view rest = trim(item.substr(close + 2));
      if (!a.name.empty() && a.name.back() == ':') a.name.pop_back();
      while (!rest.empty() && (rest.front() == ':' || rest.front() == '-')) rest.remove_prefix(1);
      a.description = std::string(trim(rest));
      return a;
    }
  }
  cut = item.find(':');
  skip = 1;
  if (cut == std::string_view::npos) {
    cut = item.find(" - ");
    skip = 3;
  }
  if (cut == std::string_view::npos) return Aspect{std::string(unwrap(item)), {}};
  return Aspect{std::string(unwrap(item.substr(0, cut))),
                std::string(trim(item.substr(cut + skip)))};
}

}  // namespace

nlohmann::ordered_json to_json(const ThemeSet& themes) {
  nlohmann::ordered_json aspects = nlohmann::ordered_json::array();
  for (const auto& a : themes.aspects) {
    aspects.push_back({{"name", a.name}, {"description", a.description}});
  }
  return {{"group", themes.group},         {"task", std::string(key(themes.task))},
          {"theme", themes.theme},         {"aspects", std::move(aspects)},
          {"source_count", themes.source_count}, {"provider", themes.provider},
          {"model", themes.model},         {"request_hash", themes.request_hash}};
}

ThemeSet theme_set_from_json(const nlohmann::json& j) {
  try {
    ThemeSet t;
    t.group = j.at("group").get<std::string>();
    auto task = parse_task(j.at("task").get<std::string>());
    if (!task) throw SchemaError("theme set has an unknown task");
    t.task = *task;
    t.theme = j.at("theme").get<std::string>();
    for (const auto& a : j.at("aspects")) {
      t.aspects.push_back({a.at("name").get<std::string>(), a.at("description").get<std::string>()});
    }
    t.source_count = j.at("source_count").get<std::size_t>();
    t.provider = j.value("provider", "");
    t.model = j.value("model", "");
    t.request_hash = j.value("request_hash", "");
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("malformed theme set: {}", e.what()));
  }
}

std::vector<std::string> collect_explanations(std::span<const PredictionRecord> records, Task task,
                                              const TruthTable& truth, std::string_view group) {
  std::vector<const PredictionRecord*> hits;
  for (const auto& r : records) {
    if (r.task != task || !r.parsed() || *r.predicted_label != group) continue;
    auto it = truth.find(r.ad_id);
    if (it != truth.end() && it->second == group) hits.push_back(&r);
  }
  std::sort(hits.begin(), hits.end(), [](const PredictionRecord* a, const PredictionRecord* b) {
    return a->ad_id < b->ad_id;
  });
  std::vector<std::string> out;
  out.reserve(hits.size());
  for (const auto* r : hits) out.push_back(r->explanation);
  return out;
}

std::string pack_explanations(std::span<const std::string> explanations) {
  std::string out;
  for (std::size_t i = 0; i < explanations.size(); ++i) {
    if (i > 0) out.push_back('\n');
    out += fmt::format("{}. {}", i + 1, trim(explanations[i]));
  }
  return out;
}

std::string audience_phrase(std::string_view group) {
  for (const auto& option : gender_label_options()) {
    if (option.key == group) return option.display;
  }
  for (const auto& option : age_label_options()) {
    if (option.key == group) return option.display;
  }
  return std::string(group);
}

std::pair<std::string, std::vector<Aspect>> parse_theme_response(std::string_view raw) {
  std::istringstream in{std::string(raw)};
  std::string line;
  std::string theme;
  std::vector<Aspect> aspects;
  bool in_aspects = false;
  while (std::getline(in, line)) {
    if (auto value = after_heading(line, "theme")) {
      if (theme.empty()) theme = std::string(unwrap(*value));
      in_aspects = false;
      continue;
    }
    if (auto value = after_heading(line, "aspects")) {
      in_aspects = true;
      if (!value->empty()) {
        if (auto item = strip_bullet(*value)) aspects.push_back(split_aspect(*item));
      }
      continue;
    }
    if (!in_aspects) continue;
    if (auto item = strip_bullet(line)) {
      Aspect a = split_aspect(*item);
      if (!a.name.empty()) aspects.push_back(std::move(a));
    }
  }
  if (theme.empty()) throw ThemeParseError("no 'Theme:' line in provider output", std::string(raw));
  if (aspects.empty()) throw ThemeParseError("no bulleted aspects in provider output", std::string(raw));
  return {std::move(theme), std::move(aspects)};
}

CompletionRequest theme_request(std::span<const std::string> explanations, std::string_view group,
                                const PromptSpec& spec, const std::string& model) {
  if (spec.task() != Task::kTheme) throw ConfigError("theme synthesis needs a theme prompt");
  if (explanations.empty()) {
    throw InputError(fmt::format("no explanations to synthesize for group '{}'", group));
  }
  return CompletionRequest{model,
                           render_prompt(spec, pack_explanations(explanations),
                                         audience_phrase(group)),
                           {}};
}

ThemeSet synthesize_themes(std::span<const std::string> explanations, std::string_view group,
                           Task task, Provider& provider, const PromptSpec& spec,
                           const std::string& model) {
  CompletionRequest request = theme_request(explanations, group, spec, model);
  CompletionResponse response = provider.complete(request);
  auto [theme, aspects] = parse_theme_response(response.text);
  ThemeSet out;
  out.group = std::string(group);
  out.task = task;
  out.theme = std::move(theme);
  out.aspects = std::move(aspects);
  out.source_count = explanations.size();
  out.provider = provider.name();
  out.model = model;
  out.request_hash = request_hash(request);
  return out;
}

}  // namespace targetlens
