#include <cctype>
#include <set>
#include <vector>

#include "targetlens/prompt.hpp"

namespace targetlens {

namespace {

// Lowercases and collapses everything but alphanumerics to single spaces.
// Keeps '-' between digits and a '+' after a digit so "18-24" and "65+" survive.
std::string normalize(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    const char prev = out.empty() ? ' ' : out.back();
    if (c < 0x80 && std::isalnum(c)) {
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (c == '-' && is_digit(prev) && i + 1 < s.size() && is_digit(s[i + 1])) {
      out.push_back('-');
    } else if (c == '+' && is_digit(prev)) {
      out.push_back('+');
    } else if (prev != ' ') {
      out.push_back(' ');
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> forms_of(const LabelOption& option) {
  std::vector<std::string> forms;
  std::string key = option.key;
  for (char& c : key) {
    if (c == '_') c = ' ';
  }
  for (const auto& f : {key, option.display}) forms.push_back(normalize(f));
  for (const auto& s : option.synonyms) forms.push_back(normalize(s));
  return forms;
}

bool contains_phrase(const std::string& padded_text, const std::string& form) {
  return !form.empty() && padded_text.find(" " + form + " ") != std::string::npos;
}

// Indices of label options mentioned in `text` at word boundaries.
std::set<std::size_t> mentioned(std::string_view text, const std::vector<LabelOption>& labels) {
  const std::string padded = " " + normalize(text) + " ";
  std::set<std::size_t> hits;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (const auto& form : forms_of(labels[i])) {
      if (contains_phrase(padded, form)) {
        hits.insert(i);
        break;
      }
    }
  }
  return hits;
}

std::optional<std::size_t> exact_option(std::string_view text,
                                        const std::vector<LabelOption>& labels) {
  const std::string norm = normalize(text);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (const auto& form : forms_of(labels[i])) {
      if (norm == form) return i;
    }
  }
  return std::nullopt;
}

struct Line {
  std::size_t begin;  // offset into raw
  std::size_t end;
};

std::vector<Line> split_lines(std::string_view raw) {
  std::vector<Line> lines;
  std::size_t start = 0;
  while (start <= raw.size()) {
    auto nl = raw.find('\n', start);
    if (nl == std::string_view::npos) nl = raw.size();
    lines.push_back({start, nl});
    start = nl + 1;
  }
  return lines;
}

// For "**Predicted Label**: x" returns the offset just past the colon when the
// text before the colon ends with `field`.
std::optional<std::size_t> field_value_offset(std::string_view line, std::string_view field) {
  const auto colon = line.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const std::string head = normalize(line.substr(0, colon));
  if (head.size() < field.size() ||
      head.compare(head.size() - field.size(), field.size(), field) != 0) {
    return std::nullopt;
  }
  if (head.size() > field.size() && head[head.size() - field.size() - 1] != ' ') {
    return std::nullopt;
  }
  return colon + 1;
}

}  // namespace

LabelParse parse_label_response(std::string_view raw, const std::vector<LabelOption>& label_set) {
  const auto lines = split_lines(raw);

  std::optional<std::size_t> label_line;
  std::optional<std::size_t> label;
  for (std::size_t i = 0; i < lines.size() && !label_line; ++i) {
    const auto line = raw.substr(lines[i].begin, lines[i].end - lines[i].begin);
    if (auto offset = field_value_offset(line, "label")) {
      label_line = i;
      const auto value = line.substr(*offset);
      if (auto exact = exact_option(value, label_set)) {
        label = exact;
      } else if (auto hits = mentioned(value, label_set); hits.size() == 1) {
        label = *hits.begin();
      }
    }
  }
  if (!label) {
    if (auto hits = mentioned(raw, label_set); hits.size() == 1) label = *hits.begin();
  }
  if (!label) return {std::nullopt, std::string(raw)};

  LabelParse result;
  result.label = label_set[*label].key;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = raw.substr(lines[i].begin, lines[i].end - lines[i].begin);
    std::optional<std::size_t> offset = field_value_offset(line, "explanation");
    if (!offset) offset = field_value_offset(line, "reasoning");
    if (!offset) continue;
    // Runs to the end of the text, stopping early at a later label line.
    std::size_t stop = raw.size();
    if (label_line && *label_line > i) stop = lines[*label_line].begin;
    const auto value = trim(raw.substr(lines[i].begin + *offset, stop - lines[i].begin - *offset));
    result.explanation = std::string(value);
    return result;
  }

  std::string residual;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (label_line && i == *label_line) continue;
    if (!residual.empty()) residual.push_back('\n');
    residual += raw.substr(lines[i].begin, lines[i].end - lines[i].begin);
  }
  result.explanation = std::string(trim(residual));
  return result;
}

}  // namespace targetlens
