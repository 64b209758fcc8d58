#include "targetlens/tokenizer.hpp"

#include <cctype>
#include <fstream>
#include <regex>

#include <fmt/format.h>

#include "targetlens/error.hpp"

namespace targetlens {

namespace {

const std::regex& url_pattern() {
  static const std::regex re(R"((https?://|www\.)\S+)", std::regex::ECMAScript | std::regex::icase);
  return re;
}

bool ascii_alnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options) {
  std::string stripped = std::regex_replace(std::string(text), url_pattern(), " ");

  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.size() >= options.min_length && !options.stopwords.contains(current)) {
      tokens.push_back(current);
    }
    current.clear();
  };
  for (unsigned char c : stripped) {
    if (ascii_alnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open stopword list {}", path.string()));
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string word = line.substr(first, last - first + 1);
    for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    words.insert(std::move(word));
  }
  return words;
}

}  // namespace targetlens
