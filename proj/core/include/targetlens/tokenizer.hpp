#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace targetlens {

struct TokenizerOptions {
  std::set<std::string> stopwords;  // compared after lowercasing
  std::size_t min_length = 2;
};

// Lowercases, strips URLs, turns every non-alphanumeric byte into a space and
// drops tokens shorter than min_length or listed as stopwords.
std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options = {});

// One word per line; blank lines and lines starting with '#' are ignored.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

}  // namespace targetlens
