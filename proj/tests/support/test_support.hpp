#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "targetlens/corpus.hpp"
#include "targetlens/report.hpp"

namespace targetlens::testing {

inline std::filesystem::path data_dir() { return TARGETLENS_DATA_DIR; }
inline std::filesystem::path fixture_dir() { return data_dir() / "fixture"; }

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() /
            ("targetlens-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// An ad fully delivered to one gender and one age band.
inline AdRecord make_ad(std::string id, std::string body, double female = 1.0,
                        AgeBand band = AgeBand::k25To34) {
  AdRecord ad;
  ad.ad_id = std::move(id);
  ad.body = std::move(body);
  ad.funding_entity = "Test Fund";
  ad.spend = {100, 199};
  ad.impressions = {1000, 4999};
  ad.gender_impressions = {1.0 - female, female, 0.0};
  ad.age_impressions[band] = 1.0;
  return ad;
}

// Replay audit over the checked-in fixture.
inline AuditConfig fixture_config() {
  AuditConfig config;
  config.input = fixture_dir() / "corpus.jsonl";
  config.provider = ProviderMode::kReplay;
  config.replay_store = fixture_dir() / "replay.jsonl";
  config.reference_values = fixture_dir() / "reference_values.json";
  config.prompts_dir = data_dir() / "prompts" / "v1";
  return config;
}

}  // namespace targetlens::testing
