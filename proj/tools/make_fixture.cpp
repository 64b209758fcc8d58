// Builds the canonical replay fixture: a synthetic 227-ad corpus, a replay
// store holding one recorded answer per (ad, task) plus one theme synthesis per
// group, and the reference values for the fairness annotations.
//
// Texts are assembled from phrase units separated by filler words. The seed is
// advanced until the per-group n-gram tables come out exactly as planned, so
// the output is fully determined by the starting seed.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "targetlens/corpus.hpp"
#include "targetlens/evaluator.hpp"
#include "targetlens/lexical.hpp"
#include "targetlens/prompt.hpp"
#include "targetlens/provider.hpp"
#include "targetlens/runner.hpp"
#include "targetlens/thematics.hpp"

namespace fs = std::filesystem;
using namespace targetlens;

namespace {

constexpr const char* kModel = "o1-preview";
constexpr const char* kRecordedAt = "2024-09-20T00:00:00Z";

// mt19937_64 output is fully specified; distributions are not, so draws are
// reduced by hand to keep the fixture identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  template <typename T>
  const T& pick(const std::vector<T>& items) { return items[below(items.size())]; }
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

struct Unit {
  std::string text;
  int count;
};

const std::string kYoungChant = "declare climate emergency, need bold climate leaders, protect";

const std::map<std::string, std::vector<Unit>>& unit_plans() {
  static const std::map<std::string, std::vector<Unit>> plans = {
      {"male",
       {{"10 million trees", 2}, {"10 million", 1}, {"million trees", 1},
        {"carbon emissions 50%", 2}, {"clean energy corridor", 2}, {"clean energy", 2},
        {"don't live way", 2}, {"Torched Earth Ale", 2}, {"fighting climate change and", 1},
        {"climate change", 4}, {"Build Back Better", 1}, {"protect your kids", 1},
        {"affordable child care", 1}}},
      {"female",
       {{"Build Back Better", 6}, {"protect your kids", 4}, {"affordable child care", 3},
        {"fighting climate change and", 3}, {"climate change", 4}, {"clean energy corridor", 2},
        {"clean energy", 3}, {"10 million trees", 2}, {"10 million", 1}, {"million trees", 1},
        {"carbon emissions 50%", 2}, {"carbon emissions", 1}, {"don't live way", 2},
        {"Torched Earth Ale", 1}}},
      {"young",
       {{kYoungChant, 6}, {"declare climate emergency", 4}, {"bold climate", 4},
        {"fight climate change", 5}, {"fight climate", 1},
        {"fueling America's clean energy future", 2}, {"America's clean energy future", 1},
        {"America's clean", 2}, {"clean energy", 2}, {"energy future", 3},
        {"California treestoglobe.org", 2}}},
      {"early_working",
       {{"fight climate change", 6}, {"climate change", 3},
        {"fueling America's clean energy future", 2}, {"America's clean energy future", 1},
        {"clean energy", 3}, {"California treestoglobe.org", 1}, {kYoungChant, 1},
        {"declare climate", 1}, {"climate emergency", 1}, {"bold climate", 1},
        {"climate leaders", 1}, {"emergency need", 1}}},
  };
  return plans;
}

// Expected top-5 tables, in the library's sort order (count desc, then n-gram).
using Expected = std::vector<std::pair<std::string, std::int64_t>>;

const std::map<std::pair<std::string, int>, Expected>& expected_tables() {
  static const std::map<std::pair<std::string, int>, Expected> tables = {
      {{"male", 2},
       {{"climate change", 5}, {"clean energy", 4}, {"10 million", 3}, {"million trees", 3},
        {"carbon emissions", 2}}},
      {{"male", 3},
       {{"10 million trees", 2}, {"carbon emissions 50", 2}, {"clean energy corridor", 2},
        {"don live way", 2}, {"torched earth ale", 2}}},
      {{"female", 2},
       {{"climate change", 7}, {"back better", 6}, {"build back", 6}, {"clean energy", 5},
        {"protect your", 4}}},
      {{"female", 3},
       {{"build back better", 6}, {"protect your kids", 4}, {"affordable child care", 3},
        {"climate change and", 3}, {"fighting climate change", 3}}},
      {{"young", 2},
       {{"bold climate", 10}, {"climate emergency", 10}, {"declare climate", 10},
        {"climate leaders", 6}, {"emergency need", 6}}},
      {{"young", 3},
       {{"declare climate emergency", 10}, {"bold climate leaders", 6},
        {"climate emergency need", 6}, {"climate leaders protect", 6}, {"emergency need bold", 6}}},
      {{"early_working", 2},
       {{"climate change", 10}, {"fight climate", 7}, {"clean energy", 6}, {"america clean", 3},
        {"energy future", 3}}},
      {{"early_working", 3},
       {{"fight climate change", 7}, {"america clean energy", 3}, {"clean energy future", 3},
        {"california treestoglobe org", 2}, {"fueling america clean", 2}}},
  };
  return tables;
}

const std::vector<std::string>& filler_source() {
  static const std::vector<std::string> words = {
      "join",      "today",     "support",   "community", "planet",    "solar",
      "wind",      "forests",   "rivers",    "ocean",     "vote",      "donate",
      "learn",     "more",      "local",     "jobs",      "green",     "neighbors",
      "together",  "action",    "campaign",  "matters",   "power",     "homes",
      "families",  "safe",      "air",       "water",     "land",      "wildlife",
      "public",    "lands",     "policy",    "leaders",   "science",   "state",
      "county",    "city",      "farmers",   "workers",   "coalition", "sign",
      "petition",  "now",       "help",      "stand",     "with",      "us",
      "this",      "week",      "grants",    "program",   "rebates",   "savings",
      "efficient", "buildings", "transit",   "bikes",     "electric",  "vehicles",
      "charging",  "stations",  "recycling", "plastic",   "waste",     "heat",
      "wave",      "drought",   "floods",    "wildfire",  "smoke",     "coastal",
      "storms",    "resilient", "infrastructure", "grid",  "battery",   "storage",
      "innovation", "research", "students",  "parents",   "teachers",  "schools",
      "health",    "clinics",   "seniors",   "retirees",  "veterans",  "hunters",
      "anglers",   "ranchers",  "growers",   "orchards",  "soil",      "carbon",
      "pricing",   "markets",   "investors", "pension",   "funds",     "divest",
      "fossil",    "fuel",      "pipeline",  "permits",   "council",   "mayor",
      "governor",  "senate",    "house",     "bill",      "passed",    "record",
      "progress",  "goals",     "targets",   "pledge",    "commit",    "plan",
      "lower",     "bills",     "fair",      "prices",    "cleaner",   "skies",
      "healthy",   "kids",      "summer",    "winter",    "spring",    "harvest",
      "brewery",   "coffee",    "garden",    "trail",     "parks",     "river",
      "volunteer", "event",     "saturday",  "register",  "free",      "webinar",
  };
  return words;
}

// Filler words that share no token with any planned unit.
std::vector<std::string> filler_words() {
  std::set<std::string> planned;
  for (const auto& [group, units] : unit_plans()) {
    for (const auto& u : units) {
      for (const auto& t : tokenize(u.text)) planned.insert(t);
    }
  }
  std::vector<std::string> out;
  for (const auto& w : filler_source()) {
    if (!planned.contains(w)) out.push_back(w);
  }
  return out;
}

// Real-world texts that end up in the misclassification ledger.
struct Designated {
  Task task;
  std::string truth;
  std::string prediction;
  std::string text;
  std::string explanation;
};

const std::vector<Designated>& designated() {
  static const std::vector<Designated> items = {
      {Task::kGender, "male", "female",
       "Meet the first carbon negative fragrance. Air Eau de Parfum converts CO2 into something "
       "beautiful: sustainable ethanol blended with notes of orange peel, fig leaf, powdery musk "
       "and tobacco invigorating scent that redefines what is possible. Available exclusively at "
       "aircompany.com",
       "The fragrance notes like fig leaf, powdery musk, and sustainable ethanol typically "
       "resonate more with female audiences in fragrance marketing."},
      {Task::kGender, "female", "male",
       "Over generations, Illinois farm families have learned how to work with our climate to "
       "produce healthy crops and livestock.",
       "The ad emphasizes farming and agriculture, traditionally male-dominated fields, making "
       "men the more likely target audience for this message."},
      {Task::kAge, "young", "early_working",
       "Renewable energy is projected to surpass fossil gas as the dominant source of energy "
       "production by 2030. Texas, a leader in wind output, is in a great position as the nation "
       "transitions.",
       "This group is likely investing in sustainable energy options, driven by long-term "
       "economic and environmental considerations."},
      {Task::kAge, "early_working", "young",
       "Take Action Now to Fight Climate Change! Plant a tree in California "
       "treestoglobe.org/plantingchallengecalifornia",
       "This age group is often more environmentally active and responds well to social media "
       "campaigns promoting climate action initiatives."},
      {Task::kAge, "late_working", "early_working",
       "The worst impacts of climate change could be irreversible by 2030. The time to switch to "
       "a renewable energy plan is now. Not tomorrow. Not next week.",
       "They can switch energy plans and are motivated to act before irreversible impacts by "
       "2030."},
      {Task::kAge, "senior", "young",
       "The Hebrew University Center for Climate Science was established in Israel to fight "
       "climate change worldwide.",
       "A university research centre reads as an appeal to students choosing where to study "
       "climate topics."},
      {Task::kAge, "senior", "young",
       "Tell Rep. Schrader: Now is the time to go big on climate. VOTE YES on the Build Back "
       "Better Act.",
       "A call to lobby a representative on climate policy fits younger voters who campaign "
       "on environmental issues."},
      {Task::kAge, "senior", "young",
       "Get clean water and pollution-free electricity to all of America.",
       "Targets environmentally conscious young adults concerned about sustainability and future "
       "impact of clean water and energy."},
      {Task::kAge, "senior", "late_working",
       "Let's make one thing clear: Pennsylvania will be the single most competitive Senate race "
       "of 2022... It's one of the reasons I am running for the U.S. Senate seat in Pennsylvania.",
       "A competitive Senate race framed around household budgets and recent political history "
       "suits voters in mid to late career."},
      {Task::kAge, "senior", "senior",
       "Extreme heat is dangerous after 65. Call the county cooling line for a free ride to an "
       "air-conditioned center and a wellness check.",
       "Heat risk, wellness checks and transport to cooling centers speak to older residents "
       "who face higher health risks in extreme weather."},
      {Task::kAge, "senior", "senior",
       "Medicare members: your plan now covers free fitness classes and home energy safety "
       "visits. Enroll before the winter storms.",
       "Medicare coverage, fitness classes and home safety visits are benefits aimed at people "
       "aged 65 and over."},
  };
  return items;
}

// Group sizes and confusion rows, in label order.
const std::map<std::string, std::map<std::string, int>>& outcome_plan() {
  static const std::map<std::string, std::map<std::string, int>> plan = {
      {"female", {{"female", 56}, {"male", 3}}},
      {"male", {{"female", 7}, {"male", 40}}},
      {"young", {{"young", 22}, {"early_working", 2}, {"late_working", 1}}},
      {"early_working", {{"young", 4}, {"early_working", 74}, {"late_working", 4}}},
      {"late_working", {{"early_working", 2}, {"late_working", 6}}},
      {"senior", {{"young", 3}, {"late_working", 1}, {"senior", 2}}},
  };
  return plan;
}

Task task_of(const std::string& group) {
  return (group == "male" || group == "female") ? Task::kGender : Task::kAge;
}

// Explanation fragments for correct and mistaken predictions, by predicted label.
const std::map<std::string, std::vector<std::string>>& reasons() {
  static const std::map<std::string, std::vector<std::string>> items = {
      {"male",
       {"The ad leans on technology and engineering details, which campaigns usually aim at men.",
        "Talk of costs, markets and returns on investment frames this as a financial pitch to men.",
        "References to land, acreage and property value point to male landowners.",
        "Brewing, hunting and outdoor trades are framed as traditionally male pastimes.",
        "The message centers on infrastructure and energy policy debates that skew male.",
        "A skeptical, cost-focused tone mirrors messaging aimed at conservative men."}},
      {"female",
       {"The appeal to protecting children and family health speaks to mothers and caregivers.",
        "Concern for a cleaner environment for the next generation targets women.",
        "Child care, paid leave and community support are framed as priorities for women.",
        "The emotional, empathetic wording is typical of ads written for women.",
        "It celebrates women leaders and scientists, addressing a female audience.",
        "Health and safety worries for the household point to women as the audience."}},
      {"young",
       {"Calls to declare an emergency and demand bold leadership fit young activists.",
        "The urgent, movement-style language appeals to students and first-time voters.",
        "It invites readers to trainings and organizing, which draws young adults.",
        "Demands for immediate change match the impatience of young climate voters.",
        "Campus-style activism and social sharing point to an audience aged 18 to 24."}},
      {"early_working",
       {"Practical savings on home energy suit working adults with their own households.",
        "The ad assumes disposable income to invest in cleaner options, typical of ages 25-44.",
        "Mentions of children's futures address parents in their early working years.",
        "Career and workplace framing targets professionals building their careers.",
        "New technology and innovation are pitched to tech-savvy working adults.",
        "Civic engagement asks fit adults settled in communities and voting regularly."}},
      {"late_working",
       {"Home upgrades and property value concerns match established homeowners aged 45-64.",
        "Balancing economic and environmental responsibility speaks to late-career adults.",
        "The focus on voting and policy choices targets reliable middle-aged voters.",
        "Worries about bills and the local economy resonate with people nearing retirement."}},
      {"senior",
       {"Health programs and safety checks are pitched to residents over 65.",
        "The emphasis on vulnerability during emergencies targets senior citizens."}},
  };
  return items;
}

std::string response_text(const std::string& label, const std::string& explanation,
                          std::size_t variant) {
  std::string display;
  for (const auto& o : gender_label_options()) {
    if (o.key == label) display = o.display;
  }
  for (const auto& o : age_label_options()) {
    if (o.key == label) display = o.display;
  }
  switch (variant % 3) {
    case 0:
      return fmt::format("Label: {}\nExplanation: {}", display, explanation);
    case 1:
      return fmt::format("Predicted label: {}\nReasoning: {}", display, explanation);
    default:
      return fmt::format("label: {}\n\nexplanation: {}\n", display, explanation);
  }
}

struct Theme {
  std::string group;
  std::string theme;
  std::vector<std::pair<std::string, std::string>> aspects;
};

const std::vector<Theme>& themes() {
  static const std::vector<Theme> items = {
      {"female",
       "Roles as Caregivers, Environmental Advocates, and Socially Conscious Individuals",
       {{"Parental and Caregiving Roles", "Ads invoking children, family health and caregiving."},
        {"Environmental Consciousness", "Concern for a livable planet for future generations."},
        {"Social Welfare and Community Involvement", "Child care, paid leave and local support."},
        {"Empathy and Emotional Appeal", "Warm, emotive wording that invites personal concern."},
        {"Female Empowerment and Leadership", "Stories that feature women leading and deciding."},
        {"Health and Safety Concerns", "Household health risks and safety at home."}}},
      {"male",
       "Perceived Interests and Roles",
       {{"Interest in Technology and Innovation", "Engineering, gadgets and new energy technology."},
        {"Focus on Economic and Financial Issues", "Costs, markets, investment and returns."},
        {"Property and Land Management", "Land ownership, acreage and property value."},
        {"Traditional Male Activities", "Brewing, hunting, trades and outdoor work."},
        {"Engagement in Political and Infrastructure Topics", "Energy policy and public works."},
        {"Conservative Views and Skepticism", "Cost-focused, skeptical framing of climate policy."}}},
      {"early_working",
       "Proactive and Responsible Mindset",
       {{"Environmental Consciousness", "Willingness to act on climate in daily choices."},
        {"Financial Stability and Disposable Income", "Means to invest in cleaner options."},
        {"Parental and Future Concerns", "Raising children and planning for their future."},
        {"Career Engagement and Professional Roles", "Workplace and career framing."},
        {"Interest in Innovation and Technology", "Openness to new products and tools."},
        {"Social and Political Engagement", "Voting, civic asks and community roles."}}},
      {"late_working",
       "Responsibilities and Concerns",
       {{"Economic and Environmental Responsibility", "Weighing budgets against stewardship."},
        {"Homeownership and Financial Stability", "Home upgrades and property value."},
        {"Voter and Policy Engagement", "Reliable voters attentive to policy choices."},
        {"Economic Concerns", "Bills, jobs and the local economy."}}},
      {"senior",
       "Health and Safety Concerns",
       {{"Health and Wellness Programs", "Coverage, fitness and wellness offerings."},
        {"Vulnerability and Safety", "Higher risk in heat, storms and emergencies."}}},
      {"young",
       "Activism and Environmental Consciousness",
       {{"Passion for Climate Action", "Eager, energetic calls to act on climate."},
        {"Support for Bold Environmental Leadership", "Demands for bold leaders and emergencies."},
        {"Engagement with Activism", "Organizing, marches and online campaigns."},
        {"Desire for Immediate Change", "Impatience with slow, incremental policy."},
        {"Participation in Training and Advocacy", "Trainings and advocacy programs."}}},
  };
  return items;
}

std::string theme_response(const Theme& t, std::size_t style) {
  std::string out = fmt::format("Theme: {}\nAspects:\n", t.theme);
  for (std::size_t i = 0; i < t.aspects.size(); ++i) {
    const auto& [name, description] = t.aspects[i];
    switch (style % 3) {
      case 0:
        out += fmt::format("- {}: {}\n", name, description);
        break;
      case 1:
        out += fmt::format("\xE2\x80\xA2 {}: {}\n", name, description);
        break;
      default:
        out += fmt::format("{}. {}: {}\n", i + 1, name, description);
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct AdSpec {
  std::string group;       // ground truth
  std::string prediction;  // recorded answer
  std::string explanation;
  std::optional<std::string> fixed_text;
  std::vector<std::string> units;
};

std::vector<AdSpec> plan_ads(Rng& rng) {
  std::vector<AdSpec> ads;
  std::map<std::pair<std::string, std::string>, int> remaining;
  for (const auto& [truth, row] : outcome_plan()) {
    for (const auto& [pred, n] : row) remaining[{truth, pred}] = n;
  }
  for (const auto& d : designated()) {
    --remaining[{d.truth, d.prediction}];
    ads.push_back({d.truth, d.prediction, d.explanation, d.text, {}});
  }
  for (const auto& [cell, n] : remaining) {
    if (n < 0) throw std::logic_error("designated ads exceed the outcome plan");
    for (int i = 0; i < n; ++i) {
      ads.push_back({cell.first, cell.second, rng.pick(reasons().at(cell.second)), std::nullopt, {}});
    }
  }

  // Spread each group's units over its generated (not designated) ads.
  for (const auto& [group, units] : unit_plans()) {
    std::vector<std::string> pool;
    for (const auto& u : units) {
      for (int i = 0; i < u.count; ++i) pool.push_back(u.text);
    }
    rng.shuffle(pool);
    std::vector<AdSpec*> targets;
    for (auto& ad : ads) {
      if (ad.group == group && !ad.fixed_text) targets.push_back(&ad);
    }
    rng.shuffle(targets);
    for (std::size_t i = 0; i < pool.size(); ++i) targets[i % targets.size()]->units.push_back(pool[i]);
  }
  return ads;
}

std::string compose_text(const AdSpec& spec, const std::vector<std::string>& filler, Rng& rng) {
  if (spec.fixed_text) return *spec.fixed_text;
  const std::size_t n_filler = 6 + rng.below(10) + spec.units.size();
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n_filler; ++i) words.push_back(rng.pick(filler));
  // Distinct interior gaps keep units apart from one another.
  std::vector<std::size_t> gaps;
  for (std::size_t g = 1; g < words.size(); ++g) gaps.push_back(g);
  rng.shuffle(gaps);
  gaps.resize(spec.units.size());
  std::sort(gaps.begin(), gaps.end(), std::greater<>());
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(gaps[i]), spec.units[i]);
  }
  std::string text;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) text += (rng.below(9) == 0) ? ". " : " ";
    text += words[i];
  }
  text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  return text + ".";
}

Range pick_range(Rng& rng, const std::vector<Range>& ranges) { return rng.pick(ranges); }

AdRecord make_record(const AdSpec& spec, std::string id, std::string text, Rng& rng) {
  static const std::vector<std::string> funders = {
      "Clean Air Action Fund", "Green Future Alliance", "Coalition for Climate Jobs",
      "Citizens for Public Lands", "Renewable Neighbors PAC", "Climate Voters Network"};
  static const std::vector<Range> spends = {{0, 99}, {100, 199}, {200, 499}, {500, 999}, {1000, 4999}};
  static const std::vector<Range> reach = {{1000, 4999}, {5000, 9999}, {10000, 49999}, {50000, 99999}};

  AdRecord ad;
  ad.ad_id = std::move(id);
  ad.body = std::move(text);
  ad.funding_entity = rng.pick(funders);
  ad.spend = pick_range(rng, spends);
  ad.impressions = pick_range(rng, reach);

  auto weights = [&](std::size_t n) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (auto& x : w) sum += (x = 1.0 + static_cast<double>(rng.below(20)));
    for (auto& x : w) x /= sum;
    return w;
  };

  if (task_of(spec.group) == Task::kGender) {
    const double unknown = 0.01 * static_cast<double>(rng.below(4));
    if (spec.group == "male") {
      ad.gender_impressions = {1.0 - unknown, 0.0, unknown};
    } else {
      ad.gender_impressions = {0.0, 1.0 - unknown, unknown};
    }
    // Age mass spread over every adult band, so no bucket is exclusive.
    auto w = weights(6);
    for (std::size_t i = 0; i < 6; ++i) ad.age_impressions[kAllAgeBands[i + 1]] = w[i];
  } else {
    const double female = 0.35 + 0.01 * static_cast<double>(rng.below(30));
    ad.gender_impressions = {1.0 - female, female, 0.0};
    std::vector<AgeBand> bands;
    if (spec.group == "young") bands = {AgeBand::k18To24};
    if (spec.group == "early_working") bands = {AgeBand::k25To34, AgeBand::k35To44};
    if (spec.group == "late_working") bands = {AgeBand::k45To54, AgeBand::k55To64};
    if (spec.group == "senior") bands = {AgeBand::k65Plus};
    // Some young-audience ads also reach 13-17, which does not count.
    const bool teens = spec.group == "young" && rng.below(3) == 0;
    auto w = weights(bands.size() + (teens ? 1 : 0));
    for (std::size_t i = 0; i < bands.size(); ++i) ad.age_impressions[bands[i]] = w[i];
    if (teens) ad.age_impressions[AgeBand::k13To17] = w.back();
  }
  return ad;
}

bool tables_match(const LexicalAnalysis& lexical, bool verbose) {
  bool ok = true;
  for (const auto& table : lexical.tables) {
    auto it = expected_tables().find({table.group, table.order});
    if (it == expected_tables().end()) {
      if (verbose) std::cerr << "unexpected table " << table.group << "\n";
      ok = false;
      continue;
    }
    Expected got;
    for (const auto& e : table.entries) got.emplace_back(join_ngram(e.ngram), e.count);
    if (got != it->second) {
      ok = false;
      if (verbose) {
        std::cerr << table.group << " order " << table.order << ":";
        for (const auto& [g, c] : got) std::cerr << " [" << g << " " << c << "]";
        std::cerr << "\n";
      }
    }
  }
  for (const auto& test : lexical.tests) {
    if (!test.result || test.result->p_value <= 0.05) ok = false;
  }
  return ok && lexical.tables.size() == expected_tables().size();
}

struct Fixture {
  std::vector<AdRecord> corpus;
  std::vector<AdSpec> specs;  // parallel to corpus
  std::uint64_t seed = 0;
};

Fixture build_corpus(std::uint64_t first_seed, int attempts, bool verbose) {
  const auto filler = filler_words();
  for (int attempt = 0; attempt < attempts; ++attempt) {
    const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(attempt);
    Rng rng(seed);
    auto specs = plan_ads(rng);
    rng.shuffle(specs);
    Fixture f;
    f.seed = seed;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      std::string text = compose_text(specs[i], filler, rng);
      f.corpus.push_back(make_record(specs[i], fmt::format("ad-{:04d}", i + 1), std::move(text), rng));
    }
    f.specs = std::move(specs);
    auto labeled = derive_targets(f.corpus);
    if (tables_match(analyze_lexical(labeled), verbose && attempt == attempts - 1)) return f;
  }
  throw std::runtime_error("no seed produced the planned n-gram tables");
}

nlohmann::ordered_json reference_values() {
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  auto add = [&](const char* axis, const char* group, const char* metric, double value, int dp) {
    items.push_back({{"axis", axis}, {"group", group}, {"metric", metric}, {"value", value},
                     {"decimals", dp}});
  };
  add("gender", "female", "dp_ratio", 1.0678, 4);
  add("gender", "male", "dp_ratio", 0.9149, 4);
  add("gender", "female", "tpr", 0.95, 2);
  add("gender", "male", "tpr", 0.85, 2);
  add("gender", "female", "fpr", 0.07, 2);
  add("gender", "male", "fpr", 0.05, 2);
  add("age", "early_working", "dp_ratio", 0.95, 2);
  add("age", "late_working", "dp_ratio", 1.50, 2);
  add("age", "senior", "dp_ratio", 0.33, 2);
  add("age", "young", "dp_ratio", 1.16, 2);
  add("age", "early_working", "tpr", 0.90, 2);
  add("age", "late_working", "tpr", 0.75, 2);
  add("age", "senior", "tpr", 0.33, 2);
  add("age", "young", "tpr", 0.88, 2);
  add("age", "early_working", "fpr", 0.10, 2);
  add("age", "late_working", "fpr", 0.05, 2);
  add("age", "senior", "fpr", 0.00, 2);
  add("age", "young", "fpr", 0.07, 2);
  return {{"fairness", std::move(items)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the canonical replay fixture"};
  fs::path out = "data/fixture";
  std::uint64_t seed = 1;
  int attempts = 5000;
  fs::path prompts_out;
  bool verbose = false;
  app.add_option("--out", out, "Output directory");
  app.add_option("--prompts-out", prompts_out, "Also write the built-in prompt files here");
  app.add_option("--seed", seed, "First seed to try");
  app.add_option("--attempts", attempts, "Seeds to try before giving up");
  app.add_flag("--verbose", verbose, "Print the last mismatching tables");
  CLI11_PARSE(app, argc, argv);

  try {
    Fixture f = build_corpus(seed, attempts, verbose);
    const PromptSet prompts = PromptSet::defaults();

    // Prediction answers, keyed by the exact request the runner will send.
    auto store = std::make_shared<ReplayStore>();
    std::size_t variant = 0;
    for (std::size_t i = 0; i < f.corpus.size(); ++i) {
      const AdSpec& spec = f.specs[i];
      const PromptSpec& ps = prompts.for_task(task_of(spec.group));
      CompletionRequest request{kModel, render_prompt(ps, ad_text(f.corpus[i])), {}};
      store->append({request_hash(request), kModel, request.prompt,
                     response_text(spec.prediction, spec.explanation, variant++), kRecordedAt});
    }

    // Replay through the real pipeline and check the outcome plan.
    auto labeled = derive_targets(f.corpus);
    RunOptions options;
    options.model = kModel;
    options.clock = [] { return std::string(kRecordedAt); };
    ReplayProvider replay(store);
    auto run = run_predictions(labeled, options, &replay, prompts);
    std::map<std::string, const AdSpec*> by_id;
    for (std::size_t i = 0; i < f.corpus.size(); ++i) by_id[f.corpus[i].ad_id] = &f.specs[i];
    for (const auto& r : run.records) {
      const AdSpec* spec = by_id.at(r.ad_id);
      if (!r.parsed() || *r.predicted_label != spec->prediction || r.explanation != spec->explanation) {
        throw std::runtime_error(fmt::format("ad {} did not replay as planned: {}", r.ad_id,
                                             r.raw_response));
      }
    }

    std::size_t style = 0;
    for (const auto& theme : themes()) {
      const Task task = task_of(theme.group);
      auto explanations =
          collect_explanations(run.records, task, truth_for(labeled, task), theme.group);
      CompletionRequest request = theme_request(explanations, theme.group, prompts.theme, kModel);
      store->append({request_hash(request), kModel, request.prompt, theme_response(theme, style++),
                     kRecordedAt});
    }

    fs::create_directories(out);
    {
      std::ofstream corpus(out / "corpus.jsonl", std::ios::binary);
      write_corpus(corpus, f.corpus, CorpusFormat::kJsonl);
    }
    {
      std::ofstream replay_out(out / "replay.jsonl", std::ios::binary);
      store->write(replay_out);
    }
    {
      std::ofstream refs(out / "reference_values.json", std::ios::binary);
      refs << reference_values().dump(2) << "\n";
    }
    if (!prompts_out.empty()) {
      fs::create_directories(prompts_out);
      for (Task task : {Task::kGender, Task::kAge, Task::kTheme}) {
        std::ofstream file(prompts_out / fmt::format("{}.prompt", key(task)), std::ios::binary);
        file << serialize_prompt_file(prompts.for_task(task));
      }
    }
    std::cout << fmt::format("seed {}: {} ads, {} replay entries written to {}\n", f.seed,
                             f.corpus.size(), store->size(), out.string());
  } catch (const std::exception& e) {
    std::cerr << "make_fixture: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
