/*
 * Copyright 2026 The GRM Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Writes the bundled mini benchmark into a directory:
//   corpus.jsonl topics.tsv qrels.txt folds.json completions.jsonl
//   scores.tsv grm.conf golden_bm25.run
// Output depends only on the seed, so rerunning reproduces the files.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "grm/generation/chat_provider.hpp"
#include "grm/generation/generator.hpp"
#include "grm/text/analyzer.hpp"
#include "support/oracles.hpp"

namespace {

using Words = std::vector<std::string>;

struct TopicSpec {
  std::string qid;
  std::string query;
  Words words;    // on-topic vocabulary
  Words aspects;  // subtopic phrases
  int confusable; // index of a topic sharing surface words
};

const std::vector<TopicSpec>& topic_specs() {
  static const std::vector<TopicSpec> specs = {
      {"401", "coral reef bleaching",
       {"coral", "reefs", "bleaching", "bleached", "algae", "symbiotic", "polyps", "warming", "ocean",
        "temperatures", "heatwaves", "zooxanthellae", "marine", "acidification", "recovery", "snorkelers",
        "spawning", "lagoon", "barrier", "monitoring"},
       {"Ocean heat waves", "Symbiotic algae loss", "Reef recovery", "Tourism impact", "Monitoring surveys",
        "Acidification", "Coral spawning", "Local protection"},
       9},
      {"402", "electric vehicle batteries",
       {"electric", "vehicles", "batteries", "battery", "charging", "lithium", "cells", "cathode", "range",
        "cars", "automakers", "kilowatt", "chargers", "degradation", "recycling", "nickel", "cobalt",
        "packs", "drivers", "grid"},
       {"Battery chemistry", "Charging networks", "Driving range", "Battery degradation", "Cobalt supply",
        "Pack recycling", "Cost trends", "Grid load"},
       6},
      {"403", "antibiotic resistance in hospitals",
       {"antibiotic", "antibiotics", "resistance", "resistant", "bacteria", "hospitals", "infections",
        "patients", "mrsa", "superbugs", "prescribing", "stewardship", "clinicians", "wards", "strains",
        "hygiene", "outbreaks", "microbial", "doses", "surveillance"},
       {"Hospital infections", "Prescribing practices", "Stewardship programs", "Resistant strains",
        "Hand hygiene", "Outbreak surveillance", "New antibiotics", "Patient outcomes"},
       7},
      {"404", "volcanic ash and air travel",
       {"volcanic", "volcano", "eruption", "erupted", "ash", "plume", "flights", "airlines", "airspace",
        "aviation", "engines", "cancelled", "passengers", "jet", "iceland", "clouds", "airports",
        "grounded", "pilots", "silica"},
       {"Airspace closures", "Engine damage", "Stranded passengers", "Ash cloud forecasting", "Airline losses",
        "Eruption monitoring", "Safety rules", "Iceland 2010"},
       8},
      {"405", "urban beekeeping",
       {"bees", "beekeeping", "beekeepers", "hives", "honey", "urban", "rooftop", "colonies", "pollinators",
        "swarms", "queen", "apiary", "nectar", "gardens", "pollen", "stings", "varroa", "mites",
        "city", "flowers"},
       {"Rooftop hives", "City regulations", "Pollinator health", "Honey yields", "Swarm management",
        "Varroa mites", "Community gardens", "Neighbor concerns"},
       0},
      {"406", "minimum wage employment effects",
       {"minimum", "wage", "wages", "employment", "workers", "jobs", "employers", "hourly", "economists",
        "labor", "hiring", "earnings", "restaurants", "unemployment", "raise", "payroll", "teens",
        "inflation", "businesses", "hours"},
       {"Job losses", "Teen employment", "Restaurant sector", "Earnings gains", "Regional differences",
        "Inflation effects", "Hiring practices", "Economist studies"},
       1},
      {"407", "lithium mining water use",
       {"lithium", "mining", "mines", "brine", "water", "aquifers", "salt", "flats", "atacama", "evaporation",
        "ponds", "extraction", "communities", "indigenous", "drought", "chile", "argentina", "groundwater",
        "miners", "wetlands"},
       {"Brine evaporation", "Aquifer depletion", "Indigenous communities", "Atacama salt flats",
        "Water permits", "Drought", "Alternative extraction", "Wetland ecology"},
       1},
      {"408", "childhood vaccination rates",
       {"vaccination", "vaccines", "vaccinated", "children", "measles", "immunization", "rates", "parents",
        "pediatricians", "schools", "exemptions", "doses", "outbreaks", "coverage", "kindergarten",
        "hesitancy", "mumps", "clinics", "booster", "health"},
       {"Measles outbreaks", "School exemptions", "Vaccine hesitancy", "Coverage statistics",
        "Pediatric clinics", "Booster schedules", "Public campaigns", "Rural access"},
       2},
      {"409", "solar panel recycling",
       {"solar", "panels", "photovoltaic", "recycling", "recycled", "modules", "silicon", "glass", "waste",
        "landfills", "silver", "frames", "installers", "decommissioned", "recyclers", "disposal",
        "aluminum", "shredding", "recovery", "rooftops"},
       {"Panel waste volumes", "Silicon recovery", "Glass and frames", "Landfill rules", "Silver reclamation",
        "Recycling costs", "Installer programs", "End of life"},
       6},
      {"410", "deep sea fishing regulations",
       {"fishing", "fisheries", "trawlers", "trawling", "deep", "sea", "quotas", "catch", "fleets",
        "regulations", "bycatch", "seabed", "species", "fishermen", "vessels", "orange", "roughy",
        "nets", "stocks", "enforcement"},
       {"Bottom trawling", "Catch quotas", "Bycatch rules", "Seabed protection", "Fleet enforcement",
        "Stock assessments", "Orange roughy", "International waters"},
       0},
  };
  return specs;
}

const Words& general_words() {
  static const Words w = {
      "report", "reports", "government", "officials", "study", "studies", "people", "year", "years", "said",
      "says", "new", "local", "national", "policy", "policies", "research", "researchers", "data", "million",
      "costs", "cost", "public", "companies", "industry", "experts", "region", "regions", "countries",
      "change", "changes", "growth", "market", "markets", "percent", "increase", "decline", "risk", "risks",
      "program", "programs", "community", "environment", "environmental", "economic", "economy", "plans",
      "planning", "agency", "agencies", "rules", "support", "funding", "future", "impact", "impacts",
      "several", "recent", "major", "according", "survey", "global", "development", "management", "power",
      "energy", "transport", "technology", "scientists", "weather", "travel", "food", "prices", "trade",
      "training", "education", "history", "council", "court", "law", "safety", "security", "media",
      "network", "services", "families", "residents", "village", "island", "coast", "river", "mountain"};
  return w;
}

const Words& function_words() {
  static const Words w = {"the", "of", "and", "in", "to", "a", "is", "for", "on", "that", "with", "by",
                          "as", "are", "was", "it", "at", "from", "this", "be", "have", "their", "which",
                          "were", "has", "more", "than", "its", "also", "but"};
  return w;
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : g_(seed) {}
  size_t pick(size_t n) { return static_cast<size_t>(g_() % n); }
  double unit() { return static_cast<double>(g_() >> 11) / 9007199254740992.0; }
  template <typename T>
  const T& of(const std::vector<T>& v) { return v[pick(v.size())]; }

 private:
  std::mt19937_64 g_;
};

// Loose prose: content words drawn with the given on-topic share, separated
// by function words.
std::string prose(Rng& rng, const Words& topic, const Words* other, double share, double other_share, size_t len) {
  std::string out;
  for (size_t i = 0; i < len; ++i) {
    std::string w;
    const double u = rng.unit();
    if (u < share) w = rng.of(topic);
    else if (other != nullptr && u < share + other_share) w = rng.of(*other);
    else w = rng.of(general_words());
    if (!out.empty()) out += ' ';
    if (rng.unit() < 0.35) out += rng.of(function_words()) + " ";
    out += w;
    if (rng.unit() < 0.08) out += '.';
  }
  if (!out.empty() && out.back() != '.') out += '.';
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

struct CorpusDoc {
  std::string docid, title, body;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: make_mini <output-dir>\n");
    return 2;
  }
  namespace fs = std::filesystem;
  const fs::path dir = argv[1];
  fs::create_directories(dir);
  Rng rng(20240715);
  const auto& specs = topic_specs();

  std::vector<CorpusDoc> docs;
  std::map<std::string, std::map<std::string, int>> qrels;
  // Docids come from a shuffled numbering so id order says nothing about topics.
  std::vector<int> numbers(200);
  for (int i = 0; i < 200; ++i) numbers[static_cast<size_t>(i)] = i + 1;
  for (size_t i = numbers.size() - 1; i > 0; --i) std::swap(numbers[i], numbers[rng.pick(i + 1)]);
  size_t next = 0;
  const auto new_id = [&] {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "MINI-%04d", numbers.at(next++));
    return std::string(buf);
  };
  // 15 topical documents per topic: 9 relevant (grade 1 or 2), 6 on the
  // confusable topic's side but sharing surface words (judged 0).
  for (size_t t = 0; t < specs.size(); ++t) {
    const auto& s = specs[t];
    const auto& conf = specs[static_cast<size_t>(s.confusable)];
    for (int i = 0; i < 15; ++i) {
      CorpusDoc d;
      d.docid = new_id();
      const size_t len = 25 + rng.pick(i % 4 == 0 ? 160 : 70);
      if (i < 9) {
        const double share = 0.25 + 0.35 * rng.unit();
        d.body = prose(rng, s.words, nullptr, share, 0, len);
        if (rng.unit() < 0.6) d.title = rng.of(s.aspects);
        qrels[s.qid][d.docid] = share > 0.45 ? 2 : 1;
      } else {
        d.body = prose(rng, conf.words, &s.words, 0.3, 0.1, len);
        if (rng.unit() < 0.3) d.title = rng.of(conf.aspects);
        qrels[s.qid][d.docid] = 0;
      }
      docs.push_back(std::move(d));
    }
  }
  for (int i = 0; i < 50; ++i) {
    CorpusDoc d;
    d.docid = new_id();
    d.body = prose(rng, general_words(), nullptr, 0.0, 0, 20 + rng.pick(90));
    if (i % 5 == 0) qrels[specs[rng.pick(specs.size())].qid][d.docid] = 0;
    docs.push_back(std::move(d));
  }
  std::sort(docs.begin(), docs.end(), [](const CorpusDoc& a, const CorpusDoc& b) { return a.docid < b.docid; });

  {
    std::ofstream out(dir / "corpus.jsonl");
    for (const auto& d : docs) {
      nlohmann::json j{{"docid", d.docid}, {"body", d.body}};
      if (!d.title.empty()) j["title"] = d.title;
      out << j.dump() << '\n';
    }
  }
  {
    std::ofstream out(dir / "topics.tsv");
    for (const auto& s : specs) out << s.qid << '\t' << s.query << '\n';
  }
  {
    std::ofstream out(dir / "qrels.txt");
    for (const auto& [qid, judged] : qrels) {
      for (const auto& [docid, grade] : judged) out << qid << " 0 " << docid << ' ' << grade << '\n';
    }
  }
  {
    nlohmann::json folds = nlohmann::json::object();
    for (size_t t = 0; t < specs.size(); ++t) folds[std::to_string(t % 5 + 1)].push_back(specs[t].qid);
    std::ofstream(dir / "folds.json") << folds.dump(2) << '\n';
  }
  {
    // External scores for every (topic, document) pair.
    std::ofstream out(dir / "scores.tsv");
    char buf[32];
    for (const auto& s : specs) {
      for (const auto& d : docs) {
        auto it = qrels[s.qid].find(d.docid);
        const int grade = it == qrels[s.qid].end() ? -1 : it->second;
        const double score = grade > 0 ? 4.0 + grade + rng.unit() : 3.0 * rng.unit();
        std::snprintf(buf, sizeof(buf), "%.4f", score);
        out << s.qid << '\t' << d.docid << '\t' << buf << '\n';
      }
    }
  }
  {
    // Replay completions for K = 5 subtopics over G = 10 rounds.
    grm::generation::GenerationConfig cfg;
    std::ofstream out(dir / "completions.jsonl");
    for (const auto& s : specs) {
      const grm::generation::Topic topic{s.qid, s.query};
      const auto& conf = specs[static_cast<size_t>(s.confusable)];
      for (int round = 1; round <= cfg.g_rounds; ++round) {
        Words aspects = s.aspects;
        for (size_t i = aspects.size() - 1; i > 0; --i) std::swap(aspects[i], aspects[rng.pick(i + 1)]);
        aspects.resize(static_cast<size_t>(cfg.k_subtopics));
        std::string reply = "Reasoning: A full answer about " + s.query + " needs several angles.\nSubtopics:\n";
        for (size_t i = 0; i < aspects.size(); ++i) reply += std::to_string(i + 1) + ". " + aspects[i] + "\n";
        out << grm::generation::CompletionStore::record_line(grm::generation::subtopic_request(topic, cfg, round), reply)
            << '\n';
        for (const auto& a : aspects) {
          // Quality varies: some passages drift to the confusable topic.
          const double share = 0.1 + 0.5 * rng.unit();
          const std::string passage = prose(rng, s.words, &conf.words, share, 0.5 - share / 2, 40 + rng.pick(60));
          out << grm::generation::CompletionStore::record_line(
                     grm::generation::document_request(topic, a, cfg, round), a + ". " + passage)
              << '\n';
        }
      }
    }
  }
  {
    std::ofstream out(dir / "grm.conf");
    out << "# Mini benchmark. Paths are relative to the repository root.\n"
           "corpus.path = data/mini/corpus.jsonl\n"
           "index.path = build/mini.idx\n"
           "topics.path = data/mini/topics.tsv\n"
           "qrels.path = data/mini/qrels.txt\n"
           "folds.path = data/mini/folds.json\n"
           "generation.provider = replay\n"
           "generation.completions_path = data/mini/completions.jsonl\n"
           "generation.pool_path = build/mini_pool.jsonl\n"
           "rase.estimator = uniform\n"
           "rase.scores_path = data/mini/scores.tsv\n";
  }
  {
    // Golden BM25 run (k1 0.9, b 0.4, depth 1000) from the exhaustive scorer.
    const grm::text::Analyzer analyzer;
    std::vector<grm::oracle::Doc> analyzed;
    for (const auto& d : docs) {
      analyzed.push_back({d.docid, analyzer.analyze(d.title.empty() ? d.body : d.title + "\n" + d.body)});
    }
    std::ofstream out(dir / "golden_bm25.run");
    char buf[64];
    for (const auto& s : specs) {
      std::vector<std::pair<std::string, double>> q;
      for (const auto& t : analyzer.analyze(s.query)) q.emplace_back(t, 1.0);
      auto ranked = grm::oracle::brute_force_bm25(analyzed, q, 0.9, 0.4);
      if (ranked.size() > 1000) ranked.resize(1000);
      for (size_t r = 0; r < ranked.size(); ++r) {
        std::snprintf(buf, sizeof(buf), "%.6f", ranked[r].score);
        out << s.qid << " Q0 " << ranked[r].docid << ' ' << r + 1 << ' ' << buf << " golden\n";
      }
    }
  }
  std::printf("wrote %zu documents and %zu topics to %s\n", docs.size(), specs.size(), dir.c_str());
  return 0;
}
