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

#include <cmath>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "grm/error.hpp"
#include "grm/expansion/expansion.hpp"
#include "support/oracles.hpp"
#include "support/random_corpus.hpp"

namespace grm::expansion {
namespace {

using generation::GeneratedDocument;
using generation::QueryVariant;
using generation::Topic;
using index::InvertedIndex;

text::AnalyzerConfig plain() {
  text::AnalyzerConfig c;
  c.stemmer = text::StemmerKind::kNone;
  c.stopwords.clear();
  return c;
}

std::map<std::string, double> as_map(const ExpandedQuery& q) { return {q.terms.begin(), q.terms.end()}; }

void expect_models_near(const std::map<std::string, double>& got, const std::map<std::string, double>& want,
                        double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (const auto& [t, p] : want) {
    ASSERT_TRUE(got.contains(t)) << t;
    EXPECT_NEAR(got.at(t), p, tol) << t;
  }
}

std::vector<oracle::Doc> analyzed(const std::vector<index::Document>& docs, const InvertedIndex& index) {
  std::vector<oracle::Doc> out;
  for (const auto& d : docs) out.push_back({d.docid, index.analyzer().analyze(d.full_text())});
  return out;
}

LanguageModel random_model(std::mt19937_64& rng, size_t vocab) {
  LanguageModel m;
  std::uniform_real_distribution<double> u(0.01, 1.0);
  const size_t n = 1 + rng() % vocab;
  double sum = 0;
  for (size_t i = 0; i < n; ++i) {
    const double p = u(rng);
    m[testing::pseudo_word(rng() % vocab)] += p;
  }
  for (auto& [t, p] : m) sum += p;
  for (auto& [t, p] : m) p /= sum;
  return m;
}

TEST(ParamsTest, Validation) {
  EXPECT_NO_THROW(RmParams{}.validate());
  EXPECT_THROW((RmParams{0, 10, 0.5}).validate(), Error);
  EXPECT_THROW((RmParams{5, 0, 0.5}).validate(), Error);
  EXPECT_THROW((RmParams{5, 5, 1.5}).validate(), Error);
  EXPECT_THROW((QlParams{0.0}).validate(), Error);
  EXPECT_EQ(QlParams{}.mu, 1000.0);
}

TEST(QueryLikelihoodTest, HandComputedDirichlet) {
  const std::vector<index::Document> docs = {{"d1", "", "apple apple pear"}, {"d2", "", "plum pear kiwi fig"}};
  const auto index = InvertedIndex::build(docs, plain());
  const std::vector<std::string> q{"apple", "fig", "missing"};
  // |C| = 7; cf(apple) = 2, cf(fig) = 1; |d1| = 3.
  const double want = std::log((2 + 1000.0 * 2 / 7) / (3 + 1000.0)) + std::log((0 + 1000.0 * 1 / 7) / (3 + 1000.0));
  EXPECT_NEAR(query_likelihood(q, "d1", index, {1000.0}), want, 1e-12);
  EXPECT_THROW(query_likelihood(q, "d9", index, {}), Error);
}

TEST(QueryLikelihoodTest, MatchingDocBeatsNonMatching) {
  const std::vector<index::Document> docs = {{"a", "", "red blue green"}, {"b", "", "cat dog fox"}};
  const auto index = InvertedIndex::build(docs, plain());
  const std::vector<std::string> q{"red", "blue", "green"};
  EXPECT_GT(query_likelihood(q, "a", index, {}), query_likelihood(q, "b", index, {}));
}

TEST(QueryLikelihoodTest, LargeMuConverges) {
  const std::vector<index::Document> docs = {{"a", "", "red blue green"}, {"b", "", "cat dog fox"}};
  const auto index = InvertedIndex::build(docs, plain());
  const std::vector<std::string> q{"red", "dog"};
  EXPECT_NEAR(query_likelihood(q, "a", index, {1e9}), query_likelihood(q, "b", index, {1e9}), 1e-6);
}

TEST(QueryLikelihoodTest, MatchesDirectOracle) {
  std::mt19937_64 rng(51);
  const auto docs = testing::random_corpus(60, 40, rng);
  const auto index = InvertedIndex::build(docs);
  const auto odocs = analyzed(docs, index);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> q;
    for (int i = 0; i < 4; ++i) q.push_back(testing::pseudo_word(rng() % 50));
    const auto& d = odocs[rng() % odocs.size()];
    EXPECT_NEAR(query_likelihood(q, d.docid, index, {700.0}), oracle::dirichlet_ql_direct(q, d, odocs, 700.0), 1e-9);
  }
}

TEST(RelevanceModelTest, SingleAndPair) {
  const LanguageModel m{{"a", 0.25}, {"b", 0.75}};
  const std::vector<Feedback> one{{m, 3.7}};
  EXPECT_EQ(relevance_model(one), m);
  const std::vector<Feedback> two{{{{"a", 1.0}}, 2.0}, {{{"b", 1.0}}, 2.0}};
  EXPECT_EQ(relevance_model(two), (LanguageModel{{"a", 0.5}, {"b", 0.5}}));
}

TEST(RelevanceModelTest, Errors) {
  const std::vector<Feedback> zeros{{{{"a", 1.0}}, 0.0}};
  EXPECT_THROW(relevance_model(zeros), Error);
  EXPECT_THROW(relevance_model(std::vector<Feedback>{}), Error);
  const std::vector<Feedback> negative{{{{"a", 1.0}}, -1.0}, {{{"b", 1.0}}, 2.0}};
  EXPECT_THROW(relevance_model(negative), Error);
}

TEST(RelevanceModelTest, EmptyModelsAreSkipped) {
  const std::vector<Feedback> fb{{{}, 5.0}, {{{"a", 1.0}}, 1.0}};
  EXPECT_EQ(relevance_model(fb), (LanguageModel{{"a", 1.0}}));
}

TEST(RelevanceModelTest, MatchesDirectSummationAndSumsToOne) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Feedback> fb;
    std::vector<std::map<std::string, double>> models;
    std::vector<double> weights;
    for (int i = 0; i < 10; ++i) {
      auto m = random_model(rng, 30);
      const double w = u(rng);
      fb.push_back({m, w});
      models.emplace_back(m.begin(), m.end());
      weights.push_back(w);
    }
    const auto got = relevance_model(fb);
    std::map<std::string, double> want;
    double wsum = 0;
    for (double w : weights) wsum += w;
    for (size_t i = 0; i < models.size(); ++i) {
      for (const auto& [t, p] : models[i]) want[t] += p * weights[i] / wsum;
    }
    expect_models_near({got.begin(), got.end()}, want, 1e-12);
    EXPECT_NEAR(total_mass(got), 1.0, 1e-9);
  }
}

TEST(RelevanceModelTest, InvariantToWeightScaling) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Feedback> fb;
    for (int i = 0; i < 5; ++i) fb.push_back({random_model(rng, 20), u(rng)});
    auto scaled = fb;
    const double c = std::exp(u(rng) * 20 - 10);
    for (auto& f : scaled) f.weight *= c;
    const auto a = relevance_model(fb);
    const auto b = relevance_model(scaled);
    expect_models_near({a.begin(), a.end()}, {b.begin(), b.end()}, 1e-12);
  }
}

TEST(TruncateTest, HandComputed) {
  const LanguageModel m{{"a", 0.5}, {"b", 0.3}, {"c", 0.2}};
  const auto t = truncate_and_renormalize(m, 2);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_NEAR(t.at("a"), 0.625, 1e-15);
  EXPECT_NEAR(t.at("b"), 0.375, 1e-15);
  EXPECT_EQ(truncate_and_renormalize(m, 3), m);
  EXPECT_EQ(truncate_and_renormalize(m, 10), m);
  const LanguageModel ties{{"z", 0.25}, {"y", 0.25}, {"x", 0.25}, {"w", 0.25}};
  const auto tt = truncate_and_renormalize(ties, 2);
  EXPECT_TRUE(tt.contains("w"));
  EXPECT_TRUE(tt.contains("x"));
}

TEST(TruncateTest, RandomModelsMatchSortOracle) {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_model(rng, 60);
    const int k = 1 + static_cast<int>(rng() % 30);
    const auto got = truncate_and_renormalize(m, k);
    std::vector<std::pair<std::string, double>> sorted(m.begin(), m.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    sorted.resize(std::min<size_t>(sorted.size(), static_cast<size_t>(k)));
    double mass = 0;
    for (const auto& [t, p] : sorted) mass += p;
    std::map<std::string, double> want;
    for (const auto& [t, p] : sorted) want[t] = p / mass;
    expect_models_near({got.begin(), got.end()}, want, 1e-15);
    EXPECT_NEAR(total_mass(got), 1.0, 1e-9);
  }
}

TEST(InterpolateTest, EndpointsAndMidpoint) {
  const LanguageModel q{{"a", 0.5}, {"b", 0.5}};
  const LanguageModel f{{"b", 0.2}, {"c", 0.8}};
  EXPECT_EQ(as_map(interpolate("q", q, f, 1.0)), (std::map<std::string, double>{{"a", 0.5}, {"b", 0.5}}));
  EXPECT_EQ(as_map(interpolate("q", q, f, 0.0)), (std::map<std::string, double>{{"b", 0.2}, {"c", 0.8}}));
  const auto mid = interpolate("q", q, f, 0.5);
  expect_models_near(as_map(mid), {{"a", 0.25}, {"b", 0.35}, {"c", 0.4}}, 1e-15);
  EXPECT_EQ(mid.terms.front().first, "c");
  EXPECT_EQ(mid.terms.back().first, "a");
  EXPECT_THROW(interpolate("q", q, f, 1.1), Error);
}

class ExpansionFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(61);
    docs_ = testing::random_corpus(150, 90, rng, 50);
    index_ = InvertedIndex::build(docs_);
    odocs_ = analyzed(docs_, index_);
    topic_ = {"t1", testing::pseudo_word(2) + " " + testing::pseudo_word(9) + " " + testing::pseudo_word(15),
              QueryVariant::kTitle};
    for (int r = 1; r <= 3; ++r) {
      for (int s = 1; s <= 4; ++s) {
        std::string text;
        for (int i = 0; i < 20; ++i) text += testing::pseudo_word(rng() % 90) + " ";
        pool_.push_back({"t1", r, s, "s", text, "", ""});
      }
    }
  }

  std::vector<rase::RaseWeight> weights(const std::vector<double>& w) const {
    std::vector<rase::RaseWeight> out;
    for (size_t i = 0; i < pool_.size(); ++i) out.push_back({pool_[i].key(), w[i]});
    return out;
  }

  std::vector<index::Document> docs_;
  InvertedIndex index_;
  std::vector<oracle::Doc> odocs_;
  Topic topic_;
  std::vector<GeneratedDocument> pool_;
};

TEST_F(ExpansionFixture, Rm3MatchesStepByStepOracle) {
  const auto q = index_.analyzer().analyze(topic_.text);
  for (const RmParams rm : {RmParams{10, 20, 0.5}, RmParams{3, 5, 0.2}, RmParams{25, 60, 0.9}}) {
    const auto got = rm3_expand(topic_, index_, {0.9, 0.4}, rm, {1000.0});
    const auto want = oracle::rm3_direct(odocs_, q, 0.9, 0.4, static_cast<size_t>(rm.fb_docs),
                                         static_cast<size_t>(rm.fb_terms), rm.original_query_weight, 1000.0);
    expect_models_near(as_map(got), want, 1e-9);
    EXPECT_EQ(got.method, Method::kRm3);
    EXPECT_LE(got.terms.size(), static_cast<size_t>(rm.fb_terms) + q.size());
    double sum = 0;
    for (const auto& [t, w] : got.terms) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST_F(ExpansionFixture, Rm3SingleFeedbackDocIsItsMle) {
  const auto q = index_.analyzer().analyze(topic_.text);
  const auto top = index::bm25_search(q, index_, {0.9, 0.4}, 1);
  ASSERT_EQ(top.size(), 1u);
  const auto got = rm3_expand(topic_, index_, {0.9, 0.4}, {1, 10000, 0.0}, {});
  const auto mle = index::doc_language_model(top[0].docid, index_);
  expect_models_near(as_map(got), {mle.begin(), mle.end()}, 1e-15);
}

TEST_F(ExpansionFixture, Rm3EmptyFirstPassKeepsOriginalQuery) {
  const Topic nothing{"t2", "unmatched words only", QueryVariant::kTitle};
  const auto got = rm3_expand(nothing, index_, {}, {}, {});
  const auto original = query_model(nothing, index_);
  expect_models_near(as_map(got), {original.begin(), original.end()}, 0.0);
}

TEST_F(ExpansionFixture, GrmUniformIsMeanOfSelectedMles) {
  const auto w = weights(std::vector<double>(pool_.size(), 3.5));
  const RmParams rm{5, 10000, 0.0};
  const auto got = grm_expand(topic_, pool_, w, rm, index_);
  // Equal weights: the first five keys in (round, subtopic) order.
  std::map<std::string, double> want;
  for (size_t i = 0; i < 5; ++i) {
    for (const auto& [t, p] : oracle::mle(index_.analyzer().analyze(pool_[i].text))) want[t] += p / 5.0;
  }
  expect_models_near(as_map(got), want, 1e-12);
}

TEST_F(ExpansionFixture, GrmMatchesBruteForceOracleWithWeights) {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> raw;
    for (size_t i = 0; i < pool_.size(); ++i) raw.push_back(std::floor(u(rng) * 4) / 4);
    raw[rng() % raw.size()] = 3.0;
    const RmParams rm{1 + static_cast<int>(rng() % 15), 1 + static_cast<int>(rng() % 40), u(rng) / 3};
    const auto got = grm_expand(topic_, pool_, weights(raw), rm, index_);
    std::vector<size_t> order(pool_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return raw[a] > raw[b]; });
    order.resize(std::min(order.size(), static_cast<size_t>(rm.fb_docs)));
    std::vector<std::map<std::string, double>> models;
    std::vector<double> ws;
    for (size_t i : order) {
      models.push_back(oracle::mle(index_.analyzer().analyze(pool_[i].text)));
      ws.push_back(raw[i]);
    }
    const auto want = oracle::expand_direct(models, ws, index_.analyzer().analyze(topic_.text),
                                            static_cast<size_t>(rm.fb_terms), rm.original_query_weight);
    expect_models_near(as_map(got), want, 1e-12);
  }
}

TEST_F(ExpansionFixture, GrmFeedbackOrderInvariant) {
  std::vector<double> raw;
  for (size_t i = 0; i < pool_.size(); ++i) raw.push_back(static_cast<double>(i % 4));
  const RmParams rm{6, 15, 0.4};
  const auto base = grm_expand(topic_, pool_, weights(raw), rm, index_);
  auto pool = pool_;
  auto w = weights(raw);
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<size_t> perm(pool.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<GeneratedDocument> p2;
    std::vector<rase::RaseWeight> w2;
    for (size_t i : perm) {
      p2.push_back(pool_[i]);
      w2.push_back(w[i]);
    }
    const auto shuffled = grm_expand(topic_, p2, w2, rm, index_);
    EXPECT_EQ(shuffled.terms, base.terms);
  }
}

TEST_F(ExpansionFixture, GrmSingleDocumentLambdaZero) {
  const std::vector<GeneratedDocument> one{pool_[0]};
  const std::vector<rase::RaseWeight> w{{pool_[0].key(), 0.7}};
  const auto got = grm_expand(topic_, one, w, {95, 100000, 0.0}, index_);
  expect_models_near(as_map(got), oracle::mle(index_.analyzer().analyze(pool_[0].text)), 1e-15);
}

TEST_F(ExpansionFixture, GrmErrors) {
  EXPECT_THROW(grm_expand(topic_, {}, {}, {}, index_), Error);
  auto w = weights(std::vector<double>(pool_.size(), 1.0));
  std::swap(w[0], w[1]);
  EXPECT_THROW(grm_expand(topic_, pool_, w, {}, index_), Error);
  w.pop_back();
  EXPECT_THROW(grm_expand(topic_, pool_, w, {}, index_), Error);
}

TEST_F(ExpansionFixture, ExecuteMatchesWeightedScan) {
  const auto expanded = grm_expand(topic_, pool_, weights(std::vector<double>(pool_.size(), 1.0)), {12, 30, 0.3}, index_);
  const auto got = execute_expanded(expanded, index_, {1.2, 0.75}, 1000);
  const auto want = oracle::brute_force_bm25(odocs_, expanded.terms, 1.2, 0.75);
  ASSERT_EQ(got.size(), want.size());
  for (size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i].score, want[i].score, 1e-9);
}

TEST_F(ExpansionFixture, ExecuteScalingAndLambdaOne) {
  const auto q = index_.analyzer().analyze(topic_.text);
  const auto bm25 = index::bm25_search(q, index_, {0.9, 0.4}, 1000);
  const auto expanded = rm3_expand(topic_, index_, {0.9, 0.4}, {10, 20, 1.0}, {});
  const auto got = execute_expanded(expanded, index_, {0.9, 0.4}, 1000);
  ASSERT_EQ(got.size(), bm25.size());
  for (size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i].docid, bm25[i].docid);

  auto doubled = expanded;
  for (auto& [t, w] : doubled.terms) w *= 2;
  const auto twice = execute_expanded(doubled, index_, {0.9, 0.4}, 1000);
  ASSERT_EQ(twice.size(), got.size());
  for (size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(twice[i].docid, got[i].docid);
    EXPECT_NEAR(twice[i].score, 2 * got[i].score, 1e-12);
  }

  auto zero = expanded;
  for (auto& [t, w] : zero.terms) w = 0;
  EXPECT_TRUE(execute_expanded(zero, index_, {}, 1000).empty());
}

TEST(WriteExpandedTest, TsvSortedByWeight) {
  ExpandedQuery q;
  q.qid = "q1";
  q.terms = {{"b", 0.5}, {"a", 0.25}, {"c", 0.25}};
  std::ostringstream out;
  write_expanded(q, out);
  EXPECT_EQ(out.str(), "q1\tb\t0.5\nq1\ta\t0.25\nq1\tc\t0.25\n");
}

}  // namespace
}  // namespace grm::expansion
