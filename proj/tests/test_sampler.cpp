// Copyright 2026 The oesgnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sampler_cases.hpp"
#include "test_util.hpp"

using namespace oes;

namespace {

/// |E| edges whose positive-minus-negative margin grows with the edge id.
struct Ladder {
  DirectedMultigraph graph;
  Matrix logits;
  std::vector<Label> labels;
};

Ladder ladder(std::size_t edges) {
  std::vector<Edge> list;
  for (std::size_t e = 0; e < edges; ++e) list.push_back({e % 97, (e * 31 + 5) % 97});
  Ladder l{DirectedMultigraph::from_edges(97, list), Matrix::Zero(static_cast<Eigen::Index>(edges), 2),
           std::vector<Label>(edges, Label::positive)};
  for (std::size_t e = 0; e < edges; ++e) l.logits(static_cast<Eigen::Index>(e), 1) = 1e-3 * static_cast<double>(e);
  return l;
}

}  // namespace

TEST(EdgeConfidence, HandValues) {
  EXPECT_NEAR(edge_confidence(std::log(0.2), std::log(0.8)), 0.8, 1e-15);
  EXPECT_NEAR(edge_confidence(std::log(0.8), std::log(0.2)), 0.8, 1e-15);
  EXPECT_EQ(edge_confidence(1.25, 1.25), 0.5);
  EXPECT_NEAR(edge_confidence(0.0, 2.0), std::exp(2.0) / (std::exp(2.0) + 1.0), 1e-15);
  EXPECT_NEAR(edge_confidence(0.0, 2.0), 0.8808, 1e-4);
}

TEST(EdgeConfidence, StaysInHalfOpenRange) {
  std::mt19937_64 rng(1);
  Matrix z = testutil::random_matrix(rng, 1000, 2, 5.0);
  for (double c : edge_confidences(z)) {
    EXPECT_GE(c, 0.5);
    EXPECT_LE(c, 1.0);
  }
}

TEST(EdgeConfidence, RawModeTakesTheLargerLogit) {
  EXPECT_EQ(edge_confidence(-3.0, 7.5, ConfidenceMode::raw), 7.5);
}

TEST(EdgeConfidence, NonFiniteLogitThrows) {
  EXPECT_THROW(edge_confidence(std::nan(""), 0.0), NonFiniteError);
  EXPECT_THROW(edge_confidence(0.0, INFINITY), NonFiniteError);
}

TEST(Percentile, Examples) {
  std::vector<double> flat(17, 0.625);
  for (double p : {0.0, 12.5, 50.0, 99.0, 100.0}) EXPECT_EQ(percentile_threshold(flat, p), 0.625);
  std::vector<double> hundred(100);
  std::iota(hundred.begin(), hundred.end(), 1.0);
  std::shuffle(hundred.begin(), hundred.end(), std::mt19937_64(3));
  EXPECT_EQ(percentile_threshold(hundred, 99.0), 99.0);
  EXPECT_EQ(percentile_threshold(hundred, 0.0), 1.0);
  EXPECT_EQ(percentile_threshold(hundred, 100.0), 100.0);
  EXPECT_EQ(percentile_threshold(hundred, 0.5), 1.0);
  EXPECT_EQ(percentile_threshold(hundred, 50.5), 51.0);
}

TEST(Percentile, Errors) {
  std::vector<double> none;
  EXPECT_THROW(percentile_threshold(none, 50.0), ConfigError);
  std::vector<double> one{0.7};
  EXPECT_THROW(percentile_threshold(one, -1.0), ConfigError);
  EXPECT_THROW(percentile_threshold(one, 100.5), ConfigError);
}

TEST(Percentile, MatchesCountingOracle) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 1 + rng() % 60;
    std::vector<double> c(n);
    for (auto& v : c) v = static_cast<double>(rng() % 10) / 8.0;
    double p = std::uniform_real_distribution<double>(0.0, 100.0)(rng);
    EXPECT_EQ(percentile_threshold(c, p), oracle::percentile(c, p));
  }
}

TEST(Eligibility, Examples) {
  std::vector<double> c{0.9, 0.6, 0.75, 0.99};
  std::vector<Label> y{Label::positive, Label::negative, Label::positive, Label::negative};
  std::vector<Label> wrong{Label::negative, Label::positive, Label::negative, Label::positive};
  EXPECT_TRUE(eligible_edges(c, wrong, y, 0.0).empty());
  EXPECT_EQ(eligible_edges(c, y, y, 0.6), (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(eligible_edges(c, y, y, 0.9), (std::vector<std::size_t>{0, 3}));
  std::vector<Label> mixed{Label::positive, Label::negative, Label::negative, Label::negative};
  EXPECT_EQ(eligible_edges(c, mixed, y, 0.7), (std::vector<std::size_t>{0, 3}));
  std::vector<Label> shorter{Label::positive};
  EXPECT_THROW(eligible_edges(c, shorter, y, 0.5), ShapeError);
}

TEST(SampleCount, RoundsHalfUpAndCaps) {
  EXPECT_EQ(sample_count(0.1, 101), 10u);
  EXPECT_EQ(sample_count(0.1, 100), 10u);
  EXPECT_EQ(sample_count(0.1, 5), 1u);
  EXPECT_EQ(sample_count(0.1, 4), 0u);
  EXPECT_EQ(sample_count(0.25, 6), 2u);
  EXPECT_EQ(sample_count(1.0, 7), 7u);
  EXPECT_EQ(sample_count(0.0, 1000), 0u);
  EXPECT_EQ(sample_count(0.5, 0), 0u);
}

TEST(ApplyOes, EpochAfterWindowIsIdentity) {
  auto l = ladder(500);
  OesConfig cfg;
  cfg.active_epochs = 3;
  auto out = apply_oes(l.graph, l.logits, l.labels, cfg, 4);
  EXPECT_FALSE(out.active);
  EXPECT_TRUE(out.dropped_ids.empty());
  EXPECT_EQ(out.retained_graph.edges(), l.graph.edges());
  EXPECT_TRUE(apply_oes(l.graph, l.logits, l.labels, cfg, 3).active);
}

TEST(ApplyOes, DropRateMatchesClosedForm) {
  auto l = ladder(10000);
  OesConfig cfg;  // p = 99, r = 0.10
  auto out = apply_oes(l.graph, l.logits, l.labels, cfg, 1);
  // nearest rank 9900 leaves ids 9899..9999 at or above the threshold
  EXPECT_EQ(out.eligible_ids.size(), 101u);
  EXPECT_EQ(out.dropped_ids.size(), 10u);
  EXPECT_EQ(out.retained_graph.edge_count(), 9990u);
  EXPECT_EQ(static_cast<double>(out.dropped_ids.size()) / 10000.0, 0.001);
  EXPECT_NEAR(closed_form_edge_count(cfg, 10000), 10.0, 1e-9);
}

TEST(ApplyOes, ZeroRatioDropsNothing) {
  auto l = ladder(300);
  OesConfig cfg;
  cfg.sample_ratio = 0.0;
  cfg.percentile = 0.0;
  auto out = apply_oes(l.graph, l.logits, l.labels, cfg, 1);
  EXPECT_EQ(out.eligible_ids.size(), 299u);
  EXPECT_TRUE(out.dropped_ids.empty());
  EXPECT_EQ(out.retained_graph.edge_count(), 300u);
}

TEST(ApplyOes, NeverDropsMispredictedEdges) {
  auto l = ladder(400);
  for (std::size_t e = 0; e < 400; e += 2) l.labels[e] = Label::negative;
  OesConfig cfg;
  cfg.percentile = 0.0;
  cfg.sample_ratio = 1.0;
  auto out = apply_oes(l.graph, l.logits, l.labels, cfg, 1);
  // edge 0 is a tie, predicted negative, and labeled negative
  for (std::size_t d : out.dropped_ids) EXPECT_TRUE(d % 2 == 1 || d == 0) << d;
  EXPECT_EQ(out.dropped_ids.size(), 201u);
}

TEST(ApplyOes, SameSeedSameDrops) {
  auto l = ladder(2000);
  OesConfig cfg;
  cfg.percentile = 50.0;
  cfg.rng_seed = 77;
  auto a = apply_oes(l.graph, l.logits, l.labels, cfg, 2);
  auto b = apply_oes(l.graph, l.logits, l.labels, cfg, 2);
  EXPECT_EQ(a.dropped_ids, b.dropped_ids);
  auto c = apply_oes(l.graph, l.logits, l.labels, cfg, 3);
  cfg.rng_seed = 78;
  auto d = apply_oes(l.graph, l.logits, l.labels, cfg, 2);
  EXPECT_NE(a.dropped_ids, c.dropped_ids);
  EXPECT_NE(a.dropped_ids, d.dropped_ids);
}

TEST(ApplyOes, RaisingPercentileNeverGrowsEligibleSet) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = testutil::random_sampler_instance(rng);
    s.epoch = 1;
    std::size_t previous = s.graph.edge_count() + 1;
    for (double p = 0.0; p <= 100.0; p += 5.0) {
      s.config.percentile = p;
      auto out = apply_oes(s.graph, s.logits, s.labels, s.config, 1);
      EXPECT_LE(out.eligible_ids.size(), previous);
      previous = out.eligible_ids.size();
    }
  }
}

TEST(ApplyOes, RandomInstancesSatisfyContract) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = testutil::random_sampler_instance(rng);
    auto out = apply_oes(s.graph, s.logits, s.labels, s.config, s.epoch);
    EXPECT_EQ(testutil::sampler_violation(s, out), "") << "trial " << trial;
  }
}

TEST(ApplyOes, RetainedGraphKeepsFeaturesAndLabels) {
  std::mt19937_64 rng(7);
  auto g = testutil::random_graph(rng, 20, 80, 3, 4);
  Matrix z = testutil::random_matrix(rng, 80, 2);
  OesConfig cfg;
  cfg.percentile = 30.0;
  cfg.sample_ratio = 0.5;
  auto out = apply_oes(g, z, g.labels(), cfg, 1);
  ASSERT_GT(out.dropped_ids.size(), 0u);
  EXPECT_EQ(out.retained_graph.node_features(), g.node_features());
  for (std::size_t k = 0; k < out.retained_to_input.size(); ++k) {
    auto old = static_cast<Eigen::Index>(out.retained_to_input[k]);
    EXPECT_EQ(out.retained_graph.edge_features().row(static_cast<Eigen::Index>(k)), g.edge_features().row(old));
    EXPECT_EQ(out.retained_graph.labels()[k], g.labels()[static_cast<std::size_t>(old)]);
  }
}

TEST(ApplyOes, ShapeAndConfigErrors) {
  auto l = ladder(10);
  OesConfig cfg;
  EXPECT_THROW(apply_oes(l.graph, Matrix::Zero(9, 2), l.labels, cfg, 1), ShapeError);
  EXPECT_THROW(apply_oes(l.graph, Matrix::Zero(10, 3), l.labels, cfg, 1), ShapeError);
  std::vector<Label> short_labels(9, Label::negative);
  EXPECT_THROW(apply_oes(l.graph, l.logits, short_labels, cfg, 1), ShapeError);
  cfg.sample_ratio = 1.5;
  EXPECT_THROW(apply_oes(l.graph, l.logits, l.labels, cfg, 1), ConfigError);
  cfg.sample_ratio = 0.1;
  cfg.percentile = -2.0;
  EXPECT_THROW(apply_oes(l.graph, l.logits, l.labels, cfg, 1), ConfigError);
}

TEST(ApplyOes, EmptyGraphPassesThrough) {
  auto g = DirectedMultigraph::from_edges(3, {});
  auto out = apply_oes(g, Matrix::Zero(0, 2), {}, OesConfig{}, 1);
  EXPECT_EQ(out.retained_graph.node_count(), 3u);
  EXPECT_EQ(out.retained_graph.edge_count(), 0u);
}
