#include "xcoref/metrics.h"

#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "xcoref/errors.h"

namespace xcoref {
namespace {

constexpr double kTol = 1e-12;

void ExpectPRF(const PRF& got, double p, double r) {
  EXPECT_NEAR(got.precision, p, kTol);
  EXPECT_NEAR(got.recall, r, kTol);
  EXPECT_NEAR(got.f1, p + r > 0 ? 2 * p * r / (p + r) : 0.0, kTol);
}

void ExpectSame(const PRF& a, const PRF& b) {
  EXPECT_NEAR(a.precision, b.precision, kTol);
  EXPECT_NEAR(a.recall, b.recall, kTol);
  EXPECT_NEAR(a.f1, b.f1, kTol);
}

const Clustering kGold7{"d", {{"a", "b", "c"}, {"d", "e", "f", "g"}}};
const Clustering kSys7{"d", {{"a", "b"}, {"c", "d"}, {"e", "f", "g"}}};
const Clustering kGoldAbC{"d", {{"a", "b"}, {"c"}}};

TEST(Muc, HandExample) {
  const PRF m = Muc(kGold7, kSys7);
  ExpectPRF(m, 3.0 / 4.0, 3.0 / 5.0);
  EXPECT_NEAR(m.f1, 2.0 / 3.0, kTol);
  ExpectSame(m, testing::OracleMuc(kGold7, kSys7));
}

TEST(Muc, IdentityAndSingletons) {
  ExpectPRF(Muc(kGold7, kGold7), 1, 1);
  const Clustering singletons{"d", {{"a"}, {"b"}, {"c"}, {"d"}, {"e"}, {"f"}, {"g"}}};
  const PRF m = Muc(kGold7, singletons);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.f1, 0.0);
  // Identical all-singleton partitions score 1 by the 0/0 convention.
  ExpectPRF(Muc(singletons, singletons), 1, 1);
}

TEST(BCubed, HandExamples) {
  const Clustering merged{"d", {{"a", "b", "c"}}};
  ExpectPRF(BCubed(kGoldAbC, merged), 5.0 / 9.0, 1.0);
  const Clustering split{"d", {{"a"}, {"b"}}};
  ExpectPRF(BCubed(Clustering{"d", {{"a", "b"}}}, split), 1.0, 0.5);
  ExpectPRF(BCubed(kGold7, kGold7), 1, 1);
  ExpectSame(BCubed(kGoldAbC, merged), testing::OracleBCubed(kGoldAbC, merged));
}

TEST(CeafE, HandExample) {
  const Clustering singletons{"d", {{"a"}, {"b"}, {"c"}}};
  ExpectPRF(CeafE(kGoldAbC, singletons), 5.0 / 9.0, 5.0 / 6.0);
  ExpectPRF(CeafE(kGold7, kGold7), 1, 1);
  ExpectSame(CeafE(kGoldAbC, singletons), testing::OracleCeafE(kGoldAbC, singletons));
}

TEST(Metrics, CountsAreExposed) {
  const MetricCounts c = MucCounts(kGold7, kSys7);
  EXPECT_EQ(c.recall_num, 3);
  EXPECT_EQ(c.recall_den, 5);
  EXPECT_EQ(c.precision_num, 3);
  EXPECT_EQ(c.precision_den, 4);
  MetricCounts sum = c;
  sum += c;
  ExpectPRF(sum.Score(), 0.75, 0.6);
}

TEST(Metrics, MismatchedUniversesThrow) {
  const Clustering other{"d", {{"a", "b"}, {"x"}}};
  EXPECT_THROW(Muc(kGoldAbC, other), InputError);
  EXPECT_THROW(BCubed(kGoldAbC, other), InputError);
  EXPECT_THROW(CeafE(kGoldAbC, other), InputError);
  const Clustering missing{"d", {{"a", "b"}}};
  EXPECT_THROW(CeafE(kGoldAbC, missing), InputError);
}

TEST(Metrics, EmptyDocumentScoresOne) {
  const Clustering empty{"d", {}};
  ExpectPRF(Muc(empty, empty), 1, 1);
  ExpectPRF(BCubed(empty, empty), 1, 1);
  ExpectPRF(CeafE(empty, empty), 1, 1);
}

TEST(Metrics, AgreeWithOraclesOnRandomClusterings) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 8);
  std::uniform_int_distribution<int> clusters(1, 4);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = size(rng);
    const Clustering gold = testing::RandomClustering(rng, n, clusters(rng));
    const Clustering sys = testing::RandomClustering(rng, n, clusters(rng));
    ExpectSame(Muc(gold, sys), testing::OracleMuc(gold, sys));
    ExpectSame(BCubed(gold, sys), testing::OracleBCubed(gold, sys));
    ExpectSame(CeafE(gold, sys), testing::OracleCeafE(gold, sys));
  }
}

TEST(Metrics, ScoresAreInvariantToClusterAndMemberOrder) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Clustering gold = testing::RandomClustering(rng, 7, 3);
    Clustering sys = testing::RandomClustering(rng, 7, 4);
    const ScoreReport before = ScoreCorpus(std::vector{gold}, std::vector{sys});
    std::reverse(sys.clusters.begin(), sys.clusters.end());
    for (auto& c : sys.clusters) std::reverse(c.begin(), c.end());
    const ScoreReport after = ScoreCorpus(std::vector{gold}, std::vector{sys});
    EXPECT_NEAR(before.conll, after.conll, kTol);
  }
}

TEST(Conll, Mean) {
  ScoreReport r;
  r.muc.f1 = 0.6;
  r.b_cubed.f1 = 0.9;
  r.ceaf_e.f1 = 0.9;
  EXPECT_NEAR(ConllScore(r), 0.8, 1e-15);
  r.muc.f1 = r.b_cubed.f1 = r.ceaf_e.f1 = 1;
  EXPECT_EQ(ConllScore(r), 1.0);
  r.muc.f1 = r.b_cubed.f1 = r.ceaf_e.f1 = 0;
  EXPECT_EQ(ConllScore(r), 0.0);
  EXPECT_EQ(MakePRF(0, 0).f1, 0.0);
}

TEST(ScoreCorpus, MicroAveragesCounts) {
  const Clustering g1{"1", {{"a", "b", "c"}, {"d", "e", "f", "g"}}};
  const Clustering s1{"1", {{"a", "b"}, {"c", "d"}, {"e", "f", "g"}}};
  const Clustering g2{"2", {{"a", "b"}}};
  const Clustering s2{"2", {{"a", "b"}}};
  const std::vector gold = {g1, g2};
  const std::vector sys = {s1, s2};
  const ScoreReport report = ScoreCorpus(gold, sys);
  // MUC: recall (3+1)/(5+1), precision (3+1)/(4+1).
  ExpectPRF(report.muc, 4.0 / 5.0, 4.0 / 6.0);
  EXPECT_NEAR(report.conll, (report.muc.f1 + report.b_cubed.f1 + report.ceaf_e.f1) / 3, kTol);

  const ScoreReport threaded = ScoreCorpus(gold, sys, 4);
  EXPECT_EQ(threaded.conll, report.conll);

  const std::vector swapped = {s2, s1};
  EXPECT_THROW(ScoreCorpus(gold, swapped), InputError);
  const std::vector shorter = {s1};
  EXPECT_THROW(ScoreCorpus(gold, shorter), InputError);
}

TEST(ScoreCorpus, Format) {
  const std::vector gold = {kGold7};
  const std::vector sys = {kSys7};
  const std::string text = FormatReport(ScoreCorpus(gold, sys));
  EXPECT_EQ(text.substr(0, 34), "MUC R 0.6000 P 0.7500 F1 0.6667\nB3");
  EXPECT_NE(text.find("\nCEAFe "), std::string::npos);
  EXPECT_NE(text.find("\nCoNLL "), std::string::npos);
}

}  // namespace
}  // namespace xcoref
