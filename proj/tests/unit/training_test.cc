#include "xcoref/training.h"

#include <array>

#include <gtest/gtest.h>

#include "toy_corpus.h"
#include "xcoref/errors.h"

namespace xcoref {
namespace {

ModelConfig ToyConfig(int word_dim, int epochs) {
  ModelConfig c;
  c.feature_embed_dim = 8;
  c.word_dim = word_dim;
  c.relu_dim = 16;
  c.sigmoid_dim = 16;
  c.batch_size = 2;
  c.learning_rate_start = 0.5;
  c.learning_rate_end = 0.025;
  c.epochs = epochs;
  c.seed = 17;
  return c;
}

// Four documents with three name mentions each: a full name, a different
// person, then the first person's surname.
std::vector<Document> TwelveMentionCorpus() {
  const std::vector<std::array<std::string, 4>> people = {
      {"Angela", "Merkel", "Boris", "Johnson"},
      {"Emmanuel", "Macron", "Justin", "Trudeau"},
      {"Jacinda", "Ardern", "Pedro", "Sanchez"},
      {"Olaf", "Scholz", "Mark", "Rutte"}};
  std::vector<Document> docs;
  for (std::size_t d = 0; d < people.size(); ++d) {
    const auto& p = people[d];
    docs.push_back(testing::MakeDocument(
        "doc" + std::to_string(d),
        {{"Then", p[0], p[1], "spoke", "."}, {"Later", p[2], p[3], "left", "."},
         {"Finally", p[1], "returned", "."}},
        {{"a", 0, 1, 2, MentionType::kName, EntityType::kPER, "x"},
         {"b", 1, 1, 2, MentionType::kName, EntityType::kPER, "y"},
         {"c", 2, 1, 1, MentionType::kName, EntityType::kPER, "x"}}));
  }
  return docs;
}

TEST(Training, TwelveMentionCorpusFitsWithFallingLoss) {
  const std::vector<Document> docs = TwelveMentionCorpus();
  std::size_t mentions = 0;
  for (const Document& d : docs) mentions += d.mentions.size();
  ASSERT_EQ(mentions, 12u);
  ModelConfig config = ToyConfig(4, 60);
  config.batch_size = 12;  // every triplet in one batch: plain gradient descent
  const VectorStore store(4);
  const TrainResult r = Train(docs, {}, store, config);
  for (int e = 1; e < 5; ++e) {
    EXPECT_LT(r.epochs[e].mean_loss, r.epochs[e - 1].mean_loss) << "epoch " << e + 1;
  }
  EXPECT_EQ(EvaluateCorpus(docs, store, r.model, {}, {0.5}).conll, 1.0);
}

class ToyTraining : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    train_ = new testing::ToyCorpus(testing::MakeSeparableCorpus(4, 100));
    result_ = new TrainResult(Train(train_->docs, {}, train_->store, ToyConfig(8, 30)));
  }
  static void TearDownTestSuite() {
    delete result_;
    delete train_;
  }

  static testing::ToyCorpus* train_;
  static TrainResult* result_;
};

testing::ToyCorpus* ToyTraining::train_ = nullptr;
TrainResult* ToyTraining::result_ = nullptr;

TEST_F(ToyTraining, KeepsLastEpochWithoutDev) {
  ASSERT_EQ(result_->epochs.size(), 30u);
  EXPECT_LT(result_->epochs.back().mean_loss, result_->epochs.front().mean_loss);
  EXPECT_EQ(result_->best_epoch, 30);
  EXPECT_TRUE(result_->epochs.back().best);
  EXPECT_FALSE(result_->epochs.front().dev);
}

TEST_F(ToyTraining, FitsTrainingDocuments) {
  const ScoreReport report =
      EvaluateCorpus(train_->docs, train_->store, result_->model, {}, {0.5});
  EXPECT_EQ(report.conll, 1.0);
  for (const Document& doc : train_->docs) {
    const Clustering got = DecodeCorpus(std::vector{doc}, train_->store, result_->model, {}, {0.5})[0];
    const Clustering gold = GoldClustering(doc);
    EXPECT_EQ(got.clusters.size(), gold.clusters.size()) << doc.doc_id;
  }
}

TEST_F(ToyTraining, ParallelDecodeMatchesSerial) {
  const testing::ToyCorpus other = testing::MakeSeparableCorpus(9, 7);
  const auto serial = DecodeCorpus(other.docs, train_->store, result_->model, {}, {0.5}, 1);
  const auto threaded = DecodeCorpus(other.docs, train_->store, result_->model, {}, {0.5}, 4);
  ASSERT_EQ(serial.size(), threaded.size());
  for (std::size_t d = 0; d < serial.size(); ++d) {
    EXPECT_EQ(serial[d].doc_id, other.docs[d].doc_id);
    EXPECT_EQ(serial[d].clusters, threaded[d].clusters);
  }
}

TEST(Training, ZeroEpochsReturnsInitialParameters) {
  const testing::ToyCorpus toy = testing::MakeSeparableCorpus(2, 1);
  const ModelConfig config = ToyConfig(8, 0);
  int callbacks = 0;
  const TrainResult r =
      Train(toy.docs, toy.docs, toy.store, config, {}, [&](const EpochReport&) { ++callbacks; });
  EXPECT_TRUE(r.model.params == InitModel(config));
  EXPECT_EQ(r.best_epoch, 0);
  EXPECT_TRUE(r.epochs.empty());
  EXPECT_EQ(callbacks, 0);
}

TEST(Training, DeterministicForFixedSeed) {
  const testing::ToyCorpus toy = testing::MakeSeparableCorpus(3, 2);
  const ModelConfig config = ToyConfig(8, 3);
  const TrainResult a = Train(toy.docs, toy.docs, toy.store, config);
  const TrainResult b = Train(toy.docs, toy.docs, toy.store, config);
  EXPECT_TRUE(a.model.params == b.model.params);
  ASSERT_EQ(a.epochs.size(), b.epochs.size());
  for (std::size_t e = 0; e < a.epochs.size(); ++e) {
    EXPECT_EQ(a.epochs[e].mean_loss, b.epochs[e].mean_loss);
  }
  ModelConfig reseeded = config;
  reseeded.seed = 18;
  EXPECT_FALSE(Train(toy.docs, {}, toy.store, reseeded).model.params == a.model.params);
}

TEST(Training, KeepsBestDevEpoch) {
  const testing::ToyCorpus train = testing::MakeSeparableCorpus(3, 4);
  const testing::ToyCorpus dev = testing::MakeSeparableCorpus(3, 5);
  // Dev words unseen in training fall back to zero vectors.
  const TrainResult r = Train(train.docs, dev.docs, train.store, ToyConfig(8, 6));
  ASSERT_EQ(r.epochs.size(), 6u);
  double best = -1;
  int best_epoch = 0;
  int flagged = 0;
  for (const EpochReport& e : r.epochs) {
    ASSERT_TRUE(e.dev);
    if (e.dev->conll > best) {
      best = e.dev->conll;
      best_epoch = e.epoch;
    }
    if (e.best) ++flagged;
  }
  EXPECT_EQ(r.best_epoch, best_epoch);
  EXPECT_GE(flagged, 1);
  EXPECT_TRUE(r.epochs[static_cast<std::size_t>(best_epoch - 1)].best);
  const ScoreReport kept = EvaluateCorpus(dev.docs, train.store, r.model, {}, {0.5});
  EXPECT_EQ(kept.conll, best);
}

TEST(Training, RejectsUnusableInput) {
  const testing::ToyCorpus toy = testing::MakeSeparableCorpus(1, 1);
  EXPECT_THROW(Train(toy.docs, {}, VectorStore(5), ToyConfig(8, 1)), InputError);
  const Document lonely = testing::MakeDocument(
      "d", {{"A"}}, {{"a", 0, 0, 0, MentionType::kName, EntityType::kPER, "x"}});
  EXPECT_THROW(Train(std::vector{lonely}, {}, toy.store, ToyConfig(8, 1)), InputError);
  EXPECT_THROW(Train(std::vector<Document>{}, {}, toy.store, ToyConfig(8, 1)), InputError);
}

}  // namespace
}  // namespace xcoref
