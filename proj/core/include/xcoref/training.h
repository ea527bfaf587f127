#ifndef XCOREF_TRAINING_H_
#define XCOREF_TRAINING_H_

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "xcoref/corpus.h"
#include "xcoref/embeddings.h"
#include "xcoref/features.h"
#include "xcoref/metrics.h"
#include "xcoref/model.h"
#include "xcoref/resolver.h"

namespace xcoref {

struct EpochReport {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  std::optional<ScoreReport> dev;  // absent when there is no dev set
  bool best = false;               // parameters of this epoch were kept
};

struct TrainResult {
  Model model;
  std::vector<EpochReport> epochs;
  int best_epoch = 0;  // 0 means the initial parameters
};

using EpochCallback = std::function<void(const EpochReport&)>;

// Minibatch SGD on the negative log-likelihood of the teacher-forced
// triplets. Triplets are reshuffled every epoch, gradients are averaged per
// minibatch, and the learning rate falls linearly from start to end across
// all minibatch steps. After each epoch the dev set is decoded with
// config.decode_threshold and the parameters with the best dev CoNLL score
// are returned (the last epoch's when dev is empty). Single-threaded and
// deterministic for a fixed seed.
// Throws InputError for an empty triplet stream or a store whose dimension
// differs from config.word_dim.
TrainResult Train(std::span<const Document> train_docs, std::span<const Document> dev_docs,
                  const VectorStore& store, const ModelConfig& config,
                  const FeatureConfig& features = {}, const EpochCallback& on_epoch = {});

// Decodes every document, fanning out over `jobs` threads. Output order
// follows the input.
std::vector<Clustering> DecodeCorpus(std::span<const Document> docs, const VectorStore& store,
                                     const Model& model, const FeatureConfig& features,
                                     const DecoderConfig& decoder, int jobs = 1);

// Decode + score against gold labels.
ScoreReport EvaluateCorpus(std::span<const Document> docs, const VectorStore& store,
                           const Model& model, const FeatureConfig& features,
                           const DecoderConfig& decoder, int jobs = 1);

}  // namespace xcoref

#endif  // XCOREF_TRAINING_H_
