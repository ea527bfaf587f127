#include "xcoref/training.h"

#include <algorithm>
#include <random>

#include "xcoref/errors.h"
#include "xcoref/parallel.h"

namespace xcoref {
namespace {

struct DocTriplet {
  std::size_t doc = 0;
  TrainingTriplet triplet;
};

void CheckStore(const VectorStore& store, const ModelConfig& config) {
  if (store.dimension() != config.word_dim) {
    throw InputError("word vectors have dimension " + std::to_string(store.dimension()) +
                     ", model expects " + std::to_string(config.word_dim));
  }
}

std::vector<FeatureTable> BuildTables(std::span<const Document> docs, const VectorStore& store,
                                      const FeatureConfig& features) {
  std::vector<FeatureTable> tables;
  tables.reserve(docs.size());
  for (const Document& doc : docs) tables.emplace_back(doc, store, features);
  return tables;
}

// Fisher-Yates with raw engine output, so the permutation does not depend
// on the standard library's distribution implementation.
template <typename T>
void Shuffle(std::vector<T>* items, std::mt19937_64* rng) {
  for (std::size_t i = items->size(); i > 1; --i) {
    const std::size_t j = (*rng)() % i;
    std::swap((*items)[i - 1], (*items)[j]);
  }
}

std::vector<Clustering> DecodeTables(std::span<const FeatureTable> tables, const Model& model,
                                     const DecoderConfig& decoder, int jobs) {
  std::vector<Clustering> out(tables.size());
  ParallelFor(tables.size(), jobs, [&](std::size_t d) { out[d] = Decode(tables[d], model, decoder); });
  return out;
}

ScoreReport ScoreTables(std::span<const FeatureTable> tables, std::span<const Document> docs,
                        const Model& model, const DecoderConfig& decoder, int jobs) {
  std::vector<Clustering> gold;
  gold.reserve(docs.size());
  for (const Document& doc : docs) gold.push_back(GoldClustering(doc));
  const std::vector<Clustering> sys = DecodeTables(tables, model, decoder, jobs);
  return ScoreCorpus(gold, sys, jobs);
}

}  // namespace

TrainResult Train(std::span<const Document> train_docs, std::span<const Document> dev_docs,
                  const VectorStore& store, const ModelConfig& config,
                  const FeatureConfig& features, const EpochCallback& on_epoch) {
  config.Validate();
  CheckStore(store, config);

  std::vector<DocTriplet> triplets;
  for (std::size_t d = 0; d < train_docs.size(); ++d) {
    for (TrainingTriplet& t : GenerateTrainingTriplets(train_docs[d])) {
      triplets.push_back(DocTriplet{d, std::move(t)});
    }
  }
  if (triplets.empty()) throw InputError("training data yields no training triplets");

  const std::vector<FeatureTable> train_tables = BuildTables(train_docs, store, features);
  const std::vector<FeatureTable> dev_tables = BuildTables(dev_docs, store, features);
  DecoderConfig decoder{config.decode_threshold};

  TrainResult result;
  result.model.config = config;
  result.model.params = InitModel(config);
  Model current = result.model;

  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  const std::size_t steps_per_epoch = (triplets.size() + batch - 1) / batch;
  const std::size_t total_steps = steps_per_epoch * static_cast<std::size_t>(config.epochs);
  auto learning_rate = [&](std::size_t step) {
    if (total_steps <= 1) return config.learning_rate_start;
    const double t = static_cast<double>(step) / static_cast<double>(total_steps - 1);
    return config.learning_rate_start + (config.learning_rate_end - config.learning_rate_start) * t;
  };

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  ModelGradients grads = ModelParams::Zeros(config);
  std::optional<double> best_conll;
  std::size_t step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Shuffle(&triplets, &rng);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < triplets.size(); begin += batch) {
      const std::size_t end = std::min(begin + batch, triplets.size());
      const double scale = 1.0 / static_cast<double>(end - begin);
      grads.SetZero();
      for (std::size_t k = begin; k < end; ++k) {
        const DocTriplet& dt = triplets[k];
        const ForwardCache cache =
            ForwardEntities(train_tables[dt.doc], dt.triplet.entity, dt.triplet.antecedent,
                            current.params, config);
        loss_sum += NegativeLogLikelihood(cache, dt.triplet.label);
        Backward(cache, dt.triplet.label, current.params, &grads, scale);
      }
      SgdStep(&current.params, grads, learning_rate(step++));
    }

    EpochReport report;
    report.epoch = epoch;
    report.mean_loss = loss_sum / static_cast<double>(triplets.size());
    if (!dev_tables.empty()) {
      report.dev = ScoreTables(dev_tables, dev_docs, current, decoder, 1);
      if (!best_conll || report.dev->conll > *best_conll) {
        best_conll = report.dev->conll;
        report.best = true;
      }
    } else {
      report.best = true;
    }
    if (report.best) {
      result.model.params = current.params;
      result.best_epoch = epoch;
    }
    result.epochs.push_back(report);
    if (on_epoch) on_epoch(report);
  }
  return result;
}

std::vector<Clustering> DecodeCorpus(std::span<const Document> docs, const VectorStore& store,
                                     const Model& model, const FeatureConfig& features,
                                     const DecoderConfig& decoder, int jobs) {
  decoder.Validate();
  CheckStore(store, model.config);
  const std::vector<FeatureTable> tables = BuildTables(docs, store, features);
  return DecodeTables(tables, model, decoder, jobs);
}

ScoreReport EvaluateCorpus(std::span<const Document> docs, const VectorStore& store,
                           const Model& model, const FeatureConfig& features,
                           const DecoderConfig& decoder, int jobs) {
  decoder.Validate();
  CheckStore(store, model.config);
  const std::vector<FeatureTable> tables = BuildTables(docs, store, features);
  return ScoreTables(tables, docs, model, decoder, jobs);
}

}  // namespace xcoref
