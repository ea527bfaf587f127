#ifndef XCOREF_RESOLVER_H_
#define XCOREF_RESOLVER_H_

#include <functional>
#include <string>
#include <vector>

#include "xcoref/corpus.h"
#include "xcoref/features.h"
#include "xcoref/model.h"

namespace xcoref {

// Entity merging runs in three passes over the sorted entities:
//   1. each name-led entity against earlier entities of the same e_type;
//   2. each nominal-led entity against earlier entities of the same e_type
//      that share a sentence with it (membership as of that moment);
//   3. the surviving nominal-led entities against every earlier entity of
//      the same e_type.
// "Earlier" is the sorted mention order; a merged entity keeps the slot of
// its antecedent.
enum class MergeStep { kNames = 1, kSameSentence = 2, kAnySentence = 3 };

struct DecoderConfig {
  double threshold = 0.5;

  void Validate() const;
};

struct TrainingTriplet {
  Entity entity;      // e_i, the entity being resolved
  Entity antecedent;  // e_j
  int label = 0;      // 1 iff both carry the same gold entity
  std::string doc_id;
  MergeStep step = MergeStep::kNames;
};

// Teacher-forced triplets: every candidate comparison of the schedule, with
// gold-coreferent pairs merged as soon as they are seen.
// Throws ValidationError if a mention lacks a gold label.
std::vector<TrainingTriplet> GenerateTrainingTriplets(const Document& doc);

// Probability that `entity` corefers with `antecedent`.
using EntityPairScorer = std::function<double(const Entity& entity, const Entity& antecedent)>;

// Greedy decoding: for each entity the best-scoring candidate is merged if
// its score exceeds the threshold. Ties go to the antecedent whose earliest
// mention is nearest (in tokens) to the entity's earliest mention, then to
// the later antecedent. Clusters come out in order of their first mention;
// ids within a cluster follow document order.
Clustering Decode(const Document& doc, const EntityPairScorer& scorer,
                  const DecoderConfig& config);

// Decodes with the neural scorer over a precomputed feature table.
Clustering Decode(const FeatureTable& table, const Model& model, const DecoderConfig& config);

// Trivial clustering with every mention alone.
Clustering Singletons(const Document& doc);

}  // namespace xcoref

#endif  // XCOREF_RESOLVER_H_
