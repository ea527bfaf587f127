#ifndef XCOREF_MODEL_H_
#define XCOREF_MODEL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xcoref/corpus.h"
#include "xcoref/features.h"

namespace xcoref {

struct ModelConfig {
  int feature_embed_dim = 50;
  int word_dim = 300;
  int relu_dim = 100;
  int sigmoid_dim = 500;
  double learning_rate_start = 0.05;
  double learning_rate_end = 0.0001;
  int batch_size = 32;
  int epochs = 50;
  std::uint64_t seed = 1;
  double decode_threshold = 0.5;

  // 11 categorical embeddings followed by the two averaged word vectors.
  int input_dim() const { return kNumFeatureSlots * feature_embed_dim + 2 * word_dim; }

  // Throws std::invalid_argument naming the offending field.
  void Validate() const;

  bool operator==(const ModelConfig&) const = default;
};

// Every trainable tensor of the scorer. The same layout doubles as the
// gradient container.
struct ModelParams {
  // tables[s] is kFeatureCardinality[s] x feature_embed_dim.
  std::array<Eigen::MatrixXd, kNumFeatureSlots> tables;
  Eigen::MatrixXd w1;  // relu_dim x input_dim
  // Indexed by MentionTypePair: (name,name), (name,nominal),
  // (nominal,nominal), (nominal,name).
  Eigen::Vector4d attention = Eigen::Vector4d::Ones();
  Eigen::MatrixXd w2;  // sigmoid_dim x relu_dim
  Eigen::VectorXd ws;  // sigmoid_dim

  static ModelParams Zeros(const ModelConfig& config);

  void SetZero();
  // this += scale * other
  void AddScaled(const ModelParams& other, double scale);
  bool AllFinite() const;
  std::size_t NumScalars() const;
  // Throws std::invalid_argument if any tensor shape disagrees with config.
  void CheckShapes(const ModelConfig& config) const;

  bool operator==(const ModelParams& other) const;
};

using ModelGradients = ModelParams;

struct Model {
  ModelConfig config;
  ModelParams params;
};

// Uniform Glorot-style matrices, tables in +-0.01, attention weights 1.0.
// Fully determined by config.seed.
ModelParams InitModel(const ModelConfig& config);

// Inputs for one mention pair: categorical codes and the two averaged word
// vectors (borrowed, must outlive the call).
struct PairInput {
  FeatureCodes codes{};
  std::span<const double> word_i;
  std::span<const double> word_j;
};

PairInput MakePairInput(const MentionPairFeatures& features);

struct PairActivation {
  FeatureCodes codes{};
  Eigen::VectorXd input;  // v, length input_dim
  Eigen::VectorXd pre;    // W1 v
  Eigen::VectorXd relu;   // max(0, W1 v)
};

struct ForwardCache {
  std::vector<PairActivation> pairs;
  std::vector<double> coefficients;  // a_t / N per pair
  double norm = 0.0;                 // N
  Eigen::VectorXd pooled;            // entity-pair embedding
  Eigen::VectorXd sigmoid;           // sigma(W2 pooled)
  double logit = 0.0;                // ws . sigmoid
  double probability = 0.5;
};

// Concatenated embedding rows followed by both word vectors.
// Throws std::invalid_argument on a dimension mismatch or bad code.
Eigen::VectorXd EmbedPair(const PairInput& pair, const ModelParams& params,
                          const ModelConfig& config);
Eigen::VectorXd EmbedPair(const MentionPairFeatures& features, const ModelParams& params,
                          const ModelConfig& config);

Eigen::VectorXd ReluLayer(const Eigen::VectorXd& input, const ModelParams& params);

// Weighted sum of relu outputs with coefficients a_t / sqrt(sum a_t^2).
// Returns zeros when the normalizer falls below 1e-12. Throws
// std::invalid_argument for an empty list.
Eigen::VectorXd AttentionPool(std::span<const Eigen::VectorXd> relu_outputs,
                              std::span<const MentionTypePair> types, const ModelParams& params);

// Scores the set of mention pairs making up one entity pair.
ForwardCache Forward(std::span<const PairInput> pairs, const ModelParams& params,
                     const ModelConfig& config);

// Builds the full cross product of mention pairs (a x b) from the table and
// runs Forward. Throws std::invalid_argument for entities of another
// document or empty entities.
ForwardCache ForwardEntities(const FeatureTable& table, const Entity& a, const Entity& b,
                             const ModelParams& params, const ModelConfig& config);

// -log P(label | pair) computed stably from the cached logit.
double NegativeLogLikelihood(const ForwardCache& cache, int label);

// Accumulates d(-log P(label))/d(params) into `grads` (scaled by `scale`).
// Word vectors are constants and receive no gradient.
void Backward(const ForwardCache& cache, int label, const ModelParams& params,
              ModelGradients* grads, double scale = 1.0);

// p <- p - lr * g for every scalar. Throws NumericError if any gradient is
// not finite; params are untouched in that case.
void SgdStep(ModelParams* params, const ModelGradients& grads, double learning_rate);

// Binary model file; see README for the layout. Throws InputError on a bad
// magic, version mismatch, truncation or checksum failure.
void SaveModel(const Model& model, const std::string& path);
Model LoadModel(const std::string& path);
std::string SerializeModel(const Model& model);
Model DeserializeModel(std::string_view bytes);

}  // namespace xcoref

#endif  // XCOREF_MODEL_H_
