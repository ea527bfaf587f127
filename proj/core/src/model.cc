#include "xcoref/model.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "xcoref/errors.h"

namespace xcoref {
namespace {

// Portable uniform draw in [-limit, limit): the standard distributions are
// implementation-defined, the raw engine output is not.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

  double Next(double limit) {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return (2.0 * unit - 1.0) * limit;
  }

  void Fill(Eigen::MatrixXd* m, double limit) {
    // Row-major visiting order, fixed regardless of Eigen's storage order.
    for (Eigen::Index r = 0; r < m->rows(); ++r) {
      for (Eigen::Index c = 0; c < m->cols(); ++c) (*m)(r, c) = Next(limit);
    }
  }

 private:
  std::mt19937_64 engine_;
};

double Logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
double Softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void Require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

bool SameBits(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::equal(a.data(), a.data() + a.size(), b.data(), [](double x, double y) {
    return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y);
  });
}

}  // namespace

void ModelConfig::Validate() const {
  Require(feature_embed_dim > 0, "feature_embed_dim must be positive");
  Require(word_dim >= 0, "word_dim must be nonnegative");
  Require(relu_dim > 0, "relu_dim must be positive");
  Require(sigmoid_dim > 0, "sigmoid_dim must be positive");
  Require(learning_rate_end > 0 && learning_rate_end <= learning_rate_start,
          "learning rates must satisfy 0 < learning_rate_end <= learning_rate_start");
  Require(batch_size > 0, "batch_size must be positive");
  Require(epochs >= 0, "epochs must be nonnegative");
  Require(decode_threshold > 0 && decode_threshold < 1, "decode_threshold must lie in (0,1)");
}

ModelParams ModelParams::Zeros(const ModelConfig& config) {
  ModelParams p;
  for (int s = 0; s < kNumFeatureSlots; ++s) {
    p.tables[s] = Eigen::MatrixXd::Zero(kFeatureCardinality[s], config.feature_embed_dim);
  }
  p.w1 = Eigen::MatrixXd::Zero(config.relu_dim, config.input_dim());
  p.attention.setZero();
  p.w2 = Eigen::MatrixXd::Zero(config.sigmoid_dim, config.relu_dim);
  p.ws = Eigen::VectorXd::Zero(config.sigmoid_dim);
  return p;
}

void ModelParams::SetZero() {
  for (auto& t : tables) t.setZero();
  w1.setZero();
  attention.setZero();
  w2.setZero();
  ws.setZero();
}

void ModelParams::AddScaled(const ModelParams& other, double scale) {
  for (int s = 0; s < kNumFeatureSlots; ++s) tables[s] += scale * other.tables[s];
  w1 += scale * other.w1;
  attention += scale * other.attention;
  w2 += scale * other.w2;
  ws += scale * other.ws;
}

bool ModelParams::AllFinite() const {
  for (const auto& t : tables) {
    if (!t.allFinite()) return false;
  }
  return w1.allFinite() && attention.allFinite() && w2.allFinite() && ws.allFinite();
}

std::size_t ModelParams::NumScalars() const {
  std::size_t n = 0;
  for (const auto& t : tables) n += t.size();
  return n + w1.size() + attention.size() + w2.size() + ws.size();
}

void ModelParams::CheckShapes(const ModelConfig& config) const {
  for (int s = 0; s < kNumFeatureSlots; ++s) {
    Require(tables[s].rows() == kFeatureCardinality[s] &&
                tables[s].cols() == config.feature_embed_dim,
            std::string("embedding table '") + FeatureSlotName(s) + "' has the wrong shape");
  }
  Require(w1.rows() == config.relu_dim && w1.cols() == config.input_dim(), "W1 has the wrong shape");
  Require(w2.rows() == config.sigmoid_dim && w2.cols() == config.relu_dim, "W2 has the wrong shape");
  Require(ws.size() == config.sigmoid_dim, "ws has the wrong shape");
}

bool ModelParams::operator==(const ModelParams& other) const {
  for (int s = 0; s < kNumFeatureSlots; ++s) {
    if (!SameBits(tables[s], other.tables[s])) return false;
  }
  return SameBits(w1, other.w1) && SameBits(attention, other.attention) && SameBits(w2, other.w2) &&
         SameBits(ws, other.ws);
}

ModelParams InitModel(const ModelConfig& config) {
  config.Validate();
  ModelParams p = ModelParams::Zeros(config);
  UniformSource rng(config.seed);
  for (auto& t : p.tables) rng.Fill(&t, 0.01);
  auto glorot = [](Eigen::Index fan_out, Eigen::Index fan_in) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  };
  rng.Fill(&p.w1, glorot(p.w1.rows(), p.w1.cols()));
  rng.Fill(&p.w2, glorot(p.w2.rows(), p.w2.cols()));
  Eigen::MatrixXd ws(1, config.sigmoid_dim);
  rng.Fill(&ws, glorot(1, config.sigmoid_dim));
  p.ws = ws.transpose();
  p.attention.setOnes();
  return p;
}

PairInput MakePairInput(const MentionPairFeatures& f) {
  return PairInput{f.Codes(),
                   std::span<const double>(f.avg_embedding_i.data(), f.avg_embedding_i.size()),
                   std::span<const double>(f.avg_embedding_j.data(), f.avg_embedding_j.size())};
}

Eigen::VectorXd EmbedPair(const PairInput& pair, const ModelParams& params,
                          const ModelConfig& config) {
  const int e = config.feature_embed_dim;
  const int w = config.word_dim;
  Require(static_cast<int>(pair.word_i.size()) == w && static_cast<int>(pair.word_j.size()) == w,
          "word vector dimension " + std::to_string(pair.word_i.size()) +
              " does not match model word_dim " + std::to_string(w));
  Eigen::VectorXd v(config.input_dim());
  for (int s = 0; s < kNumFeatureSlots; ++s) {
    const int code = pair.codes[s];
    Require(code >= 0 && code < kFeatureCardinality[s],
            std::string("feature '") + FeatureSlotName(s) + "' code out of range");
    v.segment(s * e, e) = params.tables[s].row(code).transpose();
  }
  const int offset = kNumFeatureSlots * e;
  v.segment(offset, w) = Eigen::Map<const Eigen::VectorXd>(pair.word_i.data(), w);
  v.segment(offset + w, w) = Eigen::Map<const Eigen::VectorXd>(pair.word_j.data(), w);
  return v;
}

Eigen::VectorXd EmbedPair(const MentionPairFeatures& features, const ModelParams& params,
                          const ModelConfig& config) {
  return EmbedPair(MakePairInput(features), params, config);
}

Eigen::VectorXd ReluLayer(const Eigen::VectorXd& input, const ModelParams& params) {
  Require(input.size() == params.w1.cols(), "relu layer input has the wrong dimension");
  return (params.w1 * input).cwiseMax(0.0);
}

Eigen::VectorXd AttentionPool(std::span<const Eigen::VectorXd> relu_outputs,
                              std::span<const MentionTypePair> types, const ModelParams& params) {
  Require(!relu_outputs.empty(), "attention pooling over an empty pair list");
  Require(relu_outputs.size() == types.size(), "attention pooling: size mismatch");
  double sum_sq = 0.0;
  for (MentionTypePair t : types) {
    const double a = params.attention[static_cast<int>(t)];
    sum_sq += a * a;
  }
  const double norm = std::sqrt(sum_sq);
  Eigen::VectorXd pooled = Eigen::VectorXd::Zero(relu_outputs.front().size());
  if (norm < 1e-12) return pooled;
  for (std::size_t k = 0; k < relu_outputs.size(); ++k) {
    pooled += (params.attention[static_cast<int>(types[k])] / norm) * relu_outputs[k];
  }
  return pooled;
}

ForwardCache Forward(std::span<const PairInput> pairs, const ModelParams& params,
                     const ModelConfig& config) {
  Require(!pairs.empty(), "forward pass over an empty pair list");
  ForwardCache cache;
  cache.pairs.reserve(pairs.size());
  double sum_sq = 0.0;
  for (const PairInput& pair : pairs) {
    PairActivation act;
    act.codes = pair.codes;
    act.input = EmbedPair(pair, params, config);
    act.pre.noalias() = params.w1 * act.input;
    act.relu = act.pre.cwiseMax(0.0);
    const double a = params.attention[pair.codes[kMentionTypePair]];
    sum_sq += a * a;
    cache.pairs.push_back(std::move(act));
  }
  cache.norm = std::sqrt(sum_sq);
  cache.pooled = Eigen::VectorXd::Zero(config.relu_dim);
  cache.coefficients.assign(pairs.size(), 0.0);
  if (cache.norm >= 1e-12) {
    for (std::size_t k = 0; k < cache.pairs.size(); ++k) {
      cache.coefficients[k] = params.attention[cache.pairs[k].codes[kMentionTypePair]] / cache.norm;
      cache.pooled += cache.coefficients[k] * cache.pairs[k].relu;
    }
  }
  cache.sigmoid = (params.w2 * cache.pooled).unaryExpr(&Logistic);
  cache.logit = params.ws.dot(cache.sigmoid);
  // Keep the probability inside the open interval even when the logistic
  // rounds to an endpoint.
  cache.probability = std::clamp(Logistic(cache.logit), std::numeric_limits<double>::min(),
                                 std::nextafter(1.0, 0.0));
  return cache;
}

ForwardCache ForwardEntities(const FeatureTable& table, const Entity& a, const Entity& b,
                             const ModelParams& params, const ModelConfig& config) {
  const Document& doc = table.document();
  Require(a.doc_id == doc.doc_id && b.doc_id == doc.doc_id,
          "entities do not belong to document '" + doc.doc_id + "'");
  Require(!a.mentions.empty() && !b.mentions.empty(), "forward pass over an empty entity");
  std::vector<PairInput> pairs;
  pairs.reserve(a.mentions.size() * b.mentions.size());
  for (std::size_t i : a.mentions) {
    for (std::size_t j : b.mentions) {
      Require(i < table.num_mentions() && j < table.num_mentions(),
              "entity mention index out of range");
      const Eigen::VectorXd& wi = table.embedding(i);
      const Eigen::VectorXd& wj = table.embedding(j);
      pairs.push_back(PairInput{table.codes(i, j), std::span<const double>(wi.data(), wi.size()),
                                std::span<const double>(wj.data(), wj.size())});
    }
  }
  return Forward(pairs, params, config);
}

double NegativeLogLikelihood(const ForwardCache& cache, int label) {
  // -log sigma(z) = softplus(-z); -log(1 - sigma(z)) = softplus(z)
  return label == 1 ? Softplus(-cache.logit) : Softplus(cache.logit);
}

void Backward(const ForwardCache& cache, int label, const ModelParams& params,
              ModelGradients* grads, double scale) {
  const double y = label == 1 ? 1.0 : 0.0;
  const double dlogit = scale * (Logistic(cache.logit) - y);

  grads->ws += dlogit * cache.sigmoid;
  const Eigen::VectorXd dpre2 =
      (dlogit * params.ws).cwiseProduct(cache.sigmoid.cwiseProduct(
          Eigen::VectorXd::Ones(cache.sigmoid.size()) - cache.sigmoid));
  grads->w2.noalias() += dpre2 * cache.pooled.transpose();
  const Eigen::VectorXd dpooled = params.w2.transpose() * dpre2;

  if (cache.norm < 1e-12) return;  // pooled is identically zero here

  // pooled = (1/N) sum_t a_t R_t with N^2 = sum_t n_t a_t^2, so
  // d pooled / d a_t = R_t / N - pooled * n_t a_t / N^2.
  const double g_dot_pooled = dpooled.dot(cache.pooled);
  std::array<double, kNumMentionTypePairs> g_dot_sum{};
  std::array<int, kNumMentionTypePairs> count{};
  const int e = static_cast<int>(params.tables[0].cols());
  const int offset = kNumFeatureSlots * e;
  for (std::size_t k = 0; k < cache.pairs.size(); ++k) {
    const PairActivation& act = cache.pairs[k];
    const int t = act.codes[kMentionTypePair];
    g_dot_sum[t] += dpooled.dot(act.relu);
    ++count[t];

    const Eigen::VectorXd dpre =
        (cache.coefficients[k] * dpooled).cwiseProduct((act.pre.array() > 0.0).cast<double>().matrix());
    grads->w1.noalias() += dpre * act.input.transpose();
    const Eigen::VectorXd dinput = params.w1.leftCols(offset).transpose() * dpre;
    for (int s = 0; s < kNumFeatureSlots; ++s) {
      grads->tables[s].row(act.codes[s]) += dinput.segment(s * e, e).transpose();
    }
  }
  const double n2 = cache.norm * cache.norm;
  for (int t = 0; t < kNumMentionTypePairs; ++t) {
    if (count[t] == 0) continue;
    const double a = params.attention[t];
    grads->attention[t] += g_dot_sum[t] / cache.norm - g_dot_pooled * count[t] * a / n2;
  }
}

void SgdStep(ModelParams* params, const ModelGradients& grads, double learning_rate) {
  if (!(learning_rate > 0)) throw std::invalid_argument("learning rate must be positive");
  if (!grads.AllFinite()) throw NumericError("non-finite gradient; aborting update");
  params->AddScaled(grads, -learning_rate);
}

}  // namespace xcoref
