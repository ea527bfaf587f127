// Model file layout (all integers and floats little-endian):
//
//   magic        8 bytes  "XCOREFM\0"
//   version      u32      kFormatVersion
//   config       i64 feature_embed_dim, word_dim, relu_dim, sigmoid_dim,
//                    batch_size, epochs
//                u64 seed
//                f64 learning_rate_start, learning_rate_end, decode_threshold
//   tensor count u32      (11 tables + W1 + attention + W2 + ws = 15)
//   tensors      u64 rows, u64 cols, rows*cols f64 in row-major order
//   checksum     u64      FNV-1a 64 over every preceding byte

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "xcoref/errors.h"
#include "xcoref/model.h"

namespace xcoref {
namespace {

constexpr char kMagic[8] = {'X', 'C', 'O', 'R', 'E', 'F', 'M', '\0'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint32_t kNumTensors = kNumFeatureSlots + 4;

std::uint64_t Fnv1a(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

class Writer {
 public:
  template <typename T>
  void Put(T value) {
    std::uint64_t bits;
    if constexpr (std::is_floating_point_v<T>) {
      bits = std::bit_cast<std::uint64_t>(static_cast<double>(value));
    } else {
      bits = static_cast<std::uint64_t>(value);
    }
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
  }

  void PutMatrix(const Eigen::MatrixXd& m) {
    Put<std::uint64_t>(m.rows());
    Put<std::uint64_t>(m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) Put<double>(m(r, c));
    }
  }

  void PutBytes(const char* data, std::size_t n) { out_.append(data, n); }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  template <typename T>
  T Get() {
    Need(sizeof(T));
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    if constexpr (std::is_same_v<T, double>) {
      return std::bit_cast<double>(bits);
    } else {
      return static_cast<T>(bits);
    }
  }

  Eigen::MatrixXd GetMatrix(const char* name) {
    const auto rows = Get<std::uint64_t>();
    const auto cols = Get<std::uint64_t>();
    if (rows > (1u << 24) || cols > (1u << 24) || rows * cols * 8 > in_.size() - pos_) {
      throw InputError(std::string("model file: tensor '") + name + "' is truncated");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = Get<double>();
    }
    return m;
  }

  std::string_view Take(std::size_t n) {
    Need(n);
    auto out = in_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t position() const { return pos_; }

 private:
  void Need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw InputError("model file is truncated");
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string SerializeModel(const Model& model) {
  const ModelConfig& c = model.config;
  model.params.CheckShapes(c);
  Writer w;
  w.PutBytes(kMagic, sizeof(kMagic));
  w.Put<std::uint32_t>(kFormatVersion);
  for (int v : {c.feature_embed_dim, c.word_dim, c.relu_dim, c.sigmoid_dim, c.batch_size, c.epochs}) {
    w.Put<std::int64_t>(v);
  }
  w.Put<std::uint64_t>(c.seed);
  w.Put<double>(c.learning_rate_start);
  w.Put<double>(c.learning_rate_end);
  w.Put<double>(c.decode_threshold);
  w.Put<std::uint32_t>(kNumTensors);
  for (const auto& table : model.params.tables) w.PutMatrix(table);
  w.PutMatrix(model.params.w1);
  w.PutMatrix(model.params.attention);
  w.PutMatrix(model.params.w2);
  w.PutMatrix(model.params.ws);
  w.Put<std::uint64_t>(Fnv1a(w.bytes()));
  return std::move(w.bytes());
}

Model DeserializeModel(std::string_view bytes) {
  constexpr std::size_t kChecksumSize = sizeof(std::uint64_t);
  if (bytes.size() < sizeof(kMagic) + kChecksumSize ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw InputError("not a model file (bad magic)");
  }
  const std::string_view body = bytes.substr(0, bytes.size() - kChecksumSize);
  Reader tail(bytes.substr(body.size()));
  if (tail.Get<std::uint64_t>() != Fnv1a(body)) {
    throw InputError("model file checksum mismatch (corrupted or truncated)");
  }

  Reader r(body);
  r.Take(sizeof(kMagic));
  const auto version = r.Get<std::uint32_t>();
  if (version != kFormatVersion) {
    throw InputError("model file format version " + std::to_string(version) +
                     " is not supported (expected " + std::to_string(kFormatVersion) + ")");
  }
  Model model;
  ModelConfig& c = model.config;
  for (int* field : {&c.feature_embed_dim, &c.word_dim, &c.relu_dim, &c.sigmoid_dim,
                     &c.batch_size, &c.epochs}) {
    *field = static_cast<int>(r.Get<std::int64_t>());
  }
  c.seed = r.Get<std::uint64_t>();
  c.learning_rate_start = r.Get<double>();
  c.learning_rate_end = r.Get<double>();
  c.decode_threshold = r.Get<double>();
  try {
    c.Validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("model file: invalid config: ") + e.what());
  }
  if (r.Get<std::uint32_t>() != kNumTensors) throw InputError("model file: unexpected tensor count");
  ModelParams& p = model.params;
  for (int s = 0; s < kNumFeatureSlots; ++s) p.tables[s] = r.GetMatrix(FeatureSlotName(s));
  p.w1 = r.GetMatrix("W1");
  const Eigen::MatrixXd attention = r.GetMatrix("attention");
  if (attention.rows() != 4 || attention.cols() != 1) {
    throw InputError("model file: attention tensor must be 4x1");
  }
  p.attention = attention.col(0);
  p.w2 = r.GetMatrix("W2");
  const Eigen::MatrixXd ws = r.GetMatrix("ws");
  if (ws.cols() != 1) throw InputError("model file: ws must be a column vector");
  p.ws = ws.col(0);
  if (r.position() != body.size()) throw InputError("model file has trailing bytes");
  try {
    p.CheckShapes(c);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("model file: ") + e.what());
  }
  if (!p.AllFinite()) throw InputError("model file holds non-finite parameters");
  return model;
}

void SaveModel(const Model& model, const std::string& path) {
  const std::string bytes = SerializeModel(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write model file '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed for model file '" + path + "'");
}

Model LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DeserializeModel(buffer.str());
}

}  // namespace xcoref
