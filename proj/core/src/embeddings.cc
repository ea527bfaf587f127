#include "xcoref/embeddings.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "xcoref/errors.h"
#include "xcoref/text.h"

namespace xcoref {
namespace {

std::vector<std::string_view> SplitSpaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

bool ParseDouble(std::string_view text, double* value) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, *value);
  return ec == std::errc() && ptr == end;
}

bool ParseInt(std::string_view text, long long* value) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, *value);
  return ec == std::errc() && ptr == end;
}

}  // namespace

bool VectorStore::Add(std::string word, std::span<const double> values) {
  if (static_cast<int>(values.size()) != dimension_) {
    throw InputError("vector for '" + word + "' has " + std::to_string(values.size()) +
                     " components, expected " + std::to_string(dimension_));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("vector for '" + word + "' is not finite");
  }
  if (index_.contains(word)) {
    ++duplicates_;
    return false;
  }
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  data_.insert(data_.end(), values.begin(), values.end());
  return true;
}

bool VectorStore::Contains(std::string_view word) const {
  return index_.contains(std::string(word));
}

Eigen::Map<const Eigen::VectorXd> VectorStore::vector(std::size_t i) const {
  return Eigen::Map<const Eigen::VectorXd>(data_.data() + i * dimension_, dimension_);
}

std::optional<std::size_t> VectorStore::Find(std::string_view word) const {
  if (auto it = index_.find(std::string(word)); it != index_.end()) return it->second;
  if (auto it = index_.find(AsciiLower(word)); it != index_.end()) return it->second;
  return std::nullopt;
}

Eigen::VectorXd VectorStore::Lookup(std::string_view word) const {
  if (auto i = Find(word)) return vector(*i);
  return Eigen::VectorXd::Zero(dimension_);
}

VectorStore LoadWordVectors(std::istream& in, int declared_dimension) {
  std::string line;
  int line_number = 0;
  std::optional<VectorStore> store;
  if (declared_dimension > 0) store.emplace(declared_dimension);
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = SplitSpaces(line);
    if (fields.empty()) continue;
    const std::string where = "vector file line " + std::to_string(line_number);

    long long count = 0, dim = 0;
    if (line_number == 1 && fields.size() == 2 && ParseInt(fields[0], &count) &&
        ParseInt(fields[1], &dim)) {
      if (count < 0 || dim <= 0) throw InputError(where + ": invalid header");
      if (store && store->dimension() != dim) {
        throw InputError(where + ": header dimension " + std::to_string(dim) +
                         " differs from declared " + std::to_string(store->dimension()));
      }
      store.emplace(static_cast<int>(dim));
      continue;
    }
    if (fields.size() < 2) throw InputError(where + ": expected a word and its components");
    if (!store) store.emplace(static_cast<int>(fields.size() - 1));
    if (static_cast<int>(fields.size() - 1) != store->dimension()) {
      throw InputError(where + ": expected " + std::to_string(store->dimension()) +
                       " components, found " + std::to_string(fields.size() - 1));
    }
    values.resize(fields.size() - 1);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      if (!ParseDouble(fields[k], &values[k - 1])) {
        throw InputError(where + ": non-numeric component '" + std::string(fields[k]) + "'");
      }
    }
    try {
      store->Add(std::string(fields[0]), values);
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  return store ? std::move(*store) : VectorStore(0);
}

VectorStore LoadWordVectorFile(const std::string& path, int declared_dimension) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open vector file '" + path + "'");
  return LoadWordVectors(in, declared_dimension);
}

void WriteWordVectors(const VectorStore& store, std::ostream& out) {
  out << store.size() << ' ' << store.dimension() << '\n';
  char buffer[32];
  for (std::size_t i = 0; i < store.size(); ++i) {
    out << store.words()[i];
    auto v = store.vector(i);
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v[k]);
      out << ' ' << std::string_view(buffer, ptr - buffer);
    }
    out << '\n';
  }
}

void WriteWordVectorFile(const VectorStore& store, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write vector file '" + path + "'");
  WriteWordVectors(store, out);
  if (!out) throw InputError("write failed for '" + path + "'");
}

Eigen::VectorXd AverageEmbedding(const VectorStore& store, std::span<const std::string> tokens) {
  if (tokens.empty()) throw std::invalid_argument("AverageEmbedding: empty token list");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(store.dimension());
  for (const std::string& token : tokens) {
    if (auto i = store.Find(token)) sum += store.vector(*i);
  }
  return sum / static_cast<double>(tokens.size());
}

BilingualLexicon LoadLexicon(std::istream& in) {
  BilingualLexicon lexicon;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw InputError("lexicon line " + std::to_string(line_number) +
                       ": expected '<source>\\t<target>'");
    }
    lexicon.pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return lexicon;
}

BilingualLexicon LoadLexiconFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open lexicon '" + path + "'");
  return LoadLexicon(in);
}

ProjectionFit FitProjection(const BilingualLexicon& lexicon, const VectorStore& source,
                            const VectorStore& target, const ProjectionOptions& options) {
  const int src_dim = source.dimension();
  const int tgt_dim = target.dimension();
  std::vector<std::pair<std::size_t, std::size_t>> usable;
  for (const auto& [src_word, tgt_word] : lexicon.pairs) {
    auto s = source.Find(src_word);
    auto t = target.Find(tgt_word);
    if (s && t) usable.emplace_back(*s, *t);
  }
  if (src_dim <= 0 || usable.size() < static_cast<std::size_t>(src_dim)) {
    throw InputError("projection needs at least " + std::to_string(src_dim) +
                     " usable lexicon pairs, found " + std::to_string(usable.size()));
  }

  // Columns are paired samples: X is source_dim x n, Z is target_dim x n.
  const auto n = static_cast<Eigen::Index>(usable.size());
  Eigen::MatrixXd x(src_dim, n);
  Eigen::MatrixXd z(tgt_dim, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x.col(k) = source.vector(usable[k].first);
    z.col(k) = target.vector(usable[k].second);
  }

  // W (X X^T + lambda I) = Z X^T
  Eigen::MatrixXd gram = x * x.transpose();
  const double lambda = options.ridge_scale * gram.trace() / src_dim;
  gram.diagonal().array() += lambda;
  Eigen::LDLT<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) throw NumericError("projection normal equations failed");
  Eigen::MatrixXd cross = x * z.transpose();  // (Z X^T)^T
  ProjectionFit fit;
  fit.matrix = solver.solve(cross).transpose();
  if (!fit.matrix.allFinite()) throw NumericError("projection matrix is not finite");
  fit.usable_pairs = usable.size();
  fit.residual = (fit.matrix * x - z).squaredNorm();
  return fit;
}

VectorStore ProjectStore(const VectorStore& source, const Eigen::MatrixXd& projection,
                         bool normalize) {
  if (projection.cols() != source.dimension()) {
    throw InputError("projection expects dimension " + std::to_string(projection.cols()) +
                     ", store has " + std::to_string(source.dimension()));
  }
  VectorStore out(static_cast<int>(projection.rows()));
  Eigen::VectorXd projected;
  for (std::size_t i = 0; i < source.size(); ++i) {
    projected.noalias() = projection * source.vector(i);
    if (normalize) {
      const double norm = projected.norm();
      if (norm > 0.0) projected /= norm;
    }
    out.Add(source.words()[i], std::span<const double>(projected.data(), projected.size()));
  }
  return out;
}

}  // namespace xcoref
