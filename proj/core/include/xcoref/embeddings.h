#ifndef XCOREF_EMBEDDINGS_H_
#define XCOREF_EMBEDDINGS_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace xcoref {

// Dense word vectors of a single dimension. Immutable once loaded; lookups
// are safe from concurrent readers.
class VectorStore {
 public:
  explicit VectorStore(int dimension = 0) : dimension_(dimension) {}

  int dimension() const { return dimension_; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  // Number of input lines dropped because their word was already present.
  std::size_t duplicates() const { return duplicates_; }

  // Adds a word; returns false (and counts a duplicate) if already present.
  // Throws InputError on a dimension mismatch or a non-finite component.
  bool Add(std::string word, std::span<const double> values);

  bool Contains(std::string_view word) const;
  const std::vector<std::string>& words() const { return words_; }
  // Vector of the i-th stored word, in insertion order.
  Eigen::Map<const Eigen::VectorXd> vector(std::size_t i) const;

  // Exact match, then ASCII-lowercased match, then the zero vector.
  Eigen::VectorXd Lookup(std::string_view word) const;
  // Exact match, then lowercased match; nullopt when neither exists.
  std::optional<std::size_t> Find(std::string_view word) const;

 private:
  int dimension_;
  std::vector<std::string> words_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t duplicates_ = 0;
};

// Reads the word2vec text format: an optional "<count> <dim>" header, then
// "<word> <f1> ... <fdim>" per line. Without a header the dimension comes
// from the first vector line, or from `declared_dimension` for empty input.
// Throws InputError with the offending line number.
VectorStore LoadWordVectors(std::istream& in, int declared_dimension = 0);
VectorStore LoadWordVectorFile(const std::string& path, int declared_dimension = 0);

// Writes the same format, header included. Components use the shortest
// representation that round-trips exactly.
void WriteWordVectors(const VectorStore& store, std::ostream& out);
void WriteWordVectorFile(const VectorStore& store, const std::string& path);

// Mean of Lookup() over the tokens; unknown tokens contribute zeros.
// Throws std::invalid_argument for an empty token list.
Eigen::VectorXd AverageEmbedding(const VectorStore& store, std::span<const std::string> tokens);

struct BilingualLexicon {
  std::vector<std::pair<std::string, std::string>> pairs;  // (source, target)
};

// TSV, "<source>\t<target>" per line.
BilingualLexicon LoadLexicon(std::istream& in);
BilingualLexicon LoadLexiconFile(const std::string& path);

struct ProjectionOptions {
  // Ridge term is ridge_scale * trace(X X^T) / source_dim.
  double ridge_scale = 1e-12;
};

struct ProjectionFit {
  Eigen::MatrixXd matrix;  // target_dim x source_dim
  std::size_t usable_pairs = 0;
  double residual = 0.0;  // sum of squared errors over the usable pairs
};

// Least-squares linear map W minimizing sum ||W x_i - z_i||^2 over lexicon
// pairs found in both stores, solved through regularized normal equations.
// Throws InputError when fewer than source_dim pairs are usable.
ProjectionFit FitProjection(const BilingualLexicon& lexicon, const VectorStore& source,
                            const VectorStore& target, const ProjectionOptions& options = {});

// Replaces every vector v by W v. With `normalize`, projected vectors are
// rescaled to unit length (zero vectors stay zero).
VectorStore ProjectStore(const VectorStore& source, const Eigen::MatrixXd& projection,
                         bool normalize = false);

}  // namespace xcoref

#endif  // XCOREF_EMBEDDINGS_H_
