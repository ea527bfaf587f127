#ifndef XCOREF_FEATURES_H_
#define XCOREF_FEATURES_H_

#include <array>
#include <cstddef>
#include <istream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xcoref/corpus.h"
#include "xcoref/embeddings.h"

namespace xcoref {

// Ordered m_type pairs; the values index the attention weights.
enum class MentionTypePair { kNameName = 0, kNameNominal = 1, kNominalNominal = 2, kNominalName = 3 };
inline constexpr int kNumMentionTypePairs = 4;

MentionTypePair MakeMentionTypePair(MentionType first, MentionType second);

// Upper edges of the distance bins; the last bin is open-ended.
inline constexpr std::array<int, 9> kWordDistanceEdges = {0, 1, 2, 3, 4, 7, 15, 31, 63};
inline constexpr std::array<int, 4> kSentenceDistanceEdges = {0, 1, 2, 3};
inline constexpr int kNumWordDistanceBins = static_cast<int>(kWordDistanceEdges.size()) + 1;
inline constexpr int kNumSentenceDistanceBins =
    static_cast<int>(kSentenceDistanceEdges.size()) + 1;

// Categorical slots of the pair feature vector, in embedding order.
enum FeatureSlot : int {
  kSubstringIJ = 0,
  kSubstringJI,
  kExactMatch,
  kWordDistanceBin,
  kSentenceDistanceBin,
  kMentionTypePair,
  kEntityTypePair,
  kAcronym,
  kFirstNameMismatch,
  kSpeakerI,
  kSpeakerJ,
  kNumFeatureSlots,
};

using FeatureCodes = std::array<int, kNumFeatureSlots>;

// Number of distinct values each categorical slot can take.
inline constexpr FeatureCodes kFeatureCardinality = {
    2, 2, 2, kNumWordDistanceBins, kNumSentenceDistanceBins, kNumMentionTypePairs,
    kNumEntityTypes * kNumEntityTypes, 2, 2, 2, 2};

const char* FeatureSlotName(int slot);

struct MentionPairFeatures {
  bool substring_ij = false;  // text of m_i occurs inside m_j
  bool substring_ji = false;  // text of m_j occurs inside m_i
  bool exact_match = false;
  int word_distance_bin = 0;
  int sentence_distance_bin = 0;
  MentionTypePair m_type_pair = MentionTypePair::kNameName;
  int e_type_pair = 0;  // 5 * e_type(m_i) + e_type(m_j)
  bool acronym = false;
  bool first_name_mismatch = false;
  bool speaker_i = false;
  bool speaker_j = false;
  Eigen::VectorXd avg_embedding_i;
  Eigen::VectorXd avg_embedding_j;

  FeatureCodes Codes() const;
};

struct FeatureConfig {
  std::set<std::string> speech_words = DefaultSpeechWords();
  int speaker_window = 5;

  static std::set<std::string> DefaultSpeechWords();
};

// One lowercase word per line; blank lines and '#' comments skipped.
std::set<std::string> LoadSpeechLexicon(std::istream& in);
std::set<std::string> LoadSpeechLexiconFile(const std::string& path);

// True iff `a` is one all-uppercase token of length >= 2 spelling the
// initials of `b` (at least two tokens), either once each or each doubled.
bool IsAcronym(std::span<const std::string> a, std::span<const std::string> b);

// Both PER, both spans at least two tokens, same last token and different
// first token (case-insensitive).
bool FirstNameMismatch(const Mention& mi, const Mention& mj, const Document& doc);

// Any token within `window` positions of the span (span excluded) whose
// lowercase form is a speech word.
bool SpeakerContext(const Mention& m, const Document& doc, const FeatureConfig& config);

struct DistanceBins {
  int word_bin = 0;
  int sentence_bin = 0;
};
int WordDistanceBin(int distance);
int SentenceDistanceBin(int distance);
DistanceBins ComputeDistanceBins(const Mention& mi, const Mention& mj);

// Full pair feature vector for doc.mentions[i], doc.mentions[j].
// Throws std::out_of_range if either index is not a mention of `doc`.
MentionPairFeatures ExtractPairFeatures(std::size_t i, std::size_t j, const Document& doc,
                                        const VectorStore& store, const FeatureConfig& config);

// Precomputed features for every ordered mention pair of one document:
// averaged word embeddings per mention and categorical codes per pair.
// Immutable after construction.
class FeatureTable {
 public:
  FeatureTable(const Document& doc, const VectorStore& store, const FeatureConfig& config);

  const Document& document() const { return *doc_; }
  std::size_t num_mentions() const { return embeddings_.size(); }
  int word_dim() const { return word_dim_; }

  const FeatureCodes& codes(std::size_t i, std::size_t j) const {
    return codes_[i * embeddings_.size() + j];
  }
  const Eigen::VectorXd& embedding(std::size_t i) const { return embeddings_[i]; }

 private:
  const Document* doc_;
  int word_dim_;
  std::vector<Eigen::VectorXd> embeddings_;
  std::vector<FeatureCodes> codes_;
};

}  // namespace xcoref

#endif  // XCOREF_FEATURES_H_
