#ifndef XCOREF_CORPUS_H_
#define XCOREF_CORPUS_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xcoref {

enum class MentionType { kName = 0, kNominal = 1 };

enum class EntityType { kPER = 0, kORG = 1, kGPE = 2, kLOC = 3, kFAC = 4 };

inline constexpr int kNumEntityTypes = 5;

std::string_view ToString(MentionType type);
std::string_view ToString(EntityType type);

// Case-insensitive; accepts "name"/"nominal" and the TAC tags "NAM"/"NOM".
std::optional<MentionType> ParseMentionType(std::string_view text);
std::optional<EntityType> ParseEntityType(std::string_view text);

struct Token {
  std::string text;
  int sentence_index = 0;
  int index = 0;  // position in the document, consecutive from 0
};

// A gold-boundary mention. Token indices are document-level and inclusive.
struct Mention {
  std::string id;
  int start_token = 0;
  int end_token = 0;
  int sentence_index = 0;
  MentionType m_type = MentionType::kName;
  EntityType e_type = EntityType::kPER;
  std::optional<std::string> gold_entity;

  int length() const { return end_token - start_token + 1; }
};

struct Document {
  std::string doc_id;
  std::string language;
  std::vector<Token> tokens;
  std::vector<Mention> mentions;
  int num_sentences = 0;

  // Token texts of a mention's span.
  std::vector<std::string> MentionTokens(const Mention& mention) const;
  // Index into `mentions` of the mention with the given id, if any.
  std::optional<std::size_t> FindMention(std::string_view id) const;

  // Checks every Token/Mention invariant; throws ValidationError.
  void Validate() const;
};

// A cluster of mentions built during merging. Members are indices into the
// owning document's mention list, kept in the order they were added.
struct Entity {
  std::string doc_id;
  std::vector<std::size_t> mentions;
  EntityType e_type = EntityType::kPER;
};

// A partition of (a subset of) a document's mention ids.
struct Clustering {
  std::string doc_id;
  std::vector<std::vector<std::string>> clusters;

  // Throws ValidationError on empty clusters or repeated ids.
  void Validate() const;
  std::size_t NumMentions() const;
};

// Decodes one line of the document file. Sentence-relative spans are
// converted to document token indices. Throws ParseError / ValidationError.
Document ParseDocument(std::string_view record);

// Reads every non-blank line of a document file.
std::vector<Document> ReadDocuments(std::istream& in);
std::vector<Document> ReadDocumentFile(const std::string& path);

// Names first, then nominals; each group ascending by start token, then by
// end token, then by position in the input. Returns indices into
// doc.mentions.
std::vector<std::size_t> SortMentions(const Document& doc);

// Groups mentions by gold entity label, in order of first appearance.
// Throws ValidationError if any mention is unlabeled.
Clustering GoldClustering(const Document& doc);

// Clustering file: one JSON object per line, {"doc_id": ..., "clusters":
// [[id, ...], ...]}. Lines that carry a full document record instead are
// accepted and converted through GoldClustering.
Clustering ParseClustering(std::string_view record);
std::vector<Clustering> ReadClusterings(std::istream& in);
std::vector<Clustering> ReadClusteringFile(const std::string& path);
std::string SerializeClustering(const Clustering& clustering);

}  // namespace xcoref

#endif  // XCOREF_CORPUS_H_
