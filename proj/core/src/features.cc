#include "xcoref/features.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "xcoref/errors.h"
#include "xcoref/text.h"

namespace xcoref {
namespace {

bool IsUpperAscii(char c) { return c >= 'A' && c <= 'Z'; }

// Case-insensitive containment of one mention's text in another's.
bool ContainsText(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

struct MentionText {
  std::vector<std::string> tokens;
  std::string lowered;  // whitespace-joined, lowercased
};

MentionText TextOf(const Mention& m, const Document& doc) {
  MentionText text;
  text.tokens = doc.MentionTokens(m);
  text.lowered = AsciiLower(JoinTokens(text.tokens));
  return text;
}

// Fills every field except the averaged embeddings.
void FillCategorical(const Mention& mi, const MentionText& ti, bool speaker_i, const Mention& mj,
                     const MentionText& tj, bool speaker_j, const Document& doc,
                     MentionPairFeatures* f) {
  f->exact_match = ti.lowered == tj.lowered;
  f->substring_ij = ContainsText(tj.lowered, ti.lowered);
  f->substring_ji = ContainsText(ti.lowered, tj.lowered);
  const DistanceBins bins = ComputeDistanceBins(mi, mj);
  f->word_distance_bin = bins.word_bin;
  f->sentence_distance_bin = bins.sentence_bin;
  f->m_type_pair = MakeMentionTypePair(mi.m_type, mj.m_type);
  f->e_type_pair = static_cast<int>(mi.e_type) * kNumEntityTypes + static_cast<int>(mj.e_type);
  f->acronym = IsAcronym(ti.tokens, tj.tokens) || IsAcronym(tj.tokens, ti.tokens);
  f->first_name_mismatch = FirstNameMismatch(mi, mj, doc);
  f->speaker_i = speaker_i;
  f->speaker_j = speaker_j;
}

}  // namespace

MentionTypePair MakeMentionTypePair(MentionType first, MentionType second) {
  if (first == MentionType::kName) {
    return second == MentionType::kName ? MentionTypePair::kNameName
                                        : MentionTypePair::kNameNominal;
  }
  return second == MentionType::kNominal ? MentionTypePair::kNominalNominal
                                         : MentionTypePair::kNominalName;
}

const char* FeatureSlotName(int slot) {
  static constexpr const char* kNames[kNumFeatureSlots] = {
      "substring_ij", "substring_ji", "exact_match",         "word_distance_bin",
      "sentence_distance_bin", "m_type_pair", "e_type_pair", "acronym",
      "first_name_mismatch",   "speaker_i",   "speaker_j"};
  return slot >= 0 && slot < kNumFeatureSlots ? kNames[slot] : "?";
}

FeatureCodes MentionPairFeatures::Codes() const {
  return {substring_ij ? 1 : 0,
          substring_ji ? 1 : 0,
          exact_match ? 1 : 0,
          word_distance_bin,
          sentence_distance_bin,
          static_cast<int>(m_type_pair),
          e_type_pair,
          acronym ? 1 : 0,
          first_name_mismatch ? 1 : 0,
          speaker_i ? 1 : 0,
          speaker_j ? 1 : 0};
}

std::set<std::string> FeatureConfig::DefaultSpeechWords() {
  return {"say",  "says", "said",  "saying", "tell",  "tells",  "told",
          "ask",  "asks", "asked", "speak",  "speaks", "spoke", "according"};
}

std::set<std::string> LoadSpeechLexicon(std::istream& in) {
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto last = line.find_last_not_of(" \t\r");
    words.insert(AsciiLower(line.substr(first, last - first + 1)));
  }
  return words;
}

std::set<std::string> LoadSpeechLexiconFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open speech lexicon '" + path + "'");
  return LoadSpeechLexicon(in);
}

bool IsAcronym(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() != 1 || b.size() < 2) return false;
  const std::string& word = a[0];
  if (word.size() < 2 || !std::all_of(word.begin(), word.end(), IsUpperAscii)) return false;
  std::string initials;
  std::string doubled;
  for (const std::string& token : b) {
    if (token.empty()) return false;
    const char c = AsciiUpper(token.substr(0, 1))[0];
    initials += c;
    doubled += c;
    doubled += c;
  }
  return word == initials || word == doubled;
}

bool FirstNameMismatch(const Mention& mi, const Mention& mj, const Document& doc) {
  if (mi.e_type != EntityType::kPER || mj.e_type != EntityType::kPER) return false;
  if (mi.length() < 2 || mj.length() < 2) return false;
  const auto& tokens = doc.tokens;
  return EqualsIgnoreCase(tokens[mi.end_token].text, tokens[mj.end_token].text) &&
         !EqualsIgnoreCase(tokens[mi.start_token].text, tokens[mj.start_token].text);
}

bool SpeakerContext(const Mention& m, const Document& doc, const FeatureConfig& config) {
  if (config.speech_words.empty()) return false;
  const int n = static_cast<int>(doc.tokens.size());
  auto is_speech = [&](int t) {
    return config.speech_words.contains(AsciiLower(doc.tokens[t].text));
  };
  for (int t = std::max(0, m.start_token - config.speaker_window); t < m.start_token; ++t) {
    if (is_speech(t)) return true;
  }
  for (int t = m.end_token + 1; t <= std::min(n - 1, m.end_token + config.speaker_window); ++t) {
    if (is_speech(t)) return true;
  }
  return false;
}

int WordDistanceBin(int distance) {
  for (std::size_t b = 0; b < kWordDistanceEdges.size(); ++b) {
    if (distance <= kWordDistanceEdges[b]) return static_cast<int>(b);
  }
  return kNumWordDistanceBins - 1;
}

int SentenceDistanceBin(int distance) {
  for (std::size_t b = 0; b < kSentenceDistanceEdges.size(); ++b) {
    if (distance <= kSentenceDistanceEdges[b]) return static_cast<int>(b);
  }
  return kNumSentenceDistanceBins - 1;
}

DistanceBins ComputeDistanceBins(const Mention& mi, const Mention& mj) {
  return {WordDistanceBin(std::abs(mi.start_token - mj.start_token)),
          SentenceDistanceBin(std::abs(mi.sentence_index - mj.sentence_index))};
}

MentionPairFeatures ExtractPairFeatures(std::size_t i, std::size_t j, const Document& doc,
                                        const VectorStore& store, const FeatureConfig& config) {
  if (i >= doc.mentions.size() || j >= doc.mentions.size()) {
    throw std::out_of_range("mention index not in document '" + doc.doc_id + "'");
  }
  const Mention& mi = doc.mentions[i];
  const Mention& mj = doc.mentions[j];
  const MentionText ti = TextOf(mi, doc);
  const MentionText tj = TextOf(mj, doc);
  MentionPairFeatures f;
  FillCategorical(mi, ti, SpeakerContext(mi, doc, config), mj, tj, SpeakerContext(mj, doc, config),
                  doc, &f);
  f.avg_embedding_i = AverageEmbedding(store, ti.tokens);
  f.avg_embedding_j = AverageEmbedding(store, tj.tokens);
  return f;
}

FeatureTable::FeatureTable(const Document& doc, const VectorStore& store,
                           const FeatureConfig& config)
    : doc_(&doc), word_dim_(store.dimension()) {
  const std::size_t n = doc.mentions.size();
  std::vector<MentionText> texts;
  std::vector<bool> speaker;
  texts.reserve(n);
  embeddings_.reserve(n);
  for (const Mention& m : doc.mentions) {
    texts.push_back(TextOf(m, doc));
    speaker.push_back(SpeakerContext(m, doc, config));
    embeddings_.push_back(AverageEmbedding(store, texts.back().tokens));
  }
  codes_.resize(n * n);
  MentionPairFeatures f;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      FillCategorical(doc.mentions[i], texts[i], speaker[i], doc.mentions[j], texts[j], speaker[j],
                      doc, &f);
      codes_[i * n + j] = f.Codes();
    }
  }
}

}  // namespace xcoref
