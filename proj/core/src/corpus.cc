#include "xcoref/corpus.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "xcoref/errors.h"
#include "xcoref/text.h"

namespace xcoref {
namespace {

using json = nlohmann::json;

const json& Field(const json& object, const char* name, const std::string& where) {
  auto it = object.find(name);
  if (it == object.end()) {
    throw ParseError(where + ": missing field '" + name + "'");
  }
  return *it;
}

// Mention and entity ids may be written as JSON strings or integers.
std::string IdField(const json& value, const std::string& field) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  throw ParseError("field '" + field + "' must be a string or integer");
}

int IntField(const json& object, const char* name, const std::string& where) {
  const json& value = Field(object, name, where);
  if (!value.is_number_integer()) {
    throw ParseError(where + ": field '" + name + "' must be an integer");
  }
  long long v = value.get<long long>();
  if (v < 0 || v > std::numeric_limits<int>::max()) {
    throw ValidationError(where + ": field '" + name + "' out of range");
  }
  return static_cast<int>(v);
}

std::string StringField(const json& object, const char* name, const std::string& where) {
  const json& value = Field(object, name, where);
  if (!value.is_string()) {
    throw ParseError(where + ": field '" + name + "' must be a string");
  }
  return value.get<std::string>();
}

json ParseJson(std::string_view record) {
  json parsed = json::parse(record.begin(), record.end(), nullptr, false);
  if (parsed.is_discarded()) throw ParseError("record is not valid JSON");
  if (!parsed.is_object()) throw ParseError("record is not a JSON object");
  return parsed;
}

Document DocumentFromJson(const json& record) {
  Document doc;
  doc.doc_id = StringField(record, "doc_id", "document");
  const std::string where = "document '" + doc.doc_id + "'";
  if (record.contains("language")) {
    doc.language = StringField(record, "language", where);
  }

  const json& sentences = Field(record, "sentences", where);
  if (!sentences.is_array()) throw ParseError(where + ": field 'sentences' must be an array");
  std::vector<int> sentence_offset;
  std::vector<int> sentence_length;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const json& sentence = sentences[s];
    if (!sentence.is_array()) {
      throw ParseError(where + ": field 'sentences[" + std::to_string(s) + "]' must be an array");
    }
    sentence_offset.push_back(static_cast<int>(doc.tokens.size()));
    sentence_length.push_back(static_cast<int>(sentence.size()));
    for (const json& token : sentence) {
      if (!token.is_string()) {
        throw ParseError(where + ": field 'sentences[" + std::to_string(s) +
                         "]' contains a non-string token");
      }
      doc.tokens.push_back(Token{token.get<std::string>(), static_cast<int>(s),
                                 static_cast<int>(doc.tokens.size())});
    }
  }
  doc.num_sentences = static_cast<int>(sentences.size());

  const json& mentions = Field(record, "mentions", where);
  if (!mentions.is_array()) throw ParseError(where + ": field 'mentions' must be an array");
  for (std::size_t k = 0; k < mentions.size(); ++k) {
    const json& m = mentions[k];
    const std::string mwhere = where + " mention #" + std::to_string(k);
    if (!m.is_object()) throw ParseError(mwhere + ": not an object");
    Mention mention;
    mention.id = IdField(Field(m, "id", mwhere), "id");
    const int sent = IntField(m, "sent", mwhere);
    const int start = IntField(m, "start", mwhere);
    const int end = IntField(m, "end", mwhere);
    if (sent >= doc.num_sentences) {
      throw ValidationError(mwhere + ": field 'sent' beyond last sentence");
    }
    if (start > end) throw ValidationError(mwhere + ": field 'start' after 'end'");
    if (end >= sentence_length[sent]) {
      throw ValidationError(mwhere + ": field 'end' beyond sentence length");
    }
    mention.sentence_index = sent;
    mention.start_token = sentence_offset[sent] + start;
    mention.end_token = sentence_offset[sent] + end;

    const std::string m_type = StringField(m, "m_type", mwhere);
    auto parsed_m = ParseMentionType(m_type);
    if (!parsed_m) throw ParseError(mwhere + ": field 'm_type' has unknown value '" + m_type + "'");
    mention.m_type = *parsed_m;
    const std::string e_type = StringField(m, "e_type", mwhere);
    auto parsed_e = ParseEntityType(e_type);
    if (!parsed_e) throw ParseError(mwhere + ": field 'e_type' has unknown value '" + e_type + "'");
    mention.e_type = *parsed_e;

    if (auto gold = m.find("gold_entity"); gold != m.end() && !gold->is_null()) {
      mention.gold_entity = IdField(*gold, "gold_entity");
    }
    doc.mentions.push_back(std::move(mention));
  }
  doc.Validate();
  return doc;
}

template <typename Parse>
auto ReadLines(std::istream& in, Parse parse) {
  std::vector<decltype(parse(std::string_view{}))> out;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(line));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_number) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return out;
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

}  // namespace

std::string_view ToString(MentionType type) {
  return type == MentionType::kName ? "name" : "nominal";
}

std::string_view ToString(EntityType type) {
  switch (type) {
    case EntityType::kPER: return "PER";
    case EntityType::kORG: return "ORG";
    case EntityType::kGPE: return "GPE";
    case EntityType::kLOC: return "LOC";
    case EntityType::kFAC: return "FAC";
  }
  return "?";
}

std::optional<MentionType> ParseMentionType(std::string_view text) {
  const std::string lower = AsciiLower(text);
  if (lower == "name" || lower == "nam") return MentionType::kName;
  if (lower == "nominal" || lower == "nom") return MentionType::kNominal;
  return std::nullopt;
}

std::optional<EntityType> ParseEntityType(std::string_view text) {
  const std::string lower = AsciiLower(text);
  if (lower == "per") return EntityType::kPER;
  if (lower == "org") return EntityType::kORG;
  if (lower == "gpe") return EntityType::kGPE;
  if (lower == "loc") return EntityType::kLOC;
  if (lower == "fac") return EntityType::kFAC;
  return std::nullopt;
}

std::vector<std::string> Document::MentionTokens(const Mention& mention) const {
  std::vector<std::string> out;
  out.reserve(mention.length());
  for (int t = mention.start_token; t <= mention.end_token; ++t) {
    out.push_back(tokens[t].text);
  }
  return out;
}

std::optional<std::size_t> Document::FindMention(std::string_view id) const {
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    if (mentions[i].id == id) return i;
  }
  return std::nullopt;
}

void Document::Validate() const {
  const std::string where = "document '" + doc_id + "'";
  int previous_sentence = 0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (tokens[t].index != static_cast<int>(t)) {
      throw ValidationError(where + ": token indices are not consecutive");
    }
    if (tokens[t].sentence_index < previous_sentence) {
      throw ValidationError(where + ": sentence indices decrease");
    }
    previous_sentence = tokens[t].sentence_index;
  }
  std::unordered_set<std::string_view> ids;
  const int num_tokens = static_cast<int>(tokens.size());
  for (const Mention& m : mentions) {
    if (!ids.insert(m.id).second) {
      throw ValidationError(where + ": duplicate mention id '" + m.id + "'");
    }
    if (m.start_token < 0 || m.start_token > m.end_token || m.end_token >= num_tokens) {
      throw ValidationError(where + ": mention '" + m.id + "' span out of bounds");
    }
    if (tokens[m.start_token].sentence_index != m.sentence_index) {
      throw ValidationError(where + ": mention '" + m.id + "' sentence index mismatch");
    }
  }
}

void Clustering::Validate() const {
  std::unordered_set<std::string_view> seen;
  for (const auto& cluster : clusters) {
    if (cluster.empty()) {
      throw ValidationError("clustering '" + doc_id + "': empty cluster");
    }
    for (const std::string& id : cluster) {
      if (!seen.insert(id).second) {
        throw ValidationError("clustering '" + doc_id + "': mention '" + id +
                              "' appears twice");
      }
    }
  }
}

std::size_t Clustering::NumMentions() const {
  std::size_t n = 0;
  for (const auto& cluster : clusters) n += cluster.size();
  return n;
}

Document ParseDocument(std::string_view record) {
  try {
    return DocumentFromJson(ParseJson(record));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed document record: ") + e.what());
  }
}

std::vector<Document> ReadDocuments(std::istream& in) {
  return ReadLines(in, [](std::string_view line) { return ParseDocument(line); });
}

std::vector<Document> ReadDocumentFile(const std::string& path) {
  auto in = OpenInput(path);
  return ReadDocuments(in);
}

std::vector<std::size_t> SortMentions(const Document& doc) {
  std::vector<std::size_t> order(doc.mentions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Mention& x = doc.mentions[a];
    const Mention& y = doc.mentions[b];
    return std::tuple(static_cast<int>(x.m_type), x.start_token, x.end_token) <
           std::tuple(static_cast<int>(y.m_type), y.start_token, y.end_token);
  });
  return order;
}

Clustering GoldClustering(const Document& doc) {
  Clustering clustering;
  clustering.doc_id = doc.doc_id;
  std::unordered_map<std::string, std::size_t> slot;
  for (const Mention& m : doc.mentions) {
    if (!m.gold_entity) {
      throw ValidationError("document '" + doc.doc_id + "': mention '" + m.id +
                            "' has no gold_entity");
    }
    auto [it, inserted] = slot.try_emplace(*m.gold_entity, clustering.clusters.size());
    if (inserted) clustering.clusters.emplace_back();
    clustering.clusters[it->second].push_back(m.id);
  }
  return clustering;
}

Clustering ParseClustering(std::string_view record) {
  try {
    json parsed = ParseJson(record);
    if (parsed.contains("sentences")) return GoldClustering(DocumentFromJson(parsed));
    Clustering clustering;
    clustering.doc_id = StringField(parsed, "doc_id", "clustering");
    const json& clusters = Field(parsed, "clusters", "clustering '" + clustering.doc_id + "'");
    if (!clusters.is_array()) throw ParseError("field 'clusters' must be an array");
    for (const json& cluster : clusters) {
      if (!cluster.is_array()) throw ParseError("field 'clusters' must hold arrays");
      std::vector<std::string> ids;
      for (const json& id : cluster) ids.push_back(IdField(id, "clusters"));
      clustering.clusters.push_back(std::move(ids));
    }
    clustering.Validate();
    return clustering;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed clustering record: ") + e.what());
  }
}

std::vector<Clustering> ReadClusterings(std::istream& in) {
  return ReadLines(in, [](std::string_view line) { return ParseClustering(line); });
}

std::vector<Clustering> ReadClusteringFile(const std::string& path) {
  auto in = OpenInput(path);
  return ReadClusterings(in);
}

std::string SerializeClustering(const Clustering& clustering) {
  nlohmann::ordered_json out;
  out["doc_id"] = clustering.doc_id;
  out["clusters"] = nlohmann::ordered_json::array();
  for (const auto& cluster : clustering.clusters) out["clusters"].push_back(cluster);
  return out.dump();
}

}  // namespace xcoref
