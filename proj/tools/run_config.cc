#include "run_config.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "xcoref/errors.h"
#include "xcoref/text.h"

namespace xcoref::cli {
namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw InputError("config: '" + key + "' expects a number, got '" + value + "'");
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& value) {
  const std::string lower = AsciiLower(value);
  if (lower == "true" || lower == "1" || lower == "yes") return true;
  if (lower == "false" || lower == "0" || lower == "no") return false;
  throw InputError("config: '" + key + "' expects true/false, got '" + value + "'");
}

std::string ResolvePath(const std::string& value, const std::string& base_dir) {
  if (value.empty() || base_dir.empty()) return value;
  std::filesystem::path p(value);
  if (p.is_absolute()) return value;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

void RunConfig::Validate() const {
  try {
    model_config.Validate();
    if (threshold) DecoderConfig{*threshold}.Validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  if (jobs < 1) throw InputError("config: jobs must be at least 1");
  if (!(ridge_scale >= 0)) throw InputError("config: ridge_scale must be nonnegative");
}

void ApplySetting(const std::string& raw_key, const std::string& value,
                  const std::string& base_dir, RunConfig* c) {
  // Section prefixes ("model.relu_dim") are accepted.
  const std::string key = raw_key.substr(raw_key.rfind('.') + 1);
  const std::map<std::string, std::string*> paths = {
      {"train_docs", &c->train_docs},         {"dev_docs", &c->dev_docs},
      {"test_docs", &c->test_docs},           {"vectors", &c->vectors},
      {"source_vectors", &c->source_vectors}, {"target_vectors", &c->target_vectors},
      {"lexicon", &c->lexicon},               {"speech_lexicon", &c->speech_lexicon},
      {"model", &c->model},                   {"output", &c->output},
      {"gold", &c->gold},                     {"system", &c->system},
  };
  if (auto it = paths.find(key); it != paths.end()) {
    *it->second = ResolvePath(value, base_dir);
    return;
  }
  ModelConfig& m = c->model_config;
  if (key == "source_language") c->source_language = value;
  else if (key == "target_language") c->target_language = value;
  else if (key == "feature_embed_dim") m.feature_embed_dim = ParseNumber<int>(key, value);
  else if (key == "word_dim") {
    m.word_dim = ParseNumber<int>(key, value);
    c->word_dim_set = true;
  }
  else if (key == "relu_dim") m.relu_dim = ParseNumber<int>(key, value);
  else if (key == "sigmoid_dim") m.sigmoid_dim = ParseNumber<int>(key, value);
  else if (key == "learning_rate_start") m.learning_rate_start = ParseNumber<double>(key, value);
  else if (key == "learning_rate_end") m.learning_rate_end = ParseNumber<double>(key, value);
  else if (key == "batch_size") m.batch_size = ParseNumber<int>(key, value);
  else if (key == "epochs") m.epochs = ParseNumber<int>(key, value);
  else if (key == "seed") m.seed = ParseNumber<std::uint64_t>(key, value);
  else if (key == "threshold" || key == "decode_threshold") {
    c->threshold = ParseNumber<double>(key, value);
    m.decode_threshold = *c->threshold;
  }
  else if (key == "normalize_projection") c->normalize_projection = ParseBool(key, value);
  else if (key == "ridge_scale") c->ridge_scale = ParseNumber<double>(key, value);
  else if (key == "jobs") c->jobs = ParseNumber<int>(key, value);
  else throw InputError("config: unknown key '" + raw_key + "'");
}

void ApplyConfigFile(std::istream& in, const std::string& base_dir, RunConfig* config) {
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string text = Trim(line);
    if (text.empty() || text[0] == '#') continue;
    if (text.front() == '[' && text.back() == ']') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(line_number) + ": expected 'key = value'");
    }
    const std::string key = Trim(text.substr(0, eq));
    std::string value = Trim(text.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    } else if (auto hash = value.find(" #"); hash != std::string::npos) {
      value = Trim(value.substr(0, hash));
    }
    try {
      ApplySetting(key, value, base_dir, config);
    } catch (const InputError& e) {
      throw InputError("config line " + std::to_string(line_number) + ": " + e.what());
    }
  }
}

void ApplyConfigFile(const std::string& path, RunConfig* config) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  ApplyConfigFile(in, std::filesystem::path(path).parent_path().string(), config);
}

}  // namespace xcoref::cli
