#ifndef XCOREF_TOOLS_RUN_CONFIG_H_
#define XCOREF_TOOLS_RUN_CONFIG_H_

#include <istream>
#include <map>
#include <optional>
#include <string>

#include "xcoref/model.h"
#include "xcoref/resolver.h"

namespace xcoref::cli {

// Everything a command may need. Paths left empty are "not given".
struct RunConfig {
  std::string train_docs;
  std::string dev_docs;
  std::string test_docs;
  std::string vectors;
  std::string source_vectors;
  std::string target_vectors;
  std::string lexicon;
  std::string speech_lexicon;
  std::string model;
  std::string output;
  std::string gold;
  std::string system;
  std::string source_language;
  std::string target_language;

  ModelConfig model_config;
  bool word_dim_set = false;  // word_dim given explicitly rather than taken from the vectors
  std::optional<double> threshold;
  bool normalize_projection = false;
  double ridge_scale = 1e-12;
  int jobs = 1;

  // Applies the numeric invariants of ModelConfig / DecoderConfig.
  void Validate() const;
};

// Key/value file in the TOML subset:
//
//   # comment
//   [section]              (headers are accepted and ignored)
//   key = value
//   key = "quoted value"
//
// Relative paths are resolved against `base_dir`. Unknown keys are an error.
void ApplyConfigFile(std::istream& in, const std::string& base_dir, RunConfig* config);
void ApplyConfigFile(const std::string& path, RunConfig* config);

// Applies one key; used for both the file and command-line overrides.
void ApplySetting(const std::string& key, const std::string& value, const std::string& base_dir,
                  RunConfig* config);

}  // namespace xcoref::cli

#endif  // XCOREF_TOOLS_RUN_CONFIG_H_
