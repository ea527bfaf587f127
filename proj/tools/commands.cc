#include "commands.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "xcoref/corpus.h"
#include "xcoref/embeddings.h"
#include "xcoref/errors.h"
#include "xcoref/features.h"
#include "xcoref/metrics.h"
#include "xcoref/training.h"

namespace xcoref::cli {
namespace {

void RequirePath(const std::string& value, const char* what) {
  if (value.empty()) throw InputError(std::string("missing required path: ") + what);
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  return out;
}

FeatureConfig LoadFeatureConfig(const RunConfig& config) {
  FeatureConfig features;
  if (!config.speech_lexicon.empty()) {
    features.speech_words = LoadSpeechLexiconFile(config.speech_lexicon);
  }
  return features;
}

// An empty store makes every lookup fall back to zeros.
VectorStore LoadVectorsOrEmpty(const std::string& path, int dimension) {
  if (path.empty()) return VectorStore(dimension);
  return LoadWordVectorFile(path);
}

std::string Fixed(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
  return buffer;
}

std::string FormatEpoch(const EpochReport& r) {
  std::string line = "epoch " + std::to_string(r.epoch) + " loss " + Fixed(r.mean_loss, 6);
  if (r.dev) {
    line += " MUC " + Fixed(r.dev->muc.f1, 4) + " B3 " + Fixed(r.dev->b_cubed.f1, 4) +
            " CEAFe " + Fixed(r.dev->ceaf_e.f1, 4) + " CoNLL " + Fixed(r.dev->conll, 4);
  }
  if (r.best) line += " *";
  return line;
}

}  // namespace

void RunProject(const RunConfig& config, std::ostream& out, std::ostream& log) {
  RequirePath(config.source_vectors, "source_vectors");
  RequirePath(config.target_vectors, "target_vectors");
  RequirePath(config.lexicon, "lexicon");
  RequirePath(config.output, "output");
  const VectorStore source = LoadWordVectorFile(config.source_vectors);
  const VectorStore target = LoadWordVectorFile(config.target_vectors);
  const BilingualLexicon lexicon = LoadLexiconFile(config.lexicon);
  log << "loaded " << source.size() << " source vectors (dim " << source.dimension() << "), "
      << target.size() << " target vectors (dim " << target.dimension() << "), "
      << lexicon.pairs.size() << " lexicon pairs\n";
  if (source.duplicates() + target.duplicates() > 0) {
    log << "skipped " << source.duplicates() + target.duplicates() << " duplicate vector entries\n";
  }
  const ProjectionFit fit = FitProjection(lexicon, source, target, {config.ridge_scale});
  WriteWordVectorFile(ProjectStore(source, fit.matrix, config.normalize_projection), config.output);
  char residual[64];
  std::snprintf(residual, sizeof(residual), "%.6e", fit.residual);
  out << "usable_pairs " << fit.usable_pairs << "\nresidual " << residual << "\n";
}

void RunTrain(const RunConfig& config, std::ostream& out, std::ostream& log) {
  RequirePath(config.train_docs, "train_docs");
  RequirePath(config.model, "model");
  config.Validate();
  ModelConfig model_config = config.model_config;
  const VectorStore store = LoadVectorsOrEmpty(config.vectors, model_config.word_dim);
  if (!config.word_dim_set) model_config.word_dim = store.dimension();
  const std::vector<Document> train = ReadDocumentFile(config.train_docs);
  const std::vector<Document> dev =
      config.dev_docs.empty() ? std::vector<Document>{} : ReadDocumentFile(config.dev_docs);
  if (train.empty()) throw InputError("training file '" + config.train_docs + "' has no documents");
  log << "training on " << train.size() << " documents, " << dev.size() << " dev documents\n";

  const TrainResult result =
      Train(train, dev, store, model_config, LoadFeatureConfig(config),
            [&](const EpochReport& r) { out << FormatEpoch(r) << '\n' << std::flush; });
  SaveModel(result.model, config.model);
  log << "saved model from epoch " << result.best_epoch << " to " << config.model << "\n";
}

void RunDecode(const RunConfig& config, std::ostream& /*out*/, std::ostream& log) {
  RequirePath(config.test_docs, "test_docs");
  RequirePath(config.model, "model");
  RequirePath(config.output, "output");
  config.Validate();
  const Model model = LoadModel(config.model);
  const VectorStore store = LoadVectorsOrEmpty(config.vectors, model.config.word_dim);
  if (store.dimension() != model.config.word_dim) {
    throw InputError("vectors have dimension " + std::to_string(store.dimension()) +
                     " but the model was trained with " + std::to_string(model.config.word_dim));
  }
  const std::vector<Document> docs = ReadDocumentFile(config.test_docs);
  const DecoderConfig decoder{config.threshold.value_or(model.config.decode_threshold)};
  const std::vector<Clustering> clusterings =
      DecodeCorpus(docs, store, model, LoadFeatureConfig(config), decoder, config.jobs);
  std::ofstream file = OpenOutput(config.output);
  for (const Clustering& c : clusterings) file << SerializeClustering(c) << '\n';
  if (!file) throw InputError("write failed for '" + config.output + "'");
  log << "decoded " << docs.size() << " documents to " << config.output << "\n";
}

void RunScore(const RunConfig& config, std::ostream& out, std::ostream& /*log*/) {
  RequirePath(config.gold, "gold");
  RequirePath(config.system, "system");
  const std::vector<Clustering> gold = ReadClusteringFile(config.gold);
  const std::vector<Clustering> sys = ReadClusteringFile(config.system);
  std::map<std::string, const Clustering*> by_id;
  for (const Clustering& c : sys) {
    if (!by_id.emplace(c.doc_id, &c).second) {
      throw InputError("system file lists document '" + c.doc_id + "' twice");
    }
  }
  std::vector<Clustering> aligned;
  aligned.reserve(gold.size());
  for (const Clustering& g : gold) {
    auto it = by_id.find(g.doc_id);
    if (it == by_id.end()) throw InputError("document '" + g.doc_id + "' missing from system file");
    aligned.push_back(*it->second);
    by_id.erase(it);
  }
  if (!by_id.empty()) {
    throw InputError("document '" + by_id.begin()->first + "' is not in the gold file");
  }
  out << FormatReport(ScoreCorpus(gold, aligned, config.jobs));
}

int Main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-lingual entity-centric coreference resolution"};
  app.set_help_all_flag("--help-all");
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<double> threshold;
  bool show_bins = false;
  app.add_option("--config", config_path, "Key/value configuration file");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--jobs", jobs, "Worker threads for decoding and scoring");
  app.add_option("--threshold", threshold, "Merge threshold in (0,1)");
  app.add_flag("--show-bins", show_bins, "Print the distance bin edges and exit");

  // Path overrides, keyed by config names.
  std::map<std::string, std::string> overrides;
  auto path_option = [&](CLI::App* cmd, const std::string& flag, const std::string& key,
                         const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
  };

  CLI::App* project = app.add_subcommand("project", "Fit and apply a cross-lingual projection");
  path_option(project, "--source-vectors", "source_vectors", "Vectors to project");
  path_option(project, "--target-vectors", "target_vectors", "Vectors of the target space");
  path_option(project, "--lexicon", "lexicon", "Bilingual lexicon (TSV)");
  path_option(project, "--output", "output", "Projected vector file");
  bool normalize = false;
  project->add_flag("--normalize", normalize, "Length-normalize projected vectors");

  CLI::App* train = app.add_subcommand("train", "Train a scorer");
  path_option(train, "--train", "train_docs", "Training documents (JSON lines)");
  path_option(train, "--dev", "dev_docs", "Development documents");
  path_option(train, "--vectors", "vectors", "Word vectors");
  path_option(train, "--model", "model", "Output model file");
  path_option(train, "--speech-lexicon", "speech_lexicon", "Speech words, one per line");
  std::optional<int> epochs;
  train->add_option("--epochs", epochs, "Training epochs");

  CLI::App* decode = app.add_subcommand("decode", "Cluster mentions with a trained scorer");
  path_option(decode, "--docs", "test_docs", "Documents to decode");
  path_option(decode, "--vectors", "vectors", "Word vectors");
  path_option(decode, "--model", "model", "Model file");
  path_option(decode, "--output", "output", "Output clustering file");
  path_option(decode, "--speech-lexicon", "speech_lexicon", "Speech words, one per line");

  CLI::App* score = app.add_subcommand("score", "Score a system clustering file against gold");
  score->add_option_function<std::string>(
      "gold", [&](const std::string& v) { overrides["gold"] = v; }, "Gold clusters or documents");
  score->add_option_function<std::string>(
      "system", [&](const std::string& v) { overrides["system"] = v; }, "System clusters");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUser;
  }

  if (show_bins) {
    out << "word_distance_edges";
    for (int e : kWordDistanceEdges) out << ' ' << e;
    out << " inf\nsentence_distance_edges";
    for (int e : kSentenceDistanceEdges) out << ' ' << e;
    out << " inf\n";
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    err << app.help();
    return kExitUser;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) ApplyConfigFile(config_path, &config);
    for (const auto& [key, value] : overrides) ApplySetting(key, value, "", &config);
    if (seed) config.model_config.seed = *seed;
    if (jobs) config.jobs = *jobs;
    if (threshold) {
      config.threshold = *threshold;
      config.model_config.decode_threshold = *threshold;
    }
    if (epochs) config.model_config.epochs = *epochs;
    if (normalize) config.normalize_projection = true;
    config.Validate();

    if (project->parsed()) RunProject(config, out, err);
    else if (train->parsed()) RunTrain(config, out, err);
    else if (decode->parsed()) RunDecode(config, out, err);
    else if (score->parsed()) RunScore(config, out, err);
    return kExitOk;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace xcoref::cli
