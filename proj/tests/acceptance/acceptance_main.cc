// Property-based acceptance checks. Prints one PASS/FAIL line per criterion
// and exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "toy_corpus.h"
#include "xcoref/assignment.h"
#include "xcoref/embeddings.h"
#include "xcoref/features.h"
#include "xcoref/metrics.h"
#include "xcoref/model.h"
#include "xcoref/resolver.h"
#include "xcoref/training.h"

#if XCOREF_HAVE_CLI
#include "commands.h"
#endif

namespace xcoref {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

template <typename... Args>
std::string Format(const char* fmt, Args... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), fmt, args...);
  return buffer;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

bool Near(const PRF& a, const PRF& b, double tol) {
  return std::abs(a.precision - b.precision) <= tol && std::abs(a.recall - b.recall) <= tol &&
         std::abs(a.f1 - b.f1) <= tol;
}

bool Near(const PRF& a, double recall, double precision, double tol) {
  return std::abs(a.recall - recall) <= tol && std::abs(a.precision - precision) <= tol;
}

ModelConfig ToyConfig(int word_dim, int relu_dim, int epochs) {
  ModelConfig c;
  c.feature_embed_dim = 8;
  c.word_dim = word_dim;
  c.relu_dim = relu_dim;
  c.sigmoid_dim = 16;
  c.batch_size = 2;
  c.learning_rate_start = 0.5;
  c.learning_rate_end = 0.025;
  c.epochs = epochs;
  c.seed = 17;
  return c;
}

std::size_t CountMentions(const std::vector<Document>& docs) {
  std::size_t n = 0;
  for (const Document& d : docs) n += d.mentions.size();
  return n;
}

// 1. Analytic gradients against central differences.
Outcome GradientSuite() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(2, 5);
  int draws = 0;
  int redrawn = 0;
  double worst = 0.0;
  std::size_t scalars = 0;
  while (draws < 40) {
    ModelConfig config;
    config.feature_embed_dim = dim(rng);
    config.word_dim = dim(rng) - 1;
    config.relu_dim = dim(rng);
    config.sigmoid_dim = dim(rng);
    const ModelParams params = testing::RandomParams(rng, config);
    std::vector<std::vector<double>> storage;
    const int count = std::uniform_int_distribution<int>(1, 4)(rng);
    const auto pairs = testing::RandomPairs(rng, config, count, &storage);
    if (testing::NearKink(pairs, params, config, 1e-3)) {
      ++redrawn;
      continue;
    }
    const int label = static_cast<int>(rng() & 1);
    const testing::GradientCheck check = testing::CheckGradients(pairs, params, config, label, 1e-5);
    worst = std::max(worst, check.max_relative_error);
    scalars += check.checked;
    ++draws;
  }
  const double elapsed = Seconds(start);
  return {worst < 1e-4 && elapsed < 10.0,
          Format("%d draws (%d redrawn near ReLU kinks), %zu scalars, max rel err %.2e, %.2fs",
                 draws, redrawn, scalars, worst, elapsed)};
}

// 2. Metrics against brute-force oracles plus hand-derived values.
Outcome MetricSuite() {
  const auto start = Clock::now();
  std::mt19937_64 rng(77);
  const int cases = 2000;
  int mismatches = 0;
  for (int k = 0; k < cases; ++k) {
    const int n = std::uniform_int_distribution<int>(1, 8)(rng);
    const Clustering gold = testing::RandomClustering(rng, n, 4);
    const Clustering sys = testing::RandomClustering(rng, n, 4);
    if (!Near(Muc(gold, sys), testing::OracleMuc(gold, sys), 1e-12) ||
        !Near(BCubed(gold, sys), testing::OracleBCubed(gold, sys), 1e-12) ||
        !Near(CeafE(gold, sys), testing::OracleCeafE(gold, sys), 1e-12)) {
      ++mismatches;
    }
  }

  int hand = 0;
  const Clustering gold7{"d", {{"a", "b", "c"}, {"d", "e", "f", "g"}}};
  const Clustering sys7{"d", {{"a", "b"}, {"c", "d"}, {"e", "f", "g"}}};
  hand += Near(Muc(gold7, sys7), 3.0 / 5, 3.0 / 4, 1e-12) &&
          std::abs(Muc(gold7, sys7).f1 - 2.0 / 3) <= 1e-12;
  const Clustering gold3{"d", {{"a", "b"}, {"c"}}};
  hand += Near(BCubed(gold3, Clustering{"d", {{"a", "b", "c"}}}), 1.0, 5.0 / 9, 1e-12);
  hand += Near(CeafE(gold3, Clustering{"d", {{"a"}, {"b"}, {"c"}}}), 5.0 / 6, 5.0 / 9, 1e-12);

  const double elapsed = Seconds(start);
  return {mismatches == 0 && hand == 3 && elapsed < 30.0,
          Format("%d random cases, %d mismatches, %d/3 hand examples, %.2fs", cases, mismatches,
                 hand, elapsed)};
}

// 3. Kuhn-Munkres against exhaustive permutation search.
Outcome AssignmentSuite() {
  const auto start = Clock::now();
  std::mt19937_64 rng(5);
  const int cases = 3000;
  int mismatches = 0;
  for (int k = 0; k < cases; ++k) {
    const int rows = std::uniform_int_distribution<int>(1, 6)(rng);
    const int cols = std::uniform_int_distribution<int>(1, 6)(rng);
    Eigen::MatrixXd m(rows, cols);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const bool coarse = k % 3 == 0;  // many ties
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) m(r, c) = coarse ? std::floor(u(rng) * 4) : u(rng);
    }
    const Assignment a = MaxWeightAssignment(m);
    double total = 0.0;
    std::vector<bool> used(static_cast<std::size_t>(cols), false);
    bool valid = a.row_to_col.size() == static_cast<std::size_t>(rows);
    for (int r = 0; valid && r < rows; ++r) {
      const int c = a.row_to_col[static_cast<std::size_t>(r)];
      if (c < 0) continue;
      if (c >= cols || used[static_cast<std::size_t>(c)]) valid = false;
      else {
        used[static_cast<std::size_t>(c)] = true;
        total += m(r, c);
      }
    }
    const double best = testing::ExhaustiveAssignment(m);
    if (!valid || std::abs(total - best) > 1e-9 || std::abs(a.total - best) > 1e-9) ++mismatches;
  }
  return {mismatches == 0,
          Format("%d matrices up to 6x6, %d mismatches, %.2fs", cases, mismatches, Seconds(start))};
}

// 4. Overfitting a separable toy corpus and generalizing to held-out toy docs.
Outcome OverfitSuite() {
  const auto start = Clock::now();
  const testing::ToyCorpus all = testing::MakeSeparableCorpus(18, 4242);
  const std::vector<Document> train(all.docs.begin(), all.docs.begin() + 12);
  const std::vector<Document> dev(all.docs.begin() + 12, all.docs.end());

  // Selecting on the training set itself reports the first epoch that fits it.
  int first_perfect = 0;
  const TrainResult fit = Train(train, train, all.store, ToyConfig(8, 16, 50), {},
                                [&](const EpochReport& r) {
                                  if (first_perfect == 0 && r.dev && r.dev->conll == 1.0) {
                                    first_perfect = r.epoch;
                                  }
                                });
  const double train_conll = EvaluateCorpus(train, all.store, fit.model, {}, {0.5}).conll;
  const double dev_conll = EvaluateCorpus(dev, all.store, fit.model, {}, {0.5}).conll;
  const double elapsed = Seconds(start);
  return {train_conll == 1.0 && first_perfect > 0 && dev_conll >= 0.95 && elapsed < 60.0,
          Format("%zu train docs / %zu mentions, train CoNLL %.4f (first at epoch %d), "
                 "held-out CoNLL %.4f, %.2fs",
                 train.size(), CountMentions(train), train_conll, first_perfect, dev_conll,
                 elapsed)};
}

// 5. Projection recovery and zero-shot decoding of a second synthetic language.
Outcome CrossLingualSuite() {
  const auto start = Clock::now();
  const testing::CrossLingualSetup setup = testing::MakeCrossLingualSetup(31, 10, 200);
  const ProjectionFit fit = FitProjection(setup.lexicon, setup.store_b, setup.store_a);
  const Eigen::MatrixXd inverse = setup.map_a_to_b.inverse();
  const double recovery = (fit.matrix - inverse).cwiseAbs().maxCoeff();
  const VectorStore projected = ProjectStore(setup.store_b, fit.matrix);

  const TrainResult trained =
      Train(setup.train_a, setup.dev_a, setup.store_a, ToyConfig(10, 32, 40));
  const double source_conll =
      EvaluateCorpus(setup.dev_a, setup.store_a, trained.model, {}, {0.5}).conll;
  const double target_conll =
      EvaluateCorpus(setup.test_b, projected, trained.model, {}, {0.5}).conll;
  const double unprojected =
      EvaluateCorpus(setup.test_b, setup.store_b, trained.model, {}, {0.5}).conll;
  std::vector<Clustering> gold, singletons;
  for (const Document& d : setup.test_b) {
    gold.push_back(GoldClustering(d));
    singletons.push_back(Singletons(d));
  }
  const double baseline = ScoreCorpus(gold, singletons).conll;
  return {recovery < 1e-5 && target_conll >= 0.9,
          Format("%zu usable pairs, max |W - L^-1| %.2e, source dev CoNLL %.4f, projected target "
                 "CoNLL %.4f (unprojected %.4f, all singletons %.4f), %.2fs",
                 fit.usable_pairs, recovery, source_conll, target_conll, unprojected, baseline,
                 Seconds(start))};
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 6. Reruns with a fixed seed give byte-identical model and decode files.
Outcome DeterminismSuite() {
  const auto start = Clock::now();
  const fs::path dir = fs::temp_directory_path() / "xcoref_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const testing::ToyCorpus toy = testing::MakeSeparableCorpus(6, 99);
  const testing::ToyCorpus held = testing::MakeSeparableCorpus(3, 100);
  {
    std::ofstream train(dir / "train.jsonl");
    for (const Document& d : toy.docs) train << testing::DocumentRecord(d) << '\n';
    std::ofstream test(dir / "test.jsonl");
    for (const Document& d : held.docs) test << testing::DocumentRecord(d) << '\n';
  }
  WriteWordVectorFile(toy.store, (dir / "vectors.txt").string());

  std::vector<std::string> models, outputs, logs;
  for (int run = 0; run < 3; ++run) {
    const std::string model = (dir / ("model" + std::to_string(run) + ".bin")).string();
    const std::string output = (dir / ("out" + std::to_string(run) + ".jsonl")).string();
#if XCOREF_HAVE_CLI
    const std::string jobs = std::to_string(1 + run);
    std::ostringstream out, err;
    int code = cli::Main({"xcoref", "--seed", "7", "train", "--train", (dir / "train.jsonl").string(),
                          "--dev", (dir / "train.jsonl").string(), "--vectors",
                          (dir / "vectors.txt").string(), "--model", model, "--epochs", "5"},
                         out, err);
    code |= cli::Main({"xcoref", "--jobs", jobs, "decode", "--docs", (dir / "test.jsonl").string(),
                       "--vectors", (dir / "vectors.txt").string(), "--model", model, "--output",
                       output},
                      out, err);
    if (code != 0) {
      fs::remove_all(dir);
      return {false, "command failed: " + err.str()};
    }
    logs.push_back(out.str());
#else
    ModelConfig config = ToyConfig(8, 16, 5);
    config.seed = 7;
    const TrainResult r = Train(toy.docs, toy.docs, toy.store, config);
    SaveModel(r.model, model);
    std::ofstream file(output);
    for (const Clustering& c : DecodeCorpus(held.docs, toy.store, LoadModel(model), {}, {0.5}, 1 + run)) {
      file << SerializeClustering(c) << '\n';
    }
#endif
    models.push_back(ReadFile(model));
    outputs.push_back(ReadFile(output));
  }
  fs::remove_all(dir);
  bool same = !models[0].empty() && !outputs[0].empty();
  for (int run = 1; run < 3; ++run) {
    same = same && models[run] == models[0] && outputs[run] == outputs[0];
    if (!logs.empty()) same = same && logs[run] == logs[0];
  }
#if XCOREF_HAVE_CLI
  const char* via = "via the xcoref command";
#else
  const char* via = "via the library";
#endif
  return {same, Format("3 train+decode runs %s, model %zu bytes, decode output %zu bytes, %s, %.2fs",
                       via, models[0].size(), outputs[0].size(),
                       same ? "identical" : "DIFFERENT", Seconds(start))};
}

// 7. Attention rescaling, pair permutation and fuzzed decoding.
Outcome InvarianceSuite() {
  const auto start = Clock::now();
  std::mt19937_64 rng(8);
  double worst_scale = 0.0;
  double worst_perm = 0.0;
  for (int k = 0; k < 500; ++k) {
    ModelConfig config;
    config.feature_embed_dim = 3;
    config.word_dim = 2;
    config.relu_dim = 5;
    config.sigmoid_dim = 4;
    ModelParams params = testing::RandomParams(rng, config);
    std::vector<std::vector<double>> storage;
    auto pairs = testing::RandomPairs(rng, config, std::uniform_int_distribution<int>(1, 6)(rng),
                                      &storage);
    const double p = Forward(pairs, params, config).probability;
    const double c = std::exp(std::uniform_real_distribution<double>(-4.0, 4.0)(rng));
    ModelParams scaled = params;
    scaled.attention *= c;
    worst_scale = std::max(worst_scale, std::abs(Forward(pairs, scaled, config).probability - p));
    std::shuffle(pairs.begin(), pairs.end(), rng);
    worst_perm = std::max(worst_perm, std::abs(Forward(pairs, params, config).probability - p));
  }

  int invalid = 0;
  int merges = 0;
  const int docs = 1500;
  for (int k = 0; k < docs; ++k) {
    const Document doc = testing::MakeRandomDocument(1000 + static_cast<std::uint64_t>(k));
    Model model;
    model.config.feature_embed_dim = 3;
    model.config.word_dim = 2;
    model.config.relu_dim = 4;
    model.config.sigmoid_dim = 4;
    model.params = testing::RandomParams(rng, model.config);
    const VectorStore empty(2);
    const FeatureTable table(doc, empty, {});
    const double threshold = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const Clustering out = Decode(table, model, {threshold});

    std::map<std::string, EntityType> types;
    for (const Mention& m : doc.mentions) types[m.id] = m.e_type;
    std::map<std::string, int> seen;
    bool ok = out.doc_id == doc.doc_id;
    for (const auto& cluster : out.clusters) {
      if (cluster.empty()) ok = false;
      if (cluster.size() > 1) ++merges;
      for (const std::string& id : cluster) {
        ++seen[id];
        if (!types.count(id) || types[id] != types[cluster.front()]) ok = false;
      }
    }
    if (seen.size() != types.size()) ok = false;
    for (const auto& [id, n] : seen) ok = ok && n == 1;
    if (!ok) ++invalid;
  }
  return {worst_scale <= 1e-12 && worst_perm <= 1e-12 && invalid == 0,
          Format("rescaling max diff %.1e, permutation max diff %.1e over 500 draws; %d fuzzed docs, "
                 "%d invalid partitions, %d multi-mention clusters, %.2fs",
                 worst_scale, worst_perm, docs, invalid, merges, Seconds(start))};
}

}  // namespace
}  // namespace xcoref

int main() {
  using xcoref::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 gradient check", xcoref::GradientSuite},
      {"2 metric oracles", xcoref::MetricSuite},
      {"3 assignment solver", xcoref::AssignmentSuite},
      {"4 toy overfit", xcoref::OverfitSuite},
      {"5 cross-lingual transfer", xcoref::CrossLingualSuite},
      {"6 determinism", xcoref::DeterminismSuite},
      {"7 invariances", xcoref::InvarianceSuite},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failed;
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << name << ": " << outcome.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
