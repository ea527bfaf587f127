#include "xcoref/resolver.h"

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <tuple>

#include "xcoref/errors.h"

namespace xcoref {
namespace {

// Entities in sorted-mention slots; merged-away slots become empty.
class MergeState {
 public:
  explicit MergeState(const Document& doc) : doc_(doc) {
    const std::vector<std::size_t> order = SortMentions(doc);
    for (std::size_t m : order) {
      if (doc.mentions[m].m_type == MentionType::kName) ++num_names_;
      Entity e;
      e.doc_id = doc.doc_id;
      e.mentions = {m};
      e.e_type = doc.mentions[m].e_type;
      slots_.emplace_back(std::move(e));
    }
  }

  std::size_t size() const { return slots_.size(); }
  std::size_t num_names() const { return num_names_; }
  bool alive(std::size_t slot) const { return slots_[slot].has_value(); }
  const Entity& entity(std::size_t slot) const { return *slots_[slot]; }

  // Earlier live slots of the same e_type, filtered per step.
  std::vector<std::size_t> Candidates(std::size_t i, MergeStep step) const {
    std::vector<std::size_t> out;
    const Entity& ei = entity(i);
    for (std::size_t j = 0; j < i; ++j) {
      if (!alive(j) || entity(j).e_type != ei.e_type) continue;
      if (step == MergeStep::kSameSentence && !ShareSentence(ei, entity(j))) continue;
      out.push_back(j);
    }
    return out;
  }

  // Moves slot i's mentions into slot j (j < i).
  void Merge(std::size_t i, std::size_t j) {
    Entity& target = *slots_[j];
    const Entity& source = *slots_[i];
    target.mentions.insert(target.mentions.end(), source.mentions.begin(), source.mentions.end());
    slots_[i].reset();
  }

  int EarliestStart(const Entity& e) const {
    int start = doc_.mentions[e.mentions.front()].start_token;
    for (std::size_t m : e.mentions) start = std::min(start, doc_.mentions[m].start_token);
    return start;
  }

  // Visits the entities each step resolves, in schedule order.
  template <typename Visit>
  void Run(Visit visit) {
    for (std::size_t i = 0; i < num_names_; ++i) {
      if (alive(i)) visit(i, MergeStep::kNames);
    }
    for (MergeStep step : {MergeStep::kSameSentence, MergeStep::kAnySentence}) {
      for (std::size_t i = num_names_; i < size(); ++i) {
        if (alive(i)) visit(i, step);
      }
    }
  }

  Clustering ToClustering() const {
    auto doc_order = [&](std::size_t a, std::size_t b) {
      const Mention& x = doc_.mentions[a];
      const Mention& y = doc_.mentions[b];
      return std::tuple(x.start_token, x.end_token, a) < std::tuple(y.start_token, y.end_token, b);
    };
    std::vector<std::vector<std::size_t>> groups;
    for (const auto& slot : slots_) {
      if (!slot) continue;
      std::vector<std::size_t> members = slot->mentions;
      std::sort(members.begin(), members.end(), doc_order);
      groups.push_back(std::move(members));
    }
    std::sort(groups.begin(), groups.end(),
              [&](const auto& a, const auto& b) { return doc_order(a.front(), b.front()); });
    Clustering out;
    out.doc_id = doc_.doc_id;
    for (const auto& group : groups) {
      std::vector<std::string> ids;
      for (std::size_t m : group) ids.push_back(doc_.mentions[m].id);
      out.clusters.push_back(std::move(ids));
    }
    return out;
  }

 private:
  bool ShareSentence(const Entity& a, const Entity& b) const {
    for (std::size_t x : a.mentions) {
      for (std::size_t y : b.mentions) {
        if (doc_.mentions[x].sentence_index == doc_.mentions[y].sentence_index) return true;
      }
    }
    return false;
  }

  const Document& doc_;
  std::vector<std::optional<Entity>> slots_;
  std::size_t num_names_ = 0;
};

}  // namespace

void DecoderConfig::Validate() const {
  if (!(threshold > 0 && threshold < 1)) {
    throw std::invalid_argument("decoder threshold must lie in (0,1)");
  }
}

std::vector<TrainingTriplet> GenerateTrainingTriplets(const Document& doc) {
  for (const Mention& m : doc.mentions) {
    if (!m.gold_entity) {
      throw ValidationError("document '" + doc.doc_id + "': mention '" + m.id +
                            "' has no gold_entity");
    }
  }
  // Entities stay gold-pure, so the label of any member decides.
  auto gold_of = [&](const Entity& e) -> const std::string& {
    return *doc.mentions[e.mentions.front()].gold_entity;
  };

  std::vector<TrainingTriplet> triplets;
  MergeState state(doc);
  state.Run([&](std::size_t i, MergeStep step) {
    std::vector<std::size_t> positives;
    for (std::size_t j : state.Candidates(i, step)) {
      TrainingTriplet t;
      t.entity = state.entity(i);
      t.antecedent = state.entity(j);
      t.label = gold_of(t.entity) == gold_of(t.antecedent) ? 1 : 0;
      t.doc_id = doc.doc_id;
      t.step = step;
      if (t.label == 1) positives.push_back(j);
      triplets.push_back(std::move(t));
    }
    // Coreferent antecedents of one e_type are already a single entity
    // unless an earlier step kept them apart; fold them all together.
    if (positives.empty()) return;
    const std::size_t target = positives.front();
    for (auto it = positives.rbegin(); it != positives.rend(); ++it) {
      if (*it != target) state.Merge(*it, target);
    }
    state.Merge(i, target);
  });
  return triplets;
}

Clustering Decode(const Document& doc, const EntityPairScorer& scorer,
                  const DecoderConfig& config) {
  config.Validate();
  MergeState state(doc);
  state.Run([&](std::size_t i, MergeStep step) {
    const Entity& ei = state.entity(i);
    const int start_i = state.EarliestStart(ei);
    std::optional<std::size_t> best;
    double best_score = 0.0;
    int best_distance = 0;
    for (std::size_t j : state.Candidates(i, step)) {
      const Entity& ej = state.entity(j);
      const double score = scorer(ei, ej);
      const int distance = std::abs(start_i - state.EarliestStart(ej));
      // Candidates arrive in ascending j, so ">=" on equal distance prefers
      // the later antecedent.
      if (!best || score > best_score ||
          (score == best_score && distance <= best_distance)) {
        best = j;
        best_score = score;
        best_distance = distance;
      }
    }
    if (best && best_score > config.threshold) state.Merge(i, *best);
  });
  return state.ToClustering();
}

Clustering Decode(const FeatureTable& table, const Model& model, const DecoderConfig& config) {
  auto scorer = [&](const Entity& e, const Entity& antecedent) {
    return ForwardEntities(table, e, antecedent, model.params, model.config).probability;
  };
  return Decode(table.document(), scorer, config);
}

Clustering Singletons(const Document& doc) {
  Clustering out;
  out.doc_id = doc.doc_id;
  for (const Mention& m : doc.mentions) out.clusters.push_back({m.id});
  return out;
}

}  // namespace xcoref
