#include "xcoref/metrics.h"

#include <array>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "xcoref/assignment.h"
#include "xcoref/errors.h"
#include "xcoref/parallel.h"

namespace xcoref {
namespace {

double Ratio(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 1.0 : 0.0;
  return num / den;
}

// Cluster index of every mention id.
std::unordered_map<std::string_view, int> ClusterIndex(const Clustering& c) {
  std::unordered_map<std::string_view, int> index;
  for (std::size_t k = 0; k < c.clusters.size(); ++k) {
    for (const std::string& id : c.clusters[k]) index.emplace(id, static_cast<int>(k));
  }
  return index;
}

void CheckSameUniverse(const Clustering& gold, const Clustering& sys) {
  gold.Validate();
  sys.Validate();
  std::unordered_set<std::string_view> ids;
  for (const auto& cluster : gold.clusters) ids.insert(cluster.begin(), cluster.end());
  std::size_t sys_count = 0;
  for (const auto& cluster : sys.clusters) {
    for (const std::string& id : cluster) {
      ++sys_count;
      if (!ids.contains(id)) {
        throw InputError("document '" + gold.doc_id + "': mention '" + id +
                         "' appears only in the system clustering");
      }
    }
  }
  if (sys_count != ids.size()) {
    throw InputError("document '" + gold.doc_id +
                     "': system clustering is missing gold mentions");
  }
}

// Sum over key clusters K of |K| - (number of response clusters meeting K).
double MucLinks(const Clustering& key, const Clustering& response, double* denominator) {
  const auto response_index = ClusterIndex(response);
  double num = 0.0;
  double den = 0.0;
  for (const auto& cluster : key.clusters) {
    std::unordered_set<int> parts;
    for (const std::string& id : cluster) parts.insert(response_index.at(id));
    num += static_cast<double>(cluster.size() - parts.size());
    den += static_cast<double>(cluster.size() - 1);
  }
  *denominator = den;
  return num;
}

// Sum over mentions m of |K(m) ∩ R(m)| / |K(m)|.
double BCubedSum(const Clustering& key, const Clustering& response) {
  const auto response_index = ClusterIndex(response);
  double total = 0.0;
  for (const auto& cluster : key.clusters) {
    std::unordered_map<int, int> overlap;
    for (const std::string& id : cluster) ++overlap[response_index.at(id)];
    // Each mention in the key cluster sees the overlap of its response part.
    for (const auto& [part, count] : overlap) {
      total += static_cast<double>(count) * count / static_cast<double>(cluster.size());
    }
  }
  return total;
}

}  // namespace

PRF MakePRF(double precision, double recall) {
  PRF out{precision, recall, 0.0};
  if (precision + recall > 0.0) out.f1 = 2.0 * precision * recall / (precision + recall);
  return out;
}

MetricCounts& MetricCounts::operator+=(const MetricCounts& other) {
  recall_num += other.recall_num;
  recall_den += other.recall_den;
  precision_num += other.precision_num;
  precision_den += other.precision_den;
  return *this;
}

PRF MetricCounts::Score() const {
  return MakePRF(Ratio(precision_num, precision_den), Ratio(recall_num, recall_den));
}

MetricCounts MucCounts(const Clustering& gold, const Clustering& sys) {
  CheckSameUniverse(gold, sys);
  MetricCounts c;
  c.recall_num = MucLinks(gold, sys, &c.recall_den);
  c.precision_num = MucLinks(sys, gold, &c.precision_den);
  return c;
}

MetricCounts BCubedCounts(const Clustering& gold, const Clustering& sys) {
  CheckSameUniverse(gold, sys);
  MetricCounts c;
  const auto n = static_cast<double>(gold.NumMentions());
  c.recall_num = BCubedSum(gold, sys);
  c.recall_den = n;
  c.precision_num = BCubedSum(sys, gold);
  c.precision_den = n;
  return c;
}

MetricCounts CeafECounts(const Clustering& gold, const Clustering& sys) {
  CheckSameUniverse(gold, sys);
  const auto sys_index = ClusterIndex(sys);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(gold.clusters.size(), sys.clusters.size());
  for (std::size_t g = 0; g < gold.clusters.size(); ++g) {
    for (const std::string& id : gold.clusters[g]) phi(g, sys_index.at(id)) += 1.0;
  }
  for (Eigen::Index g = 0; g < phi.rows(); ++g) {
    for (Eigen::Index s = 0; s < phi.cols(); ++s) {
      if (phi(g, s) == 0.0) continue;
      const double sizes =
          static_cast<double>(gold.clusters[g].size() + sys.clusters[s].size());
      phi(g, s) = 2.0 * phi(g, s) / sizes;
    }
  }
  const Assignment best = MaxWeightAssignment(phi);
  MetricCounts c;
  c.recall_num = best.total;
  c.recall_den = static_cast<double>(gold.clusters.size());
  c.precision_num = best.total;
  c.precision_den = static_cast<double>(sys.clusters.size());
  return c;
}

PRF Muc(const Clustering& gold, const Clustering& sys) { return MucCounts(gold, sys).Score(); }
PRF BCubed(const Clustering& gold, const Clustering& sys) {
  return BCubedCounts(gold, sys).Score();
}
PRF CeafE(const Clustering& gold, const Clustering& sys) { return CeafECounts(gold, sys).Score(); }

double ConllScore(const ScoreReport& report) {
  return (report.muc.f1 + report.b_cubed.f1 + report.ceaf_e.f1) / 3.0;
}

ScoreReport ScoreCorpus(std::span<const Clustering> gold, std::span<const Clustering> sys,
                        int jobs) {
  if (gold.size() != sys.size()) {
    throw InputError("gold has " + std::to_string(gold.size()) + " documents, system has " +
                     std::to_string(sys.size()));
  }
  for (std::size_t d = 0; d < gold.size(); ++d) {
    if (gold[d].doc_id != sys[d].doc_id) {
      throw InputError("document mismatch at position " + std::to_string(d) + ": gold '" +
                       gold[d].doc_id + "' vs system '" + sys[d].doc_id + "'");
    }
  }
  std::vector<std::array<MetricCounts, 3>> per_doc(gold.size());
  ParallelFor(gold.size(), jobs, [&](std::size_t d) {
    per_doc[d] = {MucCounts(gold[d], sys[d]), BCubedCounts(gold[d], sys[d]),
                  CeafECounts(gold[d], sys[d])};
  });
  MetricCounts muc, b3, ceaf;
  for (const auto& counts : per_doc) {
    muc += counts[0];
    b3 += counts[1];
    ceaf += counts[2];
  }
  ScoreReport report;
  report.muc = muc.Score();
  report.b_cubed = b3.Score();
  report.ceaf_e = ceaf.Score();
  report.conll = ConllScore(report);
  return report;
}

std::string FormatReport(const ScoreReport& report) {
  char buffer[256];
  std::snprintf(buffer, sizeof(buffer),
                "MUC R %.4f P %.4f F1 %.4f\n"
                "B3 R %.4f P %.4f F1 %.4f\n"
                "CEAFe R %.4f P %.4f F1 %.4f\n"
                "CoNLL F1 %.4f\n",
                report.muc.recall, report.muc.precision, report.muc.f1,
                report.b_cubed.recall, report.b_cubed.precision, report.b_cubed.f1,
                report.ceaf_e.recall, report.ceaf_e.precision, report.ceaf_e.f1, report.conll);
  return buffer;
}

}  // namespace xcoref
