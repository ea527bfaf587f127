#ifndef XCOREF_METRICS_H_
#define XCOREF_METRICS_H_

#include <span>
#include <string>

#include "xcoref/corpus.h"

namespace xcoref {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Harmonic mean, 0 when both inputs are 0.
PRF MakePRF(double precision, double recall);

// Numerators and denominators of one metric, summed over documents so a
// corpus score is a micro-average. A ratio with a zero denominator counts
// as 1 when its numerator is also zero, so identical partitions always
// score 1 (this matters for MUC on all-singleton documents).
struct MetricCounts {
  double recall_num = 0.0;
  double recall_den = 0.0;
  double precision_num = 0.0;
  double precision_den = 0.0;

  MetricCounts& operator+=(const MetricCounts& other);
  PRF Score() const;
};

// Each throws InputError if the two clusterings do not cover the same
// mention ids.
MetricCounts MucCounts(const Clustering& gold, const Clustering& sys);
MetricCounts BCubedCounts(const Clustering& gold, const Clustering& sys);
MetricCounts CeafECounts(const Clustering& gold, const Clustering& sys);

PRF Muc(const Clustering& gold, const Clustering& sys);
PRF BCubed(const Clustering& gold, const Clustering& sys);
PRF CeafE(const Clustering& gold, const Clustering& sys);

struct ScoreReport {
  PRF muc;
  PRF b_cubed;
  PRF ceaf_e;
  double conll = 0.0;
};

// Mean of the three F1 values.
double ConllScore(const ScoreReport& report);

// Micro-averaged report over aligned document lists; per-document counts
// may be computed on `jobs` threads and are summed in document order.
// Throws InputError if doc ids differ at any position.
ScoreReport ScoreCorpus(std::span<const Clustering> gold, std::span<const Clustering> sys,
                        int jobs = 1);

// Four lines, values with 4 decimals:
//   MUC R 0.6000 P 0.7500 F1 0.6667
//   B3 R ... P ... F1 ...
//   CEAFe R ... P ... F1 ...
//   CoNLL F1 ...
std::string FormatReport(const ScoreReport& report);

}  // namespace xcoref

#endif  // XCOREF_METRICS_H_
