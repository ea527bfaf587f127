#ifndef XCOREF_ASSIGNMENT_H_
#define XCOREF_ASSIGNMENT_H_

#include <vector>

#include <Eigen/Dense>

namespace xcoref {

struct Assignment {
  // row_to_col[r] is the column matched to row r, or -1 when unmatched
  // (only possible when there are more rows than columns).
  std::vector<int> row_to_col;
  double total = 0.0;
};

// Maximum-weight one-to-one matching of rows to columns (Kuhn-Munkres on the
// zero-padded square matrix, O(n^3)). Entries must be finite.
Assignment MaxWeightAssignment(const Eigen::MatrixXd& scores);

}  // namespace xcoref

#endif  // XCOREF_ASSIGNMENT_H_
