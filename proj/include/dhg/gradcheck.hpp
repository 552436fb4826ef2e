#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dhg {

// Result of one finite-difference comparison over a named group: a single
// tape operation on random tensors, or every parameter of a full model on a
// small fixture graph.
struct GradCheckResult {
  std::string group;
  double max_rel_err = 0.0;
};

// Central finite differences (h = 1e-5) against backward-pass gradients for
// every tape operation and for full forward passes of both aggregation
// variants and the relational baseline on an 8-node fixture graph with
// feature dimensions <= 4. The error of one input block is
// ||g - fd|| / max(||g|| + ||fd||, 1e-12) over all entries; a group reports
// the worst block.
std::vector<GradCheckResult> run_gradcheck(uint64_t seed);

// True when every group is strictly below `tol`.
bool gradcheck_passed(const std::vector<GradCheckResult>& results, double tol = 1e-4);

// One aligned line per group with the max relative error and a pass marker.
std::string format_gradcheck(const std::vector<GradCheckResult>& results, double tol = 1e-4);

}  // namespace dhg
