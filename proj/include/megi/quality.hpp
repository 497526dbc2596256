// megisim -- closed-form reasoning quality model.
//
// Base quality falls linearly with task complexity; each extra expert and
// each CoT step shrink the residual error geometrically:
//   score = 1 - (1 - q0) * rho_k^(k-1) * rho_d^d,  q0 = q_hi - q_span*c

#ifndef MEGI_QUALITY_HPP
#define MEGI_QUALITY_HPP

#include "megi/config.hpp"

namespace megi {

struct QualityVerdict {
  double score = 0.0;
  double threshold = 0.0;
  bool satisfied = false;
};

double quality_score(double complexity, int k, int d, const SystemConfig& cfg);

QualityVerdict satisfied(double score, const SystemConfig& cfg);

// Smallest d with score >= theta for (complexity, k); -1 if none up to
// d_limit. Closed form, checked against brute force in the tests.
int min_satisfying_depth(double complexity, int k, const SystemConfig& cfg,
                         int d_limit);

}  // namespace megi

#endif  // MEGI_QUALITY_HPP
