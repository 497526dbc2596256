#include "megi/quality.hpp"

#include <algorithm>
#include <cmath>

namespace megi {

double quality_score(double complexity, int k, int d,
                     const SystemConfig& cfg) {
  const double q0 = cfg.q_hi - cfg.q_span * complexity;
  const double residual =
      (1.0 - q0) * std::pow(cfg.rho_k, k - 1) * std::pow(cfg.rho_d, d);
  return std::clamp(1.0 - residual, 0.0, 1.0);
}

QualityVerdict satisfied(double score, const SystemConfig& cfg) {
  QualityVerdict v;
  v.score = score;
  v.threshold = cfg.theta;
  v.satisfied = score >= cfg.theta;
  return v;
}

int min_satisfying_depth(double complexity, int k, const SystemConfig& cfg,
                         int d_limit) {
  const double q0 = cfg.q_hi - cfg.q_span * complexity;
  const double base = (1.0 - q0) * std::pow(cfg.rho_k, k - 1);
  const double target = 1.0 - cfg.theta;
  if (base <= target) return 0;
  const int d = static_cast<int>(
      std::ceil(std::log(target / base) / std::log(cfg.rho_d)));
  return d <= d_limit ? d : -1;
}

}  // namespace megi
