#include "megi/moe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace megi {

std::vector<double> gating_scores(const TaskRequest& task,
                                  const std::vector<DeviceProfile>& devices,
                                  RngStream& rng, double sigma) {
  const int band = complexity_band(task.complexity);
  std::vector<double> logits(devices.size());
  for (std::size_t i = 0; i < devices.size(); ++i)
    logits[i] = devices[i].expert.affinity[band] + sigma * rng.normal();

  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& l : logits) {
    l = std::exp(l - m);
    sum += l;
  }
  for (double& l : logits) l /= sum;
  return logits;
}

GatingAssignment top_k_route(const std::vector<double>& weights, int k,
                             const TaskRequest& task) {
  const int n = static_cast<int>(weights.size());
  if (k < 1 || k > n)
    throw std::invalid_argument("top_k_route: k outside {1..n_experts}");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (weights[a] != weights[b]) return weights[a] > weights[b];
    return a < b;  // tie -> lowest expert index
  });

  GatingAssignment out;
  out.task_id = task.id;
  out.experts.assign(order.begin(), order.begin() + k);
  std::sort(out.experts.begin(), out.experts.end());

  double selected_sum = 0.0;
  for (int e : out.experts) selected_sum += weights[e];
  out.weights.reserve(k);
  for (int e : out.experts) out.weights.push_back(weights[e] / selected_sum);

  // Nearest-even rounding first, then push the tally onto whichever splits
  // are furthest from their ideal share until it matches the task length.
  const long long len = task.length;
  std::vector<double> ideal(k);
  out.token_split.resize(k);
  long long sum = 0;
  for (int i = 0; i < k; ++i) {
    ideal[i] = len * out.weights[i];
    out.token_split[i] = static_cast<int>(std::nearbyint(ideal[i]));
    sum += out.token_split[i];
  }
  while (sum != len) {
    const int dir = sum < len ? 1 : -1;
    int best = -1;
    double best_gap = -1.0;
    for (int i = 0; i < k; ++i) {
      if (dir < 0 && out.token_split[i] == 0) continue;
      const double gap = dir * (ideal[i] - out.token_split[i]);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    out.token_split[best] += dir;
    sum += dir;
  }
  return out;
}

TaskResult aggregate(const std::vector<ExpertPartial>& partials,
                     const GatingAssignment& assignment) {
  if (partials.size() != assignment.experts.size())
    throw std::invalid_argument("aggregate: one partial per selected expert");

  TaskResult r;
  r.completed = true;
  r.weights_used = assignment.weights;
  for (const ExpertPartial& p : partials) {
    if (!p.verified) r.completed = false;
    r.latency = std::max(r.latency, p.finish_time);
  }
  return r;
}

}  // namespace megi
