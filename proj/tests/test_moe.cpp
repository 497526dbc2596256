#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "megi/moe.hpp"

using namespace megi;

namespace {

SystemConfig defaults() { return validate_config(SystemConfig{}).cfg; }

TaskRequest task_of(int length, double complexity) {
  TaskRequest t;
  t.id = 1;
  t.length = length;
  t.complexity = complexity;
  return t;
}

}  // namespace

TEST_CASE("equal affinities with zero noise give uniform weights") {
  const SystemConfig cfg = defaults();
  std::vector<DeviceProfile> devices(cfg.n_devices);
  for (auto& d : devices) d.expert.affinity = {0.3, 0.3, 0.3, 0.3};
  RngStream rng(1, StreamLabel::kGating);
  const auto w = gating_scores(task_of(100, 0.5), devices, rng, 0.0);
  REQUIRE(static_cast<int>(w.size()) == cfg.n_devices);
  for (double x : w) CHECK(x == doctest::Approx(1.0 / cfg.n_devices));
}

TEST_CASE("a dominant logit takes nearly all the weight") {
  const SystemConfig cfg = defaults();
  std::vector<DeviceProfile> devices(cfg.n_devices);
  for (auto& d : devices) d.expert.affinity = {0.0, 0.0, 0.0, 0.0};
  devices[4].expert.affinity = {10.0, 10.0, 10.0, 10.0};
  RngStream rng(1, StreamLabel::kGating);
  const auto w = gating_scores(task_of(100, 0.1), devices, rng, 0.0);
  // e^10 / (e^10 + 14) evaluated directly
  CHECK(w[4] > 0.999);
}

TEST_CASE("gating weights always sum to one") {
  const SystemConfig cfg = validate_config(SystemConfig{}).cfg;
  const auto devices = build_devices(cfg);
  RngStream rng(7, StreamLabel::kGating);
  RngStream complexity_rng(8, StreamLabel::kArrivals);
  for (int i = 0; i < 1000; ++i) {
    const auto w =
        gating_scores(task_of(64, complexity_rng.uniform()), devices, rng);
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    REQUIRE(std::abs(sum - 1.0) <= 1e-9);
    for (double x : w) REQUIRE(x > 0.0);
  }
}

TEST_CASE("top-2 of [0.5, 0.3, 0.2] renormalizes to [0.625, 0.375]") {
  const auto a = top_k_route({0.5, 0.3, 0.2}, 2, task_of(100, 0.5));
  REQUIRE(a.experts == std::vector<int>{0, 1});
  CHECK(a.weights[0] == doctest::Approx(0.625));
  CHECK(a.weights[1] == doctest::Approx(0.375));
  // 62.5/37.5 round to the even neighbors and already sum to 100
  CHECK(a.token_split == std::vector<int>{62, 38});
}

TEST_CASE("k=1 degenerates to a single full-length branch") {
  const auto a = top_k_route({0.2, 0.5, 0.3}, 1, task_of(321, 0.5));
  REQUIRE(a.experts == std::vector<int>{1});
  CHECK(a.weights[0] == doctest::Approx(1.0));
  CHECK(a.token_split[0] == 321);
}

TEST_CASE("ties select the lowest expert index") {
  const auto a = top_k_route({0.25, 0.25, 0.25, 0.25}, 2, task_of(100, 0.5));
  CHECK(a.experts == std::vector<int>{0, 1});
}

TEST_CASE("k outside the expert count is rejected") {
  CHECK_THROWS_AS(top_k_route({0.5, 0.5}, 3, task_of(10, 0.1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(top_k_route({0.5, 0.5}, 0, task_of(10, 0.1)),
                  std::invalid_argument);
}

// Conservation property over random weight vectors and every k choice.
TEST_CASE("splits conserve tokens and weights renormalize exactly") {
  const SystemConfig cfg = defaults();
  RngStream rng(99, StreamLabel::kGating);
  for (int trial = 0; trial < 20000; ++trial) {
    std::vector<double> w(cfg.n_devices);
    double sum = 0.0;
    for (double& x : w) {
      x = rng.uniform() + 1e-9;
      sum += x;
    }
    for (double& x : w) x /= sum;
    const int len = 1 + static_cast<int>(rng.next_below(1024));
    for (int k : cfg.k_choices) {
      const auto a = top_k_route(w, k, task_of(len, 0.5));
      long long total = 0;
      double wsum = 0.0;
      double min_sel = 1e9;
      for (std::size_t i = 0; i < a.experts.size(); ++i) {
        total += a.token_split[i];
        wsum += a.weights[i];
        REQUIRE(a.token_split[i] >= 0);
        min_sel = std::min(min_sel, w[a.experts[i]]);
      }
      REQUIRE(total == len);
      REQUIRE(std::abs(wsum - 1.0) <= 1e-9);
      // top-k dominance
      double max_unsel = -1.0;
      for (int i = 0; i < cfg.n_devices; ++i) {
        bool sel = false;
        for (int e : a.experts) sel = sel || e == i;
        if (!sel) max_unsel = std::max(max_unsel, w[i]);
      }
      if (max_unsel >= 0.0) REQUIRE(min_sel >= max_unsel);
    }
  }
}

TEST_CASE("aggregate completes only when every branch verifies") {
  GatingAssignment a;
  a.experts = {0, 3};
  a.weights = {0.6, 0.4};
  a.token_split = {60, 40};

  std::vector<ExpertPartial> ok(2);
  ok[0] = {0, 60, 1, true, 0.4};
  ok[1] = {3, 40, 1, true, 0.9};
  const TaskResult r = aggregate(ok, a);
  CHECK(r.completed);
  CHECK(r.latency == doctest::Approx(0.9));  // max rule
  CHECK(r.weights_used == a.weights);

  std::vector<ExpertPartial> bad = ok;
  bad[1].verified = false;
  CHECK_FALSE(aggregate(bad, a).completed);

  std::vector<ExpertPartial> single(1);
  single[0] = {0, 100, 0, true, 0.8};
  GatingAssignment a1;
  a1.experts = {0};
  a1.weights = {1.0};
  a1.token_split = {100};
  CHECK(aggregate(single, a1).latency == doctest::Approx(0.8));

  CHECK_THROWS_AS(aggregate(single, a), std::invalid_argument);
}
