#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "megi/policy_net.hpp"

using namespace megi;

namespace {

PolicyNet tiny_net(std::uint64_t seed) {
  RngStream rng(seed, StreamLabel::kPolicyInit);
  return make_policy_net(5, 8, {3, 4, 5}, rng);
}

std::vector<Sample> frozen_batch(const PolicyNet& net, int n,
                                 std::uint64_t seed) {
  RngStream rng(seed, StreamLabel::kRollout);
  std::vector<Sample> batch(n);
  for (Sample& s : batch) {
    s.obs.resize(net.input_dim);
    for (double& x : s.obs) x = rng.uniform(-1.0, 1.0);
    for (int h = 0; h < kNumHeads; ++h)
      s.action[h] = static_cast<int>(rng.next_below(net.head_sizes[h]));
    const NetOutput out = net_forward(net, s.obs);
    double logp = 0.0;
    for (int h = 0; h < kNumHeads; ++h) logp += out.log_probs[h][s.action[h]];
    // perturb so the ratio is not identically 1
    s.logp_old = logp + rng.uniform(-0.3, 0.3);
    s.advantage = rng.uniform(-2.0, 2.0);
    s.ret = rng.uniform(-3.0, 3.0);
  }
  return batch;
}

}  // namespace

TEST_CASE("zero weights give uniform heads and zero value") {
  PolicyNet net = tiny_net(1);
  for_each_param(net, [](const char*, std::vector<double>& v) {
    std::fill(v.begin(), v.end(), 0.0);
  });
  std::vector<double> obs(net.input_dim, 0.7);
  const NetOutput out = net_forward(net, obs);
  CHECK(out.value == 0.0);
  for (int h = 0; h < kNumHeads; ++h)
    for (double p : out.probs[h])
      CHECK(p == doctest::Approx(1.0 / net.head_sizes[h]));
}

TEST_CASE("head distributions are strictly positive and sum to one") {
  const PolicyNet net = tiny_net(7);
  RngStream rng(3, StreamLabel::kRollout);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> obs(net.input_dim);
    for (double& x : obs) x = rng.uniform(-3.0, 3.0);
    const NetOutput out = net_forward(net, obs);
    for (int h = 0; h < kNumHeads; ++h) {
      const double sum =
          std::accumulate(out.probs[h].begin(), out.probs[h].end(), 0.0);
      REQUIRE(std::abs(sum - 1.0) <= 1e-9);
      for (double p : out.probs[h]) REQUIRE(p > 0.0);
    }
  }
}

TEST_CASE("forward is reproducible for a fixed net and observation") {
  const PolicyNet net = tiny_net(11);
  std::vector<double> obs(net.input_dim, 0.25);
  const NetOutput a = net_forward(net, obs);
  const NetOutput b = net_forward(net, obs);
  CHECK(a.value == b.value);
  for (int h = 0; h < kNumHeads; ++h) CHECK(a.probs[h] == b.probs[h]);
}

TEST_CASE("observation width mismatches are rejected") {
  const PolicyNet net = tiny_net(2);
  std::vector<double> obs(net.input_dim + 1, 0.0);
  CHECK_THROWS_AS(net_forward(net, obs), std::invalid_argument);
}

TEST_CASE("clipped surrogate hand values") {
  CHECK(clipped_objective(1.5, 1.0, 0.2) == doctest::Approx(1.2));
  CHECK(clipped_objective(0.5, -1.0, 0.2) == doctest::Approx(-0.8));
  CHECK(clipped_objective(1.0, 2.5, 0.2) == doctest::Approx(2.5));
}

// Central finite differences over every parameter of a frozen tiny net.
TEST_CASE("analytic gradients match finite differences") {
  PolicyNet net = tiny_net(42);
  const std::vector<Sample> batch = frozen_batch(net, 10, 4242);
  const PpoHyper hp;

  PolicyNet grads = zeros_like(net);
  ppo_loss(net, batch, hp, &grads);

  const double h = 1e-5;
  std::vector<std::vector<double>*> params, gparams;
  for_each_param(net, [&](const char*, std::vector<double>& v) {
    params.push_back(&v);
  });
  for_each_param(grads, [&](const char*, std::vector<double>& v) {
    gparams.push_back(&v);
  });

  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p]->size(); ++i) {
      double& w = (*params[p])[i];
      const double keep = w;
      w = keep + h;
      const double up = ppo_loss(net, batch, hp, nullptr).total;
      w = keep - h;
      const double dn = ppo_loss(net, batch, hp, nullptr).total;
      w = keep;
      const double fd = (up - dn) / (2.0 * h);
      const double an = (*gparams[p])[i];
      const double rel =
          std::abs(an - fd) / std::max({std::abs(fd), std::abs(an), 1e-6});
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("entropy of the loss stays nonnegative") {
  const PolicyNet net = tiny_net(5);
  const std::vector<Sample> batch = frozen_batch(net, 16, 99);
  const LossStats stats = ppo_loss(net, batch, PpoHyper{}, nullptr);
  CHECK(stats.entropy >= 0.0);
  CHECK(std::isfinite(stats.total));
}

TEST_CASE("adam drives a simple quadratic toward its target") {
  // minimize mean (V - ret)^2 with ent/policy terms neutralized by
  // advantage 0 and ratio 1
  PolicyNet net = tiny_net(8);
  std::vector<Sample> batch(4);
  for (Sample& s : batch) {
    s.obs.assign(net.input_dim, 0.5);
    s.action = {0, 0, 0};
    const NetOutput out = net_forward(net, s.obs);
    s.logp_old = out.log_probs[0][0] + out.log_probs[1][0] + out.log_probs[2][0];
    s.advantage = 0.0;
    s.ret = 1.5;
  }
  PpoHyper hp;
  hp.ent_coef = 0.0;
  AdamOptimizer opt(net, 1e-2);
  const double before =
      std::abs(net_forward(net, batch[0].obs).value - 1.5);
  for (int i = 0; i < 300; ++i) {
    PolicyNet grads = zeros_like(net);
    ppo_loss(net, batch, hp, &grads);
    opt.apply(net, grads);
  }
  const double after = std::abs(net_forward(net, batch[0].obs).value - 1.5);
  CHECK(after < 0.05);
  CHECK(after < before);
}
