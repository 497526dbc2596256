// megisim -- actor-critic network for the dynamic scheme.
//
// A small MLP (two tanh hidden layers) with three categorical heads over
// the k / power / CoT-depth menus and a scalar value estimate. Forward,
// analytic PPO-loss gradients and Adam are implemented directly so the
// gradients can be audited against finite differences.

#ifndef MEGI_POLICY_NET_HPP
#define MEGI_POLICY_NET_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "megi/rng.hpp"

namespace megi {

inline constexpr int kNumHeads = 3;

struct PolicyNet {
  int input_dim = 0;
  int hidden = 64;
  std::array<int, kNumHeads> head_sizes{};  // |k_choices|, |power_levels|, d_max+1

  std::vector<double> w1, b1;  // hidden x input
  std::vector<double> w2, b2;  // hidden x hidden
  std::array<std::vector<double>, kNumHeads> wh, bh;
  std::vector<double> wv, bv;  // 1 x hidden, 1
};

// Visits every parameter vector (paired with its name) in a fixed order.
template <typename Net, typename F>
void for_each_param(Net& net, F&& f) {
  f("w1", net.w1);
  f("b1", net.b1);
  f("w2", net.w2);
  f("b2", net.b2);
  f("wh0", net.wh[0]);
  f("bh0", net.bh[0]);
  f("wh1", net.wh[1]);
  f("bh1", net.bh[1]);
  f("wh2", net.wh[2]);
  f("bh2", net.bh[2]);
  f("wv", net.wv);
  f("bv", net.bv);
}

// Xavier-uniform weights, zero biases. rng is the policy-init stream.
PolicyNet make_policy_net(int input_dim, int hidden,
                          std::array<int, kNumHeads> head_sizes,
                          RngStream& rng);

// Gradients (or Adam moments) with the same shapes as the net.
PolicyNet zeros_like(const PolicyNet& net);

struct NetOutput {
  std::array<std::vector<double>, kNumHeads> probs;
  std::array<std::vector<double>, kNumHeads> log_probs;
  double value = 0.0;
};

NetOutput net_forward(const PolicyNet& net, std::span<const double> obs);

// One experience tuple with advantage attached.
struct Sample {
  std::vector<double> obs;
  std::array<int, kNumHeads> action{};
  double logp_old = 0.0;
  double advantage = 0.0;
  double ret = 0.0;  // value target
};

struct PpoHyper {
  double clip_eps = 0.2;
  double vf_coef = 0.5;
  double ent_coef = 0.01;
};

struct LossStats {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
};

// total = policy + vf_coef*value - ent_coef*entropy, with the clipped
// surrogate policy term. Pass grads=nullptr for a loss-only evaluation
// (used by the finite-difference oracle).
LossStats ppo_loss(const PolicyNet& net, std::span<const Sample> batch,
                   const PpoHyper& hp, PolicyNet* grads);

// Per-sample clipped surrogate objective min(r*A, clip(r)*A).
double clipped_objective(double ratio, double advantage, double clip_eps);

class AdamOptimizer {
 public:
  AdamOptimizer(const PolicyNet& shape, double lr);
  void apply(PolicyNet& net, const PolicyNet& grads);

 private:
  double lr_;
  long long t_ = 0;
  PolicyNet m_, v_;
};

}  // namespace megi

#endif  // MEGI_POLICY_NET_HPP
