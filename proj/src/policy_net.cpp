#include "megi/policy_net.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace megi {

namespace {

void xavier_fill(std::vector<double>& w, int fan_out, int fan_in,
                 RngStream& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  w.resize(static_cast<std::size_t>(fan_out) * fan_in);
  for (double& x : w) x = rng.uniform(-limit, limit);
}

// y = W x + b, W is rows x cols row-major.
void affine(const std::vector<double>& w, const std::vector<double>& b,
            std::span<const double> x, int rows, int cols,
            std::vector<double>& y) {
  y.assign(rows, 0.0);
  for (int r = 0; r < rows; ++r) {
    double acc = b[r];
    const double* wr = w.data() + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) acc += wr[c] * x[c];
    y[r] = acc;
  }
}

void softmax_log(const std::vector<double>& logits, std::vector<double>& probs,
                 std::vector<double>& logp) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  probs.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - m);
    sum += probs[i];
  }
  const double logsum = m + std::log(sum);
  logp.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] /= sum;
    logp[i] = logits[i] - logsum;
  }
}

struct TrunkPass {
  std::vector<double> a1, a2;
  std::array<std::vector<double>, kNumHeads> logits;
};

void trunk_forward(const PolicyNet& net, std::span<const double> obs,
                   TrunkPass& p, NetOutput& out) {
  affine(net.w1, net.b1, obs, net.hidden, net.input_dim, p.a1);
  for (double& v : p.a1) v = std::tanh(v);
  affine(net.w2, net.b2, p.a1, net.hidden, net.hidden, p.a2);
  for (double& v : p.a2) v = std::tanh(v);
  for (int h = 0; h < kNumHeads; ++h) {
    affine(net.wh[h], net.bh[h], p.a2, net.head_sizes[h], net.hidden,
           p.logits[h]);
    softmax_log(p.logits[h], out.probs[h], out.log_probs[h]);
  }
  double v = net.bv[0];
  for (int c = 0; c < net.hidden; ++c) v += net.wv[c] * p.a2[c];
  out.value = v;
}

}  // namespace

PolicyNet make_policy_net(int input_dim, int hidden,
                          std::array<int, kNumHeads> head_sizes,
                          RngStream& rng) {
  PolicyNet net;
  net.input_dim = input_dim;
  net.hidden = hidden;
  net.head_sizes = head_sizes;
  xavier_fill(net.w1, hidden, input_dim, rng);
  net.b1.assign(hidden, 0.0);
  xavier_fill(net.w2, hidden, hidden, rng);
  net.b2.assign(hidden, 0.0);
  for (int h = 0; h < kNumHeads; ++h) {
    xavier_fill(net.wh[h], head_sizes[h], hidden, rng);
    net.bh[h].assign(head_sizes[h], 0.0);
  }
  xavier_fill(net.wv, 1, hidden, rng);
  net.bv.assign(1, 0.0);
  return net;
}

PolicyNet zeros_like(const PolicyNet& net) {
  PolicyNet z = net;
  for_each_param(z, [](const char*, std::vector<double>& v) {
    std::fill(v.begin(), v.end(), 0.0);
  });
  return z;
}

NetOutput net_forward(const PolicyNet& net, std::span<const double> obs) {
  if (static_cast<int>(obs.size()) != net.input_dim)
    throw std::invalid_argument("net_forward: observation width mismatch");
  TrunkPass pass;
  NetOutput out;
  trunk_forward(net, obs, pass, out);
  return out;
}

double clipped_objective(double ratio, double advantage, double clip_eps) {
  const double clipped =
      std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps) * advantage;
  return std::min(ratio * advantage, clipped);
}

LossStats ppo_loss(const PolicyNet& net, std::span<const Sample> batch,
                   const PpoHyper& hp, PolicyNet* grads) {
  if (batch.empty()) throw std::invalid_argument("ppo_loss: empty batch");
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  LossStats stats;

  TrunkPass pass;
  NetOutput out;
  std::vector<double> dlogits, da2, da1;

  for (const Sample& s : batch) {
    trunk_forward(net, s.obs, pass, out);

    double logp_new = 0.0;
    for (int h = 0; h < kNumHeads; ++h)
      logp_new += out.log_probs[h][s.action[h]];
    const double ratio = std::exp(logp_new - s.logp_old);

    const double obj = clipped_objective(ratio, s.advantage, hp.clip_eps);
    stats.policy -= inv_n * obj;

    const double verr = out.value - s.ret;
    stats.value += inv_n * verr * verr;

    double ent = 0.0;
    for (int h = 0; h < kNumHeads; ++h)
      for (int j = 0; j < net.head_sizes[h]; ++j)
        ent -= out.probs[h][j] * out.log_probs[h][j];
    stats.entropy += inv_n * ent;

    if (!grads) continue;

    // d(policy term)/d logp_new: the gradient flows through the surrogate
    // only when the unclipped branch is the active minimum.
    const double unclipped = ratio * s.advantage;
    const double pol_coef =
        (unclipped <= std::clamp(ratio, 1.0 - hp.clip_eps, 1.0 + hp.clip_eps) *
                          s.advantage)
            ? -inv_n * unclipped
            : 0.0;
    const double dvalue = hp.vf_coef * inv_n * 2.0 * verr;

    da2.assign(net.hidden, 0.0);
    for (int c = 0; c < net.hidden; ++c) da2[c] += net.wv[c] * dvalue;
    grads->bv[0] += dvalue;
    for (int c = 0; c < net.hidden; ++c) grads->wv[c] += dvalue * pass.a2[c];

    for (int h = 0; h < kNumHeads; ++h) {
      const int hs = net.head_sizes[h];
      double head_ent = 0.0;
      for (int j = 0; j < hs; ++j)
        head_ent -= out.probs[h][j] * out.log_probs[h][j];

      dlogits.assign(hs, 0.0);
      for (int j = 0; j < hs; ++j) {
        const double p = out.probs[h][j];
        const double indicator = (j == s.action[h]) ? 1.0 : 0.0;
        dlogits[j] += pol_coef * (indicator - p);
        // -ent_coef * mean entropy; dH/dlogit_j = -p_j (log p_j + H)
        dlogits[j] += hp.ent_coef * inv_n * p * (out.log_probs[h][j] + head_ent);
      }
      auto& gw = grads->wh[h];
      auto& gb = grads->bh[h];
      for (int j = 0; j < hs; ++j) {
        gb[j] += dlogits[j];
        double* row = gw.data() + static_cast<std::size_t>(j) * net.hidden;
        for (int c = 0; c < net.hidden; ++c) row[c] += dlogits[j] * pass.a2[c];
        const double* wrow =
            net.wh[h].data() + static_cast<std::size_t>(j) * net.hidden;
        for (int c = 0; c < net.hidden; ++c) da2[c] += wrow[c] * dlogits[j];
      }
    }

    // through tanh layer 2
    da1.assign(net.hidden, 0.0);
    for (int r = 0; r < net.hidden; ++r) {
      const double dz = da2[r] * (1.0 - pass.a2[r] * pass.a2[r]);
      grads->b2[r] += dz;
      double* row = grads->w2.data() + static_cast<std::size_t>(r) * net.hidden;
      for (int c = 0; c < net.hidden; ++c) row[c] += dz * pass.a1[c];
      const double* wrow =
          net.w2.data() + static_cast<std::size_t>(r) * net.hidden;
      for (int c = 0; c < net.hidden; ++c) da1[c] += wrow[c] * dz;
    }

    // through tanh layer 1
    for (int r = 0; r < net.hidden; ++r) {
      const double dz = da1[r] * (1.0 - pass.a1[r] * pass.a1[r]);
      grads->b1[r] += dz;
      double* row =
          grads->w1.data() + static_cast<std::size_t>(r) * net.input_dim;
      for (int c = 0; c < net.input_dim; ++c) row[c] += dz * s.obs[c];
    }
  }

  stats.total = stats.policy + hp.vf_coef * stats.value -
                hp.ent_coef * stats.entropy;
  return stats;
}

AdamOptimizer::AdamOptimizer(const PolicyNet& shape, double lr)
    : lr_(lr), m_(zeros_like(shape)), v_(zeros_like(shape)) {}

void AdamOptimizer::apply(PolicyNet& net, const PolicyNet& grads) {
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  ++t_;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));

  // for_each_param visits in a fixed order, so the four nets zip cleanly.
  std::vector<std::vector<double>*> ws, ms, vs;
  std::vector<const std::vector<double>*> gs;
  for_each_param(net, [&](const char*, std::vector<double>& x) {
    ws.push_back(&x);
  });
  for_each_param(m_, [&](const char*, std::vector<double>& x) {
    ms.push_back(&x);
  });
  for_each_param(v_, [&](const char*, std::vector<double>& x) {
    vs.push_back(&x);
  });
  for_each_param(grads, [&](const char*, const std::vector<double>& x) {
    gs.push_back(&x);
  });

  for (std::size_t p = 0; p < ws.size(); ++p) {
    auto& w = *ws[p];
    auto& m = *ms[p];
    auto& v = *vs[p];
    const auto& g = *gs[p];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
      w[i] -= lr_ * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kEps);
    }
  }
}

}  // namespace megi
