// megisim -- versioned policy checkpoints (JSON).

#ifndef MEGI_CHECKPOINT_HPP
#define MEGI_CHECKPOINT_HPP

#include <string>

#include "megi/policy_net.hpp"

namespace megi {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  PolicyNet net;
  std::string config_hash;
};

// Round trip is bit-exact on the same platform: doubles are emitted with
// shortest round-trip precision.
void save_checkpoint(const PolicyNet& net, const std::string& config_hash,
                     const std::string& path);

// Throws std::runtime_error on unreadable/truncated files, version
// mismatches, or head/width mismatches (the offending head is named).
Checkpoint load_checkpoint(const std::string& path);

}  // namespace megi

#endif  // MEGI_CHECKPOINT_HPP
