#include "megi/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace megi {

using nlohmann::json;

void save_checkpoint(const PolicyNet& net, const std::string& config_hash,
                     const std::string& path) {
  json j;
  j["version"] = kCheckpointVersion;
  j["config_hash"] = config_hash;
  j["input_dim"] = net.input_dim;
  j["hidden"] = net.hidden;
  j["head_sizes"] = net.head_sizes;
  json params;
  for_each_param(const_cast<PolicyNet&>(net),
                 [&](const char* name, std::vector<double>& v) {
                   params[name] = v;
                 });
  j["params"] = std::move(params);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out << j.dump();
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();

  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw std::runtime_error("checkpoint: corrupt or truncated file " + path +
                             ": " + e.what());
  }

  if (!j.contains("version") || j["version"].get<int>() != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version in " + path);

  Checkpoint ck;
  ck.config_hash = j.value("config_hash", "");
  PolicyNet& net = ck.net;
  try {
    net.input_dim = j.at("input_dim").get<int>();
    net.hidden = j.at("hidden").get<int>();
    j.at("head_sizes").get_to(net.head_sizes);
    const json& params = j.at("params");
    for_each_param(net, [&](const char* name, std::vector<double>& v) {
      params.at(name).get_to(v);
    });
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: malformed field: ") +
                             e.what());
  }

  // Shape audit: every parameter block must match the declared dims.
  auto expect = [&](const char* name, std::size_t got, std::size_t want) {
    if (got != want)
      throw std::runtime_error(std::string("checkpoint: shape mismatch in ") +
                               name + ": got " + std::to_string(got) +
                               ", want " + std::to_string(want));
  };
  const auto h = static_cast<std::size_t>(net.hidden);
  expect("w1", net.w1.size(), h * net.input_dim);
  expect("b1", net.b1.size(), h);
  expect("w2", net.w2.size(), h * h);
  expect("b2", net.b2.size(), h);
  for (int i = 0; i < kNumHeads; ++i) {
    const std::string wn = "wh" + std::to_string(i);
    const std::string bn = "bh" + std::to_string(i);
    expect(wn.c_str(), net.wh[i].size(),
           static_cast<std::size_t>(net.head_sizes[i]) * h);
    expect(bn.c_str(), net.bh[i].size(),
           static_cast<std::size_t>(net.head_sizes[i]));
  }
  expect("wv", net.wv.size(), h);
  expect("bv", net.bv.size(), 1);
  return ck;
}

}  // namespace megi
