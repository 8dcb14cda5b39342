#pragma once

#include <json.hpp>

#include <random>
#include <string>
#include <vector>

#include "navcell/gnn.hpp"

namespace testutil {

struct WeightSpec {
  std::string arch = "gcn2d";
  int d_n = 11;
  int d_e = 9;
  int hidden = 8;
  int heads = 1;
  std::string feature_version = "navcell-2d-v1";
  double scale = 0.3;
  std::uint64_t seed = 1;
  bool zero = false;
};

inline WeightSpec spec_3d(int hidden = 8, int heads = 4) {
  WeightSpec s;
  s.arch = "gatv2_3d";
  s.d_n = 14;
  s.d_e = 13;
  s.hidden = hidden;
  s.heads = heads;
  s.feature_version = "navcell-3d-v1";
  return s;
}

inline nlohmann::json random_weights(const WeightSpec& s) {
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> var(0.5, 2.0);
  nlohmann::json tensors = nlohmann::json::object();
  auto put = [&](const std::string& name, std::vector<int> shape, double sd) {
    std::size_t count = 1;
    for (int d : shape) count *= d;
    std::vector<double> data(count);
    for (double& v : data) v = s.zero ? 0.0 : sd * n01(rng);
    tensors[name] = {{"shape", shape}, {"data", data}};
  };
  auto norm = [&](const std::string& p, int n) {
    std::vector<double> g(n), b(n), m(n), v(n);
    for (int i = 0; i < n; ++i) {
      g[i] = s.zero ? 1.0 : 1.0 + 0.1 * n01(rng);
      b[i] = s.zero ? 0.0 : 0.1 * n01(rng);
      m[i] = s.zero ? 0.0 : 0.1 * n01(rng);
      v[i] = s.zero ? 1.0 : var(rng);
    }
    tensors[p + ".weight"] = {{"shape", {n}}, {"data", g}};
    tensors[p + ".bias"] = {{"shape", {n}}, {"data", b}};
    tensors[p + ".running_mean"] = {{"shape", {n}}, {"data", m}};
    tensors[p + ".running_var"] = {{"shape", {n}}, {"data", v}};
  };
  const int H = s.hidden;
  put("encoder.weight", {H, s.d_n}, s.scale);
  put("encoder.bias", {H}, s.scale);
  norm("encoder_norm", H);
  for (int l = 0; l < 3; ++l) {
    const std::string p = "layers." + std::to_string(l);
    if (s.arch == "gcn2d") {
      put(p + ".lin.weight", {H, H}, s.scale);
      put(p + ".bias", {H}, s.scale);
    } else {
      const int c = l < 2 ? H / s.heads : H;
      put(p + ".lin_l.weight", {s.heads * c, H}, s.scale);
      put(p + ".lin_l.bias", {s.heads * c}, s.scale);
      put(p + ".lin_r.weight", {s.heads * c, H}, s.scale);
      put(p + ".lin_r.bias", {s.heads * c}, s.scale);
      put(p + ".att", {1, s.heads, c}, s.scale);
      put(p + ".bias", {l < 2 ? s.heads * c : c}, s.scale);
    }
    norm("norms." + std::to_string(l), H);
  }
  norm("edge_norm", s.d_e);
  put("edge_mlp.0.weight", {H, 2 * H + s.d_e}, s.scale);
  put("edge_mlp.0.bias", {H}, s.scale);
  put("edge_mlp.2.weight", {32, H}, s.scale);
  put("edge_mlp.2.bias", {32}, s.scale);
  put("edge_mlp.4.weight", {1, 32}, s.scale);
  put("edge_mlp.4.bias", {1}, s.scale);
  nlohmann::json header = {{"format", std::string(navcell::kWeightFormat)},
                           {"schema_version", navcell::kWeightSchemaVersion},
                           {"arch", s.arch},
                           {"d_n", s.d_n},
                           {"d_e", s.d_e},
                           {"hidden", H},
                           {"heads", s.heads},
                           {"feature_version", s.feature_version},
                           {"norm_eps", 1e-5},
                           {"leaky_relu_slope", 0.2},
                           {"residual", std::string(navcell::kResidualRule)}};
  return {{"header", header}, {"tensors", tensors}};
}

}  // namespace testutil
