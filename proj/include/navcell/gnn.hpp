#pragma once

// Inference-only portal scoring: encoder, three message-passing layers with
// two-layer-skip residuals, and an edge MLP with sigmoid output.

#include <Eigen/Core>
#include <json.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "navcell/cellgraph.hpp"
#include "navcell/error.hpp"

namespace navcell {

inline constexpr std::string_view kWeightFormat = "navcell-gnn";
inline constexpr int kWeightSchemaVersion = 1;
inline constexpr std::string_view kResidualRule = "h2+=h0,h3+=h1";

enum class GnnArch { Gcn2d, Gatv2_3d };

struct GnnHeader {
  GnnArch arch = GnnArch::Gcn2d;
  int d_n = 11;
  int d_e = 9;
  int hidden = 128;
  int heads = 1;
  std::string feature_version;
  double norm_eps = 1e-5;
  double leaky_slope = 0.2;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Folded normalization: y = x * scale + shift.
struct Affine {
  Eigen::RowVectorXd scale;
  Eigen::RowVectorXd shift;
};

struct Linear {
  RowMatrix weight;  // [out, in]
  Eigen::RowVectorXd bias;

  RowMatrix operator()(const RowMatrix& x) const {
    RowMatrix y = x * weight.transpose();
    y.rowwise() += bias;
    return y;
  }
};

struct MessageLayer {
  // GCN
  RowMatrix weight;
  // GATv2
  Linear lin_l;
  Linear lin_r;
  RowMatrix att;  // [heads, channels]
  bool concat = true;
  Eigen::RowVectorXd bias;
  Affine norm;
};

struct GnnWeights {
  GnnHeader header;
  Linear encoder;
  Affine encoder_norm;
  std::array<MessageLayer, 3> layers;
  Affine edge_norm;
  std::array<Linear, 3> edge_mlp;
};

namespace detail {

struct TensorTable {
  std::map<std::string, std::pair<std::vector<int>, std::vector<double>>> tensors;
  std::set<std::string> used;

  const std::vector<double>& take(const std::string& name, const std::vector<int>& shape) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw Error(ErrorCode::SchemaMismatch, "missing tensor " + name);
    if (it->second.first != shape) throw Error(ErrorCode::ShapeMismatch, "unexpected shape for " + name);
    used.insert(name);
    return it->second.second;
  }

  RowMatrix matrix(const std::string& name, int rows, int cols) {
    const auto& d = take(name, {rows, cols});
    return Eigen::Map<const RowMatrix>(d.data(), rows, cols);
  }

  Eigen::RowVectorXd vector(const std::string& name, int n) {
    const auto& d = take(name, {n});
    return Eigen::Map<const Eigen::RowVectorXd>(d.data(), n);
  }

  Linear linear(const std::string& prefix, int out, int in) {
    return {matrix(prefix + ".weight", out, in), vector(prefix + ".bias", out)};
  }

  Affine affine(const std::string& prefix, int n, double eps) {
    const auto gamma = vector(prefix + ".weight", n);
    const auto beta = vector(prefix + ".bias", n);
    const auto mean = vector(prefix + ".running_mean", n);
    const auto var = vector(prefix + ".running_var", n);
    if ((var.array() < 0.0).any()) throw Error(ErrorCode::SchemaMismatch, "negative running variance in " + prefix);
    Affine a;
    a.scale = gamma.array() / (var.array() + eps).sqrt();
    a.shift = beta.array() - mean.array() * a.scale.array();
    return a;
  }
};

template <typename T>
T field(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw Error(ErrorCode::SchemaMismatch, std::string("missing field ") + key);
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::SchemaMismatch, std::string("bad type for field ") + key);
  }
}

}  // namespace detail

inline GnnWeights parse_weights(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("header") || !doc.contains("tensors"))
    throw Error(ErrorCode::SchemaMismatch, "weight file needs header and tensors");
  const auto& h = doc["header"];
  if (detail::field<std::string>(h, "format") != kWeightFormat)
    throw Error(ErrorCode::SchemaMismatch, "unknown weight format");
  if (detail::field<int>(h, "schema_version") != kWeightSchemaVersion)
    throw Error(ErrorCode::SchemaMismatch, "unsupported schema version");
  GnnWeights w;
  GnnHeader& hd = w.header;
  const auto arch = detail::field<std::string>(h, "arch");
  if (arch == "gcn2d") {
    hd.arch = GnnArch::Gcn2d;
  } else if (arch == "gatv2_3d") {
    hd.arch = GnnArch::Gatv2_3d;
  } else {
    throw Error(ErrorCode::SchemaMismatch, "unknown arch " + arch);
  }
  hd.d_n = detail::field<int>(h, "d_n");
  hd.d_e = detail::field<int>(h, "d_e");
  hd.hidden = detail::field<int>(h, "hidden");
  hd.heads = detail::field<int>(h, "heads");
  hd.feature_version = detail::field<std::string>(h, "feature_version");
  hd.norm_eps = detail::field<double>(h, "norm_eps");
  hd.leaky_slope = detail::field<double>(h, "leaky_relu_slope");
  if (detail::field<std::string>(h, "residual") != kResidualRule)
    throw Error(ErrorCode::SchemaMismatch, "unsupported residual rule");
  if (hd.d_n < 1 || hd.d_e < 1 || hd.hidden < 1 || hd.heads < 1 || !(hd.norm_eps > 0.0))
    throw Error(ErrorCode::SchemaMismatch, "invalid header dimensions");
  if (hd.arch == GnnArch::Gatv2_3d && hd.hidden % hd.heads != 0)
    throw Error(ErrorCode::ShapeMismatch, "hidden size not divisible by head count");

  detail::TensorTable table;
  const auto& tensors = doc["tensors"];
  if (!tensors.is_object()) throw Error(ErrorCode::SchemaMismatch, "tensors must be an object");
  for (auto it = tensors.begin(); it != tensors.end(); ++it) {
    auto shape = detail::field<std::vector<int>>(it.value(), "shape");
    auto data = detail::field<std::vector<double>>(it.value(), "data");
    std::size_t count = 1;
    for (int s : shape) {
      if (s < 0) throw Error(ErrorCode::ShapeMismatch, "negative dimension in " + it.key());
      count *= static_cast<std::size_t>(s);
    }
    if (count != data.size()) throw Error(ErrorCode::ShapeMismatch, "data length does not match shape of " + it.key());
    for (double v : data)
      if (!std::isfinite(v)) throw Error(ErrorCode::SchemaMismatch, "non-finite value in " + it.key());
    table.tensors.emplace(it.key(), std::make_pair(std::move(shape), std::move(data)));
  }

  const int H = hd.hidden;
  w.encoder = table.linear("encoder", H, hd.d_n);
  w.encoder_norm = table.affine("encoder_norm", H, hd.norm_eps);
  for (int l = 0; l < 3; ++l) {
    const std::string p = "layers." + std::to_string(l);
    MessageLayer& layer = w.layers[l];
    if (hd.arch == GnnArch::Gcn2d) {
      layer.weight = table.matrix(p + ".lin.weight", H, H);
      layer.bias = table.vector(p + ".bias", H);
    } else {
      layer.concat = l < 2;
      const int c = layer.concat ? H / hd.heads : H;
      layer.lin_l = table.linear(p + ".lin_l", hd.heads * c, H);
      layer.lin_r = table.linear(p + ".lin_r", hd.heads * c, H);
      const auto& att = table.take(p + ".att", {1, hd.heads, c});
      layer.att = Eigen::Map<const RowMatrix>(att.data(), hd.heads, c);
      layer.bias = table.vector(p + ".bias", layer.concat ? hd.heads * c : c);
    }
    layer.norm = table.affine("norms." + std::to_string(l), H, hd.norm_eps);
  }
  w.edge_norm = table.affine("edge_norm", hd.d_e, hd.norm_eps);
  w.edge_mlp[0] = table.linear("edge_mlp.0", H, 2 * H + hd.d_e);
  w.edge_mlp[1] = table.linear("edge_mlp.2", 32, H);
  w.edge_mlp[2] = table.linear("edge_mlp.4", 1, 32);
  for (const auto& [name, _] : table.tensors)
    if (!table.used.count(name)) throw Error(ErrorCode::SchemaMismatch, "unexpected tensor " + name);
  return w;
}

inline GnnWeights load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::SchemaMismatch, "cannot open weight file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("malformed weight file: ") + e.what());
  }
  return parse_weights(doc);
}

/// Throws FeatureVersionMismatch unless the weights were trained on this graph's features.
template <Vector V>
void check_compatible(const GnnWeights& w, const CellGraph<V>& g) {
  using Traits = GraphTraits<V>;
  const GnnArch expected = Traits::kDim == 2 ? GnnArch::Gcn2d : GnnArch::Gatv2_3d;
  if (w.header.arch != expected || w.header.d_n != Traits::kNodeFeatures || w.header.d_e != Traits::kEdgeFeatures ||
      w.header.feature_version != Traits::kFeatureVersion)
    throw Error(ErrorCode::FeatureVersionMismatch, "weights do not match the " + std::to_string(Traits::kDim) +
                                                       "D feature packing " + std::string(Traits::kFeatureVersion));
  (void)g;
}

namespace detail {

inline void apply(RowMatrix& x, const Affine& a) {
  x.array().rowwise() *= a.scale.array();
  x.rowwise() += a.shift;
}

inline void relu(RowMatrix& x) { x = x.cwiseMax(0.0); }

inline void check_finite(const RowMatrix& x, const char* stage) {
  if (!x.allFinite()) throw Error(ErrorCode::NonFiniteActivation, std::string("non-finite activation after ") + stage);
}

inline RowMatrix gcn_layer(const MessageLayer& layer, const RowMatrix& h, const std::vector<std::vector<Link>>& adj) {
  const RowMatrix xw = h * layer.weight.transpose();
  const int n = static_cast<int>(adj.size());
  Eigen::VectorXd inv_sqrt(n);
  for (int i = 0; i < n; ++i) inv_sqrt(i) = 1.0 / std::sqrt(1.0 + static_cast<double>(adj[i].size()));
  RowMatrix out(n, xw.cols());
  for (int i = 0; i < n; ++i) {
    out.row(i) = xw.row(i) * (inv_sqrt(i) * inv_sqrt(i));
    for (const Link& l : adj[i]) out.row(i) += xw.row(l.cell) * (inv_sqrt(i) * inv_sqrt(l.cell));
  }
  out.rowwise() += layer.bias;
  return out;
}

inline RowMatrix gatv2_layer(const MessageLayer& layer, const RowMatrix& h, const std::vector<std::vector<Link>>& adj,
                             int heads, double slope) {
  const RowMatrix xl = layer.lin_l(h);
  const RowMatrix xr = layer.lin_r(h);
  const int n = static_cast<int>(adj.size());
  const int c = static_cast<int>(layer.att.cols());
  RowMatrix out = RowMatrix::Zero(n, layer.concat ? heads * c : c);
  std::vector<int> sources;
  std::vector<double> logits;
  for (int i = 0; i < n; ++i) {
    sources.assign(1, i);
    for (const Link& l : adj[i]) sources.push_back(l.cell);
    for (int k = 0; k < heads; ++k) {
      logits.assign(sources.size(), 0.0);
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < sources.size(); ++s) {
        Eigen::RowVectorXd z = xl.row(sources[s]).segment(k * c, c) + xr.row(i).segment(k * c, c);
        z = z.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
        logits[s] = z.dot(layer.att.row(k));
        top = std::max(top, logits[s]);
      }
      double total = 0.0;
      for (double& v : logits) total += (v = std::exp(v - top));
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(c);
      for (std::size_t s = 0; s < sources.size(); ++s) acc += (logits[s] / total) * xl.row(sources[s]).segment(k * c, c);
      if (layer.concat) {
        out.row(i).segment(k * c, c) = acc;
      } else {
        out.row(i) += acc / heads;
      }
    }
  }
  out.rowwise() += layer.bias;
  return out;
}

}  // namespace detail

/// Node embeddings after the third message-passing layer.
template <Vector V>
RowMatrix node_embeddings(const CellGraph<V>& g, const GnnWeights& w) {
  check_compatible(w, g);
  RowMatrix h0 = w.encoder(RowMatrix(g.node_features));
  detail::apply(h0, w.encoder_norm);
  detail::relu(h0);
  detail::check_finite(h0, "encoder");
  std::array<RowMatrix, 4> h{h0, {}, {}, {}};
  for (int l = 0; l < 3; ++l) {
    const MessageLayer& layer = w.layers[l];
    RowMatrix x = w.header.arch == GnnArch::Gcn2d
                      ? detail::gcn_layer(layer, h[l], g.adjacency)
                      : detail::gatv2_layer(layer, h[l], g.adjacency, w.header.heads, w.header.leaky_slope);
    detail::apply(x, layer.norm);
    detail::relu(x);
    if (l >= 1) x += h[l - 1];
    detail::check_finite(x, "message passing");
    h[l + 1] = std::move(x);
  }
  return h[3];
}

/// One score in (0,1) per portal, from its canonical direction.
template <Vector V>
std::vector<double> score_portals(const CellGraph<V>& g, const GnnWeights& w) {
  const RowMatrix h = node_embeddings(g, w);
  const int m = static_cast<int>(g.num_portals());
  const int H = w.header.hidden;
  RowMatrix input(m, 2 * H + w.header.d_e);
  for (int p = 0; p < m; ++p) {
    input.row(p).segment(0, H) = h.row(g.portals[p].src);
    input.row(p).segment(H, H) = h.row(g.portals[p].dst);
    input.row(p).segment(2 * H, w.header.d_e) = g.edge_features.row(2 * p);
  }
  if (m > 0) {
    RowMatrix e = input.rightCols(w.header.d_e);
    detail::apply(e, w.edge_norm);
    input.rightCols(w.header.d_e) = e;
  }
  RowMatrix x = w.edge_mlp[0](input);
  detail::relu(x);
  x = w.edge_mlp[1](x);
  detail::relu(x);
  x = w.edge_mlp[2](x);
  detail::check_finite(x, "edge MLP");
  std::vector<double> out(m);
  for (int p = 0; p < m; ++p) out[p] = 1.0 / (1.0 + std::exp(-x(p, 0)));
  return out;
}

}  // namespace navcell
