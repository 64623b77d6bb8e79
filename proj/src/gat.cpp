#include "pathcut/gat.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "pathcut/errors.hpp"
#include "pathcut/synthgen.hpp"

namespace pathcut {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "pathcut-gat/1";

double activate(Activation a, double x) {
  switch (a) {
    case Activation::kNone: return x;
    case Activation::kElu: return x > 0 ? x : std::expm1(x);
    case Activation::kRelu: return x > 0 ? x : 0.0;
    case Activation::kSigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

void apply_batch_norm(const BatchNorm& bn, std::vector<double>& x, int rows,
                      int cols) {
  if (bn.empty()) return;
  std::vector<double> scale(cols), shift(cols);
  for (int c = 0; c < cols; ++c) {
    scale[c] = bn.gamma[c] / std::sqrt(bn.var[c] + bn.epsilon);
    shift[c] = bn.beta[c] - bn.mean[c] * scale[c];
  }
  for (int r = 0; r < rows; ++r) {
    double* row = x.data() + size_t(r) * cols;
    for (int c = 0; c < cols; ++c) row[c] = row[c] * scale[c] + shift[c];
  }
}

void check_finite(const std::vector<double>& x, const std::string& layer) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw NumericError("non-finite activation in layer '" + layer + "'");
    }
  }
}

// x (rows x in) times w (in x out), row-major.
std::vector<double> matmul(const std::vector<double>& x, int rows, int in,
                           const std::vector<double>& w, int out) {
  std::vector<double> y(size_t(rows) * out, 0.0);
  for (int r = 0; r < rows; ++r) {
    const double* xr = x.data() + size_t(r) * in;
    double* yr = y.data() + size_t(r) * out;
    for (int k = 0; k < in; ++k) {
      const double a = xr[k];
      if (a == 0.0) continue;
      const double* wk = w.data() + size_t(k) * out;
      for (int c = 0; c < out; ++c) yr[c] += a * wk[c];
    }
  }
  return y;
}

std::vector<double> gat_layer_forward(
    const WeightedGraph& g, const GatLayer& layer, const std::vector<double>& x,
    std::vector<std::vector<std::vector<double>>>* trace) {
  const int n = g.node_count();
  const int H = layer.heads;
  const int D = layer.head_dim;
  const int width = H * D;
  const int out = layer.out_dim();
  const std::vector<double> z = matmul(x, n, layer.in_dim, layer.weight, width);

  std::vector<double> y(size_t(n) * out, 0.0);
  std::vector<double> self_term(n), nb_term(n);
  std::vector<double> logits;
  if (trace) trace->assign(H, std::vector<std::vector<double>>(n));

  for (int h = 0; h < H; ++h) {
    const double* a_self = layer.attention.data() + size_t(h) * 2 * D;
    const double* a_nb = a_self + D;
    for (int v = 0; v < n; ++v) {
      const double* zv = z.data() + size_t(v) * width + size_t(h) * D;
      double s = 0.0, t = 0.0;
      for (int d = 0; d < D; ++d) {
        s += a_self[d] * zv[d];
        t += a_nb[d] * zv[d];
      }
      self_term[v] = s;
      nb_term[v] = t;
    }
    for (int i = 0; i < n; ++i) {
      auto nbrs = g.neighbors(i);
      logits.assign(nbrs.size() + 1, 0.0);
      auto score = [&](int j) {
        const double e = self_term[i] + nb_term[j];
        return e > 0 ? e : layer.negative_slope * e;
      };
      logits[0] = score(i);
      for (size_t k = 0; k < nbrs.size(); ++k) {
        logits[k + 1] = score(nbrs[k].neighbor);
      }
      const double peak = *std::max_element(logits.begin(), logits.end());
      double total = 0.0;
      for (double& l : logits) {
        l = std::exp(l - peak);
        total += l;
      }
      for (double& l : logits) l /= total;

      double* yi = y.data() + size_t(i) * out +
                   (layer.concat ? size_t(h) * D : 0);
      const double head_scale = layer.concat ? 1.0 : 1.0 / H;
      auto accumulate = [&](int j, double alpha) {
        const double* zj = z.data() + size_t(j) * width + size_t(h) * D;
        for (int d = 0; d < D; ++d) yi[d] += head_scale * alpha * zj[d];
      };
      accumulate(i, logits[0]);
      for (size_t k = 0; k < nbrs.size(); ++k) {
        accumulate(nbrs[k].neighbor, logits[k + 1]);
      }
      if (trace) (*trace)[h][i] = logits;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < out; ++c) y[size_t(i) * out + c] += layer.bias[c];
  }
  apply_batch_norm(layer.batch_norm, y, n, out);
  for (double& v : y) v = activate(layer.activation, v);
  return y;
}

std::vector<double> dense_layer_forward(const DenseLayer& layer,
                                        const std::vector<double>& x,
                                        int rows) {
  std::vector<double> y =
      matmul(x, rows, layer.in_dim, layer.weight, layer.out_dim);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < layer.out_dim; ++c) {
      y[size_t(r) * layer.out_dim + c] += layer.bias[c];
    }
  }
  apply_batch_norm(layer.batch_norm, y, rows, layer.out_dim);
  for (double& v : y) v = activate(layer.activation, v);
  return y;
}

// ---- JSON ----

json tensor(const std::vector<int>& shape, const std::vector<double>& values) {
  return json{{"shape", shape}, {"values", values}};
}

std::vector<double> read_tensor(const json& parent, const std::string& key,
                                const std::vector<int>& expected,
                                const std::string& layer) {
  if (!parent.contains(key) || !parent.at(key).is_object()) {
    throw SchemaError("layer '" + layer + "': missing tensor '" + key + "'");
  }
  const json& t = parent.at(key);
  std::vector<int> shape;
  std::vector<double> values;
  try {
    shape = t.at("shape").get<std::vector<int>>();
    values = t.at("values").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw SchemaError("layer '" + layer + "': malformed tensor '" + key +
                      "': " + e.what());
  }
  if (shape != expected) {
    std::ostringstream msg;
    msg << "layer '" << layer << "': tensor '" << key << "' has shape [";
    for (size_t i = 0; i < shape.size(); ++i) msg << (i ? "," : "") << shape[i];
    msg << "], expected [";
    for (size_t i = 0; i < expected.size(); ++i) {
      msg << (i ? "," : "") << expected[i];
    }
    msg << "]";
    throw SchemaError(msg.str());
  }
  size_t count = 1;
  for (int s : shape) count *= size_t(std::max(s, 0));
  if (values.size() != count) {
    throw SchemaError("layer '" + layer + "': tensor '" + key + "' has " +
                      std::to_string(values.size()) + " values, expected " +
                      std::to_string(count));
  }
  return values;
}

json batch_norm_to_json(const BatchNorm& bn) {
  const int n = static_cast<int>(bn.mean.size());
  return json{{"epsilon", bn.epsilon},
              {"mean", tensor({n}, bn.mean)},
              {"var", tensor({n}, bn.var)},
              {"gamma", tensor({n}, bn.gamma)},
              {"beta", tensor({n}, bn.beta)}};
}

BatchNorm batch_norm_from_json(const json& layer_json, int width,
                               const std::string& layer) {
  BatchNorm bn;
  if (!layer_json.contains("batch_norm") ||
      layer_json.at("batch_norm").is_null()) {
    return bn;
  }
  const json& j = layer_json.at("batch_norm");
  bn.epsilon = j.value("epsilon", 1e-5);
  bn.mean = read_tensor(j, "mean", {width}, layer);
  bn.var = read_tensor(j, "var", {width}, layer);
  bn.gamma = read_tensor(j, "gamma", {width}, layer);
  bn.beta = read_tensor(j, "beta", {width}, layer);
  return bn;
}

int read_int(const json& j, const std::string& key, const std::string& layer) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw SchemaError("layer '" + layer + "': missing integer '" + key + "'");
  }
  return j.at(key).get<int>();
}

// "gat12" -> 12; -1 if `name` is not prefix + digits.
int layer_index(const std::string& name, const std::string& prefix) {
  if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return -1;
  int idx = 0;
  for (size_t i = prefix.size(); i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') return -1;
    idx = idx * 10 + (name[i] - '0');
  }
  return idx;
}

void check_bn(const BatchNorm& bn, int width, const std::string& layer) {
  if (bn.empty()) return;
  if (int(bn.mean.size()) != width || int(bn.var.size()) != width ||
      int(bn.gamma.size()) != width || int(bn.beta.size()) != width) {
    throw SchemaError("layer '" + layer + "': batch-norm width mismatch");
  }
  for (double v : bn.var) {
    if (!(v >= 0)) throw SchemaError("layer '" + layer + "': negative variance");
  }
  if (!(bn.epsilon > 0)) {
    throw SchemaError("layer '" + layer + "': batch-norm epsilon must be > 0");
  }
}

void check_finite_values(const std::vector<double>& v,
                         const std::string& layer) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw SchemaError("layer '" + layer + "': non-finite parameter");
    }
  }
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kNone: return "linear";
    case Activation::kElu: return "elu";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "linear";
}

Activation parse_activation(const std::string& s) {
  if (s == "linear" || s == "none") return Activation::kNone;
  if (s == "elu") return Activation::kElu;
  if (s == "relu") return Activation::kRelu;
  if (s == "sigmoid") return Activation::kSigmoid;
  throw SchemaError("unknown activation '" + s + "'");
}

void ModelWeights::validate() const {
  if (input_dim <= 0) throw SchemaError("input_dim must be positive");
  if (gat_layers.empty()) throw SchemaError("model has no attention layers");
  if (dense_layers.empty()) throw SchemaError("model has no output layer");
  int width = input_dim;
  for (const GatLayer& l : gat_layers) {
    if (l.in_dim != width) {
      throw SchemaError("layer '" + l.name + "': input width " +
                        std::to_string(l.in_dim) + " does not match " +
                        std::to_string(width));
    }
    if (l.heads <= 0 || l.head_dim <= 0) {
      throw SchemaError("layer '" + l.name + "': heads and head_dim must be > 0");
    }
    if (l.weight.size() != size_t(l.in_dim) * l.heads * l.head_dim ||
        l.attention.size() != size_t(l.heads) * 2 * l.head_dim ||
        int(l.bias.size()) != l.out_dim()) {
      throw SchemaError("layer '" + l.name + "': tensor size mismatch");
    }
    check_bn(l.batch_norm, l.out_dim(), l.name);
    check_finite_values(l.weight, l.name);
    check_finite_values(l.attention, l.name);
    check_finite_values(l.bias, l.name);
    width = l.out_dim();
  }
  for (const DenseLayer& l : dense_layers) {
    if (l.in_dim != width) {
      throw SchemaError("layer '" + l.name + "': input width " +
                        std::to_string(l.in_dim) + " does not match " +
                        std::to_string(width));
    }
    if (l.out_dim <= 0 ||
        l.weight.size() != size_t(l.in_dim) * l.out_dim ||
        int(l.bias.size()) != l.out_dim) {
      throw SchemaError("layer '" + l.name + "': tensor size mismatch");
    }
    check_bn(l.batch_norm, l.out_dim, l.name);
    check_finite_values(l.weight, l.name);
    check_finite_values(l.bias, l.name);
    width = l.out_dim;
  }
  if (width != 1) {
    throw SchemaError("layer '" + dense_layers.back().name +
                      "': output width must be 1, got " +
                      std::to_string(width));
  }
}

long long ModelWeights::parameter_count() const {
  long long total = 0;
  for (const GatLayer& l : gat_layers) {
    total += l.weight.size() + l.attention.size() + l.bias.size() +
             4 * l.batch_norm.mean.size();
  }
  for (const DenseLayer& l : dense_layers) {
    total += l.weight.size() + l.bias.size() + 4 * l.batch_norm.mean.size();
  }
  return total;
}

std::vector<FeatureFamily> ModelWeights::feature_families() const {
  if (metadata.contains("features")) {
    const json& f = metadata.at("features");
    if (f.is_string()) return parse_feature_families(f.get<std::string>());
    if (f.is_array()) {
      std::vector<FeatureFamily> out;
      for (const json& e : f) out.push_back(parse_feature_family(e.get<std::string>()));
      return out;
    }
  }
  return {FeatureFamily::kStructural, FeatureFamily::kFlow, FeatureFamily::kPpr};
}

ModelWeights make_random_weights(int input_dim, std::uint64_t seed,
                                 const ArchitectureOptions& arch) {
  if (arch.gat_heads.size() != arch.gat_head_dims.size()) {
    throw ConfigError("gat_heads and gat_head_dims differ in length");
  }
  Rng rng(seed);
  auto glorot = [&](int fan_in, int fan_out, size_t count) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::vector<double> v(count);
    for (double& x : v) x = limit * (2.0 * rng.uniform() - 1.0);
    return v;
  };
  auto small = [&](size_t count, double scale) {
    std::vector<double> v(count);
    for (double& x : v) x = scale * (2.0 * rng.uniform() - 1.0);
    return v;
  };
  auto batch_norm = [&](int width) {
    BatchNorm bn;
    bn.mean = small(width, 0.1);
    bn.var.resize(width);
    for (double& x : bn.var) x = 0.5 + rng.uniform();
    bn.gamma.resize(width);
    for (double& x : bn.gamma) x = 0.8 + 0.4 * rng.uniform();
    bn.beta = small(width, 0.1);
    return bn;
  };

  ModelWeights w;
  w.input_dim = input_dim;
  int width = input_dim;
  for (size_t i = 0; i < arch.gat_heads.size(); ++i) {
    GatLayer l;
    l.name = "gat" + std::to_string(i + 1);
    l.in_dim = width;
    l.heads = arch.gat_heads[i];
    l.head_dim = arch.gat_head_dims[i];
    l.concat = (i + 1 < arch.gat_heads.size()) || arch.last_gat_concat;
    const int hd = l.heads * l.head_dim;
    l.weight = glorot(width, hd, size_t(width) * hd);
    l.attention = glorot(2 * l.head_dim, 1, size_t(l.heads) * 2 * l.head_dim);
    l.bias = small(l.out_dim(), 0.05);
    l.batch_norm = batch_norm(l.out_dim());
    width = l.out_dim();
    w.gat_layers.push_back(std::move(l));
  }
  for (size_t i = 0; i <= arch.dense_units.size(); ++i) {
    const bool last = i == arch.dense_units.size();
    DenseLayer l;
    l.name = last ? "output" : "dense" + std::to_string(i + 1);
    l.in_dim = width;
    l.out_dim = last ? 1 : arch.dense_units[i];
    l.weight = glorot(width, l.out_dim, size_t(width) * l.out_dim);
    l.bias = small(l.out_dim, 0.05);
    if (!last) l.batch_norm = batch_norm(l.out_dim);
    l.activation = last ? Activation::kSigmoid : Activation::kElu;
    width = l.out_dim;
    w.dense_layers.push_back(std::move(l));
  }
  w.metadata = json{{"topology", "random"},
                    {"features", json::array({"structural", "flow", "ppr"})},
                    {"config_hash", std::to_string(seed)},
                    {"activation", "elu"},
                    {"attention_slope", 0.2}};
  w.validate();
  return w;
}

json weights_to_json(const ModelWeights& w) {
  json layers = json::object();
  for (const GatLayer& l : w.gat_layers) {
    json j{{"type", "gat"},
           {"in_dim", l.in_dim},
           {"heads", l.heads},
           {"head_dim", l.head_dim},
           {"concat", l.concat},
           {"negative_slope", l.negative_slope},
           {"activation", to_string(l.activation)},
           {"weight", tensor({l.in_dim, l.heads * l.head_dim}, l.weight)},
           {"attention", tensor({l.heads, 2 * l.head_dim}, l.attention)},
           {"bias", tensor({l.out_dim()}, l.bias)}};
    j["batch_norm"] = l.batch_norm.empty() ? json(nullptr)
                                           : batch_norm_to_json(l.batch_norm);
    layers[l.name] = std::move(j);
  }
  for (const DenseLayer& l : w.dense_layers) {
    json j{{"type", "dense"},
           {"in_dim", l.in_dim},
           {"out_dim", l.out_dim},
           {"activation", to_string(l.activation)},
           {"weight", tensor({l.in_dim, l.out_dim}, l.weight)},
           {"bias", tensor({l.out_dim}, l.bias)}};
    j["batch_norm"] = l.batch_norm.empty() ? json(nullptr)
                                           : batch_norm_to_json(l.batch_norm);
    layers[l.name] = std::move(j);
  }
  return json{{"format", kFormat},
              {"input_dim", w.input_dim},
              {"metadata", w.metadata},
              {"layers", std::move(layers)}};
}

ModelWeights weights_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("weight file is not a JSON object");
  if (j.value("format", std::string()) != kFormat) {
    throw SchemaError(std::string("weight file format must be '") + kFormat +
                      "'");
  }
  if (!j.contains("input_dim") || !j.at("input_dim").is_number_integer()) {
    throw SchemaError("weight file lacks integer input_dim");
  }
  if (!j.contains("layers") || !j.at("layers").is_object()) {
    throw SchemaError("weight file lacks a 'layers' object");
  }
  ModelWeights w;
  w.input_dim = j.at("input_dim").get<int>();
  if (j.contains("metadata")) w.metadata = j.at("metadata");

  std::map<int, std::string> gat_names, dense_names;
  bool has_output = false;
  for (const auto& [name, _] : j.at("layers").items()) {
    if (int i = layer_index(name, "gat"); i >= 0) {
      gat_names[i] = name;
    } else if (int k = layer_index(name, "dense"); k >= 0) {
      dense_names[k] = name;
    } else if (name == "output") {
      has_output = true;
    } else {
      throw SchemaError("unknown layer '" + name + "'");
    }
  }
  if (!has_output) throw SchemaError("weight file lacks layer 'output'");

  int width = w.input_dim;
  const json& layers = j.at("layers");
  for (const auto& [_, name] : gat_names) {
    const json& lj = layers.at(name);
    GatLayer l;
    l.name = name;
    l.in_dim = read_int(lj, "in_dim", name);
    if (l.in_dim != width) {
      throw SchemaError("layer '" + name + "': input width " +
                        std::to_string(l.in_dim) + " does not match " +
                        std::to_string(width));
    }
    l.heads = read_int(lj, "heads", name);
    l.head_dim = read_int(lj, "head_dim", name);
    if (l.heads <= 0 || l.head_dim <= 0) {
      throw SchemaError("layer '" + name + "': heads and head_dim must be > 0");
    }
    l.concat = lj.value("concat", true);
    l.negative_slope = lj.value("negative_slope", 0.2);
    l.activation = parse_activation(lj.value("activation", std::string("elu")));
    l.weight = read_tensor(lj, "weight", {l.in_dim, l.heads * l.head_dim}, name);
    l.attention = read_tensor(lj, "attention", {l.heads, 2 * l.head_dim}, name);
    l.bias = read_tensor(lj, "bias", {l.out_dim()}, name);
    l.batch_norm = batch_norm_from_json(lj, l.out_dim(), name);
    width = l.out_dim();
    w.gat_layers.push_back(std::move(l));
  }
  std::vector<std::string> dense_order;
  for (const auto& [_, name] : dense_names) dense_order.push_back(name);
  dense_order.push_back("output");
  for (const std::string& name : dense_order) {
    const json& lj = layers.at(name);
    DenseLayer l;
    l.name = name;
    l.in_dim = read_int(lj, "in_dim", name);
    if (l.in_dim != width) {
      throw SchemaError("layer '" + name + "': input width " +
                        std::to_string(l.in_dim) + " does not match " +
                        std::to_string(width));
    }
    l.out_dim = read_int(lj, "out_dim", name);
    const bool is_output = name == "output";
    l.activation = parse_activation(
        lj.value("activation", std::string(is_output ? "sigmoid" : "elu")));
    l.weight = read_tensor(lj, "weight", {l.in_dim, l.out_dim}, name);
    l.bias = read_tensor(lj, "bias", {l.out_dim}, name);
    l.batch_norm = batch_norm_from_json(lj, l.out_dim, name);
    width = l.out_dim;
    w.dense_layers.push_back(std::move(l));
  }
  w.validate();
  return w;
}

ModelWeights load_weights(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open weight file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("weight file " + path.string() +
                      " is not valid JSON: " + e.what());
  }
  return weights_from_json(j);
}

void save_weights(const ModelWeights& w, const std::filesystem::path& path) {
  w.validate();
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write weight file " + path.string());
  // Full double precision so a reload is bit-identical.
  out << weights_to_json(w).dump() << "\n";
}

std::vector<double> gat_forward(const WeightedGraph& g,
                                const FeatureMatrix& features,
                                const ModelWeights& w,
                                AttentionTrace* trace) {
  if (features.cols != w.input_dim) {
    throw ValidationError("feature width " + std::to_string(features.cols) +
                          " does not match model input_dim " +
                          std::to_string(w.input_dim));
  }
  if (features.rows != g.node_count()) {
    throw ValidationError("feature rows do not match node count");
  }
  const int n = g.node_count();
  if (trace) trace->coefficients.assign(w.gat_layers.size(), {});
  check_finite(features.values, "input");

  std::vector<double> x = features.values;
  for (size_t li = 0; li < w.gat_layers.size(); ++li) {
    x = gat_layer_forward(g, w.gat_layers[li], x,
                          trace ? &trace->coefficients[li] : nullptr);
    check_finite(x, w.gat_layers[li].name);
  }
  for (const DenseLayer& l : w.dense_layers) {
    x = dense_layer_forward(l, x, n);
    check_finite(x, l.name);
  }
  return x;
}

}  // namespace pathcut
