#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathcut/features.hpp"
#include "pathcut/graph.hpp"

namespace pathcut {

enum class Activation { kNone, kElu, kRelu, kSigmoid };

std::string to_string(Activation a);
Activation parse_activation(const std::string& s);

// Inference-time batch norm: (x - mean) / sqrt(var + epsilon) * gamma + beta.
struct BatchNorm {
  std::vector<double> mean;
  std::vector<double> var;
  std::vector<double> gamma;
  std::vector<double> beta;
  double epsilon = 1e-5;

  bool empty() const { return mean.empty(); }
};

// Multi-head graph attention. For head h and target node i,
//   score(i, j) = leaky_relu(a_h . [z_i || z_j]),  z = x W  (per-head slice)
// normalized by softmax over j in N(i) ∪ {i}; the update is the attention-
// weighted sum of z_j. Heads are concatenated or averaged.
struct GatLayer {
  std::string name;
  int in_dim = 0;
  int heads = 0;
  int head_dim = 0;
  bool concat = true;
  double negative_slope = 0.2;
  std::vector<double> weight;     // in_dim x (heads * head_dim), row-major
  std::vector<double> attention;  // heads x (2 * head_dim): [target | neighbor]
  std::vector<double> bias;       // out_dim
  BatchNorm batch_norm;
  Activation activation = Activation::kElu;

  int out_dim() const { return concat ? heads * head_dim : head_dim; }
};

struct DenseLayer {
  std::string name;
  int in_dim = 0;
  int out_dim = 0;
  std::vector<double> weight;  // in_dim x out_dim, row-major
  std::vector<double> bias;
  BatchNorm batch_norm;
  Activation activation = Activation::kElu;
};

// The scoring network: graph attention layers, dense layers, and a one-unit
// logistic output (the last dense layer).
struct ModelWeights {
  int input_dim = 0;
  std::vector<GatLayer> gat_layers;
  std::vector<DenseLayer> dense_layers;
  nlohmann::json metadata = nlohmann::json::object();

  // Throws SchemaError naming the first layer whose shapes do not chain.
  void validate() const;
  long long parameter_count() const;
  // Feature families recorded in metadata ("features"), defaulting to all.
  std::vector<FeatureFamily> feature_families() const;
};

struct ArchitectureOptions {
  std::vector<int> gat_heads{16, 32};
  std::vector<int> gat_head_dims{8, 1};
  std::vector<int> dense_units{32, 32, 32};
  bool last_gat_concat = true;
};

// Seeded Glorot-uniform weights with non-trivial batch-norm statistics; used
// for tests and as a placeholder model.
ModelWeights make_random_weights(int input_dim, std::uint64_t seed,
                                 const ArchitectureOptions& arch = {});

// Weight-file JSON:
//   {"format": "pathcut-gat/1", "input_dim": d, "metadata": {...},
//    "layers": {"gat1": {...}, "gat2": {...}, "dense1": ..., "output": ...}}
// Each tensor is {"shape": [...], "values": [...]} in row-major order.
nlohmann::json weights_to_json(const ModelWeights& w);
ModelWeights weights_from_json(const nlohmann::json& j);
ModelWeights load_weights(const std::filesystem::path& path);
void save_weights(const ModelWeights& w, const std::filesystem::path& path);

// Per-layer attention coefficients captured during a forward pass:
// coefficients[layer][head][i] lists alpha(i, j) for j = i first, then the
// neighbors of i in adjacency order.
struct AttentionTrace {
  std::vector<std::vector<std::vector<std::vector<double>>>> coefficients;
};

// Deterministic inference: dropout is identity, batch norm uses the stored
// running statistics. Returns one probability per node. Throws
// ValidationError on a feature width mismatch and NumericError naming the
// layer where a non-finite value first appears.
std::vector<double> gat_forward(const WeightedGraph& g,
                                const FeatureMatrix& features,
                                const ModelWeights& w,
                                AttentionTrace* trace = nullptr);

}  // namespace pathcut
