#pragma once

#include <string>
#include <vector>

#include "pathcut/features.hpp"
#include "pathcut/gat.hpp"
#include "pathcut/graph.hpp"

namespace pathcut {

// One relevance value in [0, 1] per node.
using NodeScore = std::vector<double>;

enum class Scorer { kGat, kDetour, kConstant };

std::string to_string(Scorer s);
Scorer parse_scorer(const std::string& s);

// margin(v) = d(s, v) + d(v, t) - len(p*); 1 when margin <= 0, otherwise
// exp(-margin / mean edge weight). p* nodes score 1, unreachable nodes 0.
NodeScore detour_margin_scores(const WeightedGraph& g, const EdgeMask& mask,
                               const PathQuery& q);

NodeScore constant_scores(const WeightedGraph& g);

// Computes the model's feature families on `g` and runs inference.
// `feature_time_ms` receives the feature-assembly time when given.
NodeScore gat_scores(const WeightedGraph& g, const PathQuery& q,
                     const ModelWeights& w, double* feature_time_ms = nullptr);

}  // namespace pathcut
