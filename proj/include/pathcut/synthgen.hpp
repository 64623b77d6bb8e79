#pragma once

#include <cstdint>
#include <string>

#include "pathcut/graph.hpp"

namespace pathcut {

enum class Family { kLattice, kEr, kBa, kWs };

std::string to_string(Family f);
Family parse_family(const std::string& s);

struct GeneratorParams {
  Family family = Family::kEr;
  int n = 1000;
  double p = 0.014;      // ER edge probability
  int m = 7;             // BA edges per new node
  int k = 12;            // WS ring neighbors (k / 2 per side)
  double rewire = 0.02;  // WS rewiring probability
  int rows = 30;         // lattice
  int cols = 30;
  std::uint64_t seed = 0;

  int node_count() const {
    return family == Family::kLattice ? rows * cols : n;
  }
  // Whether the family parameter sits inside the ranges used for the
  // synthetic benchmark suites: p in [0.01, 0.017], m in [5, 9],
  // k in [11, 15], rewire = 0.02.
  bool within_benchmark_ranges() const;
};

// Draws the family parameter uniformly from the benchmark ranges.
GeneratorParams sample_benchmark_params(Family family, int n,
                                        std::uint64_t seed);

// Lattice: 4-neighbour grid. ER: G(n, p). BA: preferential attachment grown
// from a star on m + 1 nodes. WS: ring with k / 2 neighbours per side, each
// edge rewired with probability `rewire` (edge count preserved). Unit weights
// and costs. Deterministic per seed. Throws ValidationError on bad params.
WeightedGraph generate(const GeneratorParams& params);

// Uniform distinct source/target from the largest component; p* is the
// k_star-th path of k_shortest_paths. Pairs with fewer than k_star simple
// paths are resampled, up to 100 tries, then SamplingError.
PathQuery sample_instance(const WeightedGraph& g, int k_star,
                          std::uint64_t seed);

// Small deterministic generator used wherever seeded draws must be
// reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();                       // [0, 1)
  std::uint64_t below(std::uint64_t n);   // [0, n)

 private:
  std::uint64_t state_;
};

// Mixes several integers into one seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b = 0);

}  // namespace pathcut
