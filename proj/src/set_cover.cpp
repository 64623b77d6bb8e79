#include "pathcut/set_cover.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

#include "pathcut/errors.hpp"
#include "pathcut/simplex.hpp"

namespace pathcut {
namespace {

// Edge -> constraints containing it, restricted to edges that appear at all.
struct Incidences {
  std::vector<EdgeId> edges;                 // edges appearing, ascending
  std::vector<int> slot;                     // edge -> index in `edges` or -1
  std::vector<std::vector<int>> rows;        // per slot: constraint ids

  explicit Incidences(const ConstraintSystem& cs) : slot(cs.edge_count(), -1) {
    const auto& cons = cs.constraints();
    for (const auto& c : cons) {
      for (EdgeId e : c) slot[e] = 0;
    }
    for (EdgeId e = 0; e < cs.edge_count(); ++e) {
      if (slot[e] == 0) {
        slot[e] = static_cast<int>(edges.size());
        edges.push_back(e);
      }
    }
    rows.resize(edges.size());
    for (int p = 0; p < static_cast<int>(cons.size()); ++p) {
      for (EdgeId e : cons[p]) rows[slot[e]].push_back(p);
    }
  }
};

// Greedy cover of the constraints flagged in `open`, appended to `chosen`.
void greedy_cover_into(const ConstraintSystem& cs, const Incidences& inc,
                       std::vector<char> open, std::vector<EdgeId>* chosen) {
  std::vector<int> gain(inc.edges.size(), 0);
  int remaining = 0;
  for (int p = 0; p < cs.constraint_count(); ++p) {
    if (!open[p]) continue;
    ++remaining;
    for (EdgeId e : cs.constraints()[p]) ++gain[inc.slot[e]];
  }

  // Lazy max-heap on (gain / cost, -edge). Gains only decrease, so a popped
  // entry whose refreshed priority still beats the new top is the true max.
  struct Entry {
    double ratio;
    EdgeId edge;
    int slot;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.ratio != b.ratio) return a.ratio < b.ratio;
    return a.edge > b.edge;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  for (int s = 0; s < static_cast<int>(inc.edges.size()); ++s) {
    if (gain[s] > 0) {
      EdgeId e = inc.edges[s];
      heap.push({gain[s] / cs.cost(e), e, s});
    }
  }
  while (remaining > 0) {
    if (heap.empty()) {
      throw InfeasibleError("constraint cannot be covered");
    }
    Entry top = heap.top();
    heap.pop();
    double fresh = gain[top.slot] / cs.cost(top.edge);
    if (gain[top.slot] == 0) continue;
    if (fresh != top.ratio) {
      heap.push({fresh, top.edge, top.slot});
      continue;
    }
    chosen->push_back(top.edge);
    for (int p : inc.rows[top.slot]) {
      if (!open[p]) continue;
      open[p] = 0;
      --remaining;
      for (EdgeId e : cs.constraints()[p]) --gain[inc.slot[e]];
    }
  }
}

}  // namespace

ConstraintSystem::ConstraintSystem(const WeightedGraph& g,
                                   std::span<const EdgeId> protected_edges) {
  costs_.reserve(g.edge_count());
  for (const Edge& e : g.edges()) costs_.push_back(e.cost);
  protected_.assign(costs_.size(), 0);
  for (EdgeId e : protected_edges) protected_.at(e) = 1;
  variable_count_ = static_cast<int>(
      std::count(protected_.begin(), protected_.end(), 0));
}

ConstraintSystem::ConstraintSystem(std::vector<double> edge_costs,
                                   std::span<const EdgeId> protected_edges)
    : costs_(std::move(edge_costs)), protected_(costs_.size(), 0) {
  for (double c : costs_) {
    if (!(c > 0)) throw ValidationError("cover costs must be positive");
  }
  for (EdgeId e : protected_edges) protected_.at(e) = 1;
  variable_count_ = static_cast<int>(
      std::count(protected_.begin(), protected_.end(), 0));
}

void ConstraintSystem::add_constraint(std::vector<EdgeId> edges) {
  if (edges.empty()) {
    throw InfeasibleError("empty covering constraint");
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (EdgeId e : edges) {
    if (e < 0 || e >= edge_count()) {
      throw ValidationError("constraint references unknown edge " +
                            std::to_string(e));
    }
    if (protected_[e]) {
      throw ValidationError("constraint contains protected edge " +
                            std::to_string(e));
    }
  }
  constraints_.push_back(std::move(edges));
}

std::vector<int> ConstraintSystem::uncovered(
    std::span<const EdgeId> chosen) const {
  std::vector<char> in(costs_.size(), 0);
  for (EdgeId e : chosen) {
    if (e >= 0 && e < edge_count()) in[e] = 1;
  }
  std::vector<int> out;
  for (int p = 0; p < constraint_count(); ++p) {
    bool hit = false;
    for (EdgeId e : constraints_[p]) {
      if (in[e]) {
        hit = true;
        break;
      }
    }
    if (!hit) out.push_back(p);
  }
  return out;
}

bool ConstraintSystem::covers(std::span<const EdgeId> chosen) const {
  return uncovered(chosen).empty();
}

double ConstraintSystem::total_cost(std::span<const EdgeId> chosen) const {
  double sum = 0.0;
  for (EdgeId e : chosen) sum += costs_.at(e);
  return sum;
}

void ConstraintSystem::write_lp(std::ostream& out) const {
  // LP readers cap line length, so long rows wrap every few terms.
  constexpr int kTermsPerLine = 8;
  auto term = [&](int index, const std::string& text) {
    if (index > 0) out << (index % kTermsPerLine == 0 ? "\n   + " : " + ");
    else out << " ";
    out << text;
  };
  auto weighted = [&](EdgeId e) {
    std::ostringstream t;
    t << costs_[e] << " x" << e;
    return t.str();
  };

  out << "\\ covering LP: " << matrix_rows() << " rows x " << matrix_cols()
      << " columns (" << 2 * variable_count_ << " bound rows, "
      << constraint_count() << " path rows" << (budget_ ? ", 1 budget row" : "")
      << ")\n";
  out << "Minimize\n obj:";
  int terms = 0;
  for (EdgeId e = 0; e < edge_count(); ++e) {
    if (!protected_[e]) term(terms++, weighted(e));
  }
  if (terms == 0) out << " 0";
  out << "\nSubject To\n";
  for (int p = 0; p < constraint_count(); ++p) {
    out << " p" << p << ":";
    for (size_t i = 0; i < constraints_[p].size(); ++i) {
      term(static_cast<int>(i), "x" + std::to_string(constraints_[p][i]));
    }
    out << " >= 1\n";
  }
  if (budget_) {
    out << " budget:";
    terms = 0;
    for (EdgeId e = 0; e < edge_count(); ++e) {
      if (!protected_[e]) term(terms++, weighted(e));
    }
    out << " <= " << *budget_ << "\n";
  }
  out << "Bounds\n";
  for (EdgeId e = 0; e < edge_count(); ++e) {
    if (!protected_[e]) out << " 0 <= x" << e << " <= 1\n";
  }
  out << "End\n";
}

std::vector<EdgeId> greedy_set_cover(const ConstraintSystem& cs) {
  for (const auto& c : cs.constraints()) {
    if (c.empty()) throw InfeasibleError("empty covering constraint");
  }
  Incidences inc(cs);
  std::vector<EdgeId> chosen;
  greedy_cover_into(cs, inc, std::vector<char>(cs.constraint_count(), 1),
                    &chosen);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

LpRelaxation solve_cover_lp(const ConstraintSystem& cs) {
  LpRelaxation out;
  out.values.assign(cs.edge_count(), 0.0);
  if (cs.constraint_count() == 0) return out;
  Incidences inc(cs);

  // Dual packing LP: max sum_p y_p  s.t.  sum_{p ∋ e} y_p <= c_e,  y >= 0.
  const int rows = static_cast<int>(inc.edges.size());
  const int cols = cs.constraint_count();
  DenseMatrix a(rows, cols);
  std::vector<double> b(rows);
  for (int s = 0; s < rows; ++s) {
    b[s] = cs.cost(inc.edges[s]);
    for (int p : inc.rows[s]) a.at(s, p) = 1.0;
  }
  LpSolution sol = maximize_packing(a, b, std::vector<double>(cols, 1.0));
  if (sol.status != LpStatus::kOptimal) {
    // Bounded by sum of costs, so anything else is a solver failure.
    throw NumericError("covering LP did not reach optimality");
  }
  out.objective = sol.objective;
  for (int s = 0; s < rows; ++s) {
    out.values[inc.edges[s]] = std::clamp(sol.dual[s], 0.0, 1.0);
  }
  return out;
}

std::vector<EdgeId> prune_cover(const ConstraintSystem& cs,
                                std::vector<EdgeId> chosen) {
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  std::vector<int> hits(cs.constraint_count(), 0);
  std::vector<char> in(cs.edge_count(), 0);
  for (EdgeId e : chosen) in[e] = 1;
  Incidences inc(cs);
  for (int p = 0; p < cs.constraint_count(); ++p) {
    for (EdgeId e : cs.constraints()[p]) hits[p] += in[e];
  }
  std::vector<EdgeId> order = chosen;
  std::stable_sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    return cs.cost(a) > cs.cost(b);
  });
  for (EdgeId e : order) {
    int s = inc.slot[e];
    bool needed = false;
    if (s >= 0) {
      for (int p : inc.rows[s]) {
        if (hits[p] <= 1) {
          needed = true;
          break;
        }
      }
    }
    if (needed) continue;
    in[e] = 0;
    if (s >= 0) {
      for (int p : inc.rows[s]) --hits[p];
    }
  }
  std::vector<EdgeId> out;
  for (EdgeId e : chosen) {
    if (in[e]) out.push_back(e);
  }
  return out;
}

CoverSolution lp_cover_round(const ConstraintSystem& cs, std::uint64_t seed,
                             const RoundingOptions& opts) {
  CoverSolution out;
  if (cs.constraint_count() == 0) return out;
  for (const auto& c : cs.constraints()) {
    if (c.empty()) throw InfeasibleError("empty covering constraint");
  }
  LpRelaxation lp = solve_cover_lp(cs);
  out.lp_objective = lp.objective;
  if (cs.budget() && lp.objective > *cs.budget() + 1e-9) {
    throw InfeasibleError("covering LP exceeds budget");
  }

  const double inflate = std::log(2.0 * cs.constraint_count());
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return (rng() >> 11) * 0x1.0p-53; };

  std::vector<EdgeId> picked;
  for (int trial = 0; trial < opts.max_trials; ++trial) {
    ++out.trials;
    picked.clear();
    for (EdgeId e = 0; e < cs.edge_count(); ++e) {
      if (lp.values[e] <= 0.0) continue;
      double prob = std::min(1.0, lp.values[e] * inflate);
      if (uniform() < prob) picked.push_back(e);
    }
    if (cs.covers(picked)) break;
  }

  std::vector<int> missing = cs.uncovered(picked);
  if (!missing.empty()) {
    out.repaired = true;
    std::vector<char> open(cs.constraint_count(), 0);
    for (int p : missing) open[p] = 1;
    greedy_cover_into(cs, Incidences(cs), std::move(open), &picked);
  }
  out.edges = prune_cover(cs, std::move(picked));
  out.cost = cs.total_cost(out.edges);
  return out;
}

}  // namespace pathcut
