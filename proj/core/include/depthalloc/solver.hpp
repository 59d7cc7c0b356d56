#pragma once

#include <optional>
#include <string>
#include <vector>

#include "depthalloc/hypograph.hpp"

namespace depthalloc {

// The T-budget maximum-coverage instance on a condensed matrix.
struct AllocationProblem {
    const CondensedMatrix* condensed = nullptr;
    int budget = 0;
    double total_weight = 0.0;
    // Optional per-alpha fixings for branch-and-bound / lex passes:
    // -1 free, 0 forced out, 1 forced in. Empty means all free.
    std::vector<int> fixed;
    // Wall-clock cap for solve_mbp; 0 disables.
    long long timeout_ms = 0;
};

enum class Certificate { kLpIntegral, kBranchAndBound, kBaseline };

struct Selection {
    std::vector<int> indices;       // sorted ascending
    std::vector<char> alpha;        // length n, 0/1
    double objective = 0.0;         // covered weight
    double coverage_error = 0.0;    // 1 - objective/total_weight
    Certificate certificate = Certificate::kBaseline;

    Pattern mask() const;
};

struct LpSolution {
    std::vector<double> alpha_frac;  // in [0,1]^n
    std::vector<double> beta;        // 0 <= beta_j <= u_j
    double objective = 0.0;
    int iterations = 0;
    // Reduced costs of the alpha variables at the optimal basis (used for
    // alternative-optimum detection).
    std::vector<double> alpha_reduced_cost;
};

// Exact LP relaxation via a bounded-variable revised simplex specialized to
// this constraint structure (every beta/slack column is a unit vector, so the
// basis factorization reduces to a small dense system over the basic alpha
// columns). Deterministic: Dantzig pricing with a Bland fallback.
LpSolution solve_lp(const AllocationProblem& problem);

// Globally optimal binary selection. Adopts the LP solution when it is
// integral (within 1e-6); otherwise branch-and-bound (best-bound node order,
// most-fractional branching, zero optimality gap). Ties between optimal
// selections are broken toward the lexicographically smallest index set.
Selection solve_mbp(const AllocationProblem& problem);

// Submodular greedy baseline: T steps of maximal marginal gain, ties to the
// lowest index.
Selection greedy_select(const AllocationProblem& problem);

// Knolls nearest T uniformly spaced targets in the chosen coordinate
// (endpoints inclusive for T >= 2, midpoint for T = 1).
enum class EquidistantMode { kDepth, kDiopter };
Selection equidistant_baseline(const KnollTrain& train, int budget,
                               EquidistantMode mode,
                               const AllocationProblem& problem);

// One exact solve per T, sharing the condensed matrix.
std::vector<Selection> sweep(const AllocationProblem& base,
                             const std::vector<int>& t_values);

}  // namespace depthalloc
