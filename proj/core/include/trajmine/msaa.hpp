#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trajmine/conflict.hpp"

namespace trajmine {

struct MsaaParams {
  double tau_safe = 3.0;        // seconds, required passage-time separation
  double a_min = -8.0;          // m/s^2, strongest braking
  double a_max = 5.0;           // m/s^2, strongest throttle
  double infeasible_cap = 10.0; // intensity reported when unresolvable
  int exact_agent_limit = 6;    // largest component solved exactly
};

/// One agent's view of a chain component: current speed plus the arc
/// distance to each conflict point it participates in, keyed by the index
/// of the pair in the component's pair list.
struct AgentConflictState {
  std::string track_id;
  double speed = 0.0;
  std::map<std::size_t, double> distances;
};

/// How a pairwise conflict is resolved in a solution: which agent passes
/// the point first, or which one stops short of it.
enum class PairResolution { a_first, b_first, a_yields, b_yields };

const char* to_string(PairResolution r);

struct MsaaSolution {
  std::map<std::string, double> accels;  // constant accel per agent
  double objective = 0.0;                // sum of |accel|
  bool feasible = true;
  bool approximate = false;  // heuristic path taken (large component)
  std::vector<std::string> key_agents;   // ids ordered by |accel| descending
  std::vector<PairResolution> orderings; // parallel to the input pair list
};

/// Time for an agent at speed v (m/s), distance d (m) from a point, under
/// constant accel a, to reach the point. nullopt when it never arrives
/// (stops short). d <= 0 returns 0.
std::optional<double> passage_time(double v, double d, double a);

/// Minimum total-|accel| plan resolving a single pairwise conflict: both
/// agents pass separated by at least tau_safe, or one stops short.
MsaaSolution solve_pair(const AgentConflictState& sa,
                        const AgentConflictState& sb, const ConflictPair& pair,
                        const MsaaParams& params);

/// Minimum total-|accel| plan resolving every pair of a chain component
/// simultaneously, one constant accel per agent. Components above
/// exact_agent_limit use a heuristic and set `approximate`.
/// Throws ContractViolation when the pair graph is not connected or an
/// agent state is missing.
MsaaSolution solve_chain(const std::vector<AgentConflictState>& states,
                         const std::vector<ConflictPair>& pairs,
                         const MsaaParams& params);

/// Builds per-agent states for a component, recovering conflict-point
/// distances from the pair passage times and the paths' assumed speeds.
std::vector<AgentConflictState> states_from_component(
    const ChainComponent& comp, const std::vector<FuturePath>& paths);

struct Intensity {
  double msaa = 0.0;
  // Agents whose |accel| is within 10% of the maximum.
  std::vector<std::string> key_agents;
};

/// Conflict intensity of a component: the solver objective, or
/// infeasible_cap when no plan within the accel bounds resolves it.
Intensity intensity_at(const ChainComponent& comp,
                       const std::vector<AgentConflictState>& states,
                       const MsaaParams& params);

}  // namespace trajmine
