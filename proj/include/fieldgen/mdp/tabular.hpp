#pragma once

#include <string>
#include <vector>

#include "fieldgen/numkit/rng.hpp"
#include "fieldgen/numkit/vec.hpp"

namespace fieldgen::mdp {

using numkit::RngStream;
using numkit::Vec;

struct Transition {
  int next_state = 0;
  double prob = 0.0;
  double reward = 0.0;
};

/// Finite MDP with explicit transition table. table[state][action] lists the
/// outcomes; probabilities per (state, action) must sum to 1.
struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  std::vector<std::vector<std::vector<Transition>>> table;
  std::vector<bool> terminal;
  double gamma = 0.99;

  void validate() const;
};

struct StepResult {
  int next_state = 0;
  double reward = 0.0;
  bool done = false;
};

/// Sample one transition. Stepping from a terminal state is a contract error.
StepResult mdp_step(const TabularMdp& mdp, int state, int action, RngStream& rng);

/// policy[state] = distribution over actions (rows sum to 1).
using StochasticPolicy = std::vector<Vec>;

/// Iterative policy evaluation: expected discounted return per state under
/// the policy, to the given sup-norm tolerance.
Vec policy_evaluation(const TabularMdp& mdp, const StochasticPolicy& policy, double tol = 1e-12,
                      int max_sweeps = 100000);

/// The standard 4x4 map. Actions 0..3 = left, down, right, up; moving into a
/// wall stays put. Slippery dynamics replace the chosen move by one of the
/// two perpendicular moves with probability 1/3 each. Goal pays 1 and
/// terminates; holes pay 0 and terminate.
struct FrozenLake {
  TabularMdp mdp;
  int start_state = 0;
  int rows = 0, cols = 0;
  std::string map_text;

  static const std::vector<std::string>& default_map_4x4();
  static FrozenLake make(const std::vector<std::string>& map_rows, bool slippery, double gamma);
};

}  // namespace fieldgen::mdp
