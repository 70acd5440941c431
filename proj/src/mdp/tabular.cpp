#include "fieldgen/mdp/tabular.hpp"

#include <cmath>
#include <stdexcept>

namespace fieldgen::mdp {

void TabularMdp::validate() const {
  if (num_states < 1 || num_actions < 1) {
    throw std::invalid_argument("TabularMdp: needs at least one state and action");
  }
  if (static_cast<int>(table.size()) != num_states ||
      static_cast<int>(terminal.size()) != num_states) {
    throw std::invalid_argument("TabularMdp: table/terminal size mismatch");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("TabularMdp: gamma must be in (0, 1]");
  }
  for (int z = 0; z < num_states; ++z) {
    if (terminal[static_cast<std::size_t>(z)]) continue;
    if (static_cast<int>(table[static_cast<std::size_t>(z)].size()) != num_actions) {
      throw std::invalid_argument("TabularMdp: missing action row");
    }
    for (int a = 0; a < num_actions; ++a) {
      double total = 0.0;
      for (const Transition& t : table[static_cast<std::size_t>(z)][static_cast<std::size_t>(a)]) {
        if (t.next_state < 0 || t.next_state >= num_states) {
          throw std::invalid_argument("TabularMdp: transition to unknown state");
        }
        if (!(t.prob >= 0.0) || !std::isfinite(t.reward)) {
          throw std::invalid_argument("TabularMdp: bad probability or reward");
        }
        total += t.prob;
      }
      if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("TabularMdp: outgoing probabilities must sum to 1");
      }
    }
  }
}

StepResult mdp_step(const TabularMdp& mdp, int state, int action, RngStream& rng) {
  if (state < 0 || state >= mdp.num_states || action < 0 || action >= mdp.num_actions) {
    throw std::invalid_argument("mdp_step: state or action out of range");
  }
  if (mdp.terminal[static_cast<std::size_t>(state)]) {
    throw std::logic_error("mdp_step: cannot step from a terminal state");
  }
  const auto& outcomes = mdp.table[static_cast<std::size_t>(state)][static_cast<std::size_t>(action)];
  double u = rng.uniform01();
  const Transition* chosen = &outcomes.back();
  for (const Transition& t : outcomes) {
    if (u <= t.prob) {
      chosen = &t;
      break;
    }
    u -= t.prob;
  }
  return {chosen->next_state, chosen->reward,
          mdp.terminal[static_cast<std::size_t>(chosen->next_state)]};
}

Vec policy_evaluation(const TabularMdp& mdp, const StochasticPolicy& policy, double tol,
                      int max_sweeps) {
  mdp.validate();
  if (static_cast<int>(policy.size()) != mdp.num_states) {
    throw std::invalid_argument("policy_evaluation: policy does not cover all states");
  }
  Vec value(static_cast<std::size_t>(mdp.num_states), 0.0);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double delta = 0.0;
    for (int z = 0; z < mdp.num_states; ++z) {
      if (mdp.terminal[static_cast<std::size_t>(z)]) continue;
      double v = 0.0;
      for (int a = 0; a < mdp.num_actions; ++a) {
        const double pa = policy[static_cast<std::size_t>(z)][static_cast<std::size_t>(a)];
        if (pa == 0.0) continue;
        double q = 0.0;
        for (const Transition& t :
             mdp.table[static_cast<std::size_t>(z)][static_cast<std::size_t>(a)]) {
          const double future = mdp.terminal[static_cast<std::size_t>(t.next_state)]
                                    ? 0.0
                                    : value[static_cast<std::size_t>(t.next_state)];
          q += t.prob * (t.reward + mdp.gamma * future);
        }
        v += pa * q;
      }
      delta = std::max(delta, std::abs(v - value[static_cast<std::size_t>(z)]));
      value[static_cast<std::size_t>(z)] = v;
    }
    if (delta < tol) break;
  }
  return value;
}

const std::vector<std::string>& FrozenLake::default_map_4x4() {
  static const std::vector<std::string> map{"SFFF", "FHFH", "FFFH", "HFFG"};
  return map;
}

FrozenLake FrozenLake::make(const std::vector<std::string>& map_rows, bool slippery,
                            double gamma) {
  if (map_rows.empty()) throw std::invalid_argument("FrozenLake: empty map");
  const int rows = static_cast<int>(map_rows.size());
  const int cols = static_cast<int>(map_rows.front().size());
  for (const std::string& r : map_rows) {
    if (static_cast<int>(r.size()) != cols) throw std::invalid_argument("FrozenLake: ragged map");
  }

  FrozenLake lake;
  lake.rows = rows;
  lake.cols = cols;
  for (const std::string& r : map_rows) lake.map_text += r + "\n";

  TabularMdp& mdp = lake.mdp;
  mdp.num_states = rows * cols;
  mdp.num_actions = 4;
  mdp.gamma = gamma;
  mdp.terminal.assign(static_cast<std::size_t>(mdp.num_states), false);
  mdp.table.assign(static_cast<std::size_t>(mdp.num_states), {});

  auto at = [&](int z) { return map_rows[static_cast<std::size_t>(z / cols)][static_cast<std::size_t>(z % cols)]; };
  for (int z = 0; z < mdp.num_states; ++z) {
    const char c = at(z);
    if (c == 'H' || c == 'G') mdp.terminal[static_cast<std::size_t>(z)] = true;
    if (c == 'S') lake.start_state = z;
  }

  // moves: 0 left, 1 down, 2 right, 3 up
  const int dr[4] = {0, 1, 0, -1};
  const int dc[4] = {-1, 0, 1, 0};
  auto move = [&](int z, int m) {
    const int r = z / cols + dr[m];
    const int c = z % cols + dc[m];
    if (r < 0 || r >= rows || c < 0 || c >= cols) return z;  // walls clamp
    return r * cols + c;
  };

  for (int z = 0; z < mdp.num_states; ++z) {
    if (mdp.terminal[static_cast<std::size_t>(z)]) continue;
    auto& per_action = mdp.table[static_cast<std::size_t>(z)];
    per_action.resize(4);
    for (int a = 0; a < 4; ++a) {
      std::vector<int> moves;
      if (slippery) {
        // intended move or either perpendicular move, 1/3 each
        moves = {(a + 3) % 4, a, (a + 1) % 4};
      } else {
        moves = {a};
      }
      const double p = 1.0 / static_cast<double>(moves.size());
      for (int m : moves) {
        const int nz = move(z, m);
        const double reward = at(nz) == 'G' ? 1.0 : 0.0;
        per_action[static_cast<std::size_t>(a)].push_back({nz, p, reward});
      }
    }
  }
  mdp.validate();
  return lake;
}

}  // namespace fieldgen::mdp
