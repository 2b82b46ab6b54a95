#include <cmath>
#include <limits>
#include <map>

#include "mineral/dynamics.hpp"
#include "mineral/planners.hpp"

namespace mineral {
namespace {

struct DAction {
  Action action;
  bool expanded = false;
  int visits = 0;
  double reward_sum = 0.0;  // sum over the node's scenarios of the immediate reward
  double q = 0.0;
  std::vector<int> children;
};

struct DNode {
  Belief belief;               // Gaussian belief after this node's history
  std::vector<int> scenarios;  // indices into the scenario table
  std::vector<State> states;   // per scenario, aligned with `scenarios`
  int depth = 0;
  int visits = 0;
  double default_value = 0.0;  // mean rollout value over the node's scenarios
  double value = 0.0;
  std::vector<DAction> actions;
};

class Despot {
 public:
  Despot(const ProblemConfig& config, const PlannerConfig& pc, Rng& rng) : config_(config), pc_(pc), rng_(rng) {}

  SearchResult run(const Belief& root_belief, const StateSampler& sampler) {
    const Observables& root_obs = root_belief.observed;
    if (valid_actions(root_obs, config_).empty()) throw ContractViolation("no valid action at the root");
    DNode root;
    root.belief = root_belief;
    for (int k = 0; k < pc_.scenarios; ++k) {
      State s = sampler(rng_);
      s.observed = root_obs;
      seeds_.push_back(rng_());
      root.scenarios.push_back(k);
      root.states.push_back(std::move(s));
    }
    init_node(root);
    nodes_.push_back(std::move(root));

    for (int it = 0; it < pc_.iterations; ++it) iterate();

    SearchResult result;
    result.iterations = pc_.iterations;
    const DNode& r = nodes_[0];
    double best = -std::numeric_limits<double>::infinity();
    for (const DAction& da : r.actions) {
      result.root.push_back({da.action, da.visits, da.q});
      if (da.expanded && da.q > best) {
        best = da.q;
        result.action = da.action;
      }
    }
    result.value = r.value;
    return result;
  }

 private:
  void init_node(DNode& node) {
    double total = 0.0;
    for (std::size_t i = 0; i < node.states.size(); ++i) {
      CounterNoise noise(seeds_[static_cast<std::size_t>(node.scenarios[i])]);
      total += rollout(node.states[i], node.belief, config_, pc_.rollout, noise, rng_);
    }
    node.default_value = total / static_cast<double>(node.states.size());
    node.value = node.default_value;
    const Observables& obs = node.states.front().observed;
    if (!is_terminal(obs, config_) && node.depth < pc_.max_depth)
      for (Action a : valid_actions(obs, config_)) node.actions.push_back(DAction{a, false, 0, 0.0, 0.0, {}});
  }

  // One descent ending in the expansion of a single (node, action) pair.
  void iterate() {
    std::vector<std::pair<int, std::size_t>> path;
    int id = 0;
    while (true) {
      DNode& node = nodes_[static_cast<std::size_t>(id)];
      if (node.actions.empty()) break;
      const std::size_t ai = select_action(node);
      path.emplace_back(id, ai);
      if (!nodes_[static_cast<std::size_t>(id)].actions[ai].expanded) {
        expand(id, ai);
        break;
      }
      id = select_child(nodes_[static_cast<std::size_t>(id)].actions[ai]);
    }
    for (auto it = path.rbegin(); it != path.rend(); ++it) backup(it->first, it->second);
  }

  std::size_t select_action(const DNode& node) const {
    for (std::size_t i = 0; i < node.actions.size(); ++i)
      if (!node.actions[i].expanded) return i;
    const double log_n = std::log(static_cast<double>(std::max(1, node.visits)));
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < node.actions.size(); ++i) {
      const DAction& da = node.actions[i];
      const double score = da.q + pc_.ucb_c * std::sqrt(log_n / std::max(1, da.visits));
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    return best;
  }

  // Child carrying the most scenarios per visit so far.
  int select_child(const DAction& da) const {
    int best = da.children.front();
    double best_score = -1.0;
    for (int c : da.children) {
      const DNode& child = nodes_[static_cast<std::size_t>(c)];
      const double score = static_cast<double>(child.scenarios.size()) / (1.0 + child.visits);
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    return best;
  }

  void expand(int id, std::size_t ai) {
    std::map<std::int64_t, DNode> groups;
    double reward_sum = 0.0;
    {
      const DNode& node = nodes_[static_cast<std::size_t>(id)];
      const Action a = node.actions[ai].action;
      for (std::size_t i = 0; i < node.states.size(); ++i) {
        CounterNoise noise(seeds_[static_cast<std::size_t>(node.scenarios[i])]);
        StepOutcome out = step(node.states[i], a, config_, noise);
        reward_sum += out.reward.total;
        DNode& g = groups[out.observation.key()];
        g.depth = node.depth + 1;
        g.scenarios.push_back(node.scenarios[i]);
        g.states.push_back(std::move(out.next_state));
      }
    }
    std::vector<int> children;
    for (auto& [key, child] : groups) {
      const DNode& parent = nodes_[static_cast<std::size_t>(id)];
      child.belief = update(parent.belief, parent.actions[ai].action, Observation::from_key(key, config_.n_sites()),
                            child.states.front().observed, config_);
      init_node(child);
      children.push_back(static_cast<int>(nodes_.size()));
      nodes_.push_back(std::move(child));
    }
    DAction& da = nodes_[static_cast<std::size_t>(id)].actions[ai];
    da.expanded = true;
    da.reward_sum = reward_sum;
    da.children = std::move(children);
  }

  void backup(int id, std::size_t ai) {
    DNode& node = nodes_[static_cast<std::size_t>(id)];
    DAction& da = node.actions[ai];
    double future = 0.0;
    for (int c : da.children) {
      const DNode& child = nodes_[static_cast<std::size_t>(c)];
      future += static_cast<double>(child.scenarios.size()) * child.value;
    }
    da.q = (da.reward_sum + config_.discount * future) / static_cast<double>(node.scenarios.size());
    ++da.visits;
    ++node.visits;

    double best = -std::numeric_limits<double>::infinity();
    bool all_expanded = true;
    for (const DAction& a : node.actions) {
      if (a.expanded)
        best = std::max(best, a.q);
      else
        all_expanded = false;
    }
    node.value = all_expanded ? best : std::max(best, node.default_value);
  }

  const ProblemConfig& config_;
  const PlannerConfig& pc_;
  Rng& rng_;
  std::vector<std::uint64_t> seeds_;
  std::vector<DNode> nodes_;
};

}  // namespace

SearchResult search_despot(const Belief& root, const StateSampler& sampler, const ProblemConfig& config,
                           const PlannerConfig& pc, Rng& rng) {
  check_planner_config(pc);
  return Despot(config, pc, rng).run(root, sampler);
}

Action plan_despot(const Belief& belief, const ProblemConfig& config, const PlannerConfig& pc, Rng& rng) {
  const auto sampler = [&](Rng& r) { return sample_state(belief, config, r); };
  return search_despot(belief, sampler, config, pc, rng).action;
}

Action DespotPolicy::act(const Belief& belief, const ProblemConfig& config, Rng& rng) {
  const auto sampler = [&](Rng& r) { return sample_state(belief, config, r); };
  // planner.seed varies the search stream without touching the episode's world noise.
  Rng search(mix_seed(rng(), pc_.seed));
  const SearchResult result = search_despot(belief, sampler, config, pc_, search);
  if (sink_) sink_(belief.observed.t, result);
  return result.action;
}

}  // namespace mineral
