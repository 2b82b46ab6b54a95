#include <cmath>
#include <limits>
#include <unordered_map>

#include "mineral/dynamics.hpp"
#include "mineral/planners.hpp"

namespace mineral {
namespace {

struct Particle {
  State state;
  double reward = 0.0;
  double weight = 0.0;
};

struct ObsBranch {
  std::int64_t key = 0;
  int visits = 0;
  int node = -1;  // belief node below this branch
  std::vector<Particle> bucket;
  double weight_sum = 0.0;
};

struct ActionNode {
  Action action;
  int visits = 0;
  double q = 0.0;
  std::vector<ObsBranch> branches;
  std::unordered_map<std::int64_t, std::size_t> by_key;
};

struct BeliefNode {
  Belief belief;  // Gaussian belief after this node's action-observation history
  int visits = 0;
  std::vector<ActionNode> actions;  // canonical order
  bool expanded = false;
};

class Pomcpow {
 public:
  Pomcpow(const ProblemConfig& config, const PlannerConfig& pc, Rng& rng)
      : config_(config), pc_(pc), rng_(rng), noise_(rng) {}

  SearchResult run(const Belief& root_belief, const StateSampler& sampler) {
    const Observables& root_obs = root_belief.observed;
    if (valid_actions(root_obs, config_).empty()) throw ContractViolation("no valid action at the root");
    nodes_.push_back(BeliefNode{root_belief, 0, {}, false});
    for (int it = 0; it < pc_.iterations; ++it) {
      State s = sampler(rng_);
      s.observed = root_obs;
      simulate(s, 0, 0);
    }
    SearchResult result;
    result.iterations = pc_.iterations;
    const BeliefNode& root = nodes_[0];
    double best = -std::numeric_limits<double>::infinity();
    for (const ActionNode& an : root.actions) {
      result.root.push_back({an.action, an.visits, an.q});
      if (an.visits > 0 && an.q > best) {
        best = an.q;
        result.action = an.action;
      }
    }
    result.value = best;
    return result;
  }

 private:
  double simulate(const State& s, int node_id, int depth) {
    if (is_terminal(s.observed, config_)) return 0.0;
    if (depth >= pc_.max_depth) return rollout(s, node_belief(node_id), config_, pc_.rollout, noise_, rng_);

    if (!nodes_[static_cast<std::size_t>(node_id)].expanded) {
      BeliefNode& node = nodes_[static_cast<std::size_t>(node_id)];
      for (Action a : valid_actions(s.observed, config_)) node.actions.push_back(ActionNode{a, 0, 0.0, {}, {}});
      node.expanded = true;
    }
    const std::size_t ai = select_action(nodes_[static_cast<std::size_t>(node_id)]);
    const Action a = nodes_[static_cast<std::size_t>(node_id)].actions[ai].action;

    StepOutcome out = step(s, a, config_, noise_);
    const double r = out.reward.total;

    // Observation progressive widening.
    std::size_t bi;
    bool fresh = false;
    {
      ActionNode& an = nodes_[static_cast<std::size_t>(node_id)].actions[ai];
      const double limit = pc_.k_obs * std::pow(static_cast<double>(an.visits), pc_.alpha_obs);
      const std::int64_t key = out.observation.key();
      // A reading that already has a branch always goes there, so branch
      // frequencies track the observation distribution; only readings that
      // would exceed the widening limit are redirected to an existing branch.
      auto found = an.by_key.find(key);
      if (found != an.by_key.end()) {
        bi = found->second;
      } else if (an.branches.empty() || static_cast<double>(an.branches.size()) <= limit) {
        bi = an.branches.size();
        an.branches.push_back(ObsBranch{key, 0, -1, {}, 0.0});
        an.by_key.emplace(key, bi);
        fresh = true;
      } else {
        bi = sample_branch(an);
      }
      ObsBranch& br = an.branches[bi];
      const double w = br.key == key ? observation_likelihood(out.observation, s, a, config_)
                                     : observation_likelihood(Observation::from_key(br.key, config_.n_sites()), s, a, config_);
      if (w > 0.0) {
        br.bucket.push_back(Particle{out.next_state, r, w});
        br.weight_sum += w;
      }
      ++br.visits;
    }

    double total;
    if (fresh) {
      const Belief b = update(node_belief(node_id), a, out.observation, out.next_state.observed, config_);
      total = r + config_.discount * rollout(out.next_state, b, config_, pc_.rollout, noise_, rng_);
    } else {
      ObsBranch& br = nodes_[static_cast<std::size_t>(node_id)].actions[ai].branches[bi];
      // An empty bucket means no particle has ever explained this reading;
      // fall back to the generated successor.
      const Particle p = br.bucket.empty() ? Particle{out.next_state, r, 1.0} : pick_particle(br);
      int child = br.node;
      if (child < 0) {
        child = static_cast<int>(nodes_.size());
        br.node = child;
        const Observation obs = Observation::from_key(br.key, config_.n_sites());
        Belief b = update(node_belief(node_id), a, obs, p.state.observed, config_);
        nodes_.push_back(BeliefNode{std::move(b), 0, {}, false});
      }
      total = p.reward + config_.discount * simulate(p.state, child, depth + 1);
    }

    BeliefNode& node = nodes_[static_cast<std::size_t>(node_id)];
    ActionNode& an = node.actions[ai];
    ++node.visits;
    ++an.visits;
    an.q += (total - an.q) / an.visits;
    return total;
  }

  std::size_t select_action(const BeliefNode& node) const {
    for (std::size_t i = 0; i < node.actions.size(); ++i)
      if (node.actions[i].visits == 0) return i;
    const double log_n = std::log(static_cast<double>(node.visits));
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < node.actions.size(); ++i) {
      const ActionNode& an = node.actions[i];
      const double score = an.q + pc_.ucb_c * std::sqrt(log_n / an.visits);
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    return best;
  }

  std::size_t sample_branch(const ActionNode& an) {
    int total = 0;
    for (const auto& b : an.branches) total += b.visits;
    double u = uniform01(rng_) * total;
    for (std::size_t i = 0; i < an.branches.size(); ++i) {
      u -= an.branches[i].visits;
      if (u < 0.0) return i;
    }
    return an.branches.size() - 1;
  }

  Particle pick_particle(const ObsBranch& br) {
    double u = uniform01(rng_) * br.weight_sum;
    for (const Particle& p : br.bucket) {
      u -= p.weight;
      if (u < 0.0) return p;
    }
    return br.bucket.back();
  }

  const Belief& node_belief(int id) const { return nodes_[static_cast<std::size_t>(id)].belief; }

  const ProblemConfig& config_;
  const PlannerConfig& pc_;
  Rng& rng_;
  StreamNoise noise_;
  std::vector<BeliefNode> nodes_;
};

}  // namespace

SearchResult search_pomcpow(const Belief& root, const StateSampler& sampler, const ProblemConfig& config,
                            const PlannerConfig& pc, Rng& rng) {
  check_planner_config(pc);
  return Pomcpow(config, pc, rng).run(root, sampler);
}

Action plan_pomcpow(const Belief& belief, const ProblemConfig& config, const PlannerConfig& pc, Rng& rng) {
  const auto sampler = [&](Rng& r) { return sample_state(belief, config, r); };
  return search_pomcpow(belief, sampler, config, pc, rng).action;
}

Action PomcpowPolicy::act(const Belief& belief, const ProblemConfig& config, Rng& rng) {
  const auto sampler = [&](Rng& r) { return sample_state(belief, config, r); };
  // planner.seed varies the search stream without touching the episode's world noise.
  Rng search(mix_seed(rng(), pc_.seed));
  const SearchResult result = search_pomcpow(belief, sampler, config, pc_, search);
  if (sink_) sink_(belief.observed.t, result);
  return result.action;
}

}  // namespace mineral
