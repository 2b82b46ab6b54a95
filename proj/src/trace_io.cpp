#include "mineral/trace_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <unistd.h>

#include "json.hpp"

namespace mineral {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += fmt::format(".tmp.{}", ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
  }
}

namespace {

std::string join(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  return out + '\n';
}

// Shortest decimal that round-trips; keeps files bit-stable across runs.
std::string num(double x) { return fmt::format("{}", x); }

std::string obs_site(const Observation& o) {
  return o.measurement ? std::to_string(o.measurement->site + 1) : "";
}
std::string obs_value(const Observation& o) { return o.measurement ? num(o.measurement->value) : ""; }

}  // namespace

std::vector<std::string> episode_csv_header(std::size_t n_sites) {
  std::vector<std::string> h{"policy",      "seed",          "t",         "action",      "demand",
                             "feed",        "processed",     "r1_domestic_penalty",    "r2_emissions",
                             "r3_unfulfilled", "r4_profit",  "revenue",   "cost",        "reward",
                             "obs_site",    "obs_value"};
  for (std::size_t j = 1; j <= n_sites; ++j) h.push_back(fmt::format("extracted_{}", j));
  for (std::size_t j = 1; j <= n_sites; ++j) h.push_back(fmt::format("lost_{}", j));
  for (std::size_t j = 1; j <= n_sites; ++j) h.push_back(fmt::format("reserve_{}", j));
  return h;
}

std::vector<std::string> belief_csv_header() {
  return {"policy", "seed", "t", "site", "true_reserve", "belief_mean", "belief_std"};
}

std::vector<std::string> summary_csv_header() {
  return {"policy",
          "seeds",
          "first_domestic_build_mean",
          "first_domestic_build_std",
          "first_domestic_build_median",
          "never_domestic",
          "processed_mean",
          "processed_std",
          "co2_mean",
          "co2_std",
          "unfulfilled_pct_mean",
          "unfulfilled_pct_std",
          "profit_mean",
          "profit_std",
          "discounted_reward_mean",
          "discounted_reward_std"};
}

std::string episodes_csv(std::span<const EpisodeTrace> traces, const ProblemConfig& config) {
  const std::size_t n = config.n_sites();
  std::string out = join(episode_csv_header(n));
  for (const EpisodeTrace& tr : traces) {
    for (std::size_t t = 0; t < tr.steps.size(); ++t) {
      const StepOutcome& o = tr.steps[t].outcome;
      const RewardBreakdown& r = o.reward;
      std::vector<std::string> row{tr.policy,
                                   std::to_string(tr.seed),
                                   std::to_string(t),
                                   to_string(tr.steps[t].action),
                                   num(o.demand),
                                   num(o.feed),
                                   num(config.extraction_factor * o.feed),
                                   num(r.r1_domestic_penalty),
                                   num(r.r2_emissions),
                                   num(r.r3_unfulfilled),
                                   num(r.r4_profit),
                                   num(r.revenue),
                                   num(r.cost),
                                   num(r.total),
                                   obs_site(o.observation),
                                   obs_value(o.observation)};
      for (std::size_t j = 0; j < n; ++j) row.push_back(num(o.extracted[j]));
      for (std::size_t j = 0; j < n; ++j) row.push_back(num(o.lost[j]));
      for (std::size_t j = 0; j < n; ++j) row.push_back(num(o.next_state.reserves[j]));
      out += join(row);
    }
  }
  return out;
}

std::string episodes_jsonl(std::span<const EpisodeTrace> traces, const ProblemConfig& config) {
  std::string out;
  for (const EpisodeTrace& tr : traces) {
    for (std::size_t t = 0; t < tr.steps.size(); ++t) {
      const StepOutcome& o = tr.steps[t].outcome;
      nlohmann::json j;
      j["policy"] = tr.policy;
      j["seed"] = tr.seed;
      j["t"] = t;
      j["action"] = to_string(tr.steps[t].action);
      j["demand"] = o.demand;
      j["feed"] = o.feed;
      j["processed"] = config.extraction_factor * o.feed;
      j["reward"] = {{"r1_domestic_penalty", o.reward.r1_domestic_penalty},
                     {"r2_emissions", o.reward.r2_emissions},
                     {"r3_unfulfilled", o.reward.r3_unfulfilled},
                     {"r4_profit", o.reward.r4_profit},
                     {"revenue", o.reward.revenue},
                     {"cost", o.reward.cost},
                     {"total", o.reward.total}};
      j["observation"] = o.observation.values();
      j["extracted"] = std::vector<double>(o.extracted.begin(), o.extracted.end());
      j["lost"] = std::vector<double>(o.lost.begin(), o.lost.end());
      j["reserves"] = std::vector<double>(o.next_state.reserves.begin(), o.next_state.reserves.end());
      const Belief& b = tr.beliefs.at(t + 1);
      j["belief_mean"] = std::vector<double>(b.mean.begin(), b.mean.end());
      j["belief_std"] = std::vector<double>(b.std.begin(), b.std.end());
      out += j.dump() + '\n';
    }
  }
  return out;
}

std::string beliefs_csv(std::span<const EpisodeTrace> traces, const ProblemConfig& config) {
  std::string out = join(belief_csv_header());
  for (const EpisodeTrace& tr : traces) {
    for (std::size_t t = 0; t < tr.beliefs.size(); ++t) {
      const SiteVec<double>& truth = t == 0 ? tr.initial.reserves : tr.steps[t - 1].outcome.next_state.reserves;
      const Belief& b = tr.beliefs[t];
      for (std::size_t j = 0; j < config.n_sites(); ++j)
        out += join({tr.policy, std::to_string(tr.seed), std::to_string(t), std::to_string(j + 1), num(truth[j]),
                     num(b.mean[j]), num(b.std[j])});
    }
  }
  return out;
}

std::string summary_csv(std::span<const PolicySummary> rows) {
  std::string out = join(summary_csv_header());
  for (const PolicySummary& r : rows) {
    const bool any = r.first_domestic_build.n > 0;
    out += join({r.policy, std::to_string(r.seeds), any ? num(r.first_domestic_build.mean) : "",
                 any ? num(r.first_domestic_build.std) : "", any ? num(r.first_domestic_build.median) : "",
                 std::to_string(r.never_domestic), num(r.processed.mean), num(r.processed.std), num(r.co2.mean),
                 num(r.co2.std), num(r.unfulfilled_pct.mean), num(r.unfulfilled_pct.std), num(r.profit.mean),
                 num(r.profit.std), num(r.discounted_reward.mean), num(r.discounted_reward.std)});
  }
  return out;
}

std::string summary_text(std::span<const PolicySummary> rows) {
  std::string out = fmt::format("{:<14} {:>6} {:>16} {:>20} {:>18} {:>16} {:>20} {:>22}\n", "policy", "seeds",
                                "domestic year", "processed (Mt)", "CO2 (Mt)", "unfulfilled %", "profit ($M)",
                                "discounted reward");
  for (const PolicySummary& r : rows) {
    std::string year = r.first_domestic_build.n == 0
                           ? std::string("never")
                           : fmt::format("{:.1f} ({} never)", r.first_domestic_build.mean, r.never_domestic);
    out += fmt::format("{:<14} {:>6} {:>16} {:>20} {:>18} {:>16} {:>20} {:>22}\n", r.policy, r.seeds, year,
                       fmt::format("{:.1f} ± {:.1f}", r.processed.mean, r.processed.std),
                       fmt::format("{:.1f} ± {:.1f}", r.co2.mean, r.co2.std),
                       fmt::format("{:.2f} ± {:.2f}", r.unfulfilled_pct.mean, r.unfulfilled_pct.std),
                       fmt::format("{:.1f} ± {:.1f}", r.profit.mean, r.profit.std),
                       fmt::format("{:.2f} ± {:.2f}", r.discounted_reward.mean, r.discounted_reward.std));
  }
  return out;
}

}  // namespace mineral
