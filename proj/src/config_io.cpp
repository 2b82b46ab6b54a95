#include "mineral/config_io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace mineral {
namespace {

constexpr double kUsdToMusd = 1e-6;

std::string site_path(std::size_t j, const std::string& leaf) {
  return "sites[" + std::to_string(j) + "]" + (leaf.empty() ? "" : "." + leaf);
}

// Walks a YAML document, converting fields and remembering the line of every
// field path so that validation issues can point back into the file.
class Reader {
 public:
  std::vector<ConfigIssue> issues;
  std::map<std::string, int> lines;

  void note(const std::string& path, const YAML::Node& node) { lines[path] = node.Mark().line + 1; }

  void issue(const std::string& path, const std::string& message, const YAML::Node& node) {
    issues.push_back({path, message, node.Mark().line + 1});
  }

  // Reports keys of `map` that are not in `known`.
  void reject_unknown(const YAML::Node& map, const std::string& prefix, const std::set<std::string>& known) {
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!known.contains(key))
        issue(prefix.empty() ? key : prefix + "." + key, "unknown field '" + key + "'", kv.first);
    }
  }

  template <typename T>
  void read(const YAML::Node& map, const std::string& key, const std::string& path, T& out, bool required) {
    const YAML::Node node = map[key];
    if (!node) {
      if (required) issues.push_back({path, "missing required field '" + key + "'", map.Mark().line + 1});
      return;
    }
    note(path, node);
    try {
      out = node.as<T>();
    } catch (const YAML::Exception&) {
      issue(path, "field '" + key + "' has the wrong type", node);
    }
  }

  void read_gaussian(const YAML::Node& map, const std::string& key, const std::string& path, Gaussian& out) {
    const YAML::Node node = map[key];
    if (!node) {
      issues.push_back({path, "missing required field '" + key + "'", map.Mark().line + 1});
      return;
    }
    note(path, node);
    if (!node.IsMap()) {
      issue(path, "expected {mean, std}", node);
      return;
    }
    reject_unknown(node, path, {"mean", "std"});
    read(node, "mean", path + ".mean", out.mean, true);
    read(node, "std", path + ".std", out.std, true);
  }
};

const std::set<std::string> kTopKeys = {
    "name", "horizon_years", "discount", "extraction_factor", "delay_goal_years",
    "domestic_penalty_musd", "explore_cost_musd", "build_cost_musd", "restore_cost_musd",
    "operating_cost_musd", "processing_cost_usd_per_mt", "lithium_price_usd_per_mt",
    "observation_noise_mt", "reserve_bin_mt", "observation_bin_mt", "emission_scale",
    "apply_domestic_loss", "initial_belief_std_mt", "weights", "sites", "demand", "planner",
    "stochastic"};
const std::set<std::string> kSiteKeys = {
    "name", "domestic", "initial_reserve_mt", "yield_mt_per_year", "loss_mt_per_year",
    "emission_factor", "restore_absorption_mt", "transport_cost_usd_per_mt"};
const std::set<std::string> kDemandKeys = {"from_year", "to_year", "low", "high"};
const std::set<std::string> kPlannerKeys = {"iterations", "max_depth", "ucb_c", "k_obs",
                                            "alpha_obs", "scenarios", "rollout", "seed"};
const std::set<std::string> kStochasticKeys = {"scenarios", "seed"};

void read_document(Reader& r, const YAML::Node& root, LoadedConfig& out) {
  ProblemConfig& c = out.problem;
  if (!root.IsMap()) {
    r.issue("", "top level must be a mapping", root);
    return;
  }
  r.reject_unknown(root, "", kTopKeys);

  r.read(root, "name", "name", c.name, false);
  r.read(root, "horizon_years", "horizon", c.horizon, true);
  r.read(root, "discount", "discount", c.discount, true);
  r.read(root, "extraction_factor", "extraction_factor", c.extraction_factor, true);
  r.read(root, "delay_goal_years", "delay_goal", c.delay_goal, true);
  r.read(root, "domestic_penalty_musd", "domestic_penalty", c.domestic_penalty, true);
  r.read(root, "explore_cost_musd", "explore_cost", c.explore_cost, true);
  r.read(root, "build_cost_musd", "build_cost", c.build_cost, true);
  r.read(root, "restore_cost_musd", "restore_cost", c.restore_cost, true);
  r.read(root, "operating_cost_musd", "operating_cost", c.operating_cost, false);
  double processing_usd = 0.0, price_usd = 0.0;
  r.read(root, "processing_cost_usd_per_mt", "processing_cost", processing_usd, true);
  r.read(root, "lithium_price_usd_per_mt", "lithium_price", price_usd, true);
  c.processing_cost = processing_usd * kUsdToMusd;
  c.lithium_price = price_usd * kUsdToMusd;
  r.read(root, "observation_noise_mt", "obs_noise", c.obs_noise, true);
  r.read(root, "reserve_bin_mt", "reserve_bin", c.reserve_bin, true);
  c.obs_bin = c.reserve_bin;
  r.read(root, "observation_bin_mt", "obs_bin", c.obs_bin, false);
  r.read(root, "emission_scale", "emission_scale", c.emission_scale, false);
  r.read(root, "apply_domestic_loss", "apply_domestic_loss", c.apply_domestic_loss, false);
  r.read(root, "initial_belief_std_mt", "initial_belief_std", c.initial_belief_std, false);

  std::vector<double> w;
  r.read(root, "weights", "weights", w, true);
  if (root["weights"]) {
    if (w.size() != 4) {
      r.issue("weights", "expected exactly 4 weights [w1, w2, w3, w4]", root["weights"]);
    } else {
      c.weights = {w[0], w[1], w[2], w[3]};
    }
  }

  const YAML::Node sites = root["sites"];
  if (!sites) {
    r.issues.push_back({"sites", "missing required field 'sites'", root.Mark().line + 1});
  } else if (!sites.IsSequence()) {
    r.issue("sites", "expected a list of sites", sites);
  } else {
    r.note("sites", sites);
    for (std::size_t j = 0; j < sites.size(); ++j) {
      const YAML::Node s = sites[j];
      const std::string p = site_path(j, "");
      r.note(p, s);
      if (!s.IsMap()) {
        r.issue(p, "expected a mapping", s);
        continue;
      }
      r.reject_unknown(s, p, kSiteKeys);
      SiteModel m;
      m.name = "site-" + std::to_string(j + 1);
      r.read(s, "name", site_path(j, "name"), m.name, false);
      r.read(s, "domestic", site_path(j, "domestic"), m.domestic, true);
      r.read(s, "initial_reserve_mt", site_path(j, "initial_reserve"), m.initial_reserve, true);
      r.read_gaussian(s, "yield_mt_per_year", site_path(j, "yield"), m.yield);
      r.read_gaussian(s, "loss_mt_per_year", site_path(j, "loss"), m.loss);
      r.read(s, "emission_factor", site_path(j, "emission_factor"), m.emission_factor, true);
      r.read(s, "restore_absorption_mt", site_path(j, "restore_absorption"), m.restore_absorption, false);
      double transport_usd = 0.0;
      r.read(s, "transport_cost_usd_per_mt", site_path(j, "transport_cost"), transport_usd, true);
      m.transport_cost = transport_usd * kUsdToMusd;
      c.sites.push_back(std::move(m));
    }
  }

  const YAML::Node demand = root["demand"];
  if (!demand) {
    r.issues.push_back({"demand", "missing required field 'demand'", root.Mark().line + 1});
  } else if (!demand.IsSequence()) {
    r.issue("demand", "expected a list of demand bands", demand);
  } else {
    r.note("demand", demand);
    for (std::size_t k = 0; k < demand.size(); ++k) {
      const YAML::Node b = demand[k];
      const std::string p = "demand[" + std::to_string(k) + "]";
      r.note(p, b);
      if (!b.IsMap()) {
        r.issue(p, "expected {from_year, to_year, low, high}", b);
        continue;
      }
      r.reject_unknown(b, p, kDemandKeys);
      DemandBand band;
      r.read(b, "from_year", p + ".from_year", band.from_year, true);
      r.read(b, "to_year", p + ".to_year", band.to_year, true);
      r.read(b, "low", p + ".low", band.low, true);
      r.read(b, "high", p + ".high", band.high, true);
      c.demand.push_back(band);
    }
  }

  if (const YAML::Node planner = root["planner"]) {
    if (!planner.IsMap()) {
      r.issue("planner", "expected a mapping", planner);
    } else {
      PlannerConfig& pc = out.options.planner;
      r.reject_unknown(planner, "planner", kPlannerKeys);
      r.read(planner, "iterations", "planner.iterations", pc.iterations, false);
      r.read(planner, "max_depth", "planner.max_depth", pc.max_depth, false);
      r.read(planner, "ucb_c", "planner.ucb_c", pc.ucb_c, false);
      r.read(planner, "k_obs", "planner.k_obs", pc.k_obs, false);
      r.read(planner, "alpha_obs", "planner.alpha_obs", pc.alpha_obs, false);
      r.read(planner, "scenarios", "planner.scenarios", pc.scenarios, false);
      r.read(planner, "seed", "planner.seed", pc.seed, false);
      std::string rollout = to_string(pc.rollout);
      r.read(planner, "rollout", "planner.rollout", rollout, false);
      try {
        pc.rollout = parse_rollout_kind(rollout);
      } catch (const ConfigError& e) {
        r.issue("planner.rollout", e.what(), planner["rollout"]);
      }
    }
  }
  if (const YAML::Node saa = root["stochastic"]) {
    if (!saa.IsMap()) {
      r.issue("stochastic", "expected a mapping", saa);
    } else {
      r.reject_unknown(saa, "stochastic", kStochasticKeys);
      r.read(saa, "scenarios", "stochastic.scenarios", out.options.saa_scenarios, false);
      r.read(saa, "seed", "stochastic.seed", out.options.saa_seed, false);
    }
  }
}

std::vector<ConfigIssue> validate_options(const PolicyOptions& o) {
  std::vector<ConfigIssue> out;
  const PlannerConfig& p = o.planner;
  if (p.iterations < 1) out.push_back({"planner.iterations", "iterations must be >= 1"});
  if (p.max_depth < 1) out.push_back({"planner.max_depth", "max_depth must be >= 1"});
  if (p.scenarios < 1) out.push_back({"planner.scenarios", "scenarios must be >= 1"});
  if (!(p.alpha_obs >= 0.0 && p.alpha_obs < 1.0)) out.push_back({"planner.alpha_obs", "alpha_obs must lie in [0, 1)"});
  if (!(p.k_obs > 0.0)) out.push_back({"planner.k_obs", "k_obs must be > 0"});
  if (!(p.ucb_c >= 0.0)) out.push_back({"planner.ucb_c", "ucb_c must be >= 0"});
  if (o.saa_scenarios < 1) out.push_back({"stochastic.scenarios", "scenario count must be >= 1"});
  return out;
}

}  // namespace

std::string to_string(RolloutKind kind) {
  switch (kind) {
    case RolloutKind::Greedy: return "greedy";
    case RolloutKind::Random: return "random";
    case RolloutKind::Demand: return "demand";
  }
  return "greedy";
}

RolloutKind parse_rollout_kind(const std::string& text) {
  if (text == "greedy") return RolloutKind::Greedy;
  if (text == "random") return RolloutKind::Random;
  if (text == "demand") return RolloutKind::Demand;
  throw ConfigError("unknown rollout policy '" + text + "' (expected greedy, random or demand)");
}

std::string format_issue(const ConfigIssue& issue, std::string_view source) {
  std::ostringstream os;
  os << source;
  if (issue.line > 0) os << ':' << issue.line;
  os << ": " << (issue.field.empty() ? "" : issue.field + ": ") << issue.message;
  return os.str();
}

ConfigInvalid::ConfigInvalid(std::string source, std::vector<ConfigIssue> issues)
    : ConfigError([&] {
        std::string msg = "invalid configuration " + source;
        for (const auto& i : issues) msg += "\n  " + format_issue(i, source);
        return msg;
      }()),
      source_(std::move(source)),
      issues_(std::move(issues)) {}

std::vector<ConfigIssue> validate(const ProblemConfig& c) {
  std::vector<ConfigIssue> out;
  auto require = [&](bool ok, const std::string& field, const std::string& message) {
    if (!ok) out.push_back({field, message});
  };
  auto finite = [](double x) { return std::isfinite(x); };

  require(c.discount > 0.0 && c.discount < 1.0, "discount", "discount must satisfy 0 < gamma < 1");
  require(c.extraction_factor > 0.0 && c.extraction_factor <= 1.0, "extraction_factor",
          "extraction factor must satisfy 0 < rho <= 1");
  require(c.horizon >= 1, "horizon", "horizon must be >= 1 year");
  require(c.delay_goal >= 0, "delay_goal", "delay goal must be >= 0");
  for (auto [v, f] : {std::pair{c.explore_cost, "explore_cost"}, {c.build_cost, "build_cost"},
                      {c.restore_cost, "restore_cost"}, {c.operating_cost, "operating_cost"},
                      {c.processing_cost, "processing_cost"}, {c.lithium_price, "lithium_price"},
                      {c.domestic_penalty, "domestic_penalty"}})
    require(finite(v) && v >= 0.0, f, std::string(f) + " must be a finite value >= 0");
  const RewardWeights& w = c.weights;
  require(finite(w.domestic) && finite(w.emissions) && finite(w.unfulfilled) && finite(w.profit), "weights",
          "weights must be finite");
  require(finite(c.obs_noise) && c.obs_noise >= 0.0, "obs_noise", "observation noise must be >= 0");
  require(c.reserve_bin > 0.0, "reserve_bin", "reserve bin must be > 0");
  require(c.obs_bin > 0.0, "obs_bin", "observation bin must be > 0");
  require(finite(c.emission_scale) && c.emission_scale >= 0.0, "emission_scale", "emission scale must be >= 0");
  require(finite(c.initial_belief_std) && c.initial_belief_std >= 0.0, "initial_belief_std",
          "initial belief std must be >= 0");

  require(!c.sites.empty(), "sites", "at least one site is required");
  require(c.sites.size() <= kMaxSites, "sites", "at most 8 sites are supported");
  for (std::size_t j = 0; j < c.sites.size(); ++j) {
    const SiteModel& s = c.sites[j];
    require(finite(s.initial_reserve) && s.initial_reserve >= 0.0, site_path(j, "initial_reserve"),
            "initial reserve must be >= 0");
    require(finite(s.emission_factor) && s.emission_factor >= 0.0, site_path(j, "emission_factor"),
            "emission factor must be >= 0");
    require(finite(s.yield.std) && s.yield.std > 0.0, site_path(j, "yield.std"), "yield std must be > 0");
    require(finite(s.loss.std) && s.loss.std > 0.0, site_path(j, "loss.std"), "loss std must be > 0");
    require(finite(s.yield.mean) && s.yield.mean >= 0.0, site_path(j, "yield.mean"), "yield mean must be >= 0");
    require(finite(s.loss.mean) && s.loss.mean >= 0.0, site_path(j, "loss.mean"), "loss mean must be >= 0");
    require(finite(s.transport_cost) && s.transport_cost >= 0.0, site_path(j, "transport_cost"),
            "transport cost must be >= 0");
    require(finite(s.restore_absorption) && s.restore_absorption >= 0.0, site_path(j, "restore_absorption"),
            "restore absorption must be >= 0");
  }

  // Demand bands must tile 1..T exactly once.
  std::vector<int> owner(static_cast<std::size_t>(std::max(c.horizon, 0)) + 1, -1);
  for (std::size_t k = 0; k < c.demand.size(); ++k) {
    const DemandBand& b = c.demand[k];
    const std::string p = "demand[" + std::to_string(k) + "]";
    if (b.from_year > b.to_year) {
      out.push_back({p, "from_year " + std::to_string(b.from_year) + " is after to_year " + std::to_string(b.to_year)});
      continue;
    }
    require(finite(b.low) && b.low >= 0.0 && finite(b.high) && b.high >= b.low, p,
            "demand band needs 0 <= low <= high");
    std::vector<int> overlap;
    std::vector<int> outside;
    for (int y = b.from_year; y <= b.to_year; ++y) {
      if (y < 1 || y > c.horizon) {
        outside.push_back(y);
        continue;
      }
      auto& o = owner[static_cast<std::size_t>(y)];
      if (o >= 0) overlap.push_back(y);
      else o = static_cast<int>(k);
    }
    auto years = [](const std::vector<int>& ys) {
      std::string s;
      for (int y : ys) s += (s.empty() ? "" : ",") + std::to_string(y);
      return s;
    };
    if (!overlap.empty()) out.push_back({p, "demand bands overlap in years " + years(overlap)});
    if (!outside.empty()) out.push_back({p, "demand band covers years outside 1..horizon: " + years(outside)});
  }
  std::vector<int> missing;
  for (int y = 1; y <= c.horizon; ++y)
    if (owner[static_cast<std::size_t>(y)] < 0) missing.push_back(y);
  if (!missing.empty()) {
    std::string s;
    for (int y : missing) s += (s.empty() ? "" : ",") + std::to_string(y);
    out.push_back({"demand", "no demand band covers years " + s});
  }
  return out;
}

LoadedConfig parse_config(std::string_view yaml_text, const std::string& source) {
  LoadedConfig out;
  Reader r;
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::ParserException& e) {
    throw ConfigInvalid(source, {{"", e.msg, e.mark.line + 1}});
  }
  read_document(r, root, out);
  if (r.issues.empty()) {
    auto issues = validate(out.problem);
    for (auto& i : validate_options(out.options)) issues.push_back(std::move(i));
    for (auto& i : issues) {
      // Point at the most specific recorded path: "demand[1]" before "demand".
      for (std::string path = i.field; !path.empty();) {
        if (auto it = r.lines.find(path); it != r.lines.end()) {
          i.line = it->second;
          break;
        }
        const auto cut = path.find_last_of(".[");
        path = cut == std::string::npos ? std::string{} : path.substr(0, cut);
      }
    }
    r.issues = std::move(issues);
  }
  if (!r.issues.empty()) throw ConfigInvalid(source, std::move(r.issues));
  return out;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::filesystem::path resolve_config_path(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (fs::exists(name_or_path)) return name_or_path;
  const fs::path bundled = fs::path(MINERAL_CONFIG_DIR) / (name_or_path + ".yaml");
  if (fs::exists(bundled)) return bundled;
  const fs::path bundled_exact = fs::path(MINERAL_CONFIG_DIR) / name_or_path;
  if (fs::exists(bundled_exact)) return bundled_exact;
  throw ConfigError("config file not found: " + name_or_path);
}

LoadedConfig table1_default() { return load_config(resolve_config_path("table1.default")); }

std::string format_parameter_table(const ProblemConfig& c) {
  std::ostringstream os;
  auto row = [&](const std::string& name, const std::string& symbol, const std::string& value) {
    os << "  " << name;
    for (std::size_t k = name.size(); k < 32; ++k) os << ' ';
    os << symbol;
    for (std::size_t k = symbol.size(); k < 10; ++k) os << ' ';
    os << value << '\n';
  };
  auto num = [](double x) {
    std::ostringstream s;
    s << x;
    return s.str();
  };
  auto list = [&](auto&& f) {
    std::string s = "[";
    for (std::size_t j = 0; j < c.sites.size(); ++j) s += (j ? ", " : "") + f(c.sites[j]);
    return s + "]";
  };
  std::string dom, fgn;
  for (std::size_t j = 0; j < c.sites.size(); ++j)
    (c.sites[j].domestic ? dom : fgn) += ((c.sites[j].domestic ? dom : fgn).empty() ? "" : ", ") + std::to_string(j + 1);

  os << "Configuration: " << c.name << '\n';
  row("Parameter", "Symbol", "Value");
  row("Number of sites", "n", std::to_string(c.sites.size()));
  row("Domestic sites", "J_d", "{" + dom + "}");
  row("Foreign sites", "J_f", "{" + fgn + "}");
  row("LCE reserve discretization", "-", num(c.reserve_bin) + " Mt");
  row("Observation discretization", "-", num(c.obs_bin) + " Mt");
  row("Observation noise", "sigma_o", num(c.obs_noise) + " Mt");
  row("Exploration cost", "c_e", "$" + num(c.explore_cost) + "M");
  row("Build cost", "c_b", "$" + num(c.build_cost) + "M");
  row("Restoration cost", "c_r", "$" + num(c.restore_cost) + "M");
  row("Operating cost", "c_o", "$" + num(c.operating_cost) + "M per site-year");
  row("Transportation cost", "c_t",
      list([&](const SiteModel& s) { return "$" + num(s.transport_cost / kUsdToMusd); }) + " per Mt");
  row("Processing cost", "c_p", "$" + num(c.processing_cost / kUsdToMusd) + " per Mt");
  row("Lithium price (processed)", "p_Li", "$" + num(c.lithium_price / kUsdToMusd) + " per Mt");
  row("Discount factor", "gamma", num(c.discount));
  row("Planning horizon", "-", std::to_string(c.horizon) + " years");
  row("Extraction factor", "rho", num(c.extraction_factor));
  row("Domestic mining delay goal", "t_d", std::to_string(c.delay_goal) + " years");
  row("Domestic mining penalty", "p_d", "$" + num(c.domestic_penalty) + "M");
  row("Initial reserves", "v", list([&](const SiteModel& s) { return num(s.initial_reserve); }) + " Mt");
  row("Initial belief std", "sigma_0", num(c.initial_belief_std) + " Mt");
  for (std::size_t j = 0; j < c.sites.size(); ++j) {
    const auto& s = c.sites[j];
    row(j == 0 ? "Annual mine yield" : "", "phi_" + std::to_string(j + 1),
        "N(" + num(s.yield.mean) + ", " + num(s.yield.std) + ") Mt/year");
  }
  for (std::size_t j = 0; j < c.sites.size(); ++j) {
    const auto& s = c.sites[j];
    row(j == 0 ? "Annual transportation loss" : "", "psi_" + std::to_string(j + 1),
        "N(" + num(s.loss.mean) + ", " + num(s.loss.std) + ") Mt/year");
  }
  row("CO2 emission factor", "e", list([&](const SiteModel& s) { return num(s.emission_factor); }) + " Mt/Mt");
  row("Emission scale", "-", num(c.emission_scale));
  row("Restoration absorption", "r", list([&](const SiteModel& s) { return num(s.restore_absorption); }) + " Mt");
  row("Objective function weights", "w",
      "[" + num(c.weights.domestic) + ", " + num(c.weights.emissions) + ", " + num(c.weights.unfulfilled) + ", " +
          num(c.weights.profit) + "]");
  for (const auto& b : c.demand)
    row("Demand year " + std::to_string(b.from_year) + "-" + std::to_string(b.to_year), "d",
        "U(" + num(b.low) + ", " + num(b.high) + ") Mt/year");
  return os.str();
}

}  // namespace mineral
