#include "mineral/domain.hpp"

#include <cmath>
#include <regex>

namespace mineral {

Action Action::from_index(int index) {
  if (index < 0) throw ContractViolation("negative action index");
  if (index == 0) return do_nothing();
  const int site = (index - 1) / 3;
  const auto kind = static_cast<ActionKind>((index - 1) % 3 + 1);
  return {kind, site};
}

std::string to_string(Action a) {
  const std::string site = std::to_string(a.site + 1);
  switch (a.kind) {
    case ActionKind::DoNothing: return "DO_NOTHING";
    case ActionKind::Explore: return "EXPLORE(" + site + ")";
    case ActionKind::Build: return "BUILD(" + site + ")";
    case ActionKind::Restore: return "RESTORE(" + site + ")";
  }
  return "?";
}

Action parse_action(const std::string& text) {
  if (text == "DO_NOTHING") return Action::do_nothing();
  static const std::regex pattern(R"((EXPLORE|BUILD|RESTORE)\((\d+)\))");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) throw ConfigError("unrecognized action '" + text + "'");
  const int site = std::stoi(m[2].str()) - 1;
  if (site < 0) throw ConfigError("site index must be >= 1 in '" + text + "'");
  if (m[1] == "EXPLORE") return Action::explore(site);
  if (m[1] == "BUILD") return Action::build(site);
  return Action::restore(site);
}

Observables initial_observables(std::size_t n_sites) {
  Observables o;
  o.operating = SiteVec<bool>(n_sites, false);
  o.ever_built = SiteVec<bool>(n_sites, false);
  return o;
}

State initial_state(const ProblemConfig& config, const SiteVec<double>& reserves) {
  if (reserves.size() != config.n_sites()) throw ContractViolation("reserve vector size mismatch");
  return State{reserves, initial_observables(config.n_sites())};
}

bool is_terminal(const Observables& observed, const ProblemConfig& config) {
  return observed.t >= config.horizon;
}

std::vector<double> Observation::values() const {
  std::vector<double> out(n_sites, kNoMeasurement);
  if (measurement) out.at(static_cast<std::size_t>(measurement->site)) = measurement->value;
  return out;
}

std::int64_t Observation::key() const {
  if (!measurement) return -1;
  // Readings are integral Mt; 2^40 Mt is far beyond any reserve in play.
  return (static_cast<std::int64_t>(measurement->site) << 40) +
         static_cast<std::int64_t>(std::llround(measurement->value));
}

double round_to_bin(double value, double bin) {
  if (bin <= 0.0) return value;
  return std::round(value / bin) * bin;
}

bool is_valid_action(Action a, const Observables& observed, const ProblemConfig& config) {
  if (is_terminal(observed, config)) return false;
  if (a.kind == ActionKind::DoNothing) return true;
  if (a.site < 0 || static_cast<std::size_t>(a.site) >= config.n_sites()) return false;
  const auto j = static_cast<std::size_t>(a.site);
  const bool fresh = !observed.operating[j] && !observed.ever_built[j];
  switch (a.kind) {
    case ActionKind::Explore:
    case ActionKind::Build: return fresh;
    case ActionKind::Restore: return observed.operating[j];
    case ActionKind::DoNothing: return true;
  }
  return false;
}

std::vector<Action> valid_actions(const Observables& observed, const ProblemConfig& config) {
  std::vector<Action> out;
  if (is_terminal(observed, config)) return out;
  out.reserve(action_space_size(config.n_sites()));
  out.push_back(Action::do_nothing());
  for (int j = 0; j < static_cast<int>(config.n_sites()); ++j) {
    for (Action a : {Action::explore(j), Action::build(j), Action::restore(j)})
      if (is_valid_action(a, observed, config)) out.push_back(a);
  }
  return out;
}

Observation Observation::from_key(std::int64_t key, std::size_t n_sites) {
  if (key < 0) return none(n_sites);
  const auto site = static_cast<int>(key >> 40);
  const auto value = static_cast<double>(key & ((std::int64_t{1} << 40) - 1));
  return Observation{n_sites, Measurement{site, value}};
}

Observation encode_observation(int site, double reading, const ProblemConfig& config) {
  if (site < 0 || static_cast<std::size_t>(site) >= config.n_sites())
    throw ContractViolation("observation site out of range");
  if (!(reading >= 0.0)) throw ContractViolation("negative reserve reading");
  return Observation{config.n_sites(), Measurement{site, round_to_bin(reading, config.obs_bin)}};
}

}  // namespace mineral
