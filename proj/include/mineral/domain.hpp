#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mineral {

/// Upper bound on the number of candidate sites. Per-site vectors live inline
/// so that State and Belief stay trivially copyable inside the planners.
inline constexpr std::size_t kMaxSites = 8;

/// Error raised when a caller breaks an operation's precondition
/// (invalid action, stepping a finished episode, malformed observation).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Error raised for configuration problems found at runtime.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-capacity per-site vector.
template <typename T>
class SiteVec {
 public:
  SiteVec() = default;
  explicit SiteVec(std::size_t n, T value = T{}) : size_(n) {
    if (n > kMaxSites) throw ConfigError("too many sites (max 8)");
    for (std::size_t i = 0; i < n; ++i) data_[i] = value;
  }
  SiteVec(std::initializer_list<T> values) : size_(values.size()) {
    if (size_ > kMaxSites) throw ConfigError("too many sites (max 8)");
    std::size_t i = 0;
    for (const T& v : values) data_[i++] = v;
  }

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] bool empty() const { return size_ == 0; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T* begin() { return data_.data(); }
  T* end() { return data_.data() + size_; }
  const T* begin() const { return data_.data(); }
  const T* end() const { return data_.data() + size_; }
  [[nodiscard]] std::span<const T> span() const { return {data_.data(), size_}; }

  friend bool operator==(const SiteVec& a, const SiteVec& b) {
    if (a.size_ != b.size_) return false;
    for (std::size_t i = 0; i < a.size_; ++i)
      if (!(a.data_[i] == b.data_[i])) return false;
    return true;
  }

 private:
  std::array<T, kMaxSites> data_{};
  std::size_t size_ = 0;
};

struct Gaussian {
  double mean = 0.0;
  double std = 1.0;
};

/// Static per-site parameters. Masses in Mt, money in $M.
struct SiteModel {
  std::string name;
  bool domestic = false;
  double initial_reserve = 0.0;     // v_j, also the default prior mean
  Gaussian yield;                   // annual extraction, Mt/yr
  Gaussian loss;                    // annual transport loss, Mt/yr
  double emission_factor = 0.0;     // CO2 per extracted mass
  double restore_absorption = 0.0;  // CO2 (Mt) absorbed on restoration
  double transport_cost = 0.0;      // $M per Mt delivered
};

struct DemandBand {
  int from_year = 1;  // inclusive, 1-based
  int to_year = 1;    // inclusive
  double low = 0.0;   // Mt/yr
  double high = 0.0;
};

/// Reward weights w1..w4 (domestic penalty, emissions, unfulfilled demand, profit).
struct RewardWeights {
  double domestic = 0.0;
  double emissions = 0.0;
  double unfulfilled = 0.0;
  double profit = 0.0;
};

/// Whole-problem configuration. All money fields are stored in $M after
/// loading; see config_io for the unit conversions applied to the file.
struct ProblemConfig {
  std::string name = "custom";
  std::vector<SiteModel> sites;

  double explore_cost = 0.0;     // c_e, $M per action
  double build_cost = 0.0;       // c_b
  double restore_cost = 0.0;     // c_r
  double operating_cost = 0.0;   // c_o, $M per operating site per step
  double processing_cost = 0.0;  // c_p, $M per Mt of feed
  double lithium_price = 0.0;    // p_Li, $M per Mt processed

  double extraction_factor = 0.08;  // rho
  double discount = 0.97;           // gamma
  int horizon = 30;                 // T, years
  int delay_goal = 10;              // t_d
  double domestic_penalty = 0.0;    // p_d, $M
  RewardWeights weights;

  double obs_noise = 0.0;  // sigma_o, Mt
  std::vector<DemandBand> demand;
  double reserve_bin = 1000.0;
  double obs_bin = 1000.0;

  // Multiplier applied to emission_factor * E when computing CO2 mass.
  double emission_scale = 1.0;
  bool apply_domestic_loss = false;
  double initial_belief_std = 10000.0;

  [[nodiscard]] std::size_t n_sites() const { return sites.size(); }
};

enum class ActionKind : std::uint8_t { DoNothing = 0, Explore = 1, Build = 2, Restore = 3 };

/// One decision. Sites are 0-based in memory and 1-based in every external format.
struct Action {
  ActionKind kind = ActionKind::DoNothing;
  int site = -1;

  static constexpr Action do_nothing() { return {}; }
  static constexpr Action explore(int j) { return {ActionKind::Explore, j}; }
  static constexpr Action build(int j) { return {ActionKind::Build, j}; }
  static constexpr Action restore(int j) { return {ActionKind::Restore, j}; }

  /// Position in the canonical enumeration: DO_NOTHING, then per site
  /// EXPLORE, BUILD, RESTORE. This is also the tie-break order.
  [[nodiscard]] int index() const {
    return kind == ActionKind::DoNothing ? 0 : 1 + 3 * site + (static_cast<int>(kind) - 1);
  }
  static Action from_index(int index);

  friend bool operator==(const Action&, const Action&) = default;
  friend auto operator<=>(const Action& a, const Action& b) { return a.index() <=> b.index(); }
};

[[nodiscard]] std::string to_string(Action a);
/// Parses "DO_NOTHING", "EXPLORE(2)", "BUILD(1)", "RESTORE(3)" (1-based site).
[[nodiscard]] Action parse_action(const std::string& text);
[[nodiscard]] inline std::size_t action_space_size(std::size_t n_sites) { return 3 * n_sites + 1; }

/// The fully observed part of the state, shared by State and Belief.
struct Observables {
  SiteVec<bool> operating;   // m_j
  SiteVec<bool> ever_built;  // one-shot build bookkeeping
  double imported = 0.0;     // i
  double domestic = 0.0;     // d
  int t = 0;

  friend bool operator==(const Observables&, const Observables&) = default;
};

struct State {
  SiteVec<double> reserves;  // v_j
  Observables observed;

  friend bool operator==(const State&, const State&) = default;
};

[[nodiscard]] State initial_state(const ProblemConfig& config, const SiteVec<double>& reserves);
[[nodiscard]] Observables initial_observables(std::size_t n_sites);
[[nodiscard]] bool is_terminal(const Observables& observed, const ProblemConfig& config);

struct Measurement {
  int site = -1;
  double value = 0.0;  // binned reading, Mt

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

/// Sentinel used for "no measurement" in CSV/JSON outputs.
inline constexpr double kNoMeasurement = -1.0;

/// Per-step observation: at most one site carries a reading.
struct Observation {
  std::size_t n_sites = 0;
  std::optional<Measurement> measurement;

  [[nodiscard]] static Observation none(std::size_t n) { return {n, std::nullopt}; }
  /// Dense form with kNoMeasurement in every unmeasured slot.
  [[nodiscard]] std::vector<double> values() const;
  /// Compact key used to index search-tree children.
  [[nodiscard]] std::int64_t key() const;
  /// Inverse of key() for an n-site problem.
  [[nodiscard]] static Observation from_key(std::int64_t key, std::size_t n_sites);

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Round half away from zero to the nearest multiple of `bin`.
[[nodiscard]] double round_to_bin(double value, double bin);

/// Canonical order; empty once the horizon is reached.
[[nodiscard]] std::vector<Action> valid_actions(const Observables& observed, const ProblemConfig& config);
[[nodiscard]] bool is_valid_action(Action a, const Observables& observed, const ProblemConfig& config);

/// Discretized reading for site j; throws ContractViolation on negative input.
[[nodiscard]] Observation encode_observation(int site, double reading, const ProblemConfig& config);

}  // namespace mineral
