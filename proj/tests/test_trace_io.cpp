#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "mineral/config_io.hpp"
#include "mineral/policies.hpp"
#include "mineral/trace_io.hpp"

namespace mineral {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string golden(const std::string& name) {
  std::string s = slurp(fs::path(MINERAL_TEST_DATA) / name);
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

std::string joined(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
  return s;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

struct Fixture {
  Scenario scenario = inaccurate_scenario(table1_default().problem);
  std::vector<EpisodeTrace> traces;
  Fixture() {
    for (const char* name : {"greedy", "random"}) {
      auto p = make_policy(name, scenario.config, {}, scenario.initial_belief()).create();
      for (std::uint64_t seed : {0u, 1u}) traces.push_back(run_episode(scenario, *p, seed, name));
    }
  }
};

TEST(TraceIo, HeadersMatchTheGoldenFiles) {
  EXPECT_EQ(joined(episode_csv_header(4)), golden("episodes_header.csv"));
  EXPECT_EQ(joined(belief_csv_header()), golden("beliefs_header.csv"));
  EXPECT_EQ(joined(summary_csv_header()), golden("summary_header.csv"));
}

TEST(TraceIo, EpisodeCsvHasOneRowPerStep) {
  const Fixture f;
  const auto rows = lines(episodes_csv(f.traces, f.scenario.config));
  ASSERT_EQ(rows.size(), 1 + 4 * 30u);
  EXPECT_EQ(rows[0], golden("episodes_header.csv"));
  const auto header = fields(rows[0]);
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto r = fields(rows[i]);
    ASSERT_EQ(r.size(), header.size()) << i;
    const EpisodeTrace& tr = f.traces[(i - 1) / 30];
    const StepRecord& s = tr.steps[(i - 1) % 30];
    EXPECT_EQ(r[col("policy")], tr.policy);
    EXPECT_EQ(std::stoull(r[col("seed")]), tr.seed);
    EXPECT_EQ(r[col("action")], to_string(s.action));
    // Shortest round-trip formatting: parsing gives back the exact double.
    EXPECT_EQ(std::stod(r[col("reward")]), s.outcome.reward.total);
    EXPECT_EQ(std::stod(r[col("demand")]), s.outcome.demand);
    EXPECT_EQ(std::stod(r[col("reserve_3")]), s.outcome.next_state.reserves[2]);
  }
}

TEST(TraceIo, JsonlParsesLineByLine) {
  const Fixture f;
  const auto rows = lines(episodes_jsonl(f.traces, f.scenario.config));
  ASSERT_EQ(rows.size(), 4 * 30u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto j = nlohmann::json::parse(rows[i]);
    const StepRecord& s = f.traces[i / 30].steps[i % 30];
    EXPECT_EQ(j.at("t").get<int>(), static_cast<int>(i % 30));
    EXPECT_EQ(j.at("action").get<std::string>(), to_string(s.action));
    EXPECT_EQ(j.at("reward").at("total").get<double>(), s.outcome.reward.total);
    EXPECT_EQ(j.at("extracted").size(), 4u);
  }
}

TEST(TraceIo, BeliefCsvCoversEveryStepAndSite) {
  const Fixture f;
  const auto rows = lines(beliefs_csv(f.traces, f.scenario.config));
  ASSERT_EQ(rows.size(), 1 + 4 * 31 * 4u);
  EXPECT_EQ(rows[0], golden("beliefs_header.csv"));
  const auto first = fields(rows[1]);
  EXPECT_EQ(first[2], "0");
  EXPECT_EQ(first[3], "1");
  EXPECT_EQ(std::stod(first[4]), f.scenario.true_reserves[0]);
  EXPECT_EQ(std::stod(first[5]), f.scenario.prior_mean[0]);
  EXPECT_EQ(std::stod(first[6]), f.scenario.prior_std[0]);
}

TEST(TraceIo, SummaryCsvAndText) {
  const Fixture f;
  std::vector<EpisodeMetrics> ms;
  for (const auto& tr : f.traces) ms.push_back(tr.metrics);
  const std::vector<PolicySummary> rows{summarize("greedy", std::span(ms).first(2)),
                                        summarize("random", std::span(ms).subspan(2))};
  const auto csv = lines(summary_csv(rows));
  ASSERT_EQ(csv.size(), 3u);
  EXPECT_EQ(csv[0], golden("summary_header.csv"));
  EXPECT_EQ(fields(csv[1])[0], "greedy");
  EXPECT_EQ(fields(csv[1]).size(), summary_csv_header().size());
  const std::string text = summary_text(rows);
  EXPECT_NE(text.find("greedy"), std::string::npos);
  EXPECT_NE(text.find("random"), std::string::npos);
}

TEST(WriteAtomic, CreatesReplacesAndLeavesNoTemp) {
  const fs::path dir = fs::temp_directory_path() / ("mineral_atomic_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::remove_all(dir);
  const fs::path file = dir / "nested" / "out.csv";
  write_atomic(file, "first\n");
  EXPECT_EQ(slurp(file), "first\n");
  write_atomic(file, "second\n");
  EXPECT_EQ(slurp(file), "second\n");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(file.parent_path())) ++entries;
  EXPECT_EQ(entries, 1);
  fs::remove_all(dir);
}

TEST(WriteAtomic, UnwritableTargetThrowsAndKeepsTheOldFile) {
  const fs::path dir = fs::temp_directory_path() / "mineral_atomic_ro";
  fs::remove_all(dir);
  fs::create_directories(dir / "target_is_dir");
  EXPECT_THROW(write_atomic(dir / "target_is_dir", "x"), std::runtime_error);
  EXPECT_TRUE(fs::is_directory(dir / "target_is_dir"));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace mineral
