#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mineral/harness.hpp"

namespace mineral {

/// Writes `content` to a sibling temp file and renames it over `path`, so a
/// reader never sees a partial file. Creates parent directories.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Column names of the per-step episode CSV for an n-site problem.
[[nodiscard]] std::vector<std::string> episode_csv_header(std::size_t n_sites);
[[nodiscard]] std::vector<std::string> belief_csv_header();
[[nodiscard]] std::vector<std::string> summary_csv_header();

/// One row per step; several traces concatenate under a single header.
[[nodiscard]] std::string episodes_csv(std::span<const EpisodeTrace> traces, const ProblemConfig& config);
/// One JSON object per step.
[[nodiscard]] std::string episodes_jsonl(std::span<const EpisodeTrace> traces, const ProblemConfig& config);
/// Per (step, site): true reserve against belief mean and std, t = 0..T.
[[nodiscard]] std::string beliefs_csv(std::span<const EpisodeTrace> traces, const ProblemConfig& config);

[[nodiscard]] std::string summary_csv(std::span<const PolicySummary> rows);
[[nodiscard]] std::string summary_text(std::span<const PolicySummary> rows);

}  // namespace mineral
