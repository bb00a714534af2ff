#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gca/network.hpp"
#include "gca/oracle.hpp"
#include "gca/screening.hpp"
#include "gca/verify.hpp"

namespace gca::cli {

/// Entry point behind `gca`. args excludes the program name. Returns 0 on
/// success, 1 on usage errors and 2 on data or validation errors.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Parses "N" or "A-B" (inclusive) into a list of values.
std::vector<std::size_t> parse_range(const std::string& text);

/// Comma-, whitespace- or newline-separated branch keys; '#' starts a comment.
std::vector<BranchIndex> parse_branch_list(const Network& net, const std::string& text);

struct BenchCell {
  std::size_t x = 0;
  std::size_t search_level = 0;
  std::size_t reps = 0;
  double median_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
  std::size_t candidates = 0;
};

/// Wall-clock of a full screen() per (x, level) cell, `reps` runs each.
std::vector<BenchCell> bench(const Network& net, std::span<const std::size_t> xs,
                             std::span<const std::size_t> levels, std::size_t reps,
                             const ScreeningConfig& base);

std::string bench_csv(std::span<const BenchCell> cells);
std::string lodf_csv(const Network& net, const LodfMatrix& lodf);
std::string screen_json(const Network& net, const ScreeningResult& result, const ScreeningConfig& cfg,
                        std::span<const std::size_t> levels);
std::string screen_csv(const Network& net, const ScreeningResult& result);
std::string verify_json(const Network& net, const ViolationReport& report);
std::string bruteforce_json(const Network& net, std::size_t x, std::size_t checked,
                            std::span<const BruteForceEntry> entries);
std::string stability_csv(const Network& net, const StabilityReport& report);

}  // namespace gca::cli
