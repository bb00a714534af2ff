#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "gca/dcpf.hpp"
#include "gca/error.hpp"
#include "gca/parallel.hpp"

namespace gca::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

void configure_logging() {
  static const bool configured = [] {
    auto logger = spdlog::stderr_color_mt("gca");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[gca] [%l] %v");
    return true;
  }();
  (void)configured;
  const char* level = std::getenv("GCA_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

// Values printed in CSV tables.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.9g}", v);
}

ordered_json key_list(const Network& net, std::span<const BranchIndex> branches) {
  ordered_json list = ordered_json::array();
  for (BranchIndex b : branches) list.push_back(net.branch_key(b).to_string());
  return list;
}

ordered_json bus_ids(const Network& net, std::span<const BusIndex> buses) {
  ordered_json list = ordered_json::array();
  for (BusIndex b : buses) list.push_back(net.buses()[b].id);
  return list;
}

ordered_json report_json(const Network& net, const ViolationReport& report) {
  ordered_json doc;
  doc["candidate"] = key_list(net, report.candidate);
  doc["kind"] = std::string(to_string(report.kind));
  ordered_json overflows = ordered_json::array();
  for (const auto& o : report.overflows) {
    overflows.push_back({{"branch", net.branch_key(o.branch).to_string()},
                         {"flow_mw", o.flow_mw},
                         {"rating_mva", net.branches()[o.branch].rating_mva},
                         {"loading_percent", o.loading_percent}});
  }
  doc["overflows"] = std::move(overflows);
  ordered_json stranded = ordered_json::array();
  for (const auto& s : report.stranded) {
    stranded.push_back({{"buses", bus_ids(net, s.buses)},
                        {"load_mw", s.load_mw},
                        {"generation_mw", s.generation_mw},
                        {"slack_infeasible", s.slack_infeasible}});
  }
  doc["stranded"] = std::move(stranded);
  if (report.islands) {
    ordered_json slackless = ordered_json::array();
    for (std::size_t c : report.islands->slackless) slackless.push_back(bus_ids(net, report.islands->components[c]));
    doc["islands"] = {{"components", report.islands->components.size()}, {"slackless", std::move(slackless)}};
  } else {
    doc["islands"] = nullptr;
  }
  return doc;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Minimal usage error distinct from CLI11's own parse errors.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace

std::vector<std::size_t> parse_range(const std::string& text) {
  auto parse_one = [&](const std::string& s) -> std::size_t {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
      throw UsageError(fmt::format("bad range '{}': expected N or A-B", text));
    }
    return static_cast<std::size_t>(std::stoull(s));
  };
  const auto dash = text.find('-');
  if (dash == std::string::npos) return {parse_one(text)};
  const std::size_t lo = parse_one(text.substr(0, dash));
  const std::size_t hi = parse_one(text.substr(dash + 1));
  if (hi < lo) throw UsageError(fmt::format("bad range '{}': end before start", text));
  std::vector<std::size_t> values;
  for (std::size_t v = lo; v <= hi; ++v) values.push_back(v);
  return values;
}

std::vector<BranchIndex> parse_branch_list(const Network& net, const std::string& text) {
  std::vector<BranchIndex> out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) out.push_back(net.branch_index(BranchKey::parse(token)));
  }
  return out;
}

std::vector<BenchCell> bench(const Network& net, std::span<const std::size_t> xs,
                             std::span<const std::size_t> levels, std::size_t reps,
                             const ScreeningConfig& base) {
  if (reps == 0) throw UsageError("bench needs at least one repetition");
  std::vector<ScreeningConfig> grid;
  for (std::size_t x : xs) {
    for (std::size_t level : levels) {
      ScreeningConfig cfg = base;
      cfg.x = x;
      cfg.search_level = level;
      grid.push_back(cfg);
    }
  }
  // Repetitions run round-robin over the grid so that slow drift of the
  // machine spreads evenly across cells. An untimed warm-up call precedes
  // each sample so that it does not inherit the heap and cache state left by
  // the previous, possibly much larger, cell.
  std::vector<std::vector<double>> times(grid.size());
  std::vector<std::size_t> candidates(grid.size(), 0);
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t c = 0; c < grid.size(); ++c) {
      (void)screen(net, grid[c]);
      const auto start = std::chrono::steady_clock::now();
      const ScreeningResult result = screen(net, grid[c]);
      const auto stop = std::chrono::steady_clock::now();
      times[c].push_back(std::chrono::duration<double, std::milli>(stop - start).count());
      candidates[c] = result.candidates.size();
    }
  }
  std::vector<BenchCell> cells;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    auto& t = times[c];
    std::sort(t.begin(), t.end());
    const std::size_t mid = t.size() / 2;
    const double median = t.size() % 2 ? t[mid] : 0.5 * (t[mid - 1] + t[mid]);
    cells.push_back({grid[c].x, grid[c].search_level, reps, median, t.front(), t.back(), candidates[c]});
  }
  return cells;
}

std::string bench_csv(std::span<const BenchCell> cells) {
  std::string out = "x,search_level,reps,median_ms,min_ms,max_ms,candidates\n";
  for (const auto& c : cells) {
    out += fmt::format("{},{},{},{:.4f},{:.4f},{:.4f},{}\n", c.x, c.search_level, c.reps, c.median_ms, c.min_ms,
                       c.max_ms, c.candidates);
  }
  return out;
}

std::string lodf_csv(const Network& net, const LodfMatrix& lodf) {
  std::vector<BranchIndex> active;
  for (BranchIndex i = 0; i < net.branch_count(); ++i) {
    if (lodf.active[i]) active.push_back(i);
  }
  std::string out = "monitored";
  for (BranchIndex i : active) out += "," + net.branch_key(i).to_string();
  out += '\n';
  for (BranchIndex k : active) {
    out += net.branch_key(k).to_string();
    for (BranchIndex i : active) {
      out += ',';
      out += lodf.islanding[i] ? std::string("ISL") : num(lodf.at(k, i));
    }
    out += '\n';
  }
  return out;
}

std::string screen_json(const Network& net, const ScreeningResult& result, const ScreeningConfig& cfg,
                        std::span<const std::size_t> levels) {
  ordered_json doc;
  doc["config"] = {{"x", cfg.x},
                   {"search_levels", std::vector<std::size_t>(levels.begin(), levels.end())},
                   {"top_percent", cfg.top_percent},
                   {"nlodf_saturation", cfg.nlodf_saturation},
                   {"gbc_mode", cfg.gbc_mode == GbcMode::Exact ? "exact" : "representative"}};
  doc["investigated"] = key_list(net, result.investigated);
  doc["skipped"] = result.skipped;
  ordered_json list = ordered_json::array();
  std::size_t rank = 0;
  for (const auto& c : result.candidates) {
    list.push_back({{"rank", ++rank},
                    {"branches", key_list(net, c.branches)},
                    {"gbc_score", c.gbc_score},
                    {"seed", net.branch_key(c.seed).to_string()},
                    {"neighborhood_buses", c.neighborhood_buses},
                    {"neighborhood_branches", c.neighborhood_branches},
                    {"search_levels", c.search_levels}});
  }
  doc["candidates"] = std::move(list);
  return doc.dump(2) + "\n";
}

std::string screen_csv(const Network& net, const ScreeningResult& result) {
  std::string out = "rank,branches,gbc_score,seed,neighborhood_buses,neighborhood_branches,search_levels\n";
  std::size_t rank = 0;
  for (const auto& c : result.candidates) {
    std::vector<std::string> keys, levels;
    for (BranchIndex b : c.branches) keys.push_back(net.branch_key(b).to_string());
    for (std::size_t l : c.search_levels) levels.push_back(std::to_string(l));
    out += fmt::format("{},{},{},{},{},{},{}\n", ++rank, fmt::join(keys, ";"), num(c.gbc_score),
                       net.branch_key(c.seed).to_string(), c.neighborhood_buses, c.neighborhood_branches,
                       fmt::join(levels, ";"));
  }
  return out;
}

std::string verify_json(const Network& net, const ViolationReport& report) {
  return report_json(net, report).dump(2) + "\n";
}

std::string bruteforce_json(const Network& net, std::size_t x, std::size_t checked,
                            std::span<const BruteForceEntry> entries) {
  ordered_json doc;
  doc["x"] = x;
  doc["subsets_checked"] = checked;
  ordered_json list = ordered_json::array();
  for (const auto& e : entries) list.push_back(report_json(net, e.report));
  doc["violations"] = std::move(list);
  return doc.dump(2) + "\n";
}

std::string stability_csv(const Network& net, const StabilityReport& report) {
  std::string out = "step,outage,rank_correlation";
  for (BranchIndex i = 0; i < net.branch_count(); ++i) out += "," + net.branch_key(i).to_string();
  out += '\n';
  for (std::size_t step = 0; step < report.values.size(); ++step) {
    out += std::to_string(step);
    out += ',';
    if (step > 0) out += net.branch_key(report.applied[step - 1]).to_string();
    out += ',';
    if (step > 0) out += num(report.rank_correlation[step - 1]);
    for (const auto& v : report.values[step]) {
      out += ',';
      if (v) out += num(*v);
    }
    out += '\n';
  }
  return out;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  configure_logging();

  CLI::App app{"Contingency screening with group betweenness and line outage distribution factors", "gca"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string case_path;
  std::string output_path;
  std::size_t threads = default_parallelism();
  app.add_option("-o,--output", output_path, "Write the result to this file instead of stdout");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  ScreeningConfig cfg;
  VerifyOptions verify_opts;
  std::string level_text = "3";
  std::string x_text = "1-8";
  std::string format = "json";
  std::string gbc_mode = "exact";
  std::string contingency;
  std::string sequence_path;
  std::size_t bf_x = 2;
  std::size_t reps = 3;

  auto add_case = [&](CLI::App* sub) { sub->add_option("case", case_path, "MATPOWER case file")->required(); };

  auto* dump = app.add_subcommand("dump", "Dump the parsed network as canonical JSON");
  add_case(dump);

  auto* lodf = app.add_subcommand("lodf", "Emit the LODF matrix as CSV");
  add_case(lodf);

  auto* screen_cmd = app.add_subcommand("screen", "Rank N-x contingency candidates");
  add_case(screen_cmd);
  screen_cmd->add_option("--x", cfg.x, "Contingency order")->check(CLI::PositiveNumber);
  screen_cmd->add_option("--search-level", level_text, "Search level N, or sweep A-B");
  screen_cmd->add_option("--top-percent", cfg.top_percent, "Share of branches used as seeds")
      ->check(CLI::Range(1e-9, 100.0));
  screen_cmd->add_option("--nlodf-saturation", cfg.nlodf_saturation, "NLODF value that saturates the weight");
  screen_cmd->add_option("--gbc-mode", gbc_mode, "exact or representative")
      ->check(CLI::IsMember({"exact", "representative"}));
  screen_cmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* verify_cmd = app.add_subcommand("verify", "Apply one contingency and classify the outcome");
  add_case(verify_cmd);
  verify_cmd->add_option("--contingency", contingency, "Comma-separated from-to-circuit keys")->required();
  verify_cmd->add_option("--overflow-threshold", verify_opts.overflow_threshold_percent, "Loading percent");

  auto* bf_cmd = app.add_subcommand("bruteforce", "Verify every N-1 or N-2 outage set");
  add_case(bf_cmd);
  bf_cmd->add_option("--x", bf_x, "1 or 2")->check(CLI::Range(1, 2));
  bf_cmd->add_option("--overflow-threshold", verify_opts.overflow_threshold_percent, "Loading percent");

  auto* stab_cmd = app.add_subcommand("stability", "NLODF drift along a cumulative outage sequence");
  add_case(stab_cmd);
  stab_cmd->add_option("--sequence", sequence_path, "File of branch keys, one outage per entry")->required();

  auto* bench_cmd = app.add_subcommand("bench", "Time screen() over a grid of x and search levels");
  add_case(bench_cmd);
  bench_cmd->add_option("--x", x_text, "Contingency orders, N or A-B");
  bench_cmd->add_option("--search-level", level_text, "Search levels, N or A-B");
  bench_cmd->add_option("--reps", reps, "Repetitions per cell")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--top-percent", cfg.top_percent, "Share of branches used as seeds")
      ->check(CLI::Range(1e-9, 100.0));

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "gca: " << e.what() << "\n" << "run 'gca --help' for usage\n";
    return 1;
  }

  cfg.threads = threads;
  cfg.gbc_mode = gbc_mode == "exact" ? GbcMode::Exact : GbcMode::RepresentativePath;

  std::string result;
  try {
    std::vector<std::size_t> levels;
    std::vector<std::size_t> xs;
    if (*screen_cmd || *bench_cmd) levels = parse_range(level_text);
    if (*bench_cmd) xs = parse_range(x_text);

    const Network net = load_case(case_path);
    if (*dump) {
      result = dump_json(net);
    } else if (*lodf) {
      result = lodf_csv(net, compute_lodf(net));
    } else if (*screen_cmd) {
      const ScreeningResult res = levels.size() == 1 ? [&] {
        cfg.search_level = levels.front();
        return screen(net, cfg);
      }() : screen_sweep(net, cfg, levels);
      result = format == "json" ? screen_json(net, res, cfg, levels) : screen_csv(net, res);
    } else if (*verify_cmd) {
      result = verify_json(net, verify_candidate(net, parse_branch_list(net, contingency), verify_opts));
    } else if (*bf_cmd) {
      std::size_t in_service = 0;
      for (const auto& br : net.branches()) in_service += br.in_service ? 1 : 0;
      const std::size_t checked = bf_x == 1 ? in_service : in_service * (in_service - 1) / 2;
      result = bruteforce_json(net, bf_x, checked, bruteforce_nx(net, bf_x, verify_opts, threads));
    } else if (*stab_cmd) {
      const auto sequence = parse_branch_list(net, read_text(sequence_path));
      const StabilityReport report = lodf_stability_report(net, sequence);
      for (const auto& notice : report.notices) spdlog::warn("{}", notice);
      result = stability_csv(net, report);
    } else if (*bench_cmd) {
      result = bench_csv(bench(net, xs, levels, reps, cfg));
    }
  } catch (const Error& e) {
    err << "gca: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "gca: " << e.what() << "\n";
    return 1;
  }

  if (output_path.empty()) {
    out << result;
  } else {
    std::ofstream file(output_path, std::ios::binary);
    if (!file) {
      err << "gca: cannot write '" << output_path << "'\n";
      return 2;
    }
    file << result;
  }
  return 0;
}

}  // namespace gca::cli
