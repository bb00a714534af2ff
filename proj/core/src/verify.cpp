#include "gca/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gca/error.hpp"
#include "gca/screening.hpp"

namespace gca {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::None: return "none";
    case ViolationKind::Overflow: return "overflow";
    case ViolationKind::Islanding: return "islanding";
    case ViolationKind::SlackInfeasible: return "slack_infeasible";
  }
  return "none";
}

ViolationReport verify_candidate(const Network& net, std::span<const BranchIndex> branches,
                                 const VerifyOptions& options) {
  ViolationReport report;
  report.candidate.assign(branches.begin(), branches.end());
  std::sort(report.candidate.begin(), report.candidate.end());
  report.candidate.erase(std::unique(report.candidate.begin(), report.candidate.end()), report.candidate.end());
  for (BranchIndex b : report.candidate) {
    if (b >= net.branch_count()) throw LookupError(fmt::format("branch index {} out of range", b));
    if (!net.branches()[b].in_service) {
      throw ValidationError(fmt::format("branch {} is already out of service", net.branch_key(b).to_string()));
    }
  }

  IslandReport islands = detect_islands(net, report.candidate);
  for (std::size_t c : islands.slackless) {
    StrandedComponent comp;
    comp.buses = islands.components[c];
    for (BusIndex b : comp.buses) {
      comp.load_mw += net.load_mw(b);
      comp.generation_mw += net.generation_mw(b);
    }
    if (comp.load_mw == 0.0 && comp.generation_mw == 0.0) continue;
    comp.slack_infeasible = std::abs(comp.generation_mw - comp.load_mw) > 1e-6;
    report.stranded.push_back(std::move(comp));
  }
  if (islands.components.size() > 1) report.islands = std::move(islands);
  if (!report.stranded.empty()) {
    report.kind = ViolationKind::Islanding;
    return report;
  }

  DcSolution sol;
  try {
    sol = solve_dc(net, report.candidate);
  } catch (const SolveError& e) {
    spdlog::warn("post-outage DC solve failed: {}", e.what());
    report.kind = ViolationKind::SlackInfeasible;
    return report;
  }
  for (BranchIndex i = 0; i < net.branch_count(); ++i) {
    const double rating = net.branches()[i].rating_mva;
    if (rating <= 0.0 || !sol.energized[net.from_index(i)]) continue;
    const double loading = std::abs(sol.flows_mw[i]) / rating * 100.0;
    if (loading > options.overflow_threshold_percent) report.overflows.push_back({i, sol.flows_mw[i], loading});
  }
  std::sort(report.overflows.begin(), report.overflows.end(), [&](const auto& a, const auto& b) {
    if (a.loading_percent != b.loading_percent) return a.loading_percent > b.loading_percent;
    return net.branch_key(a.branch) < net.branch_key(b.branch);
  });
  report.kind = report.overflows.empty() ? ViolationKind::None : ViolationKind::Overflow;
  return report;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(ra.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

// NLODF of every energized branch, empty entries elsewhere.
std::vector<std::optional<double>> step_nlodf(const Network& net, const LodfMatrix& lodf) {
  std::vector<std::optional<double>> values(net.branch_count());
  for (BranchIndex i = 0; i < net.branch_count(); ++i) {
    if (lodf.active[i]) values[i] = nlodf_metric(lodf, i);
  }
  return values;
}

}  // namespace

StabilityReport lodf_stability_report(const Network& net, std::span<const BranchIndex> sequence) {
  StabilityReport report;
  std::vector<std::vector<std::optional<double>>> raw;
  Network current = net;
  LodfMatrix lodf = compute_lodf(current);
  raw.push_back(step_nlodf(current, lodf));

  for (std::size_t step = 0; step < sequence.size(); ++step) {
    const BranchIndex b = sequence[step];
    if (b >= net.branch_count()) throw LookupError(fmt::format("branch index {} out of range", b));
    const auto name = net.branch_key(b).to_string();
    if (!lodf.active[b]) {
      report.notices.push_back(
          fmt::format("truncated before outage {}: branch {} is not energized", step + 1, name));
      break;
    }
    Network next = current.with_outages(std::array<BranchIndex, 1>{b});
    const IslandReport islands = detect_islands(next);
    std::size_t slack_component = 0;
    while (std::find(islands.slackless.begin(), islands.slackless.end(), slack_component) != islands.slackless.end()) {
      ++slack_component;
    }
    const auto& slack_comp = islands.components[slack_component];
    if (slack_comp.size() < 2) {
      report.notices.push_back(fmt::format("truncated at outage {}: {} isolates the slack bus", step + 1, name));
      break;
    }
    LodfMatrix next_lodf;
    try {
      next_lodf = compute_lodf(next);
    } catch (const SolveError& e) {
      report.notices.push_back(fmt::format("truncated at outage {}: {}", step + 1, e.what()));
      break;
    }
    std::size_t dropped = 0;
    for (BranchIndex i = 0; i < net.branch_count(); ++i) {
      if (lodf.active[i] && !next_lodf.active[i] && i != b) ++dropped;
    }
    if (dropped > 0 || !islands.slackless.empty()) {
      std::size_t isolated = 0;
      for (std::size_t c : islands.slackless) isolated += islands.components[c].size();
      report.notices.push_back(fmt::format("outage {} ({}) islands {} bus(es); {} further branch(es) leave the table",
                                           step + 1, name, isolated, dropped));
    }
    report.applied.push_back(b);
    current = std::move(next);
    lodf = std::move(next_lodf);
    raw.push_back(step_nlodf(current, lodf));
  }

  for (const auto& step : raw) {
    double max_value = 0.0;
    for (const auto& v : step) {
      if (v) max_value = std::max(max_value, *v);
    }
    std::vector<std::optional<double>> normalized(step.size());
    for (std::size_t i = 0; i < step.size(); ++i) {
      if (step[i]) normalized[i] = max_value > 0.0 ? *step[i] / max_value : 0.0;
    }
    report.values.push_back(std::move(normalized));
  }
  for (std::size_t s = 0; s + 1 < raw.size(); ++s) {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < raw[s].size(); ++i) {
      if (raw[s][i] && raw[s + 1][i]) {
        a.push_back(*raw[s][i]);
        b.push_back(*raw[s + 1][i]);
      }
    }
    report.rank_correlation.push_back(spearman(a, b));
  }
  return report;
}

}  // namespace gca
