#include "gca/network.hpp"

#include <charconv>
#include <cmath>
#include <cctype>

#include <fmt/format.h>

#include "gca/error.hpp"

namespace gca {

std::string BranchKey::to_string() const { return fmt::format("{}-{}-{}", from, to, circuit); }

BranchKey BranchKey::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto original = text;
  text = trim(text);
  auto parse_int = [&](std::string_view s) {
    int value = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || end != s.data() + s.size()) {
      throw ParseError(fmt::format("bad branch key '{}': expected from-to-circuit", original));
    }
    return value;
  };
  auto first = text.find('-');
  auto second = first == std::string_view::npos ? first : text.find('-', first + 1);
  if (first == std::string_view::npos || second == std::string_view::npos || second + 1 >= text.size()) {
    throw ParseError(fmt::format("bad branch key '{}': expected from-to-circuit", original));
  }
  return {parse_int(text.substr(0, first)), parse_int(text.substr(first + 1, second - first - 1)),
          std::string(text.substr(second + 1))};
}

Network Network::create(std::vector<Bus> buses, std::vector<Branch> branches,
                        std::vector<Generator> generators, double base_mva) {
  if (!(base_mva > 0.0) || !std::isfinite(base_mva)) {
    throw ValidationError(fmt::format("base MVA must be positive, got {}", base_mva));
  }
  Network net;
  net.base_mva_ = base_mva;

  std::optional<BusIndex> slack;
  for (BusIndex i = 0; i < buses.size(); ++i) {
    const Bus& b = buses[i];
    if (b.id <= 0) throw ValidationError(fmt::format("bus {}: id must be a positive integer", b.id));
    if (!(b.base_kv > 0.0)) throw ValidationError(fmt::format("bus {}: base kV must be positive", b.id));
    if (!std::isfinite(b.load_mw)) throw ValidationError(fmt::format("bus {}: load is not finite", b.id));
    if (!net.bus_by_id_.emplace(b.id, i).second) {
      throw ValidationError(fmt::format("bus {}: duplicate bus id", b.id));
    }
    if (b.type == BusType::Slack) {
      if (slack) {
        throw ValidationError(fmt::format("bus {}: second slack bus (bus {} is already slack)", b.id,
                                          buses[*slack].id));
      }
      slack = i;
    }
  }
  if (buses.empty()) throw ValidationError("network has no buses");
  if (!slack) throw ValidationError("network has no slack bus");
  net.slack_ = *slack;

  net.endpoints_.reserve(branches.size());
  for (BranchIndex i = 0; i < branches.size(); ++i) {
    const Branch& br = branches[i];
    const auto name = br.key().to_string();
    auto from = net.bus_by_id_.find(br.from_bus);
    auto to = net.bus_by_id_.find(br.to_bus);
    if (from == net.bus_by_id_.end()) {
      throw ValidationError(fmt::format("branch {}: from bus {} does not exist", name, br.from_bus));
    }
    if (to == net.bus_by_id_.end()) {
      throw ValidationError(fmt::format("branch {}: to bus {} does not exist", name, br.to_bus));
    }
    if (br.from_bus == br.to_bus) throw ValidationError(fmt::format("branch {}: from bus equals to bus", name));
    if (br.circuit_id.empty()) throw ValidationError(fmt::format("branch {}: empty circuit id", name));
    if (!(br.reactance_pu > 0.0) || !std::isfinite(br.reactance_pu)) {
      throw ValidationError(fmt::format("branch {}: reactance must be positive, got {}", name, br.reactance_pu));
    }
    if (!(br.rating_mva >= 0.0)) throw ValidationError(fmt::format("branch {}: negative rating", name));
    if (!net.branch_by_key_.emplace(br.key(), i).second) {
      throw ValidationError(fmt::format("branch {}: duplicate branch key", name));
    }
    net.endpoints_.emplace_back(from->second, to->second);
  }

  net.generation_.assign(buses.size(), 0.0);
  for (const Generator& g : generators) {
    auto bus = net.bus_by_id_.find(g.bus);
    if (bus == net.bus_by_id_.end()) {
      throw ValidationError(fmt::format("generator at bus {}: bus does not exist", g.bus));
    }
    if (!std::isfinite(g.p_mw) || g.p_mw > g.p_max_mw) {
      throw ValidationError(
          fmt::format("generator at bus {}: dispatch {} MW exceeds maximum {} MW", g.bus, g.p_mw, g.p_max_mw));
    }
    if (g.in_service) net.generation_[bus->second] += g.p_mw;
  }

  net.buses_ = std::move(buses);
  net.branches_ = std::move(branches);
  net.generators_ = std::move(generators);
  return net;
}

std::optional<BusIndex> Network::find_bus(int id) const {
  auto it = bus_by_id_.find(id);
  if (it == bus_by_id_.end()) return std::nullopt;
  return it->second;
}

BusIndex Network::bus_index(int id) const {
  if (auto b = find_bus(id)) return *b;
  throw LookupError(fmt::format("unknown bus {}", id));
}

std::optional<BranchIndex> Network::find_branch(const BranchKey& key) const {
  auto it = branch_by_key_.find(key);
  if (it == branch_by_key_.end()) return std::nullopt;
  return it->second;
}

BranchIndex Network::branch_index(const BranchKey& key) const {
  if (auto b = find_branch(key)) return *b;
  throw LookupError(fmt::format("unknown branch {}", key.to_string()));
}

std::vector<double> Network::net_injection_mw() const {
  std::vector<double> p(buses_.size());
  for (BusIndex b = 0; b < buses_.size(); ++b) p[b] = generation_[b] - buses_[b].load_mw;
  return p;
}

Network Network::with_outages(std::span<const BranchIndex> outages) const {
  Network copy = *this;
  for (BranchIndex i : outages) {
    if (i >= copy.branches_.size()) throw LookupError(fmt::format("branch index {} out of range", i));
    copy.branches_[i].in_service = false;
  }
  return copy;
}

bool Network::operator==(const Network& other) const {
  return base_mva_ == other.base_mva_ && buses_ == other.buses_ && branches_ == other.branches_ &&
         generators_ == other.generators_;
}

}  // namespace gca
