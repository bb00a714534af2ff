#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gca {

using BusIndex = std::size_t;
using BranchIndex = std::size_t;

enum class BusType { PQ = 1, PV = 2, Slack = 3 };

struct Bus {
  int id = 0;
  double base_kv = 1.0;
  BusType type = BusType::PQ;
  double load_mw = 0.0;

  bool operator==(const Bus&) const = default;
};

/// External identity of a branch: (from bus, to bus, circuit). Printed and
/// parsed as "from-to-circuit", e.g. "136-133-1".
struct BranchKey {
  int from = 0;
  int to = 0;
  std::string circuit;

  auto operator<=>(const BranchKey&) const = default;
  bool operator==(const BranchKey&) const = default;

  std::string to_string() const;
  static BranchKey parse(std::string_view text);
};

struct Branch {
  int from_bus = 0;
  int to_bus = 0;
  std::string circuit_id = "1";
  double reactance_pu = 0.0;
  double rating_mva = 0.0;  // 0 = no rating
  bool in_service = true;

  BranchKey key() const { return {from_bus, to_bus, circuit_id}; }
  bool operator==(const Branch&) const = default;
};

struct Generator {
  int bus = 0;
  double p_mw = 0.0;
  double p_max_mw = 0.0;
  bool in_service = true;

  bool operator==(const Generator&) const = default;
};

/// Immutable bus/branch/generator model. Internal bus and branch indices are
/// positions in the ordered collections; every accessor that takes an
/// external id throws LookupError when it does not resolve.
class Network {
 public:
  /// Validates every invariant and throws ValidationError naming the
  /// offending record.
  static Network create(std::vector<Bus> buses, std::vector<Branch> branches,
                        std::vector<Generator> generators, double base_mva = 100.0);

  std::span<const Bus> buses() const { return buses_; }
  std::span<const Branch> branches() const { return branches_; }
  std::span<const Generator> generators() const { return generators_; }
  double base_mva() const { return base_mva_; }

  std::size_t bus_count() const { return buses_.size(); }
  std::size_t branch_count() const { return branches_.size(); }

  BusIndex slack() const { return slack_; }
  std::optional<BusIndex> find_bus(int id) const;
  BusIndex bus_index(int id) const;

  std::optional<BranchIndex> find_branch(const BranchKey& key) const;
  BranchIndex branch_index(const BranchKey& key) const;
  BranchKey branch_key(BranchIndex i) const { return branches_.at(i).key(); }

  BusIndex from_index(BranchIndex i) const { return endpoints_.at(i).first; }
  BusIndex to_index(BranchIndex i) const { return endpoints_.at(i).second; }

  /// Scheduled generation minus load per bus, MW.
  std::vector<double> net_injection_mw() const;
  double load_mw(BusIndex b) const { return buses_.at(b).load_mw; }
  double generation_mw(BusIndex b) const { return generation_[b]; }

  /// Copy of this network with the given branches taken out of service.
  Network with_outages(std::span<const BranchIndex> outages) const;

  bool operator==(const Network& other) const;

 private:
  Network() = default;

  std::vector<Bus> buses_;
  std::vector<Branch> branches_;
  std::vector<Generator> generators_;
  double base_mva_ = 100.0;

  BusIndex slack_ = 0;
  std::map<int, BusIndex> bus_by_id_;
  std::map<BranchKey, BranchIndex> branch_by_key_;
  std::vector<std::pair<BusIndex, BusIndex>> endpoints_;
  std::vector<double> generation_;
};

/// Reads a MATPOWER version-2 case file (bus, gen and branch matrices).
Network load_case(const std::filesystem::path& path);
Network parse_case(std::string_view text, std::string_view source = "<memory>");

/// MATPOWER text that parse_case reads back into an identical Network.
std::string write_case(const Network& net);

/// Canonical JSON dump with sorted keys.
std::string dump_json(const Network& net);

/// Signed base-case DC flow per branch (MW, positive from -> to). Entries for
/// out-of-service branches are 0.
std::vector<double> pre_outage_flows(const Network& net);

}  // namespace gca
