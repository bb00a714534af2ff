#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "gca/error.hpp"
#include "gca/network.hpp"

namespace gca {
namespace {

// MATPOWER column positions (0-based).
namespace col {
constexpr std::size_t kBusId = 0, kBusType = 1, kBusPd = 2, kBusBaseKv = 9;
constexpr std::size_t kGenBus = 0, kGenPg = 1, kGenStatus = 7, kGenPmax = 8;
constexpr std::size_t kBrFrom = 0, kBrTo = 1, kBrX = 3, kBrRateA = 5, kBrStatus = 10;
constexpr std::size_t kBusMin = 13, kGenMin = 10, kBranchMin = 13;
}  // namespace col

using Matrix = std::vector<std::vector<double>>;

struct RawCase {
  std::map<std::string, Matrix> matrices;
  std::map<std::string, std::vector<std::string>> cells;
  std::map<std::string, std::string> scalars;
};

// Drops '%' comments that are not inside single-quoted strings.
std::string strip_comments(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_quote = false;
  bool in_comment = false;
  for (char c : text) {
    if (c == '\n') {
      in_comment = false;
      in_quote = false;
      out.push_back(c);
      continue;
    }
    if (in_comment) continue;
    if (c == '\'') in_quote = !in_quote;
    if (c == '%' && !in_quote) {
      in_comment = true;
      continue;
    }
    out.push_back(c);
  }
  return out;
}

std::size_t find_closing(const std::string& s, std::size_t open, char close, std::string_view source,
                         const std::string& name) {
  auto end = s.find(close, open + 1);
  if (end == std::string::npos) {
    throw ParseError(fmt::format("{}: mpc.{}: missing closing '{}'", source, name, close));
  }
  return end;
}

double parse_number(std::string_view token, std::string_view source, const std::string& name, std::size_t row) {
  std::string buf(token);
  if (buf == "Inf" || buf == "inf") return HUGE_VAL;
  if (buf == "-Inf" || buf == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || errno == ERANGE) {
    throw ParseError(fmt::format("{}: mpc.{} row {}: '{}' is not a number", source, name, row, token));
  }
  return v;
}

Matrix parse_matrix(std::string_view body, std::string_view source, const std::string& name) {
  Matrix rows;
  std::size_t start = 0;
  auto flush_row = [&](std::string_view row_text) {
    std::vector<double> row;
    std::size_t i = 0;
    while (i < row_text.size()) {
      while (i < row_text.size() && (std::isspace(static_cast<unsigned char>(row_text[i])) || row_text[i] == ',')) ++i;
      std::size_t j = i;
      while (j < row_text.size() && !std::isspace(static_cast<unsigned char>(row_text[j])) && row_text[j] != ',') ++j;
      if (j > i) row.push_back(parse_number(row_text.substr(i, j - i), source, name, rows.size() + 1));
      i = j;
    }
    if (row.empty()) return;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(fmt::format("{}: mpc.{} row {}: {} columns, expected {}", source, name, rows.size() + 1,
                                   row.size(), rows.front().size()));
    }
    rows.push_back(std::move(row));
  };
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i == body.size() || body[i] == ';' || body[i] == '\n') {
      flush_row(body.substr(start, i - start));
      start = i + 1;
    }
  }
  return rows;
}

std::vector<std::string> parse_cell(std::string_view body) {
  std::vector<std::string> items;
  std::size_t i = 0;
  while ((i = body.find('\'', i)) != std::string_view::npos) {
    auto end = body.find('\'', i + 1);
    if (end == std::string_view::npos) break;
    items.emplace_back(body.substr(i + 1, end - i - 1));
    i = end + 1;
  }
  return items;
}

RawCase scan(std::string_view text, std::string_view source) {
  const std::string s = strip_comments(text);
  RawCase raw;
  std::size_t pos = 0;
  while ((pos = s.find("mpc.", pos)) != std::string::npos) {
    std::size_t p = pos + 4;
    std::size_t name_end = p;
    while (name_end < s.size() && (std::isalnum(static_cast<unsigned char>(s[name_end])) || s[name_end] == '_')) {
      ++name_end;
    }
    std::string name = s.substr(p, name_end - p);
    p = name_end;
    while (p < s.size() && (s[p] == ' ' || s[p] == '\t')) ++p;
    if (name.empty() || p >= s.size() || s[p] != '=') {
      pos = p;
      continue;
    }
    ++p;
    while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p]))) ++p;
    if (p < s.size() && s[p] == '[') {
      auto end = find_closing(s, p, ']', source, name);
      raw.matrices[name] = parse_matrix(std::string_view(s).substr(p + 1, end - p - 1), source, name);
      pos = end + 1;
    } else if (p < s.size() && s[p] == '{') {
      auto end = find_closing(s, p, '}', source, name);
      raw.cells[name] = parse_cell(std::string_view(s).substr(p + 1, end - p - 1));
      pos = end + 1;
    } else {
      auto end = s.find_first_of(";\n", p);
      if (end == std::string::npos) end = s.size();
      std::string value = s.substr(p, end - p);
      while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back()))) value.pop_back();
      raw.scalars[name] = value;
      pos = end;
    }
  }
  return raw;
}

const Matrix& require_table(const RawCase& raw, const std::string& name, std::size_t min_cols,
                            std::string_view source) {
  auto it = raw.matrices.find(name);
  if (it == raw.matrices.end()) throw ParseError(fmt::format("{}: missing mpc.{} table", source, name));
  if (!it->second.empty() && it->second.front().size() < min_cols) {
    throw ParseError(fmt::format("{}: mpc.{} has {} columns, need at least {}", source, name,
                                 it->second.front().size(), min_cols));
  }
  return it->second;
}

int as_id(double v, std::string_view source, std::string_view what, std::size_t row) {
  if (v != std::floor(v) || v < 1 || v > 2e9) {
    throw ParseError(fmt::format("{}: {} row {}: bus number {} is not a positive integer", source, what, row, v));
  }
  return static_cast<int>(v);
}

}  // namespace

Network parse_case(std::string_view text, std::string_view source) {
  const RawCase raw = scan(text, source);

  if (auto v = raw.scalars.find("version"); v != raw.scalars.end() && v->second != "'2'" && v->second != "2") {
    throw ParseError(fmt::format("{}: unsupported case format version {}", source, v->second));
  }
  double base_mva = 100.0;
  if (auto b = raw.scalars.find("baseMVA"); b != raw.scalars.end()) {
    base_mva = parse_number(b->second, source, "baseMVA", 1);
  }

  std::vector<Bus> buses;
  const Matrix& bus_rows = require_table(raw, "bus", col::kBusMin, source);
  for (std::size_t r = 0; r < bus_rows.size(); ++r) {
    const auto& row = bus_rows[r];
    Bus b;
    b.id = as_id(row[col::kBusId], source, "mpc.bus", r + 1);
    const double type = row[col::kBusType];
    if (type == 1) {
      b.type = BusType::PQ;
    } else if (type == 2) {
      b.type = BusType::PV;
    } else if (type == 3) {
      b.type = BusType::Slack;
    } else {
      throw ParseError(fmt::format("{}: mpc.bus row {} (bus {}): unsupported bus type {}", source, r + 1, b.id, type));
    }
    b.load_mw = row[col::kBusPd];
    b.base_kv = row[col::kBusBaseKv];
    buses.push_back(b);
  }

  std::vector<Generator> gens;
  const Matrix& gen_rows = require_table(raw, "gen", col::kGenMin, source);
  for (std::size_t r = 0; r < gen_rows.size(); ++r) {
    const auto& row = gen_rows[r];
    gens.push_back({as_id(row[col::kGenBus], source, "mpc.gen", r + 1), row[col::kGenPg], row[col::kGenPmax],
                    row[col::kGenStatus] > 0});
  }

  std::vector<Branch> branches;
  const Matrix& branch_rows = require_table(raw, "branch", col::kBranchMin, source);
  const auto circuits = raw.cells.find("branch_circuit");
  if (circuits != raw.cells.end() && circuits->second.size() != branch_rows.size()) {
    throw ParseError(fmt::format("{}: mpc.branch_circuit has {} entries for {} branches", source,
                                 circuits->second.size(), branch_rows.size()));
  }
  std::map<std::pair<int, int>, int> parallel_count;
  for (std::size_t r = 0; r < branch_rows.size(); ++r) {
    const auto& row = branch_rows[r];
    Branch br;
    br.from_bus = as_id(row[col::kBrFrom], source, "mpc.branch", r + 1);
    br.to_bus = as_id(row[col::kBrTo], source, "mpc.branch", r + 1);
    if (circuits != raw.cells.end()) {
      br.circuit_id = circuits->second[r];
    } else {
      // n-th branch between the same two buses (either orientation) is circuit n.
      auto pair = std::minmax(br.from_bus, br.to_bus);
      br.circuit_id = std::to_string(++parallel_count[{pair.first, pair.second}]);
    }
    br.reactance_pu = row[col::kBrX];
    br.rating_mva = row[col::kBrRateA];
    br.in_service = row[col::kBrStatus] > 0;
    branches.push_back(std::move(br));
  }

  try {
    return Network::create(std::move(buses), std::move(branches), std::move(gens), base_mva);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", source, e.what()));
  }
}

Network load_case(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open case file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_case(buf.str(), path.string());
}

std::string write_case(const Network& net) {
  std::string out;
  auto emit = [&out]<typename... Args>(fmt::format_string<Args...> f, Args&&... args) {
    fmt::format_to(std::back_inserter(out), f, std::forward<Args>(args)...);
  };
  emit("function mpc = gca_case\n");
  emit("mpc.version = '2';\n");
  emit("mpc.baseMVA = {};\n\n", net.base_mva());

  emit("%% bus_i type Pd Qd Gs Bs area Vm Va baseKV zone Vmax Vmin\nmpc.bus = [\n");
  for (const Bus& b : net.buses()) {
    emit("\t{}\t{}\t{}\t0\t0\t0\t1\t1\t0\t{}\t1\t1.1\t0.9;\n", b.id, static_cast<int>(b.type), b.load_mw, b.base_kv);
  }
  emit("];\n\n%% bus Pg Qg Qmax Qmin Vg mBase status Pmax Pmin\nmpc.gen = [\n");
  for (const Generator& g : net.generators()) {
    emit("\t{}\t{}\t0\t0\t0\t1\t{}\t{}\t{}\t0;\n", g.bus, g.p_mw, net.base_mva(), g.in_service ? 1 : 0, g.p_max_mw);
  }
  emit("];\n\n%% fbus tbus r x b rateA rateB rateC ratio angle status angmin angmax\nmpc.branch = [\n");
  bool default_circuits = true;
  std::map<std::pair<int, int>, int> parallel_count;
  for (const Branch& br : net.branches()) {
    auto pair = std::minmax(br.from_bus, br.to_bus);
    if (br.circuit_id != std::to_string(++parallel_count[{pair.first, pair.second}])) default_circuits = false;
    emit("\t{}\t{}\t0\t{}\t0\t{}\t{}\t{}\t0\t0\t{}\t-360\t360;\n", br.from_bus, br.to_bus, br.reactance_pu,
         br.rating_mva, br.rating_mva, br.rating_mva, br.in_service ? 1 : 0);
  }
  emit("];\n");
  if (!default_circuits) {
    emit("\nmpc.branch_circuit = {{\n");
    for (const Branch& br : net.branches()) emit("\t'{}';\n", br.circuit_id);
    emit("}};\n");
  }
  return out;
}

std::string dump_json(const Network& net) {
  using nlohmann::json;
  auto type_name = [](BusType t) {
    switch (t) {
      case BusType::PQ: return "PQ";
      case BusType::PV: return "PV";
      case BusType::Slack: return "slack";
    }
    return "PQ";
  };
  json doc;
  doc["base_mva"] = net.base_mva();
  doc["slack_bus"] = net.buses()[net.slack()].id;
  json buses = json::array();
  for (const Bus& b : net.buses()) {
    buses.push_back({{"id", b.id}, {"base_kv", b.base_kv}, {"type", type_name(b.type)}, {"load_mw", b.load_mw}});
  }
  json branches = json::array();
  for (const Branch& br : net.branches()) {
    branches.push_back({{"key", br.key().to_string()},
                        {"from_bus", br.from_bus},
                        {"to_bus", br.to_bus},
                        {"circuit_id", br.circuit_id},
                        {"reactance_pu", br.reactance_pu},
                        {"rating_mva", br.rating_mva},
                        {"in_service", br.in_service}});
  }
  json gens = json::array();
  for (const Generator& g : net.generators()) {
    gens.push_back({{"bus", g.bus}, {"p_mw", g.p_mw}, {"p_max_mw", g.p_max_mw}, {"in_service", g.in_service}});
  }
  doc["buses"] = std::move(buses);
  doc["branches"] = std::move(branches);
  doc["generators"] = std::move(gens);
  return doc.dump(2) + "\n";
}

}  // namespace gca
