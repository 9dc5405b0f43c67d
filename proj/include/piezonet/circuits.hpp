#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "piezonet/errors.hpp"
#include "piezonet/si_number.hpp"

namespace piezonet {

inline const std::string kGround = "gnd";

/// Series R-L branch. Positive current flows from `from` to `to`.
struct Branch {
  std::string name;
  std::string from;
  std::string to;
  double resistance = 0.0;  // ohm
  double inductance = 0.0;  // H

  bool grounded() const { return from == kGround || to == kGround; }
  bool operator==(const Branch&) const = default;
};

/// Interconnection network over named nodes; "gnd" is implicit.
struct Netlist {
  std::set<std::string> nodes;
  std::map<std::size_t, std::string> piezo;  // one-based patch index -> node
  std::vector<Branch> branches;

  bool operator==(const Netlist&) const = default;

  /// Checks every structural invariant for a network hosting `patch_count`
  /// patches. Throws ParameterError naming the first violation.
  void validate(std::size_t patch_count) const {
    if (nodes.count(kGround) != 0) throw ParameterError("'gnd' cannot be declared as a node");
    if (piezo.size() != patch_count || (patch_count > 0 && piezo.rbegin()->first != patch_count) ||
        (!piezo.empty() && piezo.begin()->first != 1)) {
      throw ParameterError("netlist attaches " + std::to_string(piezo.size()) +
                           " patches; expected indices 1.." + std::to_string(patch_count));
    }
    std::set<std::string> with_piezo;
    for (const auto& [index, node] : piezo) {
      if (nodes.count(node) == 0) {
        throw ParameterError("patch " + std::to_string(index) + " attached to unknown node '" +
                             node + "'");
      }
      with_piezo.insert(node);
    }
    std::set<std::string> names;
    std::set<std::string> touched;
    for (const Branch& b : branches) {
      if (!names.insert(b.name).second) throw ParameterError("duplicate branch '" + b.name + "'");
      for (const std::string* end : {&b.from, &b.to}) {
        if (*end != kGround && nodes.count(*end) == 0) {
          throw ParameterError("branch '" + b.name + "' references unknown node '" + *end + "'");
        }
        touched.insert(*end);
      }
      if (b.from == b.to) throw ParameterError("branch '" + b.name + "' is a self-loop");
      if (!(b.resistance >= 0.0)) throw ParameterError("branch '" + b.name + "' has R < 0");
      if (!(b.inductance > 0.0)) throw ParameterError("branch '" + b.name + "' has L <= 0");
    }
    for (const std::string& node : nodes) {
      if (with_piezo.count(node) == 0) {
        throw ParameterError("node '" + node + "' has no piezo attachment");
      }
      if (touched.count(node) == 0) {
        throw ParameterError("node '" + node + "' is not connected to any branch");
      }
    }
  }
};

/// Matrix form of a netlist. Nodes are ordered by name, branches by declaration.
struct NetworkMatrices {
  Eigen::MatrixXd incidence;   // P x B; +1 where the branch leaves, -1 where it enters
  Eigen::VectorXd resistance;  // B
  Eigen::VectorXd inductance;  // B
  std::vector<std::string> node_names;
  std::vector<std::string> branch_names;
  std::vector<std::size_t> patch_node;  // zero-based patch -> zero-based node row

  Eigen::Index node_count() const { return incidence.rows(); }
  Eigen::Index branch_count() const { return incidence.cols(); }

  Eigen::MatrixXd resistance_matrix() const { return resistance.asDiagonal(); }
  Eigen::MatrixXd inductance_matrix() const { return inductance.asDiagonal(); }

  /// B L^-1 B^T, the inductive node Laplacian.
  Eigen::MatrixXd laplacian() const {
    return incidence * inductance.cwiseInverse().asDiagonal() * incidence.transpose();
  }

  /// Inductances relative to the first branch; R_b = R * shape, L_b = L * shape.
  Eigen::VectorXd inductance_shape() const { return inductance / inductance(0); }

  bool has_grounded_branch() const {
    for (Eigen::Index b = 0; b < branch_count(); ++b) {
      if (std::abs(incidence.col(b).sum()) > 0.5) return true;
    }
    return false;
  }

  /// Same topology with R_b = r_scale * shape and L_b = l_scale * shape.
  NetworkMatrices rescaled(double r_scale, double l_scale) const {
    NetworkMatrices out = *this;
    const Eigen::VectorXd shape = inductance_shape();
    out.resistance = r_scale * shape;
    out.inductance = l_scale * shape;
    return out;
  }
};

namespace detail {

inline std::string indexed_name(std::string_view prefix, std::size_t index, std::size_t count) {
  std::string digits = std::to_string(index);
  const std::size_t width = std::to_string(count).size();
  return std::string(prefix) + std::string(width - digits.size(), '0') + digits;
}

inline void require_inductance(double inductance) {
  if (!(inductance > 0.0)) throw ParameterError("branch inductance must be positive");
}

inline void require_resistance(double resistance) {
  if (!(resistance >= 0.0)) throw ParameterError("branch resistance must be non-negative");
}

}  // namespace detail

/// All patches in parallel on node "bus", shunted to ground by one RL branch.
inline Netlist build_single_shunt(std::size_t count, double resistance, double inductance) {
  if (count < 1) throw ParameterError("single shunt needs at least one patch");
  detail::require_resistance(resistance);
  detail::require_inductance(inductance);
  Netlist net;
  net.nodes.insert("bus");
  for (std::size_t i = 1; i <= count; ++i) net.piezo[i] = "bus";
  net.branches.push_back({"shunt", "bus", kGround, resistance, inductance});
  return net;
}

/// One grounded RL branch per patch.
inline Netlist build_multi_shunt(std::size_t count, const std::vector<double>& resistance,
                                 const std::vector<double>& inductance) {
  if (count < 1) throw ParameterError("multi shunt needs at least one patch");
  auto expand = [count](const std::vector<double>& v, const char* what) {
    if (v.size() == 1) return std::vector<double>(count, v.front());
    if (v.size() != count) {
      throw ParameterError(std::string(what) + " list has " + std::to_string(v.size()) +
                           " entries for " + std::to_string(count) + " patches");
    }
    return v;
  };
  const std::vector<double> r = expand(resistance, "resistance");
  const std::vector<double> l = expand(inductance, "inductance");
  Netlist net;
  for (std::size_t i = 1; i <= count; ++i) {
    detail::require_resistance(r[i - 1]);
    detail::require_inductance(l[i - 1]);
    const std::string node = detail::indexed_name("n", i, count);
    net.nodes.insert(node);
    net.piezo[i] = node;
    net.branches.push_back({detail::indexed_name("b", i, count), node, kGround, r[i - 1], l[i - 1]});
  }
  return net;
}

inline Netlist build_multi_shunt(std::size_t count, double resistance, double inductance) {
  return build_multi_shunt(count, std::vector<double>{resistance}, std::vector<double>{inductance});
}

enum class Termination { none, both_ends };

/// Chain of patches joined by floating RL branches between neighbours.
/// With both_ends, the first and last nodes also get a grounded branch.
inline Netlist build_transmission_line(std::size_t count, double resistance, double inductance,
                                       Termination termination = Termination::none) {
  if (count < 2) throw ParameterError("transmission line needs at least two patches");
  detail::require_resistance(resistance);
  detail::require_inductance(inductance);
  Netlist net;
  for (std::size_t i = 1; i <= count; ++i) {
    const std::string node = detail::indexed_name("n", i, count);
    net.nodes.insert(node);
    net.piezo[i] = node;
  }
  for (std::size_t i = 1; i < count; ++i) {
    net.branches.push_back({detail::indexed_name("t", i, count),
                            detail::indexed_name("n", i, count),
                            detail::indexed_name("n", i + 1, count), resistance, inductance});
  }
  if (termination == Termination::both_ends) {
    net.branches.push_back(
        {"g_first", detail::indexed_name("n", 1, count), kGround, resistance, inductance});
    net.branches.push_back(
        {"g_last", detail::indexed_name("n", count, count), kGround, resistance, inductance});
  }
  return net;
}

enum class NetlistErrorKind {
  syntax,
  unknown_node,
  duplicate_branch,
  duplicate_piezo,
  nonpositive_inductance,
  negative_resistance,
  node_without_piezo,
  self_loop,
  isolated_node,
};

class NetlistParseError : public LineError {
 public:
  NetlistParseError(NetlistErrorKind kind, std::size_t line, const std::string& what)
      : LineError(line, what), kind_(kind) {}

  NetlistErrorKind kind() const noexcept { return kind_; }

 private:
  NetlistErrorKind kind_;
};

/// Parses the line-oriented netlist dialect:
///
///     # comment
///     piezo <index> <node>
///     branch <name> <nodeA> <nodeB> R=<ohms> L=<henries>
///     node <name>
///
/// Nodes are declared by `piezo` lines (or an explicit `node` line) anywhere in
/// the text; `gnd` is the ground. Numbers accept SI suffixes k, m, u, n.
inline Netlist parse_netlist(std::string_view text) {
  struct BranchLine {
    Branch branch;
    std::size_t line;
  };
  using Kind = NetlistErrorKind;

  Netlist net;
  std::map<std::string, std::size_t> declared_at;
  std::vector<BranchLine> branch_lines;
  std::set<std::string> branch_names;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (tok[0] == "piezo") {
      if (tok.size() != 3) throw NetlistParseError(Kind::syntax, line_no, "expected 'piezo <index> <node>'");
      std::size_t index = 0;
      const bool digits = !tok[1].empty() && std::all_of(tok[1].begin(), tok[1].end(),
                                                         [](char c) { return c >= '0' && c <= '9'; });
      if (digits && tok[1].size() < 10) index = std::stoul(tok[1]);
      if (index == 0) {
        throw NetlistParseError(Kind::syntax, line_no, "piezo index must be a positive integer");
      }
      if (tok[2] == kGround) {
        throw NetlistParseError(Kind::syntax, line_no, "piezo cannot attach to ground");
      }
      if (!net.piezo.emplace(index, tok[2]).second) {
        throw NetlistParseError(Kind::duplicate_piezo, line_no,
                                "duplicate attachment of piezo " + tok[1]);
      }
      declared_at.emplace(tok[2], line_no);
    } else if (tok[0] == "node") {
      if (tok.size() != 2) throw NetlistParseError(Kind::syntax, line_no, "expected 'node <name>'");
      if (tok[1] == kGround) throw NetlistParseError(Kind::syntax, line_no, "'gnd' is implicit");
      declared_at.emplace(tok[1], line_no);
    } else if (tok[0] == "branch") {
      if (tok.size() != 6) {
        throw NetlistParseError(Kind::syntax, line_no,
                                "expected 'branch <name> <nodeA> <nodeB> R=<ohms> L=<henries>'");
      }
      Branch b{tok[1], tok[2], tok[3], 0.0, 0.0};
      std::optional<double> r, l;
      for (std::size_t t = 4; t < 6; ++t) {
        const std::string& kv = tok[t];
        if (kv.size() < 3 || kv[1] != '=' || (kv[0] != 'R' && kv[0] != 'L')) {
          throw NetlistParseError(Kind::syntax, line_no, "expected R=<value> or L=<value>, got '" + kv + "'");
        }
        auto& slot = kv[0] == 'R' ? r : l;
        if (slot) throw NetlistParseError(Kind::syntax, line_no, std::string("repeated ") + kv[0] + "=");
        slot = parse_si_number(std::string_view(kv).substr(2));
        if (!slot) throw NetlistParseError(Kind::syntax, line_no, "malformed number in '" + kv + "'");
      }
      if (!r || !l) throw NetlistParseError(Kind::syntax, line_no, "branch needs both R= and L=");
      b.resistance = *r;
      b.inductance = *l;
      if (!branch_names.insert(b.name).second) {
        throw NetlistParseError(Kind::duplicate_branch, line_no, "duplicate branch name '" + b.name + "'");
      }
      if (b.from == b.to) {
        throw NetlistParseError(Kind::self_loop, line_no,
                                "self-loop branch '" + b.name + "' on node '" + b.from + "'");
      }
      if (!(b.inductance > 0.0)) {
        throw NetlistParseError(Kind::nonpositive_inductance, line_no,
                                "branch '" + b.name + "' needs L > 0");
      }
      if (!(b.resistance >= 0.0)) {
        throw NetlistParseError(Kind::negative_resistance, line_no,
                                "branch '" + b.name + "' needs R >= 0");
      }
      branch_lines.push_back({std::move(b), line_no});
    } else {
      throw NetlistParseError(Kind::syntax, line_no, "unknown directive '" + tok[0] + "'");
    }
  }

  std::set<std::string> touched;
  for (const BranchLine& bl : branch_lines) {
    for (const std::string* end : {&bl.branch.from, &bl.branch.to}) {
      if (*end != kGround && declared_at.count(*end) == 0) {
        throw NetlistParseError(Kind::unknown_node, bl.line,
                                "branch '" + bl.branch.name + "' references unknown node '" + *end + "'");
      }
      touched.insert(*end);
    }
    net.branches.push_back(bl.branch);
  }

  std::set<std::string> with_piezo;
  for (const auto& [index, node] : net.piezo) with_piezo.insert(node);
  for (const auto& [node, line] : declared_at) {
    if (with_piezo.count(node) == 0) {
      throw NetlistParseError(Kind::node_without_piezo, line, "node '" + node + "' has no piezo attachment");
    }
    if (touched.count(node) == 0) {
      throw NetlistParseError(Kind::isolated_node, line, "node '" + node + "' is not connected to any branch");
    }
    net.nodes.insert(node);
  }
  return net;
}

/// Writes `net` in the dialect read by parse_netlist.
inline std::string to_text(const Netlist& net) {
  std::ostringstream out;
  for (const auto& [index, node] : net.piezo) out << "piezo " << index << ' ' << node << '\n';
  char buf[64];
  for (const Branch& b : net.branches) {
    out << "branch " << b.name << ' ' << b.from << ' ' << b.to;
    std::snprintf(buf, sizeof buf, " R=%.17g", b.resistance);
    out << buf;
    std::snprintf(buf, sizeof buf, " L=%.17g", b.inductance);
    out << buf << '\n';
  }
  return out.str();
}

inline NetworkMatrices network_matrices(const Netlist& net, std::size_t patch_count) {
  net.validate(patch_count);
  NetworkMatrices nm;
  nm.node_names.assign(net.nodes.begin(), net.nodes.end());
  std::map<std::string, Eigen::Index> row;
  for (std::size_t p = 0; p < nm.node_names.size(); ++p) {
    row[nm.node_names[p]] = static_cast<Eigen::Index>(p);
  }
  const auto nodes = static_cast<Eigen::Index>(nm.node_names.size());
  const auto branches = static_cast<Eigen::Index>(net.branches.size());
  nm.incidence = Eigen::MatrixXd::Zero(nodes, branches);
  nm.resistance.resize(branches);
  nm.inductance.resize(branches);
  for (Eigen::Index b = 0; b < branches; ++b) {
    const Branch& br = net.branches[static_cast<std::size_t>(b)];
    if (br.from != kGround) nm.incidence(row.at(br.from), b) += 1.0;
    if (br.to != kGround) nm.incidence(row.at(br.to), b) -= 1.0;
    nm.resistance(b) = br.resistance;
    nm.inductance(b) = br.inductance;
    nm.branch_names.push_back(br.name);
  }
  nm.patch_node.resize(patch_count);
  for (const auto& [index, node] : net.piezo) {
    nm.patch_node[index - 1] = static_cast<std::size_t>(row.at(node));
  }
  return nm;
}

}  // namespace piezonet
