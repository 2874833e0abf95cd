#pragma once

// Relay-network representation: origins and destinations connected through
// logistic hubs, with arc travel times derived from a leg-length rule.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "relayplan/common.hpp"

namespace relayplan {

enum class NodeKind : char { Origin, Destination, Hub };

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Origin: return "origin";
    case NodeKind::Destination: return "destination";
    case NodeKind::Hub: return "hub";
  }
  return "?";
}

struct Node {
  int id = 0;
  NodeKind kind = NodeKind::Hub;
  double lat = 0.0;
  double lon = 0.0;
};

struct Arc {
  int from = 0;  // node id
  int to = 0;    // node id
  double base_travel_hours = 0.0;
  double miles = 0.0;
};

struct OdPair {
  int origin = 0;
  int dest = 0;
  double annual_demand = 0.0;
};

// Raw description before arc construction: nodes with coordinates, an
// optional explicit distance matrix (miles, indexed by node order; wins over
// coordinates when present), and the demand OD pairs.
struct NetworkSpec {
  std::vector<Node> nodes;
  std::vector<std::vector<double>> distances;
  std::vector<OdPair> od_pairs;
};

struct BuildOptions {
  double max_leg_hours = 5.5;
  double speed_mph = 50.0;
  bool allow_direct = false;
};

// Great-circle distance in statute miles.
inline double haversine_miles(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kEarthRadiusMiles = 3958.7613;
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  double dlat = (lat2 - lat1) * kDeg;
  double dlon = (lon2 - lon1) * kDeg;
  double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
             std::cos(lat1 * kDeg) * std::cos(lat2 * kDeg) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusMiles * std::asin(std::min(1.0, std::sqrt(a)));
}

class Network {
 public:
  std::vector<Node> nodes;
  std::vector<Arc> arcs;
  std::vector<OdPair> od_pairs;

  // Derived adjacency, arc indices per node index.
  std::vector<std::vector<int>> out_arcs;
  std::vector<std::vector<int>> in_arcs;

  int node_index(int id) const {
    auto it = id_to_index_.find(id);
    if (it == id_to_index_.end()) throw ArgumentError("unknown node id " + std::to_string(id));
    return it->second;
  }
  bool has_node(int id) const { return id_to_index_.count(id) > 0; }
  const Node& node_by_id(int id) const { return nodes[node_index(id)]; }
  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_arcs() const { return static_cast<int>(arcs.size()); }
  int num_od_pairs() const { return static_cast<int>(od_pairs.size()); }

  // Hub index: position of a hub among hub nodes in node order. Capacity and
  // cost tables are indexed this way.
  const std::vector<int>& hub_node_indices() const { return hub_node_indices_; }
  int num_hubs() const { return static_cast<int>(hub_node_indices_.size()); }
  int hub_index_of_node(int node_idx) const { return hub_index_of_node_[node_idx]; }  // -1 if not hub

  void rebuild_indices() {
    id_to_index_.clear();
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) id_to_index_[nodes[i].id] = i;
    out_arcs.assign(nodes.size(), {});
    in_arcs.assign(nodes.size(), {});
    for (int a = 0; a < static_cast<int>(arcs.size()); ++a) {
      out_arcs[node_index(arcs[a].from)].push_back(a);
      in_arcs[node_index(arcs[a].to)].push_back(a);
    }
    hub_node_indices_.clear();
    hub_index_of_node_.assign(nodes.size(), -1);
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
      if (nodes[i].kind == NodeKind::Hub) {
        hub_index_of_node_[i] = static_cast<int>(hub_node_indices_.size());
        hub_node_indices_.push_back(i);
      }
    }
  }

  bool path_exists(int from_id, int to_id) const {
    int s = node_index(from_id), t = node_index(to_id);
    std::vector<char> seen(nodes.size(), 0);
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      if (v == t) return true;
      for (int a : out_arcs[v]) {
        int w = node_index(arcs[a].to);
        if (!seen[w]) {
          seen[w] = 1;
          q.push(w);
        }
      }
    }
    return false;
  }

 private:
  std::map<int, int> id_to_index_;
  std::vector<int> hub_node_indices_;
  std::vector<int> hub_index_of_node_;
};

namespace detail {

inline bool arc_shape_allowed(NodeKind from, NodeKind to, bool allow_direct) {
  if (from == NodeKind::Origin && to == NodeKind::Hub) return true;
  if (from == NodeKind::Hub && to == NodeKind::Hub) return true;
  if (from == NodeKind::Hub && to == NodeKind::Destination) return true;
  if (allow_direct && from == NodeKind::Origin && to == NodeKind::Destination) return true;
  return false;
}

}  // namespace detail

// Builds the relay graph: an arc (i,j) is created for every permitted
// node-kind pair whose travel time distance/speed is within max_leg_hours.
// Hub-hub arcs come out in both directions since the rule is symmetric.
inline Network build_relay_network(const NetworkSpec& spec, const BuildOptions& opt) {
  if (opt.max_leg_hours <= 0) throw ArgumentError("max_leg_hours must be positive");
  if (opt.speed_mph <= 0) throw ArgumentError("speed_mph must be positive");

  Network net;
  net.nodes = spec.nodes;
  net.od_pairs = spec.od_pairs;

  const int n = static_cast<int>(spec.nodes.size());
  {
    std::map<int, int> seen;
    for (int i = 0; i < n; ++i) {
      if (!seen.emplace(spec.nodes[i].id, i).second)
        throw ValidationError("duplicate node id " + std::to_string(spec.nodes[i].id));
    }
  }
  const bool have_matrix = !spec.distances.empty();
  if (have_matrix) {
    if (static_cast<int>(spec.distances.size()) != n)
      throw ArgumentError("distance matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(spec.distances[i].size()) != n)
        throw ArgumentError("distance matrix row " + std::to_string(i) + " has wrong length");
      for (int j = 0; j < n; ++j) {
        if (spec.distances[i][j] < 0) throw ArgumentError("distances must be non-negative");
        if (std::abs(spec.distances[i][j] - spec.distances[j][i]) > 1e-9)
          throw ArgumentError("distance matrix must be symmetric");
      }
    }
  }

  auto dist = [&](int i, int j) {
    if (have_matrix) return spec.distances[i][j];
    return haversine_miles(spec.nodes[i].lat, spec.nodes[i].lon, spec.nodes[j].lat,
                           spec.nodes[j].lon);
  };

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!detail::arc_shape_allowed(spec.nodes[i].kind, spec.nodes[j].kind, opt.allow_direct))
        continue;
      double miles = dist(i, j);
      double hours = miles / opt.speed_mph;
      if (hours <= opt.max_leg_hours) {
        net.arcs.push_back({spec.nodes[i].id, spec.nodes[j].id, hours, miles});
      }
    }
  }

  net.rebuild_indices();

  for (const auto& od : net.od_pairs) {
    if (!net.has_node(od.origin) || !net.has_node(od.dest))
      throw ValidationError("od pair references unknown node " + std::to_string(od.origin) + "->" +
                            std::to_string(od.dest));
    if (!net.path_exists(od.origin, od.dest))
      throw ValidationError("no path " + std::to_string(od.origin) + "->" +
                            std::to_string(od.dest) +
                            " under the leg-length rule; widen max_leg_hours or adjust nodes");
  }
  return net;
}

// Structural diagnostics. Empty result means all network invariants hold.
inline std::vector<std::string> validate_network(const Network& net, bool allow_direct = false) {
  std::vector<std::string> diags;
  std::map<int, int> ids;
  for (const auto& nd : net.nodes) {
    if (!ids.emplace(nd.id, 1).second)
      diags.push_back("duplicate node id " + std::to_string(nd.id));
  }
  std::map<std::pair<int, int>, int> arc_seen;
  for (const auto& a : net.arcs) {
    if (!ids.count(a.from) || !ids.count(a.to)) {
      diags.push_back("arc references unknown node " + std::to_string(a.from) + "->" +
                      std::to_string(a.to));
      continue;
    }
    if (a.from == a.to) diags.push_back("self-loop at node " + std::to_string(a.from));
    if (a.base_travel_hours < 0)
      diags.push_back("negative travel time on arc " + std::to_string(a.from) + "->" +
                      std::to_string(a.to));
    if (a.miles < 0)
      diags.push_back("negative mileage on arc " + std::to_string(a.from) + "->" +
                      std::to_string(a.to));
    if (++arc_seen[{a.from, a.to}] == 2)
      diags.push_back("duplicate arc " + std::to_string(a.from) + "->" + std::to_string(a.to));
    NodeKind kf = net.node_by_id(a.from).kind;
    NodeKind kt = net.node_by_id(a.to).kind;
    if (!detail::arc_shape_allowed(kf, kt, allow_direct))
      diags.push_back("forbidden arc shape " + std::string(to_string(kf)) + "->" +
                      std::string(to_string(kt)) + " (" + std::to_string(a.from) + "->" +
                      std::to_string(a.to) + ")");
  }
  for (const auto& od : net.od_pairs) {
    if (!ids.count(od.origin) || !ids.count(od.dest)) {
      diags.push_back("od pair references unknown node");
      continue;
    }
    if (od.annual_demand < 0) diags.push_back("negative annual demand");
    if (!net.path_exists(od.origin, od.dest))
      diags.push_back("no path " + std::to_string(od.origin) + "->" + std::to_string(od.dest));
  }
  // Adjacency must round-trip to the identical arc list.
  std::vector<int> from_adj;
  for (int v = 0; v < net.num_nodes(); ++v)
    for (int a : net.out_arcs[v]) from_adj.push_back(a);
  std::sort(from_adj.begin(), from_adj.end());
  bool adj_ok = static_cast<int>(from_adj.size()) == net.num_arcs();
  for (int i = 0; adj_ok && i < net.num_arcs(); ++i) adj_ok = (from_adj[i] == i);
  if (!adj_ok) diags.push_back("adjacency is inconsistent with the arc list");
  return diags;
}

}  // namespace relayplan
