#include "mtmc/clustering.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "mtmc/error.hpp"

namespace mtmc {

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

std::vector<std::size_t> prune_edges(const Eigen::MatrixXd& probabilities) {
  if (probabilities.cols() != 2) throw Error("prune_edges: expected edges x 2 probabilities");
  std::vector<std::size_t> kept;
  for (Eigen::Index e = 0; e < probabilities.rows(); ++e) {
    if (probabilities(e, 1) > probabilities(e, 0)) kept.push_back(static_cast<std::size_t>(e));
  }
  return kept;
}

namespace {

// Groups `members` (global node ids) by connectivity through `edges` (global
// endpoints, all inside `members`). Clusters come out sorted internally and
// ordered by smallest member.
std::vector<std::vector<std::size_t>> components_of(std::span<const std::size_t> members,
                                                    std::span<const EdgeEndpoints> edges) {
  std::unordered_map<std::size_t, std::size_t> local;
  for (std::size_t i = 0; i < members.size(); ++i) local.emplace(members[i], i);
  UnionFind uf(members.size());
  for (const auto& e : edges) uf.unite(local.at(e.first), local.at(e.second));

  std::vector<std::size_t> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  std::unordered_map<std::size_t, std::size_t> root_to_cluster;
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t node : sorted) {
    const std::size_t root = uf.find(local.at(node));
    auto [it, inserted] = root_to_cluster.emplace(root, out.size());
    if (inserted) out.emplace_back();
    out[it->second].push_back(node);
  }
  return out;
}

void assign(ClusterSet& cs, std::size_t node_count) {
  std::sort(cs.clusters.begin(), cs.clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  cs.assignment.assign(node_count, 0);
  for (std::size_t c = 0; c < cs.clusters.size(); ++c) {
    for (std::size_t node : cs.clusters[c]) cs.assignment[node] = c;
  }
}

}  // namespace

ClusterSet connected_components(std::size_t node_count, std::span<const EdgeEndpoints> edges,
                                std::span<const double> probabilities) {
  if (!probabilities.empty() && probabilities.size() != edges.size()) {
    throw Error("connected_components: probabilities do not match edges");
  }
  for (const auto& e : edges) {
    if (e.first >= node_count || e.second >= node_count) {
      throw Error("connected_components: edge references unknown node");
    }
  }
  std::vector<std::size_t> all(node_count);
  std::iota(all.begin(), all.end(), std::size_t{0});
  ClusterSet cs;
  cs.clusters = components_of(all, edges);
  cs.kept_edges.assign(edges.begin(), edges.end());
  cs.kept_probability.assign(probabilities.begin(), probabilities.end());
  if (cs.kept_probability.empty()) cs.kept_probability.assign(edges.size(), 1.0);
  assign(cs, node_count);
  return cs;
}

bool cluster_is_valid(std::span<const std::size_t> members, std::span<const int> node_cameras,
                      int camera_count) {
  if (members.size() > static_cast<std::size_t>(camera_count)) return false;
  std::unordered_set<int> cams;
  for (std::size_t n : members) {
    if (!cams.insert(node_cameras[n]).second) return false;
  }
  return true;
}

ClusterSet refine_clusters(const ClusterSet& clusters, std::span<const int> node_cameras,
                           int camera_count) {
  if (node_cameras.size() != clusters.assignment.size()) {
    throw Error("refine_clusters: camera list does not match node count");
  }
  if (camera_count < 1) throw Error("refine_clusters: camera count must be positive");

  // Kept edges per cluster, weakest first; ties keep canonical order.
  std::vector<std::size_t> order(clusters.kept_edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (clusters.kept_probability[a] != clusters.kept_probability[b]) {
      return clusters.kept_probability[a] < clusters.kept_probability[b];
    }
    return clusters.kept_edges[a] < clusters.kept_edges[b];
  });
  std::vector<std::vector<std::size_t>> edges_of(clusters.clusters.size());
  for (std::size_t k : order) {
    edges_of[clusters.assignment[clusters.kept_edges[k].first]].push_back(k);
  }

  ClusterSet out;
  std::vector<bool> kept(clusters.kept_edges.size(), true);

  struct Work {
    std::vector<std::size_t> members;
    std::vector<std::size_t> edges;  // indices into kept_edges, weakest first
  };
  std::vector<Work> stack;
  for (std::size_t c = clusters.clusters.size(); c-- > 0;) {
    stack.push_back({clusters.clusters[c], std::move(edges_of[c])});
  }
  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();
    if (cluster_is_valid(w.members, node_cameras, camera_count)) {
      out.clusters.push_back(std::move(w.members));
      continue;
    }
    // A violating cluster has at least two nodes, hence at least one edge.
    kept[w.edges.front()] = false;
    w.edges.erase(w.edges.begin());
    std::vector<EdgeEndpoints> remaining;
    remaining.reserve(w.edges.size());
    for (std::size_t k : w.edges) remaining.push_back(clusters.kept_edges[k]);
    auto parts = components_of(w.members, remaining);
    if (parts.size() == 1) {
      stack.push_back({std::move(parts.front()), std::move(w.edges)});
      continue;
    }
    std::unordered_map<std::size_t, std::size_t> part_of;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      for (std::size_t node : parts[p]) part_of.emplace(node, p);
    }
    std::vector<std::vector<std::size_t>> part_edges(parts.size());
    for (std::size_t k : w.edges) part_edges[part_of.at(clusters.kept_edges[k].first)].push_back(k);
    for (std::size_t p = parts.size(); p-- > 0;) {
      stack.push_back({std::move(parts[p]), std::move(part_edges[p])});
    }
  }

  for (std::size_t k = 0; k < clusters.kept_edges.size(); ++k) {
    if (!kept[k]) continue;
    out.kept_edges.push_back(clusters.kept_edges[k]);
    out.kept_probability.push_back(clusters.kept_probability[k]);
  }
  assign(out, clusters.assignment.size());
  return out;
}

}  // namespace mtmc
