#include "powsim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "powsim/rng.hpp"

namespace powsim {

const char* node_class_name(NodeClass c) {
    switch (c) {
        case NodeClass::Miner: return "miner";
        case NodeClass::HomeFullNode: return "hfn";
        case NodeClass::SpvClient: return "spv";
    }
    return "unknown";
}

NodeClass node_class_from_name(const std::string& name) {
    if (name == "miner") return NodeClass::Miner;
    if (name == "hfn") return NodeClass::HomeFullNode;
    if (name == "spv") return NodeClass::SpvClient;
    throw InvalidArgument("unknown node class: " + name);
}

bool NetworkGraph::has_edge(std::uint32_t u, std::uint32_t v) const {
    if (u > v) std::swap(u, v);
    Edge probe{u, v, 1};
    auto it = std::lower_bound(edges.begin(), edges.end(), probe,
                               [](const Edge& a, const Edge& b) {
                                   return a.u != b.u ? a.u < b.u : a.v < b.v;
                               });
    return it != edges.end() && it->u == u && it->v == v;
}

std::uint32_t NetworkGraph::degree(std::uint32_t v) const {
    std::uint32_t d = 0;
    for (const Edge& e : edges)
        if (e.u == v || e.v == v) ++d;
    return d;
}

std::vector<std::vector<std::uint32_t>> NetworkGraph::adjacency() const {
    std::vector<std::vector<std::uint32_t>> adj(node_count);
    for (const Edge& e : edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    return adj;
}

std::vector<std::uint32_t> NetworkGraph::miner_ids() const {
    return nodes_of_class(NodeClass::Miner);
}

std::vector<std::uint32_t> NetworkGraph::nodes_of_class(NodeClass c) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < node_count; ++i)
        if (roles[i].kind == c) out.push_back(i);
    return out;
}

void NetworkGraph::add_edge(std::uint32_t u, std::uint32_t v, std::uint32_t latency) {
    if (u == v) throw InvalidArgument("self-loop edge");
    if (u > v) std::swap(u, v);
    edges.push_back(Edge{u, v, latency});
}

void NetworkGraph::normalize() {
    for (Edge& e : edges)
        if (e.u > e.v) std::swap(e.u, e.v);
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    validate();
}

void NetworkGraph::validate() const {
    if (roles.size() != node_count)
        throw InvalidArgument("role map must be total over node ids");
    double share_sum = 0.0;
    bool any_miner = false;
    for (const NodeRole& r : roles) {
        if (r.kind == NodeClass::Miner) {
            any_miner = true;
            share_sum += r.hashrate_share;
        }
    }
    if (any_miner && std::abs(share_sum - 1.0) > 1e-9)
        throw InvalidArgument("miner hashrate shares must sum to 1");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        if (e.u >= node_count || e.v >= node_count)
            throw InvalidArgument("edge endpoint out of range");
        if (e.u == e.v) throw InvalidArgument("self-loop edge");
        if (e.u > e.v) throw InvalidArgument("edge not normalized");
        if (e.latency < 1) throw InvalidArgument("edge latency must be >= 1 tick");
        if (i > 0 && edges[i - 1].u == e.u && edges[i - 1].v == e.v)
            throw InvalidArgument("duplicate edge");
    }
}

namespace {

std::vector<std::uint32_t> all_nodes(const NetworkGraph& g) {
    std::vector<std::uint32_t> v(g.node_count);
    for (std::uint32_t i = 0; i < g.node_count; ++i) v[i] = i;
    return v;
}

// BFS hop distances inside the induced subgraph.
std::vector<std::uint32_t> bfs_hops(const std::vector<std::vector<std::uint32_t>>& adj,
                                    const std::vector<char>& member, std::uint32_t src) {
    constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> dist(adj.size(), kUnreached);
    std::deque<std::uint32_t> q;
    dist[src] = 0;
    q.push_back(src);
    while (!q.empty()) {
        std::uint32_t cur = q.front();
        q.pop_front();
        for (std::uint32_t nb : adj[cur]) {
            if (!member[nb] || dist[nb] != kUnreached) continue;
            dist[nb] = dist[cur] + 1;
            q.push_back(nb);
        }
    }
    return dist;
}

std::vector<char> membership(const NetworkGraph& g,
                             const std::vector<std::uint32_t>* restrict_to) {
    std::vector<char> member(g.node_count, restrict_to == nullptr ? 1 : 0);
    if (restrict_to) {
        for (std::uint32_t v : *restrict_to) {
            if (v >= g.node_count) throw InvalidArgument("restrict_to node out of range");
            member[v] = 1;
        }
    }
    return member;
}

} // namespace

std::vector<std::vector<std::uint32_t>> connected_components(
    const NetworkGraph& graph, const std::vector<std::uint32_t>* restrict_to) {
    auto member = membership(graph, restrict_to);
    auto adj = graph.adjacency();
    std::vector<char> seen(graph.node_count, 0);
    std::vector<std::vector<std::uint32_t>> comps;
    for (std::uint32_t start = 0; start < graph.node_count; ++start) {
        if (!member[start] || seen[start]) continue;
        std::vector<std::uint32_t> comp;
        std::deque<std::uint32_t> q{start};
        seen[start] = 1;
        while (!q.empty()) {
            std::uint32_t cur = q.front();
            q.pop_front();
            comp.push_back(cur);
            for (std::uint32_t nb : adj[cur]) {
                if (!member[nb] || seen[nb]) continue;
                seen[nb] = 1;
                q.push_back(nb);
            }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

bool is_connected(const NetworkGraph& graph,
                  const std::vector<std::uint32_t>* restrict_to) {
    return connected_components(graph, restrict_to).size() <= 1;
}

NetworkGraph generate_watts_strogatz(std::uint32_t n, std::uint32_t k, double beta,
                                     std::uint64_t seed) {
    if (k < 2 || k % 2 != 0) throw InvalidArgument("k must be even and >= 2");
    if (k >= n) throw InvalidArgument("require n > k");
    if (beta < 0.0 || beta > 1.0) throw InvalidArgument("beta must be in [0,1]");

    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
        Rng rng(seed, RngStream::Topology, attempt);
        NetworkGraph g;
        g.node_count = n;
        g.roles.assign(n, NodeRole{});
        g.ws_k = k;
        g.ws_beta = beta;
        g.ws_seed = seed;

        // Ring lattice: i connects clockwise to i+1 .. i+k/2.
        std::set<std::pair<std::uint32_t, std::uint32_t>> present;
        auto norm = [](std::uint32_t a, std::uint32_t b) {
            return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        };
        std::vector<std::pair<std::uint32_t, std::uint32_t>> lattice;
        for (std::uint32_t i = 0; i < n; ++i) {
            for (std::uint32_t j = 1; j <= k / 2; ++j) {
                auto e = norm(i, (i + j) % n);
                lattice.push_back(e);
                present.insert(e);
            }
        }

        // Rewire each clockwise edge with probability beta; the edge keeps its
        // source endpoint and count is preserved.
        for (auto& e : lattice) {
            if (beta <= 0.0 || !rng.bernoulli(beta)) continue;
            std::uint32_t src = e.first;
            // Give up rewiring this edge if the node is near-saturated.
            std::uint32_t guard = 0;
            while (guard++ < 4 * n) {
                std::uint32_t target = static_cast<std::uint32_t>(rng.uniform_u64(n));
                if (target == src) continue;
                auto cand = norm(src, target);
                if (present.count(cand)) continue;
                present.erase(e);
                present.insert(cand);
                e = cand;
                break;
            }
        }

        for (auto& e : present) g.edges.push_back(Edge{e.first, e.second, 1});
        g.normalize();
        if (is_connected(g)) return g;
    }
    throw InvalidArgument("watts-strogatz output disconnected after 100 rewiring retries");
}

NetworkGraph assign_roles(const NetworkGraph& graph, std::uint32_t miner_count,
                          double spv_fraction, std::uint32_t core_extra_edges,
                          std::uint64_t seed, std::uint32_t lat_min,
                          std::uint32_t lat_max) {
    const std::uint32_t n = graph.node_count;
    if (miner_count < 1) throw InvalidArgument("miner_count must be >= 1");
    if (spv_fraction < 0.0 || spv_fraction > 1.0)
        throw InvalidArgument("spv_fraction must be in [0,1]");
    const auto spv_count =
        static_cast<std::uint32_t>(std::ceil(spv_fraction * static_cast<double>(n)));
    if (miner_count + spv_count > n)
        throw InvalidArgument("miner_count + ceil(spv_fraction*n) exceeds node count");
    if (lat_min < 1 || lat_max < lat_min)
        throw InvalidArgument("require 1 <= lat_min <= lat_max");

    Rng rng(seed, RngStream::RoleAssignment);
    NetworkGraph g = graph;

    // Seeded shuffle fixes miners, then SPV clients, then home nodes.
    std::vector<std::uint32_t> order = all_nodes(g);
    for (std::uint32_t i = n - 1; i > 0; --i) {
        auto j = static_cast<std::uint32_t>(rng.uniform_u64(i + 1));
        std::swap(order[i], order[j]);
    }
    std::vector<std::uint32_t> miners(order.begin(), order.begin() + miner_count);
    std::sort(miners.begin(), miners.end());

    for (std::uint32_t i = 0; i < n; ++i) g.roles[i] = NodeRole{NodeClass::HomeFullNode, 0.0};
    for (std::uint32_t m : miners)
        g.roles[m] = NodeRole{NodeClass::Miner, 1.0 / static_cast<double>(miner_count)};
    for (std::uint32_t i = 0; i < spv_count; ++i)
        g.roles[order[miner_count + i]] = NodeRole{NodeClass::SpvClient, 0.0};

    // Densify the miner core: connect it, then add core_extra_edges more
    // random intra-miner edges (or stop at the complete core).
    if (miner_count > 1) {
        auto comps = connected_components(g, &miners);
        while (comps.size() > 1) {
            const auto& a = comps[rng.uniform_u64(comps.size())];
            const std::vector<std::uint32_t>* b = nullptr;
            do {
                b = &comps[rng.uniform_u64(comps.size())];
            } while (b == &a);
            std::uint32_t u = a[rng.uniform_u64(a.size())];
            std::uint32_t v = (*b)[rng.uniform_u64(b->size())];
            g.add_edge(u, v, 1);
            g.normalize();
            comps = connected_components(g, &miners);
        }
        const std::uint64_t complete =
            static_cast<std::uint64_t>(miner_count) * (miner_count - 1) / 2;
        std::uint32_t added = 0;
        while (added < core_extra_edges) {
            std::uint64_t existing = 0;
            for (const Edge& e : g.edges)
                if (g.roles[e.u].kind == NodeClass::Miner &&
                    g.roles[e.v].kind == NodeClass::Miner)
                    ++existing;
            if (existing >= complete) break;
            std::uint32_t u = miners[rng.uniform_u64(miners.size())];
            std::uint32_t v = miners[rng.uniform_u64(miners.size())];
            if (u == v || g.has_edge(u, v)) continue;
            g.add_edge(u, v, 1);
            g.normalize();
            ++added;
        }
    }
    if (!is_connected(g, &miners))
        throw InvalidArgument("miner subgraph could not be made connected");

    // Latency: miner-miner edges run at 1 tick, everything else draws from
    // [lat_min, lat_max].
    for (Edge& e : g.edges) {
        const bool core = g.roles[e.u].kind == NodeClass::Miner &&
                          g.roles[e.v].kind == NodeClass::Miner;
        if (core)
            e.latency = 1;
        else
            e.latency = static_cast<std::uint32_t>(rng.uniform_range(lat_min, lat_max));
    }
    g.validate();
    return g;
}

NetworkGraph add_peripheral_node(const NetworkGraph& graph, std::uint32_t attach_to,
                                 NodeClass role, std::uint32_t latency) {
    if (attach_to >= graph.node_count) throw InvalidArgument("attach_to out of range");
    NetworkGraph g = graph;
    const std::uint32_t id = g.node_count;
    g.node_count += 1;
    g.roles.push_back(NodeRole{role, 0.0});
    g.add_edge(attach_to, id, latency);
    g.normalize();
    return g;
}

NetworkGraph add_isolated_nodes(const NetworkGraph& graph, std::uint32_t count,
                                NodeClass role) {
    NetworkGraph g = graph;
    g.node_count += count;
    for (std::uint32_t i = 0; i < count; ++i) g.roles.push_back(NodeRole{role, 0.0});
    g.validate();
    return g;
}

namespace {

void require_connected(const NetworkGraph& g,
                       const std::vector<std::uint32_t>* restrict_to) {
    auto comps = connected_components(g, restrict_to);
    if (comps.size() > 1) {
        std::ostringstream msg;
        msg << "graph has " << comps.size() << " components:";
        for (const auto& c : comps) {
            msg << " {";
            for (std::size_t i = 0; i < c.size(); ++i) msg << (i ? "," : "") << c[i];
            msg << "}";
        }
        throw DisconnectedGraph(msg.str(), std::move(comps));
    }
}

} // namespace

std::uint32_t diameter(const NetworkGraph& graph,
                       const std::vector<std::uint32_t>* restrict_to) {
    require_connected(graph, restrict_to);
    auto member = membership(graph, restrict_to);
    auto adj = graph.adjacency();
    std::uint32_t best = 0;
    for (std::uint32_t v = 0; v < graph.node_count; ++v) {
        if (!member[v]) continue;
        auto dist = bfs_hops(adj, member, v);
        for (std::uint32_t u = 0; u < graph.node_count; ++u)
            if (member[u] && dist[u] != std::numeric_limits<std::uint32_t>::max())
                best = std::max(best, dist[u]);
    }
    return best;
}

std::uint32_t effective_diameter(const NetworkGraph& graph, double epsilon,
                                 const std::vector<std::uint32_t>* restrict_to) {
    if (epsilon < 0.0 || epsilon >= 1.0)
        throw InvalidArgument("epsilon must be in [0,1)");
    require_connected(graph, restrict_to);
    auto member = membership(graph, restrict_to);
    auto adj = graph.adjacency();

    std::vector<std::uint64_t> pairs_at_distance;
    std::uint64_t total_pairs = 0;
    for (std::uint32_t v = 0; v < graph.node_count; ++v) {
        if (!member[v]) continue;
        auto dist = bfs_hops(adj, member, v);
        for (std::uint32_t u = v + 1; u < graph.node_count; ++u) {
            if (!member[u]) continue;
            std::uint32_t d = dist[u];
            if (pairs_at_distance.size() <= d) pairs_at_distance.resize(d + 1, 0);
            ++pairs_at_distance[d];
            ++total_pairs;
        }
    }
    if (total_pairs == 0) return 0;

    const double needed = (1.0 - epsilon) * static_cast<double>(total_pairs);
    std::uint64_t covered = 0;
    for (std::uint32_t k = 0; k < pairs_at_distance.size(); ++k) {
        covered += pairs_at_distance[k];
        if (static_cast<double>(covered) >= needed && k >= 1) return k;
    }
    return static_cast<std::uint32_t>(pairs_at_distance.size() - 1);
}

double clustering_coefficient(const NetworkGraph& graph,
                              const std::vector<std::uint32_t>* restrict_to) {
    auto member = membership(graph, restrict_to);
    auto adj = graph.adjacency();
    double sum = 0.0;
    std::uint64_t counted = 0;
    for (std::uint32_t v = 0; v < graph.node_count; ++v) {
        if (!member[v]) continue;
        ++counted;
        std::vector<std::uint32_t> nbs;
        for (std::uint32_t nb : adj[v])
            if (member[nb]) nbs.push_back(nb);
        if (nbs.size() < 2) continue;
        std::uint64_t closed = 0;
        for (std::size_t i = 0; i < nbs.size(); ++i)
            for (std::size_t j = i + 1; j < nbs.size(); ++j)
                if (graph.has_edge(nbs[i], nbs[j])) ++closed;
        const double possible = static_cast<double>(nbs.size()) *
                                static_cast<double>(nbs.size() - 1) / 2.0;
        sum += static_cast<double>(closed) / possible;
    }
    return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

namespace {

// Dinic max-flow on the vertex-split graph; unit capacity through every
// interior vertex makes max-flow equal the minimum vertex cut (Menger).
class VertexCutSolver {
public:
    VertexCutSolver(const NetworkGraph& g, const std::vector<char>& removed,
                    std::uint32_t s, std::uint32_t t)
        : n_(g.node_count), s_(s), t_(t) {
        // Node v maps to v_in = 2v, v_out = 2v+1.
        graph_.assign(2 * n_, {});
        for (std::uint32_t v = 0; v < n_; ++v) {
            if (removed[v]) continue;
            const int cap = (v == s || v == t) ? kInf : 1;
            add_arc(2 * v, 2 * v + 1, cap);
        }
        for (const Edge& e : g.edges) {
            if (removed[e.u] || removed[e.v]) continue;
            add_arc(2 * e.u + 1, 2 * e.v, kInf);
            add_arc(2 * e.v + 1, 2 * e.u, kInf);
        }
    }

    int max_flow() {
        int flow = 0;
        const std::uint32_t src = 2 * s_ + 1, dst = 2 * t_;
        while (bfs(src, dst)) {
            iter_.assign(graph_.size(), 0);
            int f;
            while ((f = dfs(src, dst, kInf)) > 0) flow += f;
            if (flow >= kInf / 2) break;
        }
        return flow;
    }

private:
    static constexpr int kInf = 1 << 28;
    struct Arc {
        std::uint32_t to;
        int cap;
        std::size_t rev;
    };

    void add_arc(std::uint32_t from, std::uint32_t to, int cap) {
        graph_[from].push_back(Arc{to, cap, graph_[to].size()});
        graph_[to].push_back(Arc{from, 0, graph_[from].size() - 1});
    }

    bool bfs(std::uint32_t src, std::uint32_t dst) {
        level_.assign(graph_.size(), -1);
        std::deque<std::uint32_t> q{src};
        level_[src] = 0;
        while (!q.empty()) {
            std::uint32_t v = q.front();
            q.pop_front();
            for (const Arc& a : graph_[v]) {
                if (a.cap > 0 && level_[a.to] < 0) {
                    level_[a.to] = level_[v] + 1;
                    q.push_back(a.to);
                }
            }
        }
        return level_[dst] >= 0;
    }

    int dfs(std::uint32_t v, std::uint32_t dst, int f) {
        if (v == dst) return f;
        for (std::size_t& i = iter_[v]; i < graph_[v].size(); ++i) {
            Arc& a = graph_[v][i];
            if (a.cap <= 0 || level_[a.to] != level_[v] + 1) continue;
            int d = dfs(a.to, dst, std::min(f, a.cap));
            if (d > 0) {
                a.cap -= d;
                graph_[a.to][a.rev].cap += d;
                return d;
            }
        }
        return 0;
    }

    std::uint32_t n_, s_, t_;
    std::vector<std::vector<Arc>> graph_;
    std::vector<int> level_;
    std::vector<std::size_t> iter_;
};

int cut_size(const NetworkGraph& g, const std::vector<char>& removed, std::uint32_t s,
             std::uint32_t t) {
    return VertexCutSolver(g, removed, s, t).max_flow();
}

} // namespace

std::vector<std::uint32_t> min_vertex_cut(const NetworkGraph& graph, std::uint32_t s,
                                          std::uint32_t t) {
    if (s >= graph.node_count || t >= graph.node_count)
        throw InvalidArgument("cut endpoint out of range");
    if (s == t) throw InvalidArgument("cut endpoints must differ");
    if (graph.has_edge(s, t))
        throw AdjacentVertices("vertex cut undefined for adjacent endpoints");

    std::vector<char> removed(graph.node_count, 0);
    int k = cut_size(graph, removed, s, t);
    if (k == 0) return {};

    // Greedy lexicographic extraction: a node joins the cut iff a minimum cut
    // of the remaining size still exists through it.
    std::vector<std::uint32_t> cut;
    int remaining = k;
    for (std::uint32_t v = 0; v < graph.node_count && remaining > 0; ++v) {
        if (v == s || v == t || removed[v]) continue;
        removed[v] = 1;
        if (cut_size(graph, removed, s, t) == remaining - 1) {
            cut.push_back(v);
            --remaining;
        } else {
            removed[v] = 0;
        }
    }
    return cut;
}

std::string export_graph(const NetworkGraph& graph) {
    std::ostringstream out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", graph.ws_beta);
    out << graph.node_count << ' ' << graph.ws_k << ' ' << buf << ' ' << graph.ws_seed
        << '\n';
    for (const Edge& e : graph.edges)
        out << e.u << ' ' << e.v << ' ' << e.latency << '\n';
    for (std::uint32_t i = 0; i < graph.node_count; ++i) {
        out << i << ' ' << node_class_name(graph.roles[i].kind);
        if (graph.roles[i].kind == NodeClass::Miner) {
            std::snprintf(buf, sizeof buf, "%.17g", graph.roles[i].hashrate_share);
            out << ' ' << buf;
        }
        out << '\n';
    }
    return out.str();
}

NetworkGraph import_graph(const std::string& text) {
    std::istringstream in(text);
    NetworkGraph g;
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("empty graph file");
    {
        std::istringstream hdr(line);
        if (!(hdr >> g.node_count >> g.ws_k >> g.ws_beta >> g.ws_seed))
            throw InvalidArgument("bad graph header, expected: n k beta seed");
    }
    g.roles.assign(g.node_count, NodeRole{});
    std::vector<char> role_seen(g.node_count, 0);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::uint32_t a;
        std::string second;
        if (!(ls >> a >> second)) throw InvalidArgument("bad graph line: " + line);
        if (second == "miner" || second == "hfn" || second == "spv") {
            if (a >= g.node_count) throw InvalidArgument("node id out of range: " + line);
            NodeRole role;
            role.kind = node_class_from_name(second);
            if (role.kind == NodeClass::Miner) {
                if (!(ls >> role.hashrate_share))
                    throw InvalidArgument("miner line missing hashrate: " + line);
            }
            g.roles[a] = role;
            role_seen[a] = 1;
        } else {
            std::uint32_t b = static_cast<std::uint32_t>(std::stoul(second));
            std::uint32_t lat;
            if (!(ls >> lat)) throw InvalidArgument("edge line missing latency: " + line);
            g.add_edge(a, b, lat);
        }
    }
    for (std::uint32_t i = 0; i < g.node_count; ++i)
        if (!role_seen[i]) throw InvalidArgument("role map not total: missing node");
    g.normalize();
    return g;
}

void write_graph_file(const NetworkGraph& graph, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << export_graph(graph);
}

NetworkGraph read_graph_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return import_graph(buf.str());
}

} // namespace powsim
