// Network topology: Watts-Strogatz construction, role assignment with a
// densified miner core, and the structural metrics (diameter, effective
// diameter, clustering, minimum vertex cuts) the simulator's claims rest on.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "powsim/errors.hpp"

namespace powsim {

enum class NodeClass : std::uint8_t { Miner = 0, HomeFullNode = 1, SpvClient = 2 };

const char* node_class_name(NodeClass c);
NodeClass node_class_from_name(const std::string& name);

struct NodeRole {
    NodeClass kind = NodeClass::HomeFullNode;
    double hashrate_share = 0.0; // meaningful for miners only
};

struct Edge {
    std::uint32_t u = 0;
    std::uint32_t v = 0;
    std::uint32_t latency = 1; // ticks, >= 1
};

// Undirected simple graph with per-edge latency and a total role map.
// Edges are kept normalized (u < v) and sorted, which makes serialization
// and seeded algorithms canonical.
struct NetworkGraph {
    std::uint32_t node_count = 0;
    std::vector<Edge> edges;
    std::vector<NodeRole> roles; // size == node_count

    // Provenance of the generator call, echoed by the text format.
    std::uint32_t ws_k = 0;
    double ws_beta = 0.0;
    std::uint64_t ws_seed = 0;

    bool has_edge(std::uint32_t u, std::uint32_t v) const;
    std::uint32_t degree(std::uint32_t v) const;
    std::vector<std::vector<std::uint32_t>> adjacency() const;
    std::vector<std::uint32_t> miner_ids() const;
    std::vector<std::uint32_t> nodes_of_class(NodeClass c) const;

    void add_edge(std::uint32_t u, std::uint32_t v, std::uint32_t latency);
    void normalize(); // sort edges, check invariants

    // Throws InvalidArgument on any structural invariant violation.
    void validate() const;
};

// Standard Watts-Strogatz: ring lattice over k nearest neighbours, then each
// clockwise edge rewired with probability beta to a uniform non-duplicate,
// non-self target. beta = 0 returns the deterministic lattice for any seed.
// Rewired outputs that end up disconnected are retried with an incremented
// sub-seed up to 100 times before erroring.
NetworkGraph generate_watts_strogatz(std::uint32_t n, std::uint32_t k, double beta,
                                     std::uint64_t seed);

// Selects miner_count miners uniformly at random, adds random intra-miner
// edges (latency 1) until the miner subgraph is connected plus
// core_extra_edges more, then splits the remaining nodes into SPV clients
// (ceil(spv_fraction * n) of all nodes) and home full nodes. Non-miner edge
// latencies are redrawn uniformly from [lat_min, lat_max].
NetworkGraph assign_roles(const NetworkGraph& graph, std::uint32_t miner_count,
                          double spv_fraction, std::uint32_t core_extra_edges,
                          std::uint64_t seed, std::uint32_t lat_min = 1,
                          std::uint32_t lat_max = 1);

// Attach one new node with a single edge; returns the grown graph.
NetworkGraph add_peripheral_node(const NetworkGraph& graph, std::uint32_t attach_to,
                                 NodeClass role, std::uint32_t latency = 1);

// Append isolated (degree-0) nodes; used for redundant-set experiments.
NetworkGraph add_isolated_nodes(const NetworkGraph& graph, std::uint32_t count,
                                NodeClass role = NodeClass::HomeFullNode);

// Hop-count metrics over the graph or the subgraph induced by restrict_to.
// Throws DisconnectedGraph (listing components) when the target is not
// connected.
std::uint32_t diameter(const NetworkGraph& graph,
                       const std::vector<std::uint32_t>* restrict_to = nullptr);

// Smallest k such that at least (1 - epsilon) of unordered node pairs are
// within k hops. epsilon = 0 degenerates to the diameter.
std::uint32_t effective_diameter(const NetworkGraph& graph, double epsilon,
                                 const std::vector<std::uint32_t>* restrict_to = nullptr);

// Mean over nodes of (closed triangles) / (possible triangles); degree < 2
// contributes 0.
double clustering_coefficient(const NetworkGraph& graph,
                              const std::vector<std::uint32_t>* restrict_to = nullptr);

// Minimum-cardinality vertex set separating s from t, lexicographically
// smallest by sorted node id. Adjacent endpoints throw AdjacentVertices;
// already-separated endpoints yield the empty set.
std::vector<std::uint32_t> min_vertex_cut(const NetworkGraph& graph, std::uint32_t s,
                                          std::uint32_t t);

bool is_connected(const NetworkGraph& graph,
                  const std::vector<std::uint32_t>* restrict_to = nullptr);
std::vector<std::vector<std::uint32_t>> connected_components(
    const NetworkGraph& graph, const std::vector<std::uint32_t>* restrict_to = nullptr);

// Line-oriented text format. Header "n k beta seed", one "u v latency" line
// per edge, one "id role [hashrate]" line per node. Round-trips bit-exactly.
std::string export_graph(const NetworkGraph& graph);
NetworkGraph import_graph(const std::string& text);
void write_graph_file(const NetworkGraph& graph, const std::string& path);
NetworkGraph read_graph_file(const std::string& path);

} // namespace powsim
