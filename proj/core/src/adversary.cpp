#include "powsim/adversary.hpp"

#include <algorithm>
#include <set>

#include "powsim/rng.hpp"

namespace powsim {

const char* fault_kind_name(FaultKind k) {
    switch (k) {
        case FaultKind::InvalidBlock: return "invalid_block";
        case FaultKind::StaleChain: return "stale_chain";
        case FaultKind::ForgedHeaderSequence: return "forged_header_sequence";
    }
    return "unknown";
}

void AdversaryConfig::validate(const NetworkGraph& graph) const {
    if (alpha < 0.0 || alpha >= 0.5)
        throw InvalidArgument("adversary alpha must satisfy 0 <= alpha < 0.5");
    if (partition_probability < 0.0 || partition_probability >= 1.0)
        throw InvalidArgument("partition probability must be in [0,1)");
    if (invalid_injection_rate < 0.0 || invalid_injection_rate > 1.0)
        throw InvalidArgument("invalid injection rate must be in [0,1]");
    auto check_ids = [&](const std::vector<std::uint32_t>& ids, const char* what) {
        for (std::uint32_t v : ids)
            if (v >= graph.node_count)
                throw InvalidArgument(std::string(what) + " node id out of range");
    };
    check_ids(eclipse_targets, "eclipse target");
    check_ids(adversary_nodes, "adversary");
    check_ids(delayed_nodes, "delayed");
    for (std::uint32_t t : eclipse_targets)
        if (std::find(adversary_nodes.begin(), adversary_nodes.end(), t) !=
            adversary_nodes.end())
            throw InvalidArgument("eclipse target cannot be an adversary node");
    if (!eclipse_targets.empty() && adversary_nodes.empty())
        throw InvalidArgument("eclipse requires a non-empty adversary node set");
    if (alpha > 0.0) {
        bool has_miner = false;
        for (std::uint32_t v : adversary_nodes)
            if (graph.roles[v].kind == NodeClass::Miner) has_miner = true;
        if (!has_miner)
            throw InvalidArgument(
                "alpha > 0 requires at least one adversary-controlled miner");
    }
}

NetworkGraph partition_edges(const NetworkGraph& graph, double p, std::uint64_t seed) {
    if (p < 0.0 || p >= 1.0) throw InvalidArgument("partition probability must be in [0,1)");
    NetworkGraph g = graph;
    if (p == 0.0) return g;
    Rng rng(seed, RngStream::Partition);
    std::vector<Edge> kept;
    kept.reserve(g.edges.size());
    for (const Edge& e : g.edges)
        if (!rng.bernoulli(p)) kept.push_back(e);
    g.edges = std::move(kept);
    g.validate();
    return g;
}

NetworkGraph eclipse(const NetworkGraph& graph, std::uint32_t target,
                     const std::vector<std::uint32_t>& adversary_nodes) {
    if (target >= graph.node_count) throw InvalidArgument("unknown eclipse target");
    if (adversary_nodes.empty()) throw InvalidArgument("adversary node set is empty");
    for (std::uint32_t a : adversary_nodes) {
        if (a >= graph.node_count) throw InvalidArgument("unknown adversary node");
        if (a == target) throw InvalidArgument("eclipse target cannot be adversarial");
    }

    NetworkGraph g = graph;
    std::set<std::uint32_t> adv(adversary_nodes.begin(), adversary_nodes.end());
    std::vector<Edge> kept;
    std::map<std::uint32_t, std::uint32_t> kept_latency; // adversary peer -> latency
    for (const Edge& e : g.edges) {
        if (e.u != target && e.v != target) {
            kept.push_back(e);
            continue;
        }
        const std::uint32_t peer = e.u == target ? e.v : e.u;
        if (adv.count(peer)) kept_latency[peer] = e.latency;
    }
    g.edges = std::move(kept);
    for (std::uint32_t a : adv) {
        auto it = kept_latency.find(a);
        g.add_edge(target, a, it == kept_latency.end() ? 1 : it->second);
    }
    g.normalize();
    return g;
}

bool fault_injectability(const FaultRecord& record, const BlockTree& tree,
                         const ChainView& victim_local_chain,
                         const ChainView& global_chain) {
    (void)record;
    return !tree.is_ancestor(victim_local_chain.tip, global_chain.tip);
}

double expected_fault_surface(const std::vector<FaultRecord>& records,
                              const std::map<FaultKind, double>& message_probabilities) {
    for (const auto& [kind, p] : message_probabilities)
        if (p < 0.0 || p > 1.0) throw InvalidArgument("message probability must be in [0,1]");
    double total = 0.0;
    for (const FaultRecord& r : records) {
        if (!r.caused_deviation) continue;
        auto it = message_probabilities.find(r.kind);
        if (it == message_probabilities.end())
            throw InvalidArgument("missing probability for fault kind");
        total += it->second;
    }
    return total;
}

} // namespace powsim
