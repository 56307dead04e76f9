// Deterministic discrete-time network simulation: block production by
// hashrate share, latency-respecting gossip, per-class chain adoption,
// policy dynamics, adversarial injection, and per-tick metric recording.
//
// Determinism contract: identical SimConfig (seed included) produces a
// bit-identical SimTrace. All randomness flows through derived Rng streams
// keyed by (seed, domain, node, tick), so no behavioural toggle can shift
// another component's draws.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "powsim/adversary.hpp"
#include "powsim/graph.hpp"
#include "powsim/ledger.hpp"
#include "powsim/policy.hpp"

namespace powsim {

struct SimConfig {
    NetworkGraph graph;
    std::uint32_t ticks = 100;
    // Production halts for the final settle_ticks so propagation can flush;
    // divergence "at horizon" is then free of trailing in-flight blocks.
    std::uint32_t settle_ticks = 0;
    double block_rate = 0.1; // per-tick probability of one block network-wide
    PolicyKernel kernel;
    PolicySpace space;
    AdversaryConfig adversary;
    std::uint64_t seed = 1;
    bool hfn_relay_rejected = true;   // rejecting HFNs still relay headers
    bool invert_hfn_verdicts = false; // flips every HFN local verdict
    std::vector<std::uint8_t> initial_policies; // empty = all canonical

    void validate() const;
};

std::uint64_t config_hash(const SimConfig& config);

struct MetricsFrame {
    std::uint32_t tick = 0;
    std::uint32_t global_tip = kGenesisId;
    double divergence_d = 0.0;      // policy divergence D(Pi)
    double delta_spv = 0.0;         // within-class pairwise tip disagreement
    double delta_hfn = 0.0;
    double isolated_entropy = 0.0;  // entropy of degree-0 nodes' policy histogram
};

struct ReorgEvent {
    std::uint32_t tick = 0;
    std::uint32_t old_tip = 0;
    std::uint32_t new_tip = 0;
};

struct RejectionEvent {
    std::uint32_t tick = 0;
    std::uint32_t node = 0;
    std::uint32_t block = 0;
};

struct SimTrace {
    std::uint64_t seed = 0;
    std::uint64_t cfg_hash = 0;
    std::uint32_t node_count = 0;
    std::uint32_t ticks = 0;
    std::vector<NodeRole> roles;
    std::vector<std::uint32_t> adversary_nodes;
    std::vector<std::uint32_t> eclipse_targets;
    std::vector<std::uint32_t> redundant_nodes; // degree-0 after partition

    BlockTree tree;
    std::vector<std::uint32_t> block_created_at;          // per block id
    std::vector<MetricsFrame> frames;                     // frames[t].tick == t
    std::vector<std::vector<std::uint32_t>> tips;         // [tick][node]
    std::vector<std::vector<std::uint8_t>> policies;      // [tick][node]
    std::vector<FaultRecord> faults;
    std::vector<ReorgEvent> reorgs;
    std::vector<RejectionEvent> rejections;
    std::vector<ChainView> final_views;
    PolicyVector final_policies;

    // Divergence bit: node's tip differs from the hindsight global tip.
    bool delta(std::uint32_t node, std::uint32_t tick) const {
        return tips.at(tick).at(node) != frames.at(tick).global_tip;
    }
    bool is_adversary_node(std::uint32_t node) const;
    std::vector<std::uint32_t> honest_class_members(NodeClass c) const;
};

SimTrace run_simulation(const SimConfig& config);

// Fraction of (trace, node) pairs with delta = 1 at tick t.
double divergence_probability(const std::vector<SimTrace>& traces, NodeClass node_class,
                              std::uint32_t t);
double divergence_probability(const std::vector<SimTrace>& traces,
                              const std::vector<std::uint32_t>& nodes, std::uint32_t t);

// P_delta under independent local-acceptance and desync mechanisms.
inline double compose_divergence_probability(double epsilon, double p_desync) {
    return 1.0 - (1.0 - epsilon) * (1.0 - p_desync);
}

// Mean tip disagreement over cross-class pairs (or within-class unordered
// pairs when class_a == class_b) at tick t. Adversary-controlled nodes are
// not class members.
double pairwise_divergence_rate(const SimTrace& trace, NodeClass class_a,
                                NodeClass class_b, std::uint32_t t);

// Blocks the HFN locally rejected on policy grounds that ended up on the
// final global chain's ancestor path.
std::vector<std::uint32_t> validation_surplus_set(const SimTrace& trace,
                                                  std::uint32_t node);

struct LatencyDivergencePoint {
    std::uint32_t latency = 1;
    double p_delta = 0.0;
};

// Per-latency divergence probability at horizon for nodes with no miner
// peers. Configs must differ only in edge latencies.
std::vector<LatencyDivergencePoint> latency_divergence_curve(
    const std::vector<SimConfig>& configs, std::uint32_t replications);

// Canonical CSV serialization of a trace (block, fault, metric and per-node
// rows). Bit-identical for identical configs; hash it to assert determinism.
std::string trace_csv(const SimTrace& trace, bool include_node_rows = true);

// Structured end-of-run summary (JSON).
std::string summary_json(const SimTrace& trace);

} // namespace powsim
