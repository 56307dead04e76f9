// Adversary configuration and the pure graph transformations it applies:
// random edge partition, eclipse rewiring, plus fault-record accounting.

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "powsim/errors.hpp"
#include "powsim/graph.hpp"
#include "powsim/ledger.hpp"

namespace powsim {

enum class FaultKind : std::uint8_t {
    InvalidBlock = 0,        // adversarially mined, consensus_valid = false
    StaleChain = 1,          // re-announcement of an already-superseded tip
    ForgedHeaderSequence = 2 // alternative (private, lower-work) header chain
};

const char* fault_kind_name(FaultKind k);

struct FaultRecord {
    std::uint32_t tick = 0;
    std::uint32_t target = 0;
    FaultKind kind = FaultKind::InvalidBlock;
    std::uint32_t block_id = 0;
    // Filled in after the run, against the hindsight global chain.
    bool caused_deviation = false;
};

struct AdversaryConfig {
    double alpha = 0.0;               // hashrate fraction, < 0.5
    std::uint32_t delay_budget = 0;   // max added latency (partial synchrony cap)
    double partition_probability = 0.0;
    double invalid_injection_rate = 0.0; // per adversary block
    std::uint64_t seed = 0;

    std::vector<std::uint32_t> eclipse_targets;
    // Nodes the adversary controls. Eclipse victims are rewired onto these;
    // adversary blocks enter the network from them. When alpha > 0 at least
    // one of them must be a miner, which serves as the block producer id.
    std::vector<std::uint32_t> adversary_nodes;
    // Delay-attack set D: every edge incident to one of these nodes gets a
    // random extra latency in [1, delay_budget].
    std::vector<std::uint32_t> delayed_nodes;

    bool active() const {
        return alpha > 0.0 || partition_probability > 0.0 || !eclipse_targets.empty() ||
               (!delayed_nodes.empty() && delay_budget > 0);
    }
    void validate(const NetworkGraph& graph) const;
};

// Removes each edge independently with probability p. Disconnection is a
// legal outcome; it is exactly what the partition experiments study.
NetworkGraph partition_edges(const NetworkGraph& graph, double p, std::uint64_t seed);

// Replaces all of the target's edges with edges to the adversary set only.
// Pre-existing target-adversary edges keep their latency; new ones get 1.
NetworkGraph eclipse(const NetworkGraph& graph, std::uint32_t target,
                     const std::vector<std::uint32_t>& adversary_nodes);

// True iff the victim's tip is off the ancestor path of the global tip.
// A merely lagging victim (tip an ancestor of the global tip) is not deviant.
bool fault_injectability(const FaultRecord& record, const BlockTree& tree,
                         const ChainView& victim_local_chain, const ChainView& global_chain);

// Empirical expected fault surface: sum of 1[caused_deviation] * P(kind).
double expected_fault_surface(const std::vector<FaultRecord>& records,
                              const std::map<FaultKind, double>& message_probabilities);

} // namespace powsim
