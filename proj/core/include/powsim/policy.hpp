// Finite policy space, the adopt-then-drift update kernel, entropy metrics,
// the pairwise divergence metric D, and its analytic lower bound.

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "powsim/errors.hpp"
#include "powsim/graph.hpp"
#include "powsim/rng.hpp"

namespace powsim {

struct PolicySpace {
    std::uint32_t cardinality = 2;    // K >= 2
    std::uint8_t canonical = 0;       // pi*, 0 <= canonical < K

    void validate() const {
        if (cardinality < 2) throw InvalidArgument("policy space needs K >= 2");
        if (canonical >= cardinality) throw InvalidArgument("canonical policy out of range");
    }
};

enum class AdoptionRule : std::uint8_t { MajorityOfInbox = 0, UniformRandomPeer = 1 };

struct PolicyKernel {
    double drift_rate = 0.0; // probability per tick of a uniform mutation
    AdoptionRule adoption_rule = AdoptionRule::MajorityOfInbox;

    void validate() const {
        if (drift_rate < 0.0 || drift_rate > 1.0)
            throw InvalidArgument("drift_rate must be in [0,1]");
    }
};

struct PolicyVector {
    std::vector<std::uint8_t> states; // index = node id, total over the graph
    std::uint32_t tick = 0;
};

// One kernel application: adopt from the inbox (majority with lowest-index
// tie-break, or a uniform inbox element), then mutate to a uniform policy
// with probability drift_rate. Empty inbox skips adoption.
std::uint8_t step_policy(std::uint8_t current, const std::vector<std::uint8_t>& inbox,
                         const PolicyKernel& kernel, const PolicySpace& space, Rng& rng);

// Shannon entropy in bits; 0*log0 := 0. The vector must sum to 1 +- 1e-9.
double policy_entropy(const std::vector<double>& marginal);

// D = (1/|V|^2) * sum over ordered pairs of [pi_i != pi_j].
double divergence_metric(const PolicyVector& policies);

// |R| (|V|-|R|) / |V|^2 * p.
double divergence_lower_bound(std::uint32_t total_nodes, std::uint32_t redundant_count,
                              double mismatch_p);

// Monte Carlo estimate of P[isolated node's policy != canonical] at the
// horizon. Closed form for this kernel at stationarity is (K-1)/K.
double estimate_mismatch_p(const PolicyKernel& kernel, const PolicySpace& space,
                           std::uint32_t horizon, std::uint32_t replications,
                           std::uint64_t seed);

// Sum of per-node verdict entropies over nodes without the enforcer flag.
double redundant_entropy(const std::map<std::uint32_t, std::vector<double>>& decisions,
                         const std::map<std::uint32_t, bool>& enforcer_flags);

// Exact marginal distribution of an isolated node after t kernel steps,
// starting from a point mass. Used by entropy-growth checks.
std::vector<double> isolated_marginal_after(const PolicyKernel& kernel,
                                            const PolicySpace& space,
                                            std::uint8_t initial, std::uint32_t ticks);

// Standalone policy dynamics over a graph: per-edge latency respected, inbox
// at tick t carries peer states from tick t - latency. Stream derivation per
// (seed, node, tick) matches the simulation engine, so engine runs with
// block production disabled reproduce these trajectories exactly.
struct PolicyTrajectory {
    std::vector<std::vector<std::uint8_t>> history; // [tick][node], history[0] = initial
    std::vector<double> divergence;                 // D at each tick, index aligned
    PolicyVector final_states;
};

PolicyTrajectory run_policy_dynamics(const NetworkGraph& graph, const PolicySpace& space,
                                     const PolicyKernel& kernel,
                                     const std::vector<std::uint8_t>& initial,
                                     std::uint32_t ticks, std::uint64_t seed);

// CSV export: tick,node_id,policy,is_redundant.
std::string policy_trajectory_csv(const PolicyTrajectory& traj, const NetworkGraph& graph);

} // namespace powsim
