// Validation strategy game: utilities, best response, Nash certification,
// and synchronous best-response dynamics.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "powsim/errors.hpp"
#include "powsim/graph.hpp"

namespace powsim {

enum class Strategy : std::uint8_t { Spv = 0, FullValidate = 1, NoValidation = 2 };

const char* strategy_name(Strategy s);

struct UtilityParams {
    double u0 = 10.0;           // baseline utility
    double c_cpu = 2.0;         // full-validation compute cost
    double c_net = 1.0;         // full-validation bandwidth cost
    double epsilon_policy = 0.01; // marginal policy benefit of validating
    double delta_spv = 4.0;     // SPV convenience benefit
    double r_miner = 5.0;       // enforcement reward / failure penalty for miners

    // The lemma regime needs delta > c_cpu + c_net and epsilon ~ 0.
    bool in_lemma_regime() const {
        return delta_spv > c_cpu + c_net && epsilon_policy < delta_spv;
    }
    std::vector<std::string> regime_warnings() const;
    void validate() const;
};

struct StrategyProfile {
    std::vector<Strategy> assignment; // index = node id
    std::vector<NodeClass> roles;     // index = node id

    std::size_t size() const { return assignment.size(); }
    void validate() const {
        if (assignment.size() != roles.size())
            throw InvalidArgument("strategy profile must be total over nodes");
    }
};

// Miners: FullValidate earns u0 + r_miner - c_cpu - c_net, anything else
// forfeits enforcement (u0 - r_miner). Non-miners: FullValidate
// u0 - c_cpu - c_net + epsilon, SPV u0 + delta, NoValidation u0.
double utility(std::uint32_t node, Strategy strategy, const StrategyProfile& profile,
               const UtilityParams& params);

// Argmax over the three strategies; ties broken SPV > FullValidate > NoValidation.
Strategy best_response(std::uint32_t node, const StrategyProfile& profile,
                       const UtilityParams& params);

struct NashResult {
    bool is_equilibrium = false;
    // On failure: one witnessing (node, strictly better strategy).
    std::optional<std::pair<std::uint32_t, Strategy>> witness;
};

NashResult is_nash_equilibrium(const StrategyProfile& profile, const UtilityParams& params);

struct DynamicsResult {
    StrategyProfile profile;
    std::uint32_t rounds = 0;
    bool converged = false;
};

// Synchronous rounds of best response until a fixed point or max_rounds.
// sequential = true updates nodes one at a time within a round instead.
DynamicsResult run_best_response_dynamics(const StrategyProfile& initial,
                                          const UtilityParams& params,
                                          std::uint32_t max_rounds,
                                          bool sequential = false);

// The profile with miners at FullValidate and everyone else at SPV.
StrategyProfile canonical_equilibrium(const std::vector<NodeClass>& roles);

// Human-readable equilibrium report: profile, utilities, witness deviation.
std::string equilibrium_report(const StrategyProfile& profile, const UtilityParams& params);

} // namespace powsim
