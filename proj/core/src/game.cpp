#include "powsim/game.hpp"

#include <array>
#include <sstream>

namespace powsim {

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Spv: return "spv";
        case Strategy::FullValidate: return "full_validate";
        case Strategy::NoValidation: return "no_validation";
    }
    return "unknown";
}

void UtilityParams::validate() const {
    if (c_cpu < 0 || c_net < 0 || r_miner < 0)
        throw InvalidArgument("costs and rewards must be >= 0");
}

std::vector<std::string> UtilityParams::regime_warnings() const {
    std::vector<std::string> w;
    if (delta_spv <= c_cpu + c_net)
        w.push_back("delta_spv <= c_cpu + c_net: outside the lemma regime");
    if (epsilon_policy >= delta_spv)
        w.push_back("epsilon_policy >= delta_spv: policy benefit not negligible");
    return w;
}

double utility(std::uint32_t node, Strategy strategy, const StrategyProfile& profile,
               const UtilityParams& params) {
    profile.validate();
    params.validate();
    if (node >= profile.size()) throw InvalidArgument("unknown node in profile");
    const bool miner = profile.roles[node] == NodeClass::Miner;
    if (miner) {
        if (strategy == Strategy::FullValidate)
            return params.u0 + params.r_miner - params.c_cpu - params.c_net;
        return params.u0 - params.r_miner; // enforcement failure
    }
    switch (strategy) {
        case Strategy::FullValidate:
            return params.u0 - params.c_cpu - params.c_net + params.epsilon_policy;
        case Strategy::Spv: return params.u0 + params.delta_spv;
        case Strategy::NoValidation: return params.u0;
    }
    throw InvalidArgument("unknown strategy");
}

Strategy best_response(std::uint32_t node, const StrategyProfile& profile,
                       const UtilityParams& params) {
    // Tie-break order: SPV, then FullValidate, then NoValidation.
    constexpr std::array<Strategy, 3> order{Strategy::Spv, Strategy::FullValidate,
                                            Strategy::NoValidation};
    Strategy best = order[0];
    double best_u = utility(node, best, profile, params);
    for (std::size_t i = 1; i < order.size(); ++i) {
        const double u = utility(node, order[i], profile, params);
        if (u > best_u) {
            best = order[i];
            best_u = u;
        }
    }
    return best;
}

NashResult is_nash_equilibrium(const StrategyProfile& profile, const UtilityParams& params) {
    profile.validate();
    NashResult res;
    constexpr std::array<Strategy, 3> all{Strategy::Spv, Strategy::FullValidate,
                                          Strategy::NoValidation};
    for (std::uint32_t i = 0; i < profile.size(); ++i) {
        const double current = utility(i, profile.assignment[i], profile, params);
        for (Strategy s : all) {
            if (s == profile.assignment[i]) continue;
            if (utility(i, s, profile, params) > current) {
                res.is_equilibrium = false;
                res.witness = std::make_pair(i, s);
                return res;
            }
        }
    }
    res.is_equilibrium = true;
    return res;
}

DynamicsResult run_best_response_dynamics(const StrategyProfile& initial,
                                          const UtilityParams& params,
                                          std::uint32_t max_rounds, bool sequential) {
    initial.validate();
    if (max_rounds < 1) throw InvalidArgument("max_rounds must be >= 1");
    DynamicsResult res;
    res.profile = initial;
    for (std::uint32_t round = 1; round <= max_rounds; ++round) {
        res.rounds = round;
        bool changed = false;
        if (sequential) {
            for (std::uint32_t i = 0; i < res.profile.size(); ++i) {
                const Strategy s = best_response(i, res.profile, params);
                if (s != res.profile.assignment[i]) {
                    res.profile.assignment[i] = s;
                    changed = true;
                }
            }
        } else {
            StrategyProfile next = res.profile;
            for (std::uint32_t i = 0; i < res.profile.size(); ++i)
                next.assignment[i] = best_response(i, res.profile, params);
            changed = next.assignment != res.profile.assignment;
            res.profile = std::move(next);
        }
        if (!changed) {
            res.converged = true;
            return res;
        }
    }
    return res;
}

StrategyProfile canonical_equilibrium(const std::vector<NodeClass>& roles) {
    StrategyProfile p;
    p.roles = roles;
    p.assignment.reserve(roles.size());
    for (NodeClass c : roles)
        p.assignment.push_back(c == NodeClass::Miner ? Strategy::FullValidate
                                                     : Strategy::Spv);
    return p;
}

std::string equilibrium_report(const StrategyProfile& profile, const UtilityParams& params) {
    std::ostringstream out;
    const NashResult nash = is_nash_equilibrium(profile, params);
    out << "equilibrium: " << (nash.is_equilibrium ? "yes" : "no") << '\n';
    for (const std::string& w : params.regime_warnings()) out << "warning: " << w << '\n';
    for (std::uint32_t i = 0; i < profile.size(); ++i) {
        out << "node " << i << " [" << node_class_name(profile.roles[i]) << "] "
            << strategy_name(profile.assignment[i]) << " utility "
            << utility(i, profile.assignment[i], profile, params) << '\n';
    }
    if (nash.witness) {
        out << "witness: node " << nash.witness->first << " improves by switching to "
            << strategy_name(nash.witness->second) << '\n';
    }
    return out.str();
}

} // namespace powsim
