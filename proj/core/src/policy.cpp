#include "powsim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace powsim {

std::uint8_t step_policy(std::uint8_t current, const std::vector<std::uint8_t>& inbox,
                         const PolicyKernel& kernel, const PolicySpace& space, Rng& rng) {
    std::uint8_t next = current;
    if (!inbox.empty()) {
        if (kernel.adoption_rule == AdoptionRule::MajorityOfInbox) {
            std::vector<std::uint32_t> counts(space.cardinality, 0);
            for (std::uint8_t p : inbox) {
                if (p >= space.cardinality) throw InvalidArgument("inbox policy out of range");
                ++counts[p];
            }
            std::uint32_t best = 0;
            std::uint8_t winner = 0;
            for (std::uint32_t p = 0; p < space.cardinality; ++p) {
                if (counts[p] > best) { // lowest index wins ties
                    best = counts[p];
                    winner = static_cast<std::uint8_t>(p);
                }
            }
            next = winner;
        } else {
            next = inbox[rng.uniform_u64(inbox.size())];
        }
    }
    if (kernel.drift_rate > 0.0 && rng.bernoulli(kernel.drift_rate))
        next = static_cast<std::uint8_t>(rng.uniform_u64(space.cardinality));
    return next;
}

double policy_entropy(const std::vector<double>& marginal) {
    double sum = 0.0;
    for (double p : marginal) {
        if (p < 0.0) throw InvalidArgument("negative probability in marginal");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw InvalidArgument("marginal distribution does not sum to 1");
    double h = 0.0;
    for (double p : marginal)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

double divergence_metric(const PolicyVector& policies) {
    const std::size_t n = policies.states.size();
    if (n == 0) throw InvalidArgument("divergence metric needs >= 1 node");
    std::map<std::uint8_t, std::uint64_t> counts;
    for (std::uint8_t p : policies.states) ++counts[p];
    // Ordered agreeing pairs are sum of c^2 (diagonal included, it agrees).
    std::uint64_t agree = 0;
    for (const auto& [p, c] : counts) agree += c * c;
    const double total = static_cast<double>(n) * static_cast<double>(n);
    return (total - static_cast<double>(agree)) / total;
}

double divergence_lower_bound(std::uint32_t total_nodes, std::uint32_t redundant_count,
                              double mismatch_p) {
    if (total_nodes == 0) throw InvalidArgument("total_nodes must be >= 1");
    if (redundant_count > total_nodes)
        throw InvalidArgument("redundant_count exceeds total_nodes");
    if (mismatch_p < 0.0 || mismatch_p > 1.0)
        throw InvalidArgument("mismatch probability must be in [0,1]");
    const double v = static_cast<double>(total_nodes);
    const double r = static_cast<double>(redundant_count);
    return r * (v - r) / (v * v) * mismatch_p;
}

double estimate_mismatch_p(const PolicyKernel& kernel, const PolicySpace& space,
                           std::uint32_t horizon, std::uint32_t replications,
                           std::uint64_t seed) {
    kernel.validate();
    space.validate();
    if (replications < 1) throw InvalidArgument("replications must be >= 1");
    const std::vector<std::uint8_t> empty_inbox;
    std::uint64_t mismatched = 0;
    for (std::uint32_t r = 0; r < replications; ++r) {
        Rng rng(seed, RngStream::MismatchEstimate, r);
        std::uint8_t state = space.canonical;
        for (std::uint32_t t = 0; t < horizon; ++t)
            state = step_policy(state, empty_inbox, kernel, space, rng);
        if (state != space.canonical) ++mismatched;
    }
    return static_cast<double>(mismatched) / static_cast<double>(replications);
}

double redundant_entropy(const std::map<std::uint32_t, std::vector<double>>& decisions,
                         const std::map<std::uint32_t, bool>& enforcer_flags) {
    double total = 0.0;
    for (const auto& [node, marginal] : decisions) {
        auto it = enforcer_flags.find(node);
        if (it == enforcer_flags.end())
            throw InvalidArgument("missing enforcer flag for node");
        if (it->second) continue;
        total += policy_entropy(marginal);
    }
    return total;
}

std::vector<double> isolated_marginal_after(const PolicyKernel& kernel,
                                            const PolicySpace& space,
                                            std::uint8_t initial, std::uint32_t ticks) {
    space.validate();
    kernel.validate();
    if (initial >= space.cardinality) throw InvalidArgument("initial policy out of range");
    const std::uint32_t k = space.cardinality;
    std::vector<double> dist(k, 0.0);
    dist[initial] = 1.0;
    // Per step: stay with (1 - xi), jump uniform with xi.
    const double xi = kernel.drift_rate;
    for (std::uint32_t t = 0; t < ticks; ++t) {
        std::vector<double> next(k, 0.0);
        for (std::uint32_t a = 0; a < k; ++a) {
            next[a] += dist[a] * (1.0 - xi);
            for (std::uint32_t b = 0; b < k; ++b) next[b] += dist[a] * xi / k;
        }
        dist = std::move(next);
    }
    return dist;
}

PolicyTrajectory run_policy_dynamics(const NetworkGraph& graph, const PolicySpace& space,
                                     const PolicyKernel& kernel,
                                     const std::vector<std::uint8_t>& initial,
                                     std::uint32_t ticks, std::uint64_t seed) {
    space.validate();
    kernel.validate();
    const std::uint32_t n = graph.node_count;
    if (initial.size() != n) throw InvalidArgument("initial policy vector must be total");
    for (std::uint8_t p : initial)
        if (p >= space.cardinality) throw InvalidArgument("initial policy out of range");

    PolicyTrajectory traj;
    traj.history.resize(ticks + 1);
    traj.history[0] = initial;
    traj.divergence.resize(ticks + 1);
    traj.divergence[0] = divergence_metric(PolicyVector{initial, 0});

    struct InEdge {
        std::uint32_t peer;
        std::uint32_t latency;
    };
    std::vector<std::vector<InEdge>> in(n);
    for (const Edge& e : graph.edges) {
        in[e.u].push_back(InEdge{e.v, e.latency});
        in[e.v].push_back(InEdge{e.u, e.latency});
    }

    std::vector<std::uint8_t> inbox;
    for (std::uint32_t t = 1; t <= ticks; ++t) {
        auto& cur = traj.history[t];
        cur.resize(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            inbox.clear();
            for (const InEdge& e : in[i]) {
                // A state announced at s arrives at s + latency.
                if (t >= e.latency)
                    inbox.push_back(traj.history[t - e.latency][e.peer]);
            }
            Rng rng(seed, RngStream::PolicyStep, i, t);
            cur[i] = step_policy(traj.history[t - 1][i], inbox, kernel, space, rng);
        }
        traj.divergence[t] = divergence_metric(PolicyVector{cur, t});
    }
    traj.final_states = PolicyVector{traj.history[ticks], ticks};
    return traj;
}

std::string policy_trajectory_csv(const PolicyTrajectory& traj, const NetworkGraph& graph) {
    std::vector<char> redundant(graph.node_count, 0);
    {
        std::vector<std::uint32_t> deg(graph.node_count, 0);
        for (const Edge& e : graph.edges) {
            ++deg[e.u];
            ++deg[e.v];
        }
        for (std::uint32_t i = 0; i < graph.node_count; ++i) redundant[i] = deg[i] == 0;
    }
    std::ostringstream out;
    out << "tick,node_id,policy,is_redundant\n";
    for (std::uint32_t t = 0; t < traj.history.size(); ++t)
        for (std::uint32_t i = 0; i < graph.node_count; ++i)
            out << t << ',' << i << ',' << static_cast<int>(traj.history[t][i]) << ','
                << (redundant[i] ? 1 : 0) << '\n';
    return out.str();
}

} // namespace powsim
