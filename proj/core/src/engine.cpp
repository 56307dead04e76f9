#include "powsim/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "powsim/hash.hpp"
#include "powsim/rng.hpp"

#include "json.hpp"

namespace powsim {

void SimConfig::validate() const {
    graph.validate();
    if (ticks < 1) throw InvalidArgument("ticks must be >= 1");
    if (settle_ticks > ticks) throw InvalidArgument("settle_ticks exceeds horizon");
    // block_rate = 0 is a legal degenerate mode (policy dynamics only).
    if (block_rate < 0.0 || block_rate > 1.0)
        throw InvalidArgument("block_rate must be in [0,1]");
    kernel.validate();
    space.validate();
    adversary.validate(graph);
    if (!initial_policies.empty()) {
        if (initial_policies.size() != graph.node_count)
            throw InvalidArgument("initial_policies must be total over nodes");
        for (std::uint8_t p : initial_policies)
            if (p >= space.cardinality)
                throw InvalidArgument("initial policy out of range");
    }
    if (block_rate > 0.0 && graph.miner_ids().empty())
        throw InvalidArgument("block production requires at least one miner");
    if (block_rate > 0.0 && !is_connected(graph))
        throw InvalidArgument("graph must be connected before adversarial partition");
}

std::uint64_t config_hash(const SimConfig& config) {
    std::ostringstream s;
    s << export_graph(config.graph) << '|' << config.ticks << '|' << config.settle_ticks
      << '|' << config.block_rate << '|' << config.kernel.drift_rate << '|'
      << static_cast<int>(config.kernel.adoption_rule) << '|' << config.space.cardinality
      << '|' << static_cast<int>(config.space.canonical) << '|' << config.adversary.alpha
      << '|' << config.adversary.delay_budget << '|'
      << config.adversary.partition_probability << '|'
      << config.adversary.invalid_injection_rate << '|' << config.adversary.seed << '|'
      << config.seed << '|' << config.hfn_relay_rejected << '|'
      << config.invert_hfn_verdicts;
    for (auto v : config.adversary.eclipse_targets) s << ",e" << v;
    for (auto v : config.adversary.adversary_nodes) s << ",a" << v;
    for (auto v : config.adversary.delayed_nodes) s << ",d" << v;
    for (auto p : config.initial_policies) s << ",p" << static_cast<int>(p);
    return fnv1a64(s.str());
}

bool SimTrace::is_adversary_node(std::uint32_t node) const {
    return std::find(adversary_nodes.begin(), adversary_nodes.end(), node) !=
           adversary_nodes.end();
}

std::vector<std::uint32_t> SimTrace::honest_class_members(NodeClass c) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < node_count; ++i)
        if (roles[i].kind == c && !is_adversary_node(i)) out.push_back(i);
    return out;
}

namespace {

enum class MsgTag : std::uint8_t { Normal = 0, Stale = 1, Forged = 2 };

struct Delivery {
    std::uint32_t to;
    std::uint32_t block;
    std::uint32_t from;
    MsgTag tag;
};

struct OutEdge {
    std::uint32_t peer;
    std::uint32_t latency; // effective: base + delay overlay
};

// Global-observer tip ordering: work, then creation tick, then id.
struct GlobalBest {
    std::uint32_t tip = kGenesisId;
    double work = 1.0;
    std::uint32_t created = 0;

    bool improves(double w, std::uint32_t created_at, std::uint32_t id) const {
        if (w != work) return w > work;
        if (created_at != created) return created_at < created;
        return id < tip;
    }
};

class Simulation {
public:
    explicit Simulation(const SimConfig& cfg) : cfg_(cfg) { setup(); }

    SimTrace run();

private:
    void setup();
    void tick_production(std::uint32_t t);
    void tick_deliveries(std::uint32_t t);
    void tick_tips(std::uint32_t t);
    void tick_policies(std::uint32_t t);
    void tick_metrics(std::uint32_t t);

    bool acceptable(std::uint32_t node, std::uint32_t block, std::uint8_t policy) const;
    void recompute_tip(std::uint32_t node, std::uint32_t t, std::uint8_t policy);
    void schedule(std::uint32_t tick, Delivery d);
    void announce(std::uint32_t from, std::uint32_t block, std::uint32_t t, MsgTag tag,
                  bool adversary_penalty, std::uint32_t except = kNoProducer);
    void learn(std::uint32_t node, std::uint32_t block, std::uint32_t t);
    void on_public(std::uint32_t block, std::uint32_t t);
    void maybe_record_fault(std::uint32_t t, std::uint32_t target, std::uint32_t block,
                            MsgTag tag);

    const SimConfig& cfg_;
    NetworkGraph work_;                      // post partition + eclipse
    std::vector<std::vector<OutEdge>> adj_;  // effective latencies
    std::vector<char> is_adversary_, is_victim_;
    std::vector<std::uint32_t> honest_miners_;
    std::vector<double> honest_weight_cum_;
    double honest_weight_total_ = 0.0;
    std::uint32_t proxy_miner_ = kNoProducer;

    BlockTree tree_;
    std::vector<std::uint32_t> created_at_;
    std::vector<char> public_;
    GlobalBest global_;
    std::uint32_t adv_best_ = kGenesisId;
    std::uint32_t private_tip_ = kGenesisId;

    std::vector<std::vector<std::uint32_t>> known_;
    std::vector<std::unordered_map<std::uint32_t, std::uint32_t>> first_seen_;
    std::vector<std::uint32_t> tip_;
    std::vector<char> dirty_, policy_changed_;
    std::vector<std::set<std::uint32_t>> rejected_; // per-node policy rejections
    std::set<std::uint64_t> fault_seen_;            // (target, block, tag) dedup

    std::vector<std::vector<Delivery>> queue_; // by tick
    Rng production_{0};
    Rng adversary_mining_{0};

    SimTrace trace_;
};

void Simulation::setup() {
    cfg_.validate();
    const AdversaryConfig& adv = cfg_.adversary;

    work_ = adv.partition_probability > 0.0
                ? partition_edges(cfg_.graph, adv.partition_probability, adv.seed)
                : cfg_.graph;
    std::vector<std::uint32_t> targets = adv.eclipse_targets;
    std::sort(targets.begin(), targets.end());
    for (std::uint32_t v : targets) work_ = eclipse(work_, v, adv.adversary_nodes);

    const std::uint32_t n = work_.node_count;
    is_adversary_.assign(n, 0);
    for (std::uint32_t a : adv.adversary_nodes) is_adversary_[a] = 1;
    is_victim_.assign(n, 0);
    for (std::uint32_t v : targets) is_victim_[v] = 1;

    // Delay overlay on edges incident to the delayed set.
    std::vector<std::uint32_t> overlay(work_.edges.size(), 0);
    if (adv.delay_budget > 0 && !adv.delayed_nodes.empty()) {
        std::vector<char> delayed(n, 0);
        for (std::uint32_t d : adv.delayed_nodes) delayed[d] = 1;
        Rng rng(adv.seed, RngStream::DelayOverlay);
        for (std::size_t i = 0; i < work_.edges.size(); ++i)
            if (delayed[work_.edges[i].u] || delayed[work_.edges[i].v])
                overlay[i] = static_cast<std::uint32_t>(
                    rng.uniform_range(1, adv.delay_budget));
    }
    adj_.assign(n, {});
    for (std::size_t i = 0; i < work_.edges.size(); ++i) {
        const Edge& e = work_.edges[i];
        adj_[e.u].push_back(OutEdge{e.v, e.latency + overlay[i]});
        adj_[e.v].push_back(OutEdge{e.u, e.latency + overlay[i]});
    }

    for (std::uint32_t m : cfg_.graph.miner_ids()) {
        if (is_adversary_[m]) {
            if (proxy_miner_ == kNoProducer) proxy_miner_ = m;
        } else {
            honest_miners_.push_back(m);
            honest_weight_total_ += cfg_.graph.roles[m].hashrate_share;
            honest_weight_cum_.push_back(honest_weight_total_);
        }
    }

    known_.assign(n, {kGenesisId});
    first_seen_.assign(n, {});
    for (std::uint32_t i = 0; i < n; ++i) first_seen_[i][kGenesisId] = 0;
    tip_.assign(n, kGenesisId);
    dirty_.assign(n, 0);
    policy_changed_.assign(n, 0);
    rejected_.assign(n, {});
    created_at_.push_back(0);
    public_.push_back(1);

    queue_.assign(cfg_.ticks + 2, {});
    production_ = Rng(cfg_.seed, RngStream::Production);
    adversary_mining_ = Rng(adv.seed, RngStream::AdversaryMining);

    trace_.seed = cfg_.seed;
    trace_.cfg_hash = config_hash(cfg_);
    trace_.node_count = n;
    trace_.ticks = cfg_.ticks;
    trace_.roles = cfg_.graph.roles;
    trace_.adversary_nodes = adv.adversary_nodes;
    trace_.eclipse_targets = targets;
    for (std::uint32_t i = 0; i < n; ++i)
        if (adj_[i].empty()) trace_.redundant_nodes.push_back(i);

    trace_.policies.resize(cfg_.ticks + 1);
    trace_.policies[0] = cfg_.initial_policies.empty()
                             ? std::vector<std::uint8_t>(n, cfg_.space.canonical)
                             : cfg_.initial_policies;
    trace_.tips.resize(cfg_.ticks + 1);
    trace_.tips[0] = tip_;
    trace_.frames.resize(cfg_.ticks + 1);
    tick_metrics(0);
}

void Simulation::schedule(std::uint32_t tick, Delivery d) {
    if (tick < queue_.size()) queue_[tick].push_back(d);
}

void Simulation::announce(std::uint32_t from, std::uint32_t block, std::uint32_t t,
                          MsgTag tag, bool adversary_penalty, std::uint32_t except) {
    const std::uint32_t extra = adversary_penalty ? cfg_.adversary.delay_budget : 0;
    for (const OutEdge& e : adj_[from]) {
        if (e.peer == except) continue;
        // Adversary nodes never forward honest-origin traffic into an
        // eclipse; the victim sees adversary-authored messages only.
        if (is_adversary_[from] && is_victim_[e.peer] && tag == MsgTag::Normal) continue;
        schedule(t + e.latency + extra, Delivery{e.peer, block, from, tag});
    }
}

void Simulation::maybe_record_fault(std::uint32_t t, std::uint32_t target,
                                    std::uint32_t block, MsgTag tag) {
    FaultKind kind;
    if (!tree_.at(block).consensus_valid)
        kind = FaultKind::InvalidBlock;
    else if (tag == MsgTag::Forged)
        kind = FaultKind::ForgedHeaderSequence;
    else if (tag == MsgTag::Stale)
        kind = FaultKind::StaleChain;
    else
        return;
    const std::uint64_t key = (static_cast<std::uint64_t>(target) << 34) |
                              (static_cast<std::uint64_t>(block) << 2) |
                              static_cast<std::uint64_t>(kind);
    if (!fault_seen_.insert(key).second) return;
    FaultRecord rec;
    rec.tick = t;
    rec.target = target;
    rec.kind = kind;
    rec.block_id = block;
    trace_.faults.push_back(rec);
}

void Simulation::on_public(std::uint32_t block, std::uint32_t t) {
    if (public_[block]) return;
    public_[block] = 1;
    if (tree_.valid_path(block) &&
        global_.improves(tree_.cumulative_work(block), created_at_[block], block)) {
        global_ = GlobalBest{block, tree_.cumulative_work(block), created_at_[block]};
    }
    (void)t;
}

void Simulation::learn(std::uint32_t node, std::uint32_t block, std::uint32_t t) {
    first_seen_[node][block] = t;
    known_[node].push_back(block);
    dirty_[node] = 1;
}

void Simulation::tick_production(std::uint32_t t) {
    if (cfg_.block_rate <= 0.0 || t > cfg_.ticks - cfg_.settle_ticks) return;
    if (!production_.bernoulli(cfg_.block_rate)) return;
    const AdversaryConfig& adv = cfg_.adversary;
    const double side = production_.uniform01();

    if (side < adv.alpha) {
        // Adversary block: invalid blocks chase the best public tip to bait
        // header-followers; valid ones extend the private race branch,
        // restarting from the public tip whenever the race has been lost.
        const bool invalid = adversary_mining_.bernoulli(adv.invalid_injection_rate);
        const std::uint8_t tag = trace_.policies[t - 1][proxy_miner_];
        std::uint32_t parent;
        if (invalid) {
            parent = adv_best_;
        } else {
            parent = tree_.cumulative_work(private_tip_) >= tree_.cumulative_work(adv_best_)
                         ? private_tip_
                         : adv_best_;
        }
        const std::uint32_t id = tree_.add(parent, proxy_miner_, 1.0, !invalid, tag);
        created_at_.push_back(t);
        public_.push_back(0);
        if (invalid) {
            for (std::uint32_t a : adv.adversary_nodes)
                announce(a, id, t, MsgTag::Normal, false);
        } else {
            private_tip_ = id;
            for (std::uint32_t a : adv.adversary_nodes)
                for (const OutEdge& e : adj_[a])
                    if (is_victim_[e.peer])
                        schedule(t + e.latency, Delivery{e.peer, id, a, MsgTag::Forged});
        }
        return;
    }

    if (honest_miners_.empty()) return;
    const double y = production_.uniform01() * honest_weight_total_;
    std::size_t idx = std::lower_bound(honest_weight_cum_.begin(), honest_weight_cum_.end(),
                                       y) -
                      honest_weight_cum_.begin();
    if (idx >= honest_miners_.size()) idx = honest_miners_.size() - 1;
    const std::uint32_t m = honest_miners_[idx];
    const std::uint8_t tag = trace_.policies[t - 1][m];
    const std::uint32_t id = tree_.add(tip_[m], m, 1.0, true, tag);
    created_at_.push_back(t);
    public_.push_back(0);
    if (!is_victim_[m]) on_public(id, t);
    learn(m, id, t);
    announce(m, id, t, MsgTag::Normal, false);
}

void Simulation::tick_deliveries(std::uint32_t t) {
    // queue_[t] can grow while stale re-announcements are scheduled, but only
    // for future ticks; iteration by index keeps this safe.
    for (std::size_t qi = 0; qi < queue_[t].size(); ++qi) {
        const Delivery d = queue_[t][qi];
        const std::uint32_t r = d.to, b = d.block;
        const bool novel = first_seen_[r].find(b) == first_seen_[r].end();
        if (d.tag == MsgTag::Stale || (novel && (d.tag == MsgTag::Forged ||
                                                 !tree_.at(b).consensus_valid)))
            maybe_record_fault(t, r, b, d.tag);
        if (!novel) continue;
        learn(r, b, t);
        if (!is_adversary_[r] && !is_victim_[r]) on_public(b, t);

        if (is_adversary_[r]) {
            // Track the best public chain the adversary has seen; each
            // improvement triggers a stale re-announcement of the old tip.
            if (tree_.valid_path(b) && public_[b]) {
                const bool better =
                    tree_.cumulative_work(b) > tree_.cumulative_work(adv_best_) ||
                    (tree_.cumulative_work(b) == tree_.cumulative_work(adv_best_) &&
                     b < adv_best_);
                if (better) {
                    const std::uint32_t old = adv_best_;
                    adv_best_ = b;
                    // Stale tips are honest-origin, so eclipse victims are
                    // excluded; they only ever see adversary-authored chains.
                    if (old != kGenesisId)
                        for (const OutEdge& e : adj_[r])
                            if (!is_victim_[e.peer])
                                schedule(t + e.latency,
                                         Delivery{e.peer, old, r, MsgTag::Stale});
                }
                announce(r, b, t, MsgTag::Normal, true, d.from);
            }
            continue;
        }

        // Honest relay rules.
        const NodeClass klass = trace_.roles[r].kind;
        bool relay = false;
        switch (klass) {
            case NodeClass::Miner: relay = tree_.valid_path(b); break;
            case NodeClass::HomeFullNode:
                relay = cfg_.hfn_relay_rejected ||
                        acceptable(r, b, trace_.policies[t - 1][r]);
                break;
            case NodeClass::SpvClient: relay = false; break;
        }
        if (relay) announce(r, b, t, MsgTag::Normal, false, d.from);
    }
    queue_[t].clear();
    queue_[t].shrink_to_fit();
}

bool Simulation::acceptable(std::uint32_t node, std::uint32_t block,
                            std::uint8_t policy) const {
    if (block == kGenesisId) return true;
    switch (trace_.roles[node].kind) {
        case NodeClass::SpvClient: return true; // headers only, no verification
        case NodeClass::Miner: return tree_.valid_path(block);
        case NodeClass::HomeFullNode: {
            const bool verdict =
                tree_.valid_path(block) && tree_.at(block).policy_tag == policy;
            return cfg_.invert_hfn_verdicts ? !verdict : verdict;
        }
    }
    return false;
}

void Simulation::recompute_tip(std::uint32_t node, std::uint32_t t, std::uint8_t policy) {
    std::uint32_t best = kGenesisId;
    std::uint32_t best_work_tip = kGenesisId; // ignoring the policy verdict
    const auto& seen = first_seen_[node];
    auto better = [&](std::uint32_t a, std::uint32_t b) {
        const double wa = tree_.cumulative_work(a), wb = tree_.cumulative_work(b);
        if (wa != wb) return wa > wb;
        const std::uint32_t fa = seen.at(a), fb = seen.at(b);
        if (fa != fb) return fa < fb;
        return a < b;
    };
    for (std::uint32_t b : known_[node]) {
        if (acceptable(node, b, policy) && better(b, best)) best = b;
        if (trace_.roles[node].kind == NodeClass::HomeFullNode && tree_.valid_path(b) &&
            better(b, best_work_tip))
            best_work_tip = b;
    }
    // A policy-only refusal of the work-best block is a local rejection.
    if (trace_.roles[node].kind == NodeClass::HomeFullNode && best_work_tip != best &&
        !acceptable(node, best_work_tip, policy)) {
        if (rejected_[node].insert(best_work_tip).second)
            trace_.rejections.push_back(RejectionEvent{t, node, best_work_tip});
    }
    tip_[node] = best;
}

void Simulation::tick_tips(std::uint32_t t) {
    for (std::uint32_t i = 0; i < work_.node_count; ++i) {
        const bool policy_retrigger =
            trace_.roles[i].kind == NodeClass::HomeFullNode && policy_changed_[i];
        if (dirty_[i] || policy_retrigger)
            recompute_tip(i, t, trace_.policies[t - 1][i]);
        dirty_[i] = 0;
    }
    trace_.tips[t] = tip_;
}

void Simulation::tick_policies(std::uint32_t t) {
    const std::uint32_t n = work_.node_count;
    auto& cur = trace_.policies[t];
    cur.resize(n);
    std::vector<std::uint8_t> inbox;
    for (std::uint32_t i = 0; i < n; ++i) {
        inbox.clear();
        for (const OutEdge& e : adj_[i])
            if (t >= e.latency) inbox.push_back(trace_.policies[t - e.latency][e.peer]);
        Rng rng(cfg_.seed, RngStream::PolicyStep, i, t);
        cur[i] = step_policy(trace_.policies[t - 1][i], inbox, cfg_.kernel, cfg_.space, rng);
        policy_changed_[i] = cur[i] != trace_.policies[t - 1][i];
    }
}

void Simulation::tick_metrics(std::uint32_t t) {
    MetricsFrame& f = trace_.frames[t];
    f.tick = t;
    f.global_tip = global_.tip;
    f.divergence_d = divergence_metric(PolicyVector{trace_.policies[t], t});

    auto class_delta = [&](NodeClass c) {
        std::map<std::uint32_t, std::uint64_t> counts;
        std::uint64_t m = 0;
        for (std::uint32_t i = 0; i < work_.node_count; ++i) {
            if (trace_.roles[i].kind != c || is_adversary_[i]) continue;
            ++m;
            ++counts[trace_.tips[t][i]];
        }
        if (m < 2) return 0.0;
        std::uint64_t agree = 0;
        for (const auto& [tip, c2] : counts) agree += c2 * (c2 - 1);
        const double pairs = static_cast<double>(m) * static_cast<double>(m - 1);
        return 1.0 - static_cast<double>(agree) / pairs;
    };
    f.delta_spv = class_delta(NodeClass::SpvClient);
    f.delta_hfn = class_delta(NodeClass::HomeFullNode);

    if (!trace_.redundant_nodes.empty()) {
        std::vector<double> hist(cfg_.space.cardinality, 0.0);
        for (std::uint32_t r : trace_.redundant_nodes)
            hist[trace_.policies[t][r]] += 1.0;
        for (double& h : hist) h /= static_cast<double>(trace_.redundant_nodes.size());
        f.isolated_entropy = policy_entropy(hist);
    }

    if (t > 0) {
        const std::uint32_t prev = trace_.frames[t - 1].global_tip;
        if (prev != f.global_tip && !tree_.is_ancestor(prev, f.global_tip))
            trace_.reorgs.push_back(ReorgEvent{t, prev, f.global_tip});
    }
}

SimTrace Simulation::run() {
    for (std::uint32_t t = 1; t <= cfg_.ticks; ++t) {
        tick_production(t);
        tick_deliveries(t);
        tick_tips(t);
        tick_policies(t);
        tick_metrics(t);
    }

    trace_.block_created_at = created_at_;
    trace_.final_views.resize(work_.node_count);
    for (std::uint32_t i = 0; i < work_.node_count; ++i) {
        ChainView& v = trace_.final_views[i];
        v.tip = tip_[i];
        v.cumulative_work = tree_.cumulative_work(tip_[i]);
        v.first_seen.insert(first_seen_[i].begin(), first_seen_[i].end());
    }
    trace_.final_policies = PolicyVector{trace_.policies[cfg_.ticks], cfg_.ticks};
    trace_.tree = tree_;

    // Deviation verdicts against the hindsight global tip at each record's tick.
    for (FaultRecord& rec : trace_.faults) {
        const std::uint32_t victim_tip = trace_.tips[rec.tick][rec.target];
        const std::uint32_t global_tip = trace_.frames[rec.tick].global_tip;
        rec.caused_deviation = !trace_.tree.is_ancestor(victim_tip, global_tip);
    }
    return trace_;
}

} // namespace

SimTrace run_simulation(const SimConfig& config) { return Simulation(config).run(); }

double divergence_probability(const std::vector<SimTrace>& traces, NodeClass node_class,
                              std::uint32_t t) {
    if (traces.empty()) throw InvalidArgument("need at least one trace");
    std::uint64_t total = 0, diverged = 0;
    for (const SimTrace& tr : traces) {
        for (std::uint32_t node : tr.honest_class_members(node_class)) {
            ++total;
            if (tr.delta(node, t)) ++diverged;
        }
    }
    if (total == 0) throw InvalidArgument("no nodes of the requested class");
    return static_cast<double>(diverged) / static_cast<double>(total);
}

double divergence_probability(const std::vector<SimTrace>& traces,
                              const std::vector<std::uint32_t>& nodes, std::uint32_t t) {
    if (traces.empty()) throw InvalidArgument("need at least one trace");
    if (nodes.empty()) throw InvalidArgument("empty node filter");
    std::uint64_t total = 0, diverged = 0;
    for (const SimTrace& tr : traces) {
        for (std::uint32_t node : nodes) {
            ++total;
            if (tr.delta(node, t)) ++diverged;
        }
    }
    return static_cast<double>(diverged) / static_cast<double>(total);
}

double pairwise_divergence_rate(const SimTrace& trace, NodeClass class_a,
                                NodeClass class_b, std::uint32_t t) {
    const auto a = trace.honest_class_members(class_a);
    const auto b = trace.honest_class_members(class_b);
    if (a.empty() || b.empty()) throw InvalidArgument("empty node class");
    std::uint64_t pairs = 0, disagree = 0;
    if (class_a == class_b) {
        if (a.size() < 2) throw InvalidArgument("within-class rate needs >= 2 nodes");
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = i + 1; j < a.size(); ++j) {
                ++pairs;
                if (trace.tips[t][a[i]] != trace.tips[t][a[j]]) ++disagree;
            }
    } else {
        for (std::uint32_t u : a)
            for (std::uint32_t v : b) {
                ++pairs;
                if (trace.tips[t][u] != trace.tips[t][v]) ++disagree;
            }
    }
    return static_cast<double>(disagree) / static_cast<double>(pairs);
}

std::vector<std::uint32_t> validation_surplus_set(const SimTrace& trace,
                                                  std::uint32_t node) {
    if (node >= trace.node_count) throw InvalidArgument("unknown node");
    if (trace.roles[node].kind != NodeClass::HomeFullNode)
        throw WrongNodeClass("validation surplus is defined for home full nodes");
    const std::uint32_t final_tip = trace.frames.back().global_tip;
    std::vector<std::uint32_t> out;
    for (const RejectionEvent& r : trace.rejections) {
        if (r.node != node) continue;
        if (trace.tree.is_ancestor(r.block, final_tip)) out.push_back(r.block);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<LatencyDivergencePoint> latency_divergence_curve(
    const std::vector<SimConfig>& configs, std::uint32_t replications) {
    if (configs.empty()) throw InvalidArgument("no configs");
    if (replications < 1) throw InvalidArgument("replications must be >= 1");
    for (const SimConfig& c : configs)
        if (c.graph.node_count != configs[0].graph.node_count ||
            c.ticks != configs[0].ticks)
            throw InvalidArgument("latency curve configs must differ only in latency");

    std::vector<LatencyDivergencePoint> out;
    for (const SimConfig& base : configs) {
        // Nodes with no miner peer in the (pre-adversary) graph.
        auto adj = base.graph.adjacency();
        std::vector<std::uint32_t> no_miner_peer;
        std::uint32_t max_lat = 1;
        for (const Edge& e : base.graph.edges)
            if (base.graph.roles[e.u].kind != NodeClass::Miner ||
                base.graph.roles[e.v].kind != NodeClass::Miner)
                max_lat = std::max(max_lat, e.latency);
        for (std::uint32_t i = 0; i < base.graph.node_count; ++i) {
            if (base.graph.roles[i].kind == NodeClass::Miner) continue;
            bool miner_peer = false;
            for (std::uint32_t nb : adj[i])
                if (base.graph.roles[nb].kind == NodeClass::Miner) miner_peer = true;
            if (!miner_peer) no_miner_peer.push_back(i);
        }

        std::uint64_t total = 0, diverged = 0;
        for (std::uint32_t rep = 0; rep < replications; ++rep) {
            SimConfig c = base;
            c.seed = base.seed + rep;
            SimTrace tr = run_simulation(c);
            for (std::uint32_t node : no_miner_peer) {
                ++total;
                if (tr.delta(node, c.ticks)) ++diverged;
            }
        }
        LatencyDivergencePoint pt;
        pt.latency = max_lat;
        pt.p_delta = total == 0
                         ? 0.0
                         : static_cast<double>(diverged) / static_cast<double>(total);
        out.push_back(pt);
    }
    return out;
}

std::string trace_csv(const SimTrace& trace, bool include_node_rows) {
    std::ostringstream out;
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "# config_hash=" << trace.cfg_hash << " seed=" << trace.seed << '\n';
    out << "tick,event_kind,node_id,block_id,parent_id,height,producer,consensus_valid,"
           "policy,delta_i,D,delta_spv,delta_hfn,fault_kind,caused_deviation\n";
    for (std::uint32_t b = 1; b < trace.tree.size(); ++b) {
        const Block& blk = trace.tree.at(b);
        out << trace.block_created_at[b] << ",block,," << blk.id << ',' << blk.parent
            << ',' << blk.height << ',' << blk.producer << ','
            << (blk.consensus_valid ? 1 : 0) << ',' << static_cast<int>(blk.policy_tag)
            << ",,,,,,\n";
    }
    for (const FaultRecord& f : trace.faults)
        out << f.tick << ",fault," << f.target << ',' << f.block_id << ",,,,,,,,,,"
            << fault_kind_name(f.kind) << ',' << (f.caused_deviation ? 1 : 0) << '\n';
    for (const MetricsFrame& f : trace.frames)
        out << f.tick << ",metrics,," << f.global_tip << ",,,,,,," << fmt(f.divergence_d)
            << ',' << fmt(f.delta_spv) << ',' << fmt(f.delta_hfn) << ",,\n";
    if (include_node_rows) {
        for (std::uint32_t t = 0; t <= trace.ticks; ++t)
            for (std::uint32_t i = 0; i < trace.node_count; ++i)
                out << t << ",node," << i << ",,,,,,"
                    << static_cast<int>(trace.policies[t][i]) << ','
                    << (trace.delta(i, t) ? 1 : 0) << ",,,,,\n";
    }
    return out.str();
}

std::string summary_json(const SimTrace& trace) {
    nlohmann::ordered_json j;
    j["config_hash"] = trace.cfg_hash;
    j["seed"] = trace.seed;
    j["nodes"] = trace.node_count;
    j["ticks"] = trace.ticks;
    j["blocks"] = trace.tree.size() - 1;
    j["reorgs"] = trace.reorgs.size();
    j["fault_records"] = trace.faults.size();
    const MetricsFrame& last = trace.frames.back();
    j["final"]["global_tip"] = last.global_tip;
    j["final"]["global_height"] = trace.tree.at(last.global_tip).height;
    j["final"]["policy_divergence"] = last.divergence_d;
    j["final"]["delta_spv"] = last.delta_spv;
    j["final"]["delta_hfn"] = last.delta_hfn;
    j["final"]["isolated_entropy_bits"] = last.isolated_entropy;
    std::uint64_t diverged = 0;
    for (std::uint32_t i = 0; i < trace.node_count; ++i)
        if (trace.delta(i, trace.ticks)) ++diverged;
    j["final"]["diverged_nodes"] = diverged;
    return j.dump(2) + "\n";
}

} // namespace powsim
