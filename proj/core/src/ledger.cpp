#include "powsim/ledger.hpp"

#include <algorithm>
#include <cmath>

#include "powsim/rng.hpp"

namespace powsim {

BlockTree::BlockTree() {
    Block genesis;
    genesis.id = kGenesisId;
    genesis.parent = kNoParent;
    genesis.height = 0;
    genesis.producer = kNoProducer;
    genesis.work = 1.0;
    genesis.consensus_valid = true;
    blocks_.push_back(genesis);
    cum_work_.push_back(genesis.work);
    valid_path_.push_back(1);
}

std::uint32_t BlockTree::add(std::uint32_t parent, std::uint32_t producer, double work,
                             bool consensus_valid, std::uint8_t policy_tag) {
    if (parent >= blocks_.size()) throw InvalidArgument("unknown parent block");
    if (work <= 0.0) throw InvalidArgument("block work must be positive");
    Block b;
    b.id = static_cast<std::uint32_t>(blocks_.size());
    b.parent = parent;
    b.height = blocks_[parent].height + 1;
    b.producer = producer;
    b.work = work;
    b.consensus_valid = consensus_valid;
    b.policy_tag = policy_tag;
    blocks_.push_back(b);
    cum_work_.push_back(cum_work_[parent] + work);
    valid_path_.push_back(consensus_valid && valid_path_[parent] ? 1 : 0);
    return b.id;
}

bool BlockTree::is_ancestor(std::uint32_t ancestor, std::uint32_t id) const {
    if (ancestor >= blocks_.size() || id >= blocks_.size())
        throw InvalidArgument("unknown block id");
    std::uint32_t cur = id;
    while (true) {
        if (cur == ancestor) return true;
        if (blocks_[cur].height <= blocks_[ancestor].height) return false;
        cur = blocks_[cur].parent;
    }
}

std::vector<std::uint32_t> BlockTree::ancestor_path(std::uint32_t id) const {
    if (id >= blocks_.size()) throw InvalidArgument("unknown block id");
    std::vector<std::uint32_t> path;
    std::uint32_t cur = id;
    while (true) {
        path.push_back(cur);
        if (blocks_[cur].parent == kNoParent) break;
        cur = blocks_[cur].parent;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

const ChainView& select_best_tip(const std::vector<ChainView>& candidates) {
    if (candidates.empty()) throw InvalidArgument("select_best_tip: empty candidate list");
    const ChainView* best = &candidates[0];
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const ChainView& c = candidates[i];
        if (c.cumulative_work > best->cumulative_work) {
            best = &c;
        } else if (c.cumulative_work == best->cumulative_work) {
            const std::uint32_t ct = c.first_seen_tick(c.tip);
            const std::uint32_t bt = best->first_seen_tick(best->tip);
            if (ct < bt || (ct == bt && c.tip < best->tip)) best = &c;
        }
    }
    return *best;
}

namespace {

void check_race_domain(double q) {
    if (q < 0.0) throw InvalidArgument("attacker fraction q must be >= 0");
    if (q >= 0.5) throw InvalidArgument("attacker fraction q must be < 0.5");
}

} // namespace

double reorg_probability_bound(double q, std::uint32_t delta_h) {
    check_race_domain(q);
    if (delta_h == 0) return 1.0; // nothing to reverse
    if (q == 0.0) return 0.0;

    const long double p = 1.0L - static_cast<long double>(q);
    const long double ratio = static_cast<long double>(q) / p;
    const std::uint32_t z = delta_h;

    // k ~ NegBinomial(z, p): attacker blocks found while the honest chain
    // mines z. nb(k) = C(z-1+k, k) p^z q^k.
    long double nb = 1.0L;
    for (std::uint32_t i = 0; i < z; ++i) nb *= p;
    long double cdf = 0.0L;
    long double prob = 0.0L;
    long double catchup = 1.0L;
    for (std::uint32_t i = 0; i < z; ++i) catchup *= ratio; // (q/p)^z
    for (std::uint32_t k = 0; k < z; ++k) {
        if (k > 0) {
            nb *= static_cast<long double>(z - 1 + k) / static_cast<long double>(k);
            nb *= static_cast<long double>(q);
            catchup /= ratio; // (q/p)^(z-k)
        }
        prob += nb * catchup;
        cdf += nb;
    }
    prob += std::max(0.0L, 1.0L - cdf); // attacker already at or past z
    if (prob > 1.0L) prob = 1.0L;
    return static_cast<double>(prob);
}

double finality_probability(double q, std::uint32_t delta_h) {
    return 1.0 - reorg_probability_bound(q, delta_h);
}

double RaceStats::standard_error() const {
    if (races == 0) return 0.0;
    const double f = frequency();
    return std::sqrt(f * (1.0 - f) / static_cast<double>(races));
}

RaceStats simulate_reorg_races(double q, std::uint32_t delta_h, std::uint64_t races,
                               std::uint64_t seed) {
    check_race_domain(q);
    RaceStats stats;
    stats.races = races;
    // Past this deficit the catch-up probability is below 1e-10 for any
    // q < 0.5 used here; the race is called for the honest side.
    constexpr std::int64_t kAbandon = 200;
    Rng rng(seed, RngStream::Production, delta_h);
    for (std::uint64_t r = 0; r < races; ++r) {
        if (delta_h == 0) {
            ++stats.reversals;
            continue;
        }
        std::uint32_t honest = 0;
        std::int64_t attacker = 0;
        while (honest < delta_h) {
            if (rng.bernoulli(q))
                ++attacker;
            else
                ++honest;
        }
        std::int64_t deficit = static_cast<std::int64_t>(delta_h) - attacker;
        while (deficit > 0 && deficit <= kAbandon) {
            if (rng.bernoulli(q))
                --deficit;
            else
                ++deficit;
        }
        if (deficit <= 0) ++stats.reversals;
    }
    return stats;
}

InertiaFit fit_inertia_rate(const std::vector<std::pair<std::uint32_t, double>>& empirical) {
    std::vector<std::pair<double, double>> pts; // (depth, log frequency)
    InertiaFit fit;
    for (const auto& [depth, freq] : empirical) {
        if (freq < 0.0) throw InvalidArgument("negative frequency");
        if (freq == 0.0) {
            ++fit.dropped_zero_points;
            continue;
        }
        pts.emplace_back(static_cast<double>(depth), std::log(freq));
    }
    if (pts.size() < 3)
        throw DegenerateData("need >= 3 positive-frequency points for an inertia fit");
    const double first = pts[0].second;
    bool all_equal = true;
    for (const auto& [x, y] : pts)
        if (y != first) all_equal = false;
    if (all_equal) throw DegenerateData("all frequencies equal; no decay to fit");

    double sx = 0, sy = 0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
    }
    const double n = static_cast<double>(pts.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) throw DegenerateData("all depths equal; slope undefined");
    const double slope = sxy / sxx;
    fit.lambda = -slope;
    fit.intercept = my - slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

} // namespace powsim
