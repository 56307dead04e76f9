// Blocks, per-node chain views, cumulative-work fork choice, and the analytic
// finality / reorg-probability formulas with their Monte Carlo race twin.

#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "powsim/errors.hpp"

namespace powsim {

constexpr std::uint32_t kGenesisId = 0;
constexpr std::uint32_t kNoParent = 0xffffffffu;
constexpr std::uint32_t kNoProducer = 0xffffffffu;

struct Block {
    std::uint32_t id = 0;
    std::uint32_t parent = kNoParent;
    std::uint32_t height = 0;
    std::uint32_t producer = kNoProducer;
    double work = 1.0;
    bool consensus_valid = true;
    std::uint8_t policy_tag = 0;
    std::array<std::uint32_t, 4> tx_class_counts{}; // indexed by TxClass
};

// Append-only tree of blocks, ids dense from 0 (genesis).
class BlockTree {
public:
    BlockTree();

    std::uint32_t add(std::uint32_t parent, std::uint32_t producer, double work,
                      bool consensus_valid, std::uint8_t policy_tag);

    const Block& at(std::uint32_t id) const { return blocks_.at(id); }
    std::size_t size() const { return blocks_.size(); }
    const std::vector<Block>& blocks() const { return blocks_; }

    double cumulative_work(std::uint32_t id) const { return cum_work_.at(id); }
    // True when every block on the path to genesis is consensus-valid.
    bool valid_path(std::uint32_t id) const { return valid_path_.at(id); }

    // Is `ancestor` on the path from `id` to genesis (inclusive)?
    bool is_ancestor(std::uint32_t ancestor, std::uint32_t id) const;
    std::vector<std::uint32_t> ancestor_path(std::uint32_t id) const; // genesis..id

private:
    std::vector<Block> blocks_;
    std::vector<double> cum_work_;
    std::vector<char> valid_path_;
};

// A node's view of the chain: adopted tip plus local first-seen times.
struct ChainView {
    std::uint32_t tip = kGenesisId;
    double cumulative_work = 1.0;
    std::unordered_map<std::uint32_t, std::uint32_t> first_seen; // block -> tick

    std::uint32_t first_seen_tick(std::uint32_t block) const {
        auto it = first_seen.find(block);
        return it == first_seen.end() ? 0xffffffffu : it->second;
    }
};

// Greatest cumulative work wins; ties break on earliest first-seen tick of
// the tip, then smallest block id. Total order, so folds in any order agree.
const ChainView& select_best_tip(const std::vector<ChainView>& candidates);

// Probability that an attacker with hashrate fraction q reverses a block
// buried under delta_h confirmations. Closed form for the block-by-block
// race: the attacker's head start while the honest chain mines delta_h
// blocks is negative-binomial, after which catch-up from d behind succeeds
// with probability (q/p)^d. simulate_reorg_races runs the identical race
// draw-by-draw, so the two routes can check each other.
double reorg_probability_bound(double q, std::uint32_t delta_h);

// 1 - reorg_probability_bound; strictly increasing in delta_h for 0<q<0.5.
double finality_probability(double q, std::uint32_t delta_h);

struct RaceStats {
    std::uint64_t races = 0;
    std::uint64_t reversals = 0;
    double frequency() const {
        return races == 0 ? 0.0 : static_cast<double>(reversals) / static_cast<double>(races);
    }
    double standard_error() const;
};

RaceStats simulate_reorg_races(double q, std::uint32_t delta_h, std::uint64_t races,
                               std::uint64_t seed);

struct InertiaFit {
    double lambda = 0.0;    // decay rate, -slope of log-frequency vs depth
    double intercept = 0.0; // fitted log-frequency at depth 0
    double r_squared = 0.0;
    std::uint32_t dropped_zero_points = 0;
};

// Least-squares fit of log(frequency) against confirmation depth.
// Zero-frequency points are dropped (counted); fewer than 3 surviving points
// or an all-equal frequency profile is DegenerateData.
InertiaFit fit_inertia_rate(const std::vector<std::pair<std::uint32_t, double>>& empirical);

} // namespace powsim
