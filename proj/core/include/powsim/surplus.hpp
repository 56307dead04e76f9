// Validation-surplus accounting over transaction classes and the entropy
// inefficiency ratio.

#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "powsim/errors.hpp"

namespace powsim {

enum class TxClass : std::uint8_t {
    T1Standard = 0,  // plain payment outputs
    T2Metadata = 1,  // metadata-carrying transactions
    T3Malformed = 2, // malformed inputs or scripts
    T4Orphaned = 3   // transactions in blocks orphaned by the canonical chain
};

constexpr std::array<TxClass, 4> kAllTxClasses{TxClass::T1Standard, TxClass::T2Metadata,
                                               TxClass::T3Malformed, TxClass::T4Orphaned};

const char* tx_class_name(TxClass c);

struct CostModel {
    std::array<double, 4> c_home{1.0, 1.0, 1.0, 1.0};   // validation cost per tx
    std::array<double, 4> c_reject{1.0, 1.0, 1.0, 1.0}; // detection utility per invalid tx
    std::array<double, 4> invalid_probability{1e-5, 1e-5, 0.999, 1e-5};

    void validate() const;
    std::uint64_t hash() const;
    static CostModel defaults() { return CostModel{}; }
};

// Sum over sampled transactions of c_home - 1[invalid] * c_reject, with
// invalidity drawn per class. Deterministic per seed.
double validation_surplus(TxClass tx_class, const CostModel& model,
                          std::uint32_t sample_count, std::uint64_t seed);

// Surplus normalized by the all-valid cost: surplus / (samples * c_home).
double surplus_ratio(TxClass tx_class, const CostModel& model, std::uint32_t sample_count,
                     std::uint64_t seed);

// cost / probability, with an explicit divergent marker at probability 0.
struct InefficiencyRatio {
    bool divergent = false;
    double value = 0.0;
};

InefficiencyRatio entropy_inefficiency_ratio(double redundant_cost,
                                             double enforcement_effect_probability);

// Rejection-latency excess of full validation over header-following:
// mean HFN reject latency (delivery lag + parse delay) relative to mean SPV
// confirmation latency (delivery lag), minus one. A calibration report, not
// an invariant; parse_delay defaults land near the observed one-third excess.
double rejection_latency_excess(double mean_delivery_lag_ticks, double parse_delay_ticks);

// CSV row set: class,samples,surplus,ratio,model_hash.
std::string surplus_report_csv(const CostModel& model, std::uint32_t sample_count,
                               std::uint64_t seed);

} // namespace powsim
