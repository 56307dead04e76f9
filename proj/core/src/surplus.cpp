#include "powsim/surplus.hpp"

#include <cstdio>
#include <sstream>

#include "powsim/hash.hpp"
#include "powsim/rng.hpp"

namespace powsim {

const char* tx_class_name(TxClass c) {
    switch (c) {
        case TxClass::T1Standard: return "t1_standard";
        case TxClass::T2Metadata: return "t2_metadata";
        case TxClass::T3Malformed: return "t3_malformed";
        case TxClass::T4Orphaned: return "t4_orphaned";
    }
    return "unknown";
}

void CostModel::validate() const {
    for (std::size_t i = 0; i < 4; ++i) {
        if (c_home[i] < 0 || c_reject[i] < 0)
            throw InvalidArgument("cost model entries must be >= 0");
        if (invalid_probability[i] < 0 || invalid_probability[i] > 1)
            throw InvalidArgument("invalid probability must be in [0,1]");
    }
}

std::uint64_t CostModel::hash() const {
    std::ostringstream s;
    char buf[64];
    for (std::size_t i = 0; i < 4; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g|%.17g|%.17g;", c_home[i], c_reject[i],
                      invalid_probability[i]);
        s << buf;
    }
    return fnv1a64(s.str());
}

double validation_surplus(TxClass tx_class, const CostModel& model,
                          std::uint32_t sample_count, std::uint64_t seed) {
    model.validate();
    if (sample_count < 1) throw InvalidArgument("sample_count must be >= 1");
    const auto idx = static_cast<std::size_t>(tx_class);
    Rng rng(seed, RngStream::Surplus, idx);
    double total = 0.0;
    for (std::uint32_t i = 0; i < sample_count; ++i) {
        const bool invalid = rng.bernoulli(model.invalid_probability[idx]);
        total += model.c_home[idx] - (invalid ? model.c_reject[idx] : 0.0);
    }
    return total;
}

double surplus_ratio(TxClass tx_class, const CostModel& model, std::uint32_t sample_count,
                     std::uint64_t seed) {
    const auto idx = static_cast<std::size_t>(tx_class);
    if (model.c_home[idx] <= 0.0)
        throw InvalidArgument("surplus ratio undefined for zero validation cost");
    const double surplus = validation_surplus(tx_class, model, sample_count, seed);
    return surplus / (static_cast<double>(sample_count) * model.c_home[idx]);
}

InefficiencyRatio entropy_inefficiency_ratio(double redundant_cost,
                                             double enforcement_effect_probability) {
    if (redundant_cost < 0) throw InvalidArgument("redundant cost must be >= 0");
    if (enforcement_effect_probability < 0 || enforcement_effect_probability > 1)
        throw InvalidArgument("probability must be in [0,1]");
    InefficiencyRatio r;
    if (redundant_cost == 0.0) return r; // zero cost, zero ratio
    if (enforcement_effect_probability == 0.0) {
        r.divergent = true;
        return r;
    }
    r.value = redundant_cost / enforcement_effect_probability;
    return r;
}

double rejection_latency_excess(double mean_delivery_lag_ticks, double parse_delay_ticks) {
    if (mean_delivery_lag_ticks <= 0)
        throw InvalidArgument("delivery lag must be positive");
    if (parse_delay_ticks < 0) throw InvalidArgument("parse delay must be >= 0");
    const double hfn = mean_delivery_lag_ticks + parse_delay_ticks;
    return hfn / mean_delivery_lag_ticks - 1.0;
}

std::string surplus_report_csv(const CostModel& model, std::uint32_t sample_count,
                               std::uint64_t seed) {
    std::ostringstream out;
    char buf[64];
    out << "class,samples,surplus,ratio,model_hash\n";
    for (TxClass c : kAllTxClasses) {
        const double s = validation_surplus(c, model, sample_count, seed);
        const double r = surplus_ratio(c, model, sample_count, seed);
        std::snprintf(buf, sizeof buf, "%.17g", s);
        out << tx_class_name(c) << ',' << sample_count << ',' << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", r);
        out << buf << ',' << model.hash() << '\n';
    }
    return out.str();
}

} // namespace powsim
