#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcs/circuit.hpp"
#include "rcs/device.hpp"
#include "rcs/xeb.hpp"

namespace rcs {

struct ErrorContribution {
    std::string component;   // 1q | 2q | idle | readout
    long long count = 0;
    double mean_rate = 0.0;
    double log_fidelity = 0.0;   // sum of count * ln(1 - rate) terms
};

// Digital error model: F = prod (1 - e) over every executed gate, idle slot,
// and readout, accumulated per component kind in the log domain.
struct ErrorBudget {
    std::vector<ErrorContribution> contributions;
    double spam_correction = 1.0;   // optional multiplicative factor, default 1

    double log_fidelity() const {
        double s = 0.0;
        for (const auto& c : contributions) s += c.log_fidelity;
        return s;
    }
    double predicted_fidelity() const { return std::exp(log_fidelity()) * spam_correction; }

    nlohmann::json to_json() const {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& c : contributions)
            rows.push_back({{"component", c.component}, {"count", c.count},
                            {"mean_rate", c.mean_rate}, {"log_fidelity", c.log_fidelity}});
        return {{"schema_version", kSchemaVersion}, {"type", "error_budget"},
                {"contributions", rows}, {"spam_correction", spam_correction},
                {"predicted_fidelity", predicted_fidelity()}};
    }

    std::string to_table() const {
        char buf[160];
        std::string out = "component     count        mean rate    log fidelity\n";
        for (const auto& c : contributions) {
            std::snprintf(buf, sizeof(buf), "%-12s %-12lld %-12.4e %-.6e\n", c.component.c_str(),
                          c.count, c.mean_rate, c.log_fidelity);
            out += buf;
        }
        std::snprintf(buf, sizeof(buf), "predicted fidelity: %.6e\n", predicted_fidelity());
        out += buf;
        return out;
    }
};

inline ErrorBudget error_budget(const Circuit& circ, const DeviceProfile& profile,
                                double spam_correction = 1.0) {
    ErrorBudget budget;
    budget.spam_correction = spam_correction;
    const int n = circ.n();

    ErrorContribution oneq{"1q", 0, 0.0, 0.0};
    double rate_sum_1q = 0.0;
    for (const auto& layer : circ.one_q_layers) {
        (void)layer;
        for (int i = 0; i < n; ++i) {
            const double e = profile.e1_for(circ.subset.active[static_cast<size_t>(i)]);
            oneq.count += 1;
            rate_sum_1q += e;
            oneq.log_fidelity += std::log1p(-e);
        }
    }
    oneq.mean_rate = oneq.count ? rate_sum_1q / static_cast<double>(oneq.count) : 0.0;

    ErrorContribution twoq{"2q", 0, 0.0, 0.0};
    ErrorContribution idle{"idle", 0, 0.0, 0.0};
    double rate_sum_2q = 0.0, rate_sum_idle = 0.0;
    for (const auto& layer : circ.two_q_layers) {
        std::vector<bool> busy(static_cast<size_t>(n), false);
        for (const auto& g : layer) {
            busy[static_cast<size_t>(circ.subset.bit_of(g.coupler.a))] = true;
            busy[static_cast<size_t>(circ.subset.bit_of(g.coupler.b))] = true;
            const double e = profile.e2_for(g.coupler);
            twoq.count += 1;
            rate_sum_2q += e;
            twoq.log_fidelity += std::log1p(-e);
        }
        for (int i = 0; i < n; ++i) {
            if (busy[static_cast<size_t>(i)]) continue;
            const double e = profile.e_idle_for(circ.subset.active[static_cast<size_t>(i)]);
            idle.count += 1;
            rate_sum_idle += e;
            idle.log_fidelity += std::log1p(-e);
        }
    }
    twoq.mean_rate = twoq.count ? rate_sum_2q / static_cast<double>(twoq.count) : 0.0;
    idle.mean_rate = idle.count ? rate_sum_idle / static_cast<double>(idle.count) : 0.0;

    ErrorContribution ro{"readout", 0, 0.0, 0.0};
    double rate_sum_ro = 0.0;
    for (int q : circ.subset.active) {
        const double e = profile.e_ro_for(q);
        ro.count += 1;
        rate_sum_ro += e;
        ro.log_fidelity += std::log1p(-e);
    }
    ro.mean_rate = ro.count ? rate_sum_ro / static_cast<double>(ro.count) : 0.0;

    budget.contributions = {oneq, twoq, idle, ro};
    return budget;
}

inline FidelityEstimate predict_fidelity(const Circuit& circ, const DeviceProfile& profile,
                                         double spam_correction = 1.0) {
    ErrorBudget budget = error_budget(circ, profile, spam_correction);
    FidelityEstimate est;
    est.value = budget.predicted_fidelity();
    est.stderr_ = 0.0;
    est.num_samples = 1;
    est.method = "error_model";
    return est;
}

// F_est(patched) / F_est(full); >= 1 for nonnegative rates since patching
// only removes gates (turning their qubits into idle slots).
inline double patch_ratio(const Circuit& circ, const PatchRegions& regions,
                          const DeviceTopology& topo, const DeviceProfile& profile) {
    Circuit patched = apply_patch(circ, regions, topo);
    const double log_full = error_budget(circ, profile).log_fidelity();
    const double log_patched = error_budget(patched, profile).log_fidelity();
    return std::exp(log_patched - log_full);
}

// N shots at the device sampling interval.
inline double estimate_quantum_runtime(long long num_shots, const DeviceProfile& profile) {
    if (num_shots < 1) throw ValidationError("estimate_quantum_runtime: shots must be >= 1");
    return static_cast<double>(num_shots) * profile.sampling_interval_s;
}

} // namespace rcs
