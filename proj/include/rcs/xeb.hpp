#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcs/errors.hpp"
#include "rcs/simulator.hpp"

namespace rcs {

struct FidelityEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    long long num_samples = 1;
    std::string method = "linear_xeb";

    nlohmann::json to_json() const {
        return {{"schema_version", kSchemaVersion}, {"type", "fidelity_estimate"},
                {"value", value}, {"stderr", stderr_}, {"N", num_samples},
                {"method", method}};
    }
};

// F = D * mean(p(x_i)) - 1 with D = 2^n; stderr = 1/sqrt(N) (small-f leading
// term, approximate near f = 1).
inline FidelityEstimate linear_xeb(const SampleSet& samples, int n) {
    if (samples.bitstrings.empty()) throw ValidationError("linear_xeb: no samples");
    if (!samples.has_probs())
        throw ValidationError("linear_xeb: samples carry no ideal probabilities");
    const double dim = std::ldexp(1.0, n);
    double sum = 0.0;
    for (double p : samples.ideal_probs) sum += p;
    const auto count = static_cast<long long>(samples.ideal_probs.size());
    FidelityEstimate est;
    est.value = dim * sum / static_cast<double>(count) - 1.0;
    est.stderr_ = 1.0 / std::sqrt(static_cast<double>(count));
    est.num_samples = count;
    est.method = "linear_xeb";
    return est;
}

// Kolmogorov-Smirnov distance between the empirical distribution of D*p over
// all D entries and Exp(1), the Porter-Thomas limit.
inline double porter_thomas_test(const std::vector<double>& probabilities, double dim) {
    if (probabilities.empty()) throw ValidationError("porter_thomas_test: empty vector");
    std::vector<double> scaled(probabilities.size());
    for (size_t i = 0; i < probabilities.size(); ++i) scaled[i] = dim * probabilities[i];
    std::sort(scaled.begin(), scaled.end());
    const auto m = static_cast<double>(scaled.size());
    double ks = 0.0;
    for (size_t i = 0; i < scaled.size(); ++i) {
        const double cdf = 1.0 - std::exp(-scaled[i]);
        ks = std::max(ks, std::abs(static_cast<double>(i) / m - cdf));
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / m - cdf));
    }
    return ks;
}

// sqrt(max(0, D^2 * Var(p))) with the population variance over all D entries;
// converges to f for p = f * p_PT + (1 - f)/D.
inline FidelityEstimate speckle_purity(const std::vector<double>& probabilities, double dim) {
    if (probabilities.empty()) throw ValidationError("speckle_purity: empty vector");
    const auto m = static_cast<double>(probabilities.size());
    double mean = 0.0;
    for (double p : probabilities) mean += p;
    mean /= m;
    double var = 0.0;
    for (double p : probabilities) var += (p - mean) * (p - mean);
    var /= m;
    FidelityEstimate est;
    est.value = std::sqrt(std::max(0.0, dim * dim * var));
    est.stderr_ = 0.0;
    est.num_samples = static_cast<long long>(m);
    est.method = "speckle_purity";
    return est;
}

struct StabilityPoint {
    double timestamp = 0.0;
    double value = 0.0;
    bool pass = false;
};

struct StabilityReport {
    double estimate = 0.0;
    double band = 0.25;
    std::vector<StabilityPoint> series;
    bool overall_pass = false;

    double lower() const { return estimate * (1.0 - band); }
    double upper() const { return estimate * (1.0 + band); }

    // CSV rows: timestamp, value, lower, upper, verdict
    std::string to_csv() const {
        std::string out = "timestamp,value,lower,upper,verdict\n";
        char buf[160];
        for (const auto& pt : series) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%s\n", pt.timestamp,
                          pt.value, lower(), upper(), pt.pass ? "pass" : "fail");
            out += buf;
        }
        return out;
    }
};

// A point passes iff it lies inside estimate * (1 +- band).
inline StabilityReport stability_check(const std::vector<std::pair<double, double>>& series,
                                       double estimate, double band = 0.25) {
    if (series.empty()) throw ValidationError("stability_check: empty series");
    if (!(estimate > 0.0)) throw ValidationError("stability_check: estimate must be > 0");
    if (!(band > 0.0 && band < 1.0)) throw ValidationError("stability_check: band must lie in (0, 1)");
    StabilityReport rep;
    rep.estimate = estimate;
    rep.band = band;
    rep.overall_pass = true;
    for (const auto& [ts, v] : series) {
        StabilityPoint pt{ts, v, v >= rep.lower() && v <= rep.upper()};
        rep.overall_pass = rep.overall_pass && pt.pass;
        rep.series.push_back(pt);
    }
    return rep;
}

} // namespace rcs
