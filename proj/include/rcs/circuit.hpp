#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcs/device.hpp"
#include "rcs/errors.hpp"
#include "rcs/gates.hpp"
#include "rcs/rng.hpp"

namespace rcs {

struct TwoQubitGate {
    Coupler coupler;
    TwoQubitParams params;
    bool operator==(const TwoQubitGate&) const = default;
};

// Patch partition: k disjoint connected regions covering the subset.
using PatchRegions = std::vector<std::vector<int>>;

// One cycle = one single-qubit layer followed by one patterned two-qubit
// layer; a trailing single-qubit layer precedes measurement.
struct Circuit {
    QubitSubset subset;
    int cycles = 0;
    std::string pattern_sequence = "ABCDCDAB";
    uint64_t seed = 0;
    bool no_repeat = true;
    std::vector<std::vector<Gate1QKind>> one_q_layers;   // cycles+1 entries of subset.size()
    std::vector<std::vector<TwoQubitGate>> two_q_layers; // cycles entries, each a matching
    PatchRegions patch_regions;                          // empty when unpatched

    int n() const { return subset.size(); }
    bool patched() const { return !patch_regions.empty(); }
    bool operator==(const Circuit&) const = default;
};

struct GateCounts {
    long long n_1q = 0;
    long long n_2q = 0;
    long long n_idle = 0;
    long long n_measured = 0;
    bool operator==(const GateCounts&) const = default;
};

namespace detail {

// Kind for qubit q at layer t: a pure function of (seed, t, q), so parallel
// generation cannot reorder draws. With no_repeat the draw is uniform over
// the two kinds differing from the previous layer's.
inline Gate1QKind pick_gate1q(uint64_t seed, int layer, int qubit, bool no_repeat,
                              Gate1QKind prev) {
    const uint64_t r = hash_key(seed, static_cast<uint64_t>(layer), static_cast<uint64_t>(qubit));
    if (layer == 0 || !no_repeat) return static_cast<Gate1QKind>(r % 3);
    const int p = static_cast<int>(prev);
    const int choice = static_cast<int>(r % 2);
    return static_cast<Gate1QKind>((p + 1 + choice) % 3);
}

} // namespace detail

inline Circuit generate(const DeviceTopology& topo, const QubitSubset& subset, int cycles,
                        uint64_t seed, const std::string& sequence = "ABCDCDAB",
                        const DeviceProfile& profile = DeviceProfile{}, bool no_repeat = true) {
    if (subset.active.empty()) throw ValidationError("generate: subset is empty");
    if (cycles < 1) throw ValidationError("generate: cycles must be >= 1");
    if (sequence.empty()) throw ValidationError("generate: pattern sequence is empty");
    for (char c : sequence) pattern_from_char(c);
    validate_subset(topo, subset);

    Circuit circ;
    circ.subset = subset;
    circ.cycles = cycles;
    circ.pattern_sequence = sequence;
    circ.seed = seed;
    circ.no_repeat = no_repeat;

    const int n = subset.size();
    circ.one_q_layers.assign(static_cast<size_t>(cycles) + 1, std::vector<Gate1QKind>(n));
    for (int t = 0; t <= cycles; ++t) {
        for (int i = 0; i < n; ++i) {
            Gate1QKind prev = (t > 0) ? circ.one_q_layers[t - 1][i] : Gate1QKind::SX;
            circ.one_q_layers[t][i] =
                detail::pick_gate1q(seed, t, subset.active[i], no_repeat, prev);
        }
    }
    circ.two_q_layers.resize(static_cast<size_t>(cycles));
    for (int t = 0; t < cycles; ++t) {
        Pattern label = pattern_from_char(sequence[static_cast<size_t>(t) % sequence.size()]);
        for (const Coupler& c : pattern_layer(topo, subset, label))
            circ.two_q_layers[t].push_back({c, profile.params_for(c)});
    }
    return circ;
}

inline void validate_patch(const DeviceTopology& topo, const QubitSubset& subset,
                           const PatchRegions& regions) {
    if (regions.empty()) throw ValidationError("patch: no regions given");
    std::set<int> covered;
    for (size_t i = 0; i < regions.size(); ++i) {
        if (regions[i].empty())
            throw ValidationError("patch: region " + std::to_string(i) + " is empty");
        for (int q : regions[i]) {
            if (!subset.contains(q))
                throw ValidationError("patch: region " + std::to_string(i) + " contains qubit " +
                                      std::to_string(q) + " outside the circuit subset");
            if (!covered.insert(q).second)
                throw ValidationError("patch: qubit " + std::to_string(q) +
                                      " appears in two regions");
        }
        QubitSubset region;
        region.name = subset.name + "/patch" + std::to_string(i);
        region.active = regions[i];
        validate_subset(topo, region);
    }
    if (static_cast<int>(covered.size()) != subset.size())
        throw ValidationError("patch: regions do not cover the subset");
}

// Deletes every two-qubit gate whose endpoints lie in different regions.
inline Circuit apply_patch(const Circuit& circ, const PatchRegions& regions,
                           const DeviceTopology& topo) {
    validate_patch(topo, circ.subset, regions);
    std::vector<int> region_of(static_cast<size_t>(topo.num_qubits()), -1);
    for (size_t i = 0; i < regions.size(); ++i)
        for (int q : regions[i]) region_of[static_cast<size_t>(q)] = static_cast<int>(i);
    Circuit out = circ;
    out.patch_regions = regions;
    for (auto& layer : out.two_q_layers) {
        std::erase_if(layer, [&](const TwoQubitGate& g) {
            return region_of[static_cast<size_t>(g.coupler.a)] !=
                   region_of[static_cast<size_t>(g.coupler.b)];
        });
    }
    return out;
}

// Partition by contiguous row bands with roughly equal qubit counts.
inline PatchRegions patch_by_rows(const DeviceTopology& topo, const QubitSubset& subset, int k) {
    if (k < 1) throw ValidationError("patch_by_rows: k must be >= 1");
    std::vector<int> rows;
    for (int q : subset.active) rows.push_back(q / topo.cols);
    std::vector<int> distinct = rows;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (static_cast<int>(distinct.size()) < k)
        throw ValidationError("patch_by_rows: fewer distinct rows than regions");
    // cumulative qubit counts per row, cut at k-1 balanced thresholds
    PatchRegions regions(static_cast<size_t>(k));
    const double per = static_cast<double>(subset.size()) / k;
    int assigned = 0;
    size_t band = 0;
    for (int row : distinct) {
        long long count = std::count(rows.begin(), rows.end(), row);
        if (band + 1 < static_cast<size_t>(k) && !regions[band].empty() &&
            assigned + count / 2.0 > per * static_cast<double>(band + 1))
            ++band;
        for (size_t i = 0; i < subset.active.size(); ++i)
            if (rows[i] == row) regions[band].push_back(subset.active[i]);
        assigned += static_cast<int>(count);
    }
    return regions;
}

inline GateCounts gate_counts(const Circuit& circ) {
    GateCounts gc;
    const long long n = circ.n();
    gc.n_1q = n * static_cast<long long>(circ.cycles + 1);
    for (const auto& layer : circ.two_q_layers) {
        gc.n_2q += static_cast<long long>(layer.size());
        gc.n_idle += n - 2 * static_cast<long long>(layer.size());
    }
    gc.n_measured = n;
    return gc;
}

// ---- serialization --------------------------------------------------------

inline nlohmann::json circuit_to_json(const Circuit& circ) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["type"] = "circuit";
    j["subset"] = subset_to_json(circ.subset);
    j["cycles"] = circ.cycles;
    j["pattern_sequence"] = circ.pattern_sequence;
    j["seed"] = circ.seed;
    j["no_repeat"] = circ.no_repeat;
    auto layers = nlohmann::json::array();
    for (int t = 0; t <= circ.cycles; ++t) {
        nlohmann::json oneq;
        oneq["layer"] = 2 * t;
        oneq["kind"] = "1q";
        auto gates = nlohmann::json::array();
        for (int i = 0; i < circ.n(); ++i)
            gates.push_back({{"qubit", circ.subset.active[static_cast<size_t>(i)]},
                             {"gate", gate1q_name(circ.one_q_layers[t][i])}});
        oneq["gates"] = gates;
        layers.push_back(oneq);
        if (t == circ.cycles) break;
        nlohmann::json twoq;
        twoq["layer"] = 2 * t + 1;
        twoq["kind"] = "2q";
        auto g2 = nlohmann::json::array();
        for (const auto& g : circ.two_q_layers[t])
            g2.push_back({{"qubits", {g.coupler.a, g.coupler.b}},
                          {"params", detail::params_to_json(g.params)}});
        twoq["gates"] = g2;
        layers.push_back(twoq);
    }
    j["layers"] = layers;
    if (circ.patched()) j["patch_regions"] = circ.patch_regions;
    return j;
}

inline Circuit circuit_from_json(const nlohmann::json& j) {
    const std::string what = "circuit document";
    Circuit circ;
    circ.subset = subset_from_json(detail::require_field<nlohmann::json>(j, "subset", what));
    circ.cycles = detail::require_field<int>(j, "cycles", what);
    circ.pattern_sequence = detail::require_field<std::string>(j, "pattern_sequence", what);
    circ.seed = detail::require_field<uint64_t>(j, "seed", what);
    circ.no_repeat = detail::require_field<bool>(j, "no_repeat", what);
    if (circ.cycles < 0) throw ParseError(what + ": negative cycle count");
    const auto layers = detail::require_field<nlohmann::json>(j, "layers", what);
    if (layers.size() != static_cast<size_t>(2 * circ.cycles + 1))
        throw ParseError(what + ": expected " + std::to_string(2 * circ.cycles + 1) +
                         " layers, found " + std::to_string(layers.size()));
    const int n = circ.n();
    for (size_t li = 0; li < layers.size(); ++li) {
        const auto& layer = layers[li];
        const std::string where = what + ": layers[" + std::to_string(li) + "]";
        const auto kind = detail::require_field<std::string>(layer, "kind", where);
        const auto gates = detail::require_field<nlohmann::json>(layer, "gates", where);
        if (li % 2 == 0) {
            if (kind != "1q") throw ParseError(where + ": expected kind '1q'");
            if (gates.size() != static_cast<size_t>(n))
                throw ParseError(where + ": expected one gate per active qubit");
            std::vector<Gate1QKind> row(static_cast<size_t>(n));
            std::vector<bool> seen(static_cast<size_t>(n), false);
            for (const auto& g : gates) {
                int q = detail::require_field<int>(g, "qubit", where);
                int bit = circ.subset.bit_of(q);
                if (bit < 0) throw ParseError(where + ": qubit " + std::to_string(q) +
                                              " not in subset");
                if (seen[static_cast<size_t>(bit)])
                    throw ParseError(where + ": duplicate gate on qubit " + std::to_string(q));
                seen[static_cast<size_t>(bit)] = true;
                row[static_cast<size_t>(bit)] =
                    gate1q_from_name(detail::require_field<std::string>(g, "gate", where));
            }
            circ.one_q_layers.push_back(std::move(row));
        } else {
            if (kind != "2q") throw ParseError(where + ": expected kind '2q'");
            std::vector<TwoQubitGate> row;
            std::set<int> used;
            for (const auto& g : gates) {
                auto qs = detail::require_field<std::vector<int>>(g, "qubits", where);
                if (qs.size() != 2) throw ParseError(where + ": 2q gate needs two qubits");
                for (int q : qs) {
                    if (circ.subset.bit_of(q) < 0)
                        throw ParseError(where + ": qubit " + std::to_string(q) +
                                         " not in subset");
                    if (!used.insert(q).second)
                        throw ParseError(where + ": qubit " + std::to_string(q) +
                                         " used by two gates in one layer");
                }
                row.push_back({Coupler(qs[0], qs[1]),
                               detail::params_from_json(
                                   detail::require_field<nlohmann::json>(g, "params", where),
                                   where)});
            }
            circ.two_q_layers.push_back(std::move(row));
        }
    }
    if (j.contains("patch_regions")) circ.patch_regions = j["patch_regions"].get<PatchRegions>();
    return circ;
}

inline Circuit load_circuit(const std::string& path) {
    return circuit_from_json(detail::parse_document(detail::read_file(path), path));
}

} // namespace rcs
