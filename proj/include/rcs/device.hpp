#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rcs/errors.hpp"

namespace rcs {

inline constexpr int kSchemaVersion = 1;

enum class Pattern : uint8_t { A = 0, B = 1, C = 2, D = 3 };

inline char pattern_char(Pattern p) { return "ABCD"[static_cast<int>(p)]; }

inline Pattern pattern_from_char(char c) {
    switch (c) {
    case 'A': return Pattern::A;
    case 'B': return Pattern::B;
    case 'C': return Pattern::C;
    case 'D': return Pattern::D;
    default: throw ValidationError(std::string("unknown pattern label '") + c + "'");
    }
}

struct QubitId {
    int row = 0;
    int col = 0;

    static QubitId from_linear(int linear, int cols) {
        return QubitId{linear / cols, linear % cols};
    }
    int linear(int cols) const { return row * cols + col; }
    bool operator==(const QubitId&) const = default;
};

// Unordered coupler, stored with a < b.
struct Coupler {
    int a = 0;
    int b = 0;
    Coupler() = default;
    Coupler(int x, int y) : a(std::min(x, y)), b(std::max(x, y)) {}
    bool operator==(const Coupler&) const = default;
    auto operator<=>(const Coupler&) const = default;
};

struct DeviceTopology {
    int rows = 0;
    int cols = 0;
    std::vector<Coupler> couplers;              // sorted, unique
    std::vector<Pattern> pattern_assignment;    // parallel to couplers

    int num_qubits() const { return rows * cols; }

    std::optional<Pattern> pattern_of(const Coupler& c) const {
        auto it = std::lower_bound(couplers.begin(), couplers.end(), c);
        if (it == couplers.end() || !(*it == c)) return std::nullopt;
        return pattern_assignment[static_cast<size_t>(it - couplers.begin())];
    }

    bool has_coupler(int a, int b) const { return pattern_of(Coupler(a, b)).has_value(); }

    std::vector<int> neighbors(int q) const {
        std::vector<int> out;
        for (const auto& c : couplers) {
            if (c.a == q) out.push_back(c.b);
            else if (c.b == q) out.push_back(c.a);
        }
        return out;
    }
};

struct QubitSubset {
    std::string name;
    std::vector<int> active;    // linear ids, order defines bit positions

    int size() const { return static_cast<int>(active.size()); }
    bool contains(int q) const {
        return std::find(active.begin(), active.end(), q) != active.end();
    }
    int bit_of(int q) const {
        auto it = std::find(active.begin(), active.end(), q);
        return it == active.end() ? -1 : static_cast<int>(it - active.begin());
    }
    bool operator==(const QubitSubset&) const = default;
};

// iSWAP-like gate parameters (radians).
struct TwoQubitParams {
    double theta = M_PI / 2.0;
    double phi = 0.0;
    double delta_plus = 0.0;
    double delta_minus = 0.0;
    double delta_minus_off = 0.0;
    bool operator==(const TwoQubitParams&) const = default;
};

struct DeviceProfile {
    std::string name = "unnamed";
    double e1 = 0.0;        // single-qubit Pauli error
    double e2 = 0.0;        // two-qubit Pauli error
    double e_ro = 0.0;      // readout error
    double e_idle = 0.0;    // idle-slot Pauli error
    TwoQubitParams two_qubit;

    // optional per-element overrides
    std::map<int, double> e1_per_qubit;
    std::map<int, double> e_ro_per_qubit;
    std::map<int, double> e_idle_per_qubit;
    std::map<Coupler, double> e2_per_coupler;
    std::map<Coupler, TwoQubitParams> params_per_coupler;

    double t_1q_s = 28e-9;
    double t_2q_s = 45e-9;
    double t_idle_s = 45e-9;
    double sampling_interval_s = 400e-6;

    double e1_for(int q) const {
        auto it = e1_per_qubit.find(q);
        return it == e1_per_qubit.end() ? e1 : it->second;
    }
    double e_ro_for(int q) const {
        auto it = e_ro_per_qubit.find(q);
        return it == e_ro_per_qubit.end() ? e_ro : it->second;
    }
    double e_idle_for(int q) const {
        auto it = e_idle_per_qubit.find(q);
        return it == e_idle_per_qubit.end() ? e_idle : it->second;
    }
    double e2_for(const Coupler& c) const {
        auto it = e2_per_coupler.find(c);
        return it == e2_per_coupler.end() ? e2 : it->second;
    }
    const TwoQubitParams& params_for(const Coupler& c) const {
        auto it = params_per_coupler.find(c);
        return it == params_per_coupler.end() ? two_qubit : it->second;
    }
};

// Diagonal-coupled lattice. Qubit (r, c) couples to (r+1, c), and to
// (r+1, c-1) when r is even, (r+1, c+1) when r is odd, clipped at the
// boundary. Each adjacent-row pair contributes 2*cols - 1 couplers; at
// 15 x 7 this yields 105 qubits and 182 couplers.
//
// Pattern labels: the straight-down and staggered-diagonal coupler
// directions each split by row parity, giving four matchings A-D.
inline DeviceTopology build_topology(int rows, int cols) {
    if (rows < 1 || cols < 1) throw ValidationError("topology needs rows >= 1 and cols >= 1");
    DeviceTopology topo;
    topo.rows = rows;
    topo.cols = cols;
    std::vector<std::pair<Coupler, Pattern>> entries;
    for (int r = 0; r + 1 < rows; ++r) {
        const bool even = (r % 2 == 0);
        for (int c = 0; c < cols; ++c) {
            const int q = r * cols + c;
            entries.emplace_back(Coupler(q, (r + 1) * cols + c),
                                 even ? Pattern::A : Pattern::B);
            const int dc = even ? c - 1 : c + 1;
            if (dc >= 0 && dc < cols) {
                entries.emplace_back(Coupler(q, (r + 1) * cols + dc),
                                     even ? Pattern::C : Pattern::D);
            }
        }
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    topo.couplers.reserve(entries.size());
    topo.pattern_assignment.reserve(entries.size());
    for (const auto& [c, p] : entries) {
        topo.couplers.push_back(c);
        topo.pattern_assignment.push_back(p);
    }
    return topo;
}

// Couplers with the given label whose endpoints both lie in the subset.
inline std::vector<Coupler> pattern_layer(const DeviceTopology& topo,
                                          const QubitSubset& subset,
                                          Pattern label) {
    std::vector<bool> in(static_cast<size_t>(topo.num_qubits()), false);
    for (int q : subset.active) in[static_cast<size_t>(q)] = true;
    std::vector<Coupler> out;
    for (size_t i = 0; i < topo.couplers.size(); ++i) {
        if (topo.pattern_assignment[i] != label) continue;
        const Coupler& c = topo.couplers[i];
        if (in[static_cast<size_t>(c.a)] && in[static_cast<size_t>(c.b)]) out.push_back(c);
    }
    return out;
}

// Rejects duplicates, out-of-range ids, and disconnected subsets.
inline void validate_subset(const DeviceTopology& topo, const QubitSubset& subset) {
    if (subset.active.empty()) throw ValidationError("subset '" + subset.name + "' is empty");
    std::set<int> seen;
    for (int q : subset.active) {
        if (q < 0 || q >= topo.num_qubits())
            throw ValidationError("subset '" + subset.name + "': qubit " + std::to_string(q) +
                                  " outside topology");
        if (!seen.insert(q).second)
            throw ValidationError("subset '" + subset.name + "': duplicate qubit " +
                                  std::to_string(q));
    }
    // BFS over couplers restricted to the subset
    std::set<int> visited;
    std::vector<int> stack{subset.active.front()};
    visited.insert(subset.active.front());
    while (!stack.empty()) {
        int q = stack.back();
        stack.pop_back();
        for (const auto& c : topo.couplers) {
            int other = -1;
            if (c.a == q) other = c.b;
            else if (c.b == q) other = c.a;
            else continue;
            if (seen.count(other) && !visited.count(other)) {
                visited.insert(other);
                stack.push_back(other);
            }
        }
    }
    for (int q : subset.active) {
        if (!visited.count(q))
            throw ValidationError("subset '" + subset.name + "' is disconnected: qubit " +
                                  std::to_string(q) + " unreachable from qubit " +
                                  std::to_string(subset.active.front()));
    }
}

// Rectangular block helper: all lattice qubits with r0 <= row <= r1,
// c0 <= col <= c1, in row-major order.
inline QubitSubset make_block_subset(const DeviceTopology& topo, int r0, int c0, int r1, int c1,
                                     std::string name = "block") {
    if (r0 < 0 || c0 < 0 || r1 >= topo.rows || c1 >= topo.cols || r0 > r1 || c0 > c1)
        throw ValidationError("block subset out of range");
    QubitSubset s;
    s.name = std::move(name);
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) s.active.push_back(r * topo.cols + c);
    return s;
}

// ---- JSON documents -------------------------------------------------------

namespace detail {

inline nlohmann::json parse_document(const std::string& text, const std::string& what) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError(what + ": not valid JSON");
    if (!j.is_object()) throw ParseError(what + ": top level must be an object");
    if (!j.contains("schema_version"))
        throw ParseError(what + ": missing field 'schema_version'");
    if (j["schema_version"].get<int>() != kSchemaVersion)
        throw ParseError(what + ": unsupported schema_version");
    return j;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

template <typename T>
T require_field(const nlohmann::json& j, const std::string& key, const std::string& what) {
    if (!j.contains(key)) throw ParseError(what + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ParseError(what + ": field '" + key + "' has wrong type");
    }
}

} // namespace detail

inline nlohmann::json topology_to_json(const DeviceTopology& topo) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["type"] = "topology";
    j["rows"] = topo.rows;
    j["cols"] = topo.cols;
    auto couplers = nlohmann::json::array();
    std::string patterns;
    for (size_t i = 0; i < topo.couplers.size(); ++i) {
        couplers.push_back({topo.couplers[i].a, topo.couplers[i].b});
        patterns += pattern_char(topo.pattern_assignment[i]);
    }
    j["couplers"] = couplers;
    j["patterns"] = patterns;
    return j;
}

inline DeviceTopology topology_from_json(const nlohmann::json& j) {
    const std::string what = "topology document";
    DeviceTopology topo;
    topo.rows = detail::require_field<int>(j, "rows", what);
    topo.cols = detail::require_field<int>(j, "cols", what);
    auto couplers = detail::require_field<nlohmann::json>(j, "couplers", what);
    auto patterns = detail::require_field<std::string>(j, "patterns", what);
    if (couplers.size() != patterns.size())
        throw ParseError(what + ": 'couplers' and 'patterns' length mismatch");
    std::vector<std::pair<Coupler, Pattern>> entries;
    for (size_t i = 0; i < couplers.size(); ++i) {
        const auto& pr = couplers[i];
        if (!pr.is_array() || pr.size() != 2)
            throw ParseError(what + ": couplers[" + std::to_string(i) + "] must be a pair");
        entries.emplace_back(Coupler(pr[0].get<int>(), pr[1].get<int>()),
                             pattern_from_char(patterns[i]));
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [c, p] : entries) {
        if (c.a < 0 || c.b >= topo.rows * topo.cols)
            throw ParseError(what + ": coupler endpoint outside lattice");
        topo.couplers.push_back(c);
        topo.pattern_assignment.push_back(p);
    }
    return topo;
}

inline nlohmann::json subset_to_json(const QubitSubset& s) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["type"] = "subset";
    j["name"] = s.name;
    j["qubits"] = s.active;
    return j;
}

inline QubitSubset subset_from_json(const nlohmann::json& j) {
    const std::string what = "subset document";
    QubitSubset s;
    s.name = detail::require_field<std::string>(j, "name", what);
    s.active = detail::require_field<std::vector<int>>(j, "qubits", what);
    return s;
}

inline QubitSubset load_subset(const std::string& path) {
    return subset_from_json(detail::parse_document(detail::read_file(path), path));
}

namespace detail {

inline void check_rate(double v, const std::string& field) {
    if (!(v >= 0.0 && v < 1.0))
        throw ValidationError("profile field '" + field + "' = " + std::to_string(v) +
                              " must lie in [0, 1)");
}

inline TwoQubitParams params_from_json(const nlohmann::json& j, const std::string& what) {
    TwoQubitParams p;
    p.theta = require_field<double>(j, "theta", what);
    p.phi = require_field<double>(j, "phi", what);
    p.delta_plus = require_field<double>(j, "delta_plus", what);
    p.delta_minus = require_field<double>(j, "delta_minus", what);
    p.delta_minus_off = require_field<double>(j, "delta_minus_off", what);
    for (double v : {p.theta, p.phi, p.delta_plus, p.delta_minus, p.delta_minus_off})
        if (!std::isfinite(v)) throw ValidationError(what + ": gate angle not finite");
    return p;
}

inline nlohmann::json params_to_json(const TwoQubitParams& p) {
    return {{"theta", p.theta},
            {"phi", p.phi},
            {"delta_plus", p.delta_plus},
            {"delta_minus", p.delta_minus},
            {"delta_minus_off", p.delta_minus_off}};
}

} // namespace detail

inline nlohmann::json profile_to_json(const DeviceProfile& p) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["type"] = "profile";
    j["name"] = p.name;
    j["e1"] = p.e1;
    j["e2"] = p.e2;
    j["e_ro"] = p.e_ro;
    j["e_idle"] = p.e_idle;
    j["two_qubit"] = detail::params_to_json(p.two_qubit);
    j["t_1q_ns"] = p.t_1q_s * 1e9;
    j["t_2q_ns"] = p.t_2q_s * 1e9;
    j["t_idle_ns"] = p.t_idle_s * 1e9;
    j["sampling_interval_us"] = p.sampling_interval_s * 1e6;
    if (!p.e1_per_qubit.empty() || !p.e_ro_per_qubit.empty() || !p.e_idle_per_qubit.empty() ||
        !p.e2_per_coupler.empty() || !p.params_per_coupler.empty()) {
        nlohmann::json per;
        auto qmap = [](const std::map<int, double>& m) {
            nlohmann::json o = nlohmann::json::object();
            for (const auto& [q, v] : m) o[std::to_string(q)] = v;
            return o;
        };
        if (!p.e1_per_qubit.empty()) per["e1"] = qmap(p.e1_per_qubit);
        if (!p.e_ro_per_qubit.empty()) per["e_ro"] = qmap(p.e_ro_per_qubit);
        if (!p.e_idle_per_qubit.empty()) per["e_idle"] = qmap(p.e_idle_per_qubit);
        if (!p.e2_per_coupler.empty()) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& [c, v] : p.e2_per_coupler) arr.push_back({{"coupler", {c.a, c.b}}, {"e2", v}});
            per["e2"] = arr;
        }
        if (!p.params_per_coupler.empty()) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& [c, v] : p.params_per_coupler)
                arr.push_back({{"coupler", {c.a, c.b}}, {"params", detail::params_to_json(v)}});
            per["two_qubit"] = arr;
        }
        j["per_element"] = per;
    }
    return j;
}

inline DeviceProfile profile_from_json(const nlohmann::json& j) {
    const std::string what = "profile document";
    DeviceProfile p;
    p.name = detail::require_field<std::string>(j, "name", what);
    p.e1 = detail::require_field<double>(j, "e1", what);
    p.e2 = detail::require_field<double>(j, "e2", what);
    p.e_ro = detail::require_field<double>(j, "e_ro", what);
    p.e_idle = detail::require_field<double>(j, "e_idle", what);
    detail::check_rate(p.e1, "e1");
    detail::check_rate(p.e2, "e2");
    detail::check_rate(p.e_ro, "e_ro");
    detail::check_rate(p.e_idle, "e_idle");
    p.two_qubit = detail::params_from_json(
        detail::require_field<nlohmann::json>(j, "two_qubit", what), what + ".two_qubit");
    p.t_1q_s = detail::require_field<double>(j, "t_1q_ns", what) * 1e-9;
    p.t_2q_s = detail::require_field<double>(j, "t_2q_ns", what) * 1e-9;
    p.t_idle_s = detail::require_field<double>(j, "t_idle_ns", what) * 1e-9;
    p.sampling_interval_s = detail::require_field<double>(j, "sampling_interval_us", what) * 1e-6;
    if (p.t_1q_s <= 0 || p.t_2q_s <= 0 || p.t_idle_s <= 0 || p.sampling_interval_s <= 0)
        throw ValidationError(what + ": durations must be positive");
    if (j.contains("per_element")) {
        const auto& per = j["per_element"];
        auto qmap = [&](const char* key, std::map<int, double>& out) {
            if (!per.contains(key)) return;
            for (const auto& [k, v] : per[key].items()) {
                double r = v.get<double>();
                detail::check_rate(r, std::string("per_element.") + key);
                out[std::stoi(k)] = r;
            }
        };
        qmap("e1", p.e1_per_qubit);
        qmap("e_ro", p.e_ro_per_qubit);
        qmap("e_idle", p.e_idle_per_qubit);
        if (per.contains("e2")) {
            for (const auto& e : per["e2"]) {
                auto c = e.at("coupler");
                double r = e.at("e2").get<double>();
                detail::check_rate(r, "per_element.e2");
                p.e2_per_coupler[Coupler(c[0].get<int>(), c[1].get<int>())] = r;
            }
        }
        if (per.contains("two_qubit")) {
            for (const auto& e : per["two_qubit"]) {
                auto c = e.at("coupler");
                p.params_per_coupler[Coupler(c[0].get<int>(), c[1].get<int>())] =
                    detail::params_from_json(e.at("params"), what + ".per_element.two_qubit");
            }
        }
    }
    return p;
}

inline DeviceProfile load_profile(const std::string& path) {
    return profile_from_json(detail::parse_document(detail::read_file(path), path));
}

inline DeviceTopology load_topology(const std::string& path) {
    return topology_from_json(detail::parse_document(detail::read_file(path), path));
}

} // namespace rcs
