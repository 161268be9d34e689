#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rcs/circuit.hpp"
#include "rcs/errors.hpp"
#include "rcs/gates.hpp"
#include "rcs/rng.hpp"

namespace rcs {

inline constexpr int kDefaultQubitLimit = 26;

struct StateVector {
    int n = 0;
    std::vector<cplx> amp;

    double norm_sq() const {
        double s = 0.0;
        for (const auto& a : amp) s += std::norm(a);
        return s;
    }
};

namespace detail {

inline void apply_1q(std::vector<cplx>& amp, int bit, const Mat2& u) {
    const size_t mask = size_t{1} << bit;
    const size_t dim = amp.size();
    for (size_t base = 0; base < dim; ++base) {
        if (base & mask) continue;
        const cplx a0 = amp[base];
        const cplx a1 = amp[base | mask];
        amp[base] = u[0] * a0 + u[1] * a1;
        amp[base | mask] = u[2] * a0 + u[3] * a1;
    }
}

// u is 4x4 on basis {00,01,10,11} with the first label bit = qubit at bit_hi.
inline void apply_2q(std::vector<cplx>& amp, int bit_hi, int bit_lo, const Mat4& u) {
    const size_t mh = size_t{1} << bit_hi;
    const size_t ml = size_t{1} << bit_lo;
    const size_t dim = amp.size();
    for (size_t base = 0; base < dim; ++base) {
        if (base & (mh | ml)) continue;
        cplx v[4] = {amp[base], amp[base | ml], amp[base | mh], amp[base | mh | ml]};
        for (int r = 0; r < 4; ++r) {
            cplx acc = 0.0;
            for (int c = 0; c < 4; ++c) acc += u[r * 4 + c] * v[c];
            const size_t idx = base | (r & 1 ? ml : 0) | (r & 2 ? mh : 0);
            amp[idx] = acc;
        }
    }
}

// Pauli codes: 1 = X, 2 = Y, 3 = Z.
inline void apply_pauli(std::vector<cplx>& amp, int bit, int pauli) {
    const size_t mask = size_t{1} << bit;
    const cplx i(0.0, 1.0);
    for (size_t base = 0; base < amp.size(); ++base) {
        if (base & mask) continue;
        cplx a0 = amp[base], a1 = amp[base | mask];
        switch (pauli) {
        case 1: amp[base] = a1; amp[base | mask] = a0; break;
        case 2: amp[base] = -i * a1; amp[base | mask] = i * a0; break;
        case 3: amp[base | mask] = -a1; break;
        default: break;
        }
    }
}

} // namespace detail

// Gate application order within every layer is ascending qubit/bit index,
// so results are bitwise reproducible.
inline void apply_one_q_layer(const Circuit& circ, int t, std::vector<cplx>& amp) {
    for (int i = 0; i < circ.n(); ++i)
        detail::apply_1q(amp, i, gate1q_matrix(circ.one_q_layers[static_cast<size_t>(t)][static_cast<size_t>(i)]));
}

inline void apply_two_q_layer(const Circuit& circ, int t, std::vector<cplx>& amp) {
    for (const auto& g : circ.two_q_layers[static_cast<size_t>(t)]) {
        const int bit_a = circ.subset.bit_of(g.coupler.a);
        const int bit_b = circ.subset.bit_of(g.coupler.b);
        detail::apply_2q(amp, bit_a, bit_b, gate2q_matrix(g.params));
    }
}

inline StateVector simulate(const Circuit& circ, int limit = kDefaultQubitLimit) {
    const int n = circ.n();
    if (n > limit)
        throw CapacityError("simulate: " + std::to_string(n) + " qubits exceeds the limit of " +
                            std::to_string(limit));
    StateVector sv;
    sv.n = n;
    sv.amp.assign(size_t{1} << n, cplx(0.0, 0.0));
    sv.amp[0] = 1.0;
    for (int t = 0; t < circ.cycles; ++t) {
        apply_one_q_layer(circ, t, sv.amp);
        apply_two_q_layer(circ, t, sv.amp);
    }
    if (!circ.one_q_layers.empty()) apply_one_q_layer(circ, circ.cycles, sv.amp);
    if (std::abs(sv.norm_sq() - 1.0) > 1e-10)
        throw ValidationError("simulate: state norm drifted beyond 1e-10");
    return sv;
}

inline cplx amplitude(const Circuit& circ, uint64_t bitstring, int limit = kDefaultQubitLimit) {
    if (bitstring >> circ.n())
        throw ValidationError("amplitude: bitstring out of range for " +
                              std::to_string(circ.n()) + " qubits");
    return simulate(circ, limit).amp[bitstring];
}

inline std::vector<double> probabilities(const Circuit& circ, int limit = kDefaultQubitLimit) {
    StateVector sv = simulate(circ, limit);
    std::vector<double> p(sv.amp.size());
    for (size_t i = 0; i < p.size(); ++i) p[i] = std::norm(sv.amp[i]);
    return p;
}

inline std::vector<double> probabilities_of(const StateVector& sv) {
    std::vector<double> p(sv.amp.size());
    for (size_t i = 0; i < p.size(); ++i) p[i] = std::norm(sv.amp[i]);
    return p;
}

// ---- noise and sampling ----------------------------------------------------

struct NoiseSpec {
    enum class Kind { Ideal, Mixture, Trajectory };
    Kind kind = Kind::Ideal;
    double f = 1.0;          // Mixture fidelity
    double eps_1q = 0.0;     // Trajectory rates
    double eps_2q = 0.0;
    double eps_idle = 0.0;
    double eps_ro = 0.0;

    static NoiseSpec ideal() { return {}; }
    static NoiseSpec mixture(double f) {
        if (f < 0.0 || f > 1.0) throw ValidationError("mixture fidelity must lie in [0, 1]");
        NoiseSpec s;
        s.kind = Kind::Mixture;
        s.f = f;
        return s;
    }
    static NoiseSpec trajectory(double e1q, double e2q, double eidle, double ero) {
        for (double v : {e1q, e2q, eidle, ero})
            if (v < 0.0 || v > 1.0) throw ValidationError("trajectory rates must lie in [0, 1]");
        NoiseSpec s;
        s.kind = Kind::Trajectory;
        s.eps_1q = e1q;
        s.eps_2q = e2q;
        s.eps_idle = eidle;
        s.eps_ro = ero;
        return s;
    }

    nlohmann::json to_json() const {
        switch (kind) {
        case Kind::Ideal: return {{"kind", "ideal"}};
        case Kind::Mixture: return {{"kind", "mixture"}, {"f", f}};
        case Kind::Trajectory:
            return {{"kind", "trajectory"}, {"eps_1q", eps_1q}, {"eps_2q", eps_2q},
                    {"eps_idle", eps_idle}, {"eps_ro", eps_ro}};
        }
        return {};
    }
};

struct SampleSet {
    int n = 0;
    std::vector<uint64_t> bitstrings;
    std::vector<double> ideal_probs;   // empty when not attached
    nlohmann::json metadata;

    bool has_probs() const { return !ideal_probs.empty(); }
    size_t size() const { return bitstrings.size(); }
};

namespace detail {

// per-shot stream salts
inline constexpr uint64_t kSaltMeasure = 0x4d454153;  // measurement draws
inline constexpr uint64_t kSaltMix = 0x4d495855;      // mixture branch draw
inline constexpr uint64_t kSaltFault = 0x46415533;    // trajectory fault Bernoullis
inline constexpr uint64_t kSaltReadout = 0x524f5554;  // readout flips

inline uint64_t sample_from_cdf(const std::vector<double>& cdf, double u) {
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) return cdf.size() - 1;
    return static_cast<uint64_t>(it - cdf.begin());
}

struct Fault {
    int layer;   // flat layer index: 2t for 1q layer t, 2t+1 for 2q layer t
    int bit_a;
    int pauli_a; // 1..3
    int bit_b;   // -1 for single-qubit faults
    int pauli_b;
};

// Fault sites in a fixed enumeration order. All draws come from one per-shot
// stream, so the schedule is deterministic and thread-independent.
inline std::vector<Fault> draw_faults(const Circuit& circ, const NoiseSpec& noise,
                                      RngStream& rng) {
    std::vector<Fault> faults;
    const int n = circ.n();
    for (int t = 0; t <= circ.cycles; ++t) {
        for (int i = 0; i < n; ++i) {
            if (rng.next_double() < noise.eps_1q) {
                int p = static_cast<int>(rng.next_below(3)) + 1;
                faults.push_back({2 * t, i, p, -1, 0});
            }
        }
        if (t == circ.cycles) break;
        std::vector<bool> busy(static_cast<size_t>(n), false);
        for (const auto& g : circ.two_q_layers[static_cast<size_t>(t)]) {
            const int ba = circ.subset.bit_of(g.coupler.a);
            const int bb = circ.subset.bit_of(g.coupler.b);
            busy[static_cast<size_t>(ba)] = busy[static_cast<size_t>(bb)] = true;
            if (rng.next_double() < noise.eps_2q) {
                // uniform over the 15 non-identity two-qubit Paulis
                int p = static_cast<int>(rng.next_below(15)) + 1;
                faults.push_back({2 * t + 1, ba, p / 4, bb, p % 4});
            }
        }
        for (int i = 0; i < n; ++i) {
            if (busy[static_cast<size_t>(i)]) continue;
            if (rng.next_double() < noise.eps_idle) {
                int p = static_cast<int>(rng.next_below(3)) + 1;
                faults.push_back({2 * t + 1, i, p, -1, 0});
            }
        }
    }
    return faults;
}

inline void apply_fault(std::vector<cplx>& amp, const Fault& f) {
    if (f.pauli_a) apply_pauli(amp, f.bit_a, f.pauli_a);
    if (f.bit_b >= 0 && f.pauli_b) apply_pauli(amp, f.bit_b, f.pauli_b);
}

// apply flat layer l (0-based) of the circuit
inline void apply_flat_layer(const Circuit& circ, int l, std::vector<cplx>& amp) {
    if (l % 2 == 0) apply_one_q_layer(circ, l / 2, amp);
    else apply_two_q_layer(circ, l / 2, amp);
}

inline uint64_t measure_linear(const std::vector<cplx>& amp, double u) {
    double acc = 0.0;
    for (size_t i = 0; i < amp.size(); ++i) {
        acc += std::norm(amp[i]);
        if (u < acc) return i;
    }
    return amp.size() - 1;
}

} // namespace detail

// Samples N bitstrings. Per-shot randomness is keyed by (seed, shot index),
// so output is independent of thread count and shot evaluation order.
// Ideal probabilities are attached to every shot.
inline SampleSet sample(const Circuit& circ, long long num_shots, uint64_t seed,
                        const NoiseSpec& noise = NoiseSpec::ideal(), int threads = 1,
                        int limit = kDefaultQubitLimit) {
    if (num_shots < 1) throw ValidationError("sample: shot count must be >= 1");
    if (threads < 1) threads = 1;

    const int n = circ.n();
    const int num_layers = 2 * circ.cycles + 1;

    // ideal reference: per-layer snapshots (trajectory restart points) + CDF
    std::vector<std::vector<cplx>> snapshots;
    {
        if (n > limit)
            throw CapacityError("sample: " + std::to_string(n) + " qubits exceeds the limit of " +
                                std::to_string(limit));
        std::vector<cplx> amp(size_t{1} << n, cplx(0.0, 0.0));
        amp[0] = 1.0;
        snapshots.reserve(static_cast<size_t>(num_layers) + 1);
        snapshots.push_back(amp);
        for (int l = 0; l < num_layers; ++l) {
            detail::apply_flat_layer(circ, l, amp);
            snapshots.push_back(amp);
        }
    }
    const std::vector<cplx>& ideal = snapshots.back();
    std::vector<double> probs(ideal.size());
    for (size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(ideal[i]);
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }

    SampleSet out;
    out.n = n;
    out.bitstrings.assign(static_cast<size_t>(num_shots), 0);
    out.ideal_probs.assign(static_cast<size_t>(num_shots), 0.0);

    auto run_shot = [&](long long shot) -> uint64_t {
        if (noise.kind == NoiseSpec::Kind::Trajectory) {
            RngStream frng(seed, static_cast<uint64_t>(shot), detail::kSaltFault);
            std::vector<detail::Fault> faults = detail::draw_faults(circ, noise, frng);
            uint64_t x;
            double u = RngStream(seed, static_cast<uint64_t>(shot), detail::kSaltMeasure)
                           .next_double();
            if (faults.empty()) {
                x = detail::sample_from_cdf(cdf, u);
            } else {
                const int first = faults.front().layer;
                std::vector<cplx> amp = snapshots[static_cast<size_t>(first) + 1];
                size_t fi = 0;
                while (fi < faults.size() && faults[fi].layer == first)
                    detail::apply_fault(amp, faults[fi++]);
                for (int l = first + 1; l < num_layers; ++l) {
                    detail::apply_flat_layer(circ, l, amp);
                    while (fi < faults.size() && faults[fi].layer == l)
                        detail::apply_fault(amp, faults[fi++]);
                }
                x = detail::measure_linear(amp, u);
            }
            if (noise.eps_ro > 0.0) {
                RngStream rrng(seed, static_cast<uint64_t>(shot), detail::kSaltReadout);
                for (int b = 0; b < n; ++b)
                    if (rrng.next_double() < noise.eps_ro) x ^= uint64_t{1} << b;
            }
            return x;
        }
        const double f = (noise.kind == NoiseSpec::Kind::Mixture) ? noise.f : 1.0;
        const double u = RngStream(seed, static_cast<uint64_t>(shot), detail::kSaltMeasure)
                             .next_double();
        if (f < 1.0) {
            const double b = RngStream(seed, static_cast<uint64_t>(shot), detail::kSaltMix)
                                 .next_double();
            if (b >= f) {
                // uniform branch
                return std::min<uint64_t>(static_cast<uint64_t>(u * static_cast<double>(probs.size())),
                                          probs.size() - 1);
            }
        }
        return detail::sample_from_cdf(cdf, u);
    };

    auto worker = [&](long long begin, long long end) {
        for (long long s = begin; s < end; ++s) {
            uint64_t x = run_shot(s);
            out.bitstrings[static_cast<size_t>(s)] = x;
            out.ideal_probs[static_cast<size_t>(s)] = probs[x];
        }
    };

    if (threads == 1) {
        worker(0, num_shots);
    } else {
        std::vector<std::thread> pool;
        const long long chunk = (num_shots + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            long long b = t * chunk;
            long long e = std::min<long long>(num_shots, b + chunk);
            if (b >= e) break;
            pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }

    out.metadata = {{"seed", seed}, {"shots", num_shots}, {"noise", noise.to_json()},
                    {"circuit_seed", circ.seed}, {"cycles", circ.cycles},
                    {"subset", circ.subset.name}};
    return out;
}

// ---- patched simulation ----------------------------------------------------

struct PatchedState {
    PatchRegions regions;
    std::vector<std::vector<int>> region_bits;   // global bit index per region qubit
    std::vector<StateVector> states;

    // Global amplitude of x = product over patches of the patch amplitude of
    // x's restriction.
    cplx amplitude(uint64_t x) const {
        cplx prod = 1.0;
        for (size_t r = 0; r < states.size(); ++r) {
            uint64_t sub = 0;
            for (size_t i = 0; i < region_bits[r].size(); ++i)
                if (x >> region_bits[r][i] & 1) sub |= uint64_t{1} << i;
            prod *= states[r].amp[sub];
        }
        return prod;
    }
};

// Extract the sub-circuit acting on one patch region. Region qubit order
// follows the parent subset order, so bit mappings are deterministic.
inline Circuit patch_subcircuit(const Circuit& circ, size_t region_index) {
    if (!circ.patched()) throw ValidationError("patch_subcircuit: circuit carries no patches");
    const auto& region = circ.patch_regions[region_index];
    Circuit sub;
    sub.subset.name = circ.subset.name + "/patch" + std::to_string(region_index);
    for (int q : circ.subset.active)
        if (std::find(region.begin(), region.end(), q) != region.end())
            sub.subset.active.push_back(q);
    sub.cycles = circ.cycles;
    sub.pattern_sequence = circ.pattern_sequence;
    sub.seed = circ.seed;
    sub.no_repeat = circ.no_repeat;
    for (const auto& layer : circ.one_q_layers) {
        std::vector<Gate1QKind> row;
        for (int i = 0; i < circ.n(); ++i)
            if (sub.subset.contains(circ.subset.active[static_cast<size_t>(i)]))
                row.push_back(layer[static_cast<size_t>(i)]);
        sub.one_q_layers.push_back(std::move(row));
    }
    for (const auto& layer : circ.two_q_layers) {
        std::vector<TwoQubitGate> row;
        for (const auto& g : layer) {
            const bool a_in = sub.subset.contains(g.coupler.a);
            const bool b_in = sub.subset.contains(g.coupler.b);
            if (a_in != b_in)
                throw ValidationError("patch_subcircuit: crossing gate survived patching");
            if (a_in) row.push_back(g);
        }
        sub.two_q_layers.push_back(std::move(row));
    }
    return sub;
}

inline PatchedState simulate_patched(const Circuit& circ, int limit = kDefaultQubitLimit) {
    if (!circ.patched()) throw ValidationError("simulate_patched: circuit carries no patches");
    PatchedState ps;
    ps.regions = circ.patch_regions;
    for (size_t r = 0; r < circ.patch_regions.size(); ++r) {
        Circuit sub = patch_subcircuit(circ, r);
        std::vector<int> bits;
        for (int q : sub.subset.active) bits.push_back(circ.subset.bit_of(q));
        ps.region_bits.push_back(std::move(bits));
        ps.states.push_back(simulate(sub, limit));
    }
    return ps;
}

// ---- sample files ----------------------------------------------------------
// One JSON header line, then one record per shot: lowercase-hex bitstring and
// the attached ideal probability.

inline void save_samples(const SampleSet& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    nlohmann::json header = s.metadata;
    header["schema_version"] = kSchemaVersion;
    header["type"] = "samples";
    header["n"] = s.n;
    header["has_probs"] = s.has_probs();
    out << header.dump() << "\n";
    char buf[64];
    for (size_t i = 0; i < s.bitstrings.size(); ++i) {
        if (s.has_probs())
            std::snprintf(buf, sizeof(buf), "%llx %.17g",
                          static_cast<unsigned long long>(s.bitstrings[i]), s.ideal_probs[i]);
        else
            std::snprintf(buf, sizeof(buf), "%llx",
                          static_cast<unsigned long long>(s.bitstrings[i]));
        out << buf << "\n";
    }
}

inline SampleSet load_samples(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": missing header line");
    nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
    if (header.is_discarded()) throw ParseError(path + ": header is not valid JSON");
    if (!header.contains("schema_version") || header["schema_version"].get<int>() != kSchemaVersion)
        throw ParseError(path + ": missing or unsupported schema_version");
    SampleSet s;
    s.n = detail::require_field<int>(header, "n", path);
    const bool has_probs = detail::require_field<bool>(header, "has_probs", path);
    s.metadata = header;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string hex;
        ss >> hex;
        uint64_t x = 0;
        try {
            x = std::stoull(hex, nullptr, 16);
        } catch (...) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad bitstring '" + hex + "'");
        }
        if (s.n < 64 && (x >> s.n))
            throw ParseError(path + ":" + std::to_string(lineno) + ": bitstring out of range");
        s.bitstrings.push_back(x);
        if (has_probs) {
            double p;
            if (!(ss >> p) || p < 0.0 || p > 1.0)
                throw ParseError(path + ":" + std::to_string(lineno) + ": bad probability");
            s.ideal_probs.push_back(p);
        }
    }
    return s;
}

} // namespace rcs
