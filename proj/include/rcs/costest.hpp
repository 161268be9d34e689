#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcs/circuit.hpp"
#include "rcs/errors.hpp"
#include "rcs/gates.hpp"
#include "rcs/rng.hpp"

namespace rcs {

// All bond dimensions are 2. Tensor data index d encodes the assignment of
// indices[j] in bit j of d.
struct Tensor {
    std::vector<int> indices;
    std::vector<cplx> data;
};

struct TensorNetwork {
    std::vector<Tensor> tensors;
    int num_indices = 0;

    std::vector<int> open_indices() const {
        std::vector<int> count(static_cast<size_t>(num_indices), 0);
        for (const auto& t : tensors)
            for (int i : t.indices) ++count[static_cast<size_t>(i)];
        std::vector<int> open;
        for (int i = 0; i < num_indices; ++i)
            if (count[static_cast<size_t>(i)] == 1) open.push_back(i);
        return open;
    }
};

// One tensor per input qubit, per gate, and per fixed output bit.
// A fixed output bitstring closes every index; `open` output leaves the
// final wire indices dangling.
inline TensorNetwork build_network(const Circuit& circ,
                                   std::optional<uint64_t> output = uint64_t{0}) {
    const int n = circ.n();
    if (output && n < 64 && (*output >> n))
        throw ValidationError("build_network: output bitstring out of range");
    TensorNetwork net;
    int next = 0;
    std::vector<int> wire(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        wire[static_cast<size_t>(i)] = next++;
        net.tensors.push_back({{wire[static_cast<size_t>(i)]}, {cplx(1.0), cplx(0.0)}});
    }
    auto add_1q = [&](int bit, const Mat2& u) {
        const int in = wire[static_cast<size_t>(bit)];
        const int out = next++;
        Tensor t;
        t.indices = {in, out};
        t.data.resize(4);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) t.data[static_cast<size_t>((r << 1) | c)] = u[r * 2 + c];
        net.tensors.push_back(std::move(t));
        wire[static_cast<size_t>(bit)] = out;
    };
    auto add_2q = [&](int bit_a, int bit_b, const Mat4& u) {
        const int ina = wire[static_cast<size_t>(bit_a)];
        const int inb = wire[static_cast<size_t>(bit_b)];
        const int outa = next++;
        const int outb = next++;
        Tensor t;
        t.indices = {ina, inb, outa, outb};
        t.data.resize(16);
        for (int ra = 0; ra < 2; ++ra)
            for (int rb = 0; rb < 2; ++rb)
                for (int ca = 0; ca < 2; ++ca)
                    for (int cb = 0; cb < 2; ++cb) {
                        const int d = (rb << 3) | (ra << 2) | (cb << 1) | ca;
                        t.data[static_cast<size_t>(d)] =
                            u[((ra << 1) | rb) * 4 + ((ca << 1) | cb)];
                    }
        net.tensors.push_back(std::move(t));
        wire[static_cast<size_t>(bit_a)] = outa;
        wire[static_cast<size_t>(bit_b)] = outb;
    };
    for (int t = 0; t < circ.cycles; ++t) {
        for (int i = 0; i < n; ++i)
            add_1q(i, gate1q_matrix(circ.one_q_layers[static_cast<size_t>(t)][static_cast<size_t>(i)]));
        for (const auto& g : circ.two_q_layers[static_cast<size_t>(t)])
            add_2q(circ.subset.bit_of(g.coupler.a), circ.subset.bit_of(g.coupler.b),
                   gate2q_matrix(g.params));
    }
    if (!circ.one_q_layers.empty())
        for (int i = 0; i < n; ++i)
            add_1q(i, gate1q_matrix(circ.one_q_layers[static_cast<size_t>(circ.cycles)][static_cast<size_t>(i)]));
    if (output) {
        for (int i = 0; i < n; ++i) {
            const bool one = (*output >> i) & 1;
            net.tensors.push_back({{wire[static_cast<size_t>(i)]},
                                   {cplx(one ? 0.0 : 1.0), cplx(one ? 1.0 : 0.0)}});
        }
    }
    net.num_indices = next;
    return net;
}

// Binary contraction tree: leaves are tensor ids 0..T-1, step k produces node
// T+k from two earlier node ids.
struct PlanStep {
    int lhs = 0;
    int rhs = 0;
};

struct ContractionPlan {
    int num_leaves = 0;
    std::vector<PlanStep> steps;
    std::vector<int> slices;
    unsigned long long per_slice_flops = 0;       // scalar multiply-adds per slice
    unsigned long long complex_flops = 0;         // 2^|slices| * per_slice_flops
    size_t max_intermediate_entries = 0;          // over leaves and intermediates, sliced dims removed
    size_t max_intermediate_bytes = 0;            // entries * 8 (single-precision complex)

    nlohmann::json to_json() const {
        nlohmann::json steps_j = nlohmann::json::array();
        for (const auto& s : steps) steps_j.push_back({s.lhs, s.rhs});
        return {{"schema_version", kSchemaVersion}, {"type", "contraction_plan"},
                {"num_leaves", num_leaves}, {"steps", steps_j}, {"slices", slices},
                {"per_slice_flops", per_slice_flops}, {"complex_flops", complex_flops},
                {"max_intermediate_entries", max_intermediate_entries},
                {"max_intermediate_bytes", max_intermediate_bytes}};
    }
};

namespace detail {

using IndexSet = std::vector<int>;   // sorted

inline IndexSet set_union(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Node sets during planning: an index is dropped once both of its endpoints
// have been absorbed; its remaining-occurrence count tracks that.
struct PlanState {
    std::vector<IndexSet> node_sets;            // by node id
    std::vector<int> remaining;                 // occurrences outside contracted nodes, per index
};

inline IndexSet result_set(const IndexSet& a, const IndexSet& b,
                           const std::vector<int>& global_count,
                           std::vector<int>& scratch_in_pair) {
    IndexSet u = set_union(a, b);
    IndexSet shared;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
    (void)scratch_in_pair;
    IndexSet out;
    for (int i : u) {
        const bool is_shared =
            std::binary_search(shared.begin(), shared.end(), i);
        if (is_shared && global_count[static_cast<size_t>(i)] == 2) continue;   // fully contracted
        out.push_back(i);
    }
    return out;
}

inline size_t set_size_excluding(const IndexSet& s, const std::vector<bool>& sliced) {
    size_t k = 0;
    for (int i : s)
        if (!sliced[static_cast<size_t>(i)]) ++k;
    return k;
}

struct TreeEval {
    unsigned long long per_slice_flops = 0;
    size_t max_entries = 0;
    std::vector<IndexSet> node_sets;
};

inline std::vector<int> index_occurrences(const TensorNetwork& net) {
    std::vector<int> count(static_cast<size_t>(net.num_indices), 0);
    for (const auto& t : net.tensors)
        for (int i : t.indices) ++count[static_cast<size_t>(i)];
    return count;
}

// Replay a tree and account cost/memory with the given slice set.
inline TreeEval evaluate_tree(const TensorNetwork& net, const std::vector<PlanStep>& steps,
                              const std::vector<bool>& sliced) {
    const auto global_count = index_occurrences(net);
    TreeEval ev;
    ev.node_sets.resize(net.tensors.size() + steps.size());
    for (size_t i = 0; i < net.tensors.size(); ++i) {
        IndexSet s = net.tensors[i].indices;
        std::sort(s.begin(), s.end());
        ev.max_entries = std::max(ev.max_entries, size_t{1} << set_size_excluding(s, sliced));
        ev.node_sets[i] = std::move(s);
    }
    std::vector<int> scratch;
    for (size_t k = 0; k < steps.size(); ++k) {
        const auto& a = ev.node_sets[static_cast<size_t>(steps[k].lhs)];
        const auto& b = ev.node_sets[static_cast<size_t>(steps[k].rhs)];
        IndexSet u = set_union(a, b);
        ev.per_slice_flops += 1ull << set_size_excluding(u, sliced);
        IndexSet r = result_set(a, b, global_count, scratch);
        ev.max_entries = std::max(ev.max_entries, size_t{1} << set_size_excluding(r, sliced));
        ev.node_sets[net.tensors.size() + k] = std::move(r);
    }
    return ev;
}

// One greedy ordering pass. Candidate pairs are tracked through index
// adjacency (each index touches at most two live nodes), so a step costs
// O(#indices) rather than O(#nodes^2). temperature > 0 randomizes among
// near-optimal candidates for restarts.
inline std::vector<PlanStep> greedy_order(const TensorNetwork& net, RngStream& rng,
                                          double temperature) {
    const auto global_count = index_occurrences(net);
    const size_t num_tensors = net.tensors.size();
    std::vector<IndexSet> sets(num_tensors);
    // holder[i] = the one or two live nodes carrying index i
    std::vector<std::array<int, 2>> holder(static_cast<size_t>(net.num_indices), {-1, -1});
    for (size_t i = 0; i < num_tensors; ++i) {
        sets[i] = net.tensors[i].indices;
        std::sort(sets[i].begin(), sets[i].end());
        for (int idx : sets[i]) {
            auto& h = holder[static_cast<size_t>(idx)];
            (h[0] < 0 ? h[0] : h[1]) = static_cast<int>(i);
        }
    }
    std::vector<bool> alive(num_tensors, true);
    size_t num_alive = num_tensors;
    std::vector<PlanStep> steps;
    std::vector<int> scratch;

    while (num_alive > 1) {
        struct Cand {
            int a, b;
            unsigned long long cost;
            size_t result_entries;
        };
        std::vector<Cand> cands;
        std::set<std::pair<int, int>> seen;
        for (int i = 0; i < net.num_indices; ++i) {
            const auto& h = holder[static_cast<size_t>(i)];
            if (h[0] < 0 || h[1] < 0 || h[0] == h[1]) continue;
            auto key = std::minmax(h[0], h[1]);
            if (!seen.insert(key).second) continue;
            const auto& sa = sets[static_cast<size_t>(key.first)];
            const auto& sb = sets[static_cast<size_t>(key.second)];
            IndexSet u = set_union(sa, sb);
            IndexSet r = result_set(sa, sb, global_count, scratch);
            cands.push_back({key.first, key.second, 1ull << u.size(), size_t{1} << r.size()});
        }
        if (cands.empty()) {
            // disconnected components: outer-product the two smallest live nodes
            int best_a = -1, best_b = -1;
            for (size_t i = 0; i < sets.size(); ++i) {
                if (!alive[i]) continue;
                const int node = static_cast<int>(i);
                if (best_a < 0 || sets[i].size() < sets[static_cast<size_t>(best_a)].size()) {
                    best_b = best_a;
                    best_a = node;
                } else if (best_b < 0 ||
                           sets[i].size() < sets[static_cast<size_t>(best_b)].size()) {
                    best_b = node;
                }
            }
            IndexSet u = set_union(sets[static_cast<size_t>(best_a)],
                                   sets[static_cast<size_t>(best_b)]);
            cands.push_back({std::min(best_a, best_b), std::max(best_a, best_b),
                             1ull << u.size(), size_t{1} << u.size()});
        }
        auto better = [](const Cand& p, const Cand& q) {
            if (p.cost != q.cost) return p.cost < q.cost;
            if (p.result_entries != q.result_entries) return p.result_entries < q.result_entries;
            if (p.a != q.a) return p.a < q.a;
            return p.b < q.b;
        };
        std::sort(cands.begin(), cands.end(), better);
        size_t pick = 0;
        if (temperature > 0.0 && cands.size() > 1) {
            size_t window = 1;
            const double limit = static_cast<double>(cands[0].cost) * (1.0 + temperature);
            while (window < cands.size() && window < 4 &&
                   static_cast<double>(cands[window].cost) <= limit)
                ++window;
            pick = rng.next_below(window);
        }
        const Cand chosen = cands[pick];
        IndexSet r = result_set(sets[static_cast<size_t>(chosen.a)],
                                sets[static_cast<size_t>(chosen.b)], global_count, scratch);
        const int new_node = static_cast<int>(sets.size());
        for (int old_node : {chosen.a, chosen.b}) {
            for (int idx : sets[static_cast<size_t>(old_node)]) {
                auto& h = holder[static_cast<size_t>(idx)];
                if (h[0] == old_node) h[0] = new_node;
                if (h[1] == old_node) h[1] = new_node;
            }
        }
        sets.push_back(std::move(r));
        alive[static_cast<size_t>(chosen.a)] = alive[static_cast<size_t>(chosen.b)] = false;
        alive.push_back(true);
        --num_alive;
        steps.push_back({chosen.a, chosen.b});
    }
    return steps;
}

// Local tree rotations: for P = A * (C * D), try (A*C)*D and (A*D)*C; keep
// the cheapest. Repeats until a pass makes no improvement.
inline void rotate_tree(const TensorNetwork& net, std::vector<PlanStep>& steps) {
    const std::vector<bool> no_slices(static_cast<size_t>(net.num_indices), false);
    const int num_leaves = static_cast<int>(net.tensors.size());
    auto score = [&](const std::vector<PlanStep>& s) {
        TreeEval ev = evaluate_tree(net, s, no_slices);
        return std::pair<unsigned long long, size_t>(ev.per_slice_flops, ev.max_entries);
    };
    auto producer_step = [&](int node) -> int {
        if (node < num_leaves) return -1;
        return node - num_leaves;
    };
    bool improved = true;
    int guard = 0;
    while (improved && guard++ < 4) {
        improved = false;
        auto best = score(steps);
        for (size_t k = 0; k < steps.size(); ++k) {
            for (int side = 0; side < 2; ++side) {
                const int child = side == 0 ? steps[k].lhs : steps[k].rhs;
                const int other = side == 0 ? steps[k].rhs : steps[k].lhs;
                const int inner = producer_step(child);
                if (inner < 0) continue;
                // `other` must already exist when step `inner` runs
                if (producer_step(other) >= inner) continue;
                // child = (C*D) at step `inner`; only rotate if nothing else
                // consumes it (tree property guarantees this).
                const int c = steps[static_cast<size_t>(inner)].lhs;
                const int d = steps[static_cast<size_t>(inner)].rhs;
                for (int variant = 0; variant < 2; ++variant) {
                    std::vector<PlanStep> trial = steps;
                    const int keep = variant == 0 ? d : c;
                    const int move = variant == 0 ? c : d;
                    trial[static_cast<size_t>(inner)] = {std::min(other, move), std::max(other, move)};
                    trial[k] = {static_cast<int>(num_leaves + inner), keep};
                    auto sc = score(trial);
                    if (sc < best) {
                        best = sc;
                        steps = std::move(trial);
                        improved = true;
                    }
                }
            }
        }
    }
}

} // namespace detail

// Greedy pairwise ordering with randomized restarts and local tree rotations;
// optional greedy slicing until the largest tensor fits in memory_bytes.
// Deterministic for a fixed seed regardless of thread count.
inline ContractionPlan optimize_order(const TensorNetwork& net, uint64_t seed, int restarts = 8,
                                      std::optional<size_t> memory_bytes = std::nullopt) {
    if (restarts < 1) throw ValidationError("optimize_order: restarts must be >= 1");
    if (net.tensors.empty()) throw ValidationError("optimize_order: empty network");

    std::vector<bool> no_slices(static_cast<size_t>(net.num_indices), false);
    std::vector<PlanStep> best_steps;
    std::pair<unsigned long long, size_t> best_score{~0ull, ~size_t{0}};
    for (int r = 0; r < restarts; ++r) {
        RngStream rng(seed, static_cast<uint64_t>(r), 0x4f524452);
        const double temperature = r == 0 ? 0.0 : 0.5;
        std::vector<PlanStep> steps = detail::greedy_order(net, rng, temperature);
        detail::TreeEval ev = detail::evaluate_tree(net, steps, no_slices);
        std::pair<unsigned long long, size_t> sc{ev.per_slice_flops, ev.max_entries};
        if (sc < best_score) {
            best_score = sc;
            best_steps = std::move(steps);
        }
    }
    detail::rotate_tree(net, best_steps);

    ContractionPlan plan;
    plan.num_leaves = static_cast<int>(net.tensors.size());
    plan.steps = best_steps;

    std::vector<bool> sliced(static_cast<size_t>(net.num_indices), false);
    const auto open = net.open_indices();
    std::vector<bool> is_open(static_cast<size_t>(net.num_indices), false);
    for (int i : open) is_open[static_cast<size_t>(i)] = true;

    detail::TreeEval ev = detail::evaluate_tree(net, plan.steps, sliced);
    if (memory_bytes) {
        while (ev.max_entries * 8 > *memory_bytes) {
            int best_idx = -1;
            size_t best_max = ev.max_entries;
            for (int i = 0; i < net.num_indices; ++i) {
                if (sliced[static_cast<size_t>(i)] || is_open[static_cast<size_t>(i)]) continue;
                sliced[static_cast<size_t>(i)] = true;
                detail::TreeEval trial = detail::evaluate_tree(net, plan.steps, sliced);
                sliced[static_cast<size_t>(i)] = false;
                if (trial.max_entries < best_max) {
                    best_max = trial.max_entries;
                    best_idx = i;
                }
            }
            if (best_idx < 0)
                throw CapacityError(
                    "optimize_order: memory constraint of " + std::to_string(*memory_bytes) +
                    " bytes is infeasible; no slice reduces the largest tensor below " +
                    std::to_string(ev.max_entries * 8) + " bytes");
            sliced[static_cast<size_t>(best_idx)] = true;
            plan.slices.push_back(best_idx);
            ev = detail::evaluate_tree(net, plan.steps, sliced);
        }
    }
    plan.per_slice_flops = ev.per_slice_flops;
    plan.complex_flops = ev.per_slice_flops << plan.slices.size();
    plan.max_intermediate_entries = ev.max_entries;
    plan.max_intermediate_bytes = ev.max_entries * 8;
    return plan;
}

namespace detail {

// out[o] += a[ia] * b[ib] over every assignment of the union index set;
// exactly 2^|union| multiply-adds, matching the plan's accounting.
inline Tensor pairwise_contract(const Tensor& a, const Tensor& b,
                                const std::vector<int>& global_count,
                                const std::vector<bool>& absorbed,
                                unsigned long long& flops) {
    IndexSet sa = a.indices, sb = b.indices;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    IndexSet u = set_union(sa, sb);
    Tensor out;
    for (int i : u) {
        const bool in_a = std::binary_search(sa.begin(), sa.end(), i);
        const bool in_b = std::binary_search(sb.begin(), sb.end(), i);
        const bool contract_now = in_a && in_b && global_count[static_cast<size_t>(i)] == 2;
        if (!contract_now && !absorbed[static_cast<size_t>(i)]) out.indices.push_back(i);
        else if (in_a && in_b) {}
    }
    // absorbed tracks indices shared between a and b (they vanish here)
    out.data.assign(size_t{1} << out.indices.size(), cplx(0.0, 0.0));

    auto bitpos = [](const std::vector<int>& idx, int i) -> int {
        for (size_t j = 0; j < idx.size(); ++j)
            if (idx[j] == i) return static_cast<int>(j);
        return -1;
    };
    std::vector<uint64_t> mask_a(u.size(), 0), mask_b(u.size(), 0), mask_o(u.size(), 0);
    for (size_t j = 0; j < u.size(); ++j) {
        int pa = bitpos(a.indices, u[j]);
        int pb = bitpos(b.indices, u[j]);
        int po = bitpos(out.indices, u[j]);
        if (pa >= 0) mask_a[j] = uint64_t{1} << pa;
        if (pb >= 0) mask_b[j] = uint64_t{1} << pb;
        if (po >= 0) mask_o[j] = uint64_t{1} << po;
    }
    const uint64_t total = uint64_t{1} << u.size();
    for (uint64_t v = 0; v < total; ++v) {
        uint64_t ia = 0, ib = 0, io = 0;
        for (size_t j = 0; j < u.size(); ++j) {
            if (v >> j & 1) {
                ia |= mask_a[j];
                ib |= mask_b[j];
                io |= mask_o[j];
            }
        }
        out.data[io] += a.data[ia] * b.data[ib];
        ++flops;
    }
    return out;
}

// Leaf tensor with every sliced index fixed to its assigned value.
inline Tensor fix_slices(const Tensor& t, const std::vector<int>& slice_value) {
    Tensor out;
    std::vector<int> kept_pos;
    uint64_t fixed_bits = 0;
    for (size_t j = 0; j < t.indices.size(); ++j) {
        const int v = slice_value[static_cast<size_t>(t.indices[j])];
        if (v < 0) {
            out.indices.push_back(t.indices[j]);
            kept_pos.push_back(static_cast<int>(j));
        } else if (v == 1) {
            fixed_bits |= uint64_t{1} << j;
        }
    }
    out.data.resize(size_t{1} << out.indices.size());
    for (uint64_t d = 0; d < out.data.size(); ++d) {
        uint64_t src = fixed_bits;
        for (size_t j = 0; j < kept_pos.size(); ++j)
            if (d >> j & 1) src |= uint64_t{1} << kept_pos[j];
        out.data[d] = t.data[src];
    }
    return out;
}

} // namespace detail

struct ContractionResult {
    cplx value{0.0, 0.0};
    unsigned long long counted_flops = 0;   // independent recount of multiply-adds
};

// Executes the plan once per slice assignment and sums the results.
inline ContractionResult contract(const TensorNetwork& net, const ContractionPlan& plan) {
    if (plan.num_leaves != static_cast<int>(net.tensors.size()))
        throw ValidationError("contract: plan does not match network");
    if (!net.open_indices().empty())
        throw ValidationError("contract: network has open indices; fix an output bitstring");
    const auto global_count = detail::index_occurrences(net);
    std::vector<bool> sliced(static_cast<size_t>(net.num_indices), false);
    for (int i : plan.slices) sliced[static_cast<size_t>(i)] = true;

    ContractionResult res;
    const uint64_t num_assignments = uint64_t{1} << plan.slices.size();
    for (uint64_t assign = 0; assign < num_assignments; ++assign) {
        std::vector<int> slice_value(static_cast<size_t>(net.num_indices), -1);
        for (size_t j = 0; j < plan.slices.size(); ++j)
            slice_value[static_cast<size_t>(plan.slices[j])] = static_cast<int>(assign >> j & 1);
        std::vector<Tensor> nodes;
        nodes.reserve(net.tensors.size() + plan.steps.size());
        for (const auto& t : net.tensors) nodes.push_back(detail::fix_slices(t, slice_value));
        for (const auto& step : plan.steps) {
            nodes.push_back(detail::pairwise_contract(nodes[static_cast<size_t>(step.lhs)],
                                                      nodes[static_cast<size_t>(step.rhs)],
                                                      global_count, sliced, res.counted_flops));
        }
        const Tensor& final_t = nodes.back();
        if (final_t.indices.size() != 0)
            throw ValidationError("contract: plan did not reduce the network to a scalar");
        res.value += final_t.data[0];
    }
    return res;
}

// ---- cost reporting ---------------------------------------------------------

struct MachineSpec {
    double peak_flops = 1.685e18;   // machine FLOP/s
    double efficiency = 0.20;
};

struct CostReport {
    double complex_flops = 0.0;            // one amplitude
    double machine_flops = 0.0;            // 8 machine FLOPs per complex FLOP
    size_t max_intermediate_bytes = 0;
    double runtime_seconds = 0.0;
    long long num_samples = 1;
    double target_fidelity = 1.0;
    double batch_amortization = 1.0;
    double sample_complex_flops = 0.0;      // f * N * per-amplitude / amortization
    double sample_runtime_seconds = 0.0;

    nlohmann::json to_json() const {
        return {{"schema_version", kSchemaVersion}, {"type", "cost_report"},
                {"complex_flops", complex_flops}, {"machine_flops", machine_flops},
                {"max_intermediate_bytes", max_intermediate_bytes},
                {"runtime_seconds", runtime_seconds}, {"N", num_samples},
                {"target_fidelity", target_fidelity},
                {"batch_amortization", batch_amortization},
                {"sample_complex_flops", sample_complex_flops},
                {"sample_runtime_seconds", sample_runtime_seconds},
                {"cost_model_note",
                 "noisy-sample pricing is a parameterized model: f*N*C_amp/b"}};
    }
};

inline double runtime_from_complex_flops(double complex_flops, const MachineSpec& machine) {
    return 8.0 * complex_flops / (machine.peak_flops * machine.efficiency);
}

inline CostReport report_cost(const ContractionPlan& plan, const MachineSpec& machine,
                              long long num_samples = 1, double fidelity = 1.0,
                              double batch_amortization = 1.0) {
    if (num_samples < 1) throw ValidationError("report_cost: N must be >= 1");
    if (!(fidelity > 0.0 && fidelity <= 1.0))
        throw ValidationError("report_cost: fidelity must lie in (0, 1]");
    if (!(batch_amortization > 0.0))
        throw ValidationError("report_cost: batch amortization must be positive");
    CostReport rep;
    rep.complex_flops = static_cast<double>(plan.complex_flops);
    rep.machine_flops = 8.0 * rep.complex_flops;
    rep.max_intermediate_bytes = plan.max_intermediate_bytes;
    rep.runtime_seconds = runtime_from_complex_flops(rep.complex_flops, machine);
    rep.num_samples = num_samples;
    rep.target_fidelity = fidelity;
    rep.batch_amortization = batch_amortization;
    rep.sample_complex_flops =
        fidelity * static_cast<double>(num_samples) * rep.complex_flops / batch_amortization;
    rep.sample_runtime_seconds = runtime_from_complex_flops(rep.sample_complex_flops, machine);
    return rep;
}

// ---- benchmark manifest ------------------------------------------------------
// Reference rows from published cost tables; values are reported data from
// external optimizers, not targets for this estimator.

struct BenchmarkEntry {
    std::string memory;       // e.g. "9.2PB"
    std::string source;       // "main" or "supplement"
    double amp_complex_flops = 0.0;
    double sample_complex_flops = 0.0;
};

struct BenchmarkRow {
    std::string name;
    int n = 0;
    int m = 0;
    double fidelity = 0.0;
    std::vector<BenchmarkEntry> entries;
};

inline std::vector<BenchmarkRow> load_benchmark_manifest(const std::string& path) {
    nlohmann::json j = detail::parse_document(detail::read_file(path), path);
    std::vector<BenchmarkRow> rows;
    for (const auto& rj : detail::require_field<nlohmann::json>(j, "rows", path)) {
        BenchmarkRow row;
        row.name = detail::require_field<std::string>(rj, "name", path);
        row.n = detail::require_field<int>(rj, "n", path);
        row.m = detail::require_field<int>(rj, "m", path);
        row.fidelity = detail::require_field<double>(rj, "fidelity", path);
        for (const auto& ej : detail::require_field<nlohmann::json>(rj, "entries", path)) {
            BenchmarkEntry e;
            e.memory = detail::require_field<std::string>(ej, "memory", path);
            e.source = detail::require_field<std::string>(ej, "source", path);
            e.amp_complex_flops = detail::require_field<double>(ej, "amp_complex_flops", path);
            e.sample_complex_flops =
                detail::require_field<double>(ej, "sample_complex_flops", path);
            row.entries.push_back(e);
        }
        rows.push_back(row);
    }
    return rows;
}

// Converts every reference row to runtime with this machine model and flags
// cells where the two source tables disagree.
inline nlohmann::json benchmark_report(const std::vector<BenchmarkRow>& rows,
                                       const MachineSpec& machine) {
    nlohmann::json out;
    out["schema_version"] = kSchemaVersion;
    out["type"] = "benchmark_report";
    out["machine"] = {{"peak_flops", machine.peak_flops}, {"efficiency", machine.efficiency}};
    nlohmann::json rows_j = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json rj;
        rj["name"] = row.name;
        rj["n"] = row.n;
        rj["m"] = row.m;
        rj["fidelity"] = row.fidelity;
        nlohmann::json entries = nlohmann::json::array();
        for (const auto& e : row.entries) {
            bool discrepancy = false;
            for (const auto& other : row.entries) {
                if (other.memory == e.memory && other.source != e.source &&
                    (other.amp_complex_flops != e.amp_complex_flops ||
                     other.sample_complex_flops != e.sample_complex_flops))
                    discrepancy = true;
            }
            entries.push_back({{"memory", e.memory}, {"source", e.source},
                               {"amp_complex_flops", e.amp_complex_flops},
                               {"sample_complex_flops", e.sample_complex_flops},
                               {"amp_runtime_seconds",
                                runtime_from_complex_flops(e.amp_complex_flops, machine)},
                               {"sample_runtime_seconds",
                                runtime_from_complex_flops(e.sample_complex_flops, machine)},
                               {"source_discrepancy", discrepancy}});
        }
        rj["entries"] = entries;
        rows_j.push_back(rj);
    }
    out["rows"] = rows_j;
    return out;
}

} // namespace rcs
