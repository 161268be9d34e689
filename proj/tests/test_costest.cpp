#include <doctest.h>

#include <cmath>

#include "rcs/circuit.hpp"
#include "rcs/costest.hpp"
#include "rcs/simulator.hpp"

using namespace rcs;

namespace {

const std::string kDataDir = RCS_DATA_DIR_PATH;

Circuit small_circuit(int rows, int cols_hi, int cycles, uint64_t seed) {
    const auto topo = build_topology(15, 7);
    return generate(topo, make_block_subset(topo, 0, 0, rows, cols_hi), cycles, seed);
}

} // namespace

TEST_CASE("empty circuit network contracts to amplitude 1") {
    Circuit c;
    c.subset.name = "empty";
    c.subset.active = {0, 1, 2};
    c.cycles = 0;
    const auto net = build_network(c, uint64_t{0});
    CHECK(net.open_indices().empty());
    const auto plan = optimize_order(net, 0);
    const auto res = contract(net, plan);
    CHECK(std::abs(res.value - cplx(1.0)) < 1e-12);
}

TEST_CASE("two-tensor network contracts with the expected flop count") {
    TensorNetwork net;
    net.num_indices = 3;
    // A_{i j}, B_{j k} with i and k closed by their absence: make them shared
    // with scalar caps instead to keep everything closed
    net.tensors.push_back({{0, 1}, {cplx(1), cplx(2), cplx(3), cplx(4)}});
    net.tensors.push_back({{1, 2}, {cplx(5), cplx(6), cplx(7), cplx(8)}});
    net.tensors.push_back({{0}, {cplx(1), cplx(0)}});
    net.tensors.push_back({{2}, {cplx(0), cplx(1)}});
    const auto plan = optimize_order(net, 1);
    const auto res = contract(net, plan);
    // value = sum_j A_{0 j} B_{j 1} with bit-0 = index order in data:
    // A_{i=0,j} = data[j<<1? ...]
    // A data index bit0 = index 0 (i), bit1 = index 1 (j)
    // A_{i=0,j=0}=1, A_{i=0,j=1}=3; B data bit0 = j, bit1 = k
    // B_{j=0,k=1}=7, B_{j=1,k=1}=8  =>  1*7 + 3*8 = 31
    CHECK(std::abs(res.value - cplx(31.0)) < 1e-12);
    CHECK(res.counted_flops == plan.complex_flops);
}

TEST_CASE("ideal iSWAP circuit amplitude via tensor contraction") {
    // |00> -> after SX on both and an iSWAP the amplitude of each output is
    // checked against the statevector, including the -i phase structure
    const auto topo = build_topology(15, 7);
    QubitSubset pair;
    pair.name = "pair";
    pair.active = {0, 7};
    const auto circ = generate(topo, pair, 1, 3, "A");
    const auto sv = simulate(circ);
    for (uint64_t x = 0; x < 4; ++x) {
        const auto net = build_network(circ, x);
        const auto res = contract(net, optimize_order(net, 0));
        CHECK(std::abs(res.value - sv.amp[x]) < 1e-10);
    }
}

TEST_CASE("contraction matches statevector amplitudes on random circuits") {
    for (uint64_t seed : {1u, 9u}) {
        const auto circ = small_circuit(3, 1, 6, seed);
        const auto sv = simulate(circ);
        for (uint64_t x : {uint64_t{0}, uint64_t{5}, uint64_t{200},
                           (uint64_t{1} << circ.n()) - 1}) {
            const auto net = build_network(circ, x);
            const auto plan = optimize_order(net, 7);
            const auto res = contract(net, plan);
            CHECK(std::abs(res.value - sv.amp[x]) < 1e-6);
            CHECK(res.counted_flops == plan.complex_flops);
        }
    }
}

TEST_CASE("sliced contraction agrees with unsliced and respects memory") {
    const auto circ = small_circuit(4, 1, 8, 5);
    const auto net = build_network(circ, uint64_t{123});
    const auto full = optimize_order(net, 2);
    const auto full_res = contract(net, full);
    // force slicing with a small memory cap
    const size_t cap = full.max_intermediate_bytes / 4;
    const auto sliced = optimize_order(net, 2, 8, cap);
    CHECK(!sliced.slices.empty());
    CHECK(sliced.max_intermediate_bytes <= cap);
    const auto sliced_res = contract(net, sliced);
    CHECK(std::abs(sliced_res.value - full_res.value) < 1e-8);
    CHECK(sliced_res.counted_flops == sliced.complex_flops);
    CHECK(sliced.complex_flops ==
          sliced.per_slice_flops << sliced.slices.size());
}

TEST_CASE("tighter caps give more slices or a clean infeasibility report") {
    const auto circ = small_circuit(4, 1, 8, 5);
    const auto net = build_network(circ, uint64_t{0});
    const auto base = optimize_order(net, 3);
    size_t prev_slices = 0;
    size_t prev_bytes = base.max_intermediate_bytes;
    for (int shift : {1, 2, 3}) {
        const size_t cap = base.max_intermediate_bytes >> shift;
        try {
            const auto plan = optimize_order(net, 3, 8, cap);
            CHECK(plan.max_intermediate_bytes <= cap);
            CHECK(plan.slices.size() >= prev_slices);
            CHECK(plan.max_intermediate_bytes <= prev_bytes);
            prev_slices = plan.slices.size();
            prev_bytes = plan.max_intermediate_bytes;
        } catch (const CapacityError&) {
            // greedy slicing requires each slice to strictly shrink the
            // largest tensor; a cap below what that reaches is reported,
            // never silently violated — and every tighter cap must also fail
            CHECK_THROWS_AS(optimize_order(net, 3, 8, cap / 2), CapacityError);
            break;
        }
    }
}

TEST_CASE("an infeasible memory cap raises a capacity error") {
    const auto circ = small_circuit(3, 1, 4, 2);
    const auto net = build_network(circ, uint64_t{0});
    CHECK_THROWS_AS(optimize_order(net, 0, 8, size_t{8}), CapacityError);
}

TEST_CASE("contracted value is plan independent") {
    const auto circ = small_circuit(3, 1, 5, 11);
    const auto net = build_network(circ, uint64_t{42});
    const auto a = contract(net, optimize_order(net, 1)).value;
    const auto b = contract(net, optimize_order(net, 99)).value;
    const auto c = contract(net, optimize_order(net, 7, 3)).value;
    CHECK(std::abs(a - b) < 1e-9);
    CHECK(std::abs(a - c) < 1e-9);
}

TEST_CASE("planning is deterministic for a fixed seed") {
    const auto circ = small_circuit(4, 2, 8, 6);
    const auto net = build_network(circ, uint64_t{0});
    const auto p1 = optimize_order(net, 5);
    const auto p2 = optimize_order(net, 5);
    CHECK(p1.to_json() == p2.to_json());
}

TEST_CASE("open-output network reports open indices and refuses contraction") {
    const auto circ = small_circuit(3, 1, 3, 0);
    const auto net = build_network(circ, std::nullopt);
    CHECK(static_cast<int>(net.open_indices().size()) == circ.n());
    const auto plan = optimize_order(net, 0);
    CHECK(plan.max_intermediate_entries >= (size_t{1} << circ.n()));
    CHECK_THROWS_AS(contract(net, plan), ValidationError);
}

TEST_CASE("runtime conversion anchors") {
    const MachineSpec machine;
    // 6.5e16 complex FLOPs -> ~1.54 s on the reference machine model
    CHECK(runtime_from_complex_flops(6.5e16, machine) == doctest::Approx(1.5430267).epsilon(1e-6));
    // 1.6e19 -> ~379.8 s
    CHECK(runtime_from_complex_flops(1.6e19, machine) == doctest::Approx(379.8220).epsilon(1e-6));
}

TEST_CASE("cost report arithmetic") {
    ContractionPlan plan;
    plan.complex_flops = 1ull << 40;
    plan.max_intermediate_entries = 1024;
    plan.max_intermediate_bytes = 8192;
    const MachineSpec machine;
    const auto rep = report_cost(plan, machine, 1000000, 1e-3, 100.0);
    CHECK(rep.machine_flops == doctest::Approx(8.0 * std::ldexp(1.0, 40)));
    CHECK(rep.runtime_seconds ==
          doctest::Approx(8.0 * std::ldexp(1.0, 40) / (1.685e18 * 0.20)));
    CHECK(rep.sample_complex_flops ==
          doctest::Approx(1e-3 * 1e6 * std::ldexp(1.0, 40) / 100.0));
    CHECK(rep.sample_runtime_seconds ==
          doctest::Approx(8.0 * rep.sample_complex_flops / (1.685e18 * 0.20)));
    CHECK_THROWS_AS(report_cost(plan, machine, 0), ValidationError);
    CHECK_THROWS_AS(report_cost(plan, machine, 1, 1.5), ValidationError);
    CHECK_THROWS_AS(report_cost(plan, machine, 1, 0.5, 0.0), ValidationError);
}

TEST_CASE("benchmark manifest loads and converts to runtimes") {
    const auto rows = load_benchmark_manifest(kDataDir + "/table1.json");
    REQUIRE(rows.size() == 6);
    const auto* zcz83 = &rows.back();
    CHECK(zcz83->n == 83);
    CHECK(zcz83->m == 32);
    bool found = false;
    for (const auto& e : zcz83->entries) {
        if (e.source == "main" && e.memory == "762.2PB") {
            found = true;
            CHECK(e.amp_complex_flops == doctest::Approx(1.3e29));
            CHECK(e.sample_complex_flops == doctest::Approx(7.5e31));
        }
    }
    CHECK(found);
    const auto report = benchmark_report(rows, MachineSpec{});
    CHECK(report.at("rows").size() == 6);
    // the two sources agree on every overlapping cell in the bundled manifest
    for (const auto& rj : report.at("rows"))
        for (const auto& ej : rj.at("entries"))
            CHECK_FALSE(ej.at("source_discrepancy").get<bool>());
}
