#include <doctest.h>

#include <cmath>

#include "rcs/errormodel.hpp"

using namespace rcs;

namespace {

const std::string kDataDir = RCS_DATA_DIR_PATH;

DeviceProfile flat_profile(double e1, double e2, double ei, double ero) {
    DeviceProfile p;
    p.e1 = e1;
    p.e2 = e2;
    p.e_idle = ei;
    p.e_ro = ero;
    return p;
}

} // namespace

TEST_CASE("zero error rates predict fidelity exactly 1") {
    const auto topo = build_topology(15, 7);
    const auto circ = generate(topo, make_block_subset(topo, 0, 0, 3, 1), 6, 1);
    const auto budget = error_budget(circ, flat_profile(0, 0, 0, 0));
    CHECK(budget.predicted_fidelity() == 1.0);
    for (const auto& c : budget.contributions) CHECK(c.log_fidelity == 0.0);
}

TEST_CASE("single qubit, one cycle: hand-computed prediction") {
    // 1 qubit, 1 cycle: two 1q gates, one idle slot, one readout
    const auto topo = build_topology(15, 7);
    QubitSubset one;
    one.name = "one";
    one.active = {0};
    const auto circ = generate(topo, one, 1, 0);
    const auto gc = gate_counts(circ);
    CHECK(gc.n_1q == 2);
    CHECK(gc.n_2q == 0);
    CHECK(gc.n_idle == 1);
    CHECK(gc.n_measured == 1);
    const double e = 1e-3;
    // only 1q errors: (1 - e)^2 = 0.998001
    const auto only_1q = predict_fidelity(circ, flat_profile(e, 0, 0, 0));
    CHECK(only_1q.value == doctest::Approx(0.998001).epsilon(1e-12));
    // all four channels: (1-e)^2 * (1-e) idle * (1-e) readout
    const auto all = predict_fidelity(circ, flat_profile(e, 5e-3, e, e));
    CHECK(all.value == doctest::Approx(std::pow(1.0 - e, 4)).epsilon(1e-12));
}

TEST_CASE("prediction decreases with depth and with any rate increase") {
    const auto topo = build_topology(15, 7);
    const auto subset = make_block_subset(topo, 0, 0, 4, 2);
    const auto base = flat_profile(1e-3, 4e-3, 1e-3, 9e-3);
    double prev = 1.0;
    for (int m : {4, 8, 16}) {
        const double f = predict_fidelity(generate(topo, subset, m, 2), base).value;
        CHECK(f < prev);
        prev = f;
    }
    const auto circ = generate(topo, subset, 8, 2);
    const double f0 = predict_fidelity(circ, base).value;
    CHECK(predict_fidelity(circ, flat_profile(2e-3, 4e-3, 1e-3, 9e-3)).value < f0);
    CHECK(predict_fidelity(circ, flat_profile(1e-3, 8e-3, 1e-3, 9e-3)).value < f0);
    CHECK(predict_fidelity(circ, flat_profile(1e-3, 4e-3, 2e-3, 9e-3)).value < f0);
    CHECK(predict_fidelity(circ, flat_profile(1e-3, 4e-3, 1e-3, 2e-2)).value < f0);
}

TEST_CASE("budget decomposes exactly into its component product") {
    const auto topo = build_topology(15, 7);
    const auto circ = generate(topo, make_block_subset(topo, 0, 0, 5, 2), 10, 3);
    const auto budget = error_budget(circ, flat_profile(9.7e-4, 3.75e-3, 9.7e-4, 8.67e-3));
    double product = 1.0;
    for (const auto& c : budget.contributions) product *= std::exp(c.log_fidelity);
    CHECK(budget.predicted_fidelity() == doctest::Approx(product).epsilon(1e-12));
    // log-domain total matches a direct per-gate product
    const auto gc = gate_counts(circ);
    const double direct = std::pow(1.0 - 9.7e-4, static_cast<double>(gc.n_1q)) *
                          std::pow(1.0 - 3.75e-3, static_cast<double>(gc.n_2q)) *
                          std::pow(1.0 - 9.7e-4, static_cast<double>(gc.n_idle)) *
                          std::pow(1.0 - 8.67e-3, static_cast<double>(gc.n_measured));
    CHECK(budget.predicted_fidelity() == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("spam correction multiplies the prediction") {
    const auto topo = build_topology(15, 7);
    const auto circ = generate(topo, make_block_subset(topo, 0, 0, 3, 1), 4, 0);
    const auto profile = flat_profile(1e-3, 4e-3, 1e-3, 9e-3);
    const double f = predict_fidelity(circ, profile).value;
    CHECK(predict_fidelity(circ, profile, 0.5).value == doctest::Approx(0.5 * f));
}

TEST_CASE("patch ratio is 1 at zero rates and above 1 when gates are cut") {
    const auto topo = build_topology(15, 7);
    const auto subset = make_block_subset(topo, 0, 0, 5, 2);
    const auto circ = generate(topo, subset, 8, 4);
    const auto regions = patch_by_rows(topo, subset, 2);
    CHECK(patch_ratio(circ, regions, topo, flat_profile(0, 0, 0, 0)) == doctest::Approx(1.0));
    const auto profile = flat_profile(9.7e-4, 3.75e-3, 9.7e-4, 8.67e-3);
    const double ratio = patch_ratio(circ, regions, topo, profile);
    CHECK(ratio > 1.0);
    // and it equals the explicit quotient of predictions
    const auto patched = apply_patch(circ, regions, topo);
    const double quotient =
        predict_fidelity(patched, profile).value / predict_fidelity(circ, profile).value;
    CHECK(ratio == doctest::Approx(quotient).epsilon(1e-10));
}

TEST_CASE("quantum runtime scales with shots at the sampling interval") {
    const auto profile = load_profile(kDataDir + "/profile_zcz3_mean.json");
    CHECK(estimate_quantum_runtime(1, profile) == doctest::Approx(4.0e-4));
    CHECK(estimate_quantum_runtime(1000000, profile) == doctest::Approx(400.0));
    CHECK(estimate_quantum_runtime(410000000, profile) == doctest::Approx(1.64e5));
    CHECK_THROWS_AS(estimate_quantum_runtime(0, profile), ValidationError);
}

TEST_CASE("budget table and json carry all four components") {
    const auto topo = build_topology(15, 7);
    const auto circ = generate(topo, make_block_subset(topo, 0, 0, 3, 1), 4, 0);
    const auto budget = error_budget(circ, flat_profile(1e-3, 4e-3, 1e-3, 9e-3));
    const auto table = budget.to_table();
    for (const char* name : {"1q", "2q", "idle", "readout"})
        CHECK(table.find(name) != std::string::npos);
    const auto j = budget.to_json();
    CHECK(j.at("contributions").size() == 4);
    CHECK(j.at("predicted_fidelity").get<double>() ==
          doctest::Approx(budget.predicted_fidelity()));
}
