#include <doctest.h>

#include <map>
#include <set>

#include "rcs/device.hpp"

using namespace rcs;

namespace {

const std::string kDataDir = RCS_DATA_DIR_PATH;

// Independent adjacency oracle: enumerate couplers straight from the stated
// rule, without going through build_topology's bookkeeping.
std::set<std::pair<int, int>> oracle_couplers(int rows, int cols) {
    std::set<std::pair<int, int>> out;
    for (int r = 0; r + 1 < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int q = r * cols + c;
            out.insert({q, (r + 1) * cols + c});
            const int dc = (r % 2 == 0) ? c - 1 : c + 1;
            if (dc >= 0 && dc < cols) out.insert({q, (r + 1) * cols + dc});
        }
    }
    return out;
}

QubitSubset full_subset(const DeviceTopology& topo) {
    QubitSubset s;
    s.name = "full";
    for (int q = 0; q < topo.num_qubits(); ++q) s.active.push_back(q);
    return s;
}

} // namespace

TEST_CASE("bundled lattice has 105 qubits and 182 couplers") {
    const auto topo = build_topology(15, 7);
    CHECK(topo.num_qubits() == 105);
    CHECK(topo.couplers.size() == 182);
}

TEST_CASE("single row has no couplers") {
    const auto topo = build_topology(1, 7);
    CHECK(topo.num_qubits() == 7);
    CHECK(topo.couplers.empty());
}

TEST_CASE("3x2 lattice matches the adjacency oracle") {
    const auto topo = build_topology(3, 2);
    CHECK(topo.couplers.size() == 6);
    const auto expected = oracle_couplers(3, 2);
    std::set<std::pair<int, int>> got;
    for (const auto& c : topo.couplers) got.insert({c.a, c.b});
    CHECK(got == expected);
}

TEST_CASE("coupler count identity (r-1)*(2c-1)") {
    for (int r = 2; r <= 15; ++r) {
        for (int c = 1; c <= 7; c += 3) {
            const auto topo = build_topology(r, c);
            CHECK(static_cast<int>(topo.couplers.size()) == (r - 1) * (2 * c - 1));
            const auto expected = oracle_couplers(r, c);
            CHECK(topo.couplers.size() == expected.size());
        }
    }
}

TEST_CASE("pattern classes are matchings and partition the couplers") {
    const auto topo = build_topology(15, 7);
    const auto full = full_subset(topo);
    std::set<Coupler> all;
    for (Pattern p : {Pattern::A, Pattern::B, Pattern::C, Pattern::D}) {
        const auto layer = pattern_layer(topo, full, p);
        std::set<int> touched;
        for (const auto& c : layer) {
            CHECK(touched.insert(c.a).second);
            CHECK(touched.insert(c.b).second);
            CHECK(all.insert(c).second);   // labels are disjoint
        }
    }
    CHECK(all.size() == 182);
}

TEST_CASE("topology construction is deterministic") {
    const auto a = build_topology(15, 7);
    const auto b = build_topology(15, 7);
    CHECK(a.couplers == b.couplers);
    CHECK(a.pattern_assignment == b.pattern_assignment);
}

TEST_CASE("pattern layer on a single-qubit subset is empty") {
    const auto topo = build_topology(15, 7);
    QubitSubset s;
    s.name = "one";
    s.active = {10};
    for (Pattern p : {Pattern::A, Pattern::B, Pattern::C, Pattern::D})
        CHECK(pattern_layer(topo, s, p).empty());
}

TEST_CASE("bundled 83-qubit subset: validated, pattern sizes frozen") {
    const auto topo = build_topology(15, 7);
    const auto s83 = load_subset(kDataDir + "/subset83.json");
    REQUIRE(s83.size() == 83);
    validate_subset(topo, s83);
    // regression values from the enumeration oracle
    std::map<Pattern, size_t> sizes;
    for (Pattern p : {Pattern::A, Pattern::B, Pattern::C, Pattern::D})
        sizes[p] = pattern_layer(topo, s83, p).size();
    CHECK(sizes[Pattern::A] == 38);
    CHECK(sizes[Pattern::B] == 38);
    CHECK(sizes[Pattern::C] == 33);
    CHECK(sizes[Pattern::D] == 32);
}

TEST_CASE("bundled 31-qubit subset validates") {
    const auto topo = build_topology(15, 7);
    const auto s31 = load_subset(kDataDir + "/subset31.json");
    REQUIRE(s31.size() == 31);
    validate_subset(topo, s31);
}

TEST_CASE("bundled mean profile carries the published averages") {
    const auto p = load_profile(kDataDir + "/profile_zcz3_mean.json");
    CHECK(p.e1 == doctest::Approx(0.97e-3));
    CHECK(p.e2 == doctest::Approx(3.75e-3));
    CHECK(p.e_ro == doctest::Approx(8.67e-3));
    CHECK(p.sampling_interval_s == doctest::Approx(400e-6));
    CHECK(p.t_1q_s == doctest::Approx(28e-9));
    CHECK(p.t_2q_s == doctest::Approx(45e-9));
}

TEST_CASE("profile with an error rate >= 1 is rejected") {
    nlohmann::json j = profile_to_json(DeviceProfile{});
    j["name"] = "bad";
    j["e2"] = 1.2;
    CHECK_THROWS_AS(profile_from_json(j), ValidationError);
}

TEST_CASE("malformed profile document names the missing field") {
    nlohmann::json j = profile_to_json(DeviceProfile{});
    j.erase("e_ro");
    try {
        profile_from_json(j);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("e_ro") != std::string::npos);
    }
}

TEST_CASE("disconnected subset is rejected and names a stranded qubit") {
    const auto topo = build_topology(15, 7);
    QubitSubset s;
    s.name = "gap";
    s.active = {0, 104};   // opposite corners, not adjacent
    try {
        validate_subset(topo, s);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("disconnected") != std::string::npos);
        CHECK(std::string(e.what()).find("104") != std::string::npos);
    }
}

TEST_CASE("duplicate qubits in a subset are rejected") {
    const auto topo = build_topology(15, 7);
    QubitSubset s;
    s.name = "dup";
    s.active = {3, 10, 3};
    CHECK_THROWS_AS(validate_subset(topo, s), ValidationError);
}

TEST_CASE("topology documents round-trip") {
    const auto topo = build_topology(15, 7);
    const auto back = topology_from_json(topology_to_json(topo));
    CHECK(back.couplers == topo.couplers);
    CHECK(back.pattern_assignment == topo.pattern_assignment);
}

TEST_CASE("QubitId linear mapping is a bijection") {
    const int cols = 7;
    for (int linear = 0; linear < 105; ++linear) {
        const auto q = QubitId::from_linear(linear, cols);
        CHECK(q.linear(cols) == linear);
        CHECK(q.row == linear / cols);
        CHECK(q.col == linear % cols);
    }
}
