#include <doctest.h>

#include <cmath>
#include <numeric>

#include "rcs/circuit.hpp"
#include "rcs/simulator.hpp"
#include "rcs/xeb.hpp"

using namespace rcs;

namespace {

SampleSet from_probs(int n, std::vector<double> probs) {
    SampleSet s;
    s.n = n;
    s.bitstrings.assign(probs.size(), 0);
    s.ideal_probs = std::move(probs);
    return s;
}

} // namespace

TEST_CASE("uniform-probability samples estimate fidelity 0") {
    const int n = 6;
    const double dim = 64.0;
    const auto est = linear_xeb(from_probs(n, std::vector<double>(1000, 1.0 / dim)), n);
    CHECK(est.value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(est.stderr_ == doctest::Approx(1.0 / std::sqrt(1000.0)));
    CHECK(est.num_samples == 1000);
}

TEST_CASE("linear XEB is affine in the recorded probabilities") {
    // scaling every p by c maps F -> c*(F+1) - 1
    std::vector<double> probs = {0.01, 0.002, 0.04, 0.015, 0.0003};
    const int n = 7;
    const double f0 = linear_xeb(from_probs(n, probs), n).value;
    const double c = 0.37;
    for (double& p : probs) p *= c;
    const double f1 = linear_xeb(from_probs(n, probs), n).value;
    CHECK(f1 == doctest::Approx(c * (f0 + 1.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("linear XEB rejects empty or probability-free samples") {
    CHECK_THROWS_AS(linear_xeb(SampleSet{}, 4), ValidationError);
    SampleSet s;
    s.n = 4;
    s.bitstrings = {1, 2, 3};
    CHECK_THROWS_AS(linear_xeb(s, 4), ValidationError);
}

TEST_CASE("uniform distribution has KS distance 1 - 1/e from Porter-Thomas") {
    const double dim = 4096.0;
    const std::vector<double> uniform(4096, 1.0 / dim);
    CHECK(porter_thomas_test(uniform, dim) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("random deep circuits look Porter-Thomas; shallow ones do not") {
    const auto topo = build_topology(15, 7);
    const auto subset = make_block_subset(topo, 0, 0, 5, 1);
    const double dim = std::ldexp(1.0, subset.size());
    const auto deep = probabilities(generate(topo, subset, 12, 7));
    CHECK(porter_thomas_test(deep, dim) < 0.05);
    const auto shallow = probabilities(generate(topo, subset, 1, 7));
    CHECK(porter_thomas_test(shallow, dim) > 0.2);
}

TEST_CASE("speckle purity of the uniform vector is 0") {
    const std::vector<double> uniform(256, 1.0 / 256.0);
    CHECK(speckle_purity(uniform, 256.0).value == doctest::Approx(0.0));
}

TEST_CASE("speckle purity is permutation invariant") {
    std::vector<double> probs{0.3, 0.05, 0.15, 0.2, 0.1, 0.2};
    const double a = speckle_purity(probs, 6.0).value;
    std::rotate(probs.begin(), probs.begin() + 2, probs.end());
    std::swap(probs[0], probs[3]);
    CHECK(speckle_purity(probs, 6.0).value == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("purity of a depolarized Porter-Thomas mixture tracks the mixing weight") {
    const auto topo = build_topology(15, 7);
    const auto subset = make_block_subset(topo, 0, 0, 5, 1);
    auto probs = probabilities(generate(topo, subset, 12, 11));
    const double dim = std::ldexp(1.0, subset.size());
    const double pure = speckle_purity(probs, dim).value;
    CHECK(pure == doctest::Approx(1.0).epsilon(0.1));
    const double f = 0.35;
    for (double& p : probs) p = f * p + (1.0 - f) / dim;
    CHECK(speckle_purity(probs, dim).value == doctest::Approx(f * pure).epsilon(1e-9));
}

TEST_CASE("linear XEB on ideal samples converges to its exact expectation") {
    // sampling from p itself gives E[estimate] = D * sum p^2 - 1, which only
    // approaches 1 once the circuit is deep enough to look Porter-Thomas
    const auto topo = build_topology(15, 7);
    const auto subset = make_block_subset(topo, 0, 0, 4, 1);
    const auto circ = generate(topo, subset, 10, 3);
    const auto probs = probabilities(circ);
    const double dim = std::ldexp(1.0, subset.size());
    double sum_sq = 0.0;
    for (double p : probs) sum_sq += p * p;
    const double expected = dim * sum_sq - 1.0;
    const auto samples = sample(circ, 50000, 4, NoiseSpec::ideal(), 4);
    const auto est = linear_xeb(samples, subset.size());
    CHECK(std::abs(est.value - expected) < 5.0 * est.stderr_);
}

TEST_CASE("linear XEB on a depolarizing mixture recovers the scaled expectation") {
    const auto topo = build_topology(15, 7);
    const auto subset = make_block_subset(topo, 0, 0, 4, 1);
    const auto circ = generate(topo, subset, 10, 3);
    const auto probs = probabilities(circ);
    const double dim = std::ldexp(1.0, subset.size());
    double sum_sq = 0.0;
    for (double p : probs) sum_sq += p * p;
    const double f = 0.3;
    const double expected = f * (dim * sum_sq - 1.0);
    const auto samples = sample(circ, 50000, 4, NoiseSpec::mixture(f), 4);
    const auto est = linear_xeb(samples, subset.size());
    CHECK(std::abs(est.value - expected) < 5.0 * est.stderr_);
}

TEST_CASE("stability band arithmetic and verdicts") {
    const double estimate = 3.3e-4;
    const std::vector<std::pair<double, double>> series = {
        {0.0, 3.3e-4}, {1.0, 2.6e-4}, {2.0, 4.0e-4}, {3.0, 4.2e-4}};
    const auto rep = stability_check(series, estimate);
    CHECK(rep.lower() == doctest::Approx(2.475e-4));
    CHECK(rep.upper() == doctest::Approx(4.125e-4));
    CHECK(rep.series[0].pass);
    CHECK(rep.series[1].pass);
    CHECK(rep.series[2].pass);
    CHECK_FALSE(rep.series[3].pass); // 4.2e-4 > 4.125e-4
    CHECK_FALSE(rep.overall_pass);
    const auto csv = rep.to_csv();
    CHECK(csv.find("timestamp,value,lower,upper,verdict") == 0);
    CHECK(csv.find("fail") != std::string::npos);
}

TEST_CASE("widening the stability band can only turn failures into passes") {
    const std::vector<std::pair<double, double>> series = {
        {0.0, 0.8}, {1.0, 1.0}, {2.0, 1.3}};
    const auto narrow = stability_check(series, 1.0, 0.1);
    const auto wide = stability_check(series, 1.0, 0.4);
    for (size_t i = 0; i < series.size(); ++i)
        if (narrow.series[i].pass) CHECK(wide.series[i].pass);
    CHECK_FALSE(narrow.overall_pass);
    CHECK(wide.overall_pass);
}

TEST_CASE("stability check input validation") {
    CHECK_THROWS_AS(stability_check({}, 1.0), ValidationError);
    CHECK_THROWS_AS(stability_check({{0.0, 1.0}}, 0.0), ValidationError);
    CHECK_THROWS_AS(stability_check({{0.0, 1.0}}, 1.0, 1.5), ValidationError);
}
