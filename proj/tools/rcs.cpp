// Command-line front end for the random-circuit-sampling pipeline. Every
// subcommand reads and writes plain files and drops a run manifest next to
// its primary output, so pipelines compose with no hidden state.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcs/circuit.hpp"
#include "rcs/costest.hpp"
#include "rcs/device.hpp"
#include "rcs/errormodel.hpp"
#include "rcs/manifest.hpp"
#include "rcs/simulator.hpp"
#include "rcs/xeb.hpp"

#ifndef RCS_DEFAULT_DATA_DIR
#define RCS_DEFAULT_DATA_DIR "data"
#endif

namespace {

std::string data_dir() {
    if (const char* env = std::getenv("RCS_DATA_DIR")) return env;
    return RCS_DEFAULT_DATA_DIR;
}

rcs::DeviceTopology resolve_topology(const std::string& spec) {
    if (spec.empty()) return rcs::build_topology(15, 7);
    return rcs::load_topology(spec);
}

// subset spec: bundled name (subset31 / subset83), "block:r0,c0,r1,c1", or a
// file path
rcs::QubitSubset resolve_subset(const std::string& spec, const rcs::DeviceTopology& topo) {
    if (spec == "subset31") return rcs::load_subset(data_dir() + "/subset31.json");
    if (spec == "subset83") return rcs::load_subset(data_dir() + "/subset83.json");
    if (spec.rfind("block:", 0) == 0) {
        int r0, c0, r1, c1;
        char sep;
        std::istringstream ss(spec.substr(6));
        if (!(ss >> r0 >> sep >> c0 >> sep >> r1 >> sep >> c1))
            throw rcs::ValidationError("bad block subset spec: " + spec);
        return rcs::make_block_subset(topo, r0, c0, r1, c1, spec);
    }
    return rcs::load_subset(spec);
}

rcs::DeviceProfile resolve_profile(const std::string& spec) {
    if (spec.empty() || spec == "zcz3-mean")
        return rcs::load_profile(data_dir() + "/profile_zcz3_mean.json");
    return rcs::load_profile(spec);
}

rcs::NoiseSpec parse_noise(const std::string& spec) {
    if (spec.empty() || spec == "ideal") return rcs::NoiseSpec::ideal();
    if (spec.rfind("mixture:", 0) == 0)
        return rcs::NoiseSpec::mixture(std::stod(spec.substr(8)));
    if (spec.rfind("trajectory:", 0) == 0) {
        std::istringstream ss(spec.substr(11));
        double e1, e2, ei, er;
        char c;
        if (!(ss >> e1 >> c >> e2 >> c >> ei >> c >> er))
            throw rcs::ValidationError("bad noise spec '" + spec +
                                       "' (want trajectory:e1,e2,eidle,ero)");
        return rcs::NoiseSpec::trajectory(e1, e2, ei, er);
    }
    throw rcs::ValidationError("unknown noise spec '" + spec + "'");
}

size_t parse_memory(const std::string& spec) {
    size_t mult = 1;
    std::string num = spec;
    auto ends_with = [&](const char* suffix) {
        const size_t len = std::string(suffix).size();
        return num.size() > len && num.compare(num.size() - len, len, suffix) == 0;
    };
    if (ends_with("KiB")) mult = size_t{1} << 10;
    else if (ends_with("MiB")) mult = size_t{1} << 20;
    else if (ends_with("GiB")) mult = size_t{1} << 30;
    if (mult > 1) num = num.substr(0, num.size() - 3);
    return static_cast<size_t>(std::stoull(num)) * mult;
}

uint64_t parse_bitstring(const std::string& hex) {
    try {
        return std::stoull(hex, nullptr, 16);
    } catch (...) {
        throw rcs::ValidationError("bad bitstring '" + hex + "' (want lowercase hex)");
    }
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void finish(rcs::RunManifest& manifest, const Timer& timer, const std::string& out_path) {
    manifest.add_output(out_path);
    manifest.wall_clock_seconds = timer.seconds();
    manifest.save(out_path + ".manifest.json");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"random circuit sampling pipeline"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a random circuit");
    std::string gen_qubits, gen_sequence = "ABCDCDAB", gen_profile, gen_topology, gen_out;
    int gen_cycles = 0;
    uint64_t gen_seed = 0;
    bool gen_allow_repeat = false;
    gen->add_option("--qubits", gen_qubits, "subset31 | subset83 | block:r0,c0,r1,c1 | file")
        ->required();
    gen->add_option("--cycles", gen_cycles)->required();
    gen->add_option("--seed", gen_seed)->required();
    gen->add_option("--sequence", gen_sequence, "pattern sequence (default ABCDCDAB)");
    gen->add_option("--profile", gen_profile, "profile file (default bundled zcz3-mean)");
    gen->add_option("--topology", gen_topology, "topology override file");
    gen->add_flag("--allow-repeat", gen_allow_repeat,
                  "disable the no-immediate-repeat rule for single-qubit gates");
    gen->add_option("--out", gen_out)->required();

    // patch
    auto* patch = app.add_subcommand("patch", "remove two-qubit gates crossing a partition");
    std::string patch_circuit, patch_regions_file, patch_topology, patch_out;
    int patch_k = 0;
    patch->add_option("--circuit", patch_circuit)->required();
    patch->add_option("--k", patch_k, "row-band partition into k regions");
    patch->add_option("--regions", patch_regions_file, "JSON file with explicit regions");
    patch->add_option("--topology", patch_topology);
    patch->add_option("--out", patch_out)->required();

    // simulate
    auto* sim = app.add_subcommand("simulate", "exact statevector simulation");
    std::string sim_circuit, sim_out, sim_bitstring;
    bool sim_patched = false;
    int sim_limit = rcs::kDefaultQubitLimit;
    sim->add_option("--circuit", sim_circuit)->required();
    sim->add_option("--bitstring", sim_bitstring, "report one amplitude (hex)");
    sim->add_flag("--patched", sim_patched, "factorized per-patch simulation");
    sim->add_option("--limit", sim_limit, "qubit capacity ceiling");
    sim->add_option("--out", sim_out)->required();

    // sample
    auto* smp = app.add_subcommand("sample", "draw measurement bitstrings");
    std::string smp_circuit, smp_noise = "ideal", smp_out;
    long long smp_shots = 0;
    uint64_t smp_seed = 0;
    int smp_threads = 1, smp_limit = rcs::kDefaultQubitLimit;
    smp->add_option("--circuit", smp_circuit)->required();
    smp->add_option("--shots", smp_shots)->required();
    smp->add_option("--seed", smp_seed)->required();
    smp->add_option("--noise", smp_noise, "ideal | mixture:f | trajectory:e1,e2,eidle,ero");
    smp->add_option("--threads", smp_threads);
    smp->add_option("--limit", smp_limit);
    smp->add_option("--out", smp_out)->required();

    // xeb
    auto* xeb = app.add_subcommand("xeb", "linear XEB fidelity from a sample file");
    std::string xeb_samples, xeb_out;
    xeb->add_option("--samples", xeb_samples)->required();
    xeb->add_option("--out", xeb_out)->required();

    // purity
    auto* pur = app.add_subcommand("purity", "speckle-purity fidelity estimate");
    std::string pur_circuit, pur_out;
    double pur_mix = 1.0;
    int pur_limit = rcs::kDefaultQubitLimit;
    pur->add_option("--circuit", pur_circuit)->required();
    pur->add_option("--mix", pur_mix, "analyze p = f*p_ideal + (1-f)/D");
    pur->add_option("--limit", pur_limit);
    pur->add_option("--out", pur_out)->required();

    // predict
    auto* pred = app.add_subcommand("predict", "digital error-model fidelity prediction");
    std::string pred_circuit, pred_profile, pred_out;
    double pred_spam = 1.0;
    pred->add_option("--circuit", pred_circuit)->required();
    pred->add_option("--profile", pred_profile);
    pred->add_option("--spam", pred_spam, "state-preparation correction factor");
    pred->add_option("--out", pred_out)->required();

    // cost
    auto* cost = app.add_subcommand("cost", "tensor-network contraction cost estimate");
    std::string cost_circuit, cost_bitstring = "0", cost_memory, cost_manifest, cost_out;
    uint64_t cost_seed = 0;
    int cost_restarts = 8;
    long long cost_shots = 1;
    double cost_fidelity = 1.0, cost_amortization = 1.0;
    double cost_peak = 1.685e18, cost_efficiency = 0.20;
    bool cost_contract = false;
    cost->add_option("--circuit", cost_circuit);
    cost->add_option("--bitstring", cost_bitstring, "output bitstring (hex)");
    cost->add_option("--seed", cost_seed);
    cost->add_option("--restarts", cost_restarts);
    cost->add_option("--memory", cost_memory, "memory constraint, e.g. 64MiB");
    cost->add_flag("--contract", cost_contract, "also contract and report the amplitude");
    cost->add_option("--shots", cost_shots, "N for noisy-sample pricing");
    cost->add_option("--fidelity", cost_fidelity, "target fidelity f");
    cost->add_option("--amortization", cost_amortization, "batch amortization b");
    cost->add_option("--peak", cost_peak, "machine peak FLOP/s");
    cost->add_option("--efficiency", cost_efficiency, "FLOP efficiency");
    cost->add_option("--manifest", cost_manifest, "benchmark manifest for reference report");
    cost->add_option("--out", cost_out)->required();

    // monitor
    auto* mon = app.add_subcommand("monitor", "fidelity stability band check");
    std::string mon_series, mon_out;
    double mon_estimate = 0.0, mon_band = 0.25;
    mon->add_option("--series", mon_series, "CSV of timestamp,value rows")->required();
    mon->add_option("--estimate", mon_estimate)->required();
    mon->add_option("--band", mon_band);
    mon->add_option("--out", mon_out)->required();

    // runtime
    auto* rt = app.add_subcommand("runtime", "quantum sampling runtime for N shots");
    std::string rt_profile, rt_out;
    long long rt_shots = 0;
    rt->add_option("--shots", rt_shots)->required();
    rt->add_option("--profile", rt_profile);
    rt->add_option("--out", rt_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Timer timer;
    try {
        if (*gen) {
            rcs::RunManifest manifest;
            manifest.command = "gen";
            manifest.parameters = {{"qubits", gen_qubits}, {"cycles", gen_cycles},
                                   {"seed", gen_seed}, {"sequence", gen_sequence},
                                   {"profile", gen_profile}, {"topology", gen_topology},
                                   {"no_repeat", !gen_allow_repeat}};
            const auto topo = resolve_topology(gen_topology);
            const auto subset = resolve_subset(gen_qubits, topo);
            const auto profile = resolve_profile(gen_profile);
            rcs::Circuit circ = rcs::generate(topo, subset, gen_cycles, gen_seed, gen_sequence,
                                              profile, !gen_allow_repeat);
            rcs::write_json_output(rcs::circuit_to_json(circ), gen_out, manifest);
            finish(manifest, timer, gen_out);
            const auto counts = rcs::gate_counts(circ);
            std::cout << "circuit: " << circ.n() << " qubits, " << circ.cycles << " cycles, "
                      << counts.n_1q << " 1q gates, " << counts.n_2q << " 2q gates -> "
                      << gen_out << "\n";
        } else if (*patch) {
            rcs::RunManifest manifest;
            manifest.command = "patch";
            manifest.parameters = {{"k", patch_k}, {"regions", patch_regions_file}};
            manifest.add_input(patch_circuit);
            const auto topo = resolve_topology(patch_topology);
            rcs::Circuit circ = rcs::load_circuit(patch_circuit);
            rcs::PatchRegions regions;
            if (!patch_regions_file.empty()) {
                manifest.add_input(patch_regions_file);
                auto doc = rcs::detail::parse_document(
                    rcs::detail::read_file(patch_regions_file), patch_regions_file);
                regions = rcs::detail::require_field<rcs::PatchRegions>(doc, "regions",
                                                                        patch_regions_file);
            } else if (patch_k >= 1) {
                regions = rcs::patch_by_rows(topo, circ.subset, patch_k);
            } else {
                throw rcs::ValidationError("patch: give either --k or --regions");
            }
            const auto before = rcs::gate_counts(circ);
            rcs::Circuit patched = rcs::apply_patch(circ, regions, topo);
            const auto after = rcs::gate_counts(patched);
            rcs::write_json_output(rcs::circuit_to_json(patched), patch_out, manifest);
            finish(manifest, timer, patch_out);
            std::cout << "patched into " << regions.size() << " regions, removed "
                      << (before.n_2q - after.n_2q) << " of " << before.n_2q
                      << " 2q gates -> " << patch_out << "\n";
        } else if (*sim) {
            rcs::RunManifest manifest;
            manifest.command = "simulate";
            manifest.parameters = {{"bitstring", sim_bitstring}, {"patched", sim_patched},
                                   {"limit", sim_limit}};
            manifest.add_input(sim_circuit);
            rcs::Circuit circ = rcs::load_circuit(sim_circuit);
            nlohmann::json out;
            out["schema_version"] = rcs::kSchemaVersion;
            if (sim_patched) {
                rcs::PatchedState ps = rcs::simulate_patched(circ, sim_limit);
                out["type"] = "patched_state";
                if (!sim_bitstring.empty()) {
                    const rcs::cplx a = ps.amplitude(parse_bitstring(sim_bitstring));
                    out["bitstring"] = sim_bitstring;
                    out["amplitude_re"] = a.real();
                    out["amplitude_im"] = a.imag();
                    out["probability"] = std::norm(a);
                } else {
                    nlohmann::json patches = nlohmann::json::array();
                    for (size_t r = 0; r < ps.states.size(); ++r) {
                        nlohmann::json pj;
                        pj["region"] = ps.regions[r];
                        pj["probabilities"] = rcs::probabilities_of(ps.states[r]);
                        patches.push_back(pj);
                    }
                    out["patches"] = patches;
                }
            } else if (!sim_bitstring.empty()) {
                const rcs::cplx a = rcs::amplitude(circ, parse_bitstring(sim_bitstring), sim_limit);
                out["type"] = "amplitude";
                out["bitstring"] = sim_bitstring;
                out["amplitude_re"] = a.real();
                out["amplitude_im"] = a.imag();
                out["probability"] = std::norm(a);
            } else {
                out["type"] = "probabilities";
                out["n"] = circ.n();
                out["probabilities"] = rcs::probabilities(circ, sim_limit);
            }
            rcs::write_json_output(out, sim_out, manifest);
            finish(manifest, timer, sim_out);
            std::cout << "simulated " << circ.n() << " qubits -> " << sim_out << "\n";
        } else if (*smp) {
            rcs::RunManifest manifest;
            manifest.command = "sample";
            manifest.parameters = {{"shots", smp_shots}, {"seed", smp_seed},
                                   {"noise", smp_noise}, {"limit", smp_limit}};
            manifest.add_input(smp_circuit);
            rcs::Circuit circ = rcs::load_circuit(smp_circuit);
            rcs::SampleSet samples = rcs::sample(circ, smp_shots, smp_seed,
                                                 parse_noise(smp_noise), smp_threads, smp_limit);
            samples.metadata["producer_manifest"] = manifest.digest();
            rcs::save_samples(samples, smp_out);
            finish(manifest, timer, smp_out);
            std::cout << samples.size() << " shots -> " << smp_out << "\n";
        } else if (*xeb) {
            rcs::RunManifest manifest;
            manifest.command = "xeb";
            manifest.add_input(xeb_samples);
            rcs::SampleSet samples = rcs::load_samples(xeb_samples);
            rcs::FidelityEstimate est = rcs::linear_xeb(samples, samples.n);
            rcs::write_json_output(est.to_json(), xeb_out, manifest);
            finish(manifest, timer, xeb_out);
            std::cout << "linear XEB = " << est.value << " +- " << est.stderr_ << " (N = "
                      << est.num_samples << ") -> " << xeb_out << "\n";
        } else if (*pur) {
            rcs::RunManifest manifest;
            manifest.command = "purity";
            manifest.parameters = {{"mix", pur_mix}};
            manifest.add_input(pur_circuit);
            rcs::Circuit circ = rcs::load_circuit(pur_circuit);
            std::vector<double> p = rcs::probabilities(circ, pur_limit);
            const double dim = static_cast<double>(p.size());
            if (pur_mix < 1.0)
                for (auto& v : p) v = pur_mix * v + (1.0 - pur_mix) / dim;
            rcs::FidelityEstimate est = rcs::speckle_purity(p, dim);
            rcs::write_json_output(est.to_json(), pur_out, manifest);
            finish(manifest, timer, pur_out);
            std::cout << "speckle purity = " << est.value << " -> " << pur_out << "\n";
        } else if (*pred) {
            rcs::RunManifest manifest;
            manifest.command = "predict";
            manifest.parameters = {{"profile", pred_profile}, {"spam", pred_spam}};
            manifest.add_input(pred_circuit);
            rcs::Circuit circ = rcs::load_circuit(pred_circuit);
            const auto profile = resolve_profile(pred_profile);
            rcs::ErrorBudget budget = rcs::error_budget(circ, profile, pred_spam);
            rcs::write_json_output(budget.to_json(), pred_out, manifest);
            finish(manifest, timer, pred_out);
            std::cout << budget.to_table();
        } else if (*cost) {
            rcs::RunManifest manifest;
            manifest.command = "cost";
            rcs::MachineSpec machine{cost_peak, cost_efficiency};
            if (!cost_manifest.empty()) {
                manifest.parameters = {{"manifest", cost_manifest}, {"peak", cost_peak},
                                       {"efficiency", cost_efficiency}};
                manifest.add_input(cost_manifest);
                auto rows = rcs::load_benchmark_manifest(cost_manifest);
                rcs::write_json_output(rcs::benchmark_report(rows, machine), cost_out, manifest);
                finish(manifest, timer, cost_out);
                std::cout << rows.size() << " reference rows -> " << cost_out << "\n";
            } else {
                if (cost_circuit.empty())
                    throw rcs::ValidationError("cost: give either --circuit or --manifest");
                manifest.parameters = {{"bitstring", cost_bitstring}, {"seed", cost_seed},
                                       {"restarts", cost_restarts}, {"memory", cost_memory},
                                       {"shots", cost_shots}, {"fidelity", cost_fidelity},
                                       {"amortization", cost_amortization},
                                       {"peak", cost_peak}, {"efficiency", cost_efficiency}};
                manifest.add_input(cost_circuit);
                rcs::Circuit circ = rcs::load_circuit(cost_circuit);
                rcs::TensorNetwork net =
                    rcs::build_network(circ, parse_bitstring(cost_bitstring));
                std::optional<size_t> memory;
                if (!cost_memory.empty()) memory = parse_memory(cost_memory);
                rcs::ContractionPlan plan =
                    rcs::optimize_order(net, cost_seed, cost_restarts, memory);
                rcs::CostReport report = rcs::report_cost(plan, machine, cost_shots,
                                                          cost_fidelity, cost_amortization);
                nlohmann::json out = report.to_json();
                out["plan"] = plan.to_json();
                if (cost_contract) {
                    rcs::ContractionResult res = rcs::contract(net, plan);
                    out["amplitude_re"] = res.value.real();
                    out["amplitude_im"] = res.value.imag();
                    out["counted_flops"] = res.counted_flops;
                }
                rcs::write_json_output(out, cost_out, manifest);
                finish(manifest, timer, cost_out);
                std::cout << "amplitude cost: " << report.complex_flops << " complex FLOPs, "
                          << plan.slices.size() << " slices, max tensor "
                          << report.max_intermediate_bytes << " B, runtime "
                          << report.runtime_seconds << " s -> " << cost_out << "\n";
            }
        } else if (*mon) {
            rcs::RunManifest manifest;
            manifest.command = "monitor";
            manifest.parameters = {{"estimate", mon_estimate}, {"band", mon_band}};
            manifest.add_input(mon_series);
            std::ifstream in(mon_series);
            if (!in) throw rcs::ParseError("cannot open file: " + mon_series);
            std::vector<std::pair<double, double>> series;
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || !(std::isdigit(line[0]) || line[0] == '-')) continue;
                double ts, v;
                char comma;
                std::istringstream ss(line);
                if (!(ss >> ts >> comma >> v))
                    throw rcs::ParseError(mon_series + ": bad series row '" + line + "'");
                series.emplace_back(ts, v);
            }
            rcs::StabilityReport report = rcs::stability_check(series, mon_estimate, mon_band);
            std::ofstream out(mon_out, std::ios::binary);
            if (!out) throw rcs::ParseError("cannot write file: " + mon_out);
            out << "# schema_version=" << rcs::kSchemaVersion << " producer_manifest="
                << manifest.digest() << "\n" << report.to_csv();
            out.close();
            finish(manifest, timer, mon_out);
            std::cout << "stability: " << (report.overall_pass ? "pass" : "fail") << " ("
                      << report.series.size() << " points, band " << mon_band << ") -> "
                      << mon_out << "\n";
        } else if (*rt) {
            rcs::RunManifest manifest;
            manifest.command = "runtime";
            manifest.parameters = {{"shots", rt_shots}, {"profile", rt_profile}};
            const auto profile = resolve_profile(rt_profile);
            const double seconds = rcs::estimate_quantum_runtime(rt_shots, profile);
            nlohmann::json out = {{"schema_version", rcs::kSchemaVersion},
                                  {"type", "quantum_runtime"}, {"shots", rt_shots},
                                  {"sampling_interval_s", profile.sampling_interval_s},
                                  {"runtime_seconds", seconds}};
            rcs::write_json_output(out, rt_out, manifest);
            finish(manifest, timer, rt_out);
            std::cout << rt_shots << " shots x " << profile.sampling_interval_s * 1e6
                      << " us = " << seconds << " s -> " << rt_out << "\n";
        }
    } catch (const rcs::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 4;
    } catch (const rcs::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const rcs::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
