// sawlab_main.cpp
// Command-line front end: run weighted pivot-chain ensembles, tabulate the
// predicted hitting-angle CDFs, compare the two, and run the random-walk
// validation pipeline.
#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sawlab/pipeline.hpp"

namespace {

saw::ExponentSet parse_exponents(const std::string& text, bool rw_mode) {
    saw::ExponentSet base = rw_mode ? saw::ExponentSet::rw3d() : saw::ExponentSet::saw3d();
    double nu = base.nu, gamma = base.gamma, gamma1 = base.gamma1;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        const std::string item = text.substr(start, comma - start);
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--exponents", "expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const double value = std::stod(item.substr(eq + 1));
        if (key == "nu")
            nu = value;
        else if (key == "gamma")
            gamma = value;
        else if (key == "gamma1")
            gamma1 = value;
        else
            throw CLI::ValidationError("--exponents", "unknown key '" + key +
                                                          "' (expected nu, gamma, gamma1)");
        start = comma + 1;
    }
    return saw::ExponentSet::make(nu, gamma, gamma1);
}

saw::EnsembleKind parse_ensemble(const std::string& tag) { return saw::ensemble_from_name(tag); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo laboratory for hitting-angle distributions of lattice walks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file; flags override file values");

    // ---- simulate ----------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "run chains and write a weighted sample CSV");
    std::string sim_ensemble = "half", sim_out, sim_exponents, sim_checkpoint_dir;
    saw::RunConfig run;
    std::optional<double> sim_sphere_weight;
    sim->add_option("--ensemble", sim_ensemble, "full | half | sphere")->required();
    sim->add_option("--N", run.n_steps, "steps per walk (>= 2)")->capture_default_str();
    sim->add_option("--samples", run.budget, "total attempted pivots recorded, across chains")
        ->capture_default_str();
    sim->add_option("--chains", run.chains, "independent chains")->capture_default_str();
    sim->add_option("--threads", run.threads, "worker threads (0 = auto)")->capture_default_str();
    sim->add_option("--seed", run.seed, "master seed")->capture_default_str();
    sim->add_flag("--rw", run.rw_mode, "random-walk oracle mode (no self-avoidance, RW exponents)");
    sim->add_option("--exponents", sim_exponents, "override, e.g. nu=0.5,gamma=1,gamma1=0.5");
    sim->add_option("--a", run.sphere_a, "sphere: center-to-start distance in [0,1)")
        ->capture_default_str();
    sim->add_option("--cutoff-deg", run.cutoff_deg, "conditioning angle for plane ensembles")
        ->capture_default_str();
    sim->add_option("--sphere-weight-exp", sim_sphere_weight,
                    "override the sphere weight exponent p in ||w(N)||^-p");
    sim->add_option("--burn-in", run.burn_in, "attempted pivots before sampling (-1 = 10*N)")
        ->capture_default_str();
    sim->add_option("--checkpoint-dir", sim_checkpoint_dir, "write final chain states here");
    sim->add_option("--out", sim_out, "output CSV path")->required();
    sim->callback([&] {
        run.ensemble = parse_ensemble(sim_ensemble);
        if (!sim_exponents.empty()) run.exponents = parse_exponents(sim_exponents, run.rw_mode);
        run.sphere_weight_exponent = sim_sphere_weight;
        run.checkpoint_dir = sim_checkpoint_dir;
        const saw::SimResult res = saw::run_simulation(run);
        saw::write_simulation_outputs(res, sim_out);
        std::uint64_t attempted = 0, accepted = 0, emitted = 0;
        for (const auto& c : res.chains) {
            attempted += c.attempted;
            accepted += c.accepted;
            emitted += c.emitted;
        }
        std::printf("simulate: %s N=%lld chains=%d emitted=%llu acceptance=%.3f wall=%.1fs -> %s\n",
                    sim_ensemble.c_str(), static_cast<long long>(run.n_steps), run.chains,
                    static_cast<unsigned long long>(emitted),
                    attempted ? static_cast<double>(accepted) / static_cast<double>(attempted) : 0.0,
                    res.wall_seconds, sim_out.c_str());
    });

    // ---- predict -----------------------------------------------------
    auto* pre = app.add_subcommand("predict", "tabulate a predicted CDF on the degree grid");
    std::string pre_ensemble = "half", pre_out, pre_exponents;
    saw::PredictConfig pcfg;
    std::optional<double> pre_b;
    pre->add_option("--ensemble", pre_ensemble, "full | half | sphere")->required();
    pre->add_flag("--rw", pcfg.rw_mode, "use the random-walk exponent preset (b = 3/2)");
    pre->add_option("--exponents", pre_exponents, "override, e.g. nu=0.5,gamma=1,gamma1=0.5");
    pre->add_option("--b", pre_b, "override b directly (e.g. a negative control)");
    pre->add_option("--a", pcfg.a, "sphere geometry parameter")->capture_default_str();
    pre->add_option("--cutoff-deg", pcfg.cutoff_deg, "conditioning angle for plane ensembles")
        ->capture_default_str();
    pre->add_option("--grid-step", pcfg.step_deg, "grid spacing in degrees")
        ->capture_default_str();
    pre->add_option("--out", pre_out, "output CSV path")->required();
    pre->callback([&] {
        pcfg.ensemble = parse_ensemble(pre_ensemble);
        if (!pre_exponents.empty()) pcfg.exponents = parse_exponents(pre_exponents, pcfg.rw_mode);
        pcfg.b_override = pre_b;
        const saw::PredictedCdf p = saw::make_prediction(pcfg);
        saw::write_prediction_outputs(pcfg, p, pre_out);
        std::printf("predict: %s b=%.6g a=%.6g cutoff=%.6g -> %s\n", pre_ensemble.c_str(), p.b,
                    p.a, p.cutoff_deg, pre_out.c_str());
    });

    // ---- compare -----------------------------------------------------
    auto* cmp = app.add_subcommand("compare", "compare a sample CSV against a prediction CSV");
    saw::CompareConfig ccfg;
    std::string cmp_samples, cmp_pred, cmp_out, cmp_calibration;
    bool cmp_failed = false;
    cmp->add_option("--samples", cmp_samples, "sample CSV from simulate")->required();
    cmp->add_option("--prediction", cmp_pred, "prediction CSV from predict")->required();
    cmp->add_option("--tolerance", ccfg.tolerance, "max |dF| allowed")->capture_default_str();
    cmp->add_option("--batches", ccfg.batches_per_chain, "batch-means batches per chain (>= 8)")
        ->capture_default_str();
    cmp->add_option("--rw-calibration", cmp_calibration,
                    "sphere only: RW sphere sample CSV for the lattice correction");
    cmp->add_option("--out", cmp_out, "comparison CSV path (summary JSON alongside)")->required();
    cmp->callback([&] {
        ccfg.samples_csv = cmp_samples;
        ccfg.prediction_csv = cmp_pred;
        ccfg.out_csv = cmp_out;
        if (!cmp_calibration.empty()) ccfg.rw_calibration_csv = cmp_calibration;
        const saw::CompareOutcome outcome = saw::compare_files(ccfg);
        std::printf("compare: %s max|dF|=%.6g beyond3sigma=%zu/%zu %s -> %s\n",
                    saw::ensemble_name(outcome.ensemble), outcome.report.max_abs_delta,
                    outcome.report.n_beyond_3sigma, outcome.report.grid_deg.size(),
                    outcome.report.pass ? "PASS" : "FAIL", cmp_out.c_str());
        cmp_failed = !outcome.report.pass;
    });

    // ---- validate-rw ---------------------------------------------------
    auto* val = app.add_subcommand(
        "validate-rw", "run all three ensembles in RW mode against the b = 3/2 laws");
    saw::ValidateRwConfig vcfg;
    std::string val_out_dir = "rw_validation";
    bool val_failed = false;
    val->add_option("--N", vcfg.n_steps, "steps per walk")->capture_default_str();
    val->add_option("--samples", vcfg.budget, "attempted pivots per ensemble")
        ->capture_default_str();
    val->add_option("--chains", vcfg.chains, "independent chains (>= 2)")->capture_default_str();
    val->add_option("--threads", vcfg.threads, "worker threads (0 = auto)")->capture_default_str();
    val->add_option("--seed", vcfg.seed, "master seed")->capture_default_str();
    val->add_option("--a", vcfg.sphere_a, "sphere geometry parameter")->capture_default_str();
    val->add_option("--cutoff-deg", vcfg.cutoff_deg, "conditioning angle for plane ensembles")
        ->capture_default_str();
    val->add_option("--tolerance", vcfg.tolerance, "max |dF| allowed")->capture_default_str();
    val->add_option("--negative-control-b", vcfg.negative_control_b,
                    "wrong exponent that the half-space data must reject")
        ->capture_default_str();
    val->add_option("--out-dir", val_out_dir, "report directory")->capture_default_str();
    val->callback([&] {
        vcfg.out_dir = val_out_dir;
        const saw::ValidateRwOutcome v = saw::validate_rw(vcfg);
        auto line = [](const char* name, const saw::ComparisonReport& r) {
            std::printf("validate-rw: %-16s max|dF|=%.6g %s\n", name, r.max_abs_delta,
                        r.pass ? "PASS" : "FAIL");
        };
        line("half-space", v.half);
        line("bisecting-plane", v.full);
        line("sphere", v.sphere);
        std::printf("validate-rw: %-16s max|dF|=%.6g %s (wrong b must fail)\n",
                    "negative-control", v.negative_control.max_abs_delta,
                    v.negative_control.pass ? "NOT-REJECTED" : "REJECTED");
        std::printf("validate-rw: overall %s\n", v.pass ? "PASS" : "FAIL");
        val_failed = !v.pass;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return (cmp_failed || val_failed) ? 1 : 0;
}
