#include "sawlab/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sawlab/pivot.hpp"
#include "sawlab/sample_io.hpp"

namespace saw {

namespace fs = std::filesystem;
using nlohmann::json;

ExponentSet RunConfig::resolved_exponents() const {
    if (exponents) return *exponents;
    return rw_mode ? ExponentSet::rw3d() : ExponentSet::saw3d();
}

void RunConfig::validate() const {
    if (n_steps < 2) throw std::invalid_argument("simulate: N must be >= 2");
    if (budget <= 0) throw std::invalid_argument("simulate: sample budget must be > 0");
    if (chains < 1) throw std::invalid_argument("simulate: chain count must be >= 1");
    if (ensemble == EnsembleKind::sphere) SphereSpec{sphere_a}.validate();
    if (ensemble != EnsembleKind::sphere && (cutoff_deg <= 0.0 || cutoff_deg > 90.0))
        throw std::invalid_argument("simulate: cutoff must be in (0,90] for plane ensembles");
}

namespace {

struct ChainOutput {
    std::vector<SampleRecord> records;
    ChainSummary summary;
    std::string checkpoint;
};

ChainOutput run_one_chain(const RunConfig& cfg, const ExponentSet& exps, std::uint32_t chain_id,
                          std::int64_t attempts) {
    ChainConfig cc;
    cc.n_steps = cfg.n_steps;
    cc.self_avoiding = !cfg.rw_mode;
    cc.constraint =
        cfg.ensemble == EnsembleKind::half ? Constraint::half_space : Constraint::none;
    cc.burn_in = cfg.burn_in;
    cc.seed = cfg.seed;
    cc.chain_id = chain_id;

    PivotChain chain(cc);
    chain.run_burn_in();

    ChainOutput out;
    out.summary.chain_id = chain_id;
    out.records.reserve(static_cast<std::size_t>(attempts));
    const SphereSpec spec{cfg.sphere_a};

    for (std::int64_t a = 0; a < attempts; ++a) {
        chain.step();
        const auto attempt = static_cast<std::uint64_t>(a);
        switch (cfg.ensemble) {
            case EnsembleKind::half: {
                const WeightedSample s = half_space_sample(chain.walk(), exps, cfg.cutoff_deg);
                out.records.push_back(
                    {s.theta_deg, s.weight, s.beyond_cutoff, chain_id, attempt});
                break;
            }
            case EnsembleKind::full: {
                if (chain.walk().endpoint().norm2() == 0) {  // RW mode can return to the origin
                    ++out.summary.skipped;
                    break;
                }
                const WeightedSample s = full_space_sample(chain.walk(), exps, cfg.cutoff_deg);
                out.records.push_back(
                    {s.theta_deg, s.weight, s.beyond_cutoff, chain_id, attempt});
                break;
            }
            case EnsembleKind::sphere: {
                const auto s =
                    sphere_sample(chain.walk(), spec, exps, cfg.sphere_weight_exponent);
                if (!s) {
                    ++out.summary.skipped;
                    break;
                }
                out.records.push_back(
                    {s->theta_deg, s->weight, s->beyond_cutoff, chain_id, attempt});
                break;
            }
        }
    }
    out.summary.attempted = chain.attempted();
    out.summary.accepted = chain.accepted();
    out.summary.emitted = out.records.size();
    if (!cfg.checkpoint_dir.empty()) out.checkpoint = chain.checkpoint_json();
    return out;
}

}  // namespace

SimResult run_simulation(const RunConfig& cfg) {
    cfg.validate();
    const ExponentSet exps = cfg.resolved_exponents();
    const auto t0 = std::chrono::steady_clock::now();

    const auto n_chains = static_cast<std::uint32_t>(cfg.chains);
    std::vector<std::int64_t> attempts(n_chains, cfg.budget / cfg.chains);
    for (std::int64_t c = 0; c < cfg.budget % cfg.chains; ++c) ++attempts[static_cast<std::size_t>(c)];

    std::vector<ChainOutput> outputs(n_chains);
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned n_threads =
        cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::min<unsigned>(n_chains, hw);

    auto worker = [&](unsigned t) {
        for (std::uint32_t c = t; c < n_chains; c += n_threads)
            outputs[c] = run_one_chain(cfg, exps, c, attempts[c]);
    };
    if (n_threads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    SimResult res;
    res.cfg = cfg;
    res.exps = exps;
    std::size_t total = 0;
    for (const auto& o : outputs) total += o.records.size();
    res.records.reserve(total);
    for (auto& o : outputs) {
        res.records.insert(res.records.end(), o.records.begin(), o.records.end());
        res.chains.push_back(o.summary);
    }
    if (!cfg.checkpoint_dir.empty()) {
        fs::create_directories(cfg.checkpoint_dir);
        for (std::uint32_t c = 0; c < n_chains; ++c)
            atomic_write_text(fs::path(cfg.checkpoint_dir) /
                                  ("chain_" + std::to_string(c) + ".checkpoint.json"),
                              outputs[c].checkpoint);
    }
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

namespace {

json exponents_json(const ExponentSet& e) {
    return {{"nu", e.nu},     {"gamma", e.gamma}, {"gamma1", e.gamma1},
            {"rho", e.rho},   {"b", e.b},         {"d", e.d},
            {"weight_full", e.weight_full()},     {"weight_boundary", e.weight_boundary()}};
}

}  // namespace

void write_simulation_outputs(const SimResult& result, const fs::path& out_csv) {
    write_samples_csv(out_csv, result.cfg.ensemble, result.records);

    const auto& cfg = result.cfg;
    json meta;
    meta["schema_version"] = kSchemaVersion;
    meta["version"] = kVersion;
    meta["command"] = "simulate";
    meta["ensemble"] = ensemble_name(cfg.ensemble);
    meta["n_steps"] = cfg.n_steps;
    meta["budget"] = cfg.budget;
    meta["chains"] = cfg.chains;
    meta["seed"] = cfg.seed;
    meta["burn_in"] = cfg.burn_in >= 0 ? cfg.burn_in : 10 * cfg.n_steps;
    meta["rw_mode"] = cfg.rw_mode;
    meta["cutoff_deg"] = cfg.cutoff_deg;
    meta["exponents"] = exponents_json(result.exps);
    if (cfg.ensemble == EnsembleKind::sphere) {
        meta["sphere"] = {
            {"a", cfg.sphere_a},
            {"weight_exponent",
             cfg.sphere_weight_exponent.value_or(result.exps.weight_boundary())}};
    }
    meta["wall_seconds"] = result.wall_seconds;
    auto& jchains = meta["chain_summaries"] = json::array();
    for (const auto& c : result.chains) {
        jchains.push_back({{"chain_id", c.chain_id},
                           {"attempted", c.attempted},
                           {"accepted", c.accepted},
                           {"acceptance_fraction",
                            c.attempted ? static_cast<double>(c.accepted) /
                                              static_cast<double>(c.attempted)
                                        : 0.0},
                           {"emitted", c.emitted},
                           {"skipped", c.skipped}});
    }
    write_text_sidecar(out_csv, meta.dump(2) + "\n");
}

ExponentSet PredictConfig::resolved_exponents() const {
    if (exponents) return *exponents;
    return rw_mode ? ExponentSet::rw3d() : ExponentSet::saw3d();
}

double PredictConfig::resolved_b() const {
    if (b_override) return *b_override;
    return resolved_exponents().b;
}

PredictedCdf make_prediction(const PredictConfig& cfg) {
    switch (cfg.ensemble) {
        case EnsembleKind::half:
            return predict_half_space(cfg.resolved_b(), cfg.cutoff_deg, cfg.step_deg);
        case EnsembleKind::full:
            return predict_bisecting(cfg.cutoff_deg, cfg.step_deg);
        case EnsembleKind::sphere:
            SphereSpec{cfg.a}.validate();
            return predict_sphere(cfg.a, cfg.resolved_b(), cfg.step_deg);
    }
    throw std::logic_error("make_prediction: bad ensemble");
}

void write_prediction_outputs(const PredictConfig& cfg, const PredictedCdf& pred,
                              const fs::path& out_csv) {
    write_prediction_csv(out_csv, pred);
    json meta;
    meta["schema_version"] = kSchemaVersion;
    meta["version"] = kVersion;
    meta["command"] = "predict";
    meta["ensemble"] = ensemble_name(cfg.ensemble);
    meta["b"] = pred.b;
    meta["a"] = pred.a;
    meta["cutoff_deg"] = pred.cutoff_deg;
    meta["step_deg"] = cfg.step_deg;
    meta["rw_mode"] = cfg.rw_mode;
    write_text_sidecar(out_csv, meta.dump(2) + "\n");
}

ComparisonReport compare_samples(const std::vector<SampleRecord>& records,
                                 const PredictedCdf& pred, std::optional<double> cutoff_deg,
                                 double tolerance, int batches_per_chain) {
    const EmpiricalCdf emp =
        empirical_cdf_with_errors(records, pred.grid_deg, cutoff_deg, batches_per_chain);
    return compare(emp, pred, tolerance);
}

ComparisonReport compare_sphere_corrected(const std::vector<SampleRecord>& saw_records,
                                          const std::vector<SampleRecord>& rw_records,
                                          const SphereSpec& spec, const PredictedCdf& pred,
                                          double tolerance, int batches_per_chain) {
    const CorrectionProfile profile =
        lattice_correction_profile(rw_records, spec, pred.grid_deg, batches_per_chain);
    const WeightedHistogram hist =
        weighted_histogram(saw_records, pred.grid_deg, batches_per_chain);
    const EmpiricalCdf corrected = apply_correction(hist, profile);
    return compare(corrected, pred, tolerance);
}

CompareOutcome compare_files(const CompareConfig& cfg) {
    EnsembleKind sample_kind = EnsembleKind::half;
    const auto records = read_samples_csv(cfg.samples_csv, &sample_kind);
    const json smeta = json::parse(read_text_sidecar(cfg.samples_csv));
    const json pmeta = json::parse(read_text_sidecar(cfg.prediction_csv));

    const EnsembleKind pred_kind = ensemble_from_name(pmeta.at("ensemble").get<std::string>());
    if (ensemble_from_name(smeta.at("ensemble").get<std::string>()) != sample_kind)
        throw std::runtime_error("compare: sample sidecar ensemble disagrees with CSV rows");
    if (pred_kind != sample_kind)
        throw std::runtime_error("compare: prediction is for ensemble '" +
                                 std::string(ensemble_name(pred_kind)) + "', samples are '" +
                                 ensemble_name(sample_kind) + "'");

    PredictedCdf pred = read_prediction_csv(cfg.prediction_csv);
    pred.b = pmeta.at("b").get<double>();
    pred.a = pmeta.at("a").get<double>();
    pred.cutoff_deg = pmeta.at("cutoff_deg").get<double>();

    std::optional<double> cutoff;
    if (sample_kind != EnsembleKind::sphere) {
        const double sample_cutoff = smeta.at("cutoff_deg").get<double>();
        if (std::abs(sample_cutoff - pred.cutoff_deg) > 1e-9)
            throw std::runtime_error("compare: cutoff metadata mismatch (samples " +
                                     format_double(sample_cutoff) + ", prediction " +
                                     format_double(pred.cutoff_deg) + ")");
        cutoff = pred.cutoff_deg;
    }

    CompareOutcome out;
    out.ensemble = sample_kind;

    if (cfg.rw_calibration_csv) {
        if (sample_kind != EnsembleKind::sphere)
            throw std::runtime_error("compare: --rw-calibration applies to the sphere ensemble");
        EnsembleKind rw_kind = EnsembleKind::half;
        const auto rw_records = read_samples_csv(*cfg.rw_calibration_csv, &rw_kind);
        if (rw_kind != EnsembleKind::sphere)
            throw std::runtime_error("compare: calibration stream is not sphere samples");
        const json rwmeta = json::parse(read_text_sidecar(*cfg.rw_calibration_csv));
        if (!rwmeta.at("rw_mode").get<bool>())
            throw std::runtime_error("compare: calibration stream was not run in RW mode");
        const double rw_a = rwmeta.at("sphere").at("a").get<double>();
        if (std::abs(rw_a - pred.a) > 1e-9)
            throw std::runtime_error("compare: calibration sphere a mismatch");
        const SphereSpec spec{pred.a};
        const CorrectionProfile profile = lattice_correction_profile(
            rw_records, spec, pred.grid_deg, cfg.batches_per_chain);
        for (const bool u : profile.usable)
            if (!u) ++out.unusable_bins;
        const WeightedHistogram hist =
            weighted_histogram(records, pred.grid_deg, cfg.batches_per_chain);
        out.report = compare(apply_correction(hist, profile), pred, cfg.tolerance);
    } else {
        out.report = compare_samples(records, pred, cutoff, cfg.tolerance, cfg.batches_per_chain);
    }

    write_comparison_csv(cfg.out_csv, out.report);
    json summary;
    summary["schema_version"] = kSchemaVersion;
    summary["version"] = kVersion;
    summary["command"] = "compare";
    summary["ensemble"] = ensemble_name(sample_kind);
    summary["samples_csv"] = cfg.samples_csv.string();
    summary["prediction_csv"] = cfg.prediction_csv.string();
    summary["tolerance"] = cfg.tolerance;
    summary["max_abs_delta"] = out.report.max_abs_delta;
    summary["ks_stat"] = out.report.ks_stat;
    summary["n_beyond_3sigma"] = out.report.n_beyond_3sigma;
    summary["frac_beyond_3sigma"] = out.report.frac_beyond_3sigma;
    summary["n_grid"] = out.report.grid_deg.size();
    summary["corrected"] = cfg.rw_calibration_csv.has_value();
    summary["unusable_bins"] = out.unusable_bins;
    summary["pass"] = out.report.pass;
    fs::path summary_path = cfg.out_csv;
    summary_path += ".summary.json";
    atomic_write_text(summary_path, summary.dump(2) + "\n");
    return out;
}

namespace {

json report_json(const ComparisonReport& r) {
    return {{"max_abs_delta", r.max_abs_delta},
            {"ks_stat", r.ks_stat},
            {"n_beyond_3sigma", r.n_beyond_3sigma},
            {"frac_beyond_3sigma", r.frac_beyond_3sigma},
            {"tolerance", r.tolerance},
            {"n_grid", r.grid_deg.size()},
            {"pass", r.pass}};
}

}  // namespace

ValidateRwOutcome validate_rw(const ValidateRwConfig& cfg) {
    if (cfg.chains < 2) throw std::invalid_argument("validate-rw: needs at least 2 chains");
    fs::create_directories(cfg.out_dir);

    RunConfig base;
    base.n_steps = cfg.n_steps;
    base.budget = cfg.budget;
    base.chains = cfg.chains;
    base.threads = cfg.threads;
    base.rw_mode = true;
    base.sphere_a = cfg.sphere_a;
    base.cutoff_deg = cfg.cutoff_deg;

    ValidateRwOutcome out;

    // Half-space walks against the exact Brownian half-space law.
    RunConfig half_cfg = base;
    half_cfg.ensemble = EnsembleKind::half;
    half_cfg.seed = cfg.seed;
    const SimResult half_run = run_simulation(half_cfg);
    const PredictedCdf half_pred = predict_half_space(1.5, cfg.cutoff_deg);
    out.half = compare_samples(half_run.records, half_pred, cfg.cutoff_deg, cfg.tolerance,
                               cfg.batches_per_chain);
    write_comparison_csv(cfg.out_dir / "rw_half.csv", out.half);

    // Negative control: the same data must reject a wrong exponent.
    const PredictedCdf wrong_pred = predict_half_space(cfg.negative_control_b, cfg.cutoff_deg);
    out.negative_control = compare_samples(half_run.records, wrong_pred, cfg.cutoff_deg,
                                           cfg.tolerance, cfg.batches_per_chain);

    // Full-space walks against the first-hit law of the bisecting plane.
    RunConfig full_cfg = base;
    full_cfg.ensemble = EnsembleKind::full;
    full_cfg.seed = cfg.seed + 1;
    const SimResult full_run = run_simulation(full_cfg);
    const PredictedCdf full_pred = predict_bisecting(cfg.cutoff_deg);
    out.full = compare_samples(full_run.records, full_pred, cfg.cutoff_deg, cfg.tolerance,
                               cfg.batches_per_chain);
    write_comparison_csv(cfg.out_dir / "rw_full.csv", out.full);

    // Sphere: lattice-correction self-consistency on held-out chains. The
    // profile comes from the first half of the chains and corrects the
    // second half; both against the exact b = 3/2 law.
    RunConfig sphere_cfg = base;
    sphere_cfg.ensemble = EnsembleKind::sphere;
    sphere_cfg.seed = cfg.seed + 2;
    const SimResult sphere_run = run_simulation(sphere_cfg);
    const auto half_chains = static_cast<std::uint32_t>(cfg.chains / 2);
    std::vector<SampleRecord> profile_part, data_part;
    for (const auto& r : sphere_run.records)
        (r.chain_id < half_chains ? profile_part : data_part).push_back(r);
    const PredictedCdf sphere_pred = predict_sphere(cfg.sphere_a, 1.5);
    out.sphere = compare_sphere_corrected(data_part, profile_part, SphereSpec{cfg.sphere_a},
                                          sphere_pred, cfg.tolerance, cfg.batches_per_chain);
    write_comparison_csv(cfg.out_dir / "rw_sphere.csv", out.sphere);

    out.pass = out.half.pass && out.full.pass && out.sphere.pass && !out.negative_control.pass;

    json report;
    report["schema_version"] = kSchemaVersion;
    report["version"] = kVersion;
    report["command"] = "validate-rw";
    report["n_steps"] = cfg.n_steps;
    report["budget"] = cfg.budget;
    report["chains"] = cfg.chains;
    report["seed"] = cfg.seed;
    report["sphere_a"] = cfg.sphere_a;
    report["cutoff_deg"] = cfg.cutoff_deg;
    report["tolerance"] = cfg.tolerance;
    report["negative_control_b"] = cfg.negative_control_b;
    report["half"] = report_json(out.half);
    report["full"] = report_json(out.full);
    report["sphere"] = report_json(out.sphere);
    report["negative_control"] = report_json(out.negative_control);
    report["negative_control_rejected"] = !out.negative_control.pass;
    report["pass"] = out.pass;
    atomic_write_text(cfg.out_dir / "report.json", report.dump(2) + "\n");
    return out;
}

}  // namespace saw
