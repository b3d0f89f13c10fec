#include "sawlab/pivot.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace saw {

void ChainConfig::validate() const {
    if (n_steps < 2) throw std::invalid_argument("chain: N must be >= 2");
    if (burn_in < -1) throw std::invalid_argument("chain: burn_in must be >= 0 (-1 = default)");
}

PivotChain::PivotChain(const ChainConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    walk_ = Walk::rod(cfg_.n_steps);
    rng_ = Xoshiro256pp(child_seed(cfg_.seed, cfg_.chain_id));
}

bool PivotChain::step() {
    ++attempted_;
    const auto n = static_cast<std::uint64_t>(cfg_.n_steps);
    const auto i = static_cast<std::int64_t>(rng_.bounded(n));
    const auto& g = octahedral_group()[1 + rng_.bounded(47)];  // non-identity proposals

    if (cfg_.constraint == Constraint::half_space && !walk_.pivot_keeps_half_space(i, g))
        return false;
    if (cfg_.self_avoiding && !walk_.pivot_self_avoiding(i, g)) return false;

    walk_.apply_pivot(i, g);
    ++accepted_;
    return true;
}

void PivotChain::run_burn_in() {
    for (std::int64_t k = 0, b = cfg_.effective_burn_in(); k < b; ++k) step();
}

std::string PivotChain::checkpoint_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["config"] = {{"n_steps", cfg_.n_steps},
                   {"self_avoiding", cfg_.self_avoiding},
                   {"constraint", cfg_.constraint == Constraint::half_space ? "half_space" : "none"},
                   {"burn_in", cfg_.burn_in},
                   {"seed", cfg_.seed},
                   {"chain_id", cfg_.chain_id}};
    j["attempted"] = attempted_;
    j["accepted"] = accepted_;
    j["rng_state"] = rng_.state();
    auto& sites = j["sites"] = nlohmann::json::array();
    for (const auto& p : walk_.sites()) sites.push_back({p.x, p.y, p.z});
    return j.dump();
}

PivotChain PivotChain::from_checkpoint_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.at("schema_version").get<int>() != 1)
        throw std::runtime_error("checkpoint: unsupported schema version");
    const auto& jc = j.at("config");
    ChainConfig cfg;
    cfg.n_steps = jc.at("n_steps").get<std::int64_t>();
    cfg.self_avoiding = jc.at("self_avoiding").get<bool>();
    cfg.constraint = jc.at("constraint").get<std::string>() == "half_space" ? Constraint::half_space
                                                                            : Constraint::none;
    cfg.burn_in = jc.at("burn_in").get<std::int64_t>();
    cfg.seed = jc.at("seed").get<std::uint64_t>();
    cfg.chain_id = jc.at("chain_id").get<std::uint32_t>();

    PivotChain chain(cfg);
    chain.attempted_ = j.at("attempted").get<std::uint64_t>();
    chain.accepted_ = j.at("accepted").get<std::uint64_t>();
    chain.rng_.set_state(j.at("rng_state").get<std::array<std::uint64_t, 4>>());
    std::vector<Point3i> sites;
    for (const auto& js : j.at("sites"))
        sites.push_back({js.at(0).get<std::int64_t>(), js.at(1).get<std::int64_t>(),
                         js.at(2).get<std::int64_t>()});
    chain.walk_ = Walk::from_sites(std::move(sites), cfg.self_avoiding);
    if (cfg.constraint == Constraint::half_space && !chain.walk_.satisfies_half_space())
        throw std::runtime_error("checkpoint: walk violates half-space constraint");
    return chain;
}

bool UniformityResult::within_sigma(double n_sigma) const {
    return std::abs(chi2 - static_cast<double>(dof)) <=
           n_sigma * std::sqrt(2.0 * static_cast<double>(dof));
}

UniformityResult uniformity_check(PivotChain& chain, std::int64_t n_attempts,
                                  std::int64_t stride) {
    const auto n = chain.config().n_steps;
    if (n > 4) throw std::invalid_argument("uniformity_check: N > 4 refused");
    if (!chain.config().self_avoiding || chain.config().constraint != Constraint::none)
        throw std::invalid_argument("uniformity_check: needs an unconstrained SAW chain");
    if (stride < 1) throw std::invalid_argument("uniformity_check: stride must be >= 1");

    const auto all = enumerate_saws(static_cast<int>(n));
    std::unordered_map<std::uint64_t, std::size_t> bin_of;
    bin_of.reserve(2 * all.size());
    for (std::size_t k = 0; k < all.size(); ++k) bin_of.emplace(walk_step_key(all[k]), k);

    std::vector<std::int64_t> counts(all.size(), 0);
    std::int64_t n_binned = 0;
    for (std::int64_t t = 1; t <= n_attempts; ++t) {
        chain.step();
        if (t % stride == 0) {
            ++counts[bin_of.at(walk_step_key(chain.walk()))];
            ++n_binned;
        }
    }

    UniformityResult r;
    r.n_states = static_cast<std::int64_t>(all.size());
    r.n_binned = n_binned;
    r.stride = stride;
    r.dof = r.n_states - 1;
    const double expected = static_cast<double>(n_binned) / static_cast<double>(all.size());
    if (expected < 1.0)
        throw std::runtime_error("uniformity_check: insufficient data for a chi-square");
    for (const auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        r.chi2 += d * d / expected;
    }
    return r;
}

}  // namespace saw
