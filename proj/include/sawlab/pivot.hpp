// pivot.hpp
// The pivot-algorithm Markov chain over fixed-N walks, with an optional
// half-space constraint and optional self-avoidance (random-walk oracle
// mode), plus a chi-square uniformity check against brute-force enumeration
// and a bit-exact JSON checkpoint format.
#pragma once

#include <cstdint>
#include <string>

#include "sawlab/lattice.hpp"
#include "sawlab/rng.hpp"

namespace saw {

enum class Constraint { none, half_space };

struct ChainConfig {
    std::int64_t n_steps = 2;
    bool self_avoiding = true;
    Constraint constraint = Constraint::none;
    std::int64_t burn_in = -1;  // attempted pivots; -1 = default 10*N
    std::uint64_t seed = 0;
    std::uint32_t chain_id = 0;

    std::int64_t effective_burn_in() const { return burn_in >= 0 ? burn_in : 10 * n_steps; }
    void validate() const;
};

class PivotChain {
public:
    explicit PivotChain(const ChainConfig& cfg);

    // One attempted pivot; returns whether it was accepted.
    bool step();

    void run_burn_in();

    const Walk& walk() const { return walk_; }
    const ChainConfig& config() const { return cfg_; }
    std::uint64_t attempted() const { return attempted_; }
    std::uint64_t accepted() const { return accepted_; }
    double acceptance_fraction() const {
        return attempted_ ? static_cast<double>(accepted_) / static_cast<double>(attempted_) : 0.0;
    }

    // Bit-exact round-trip: config, counters, rng state, site list.
    std::string checkpoint_json() const;
    static PivotChain from_checkpoint_json(const std::string& text);

private:
    PivotChain() = default;

    ChainConfig cfg_;
    Walk walk_ = Walk::rod(2);
    std::uint64_t attempted_ = 0;
    std::uint64_t accepted_ = 0;
    Xoshiro256pp rng_;
};

struct UniformityResult {
    double chi2 = 0.0;
    std::int64_t dof = 0;
    std::int64_t n_binned = 0;
    std::int64_t n_states = 0;
    std::int64_t stride = 0;

    // |chi2 - dof| within n_sigma * sqrt(2*dof)
    bool within_sigma(double n_sigma) const;
};

// Runs the chain for n_attempts pivots, binning every stride-th state by
// identity against enumerate_saws(N), and returns the chi-square statistic
// against the uniform law. Thinning makes the multinomial null valid; the
// raw per-attempt stream is autocorrelated.
UniformityResult uniformity_check(PivotChain& chain, std::int64_t n_attempts,
                                  std::int64_t stride = 64);

}  // namespace saw
