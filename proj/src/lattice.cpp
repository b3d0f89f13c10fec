#include "sawlab/lattice.hpp"

#include <bit>
#include <cstdlib>
#include <stdexcept>
#include <unordered_set>

namespace saw {

std::uint64_t pack_site(Point3i p) {
    constexpr std::int64_t B = std::int64_t{1} << 20;
    if (std::abs(p.x) >= B || std::abs(p.y) >= B || std::abs(p.z) >= B)
        throw std::out_of_range("pack_site: coordinate beyond +-2^20");
    const auto fx = static_cast<std::uint64_t>(p.x + B);
    const auto fy = static_cast<std::uint64_t>(p.y + B);
    const auto fz = static_cast<std::uint64_t>(p.z + B);
    return (fx << 42) | (fy << 21) | fz;
}

Symmetry compose(const Symmetry& g, const Symmetry& h) {
    // (g∘h)(p)[k] = g.sign[k] * h.sign[g.perm[k]] * p[h.perm[g.perm[k]]]
    Symmetry r;
    for (int k = 0; k < 3; ++k) {
        r.perm[k] = h.perm[g.perm[k]];
        r.sign[k] = static_cast<std::int8_t>(g.sign[k] * h.sign[g.perm[k]]);
    }
    return r;
}

Symmetry inverse(const Symmetry& g) {
    Symmetry r;
    for (int k = 0; k < 3; ++k) {
        r.perm[g.perm[k]] = static_cast<std::uint8_t>(k);
        r.sign[g.perm[k]] = g.sign[k];
    }
    return r;
}

const std::array<Symmetry, 48>& octahedral_group() {
    static const std::array<Symmetry, 48> table = [] {
        constexpr std::array<std::array<std::uint8_t, 3>, 6> perms{
            {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
        std::array<Symmetry, 48> t{};
        int n = 0;
        for (const auto& perm : perms) {
            for (int mask = 0; mask < 8; ++mask) {
                Symmetry s;
                s.perm = perm;
                for (int k = 0; k < 3; ++k) s.sign[k] = (mask >> k) & 1 ? -1 : 1;
                t[n++] = s;
            }
        }
        return t;
    }();
    return table;
}

void OccupancyMap::reset(std::size_t n_sites) {
    std::size_t cap = std::bit_ceil(4 * std::max<std::size_t>(n_sites, 1));
    keys_.assign(cap, kEmpty);
    idx_.assign(cap, -1);
    mask_ = cap - 1;
    shift_ = 64 - std::countr_zero(cap);
}

void OccupancyMap::insert(std::uint64_t key, std::int32_t index) {
    std::size_t slot = probe_start(key);
    while (keys_[slot] != kEmpty) {
        if (keys_[slot] == key) return;  // keep the first index (RW mode may repeat sites)
        slot = (slot + 1) & mask_;
    }
    keys_[slot] = key;
    idx_[slot] = index;
}

void OccupancyMap::rebuild(std::span<const Point3i> sites) {
    if (keys_.size() < 2 * sites.size()) reset(sites.size());
    std::fill(keys_.begin(), keys_.end(), kEmpty);
    for (std::size_t j = 0; j < sites.size(); ++j)
        insert(pack_site(sites[j]), static_cast<std::int32_t>(j));
}

Walk Walk::rod(std::int64_t n_steps) {
    if (n_steps < 0) throw std::invalid_argument("rod: negative length");
    Walk w;
    w.sites_.reserve(static_cast<std::size_t>(n_steps) + 1);
    for (std::int64_t j = 0; j <= n_steps; ++j) w.sites_.push_back({0, 0, j});
    w.occ_.rebuild(w.sites_);
    return w;
}

Walk Walk::from_sites(std::vector<Point3i> sites, bool require_self_avoiding) {
    if (sites.empty()) throw std::invalid_argument("walk: empty site list");
    if (!(sites.front() == Point3i{0, 0, 0}))
        throw std::invalid_argument("walk: must start at the origin");
    for (std::size_t j = 1; j < sites.size(); ++j) {
        const Point3i d = sites[j] - sites[j - 1];
        if (d.norm2() != 1) throw std::invalid_argument("walk: step is not a unit lattice bond");
    }
    if (require_self_avoiding && !is_self_avoiding(sites))
        throw std::invalid_argument("walk: sites are not self-avoiding");
    Walk w;
    w.sites_ = std::move(sites);
    w.occ_.rebuild(w.sites_);
    return w;
}

std::vector<Point3i> Walk::pivot_candidate(std::int64_t i, const Symmetry& g) const {
    if (i < 0 || i >= n_steps()) throw std::out_of_range("pivot site index");
    std::vector<Point3i> out(sites_);
    const Point3i pivot = sites_[static_cast<std::size_t>(i)];
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < out.size(); ++j)
        out[j] = pivot + g.apply(out[j] - pivot);
    return out;
}

bool Walk::pivot_self_avoiding(std::int64_t i, const Symmetry& g) const {
    const std::int64_t n = n_steps();
    const Point3i pivot = sites_[static_cast<std::size_t>(i)];
    // The candidate is self-avoiding iff no transformed site of one arm hits
    // the other arm; each arm is internally self-avoiding because g is an
    // isometry. Probing the shorter arm against the standing occupancy is
    // equivalent: when the head is shorter, map it with g^-1 instead.
    if (n - i <= i) {
        for (std::int64_t j = i + 1; j <= n; ++j) {
            const Point3i q = pivot + g.apply(sites_[static_cast<std::size_t>(j)] - pivot);
            const std::int64_t hit = occ_.find(q);
            if (hit >= 0 && hit <= i) return false;
        }
    } else {
        const Symmetry ginv = inverse(g);
        for (std::int64_t j = i - 1; j >= 0; --j) {
            const Point3i q = pivot + ginv.apply(sites_[static_cast<std::size_t>(j)] - pivot);
            const std::int64_t hit = occ_.find(q);
            if (hit > i) return false;
        }
    }
    return true;
}

bool Walk::pivot_keeps_half_space(std::int64_t i, const Symmetry& g) const {
    const std::int64_t n = n_steps();
    const Point3i pivot = sites_[static_cast<std::size_t>(i)];
    // z-row of g applied to (site - pivot), plus pivot.z
    const int axis = g.perm[2];
    const std::int64_t sgn = g.sign[2];
    for (std::int64_t j = i + 1; j <= n; ++j) {
        const Point3i d = sites_[static_cast<std::size_t>(j)] - pivot;
        if (pivot.z + sgn * d[axis] < 1) return false;
    }
    return true;
}

bool Walk::satisfies_half_space() const {
    for (std::size_t j = 1; j < sites_.size(); ++j)
        if (sites_[j].z < 1) return false;
    return true;
}

void Walk::apply_pivot(std::int64_t i, const Symmetry& g) {
    if (i < 0 || i >= n_steps()) throw std::out_of_range("pivot site index");
    const Point3i pivot = sites_[static_cast<std::size_t>(i)];
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < sites_.size(); ++j)
        sites_[j] = pivot + g.apply(sites_[j] - pivot);
    occ_.rebuild(sites_);
}

bool is_self_avoiding(std::span<const Point3i> sites) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(2 * sites.size());
    for (const auto& p : sites)
        if (!seen.insert(pack_site(p)).second) return false;
    return true;
}

namespace {

constexpr std::array<Point3i, 6> kUnitSteps{
    {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};

void enumerate_rec(std::vector<Point3i>& path, std::unordered_set<std::uint64_t>& seen,
                   int remaining, std::vector<Walk>& out) {
    if (remaining == 0) {
        out.push_back(Walk::from_sites(path, true));
        return;
    }
    for (const auto& s : kUnitSteps) {
        const Point3i q = path.back() + s;
        const std::uint64_t key = pack_site(q);
        if (seen.contains(key)) continue;
        path.push_back(q);
        seen.insert(key);
        enumerate_rec(path, seen, remaining - 1, out);
        seen.erase(key);
        path.pop_back();
    }
}

}  // namespace

std::vector<Walk> enumerate_saws(int n_steps) {
    if (n_steps < 0) throw std::invalid_argument("enumerate_saws: negative N");
    if (n_steps > 6)
        throw std::invalid_argument("enumerate_saws: N > 6 refused (count grows as ~4.7^N)");
    std::vector<Walk> out;
    std::vector<Point3i> path{{0, 0, 0}};
    std::unordered_set<std::uint64_t> seen{pack_site({0, 0, 0})};
    enumerate_rec(path, seen, n_steps, out);
    return out;
}

int step_direction(Point3i from, Point3i to) {
    const Point3i d = to - from;
    for (int k = 0; k < 6; ++k)
        if (d == kUnitSteps[static_cast<std::size_t>(k)]) return k;
    throw std::invalid_argument("step_direction: not a unit lattice bond");
}

std::uint64_t sites_step_key(std::span<const Point3i> sites) {
    if (sites.size() > 25) throw std::invalid_argument("step key limited to N <= 24");
    std::uint64_t key = 0, base = 1;
    for (std::size_t j = 1; j < sites.size(); ++j) {
        key += base * static_cast<std::uint64_t>(step_direction(sites[j - 1], sites[j]));
        base *= 6;
    }
    return key;
}

std::uint64_t walk_step_key(const Walk& w) { return sites_step_key(w.sites()); }

}  // namespace saw
