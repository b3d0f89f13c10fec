// lattice.hpp
// Walks on the simple cubic lattice: exact integer sites, the 48-element
// signed-permutation symmetry group, hash-based occupancy for O(1)
// self-intersection tests, and small-N brute-force enumeration oracles.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace saw {

struct Point3i {
    std::int64_t x = 0, y = 0, z = 0;

    friend Point3i operator+(Point3i a, Point3i b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Point3i operator-(Point3i a, Point3i b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend bool operator==(Point3i a, Point3i b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

    std::int64_t operator[](int k) const { return k == 0 ? x : (k == 1 ? y : z); }

    // Exact for |coord| <= 2^31: each square <= 2^62, the sum fits in uint64.
    std::uint64_t norm2() const {
        return static_cast<std::uint64_t>(x * x) + static_cast<std::uint64_t>(y * y) +
               static_cast<std::uint64_t>(z * z);
    }
};

// Packs coordinates in [-2^20, 2^20) into 21-bit fields. Walks of up to 10^6
// steps stay within range.
std::uint64_t pack_site(Point3i p);

// A signed permutation of the axes: as a matrix, row k has sign[k] at column
// perm[k]. All 48 of them form the octahedral group.
struct Symmetry {
    std::array<std::uint8_t, 3> perm{0, 1, 2};
    std::array<std::int8_t, 3> sign{1, 1, 1};

    Point3i apply(Point3i p) const {
        return {sign[0] * p[perm[0]], sign[1] * p[perm[1]], sign[2] * p[perm[2]]};
    }

    bool is_identity() const { return perm[0] == 0 && perm[1] == 1 && perm[2] == 2 && sign[0] == 1 && sign[1] == 1 && sign[2] == 1; }

    friend bool operator==(const Symmetry& a, const Symmetry& b) { return a.perm == b.perm && a.sign == b.sign; }
};

Symmetry compose(const Symmetry& g, const Symmetry& h);  // g after h
Symmetry inverse(const Symmetry& g);

// All 48 elements, identity first, in a fixed order.
const std::array<Symmetry, 48>& octahedral_group();

inline Point3i apply_symmetry(const Symmetry& g, Point3i p) { return g.apply(p); }

// Open-addressing map from packed site to site index. Sized for one walk;
// rebuilt wholesale after an accepted pivot.
class OccupancyMap {
public:
    OccupancyMap() = default;
    explicit OccupancyMap(std::size_t n_sites) { reset(n_sites); }

    void reset(std::size_t n_sites);
    void rebuild(std::span<const Point3i> sites);

    // Index of the site at p, or -1.
    std::int64_t find(Point3i p) const {
        const std::uint64_t key = pack_site(p);
        std::size_t slot = probe_start(key);
        while (keys_[slot] != kEmpty) {
            if (keys_[slot] == key) return idx_[slot];
            slot = (slot + 1) & mask_;
        }
        return -1;
    }

    bool contains(Point3i p) const { return find(p) >= 0; }

private:
    static constexpr std::uint64_t kEmpty = ~0ULL;

    std::size_t probe_start(std::uint64_t key) const {
        return static_cast<std::size_t>((key * 0x9e3779b97f4a7c15ULL) >> shift_);
    }

    void insert(std::uint64_t key, std::int32_t index);

    std::vector<std::uint64_t> keys_;
    std::vector<std::int32_t> idx_;
    std::size_t mask_ = 0;
    int shift_ = 64;
};

// A nearest-neighbor path from the origin together with its occupancy index.
// In SAW mode all sites are pairwise distinct. The occupancy is kept
// consistent with the sites by rebuilding it on first use after a pivot;
// walks are confined to one chain, so the deferred rebuild is safe.
class Walk {
public:
    static Walk rod(std::int64_t n_steps);  // straight +z rod
    static Walk from_sites(std::vector<Point3i> sites, bool require_self_avoiding);

    std::int64_t n_steps() const { return static_cast<std::int64_t>(sites_.size()) - 1; }
    const Point3i& site(std::int64_t j) const { return sites_[static_cast<std::size_t>(j)]; }
    std::span<const Point3i> sites() const { return sites_; }
    const Point3i& endpoint() const { return sites_.back(); }
    const OccupancyMap& occupancy() const {
        refresh_occupancy();
        return occ_;
    }

    // Candidate produced by pivoting the tail j > i with g about site i:
    // w'(j) = w(i) + g(w(j) - w(i)).
    std::vector<Point3i> pivot_candidate(std::int64_t i, const Symmetry& g) const;

    // True iff the pivot candidate is self-avoiding. Probes the shorter arm
    // against the current occupancy; O(min(i, N-i)) per call.
    bool pivot_self_avoiding(std::int64_t i, const Symmetry& g) const;

    // True iff all moved candidate sites keep z >= 1 (site 0 stays at the
    // origin on the boundary plane).
    bool pivot_keeps_half_space(std::int64_t i, const Symmetry& g) const;

    bool satisfies_half_space() const;

    // Commits the pivot: transforms the tail in place; the occupancy index
    // refreshes on its next use.
    void apply_pivot(std::int64_t i, const Symmetry& g);

private:
    Walk() = default;

    void refresh_occupancy() const {
        if (occ_stale_) {
            occ_.rebuild(sites_);
            occ_stale_ = false;
        }
    }

    std::vector<Point3i> sites_;
    mutable OccupancyMap occ_;
    mutable bool occ_stale_ = true;
};

// True iff all sites are pairwise distinct (callers pass nearest-neighbor paths).
bool is_self_avoiding(std::span<const Point3i> sites);

// All N-step self-avoiding walks from the origin, each exactly once.
// Guard-railed to N <= 6; counts explode as mu^N.
std::vector<Walk> enumerate_saws(int n_steps);

// Unit-step direction index in {0..5} for +x,-x,+y,-y,+z,-z.
int step_direction(Point3i from, Point3i to);

// Base-6 encoding of a short walk's step sequence; identity key for binning
// chain states against an enumeration (requires N <= 24).
std::uint64_t walk_step_key(const Walk& w);
std::uint64_t sites_step_key(std::span<const Point3i> sites);

}  // namespace saw
