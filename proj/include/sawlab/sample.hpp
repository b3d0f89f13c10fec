// sample.hpp
// Core sample types shared by the ensemble extractors, the statistics
// layer and the file formats.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace saw {

enum class EnsembleKind { full, half, sphere };

inline const char* ensemble_name(EnsembleKind k) {
    switch (k) {
        case EnsembleKind::full: return "full";
        case EnsembleKind::half: return "half";
        case EnsembleKind::sphere: return "sphere";
    }
    return "?";
}

inline EnsembleKind ensemble_from_name(const std::string& s) {
    if (s == "full") return EnsembleKind::full;
    if (s == "half") return EnsembleKind::half;
    if (s == "sphere") return EnsembleKind::sphere;
    throw std::invalid_argument("unknown ensemble tag: '" + s + "' (expected full|half|sphere)");
}

// One observed hitting angle with its importance weight.
struct WeightedSample {
    double theta_deg = 0.0;   // in [0,180]
    double weight = 0.0;      // finite, > 0
    bool beyond_cutoff = false;  // theta > theta0 flag, applied at analysis time
    EnsembleKind kind = EnsembleKind::full;
};

// A sample as it appears in the merged output stream / CSV.
struct SampleRecord {
    double theta_deg = 0.0;
    double weight = 0.0;
    bool flagged = false;
    std::uint32_t chain_id = 0;
    std::uint64_t attempt = 0;  // attempt index within the chain, post burn-in
};

}  // namespace saw
