#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lorafair/random.hpp"

namespace lorafair {

inline constexpr double kMinNodeDistanceM = 1.0;

// Log-distance path loss; defaults follow the reference simulator's measured
// constants.
struct PropagationConfig {
    double d0_m = 40.0;
    double pl_d0_db = 127.41;
    double gamma = 2.08;
    double sigma_db = 0.0;  // shadowing std-dev; one fixed draw per node

    void validate() const {
        if (!(d0_m > 0)) throw std::invalid_argument("propagation: d0 must be positive");
        if (!(gamma > 0)) throw std::invalid_argument("propagation: gamma must be positive");
        if (sigma_db < 0) throw std::invalid_argument("propagation: sigma must be >= 0");
    }
};

inline double path_loss(const PropagationConfig& cfg, double distance_m) {
    if (!(distance_m > 0)) throw std::invalid_argument("path_loss: distance must be positive");
    return cfg.pl_d0_db + 10.0 * cfg.gamma * std::log10(distance_m / cfg.d0_m);
}

// Received power at the gateway in dBm; shadow_db is the node's fixed
// shadowing offset.
inline double received_power(int tp_dbm, const PropagationConfig& cfg, double distance_m,
                             double shadow_db = 0.0) {
    return tp_dbm - path_loss(cfg, distance_m) - shadow_db;
}

struct Position {
    double x = 0.0;
    double y = 0.0;
    double distance() const { return std::hypot(x, y); }
};

enum class PlacementMode { area, radius };

// Node spatial distribution: uniform over the cell, or skewed so that
// skew_fraction of the nodes fall in the named third of the cell radius
// (inner [0, 0.33R], middle (0.33R, 0.66R], outer (0.66R, R]) and the rest
// cover the complement.
struct NodeDistribution {
    enum class Kind { uniform, inner, middle, outer };
    Kind kind = Kind::uniform;
    double skew_fraction = 0.666;
};

namespace detail {

struct Annulus {
    double lo = 0.0;
    double hi = 0.0;
};

// One radius draw, uniform (by area or by radius) over a union of annuli.
inline double sample_radius(const std::vector<Annulus>& segments, PlacementMode mode, Rng& rng) {
    double total = 0.0;
    for (const auto& s : segments) {
        if (!(s.hi > s.lo)) throw std::invalid_argument("place_nodes: degenerate annulus");
        total += mode == PlacementMode::area ? s.hi * s.hi - s.lo * s.lo : s.hi - s.lo;
    }
    double u = rng.uniform01() * total;
    for (const auto& s : segments) {
        double w = mode == PlacementMode::area ? s.hi * s.hi - s.lo * s.lo : s.hi - s.lo;
        if (u <= w || &s == &segments.back()) {
            double frac = w > 0 ? u / w : 0.0;
            if (frac > 1.0) frac = 1.0;
            if (mode == PlacementMode::area)
                return std::sqrt(s.lo * s.lo + frac * (s.hi * s.hi - s.lo * s.lo));
            return s.lo + frac * (s.hi - s.lo);
        }
        u -= w;
    }
    return segments.back().hi;
}

}  // namespace detail

// Places n nodes around a gateway at the origin. A minimum gateway distance of
// 1 m is enforced. Deterministic for a given rng state.
inline std::vector<Position> place_nodes(int n, double radius_m, const NodeDistribution& dist,
                                         Rng& rng, PlacementMode mode = PlacementMode::area) {
    if (n < 1) throw std::invalid_argument("place_nodes: need at least one node");
    if (!(radius_m > kMinNodeDistanceM))
        throw std::invalid_argument("place_nodes: radius must exceed the 1 m minimum distance");

    using detail::Annulus;
    double lo1 = 0.33 * radius_m;
    double lo2 = 0.66 * radius_m;
    std::vector<Annulus> named;
    std::vector<Annulus> complement;
    switch (dist.kind) {
        case NodeDistribution::Kind::uniform:
            named = {{kMinNodeDistanceM, radius_m}};
            complement = named;
            break;
        case NodeDistribution::Kind::inner:
            named = {{kMinNodeDistanceM, lo1}};
            complement = {{lo1, radius_m}};
            break;
        case NodeDistribution::Kind::middle:
            named = {{lo1, lo2}};
            complement = {{kMinNodeDistanceM, lo1}, {lo2, radius_m}};
            break;
        case NodeDistribution::Kind::outer:
            named = {{lo2, radius_m}};
            complement = {{kMinNodeDistanceM, lo2}};
            break;
    }

    int in_named = dist.kind == NodeDistribution::Kind::uniform
                       ? n
                       : static_cast<int>(std::floor(dist.skew_fraction * n));

    std::vector<Position> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& segs = i < in_named ? named : complement;
        double r = detail::sample_radius(segs, mode, rng);
        double theta = 6.283185307179586476925286766559 * rng.uniform01();
        out.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
    return out;
}

}  // namespace lorafair
