#pragma once

#include <iosfwd>

#include "attrgame/net.hpp"
#include "attrgame/parallel.hpp"
#include "attrgame/routing_game.hpp"

namespace attrgame {

// Redraws the deepest `depth` dense layers' weights i.i.d. normal with std
// sqrt(2/fan_in) and zeroes their biases; deterministic under seed.
NetSpec cascade_randomize(const NetSpec& net, int depth, std::uint64_t seed);

struct SweepRow {
    int step = 0;
    std::string layer;  // randomised layer name, or the noise sigma
    std::string game;   // "sg" or "rg"
    double h_mean = 0.0, h_std = 0.0;
    double hsurv_mean = 0.0, hsurv_std = 0.0;
    double bc_mean = 0.0;
    int cells = 0;       // cells aggregated into the H stats
    int surv_cells = 0;  // cells with surviving mass on both sides
};

struct SweepResult {
    std::vector<SweepRow> rows;
    void write_csv(std::ostream& os) const;
};

// Cascading randomisation: one row per (depth, game) aggregating H and H_surv
// over (seed, input) cells. Nets must be dense/max-pool chains.
SweepResult randomization_sweep(const NetSpec& net, const std::vector<Vec>& inputs,
                                const RGConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                RunMode mode = RunMode::Parallel);

// Same model both sides, input perturbed by sigma * eps; one row per
// (sigma, game) over the draws.
SweepResult input_noise_sweep(const NetSpec& net, const Vec& x, const std::vector<double>& sigmas,
                              const RGConfig& cfg, std::uint64_t seed, int draws = 8,
                              RunMode mode = RunMode::Parallel);

struct CemeteryFloor {
    double c0 = 0.0;        // accumulated dead-in-both overlap after N layers
    double f0_bound = 0.0;  // kappa^N bound on the ordinary subsum
    double bc_bound = 0.0;  // c0 + f0_bound
    double asymptote = 0.0; // d / (1 - kappa), the N -> infinity floor
};

CemeteryFloor cemetery_floor(double q, double p, double delta, int n_layers);

// Single-live-state chain pair whose measured BC^(0) realises the closed form
// exactly; used to validate the floor as a lower bound.
std::pair<LayeredMP, LayeredMP> mean_field_floor_mps(double q, double p, double delta,
                                                     int n_layers);

}  // namespace attrgame
