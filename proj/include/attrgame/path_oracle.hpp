#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>

#include "attrgame/layered_mp.hpp"
#include "attrgame/net.hpp"

namespace attrgame {

// One trajectory from the start layer downward; cemetery-absorbed trajectories
// are truncated at the first visit (the absorbing suffix carries no
// information). steps[k] is the state index at layer L-k, or -1 for the
// cemetery.
struct Trajectory {
    std::vector<int> steps;
    double p = 0.0;
};

struct TrajectoryList {
    std::vector<Trajectory> items;
    double total = 0.0;
};

inline constexpr std::uint64_t kTrajectoryGuard = 10'000'000;

TrajectoryList enumerate_trajectories(const LayeredMP& mp,
                                      std::uint64_t guard = kTrajectoryGuard);

double oracle_bc(const LayeredMP& a, const LayeredMP& b, std::uint64_t guard = kTrajectoryGuard);

// Probability-metric (half-L1) total variation between the trajectory laws.
double oracle_tv(const LayeredMP& a, const LayeredMP& b, std::uint64_t guard = kTrajectoryGuard);

// Per-edge cumulative discount: (layer of the source state, source index,
// target index at layer-1 or -1 for the cemetery) -> factor.
using EdgeDiscount = std::function<double(int, int, int)>;

// Discounted occupation by exhaustive expansion; keys are (layer, state).
std::map<std::pair<int, int>, double> oracle_occupation(
    const LayeredMP& mp, const EdgeDiscount& discount,
    std::uint64_t guard = kTrajectoryGuard);

// Gated parity path sums of the backward paths into (node, neuron) of a
// bias-free dense ReLU chain; returns the decomposed pre-activation pair.
std::pair<double, double> parity_path_sum(const NetSpec& net, const Vec& x, int node, int neuron,
                                          std::uint64_t guard = kTrajectoryGuard);

// Central differences, rejecting inputs whose pre-activations sit closer than
// 10h to a gate boundary (resample advisory).
Vec finite_diff_gradient(const NetSpec& net, const Vec& x, double h);

// True when |z| > 10h at every dense neuron and every max-pool group has a
// winner margin above 10h; used by test harnesses to resample.
bool fd_boundary_ok(const NetSpec& net, const Vec& x, double h);

}  // namespace attrgame
