#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "attrgame/matrix.hpp"

#include <json.hpp>

namespace attrgame {

// Ordinary state label: a neuron index plus an optional player/stream tag.
// Tags are part of state identity and are never permuted.
struct MPState {
    int neuron = 0;
    int tag = 0;  // 0 untagged, +1 / -1

    bool operator==(const MPState&) const = default;
};

std::string state_label(const MPState& s);

// Backward layered Markov process over a shared cemetery. Layer L holds the
// start state, layer 0 the terminals. rows[l][i] is the distribution of state
// i at layer l over (cemetery, states of layer l-1); column 0 is the cemetery.
struct LayeredMP {
    std::vector<std::vector<MPState>> states;  // indexed 0..L
    std::vector<std::vector<Vec>> rows;        // rows[l] defined for l >= 1
    int start = 0;                             // index into states[L]

    int layer_count() const { return static_cast<int>(states.size()) - 1; }
    void validate(double tol = 1e-12) const;
    nlohmann::json to_json() const;
};

// Both compared processes must share the state graph (labels and start).
void require_same_graph(const LayeredMP& a, const LayeredMP& b);

struct MarginalPass {
    std::vector<Vec> alpha;  // per layer, over ordinary states
    Vec alpha_cem;           // per layer
};

MarginalPass marginal_pass(const LayeredMP& mp);

struct HellingerResult {
    Vec bc;  // per layer 0..L
    Vec h;
    Vec beta0;  // cumulative geometric-mean mass per ordinary terminal
    double beta0_cem = 0.0;
    Vec alpha0_a, alpha0_b;
    double alpha0_cem_a = 0.0, alpha0_cem_b = 0.0;
    Vec h2;       // per ordinary terminal
    double h2_cem = 0.0;
    Vec h2_marg;  // marginal-only surrogate
    Vec frac;     // disagreement fraction, 0 where local mass is 0
    double z_a = 0.0, z_b = 0.0;
    double bc0_ord = 0.0;

    double h0() const { return h.front(); }
};

HellingerResult hellinger_backward(const LayeredMP& a, const LayeredMP& b);

struct HellingerForward {
    std::vector<Vec> gamma;  // per layer, over ordinary states (cemetery is 1)
    double bc0 = 0.0;
};

HellingerForward hellinger_forward(const LayeredMP& a, const LayeredMP& b);

// max over layers of |sum_s beta(s) gamma(s) - BC^(0)|.
double hellinger_cross_identity_dev(const LayeredMP& a, const LayeredMP& b);

double hellinger_distance(const LayeredMP& a, const LayeredMP& b);

struct ConditionedSurvival {
    double z_a = 0.0, z_b = 0.0;
    double bc_surv = 0.0;
    double h_surv = 0.0;          // from the conditioned-kernel pass
    double h_surv_posthoc = 0.0;  // 1 - BC_ord/sqrt(Z_A Z_B) route
    double route_gap = 0.0;       // |kernel-side - post-hoc| in squared units
    Vec h2_surv;                  // per ordinary terminal
    Vec alpha0_surv_a, alpha0_surv_b;
};

ConditionedSurvival conditioned_survival(const LayeredMP& a, const LayeredMP& b);

struct PermSearch {
    double h_perm = 0.0;
    std::vector<std::vector<int>> perms;  // per layer 0..L; perms[l][i] = image of neuron i
};

// Exhaustive minimisation of H over per-layer neuron permutations of the
// hidden layers (terminals and the start layer stay fixed); tags are not
// permuted. Factorial search, guarded by max_states_per_layer.
PermSearch perm_invariant_hellinger(const LayeredMP& a, const LayeredMP& b,
                                    int max_states_per_layer = 6);

// Relabels b's hidden-layer neurons by the given per-layer permutations.
LayeredMP permute_mp(const LayeredMP& b, const std::vector<std::vector<int>>& perms);

// Random sub-stochastic MP fixture on a fixed grid of untagged states.
LayeredMP random_mp(const std::vector<int>& widths, std::uint64_t seed,
                    double cemetery_weight = 0.3);

}  // namespace attrgame
