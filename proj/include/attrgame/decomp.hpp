#pragma once

#include "attrgame/net.hpp"

namespace attrgame {

enum class DecompFamily { Stopping, Mixing, Softplus };

struct DecompKind {
    DecompFamily family = DecompFamily::Stopping;
    double eta = 1.0;    // Mixing, clamped to [0, 1]
    double theta = 1.0;  // Softplus, > 0

    static DecompKind stopping() { return {DecompFamily::Stopping, 1.0, 1.0}; }
    static DecompKind mixing(double eta) { return {DecompFamily::Mixing, eta, 1.0}; }
    static DecompKind softplus(double theta) { return {DecompFamily::Softplus, 1.0, theta}; }
};

// Non-negative activation pairs per node. a_plus - a_minus reproduces the
// ordinary activation of the matching network; z pairs are filled for dense
// nodes only.
struct DecompState {
    std::vector<Vec> a_plus, a_minus;
    std::vector<Vec> z_plus, z_minus;
};

DecompState decompose_forward(const NetSpec& net, const Vec& x, const DecompKind& kind);

// Same propagation with an explicit layer-0 pair in place of the (x+, x-)
// split; gates still fire on the pair difference. Used by the fixed-gate
// monotonicity probes.
DecompState decompose_forward_pairs(const NetSpec& net, const Vec& plus, const Vec& minus,
                                    const DecompKind& kind);

// Samples the eta = 1 convexity characterisation at one interpolation point:
// a_mix^{+,1}(t x0 + (1-t) x1) <= t a^{+}(x0) + (1-t) a^{+}(x1) + tol at every
// neuron.
bool mixing_convexity_probe(const NetSpec& net, const Vec& x0, const Vec& x1, double t,
                            double tol = 1e-10);

}  // namespace attrgame
