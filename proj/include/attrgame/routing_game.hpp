#pragma once

#include <map>
#include <optional>

#include "attrgame/adf.hpp"
#include "attrgame/layered_mp.hpp"
#include "attrgame/net.hpp"
#include "attrgame/path_oracle.hpp"
#include "attrgame/stopping_game.hpp"  // SGStateKey doubles as the RG state key

namespace attrgame {

enum class RGGateKind { Hard, Probit };

struct RGConfig {
    double alpha = 2.0;
    double beta = 1.0;
    double epsilon = 0.5;
    double tau = 1.0;
    double lambda = 0.0;      // activation-side risk aversion, <= 0
    double sigma2 = 0.0;      // ADF input variance
    double lambda_sm = 0.0;   // attention-logit shift, <= 0
    double lambda_ent = 0.0;  // fan-in entropy bias, >= 0
    RGGateKind gate = RGGateKind::Hard;

    void validate() const;
};

struct RGStream {
    Vec p;                  // route probabilities over the producing node's indices
    double cemetery = 0.0;  // outside-option mass (plus dead branches)
    double mass_sum = 0.0;  // sum of raw routed masses before the epsilon shift
};

struct RGDenseNode {
    Vec cont;  // act-state continue mass per neuron (hard bit or Phi)
    Vec z_eff; // stop-decision pre-activation after the entropy-bias shift
    std::vector<RGStream> plus, minus;
};

struct RGKernel {
    NetSpec net;
    Vec x;
    RGConfig cfg;
    ForwardTrace trace;
    std::vector<RGDenseNode> dense;  // indexed by node, empty unless dense
    std::optional<MomentField> adf;
};

RGKernel build_rg(const NetSpec& net, const Vec& x, const RGConfig& cfg);

struct RelevanceMap {
    std::vector<Vec> node_rel;  // per node, node 0 = input map
    double fx = 0.0;
    double seed = 0.0;
};

struct RGAttribution {
    RelevanceMap rel;
    std::map<SGStateKey, double> gamma;
    double cemetery = 0.0;
};

RGAttribution rg_attribution(const RGKernel& kernel, std::optional<double> seed_mass = {});
RGAttribution rg_attribution(const NetSpec& net, const Vec& x, const RGConfig& cfg,
                             std::optional<double> seed_mass = {});

// Straight alpha-beta-LRP-epsilon recursion, seeded R^(L) = f(x); the recovery
// reference for the routing game.
RelevanceMap lrp_direct(const NetSpec& net, const Vec& x, double alpha, double beta, double eps);

// Probability-space act-state MP with pixel-stream terminals (dense/max-pool
// chains only).
LayeredMP rg_trajectory_mp(const NetSpec& net, const Vec& x, const RGConfig& cfg);

EdgeDiscount rg_mp_edge_discount(const NetSpec& net, const Vec& x, const RGConfig& cfg);

// Bottom-up tau = 1 game values in probability space, for the forward
// equivalence checks: exp(V) at activation states and per-stream linear states.
struct RGGameValues {
    std::vector<Vec> act_exp;
    std::vector<Vec> lin_plus_exp, lin_minus_exp;  // dense nodes only
};

RGGameValues rg_game_values(const NetSpec& net, const Vec& x, double eps);

}  // namespace attrgame
