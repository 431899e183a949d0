#pragma once

#include <map>

#include "attrgame/layered_mp.hpp"
#include "attrgame/net.hpp"
#include "attrgame/path_oracle.hpp"

namespace attrgame {

// Activation-state stop/continue family: the transition kernel is shared, only
// the policy differs.
enum class SGGate { Hard, Gibbs, Probit };

// Game states live on the node chain: dense nodes carry activation states,
// residual adds addition states, max pools decision states, and node 0 the
// pixel terminals. player: 0 = P+, 1 = P-.
struct SGStateKey {
    int node = 0;
    int index = 0;
    int player = 0;

    auto operator<=>(const SGStateKey&) const = default;
};

std::string to_string(const SGStateKey& k);

struct SGEdge {
    int pred = 0;
    double w_abs = 0.0;
    bool flip = false;
};

struct SGActState {
    double z_plus = 0.0, z_minus = 0.0;  // continuation action values (active/opponent)
    double v_plus = 0.0, v_minus = 0.0;  // player-specific values under the equilibrium
    double cont_prob = 0.0;              // 0/1 hard, sigmoid(z/theta), or Phi(z)
    double gamma = 0.0;                  // column-absolute-sum discount
    std::vector<SGEdge> edges;
};

struct SGNodeKernel {
    enum class Kind { Input, Dense, Add, MaxPool } kind = Kind::Input;
    int width = 0;
    std::vector<SGActState> act;  // dense
    std::vector<int> winner;      // max pool, per group
    int left = -1, right = -1;    // add
    Vec val_same, val_diff;       // player-specific value pairs per index
};

struct SGKernel {
    std::vector<SGNodeKernel> node;
    int out_node = 0;
    int out_index = 0;
    SGGate gate = SGGate::Hard;
    double theta = 1.0;
    Vec input;  // terminal payoffs

    SGStateKey start() const { return {out_node, out_index, 0}; }
};

SGKernel build_sg(const NetSpec& net, const Vec& x);
SGKernel build_sg_softplus(const NetSpec& net, const Vec& x, double theta);
// Noisy-observation gate Phi(z); ReLU or Gelu nets.
SGKernel sg_probit_gate(const NetSpec& net, const Vec& x);

struct SGStateValue {
    SGStateKey key;
    double v_active = 0.0;    // player-specific value of the player in turn
    double v_opponent = 0.0;  // and of the opponent
    double q_cont_active = 0.0, q_cont_opponent = 0.0;  // continuation action values
    double advantage = 0.0;                             // q_cont_active - q_cont_opponent
    double policy_cont = 0.0;
};

// Player-specific values for every activation/addition/pool/terminal state.
std::vector<SGStateValue> sg_player_values(const SGKernel& kernel);

struct OccupationResult {
    std::map<SGStateKey, double> gamma;
    Vec gradient;            // terminal player difference per pixel
    double cemetery = 0.0;   // stopped probability-space mass, excluded from gamma
};

OccupationResult sg_occupation(const SGKernel& kernel, const SGStateKey& start);

Vec sg_gradient(const NetSpec& net, const Vec& x);
Vec sg_gradient_softplus(const NetSpec& net, const Vec& x, double theta);
Vec sg_gradient_probit(const NetSpec& net, const Vec& x);

// Probability-space act-state MP of the game (dense / max-pool chains only);
// terminals are pixel-player pairs.
LayeredMP sg_trajectory_mp(const NetSpec& net, const Vec& x, SGGate gate = SGGate::Hard,
                           double theta = 1.0);

// Per-edge discount of the SG MP for the enumeration oracle.
EdgeDiscount sg_mp_edge_discount(const NetSpec& net, const Vec& x, SGGate gate = SGGate::Hard,
                                 double theta = 1.0);

}  // namespace attrgame
