#include "attrgame/stopping_game.hpp"

#include <cmath>
#include <memory>

#include "attrgame/errors.hpp"
#include "attrgame/gauss.hpp"

namespace attrgame {

std::string to_string(const SGStateKey& k) {
    return std::to_string(k.node) + "/" + std::to_string(k.index) + "/" +
           (k.player == 0 ? "+" : "-");
}

namespace {

double continue_probability(SGGate gate, double theta, double z) {
    switch (gate) {
        case SGGate::Hard:
            return z > 0.0 ? 1.0 : 0.0;
        case SGGate::Gibbs:
            return sigmoid_theta(z, theta);
        case SGGate::Probit:
            return norm_cdf(z);
    }
    return 0.0;
}

SGKernel build(const NetSpec& net, const Vec& x, SGGate gate, double theta) {
    net.validate();
    if (net.has_attention())
        throw ConfigError("stopping game: attention blocks are unsupported structure");
    for (size_t i = 0; i < net.layers.size(); ++i) {
        if (!net.layers[i].is_dense()) continue;
        const ActivationKind& a = net.layers[i].dense().act;
        std::string at = "layer " + std::to_string(i);
        if (gate == SGGate::Hard && a.kind != Activation::ReLU)
            throw ConfigError("build_sg: ReLU nets only (Softplus has its own builder) at " + at);
        if (gate == SGGate::Gibbs && (a.kind != Activation::Softplus || a.theta != theta))
            throw ConfigError("build_sg_softplus: net must use Softplus(theta) at " + at);
        if (gate == SGGate::Probit && a.kind == Activation::Softplus)
            throw ConfigError("sg_probit_gate: ReLU or GELU nets only at " + at);
    }
    if (static_cast<int>(x.size()) != net.input_dim)
        throw SchemaError("stopping game: input length != input_dim");
    if (!all_finite(x)) throw SchemaError("stopping game: non-finite input");

    SGKernel k;
    k.gate = gate;
    k.theta = theta;
    k.input = x;
    k.out_node = net.out_node();
    k.out_index = net.output_neuron;
    k.node.resize(net.node_count());
    k.node[0].kind = SGNodeKernel::Kind::Input;
    k.node[0].width = net.input_dim;

    // Player-specific value pairs per node: (value for p = q, value for p = q').
    // Backward induction from the terminals; the pair update at a dense node
    // follows the layer's activation so every variant stays forward-equivalent.
    std::vector<Vec> v_same(net.node_count()), v_diff(net.node_count());
    v_same[0].resize(net.input_dim);
    v_diff[0].resize(net.input_dim);
    for (int i = 0; i < net.input_dim; ++i) {
        v_same[0][i] = std::max(x[i], 0.0);
        v_diff[0][i] = std::max(-x[i], 0.0);
    }

    for (int n = 1; n < net.node_count(); ++n) {
        const LayerSpec& l = net.layers[n - 1];
        SGNodeKernel& nk = k.node[n];
        nk.width = net.width(n);
        v_same[n].resize(nk.width);
        v_diff[n].resize(nk.width);
        if (l.is_dense()) {
            const DenseLayer& d = l.dense();
            nk.kind = SGNodeKernel::Kind::Dense;
            nk.act.resize(nk.width);
            for (int i = 0; i < nk.width; ++i) {
                SGActState& st = nk.act[i];
                double qc_same = std::max(d.b[i], 0.0);
                double qc_diff = std::max(-d.b[i], 0.0);
                double gamma = 0.0;
                for (int j = 0; j < d.w.cols; ++j) {
                    double w = d.w(i, j);
                    if (w == 0.0) continue;
                    gamma += std::fabs(w);
                    if (w > 0.0) {
                        st.edges.push_back({j, w, false});
                        qc_same += w * v_same[n - 1][j];
                        qc_diff += w * v_diff[n - 1][j];
                    } else {
                        st.edges.push_back({j, -w, true});
                        qc_same += -w * v_diff[n - 1][j];
                        qc_diff += -w * v_same[n - 1][j];
                    }
                }
                st.z_plus = qc_same;
                st.z_minus = qc_diff;
                st.gamma = gamma;
                double z = qc_same - qc_diff;
                // Dead fan-in: no continuation row, the state stops.
                st.cont_prob = st.edges.empty() ? 0.0 : continue_probability(gate, theta, z);
                switch (d.act.kind) {
                    case Activation::ReLU: {
                        double g = z > 0.0 ? 1.0 : 0.0;
                        st.v_plus = g * qc_same;
                        st.v_minus = g * qc_diff;
                        break;
                    }
                    case Activation::Softplus: {
                        double p = sigmoid_theta(z, d.act.theta);
                        st.v_minus = p * qc_diff;
                        st.v_plus = softplus_theta(z, d.act.theta) + st.v_minus;
                        break;
                    }
                    case Activation::Gelu: {
                        // probit regulariser bonus goes to the active player
                        double p = norm_cdf(z);
                        st.v_plus = p * qc_same + norm_pdf(z);
                        st.v_minus = p * qc_diff;
                        break;
                    }
                }
                v_same[n][i] = st.v_plus;
                v_diff[n][i] = st.v_minus;
            }
        } else if (l.is_add()) {
            nk.kind = SGNodeKernel::Kind::Add;
            nk.left = l.add().left;
            nk.right = l.add().right;
            for (int i = 0; i < nk.width; ++i) {
                v_same[n][i] = v_same[nk.left][i] + v_same[nk.right][i];
                v_diff[n][i] = v_diff[nk.left][i] + v_diff[nk.right][i];
            }
        } else {
            nk.kind = SGNodeKernel::Kind::MaxPool;
            const auto& groups = l.maxpool().groups;
            nk.winner.resize(groups.size());
            for (size_t g = 0; g < groups.size(); ++g) {
                int best = groups[g][0];
                for (int idx : groups[g]) {
                    double cand = v_same[n - 1][idx] - v_diff[n - 1][idx];
                    double cur = v_same[n - 1][best] - v_diff[n - 1][best];
                    if (cand > cur) best = idx;  // smallest index attains the maximum on ties
                }
                nk.winner[g] = best;
                v_same[n][g] = v_same[n - 1][best];
                v_diff[n][g] = v_diff[n - 1][best];
            }
        }
        nk.val_same = v_same[n];
        nk.val_diff = v_diff[n];
    }
    k.node[0].val_same = v_same[0];
    k.node[0].val_diff = v_diff[0];
    return k;
}

}  // namespace

SGKernel build_sg(const NetSpec& net, const Vec& x) { return build(net, x, SGGate::Hard, 0.0); }

SGKernel build_sg_softplus(const NetSpec& net, const Vec& x, double theta) {
    if (!(theta > 0.0)) throw ConfigError("build_sg_softplus: theta must be > 0");
    return build(net, x, SGGate::Gibbs, theta);
}

SGKernel sg_probit_gate(const NetSpec& net, const Vec& x) {
    return build(net, x, SGGate::Probit, 1.0);
}

std::vector<SGStateValue> sg_player_values(const SGKernel& kernel) {
    std::vector<SGStateValue> out;
    for (int n = 0; n < static_cast<int>(kernel.node.size()); ++n) {
        const SGNodeKernel& nk = kernel.node[n];
        for (int i = 0; i < nk.width; ++i)
            for (int q = 0; q < 2; ++q) {
                SGStateValue v;
                v.key = {n, i, q};
                v.v_active = nk.val_same[i];
                v.v_opponent = nk.val_diff[i];
                if (nk.kind == SGNodeKernel::Kind::Dense) {
                    const SGActState& st = nk.act[i];
                    v.q_cont_active = st.z_plus;
                    v.q_cont_opponent = st.z_minus;
                    v.advantage = st.z_plus - st.z_minus;
                    v.policy_cont = st.cont_prob;
                }
                out.push_back(v);
            }
    }
    return out;
}

OccupationResult sg_occupation(const SGKernel& kernel, const SGStateKey& start) {
    const auto& nodes = kernel.node;
    if (start.node < 1 || start.node >= static_cast<int>(nodes.size()))
        throw ConfigError("sg_occupation: start node out of range");
    if (start.index < 0 || start.index >= nodes[start.node].width ||
        (start.player != 0 && start.player != 1))
        throw ConfigError("sg_occupation: start state out of range");

    // gamma[n] holds 2*width entries, players interleaved.
    std::vector<Vec> gamma(nodes.size());
    for (size_t n = 0; n < nodes.size(); ++n) gamma[n].assign(2 * nodes[n].width, 0.0);
    gamma[start.node][2 * start.index + start.player] = 1.0;
    double cemetery = 0.0;

    for (int n = static_cast<int>(nodes.size()) - 1; n >= 1; --n) {
        const SGNodeKernel& nk = nodes[n];
        for (int i = 0; i < nk.width; ++i)
            for (int p = 0; p < 2; ++p) {
                double m = gamma[n][2 * i + p];
                if (m == 0.0) continue;
                if (nk.kind == SGNodeKernel::Kind::Dense) {
                    const SGActState& st = nk.act[i];
                    cemetery += m * (1.0 - st.cont_prob);
                    if (st.cont_prob == 0.0) continue;
                    // per-state discount gamma_i times the row |w|/gamma_i folds to |w|
                    for (const SGEdge& e : st.edges) {
                        int tp = e.flip ? 1 - p : p;
                        gamma[n - 1][2 * e.pred + tp] += m * st.cont_prob * e.w_abs;
                    }
                } else if (nk.kind == SGNodeKernel::Kind::Add) {
                    // oracle discount 2 times probability 1/2 per branch
                    gamma[nk.left][2 * i + p] += m;
                    gamma[nk.right][2 * i + p] += m;
                } else {
                    gamma[n - 1][2 * nk.winner[i] + p] += m;
                }
            }
    }

    OccupationResult out;
    out.cemetery = cemetery;
    for (size_t n = 0; n < nodes.size(); ++n)
        for (int i = 0; i < nodes[n].width; ++i)
            for (int p = 0; p < 2; ++p)
                out.gamma[{static_cast<int>(n), i, p}] = gamma[n][2 * i + p];
    out.gradient.resize(nodes[0].width);
    for (int i = 0; i < nodes[0].width; ++i)
        out.gradient[i] = gamma[0][2 * i] - gamma[0][2 * i + 1];
    return out;
}

Vec sg_gradient(const NetSpec& net, const Vec& x) {
    SGKernel k = build_sg(net, x);
    return sg_occupation(k, k.start()).gradient;
}

Vec sg_gradient_softplus(const NetSpec& net, const Vec& x, double theta) {
    SGKernel k = build_sg_softplus(net, x, theta);
    return sg_occupation(k, k.start()).gradient;
}

Vec sg_gradient_probit(const NetSpec& net, const Vec& x) {
    SGKernel k = sg_probit_gate(net, x);
    return sg_occupation(k, k.start()).gradient;
}

namespace {

void require_mp_chain(const NetSpec& net) {
    for (const LayerSpec& l : net.layers)
        if (l.is_add() || l.is_attention())
            throw ConfigError("trajectory MP: dense/max-pool chains only");
    if (!net.layers.front().is_dense())
        throw ConfigError("trajectory MP: the first layer must be dense");
}

SGKernel build_for_mp(const NetSpec& net, const Vec& x, SGGate gate, double theta) {
    switch (gate) {
        case SGGate::Hard:
            return build_sg(net, x);
        case SGGate::Gibbs:
            return build_sg_softplus(net, x, theta);
        case SGGate::Probit:
            return sg_probit_gate(net, x);
    }
    return build_sg(net, x);
}

}  // namespace

LayeredMP sg_trajectory_mp(const NetSpec& net, const Vec& x, SGGate gate, double theta) {
    require_mp_chain(net);
    SGKernel k = build_for_mp(net, x, gate, theta);
    int top = net.out_node();
    LayeredMP mp;
    mp.states.resize(top + 1);
    mp.rows.resize(top + 1);
    for (int n = 0; n <= top; ++n)
        for (int i = 0; i < k.node[n].width; ++i) {
            mp.states[n].push_back({i, +1});
            mp.states[n].push_back({i, -1});
        }
    for (int n = 1; n <= top; ++n) {
        const SGNodeKernel& nk = k.node[n];
        int prev = k.node[n - 1].width;
        mp.rows[n].assign(2 * nk.width, Vec(2 * prev + 1, 0.0));
        for (int i = 0; i < nk.width; ++i)
            for (int p = 0; p < 2; ++p) {
                Vec& row = mp.rows[n][2 * i + p];
                if (nk.kind == SGNodeKernel::Kind::Dense) {
                    const SGActState& st = nk.act[i];
                    double cont = st.cont_prob;
                    row[0] = 1.0 - cont;
                    if (cont > 0.0)
                        for (const SGEdge& e : st.edges) {
                            int tp = e.flip ? 1 - p : p;
                            row[1 + 2 * e.pred + tp] += cont * e.w_abs / st.gamma;
                        }
                } else {  // max pool
                    row[1 + 2 * nk.winner[i] + p] = 1.0;
                }
            }
    }
    mp.start = 2 * net.output_neuron + 0;
    mp.validate();
    return mp;
}

EdgeDiscount sg_mp_edge_discount(const NetSpec& net, const Vec& x, SGGate gate, double theta) {
    require_mp_chain(net);
    auto kernel = std::make_shared<SGKernel>(build_for_mp(net, x, gate, theta));
    return [kernel](int layer, int from, int to) {
        (void)to;
        const SGNodeKernel& nk = kernel->node[layer];
        if (nk.kind == SGNodeKernel::Kind::Dense) return nk.act[from / 2].gamma;
        return 1.0;
    };
}

}  // namespace attrgame
