#include "attrgame/decomp.hpp"

#include <algorithm>
#include <cmath>

#include "attrgame/errors.hpp"
#include "attrgame/gauss.hpp"

namespace attrgame {

namespace {

void check_kind(const NetSpec& net, const DecompKind& kind) {
    for (size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& l = net.layers[i];
        if (l.is_attention())
            throw ConfigError("decompose_forward: attention blocks are not decomposable");
        if (!l.is_dense()) continue;
        const ActivationKind& act = l.dense().act;
        std::string at = "layer " + std::to_string(i);
        if (kind.family == DecompFamily::Softplus) {
            if (act.kind != Activation::Softplus || act.theta != kind.theta)
                throw ConfigError("decompose_forward: Softplus(theta) decomposition requires a "
                                  "Softplus(theta) net at " + at);
        } else {
            if (act.kind != Activation::ReLU)
                throw ConfigError("decompose_forward: Stopping/Mixing decomposition requires a "
                                  "ReLU net at " + at);
        }
    }
}

// Pair image of one decomposition function applied to a pre-activation pair.
void apply_pair(const DecompKind& kind, double zp, double zm, double& ap, double& am) {
    double z = zp - zm;
    switch (kind.family) {
        case DecompFamily::Stopping: {
            double gate = z > 0.0 ? 1.0 : 0.0;
            ap = gate * zp;
            am = gate * zm;
            break;
        }
        case DecompFamily::Mixing: {
            double eta = std::clamp(kind.eta, 0.0, 1.0);
            ap = eta * std::max(zp, zm) + (1.0 - eta) * zp;
            am = eta * zm + (1.0 - eta) * std::min(zp, zm);
            break;
        }
        case DecompFamily::Softplus: {
            // a+ = p z+ + theta H_theta(z) rewritten via theta H_theta = sigma_theta - p z.
            double p = sigmoid_theta(z, kind.theta);
            am = p * zm;
            ap = softplus_theta(z, kind.theta) + am;
            break;
        }
    }
}

DecompState run(const NetSpec& net, const Vec& plus, const Vec& minus, const DecompKind& kind) {
    net.validate();
    check_kind(net, kind);
    if (static_cast<int>(plus.size()) != net.input_dim ||
        static_cast<int>(minus.size()) != net.input_dim)
        throw SchemaError("decompose_forward: input pair length != input_dim");
    for (int k = 0; k < net.input_dim; ++k)
        if (plus[k] < 0.0 || minus[k] < 0.0 || !std::isfinite(plus[k]) || !std::isfinite(minus[k]))
            throw SchemaError("decompose_forward: layer-0 pairs must be finite and non-negative");

    int nn = net.node_count();
    DecompState st;
    st.a_plus.resize(nn);
    st.a_minus.resize(nn);
    st.z_plus.resize(nn);
    st.z_minus.resize(nn);
    st.a_plus[0] = plus;
    st.a_minus[0] = minus;

    for (int n = 1; n < nn; ++n) {
        const LayerSpec& l = net.layers[n - 1];
        if (l.is_dense()) {
            const DenseLayer& d = l.dense();
            const Vec& pp = st.a_plus[n - 1];
            const Vec& pm = st.a_minus[n - 1];
            int out = d.w.rows;
            st.z_plus[n].assign(out, 0.0);
            st.z_minus[n].assign(out, 0.0);
            st.a_plus[n].assign(out, 0.0);
            st.a_minus[n].assign(out, 0.0);
            for (int i = 0; i < out; ++i) {
                double zp = std::max(d.b[i], 0.0);
                double zm = std::max(-d.b[i], 0.0);
                for (int j = 0; j < d.w.cols; ++j) {
                    double w = d.w(i, j);
                    if (w > 0.0) {
                        zp += w * pp[j];
                        zm += w * pm[j];
                    } else if (w < 0.0) {
                        zp += -w * pm[j];
                        zm += -w * pp[j];
                    }
                }
                st.z_plus[n][i] = zp;
                st.z_minus[n][i] = zm;
                apply_pair(kind, zp, zm, st.a_plus[n][i], st.a_minus[n][i]);
            }
        } else if (l.is_add()) {
            const Vec& lp = st.a_plus[l.add().left];
            const Vec& lm = st.a_minus[l.add().left];
            const Vec& rp = st.a_plus[l.add().right];
            const Vec& rm = st.a_minus[l.add().right];
            int w = static_cast<int>(lp.size());
            st.a_plus[n].resize(w);
            st.a_minus[n].resize(w);
            for (int i = 0; i < w; ++i) {
                st.a_plus[n][i] = lp[i] + rp[i];
                st.a_minus[n][i] = lm[i] + rm[i];
            }
        } else {  // max pool: winner by activation, smallest index on ties
            const Vec& pp = st.a_plus[n - 1];
            const Vec& pm = st.a_minus[n - 1];
            const auto& groups = l.maxpool().groups;
            st.a_plus[n].resize(groups.size());
            st.a_minus[n].resize(groups.size());
            for (size_t g = 0; g < groups.size(); ++g) {
                int best = groups[g][0];
                for (int idx : groups[g])
                    if (pp[idx] - pm[idx] > pp[best] - pm[best]) best = idx;
                st.a_plus[n][g] = pp[best];
                st.a_minus[n][g] = pm[best];
            }
        }
    }
    return st;
}

}  // namespace

DecompState decompose_forward(const NetSpec& net, const Vec& x, const DecompKind& kind) {
    Vec plus(x.size()), minus(x.size());
    for (size_t k = 0; k < x.size(); ++k) {
        plus[k] = std::max(x[k], 0.0);
        minus[k] = std::max(-x[k], 0.0);
    }
    return run(net, plus, minus, kind);
}

DecompState decompose_forward_pairs(const NetSpec& net, const Vec& plus, const Vec& minus,
                                    const DecompKind& kind) {
    return run(net, plus, minus, kind);
}

bool mixing_convexity_probe(const NetSpec& net, const Vec& x0, const Vec& x1, double t,
                            double tol) {
    if (t < 0.0 || t > 1.0) throw ConfigError("mixing_convexity_probe: t must lie in [0, 1]");
    DecompKind kind = DecompKind::mixing(1.0);
    Vec xm(x0.size());
    for (size_t k = 0; k < x0.size(); ++k) xm[k] = t * x0[k] + (1.0 - t) * x1[k];
    DecompState s0 = decompose_forward(net, x0, kind);
    DecompState s1 = decompose_forward(net, x1, kind);
    DecompState sm = decompose_forward(net, xm, kind);
    for (size_t n = 0; n < sm.a_plus.size(); ++n)
        for (size_t i = 0; i < sm.a_plus[n].size(); ++i) {
            double bound = t * s0.a_plus[n][i] + (1.0 - t) * s1.a_plus[n][i];
            if (sm.a_plus[n][i] > bound + tol) return false;
        }
    return true;
}

}  // namespace attrgame
