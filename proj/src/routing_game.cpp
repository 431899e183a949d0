#include "attrgame/routing_game.hpp"

#include <cmath>

#include "attrgame/attention.hpp"
#include "attrgame/errors.hpp"
#include "attrgame/gauss.hpp"

namespace attrgame {

void RGConfig::validate() const {
    if (!(tau > 0.0)) throw ConfigError("rg config: tau must be > 0");
    if (epsilon < 0.0) throw ConfigError("rg config: epsilon must be >= 0");
    if (lambda > 0.0) throw ConfigError("rg config: lambda must be <= 0");
    if (lambda_sm > 0.0) throw ConfigError("rg config: lambda_sm must be <= 0");
    if (lambda_ent < 0.0) throw ConfigError("rg config: lambda_ent must be >= 0");
    if (sigma2 < 0.0) throw ConfigError("rg config: sigma2 must be >= 0");
    if (!std::isfinite(alpha) || !std::isfinite(beta))
        throw ConfigError("rg config: alpha/beta must be finite");
}

namespace {

// Normalised fan-in weight entropy; fan-in of 1 defines it as 0.
double fanin_entropy(const Matrix& w, int row) {
    if (w.cols <= 1) return 0.0;
    double total = 0.0;
    for (int j = 0; j < w.cols; ++j) total += std::fabs(w(row, j));
    if (total == 0.0) return 0.0;
    double h = 0.0;
    for (int j = 0; j < w.cols; ++j) {
        double p = std::fabs(w(row, j)) / total;
        if (p > 0.0) h -= p * std::log(p);
    }
    return h / std::log(static_cast<double>(w.cols));
}

// Gibbs row over the signed-product masses of one stream, with the
// epsilon-tilted outside option. An empty stream sends the branch mass to the
// cemetery.
RGStream gibbs_stream(const Vec& masses, double eps, double tau) {
    RGStream st;
    st.p.assign(masses.size(), 0.0);
    double inv_tau = 1.0 / tau;
    double z = 0.0;
    Vec tilted(masses.size(), 0.0);
    for (size_t i = 0; i < masses.size(); ++i) {
        st.mass_sum += masses[i];
        if (masses[i] > 0.0) {
            tilted[i] = std::pow(masses[i], inv_tau);
            z += tilted[i];
        }
    }
    double out = eps > 0.0 ? std::pow(eps, inv_tau) : 0.0;
    z += out;
    if (z <= 0.0) {
        st.cemetery = 1.0;
        return st;
    }
    for (size_t i = 0; i < masses.size(); ++i) st.p[i] = tilted[i] / z;
    st.cemetery = out / z;
    return st;
}

}  // namespace

RGKernel build_rg(const NetSpec& net, const Vec& x, const RGConfig& cfg) {
    cfg.validate();
    net.validate();
    RGKernel k;
    k.net = net;
    k.x = x;
    k.cfg = cfg;
    k.trace = forward(net, x);
    if (cfg.lambda < 0.0 || (cfg.lambda_sm < 0.0 && net.has_attention()))
        k.adf = adf_forward(net, x, cfg.sigma2);

    k.dense.resize(net.node_count());
    for (int n = 1; n < net.node_count(); ++n) {
        const LayerSpec& l = net.layers[n - 1];
        if (!l.is_dense()) continue;
        const DenseLayer& d = l.dense();
        RGDenseNode& nd = k.dense[n];
        int out = d.w.rows;
        int in = d.w.cols;
        nd.cont.assign(out, 0.0);
        nd.z_eff.assign(out, 0.0);
        nd.plus.resize(out);
        nd.minus.resize(out);

        // Predecessor scores: raw input at node 0, forward activations above,
        // replaced by the clamped lower-confidence bound when risk is active.
        // Attention outputs keep their raw (possibly signed) values.
        Vec score(in);
        bool prev_attention = n - 1 >= 1 && net.layers[n - 2].is_attention();
        for (int j = 0; j < in; ++j) {
            double base = k.trace.node_out[n - 1][j];
            if (cfg.lambda < 0.0 && n - 1 >= 1 && !prev_attention)
                base = risk_value(k.adf->mu[n - 1][j], k.adf->var[n - 1][j], cfg.lambda);
            score[j] = base;
        }

        for (int i = 0; i < out; ++i) {
            Vec mp(in, 0.0), mm(in, 0.0);
            for (int j = 0; j < in; ++j) {
                double prod = score[j] * d.w(i, j);
                mp[j] = std::max(prod, 0.0);
                mm[j] = std::max(-prod, 0.0);
            }
            nd.plus[i] = gibbs_stream(mp, cfg.epsilon, cfg.tau);
            nd.minus[i] = gibbs_stream(mm, cfg.epsilon, cfg.tau);
            double z = k.trace.pre_act[n][i];
            nd.z_eff[i] = z - cfg.lambda_ent * fanin_entropy(d.w, i);
            nd.cont[i] = cfg.gate == RGGateKind::Hard ? (nd.z_eff[i] > 0.0 ? 1.0 : 0.0)
                                                      : norm_cdf(nd.z_eff[i]);
        }
    }
    return k;
}

RGAttribution rg_attribution(const RGKernel& k, std::optional<double> seed_mass) {
    const NetSpec& net = k.net;
    int nn = net.node_count();
    double fx = k.trace.output;
    double seed = seed_mass.value_or(fx);

    std::vector<Vec> gamma(nn);
    for (int n = 0; n < nn; ++n) gamma[n].assign(2 * net.width(n), 0.0);
    gamma[nn - 1][2 * net.output_neuron + 0] = 1.0;
    double cemetery = 0.0;

    for (int n = nn - 1; n >= 1; --n) {
        const LayerSpec& l = net.layers[n - 1];
        if (l.is_dense()) {
            const RGDenseNode& nd = k.dense[n];
            int w = net.width(n);
            for (int i = 0; i < w; ++i)
                for (int p = 0; p < 2; ++p) {
                    double m = gamma[n][2 * i + p];
                    if (m == 0.0) continue;
                    double cont = nd.cont[i];
                    cemetery += m * (1.0 - cont);
                    if (cont == 0.0) continue;
                    const RGStream& sp = nd.plus[i];
                    const RGStream& sm = nd.minus[i];
                    // half-branch times discount {2 alpha, 2 beta} folds to
                    // alpha / beta per stream
                    for (size_t j = 0; j < sp.p.size(); ++j)
                        if (sp.p[j] > 0.0)
                            gamma[n - 1][2 * j + p] += m * cont * k.cfg.alpha * sp.p[j];
                    for (size_t j = 0; j < sm.p.size(); ++j)
                        if (sm.p[j] > 0.0)
                            gamma[n - 1][2 * j + (1 - p)] += m * cont * k.cfg.beta * sm.p[j];
                    cemetery += m * cont * 0.5 * (sp.cemetery + sm.cemetery);
                }
        } else if (l.is_add()) {
            int a = l.add().left, b = l.add().right;
            int w = net.width(n);
            for (int i = 0; i < w; ++i)
                for (int p = 0; p < 2; ++p) {
                    double m = gamma[n][2 * i + p];
                    if (m == 0.0) continue;
                    gamma[a][2 * i + p] += 0.5 * m;
                    gamma[b][2 * i + p] += 0.5 * m;
                }
        } else if (l.is_maxpool()) {
            const auto& winners = k.trace.winner[n];
            int w = net.width(n);
            for (int i = 0; i < w; ++i)
                for (int p = 0; p < 2; ++p) {
                    double m = gamma[n][2 * i + p];
                    if (m == 0.0) continue;
                    gamma[n - 1][2 * winners[i] + p] += m;
                }
        } else {
            const AttentionLayer& al = l.attention();
            AttentionBlock blk;
            blk.wq = al.wq;
            blk.wk = al.wk;
            blk.wv = al.wv;
            blk.tokens = al.tokens;
            blk.d_h = al.d_h;
            blk.x = k.trace.attn->x;
            Matrix oracle = k.trace.attn->a;
            if (k.cfg.lambda_sm < 0.0)
                oracle = qk_oracle(blk, k.cfg.lambda_sm, k.adf->attn_key_sigma);
            int s = al.tokens, dh = al.d_h, dim = al.wq.rows;
            Matrix go_p(s, dh), go_m(s, dh);
            for (int q = 0; q < s; ++q)
                for (int d = 0; d < dh; ++d) {
                    go_p(q, d) = gamma[n][2 * (q * dh + d) + 0];
                    go_m(q, d) = gamma[n][2 * (q * dh + d) + 1];
                }
            AttnWalk walk = attn_rg_walk(blk, go_p, go_m, k.cfg.alpha, k.cfg.beta, oracle);
            for (int t = 0; t < s; ++t)
                for (int e = 0; e < dim; ++e) {
                    gamma[n - 1][2 * (t * dim + e) + 0] += walk.gamma_x_plus(t, e);
                    gamma[n - 1][2 * (t * dim + e) + 1] += walk.gamma_x_minus(t, e);
                }
        }
    }

    RGAttribution out;
    out.cemetery = cemetery;
    out.rel.fx = fx;
    out.rel.seed = seed;
    out.rel.node_rel.resize(nn);
    for (int n = 0; n < nn; ++n) {
        int w = net.width(n);
        out.rel.node_rel[n].resize(w);
        for (int i = 0; i < w; ++i) {
            out.rel.node_rel[n][i] = seed * (gamma[n][2 * i] - gamma[n][2 * i + 1]);
            for (int p = 0; p < 2; ++p)
                out.gamma[{n, i, p}] = gamma[n][2 * i + p];
        }
    }
    return out;
}

RGAttribution rg_attribution(const NetSpec& net, const Vec& x, const RGConfig& cfg,
                             std::optional<double> seed_mass) {
    return rg_attribution(build_rg(net, x, cfg), seed_mass);
}

RelevanceMap lrp_direct(const NetSpec& net, const Vec& x, double alpha, double beta, double eps) {
    net.validate();
    if (net.has_attention()) throw ConfigError("lrp_direct: attention blocks unsupported");
    if (eps < 0.0) throw ConfigError("lrp_direct: epsilon must be >= 0");
    ForwardTrace tr = forward(net, x);
    int nn = net.node_count();
    RelevanceMap out;
    out.fx = tr.output;
    out.seed = tr.output;
    out.node_rel.resize(nn);
    for (int n = 0; n < nn; ++n) out.node_rel[n].assign(net.width(n), 0.0);
    out.node_rel[nn - 1][net.output_neuron] = out.seed;

    for (int n = nn - 1; n >= 1; --n) {
        const LayerSpec& l = net.layers[n - 1];
        const Vec& r = out.node_rel[n];
        if (l.is_dense()) {
            const DenseLayer& d = l.dense();
            const Vec& a = tr.node_out[n - 1];
            for (int i = 0; i < d.w.rows; ++i) {
                if (r[i] == 0.0) continue;
                if (tr.pre_act[n][i] <= 0.0) continue;  // closed gate routes nothing
                double sp = 0.0, sm = 0.0;
                for (int j = 0; j < d.w.cols; ++j) {
                    double prod = a[j] * d.w(i, j);
                    sp += std::max(prod, 0.0);
                    sm += std::max(-prod, 0.0);
                }
                double dp = eps + sp, dm = eps + sm;
                for (int j = 0; j < d.w.cols; ++j) {
                    double prod = a[j] * d.w(i, j);
                    double frac = 0.0;
                    if (prod > 0.0 && dp > 0.0) frac += alpha * prod / dp;
                    if (prod < 0.0 && dm > 0.0) frac -= beta * (-prod) / dm;
                    out.node_rel[n - 1][j] += frac * r[i];
                }
            }
        } else if (l.is_add()) {
            for (size_t i = 0; i < r.size(); ++i) {
                out.node_rel[l.add().left][i] += 0.5 * r[i];
                out.node_rel[l.add().right][i] += 0.5 * r[i];
            }
        } else {
            for (size_t g = 0; g < r.size(); ++g)
                out.node_rel[n - 1][tr.winner[n][g]] += r[g];
        }
    }
    return out;
}

LayeredMP rg_trajectory_mp(const NetSpec& net, const Vec& x, const RGConfig& cfg) {
    for (const LayerSpec& l : net.layers)
        if (l.is_add() || l.is_attention())
            throw ConfigError("trajectory MP: dense/max-pool chains only");
    if (!net.layers.front().is_dense())
        throw ConfigError("trajectory MP: the first layer must be dense");
    RGKernel k = build_rg(net, x, cfg);
    int top = net.out_node();
    LayeredMP mp;
    mp.states.resize(top + 1);
    mp.rows.resize(top + 1);
    // pixel-stream terminals at layer 0; player-tagged act states above
    for (int i = 0; i < net.input_dim; ++i) {
        mp.states[0].push_back({i, +1});
        mp.states[0].push_back({i, -1});
    }
    for (int n = 1; n <= top; ++n)
        for (int i = 0; i < net.width(n); ++i) {
            mp.states[n].push_back({i, +1});
            mp.states[n].push_back({i, -1});
        }
    for (int n = 1; n <= top; ++n) {
        const LayerSpec& l = net.layers[n - 1];
        int prev = static_cast<int>(mp.states[n - 1].size());
        mp.rows[n].assign(mp.states[n].size(), Vec(prev + 1, 0.0));
        for (int i = 0; i < net.width(n); ++i)
            for (int p = 0; p < 2; ++p) {
                Vec& row = mp.rows[n][2 * i + p];
                if (l.is_dense()) {
                    const RGDenseNode& nd = k.dense[n];
                    double cont = nd.cont[i];
                    row[0] = 1.0 - cont;
                    if (cont == 0.0) continue;
                    const RGStream& sp = nd.plus[i];
                    const RGStream& sm = nd.minus[i];
                    row[0] += cont * 0.5 * (sp.cemetery + sm.cemetery);
                    if (n == 1) {
                        // stream-tagged pixel terminals
                        for (size_t j = 0; j < sp.p.size(); ++j) {
                            row[1 + 2 * j + 0] += cont * 0.5 * sp.p[j];
                            row[1 + 2 * j + 1] += cont * 0.5 * sm.p[j];
                        }
                    } else {
                        for (size_t j = 0; j < sp.p.size(); ++j) {
                            row[1 + 2 * j + p] += cont * 0.5 * sp.p[j];
                            row[1 + 2 * j + (1 - p)] += cont * 0.5 * sm.p[j];
                        }
                    }
                } else {  // max pool
                    row[1 + 2 * k.trace.winner[n][i] + p] = 1.0;
                }
            }
    }
    mp.start = 2 * net.output_neuron + 0;
    mp.validate();
    return mp;
}

EdgeDiscount rg_mp_edge_discount(const NetSpec& net, const Vec& x, const RGConfig& cfg) {
    (void)x;
    std::vector<bool> is_dense(net.node_count());
    for (int n = 1; n < net.node_count(); ++n) is_dense[n] = net.layers[n - 1].is_dense();
    double alpha = cfg.alpha, beta = cfg.beta;
    return [is_dense, alpha, beta](int layer, int from, int to) {
        if (to < 0) return 1.0;
        if (!is_dense[layer]) return 1.0;
        int from_tag = from % 2;  // 0 -> '+', 1 -> '-'
        int to_tag = to % 2;
        if (layer == 1) return to_tag == 0 ? 2.0 * alpha : 2.0 * beta;  // stream terminals
        return to_tag == from_tag ? 2.0 * alpha : 2.0 * beta;           // player kept vs flipped
    };
}

RGGameValues rg_game_values(const NetSpec& net, const Vec& x, double eps) {
    net.validate();
    if (net.has_attention()) throw ConfigError("rg_game_values: attention blocks unsupported");
    if (eps < 0.0) throw ConfigError("rg_game_values: epsilon must be >= 0");
    int nn = net.node_count();
    RGGameValues v;
    v.act_exp.resize(nn);
    v.lin_plus_exp.resize(nn);
    v.lin_minus_exp.resize(nn);
    // bottom-up backward induction in probability space at tau = 1
    v.act_exp[0].resize(net.input_dim);
    for (int i = 0; i < net.input_dim; ++i) v.act_exp[0][i] = x[i];  // signed terminals
    for (int n = 1; n < nn; ++n) {
        const LayerSpec& l = net.layers[n - 1];
        int w = net.width(n);
        v.act_exp[n].assign(w, 0.0);
        if (l.is_dense()) {
            const DenseLayer& d = l.dense();
            v.lin_plus_exp[n].assign(w, 0.0);
            v.lin_minus_exp[n].assign(w, 0.0);
            for (int i = 0; i < w; ++i) {
                double sp = 0.0, sm = 0.0;
                for (int j = 0; j < d.w.cols; ++j) {
                    double prod = v.act_exp[n - 1][j] * d.w(i, j);
                    sp += std::max(prod, 0.0);
                    sm += std::max(-prod, 0.0);
                }
                sp += std::max(d.b[i], 0.0);
                sm += std::max(-d.b[i], 0.0);
                v.lin_plus_exp[n][i] = sp + eps;
                v.lin_minus_exp[n][i] = sm + eps;
                double z = sp - sm;  // the epsilon shifts cancel in the advantage
                v.act_exp[n][i] = z > 0.0 ? z : 0.0;
            }
        } else if (l.is_add()) {
            for (int i = 0; i < w; ++i)
                v.act_exp[n][i] =
                    v.act_exp[l.add().left][i] + v.act_exp[l.add().right][i];
        } else {
            const auto& groups = l.maxpool().groups;
            for (size_t g = 0; g < groups.size(); ++g) {
                int best = groups[g][0];
                for (int idx : groups[g])
                    if (v.act_exp[n - 1][idx] > v.act_exp[n - 1][best]) best = idx;
                v.act_exp[n][g] = v.act_exp[n - 1][best];
            }
        }
    }
    return v;
}

}  // namespace attrgame
