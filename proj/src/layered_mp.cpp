#include "attrgame/layered_mp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "attrgame/errors.hpp"
#include "attrgame/rng.hpp"

namespace attrgame {

std::string state_label(const MPState& s) {
    std::string out = std::to_string(s.neuron);
    if (s.tag > 0) out += '+';
    if (s.tag < 0) out += '-';
    return out;
}

void LayeredMP::validate(double tol) const {
    if (states.size() < 2) throw TopologyError("LayeredMP: need at least one layer");
    if (rows.size() != states.size())
        throw TopologyError("LayeredMP: rows/states layer count mismatch");
    int top = layer_count();
    if (start < 0 || start >= static_cast<int>(states[top].size()))
        throw TopologyError("LayeredMP: start state out of range");
    for (int l = 1; l <= top; ++l) {
        if (rows[l].size() != states[l].size())
            throw TopologyError("LayeredMP: layer " + std::to_string(l) + " row count mismatch");
        size_t want = states[l - 1].size() + 1;
        for (size_t i = 0; i < rows[l].size(); ++i) {
            const Vec& r = rows[l][i];
            if (r.size() != want)
                throw TopologyError("LayeredMP: layer " + std::to_string(l) + " state " +
                                    std::to_string(i) + " row width mismatch");
            double s = 0.0;
            for (double p : r) {
                if (p < 0.0 || !std::isfinite(p))
                    throw TopologyError("LayeredMP: negative or non-finite transition mass");
                s += p;
            }
            if (std::fabs(s - 1.0) > tol)
                throw TopologyError("LayeredMP: row sum " + std::to_string(s) + " at layer " +
                                    std::to_string(l) + " state " + std::to_string(i));
        }
    }
}

nlohmann::json LayeredMP::to_json() const {
    nlohmann::json j;
    j["start"] = state_label(states[layer_count()][start]);
    nlohmann::json layers = nlohmann::json::array();
    for (int l = layer_count(); l >= 0; --l) {
        nlohmann::json jl;
        nlohmann::json names = nlohmann::json::array();
        for (const MPState& s : states[l]) names.push_back(state_label(s));
        jl["layer"] = l;
        jl["states"] = std::move(names);
        if (l >= 1) {
            nlohmann::json rs = nlohmann::json::array();
            for (size_t i = 0; i < rows[l].size(); ++i) {
                nlohmann::json row;
                if (rows[l][i][0] > 0.0) row["cemetery"] = rows[l][i][0];
                for (size_t c = 0; c < states[l - 1].size(); ++c)
                    if (rows[l][i][c + 1] > 0.0)
                        row[state_label(states[l - 1][c])] = rows[l][i][c + 1];
                rs.push_back(std::move(row));
            }
            jl["rows"] = std::move(rs);
        }
        layers.push_back(std::move(jl));
    }
    j["layers"] = std::move(layers);
    return j;
}

void require_same_graph(const LayeredMP& a, const LayeredMP& b) {
    if (a.states.size() != b.states.size())
        throw TopologyError("compared MPs have different layer counts");
    for (size_t l = 0; l < a.states.size(); ++l) {
        if (a.states[l].size() != b.states[l].size())
            throw TopologyError("compared MPs differ in width at layer " + std::to_string(l));
        for (size_t i = 0; i < a.states[l].size(); ++i)
            if (!(a.states[l][i] == b.states[l][i]))
                throw TopologyError("compared MPs differ in state labels at layer " +
                                    std::to_string(l));
    }
    if (a.start != b.start) throw TopologyError("compared MPs have different start states");
}

MarginalPass marginal_pass(const LayeredMP& mp) {
    int top = mp.layer_count();
    MarginalPass out;
    out.alpha.resize(top + 1);
    out.alpha_cem.assign(top + 1, 0.0);
    out.alpha[top].assign(mp.states[top].size(), 0.0);
    out.alpha[top][mp.start] = 1.0;
    for (int l = top; l >= 1; --l) {
        out.alpha[l - 1].assign(mp.states[l - 1].size(), 0.0);
        double cem = out.alpha_cem[l];  // absorbing
        for (size_t i = 0; i < mp.states[l].size(); ++i) {
            double m = out.alpha[l][i];
            if (m == 0.0) continue;
            const Vec& r = mp.rows[l][i];
            cem += m * r[0];
            for (size_t c = 0; c + 1 < r.size(); ++c) out.alpha[l - 1][c] += m * r[c + 1];
        }
        out.alpha_cem[l - 1] = cem;
    }
    return out;
}

namespace {

// Geometric mean of two transition masses; equal rows reproduce themselves
// exactly so identical processes give BC = 1 without rounding residue.
double geom(double pa, double pb) {
    if (pa == pb) return pa;
    double g = pa * pb;
    return g > 0.0 ? std::sqrt(g) : 0.0;
}

struct BetaPass {
    std::vector<Vec> beta;  // per layer, ordinary states
    Vec beta_cem;           // per layer
    Vec bc;                 // per layer
};

// The prefix coefficient is tracked in deficit form, BC^(l-1) = BC^(l) -
// sum_s beta(s) (1 - geometric row sum of s): bitwise-equal rows contribute an
// exact zero deficit, so identical kernels give BC = 1 and H = 0 without
// rounding residue (subtracting a near-one mass total from 1 would not).
BetaPass beta_pass(const LayeredMP& a, const LayeredMP& b) {
    int top = a.layer_count();
    BetaPass out;
    out.beta.resize(top + 1);
    out.beta_cem.assign(top + 1, 0.0);
    out.bc.assign(top + 1, 0.0);
    out.beta[top].assign(a.states[top].size(), 0.0);
    out.beta[top][a.start] = 1.0;
    out.bc[top] = 1.0;
    for (int l = top; l >= 1; --l) {
        size_t prev = a.states[l - 1].size();
        std::vector<KahanSum> acc(prev);
        KahanSum cem;
        cem.add(out.beta_cem[l]);  // geometric kernel is 1 on the cemetery
        KahanSum loss;
        for (size_t i = 0; i < a.states[l].size(); ++i) {
            double m = out.beta[l][i];
            if (m == 0.0) continue;
            const Vec& ra = a.rows[l][i];
            const Vec& rb = b.rows[l][i];
            cem.add(m * geom(ra[0], rb[0]));
            KahanSum row;
            row.add(geom(ra[0], rb[0]));
            for (size_t c = 0; c < prev; ++c) {
                double g = geom(ra[c + 1], rb[c + 1]);
                if (g > 0.0) {
                    acc[c].add(m * g);
                    row.add(g);
                }
            }
            if (ra != rb) loss.add(m * (1.0 - row.value()));
        }
        out.beta[l - 1].resize(prev);
        for (size_t c = 0; c < prev; ++c) out.beta[l - 1][c] = acc[c].value();
        out.beta_cem[l - 1] = cem.value();
        out.bc[l - 1] = out.bc[l] - loss.value();
    }
    return out;
}

double clamped_sqrt_1m(double bc) { return std::sqrt(std::max(0.0, 1.0 - bc)); }

}  // namespace

HellingerResult hellinger_backward(const LayeredMP& a, const LayeredMP& b) {
    a.validate();
    b.validate();
    require_same_graph(a, b);
    int top = a.layer_count();
    BetaPass bp = beta_pass(a, b);
    MarginalPass ma = marginal_pass(a);
    MarginalPass mb = marginal_pass(b);

    HellingerResult r;
    r.bc = bp.bc;
    r.h.resize(top + 1);
    for (int l = 0; l <= top; ++l) r.h[l] = clamped_sqrt_1m(r.bc[l]);
    r.beta0 = bp.beta[0];
    r.beta0_cem = bp.beta_cem[0];
    r.alpha0_a = ma.alpha[0];
    r.alpha0_b = mb.alpha[0];
    r.alpha0_cem_a = ma.alpha_cem[0];
    r.alpha0_cem_b = mb.alpha_cem[0];

    size_t t = r.beta0.size();
    r.h2.resize(t);
    r.h2_marg.resize(t);
    r.frac.resize(t);
    KahanSum ord;
    for (size_t s = 0; s < t; ++s) {
        double half = 0.5 * (r.alpha0_a[s] + r.alpha0_b[s]);
        r.h2[s] = half - r.beta0[s];
        r.h2_marg[s] = half - std::sqrt(r.alpha0_a[s] * r.alpha0_b[s]);
        r.frac[s] = half > 0.0 ? r.h2[s] / half : 0.0;
        ord.add(r.beta0[s]);
    }
    r.h2_cem = 0.5 * (r.alpha0_cem_a + r.alpha0_cem_b) - r.beta0_cem;
    r.bc0_ord = ord.value();
    r.z_a = 1.0 - r.alpha0_cem_a;
    r.z_b = 1.0 - r.alpha0_cem_b;
    return r;
}

HellingerForward hellinger_forward(const LayeredMP& a, const LayeredMP& b) {
    a.validate();
    b.validate();
    require_same_graph(a, b);
    int top = a.layer_count();
    HellingerForward out;
    out.gamma.resize(top + 1);
    out.gamma[0].assign(a.states[0].size(), 1.0);
    for (int l = 1; l <= top; ++l) {
        out.gamma[l].assign(a.states[l].size(), 0.0);
        for (size_t i = 0; i < a.states[l].size(); ++i) {
            const Vec& ra = a.rows[l][i];
            const Vec& rb = b.rows[l][i];
            KahanSum s;
            s.add(geom(ra[0], rb[0]));  // cemetery continuation mass is 1
            for (size_t c = 0; c + 1 < ra.size(); ++c) {
                double g = geom(ra[c + 1], rb[c + 1]);
                if (g > 0.0) s.add(g * out.gamma[l - 1][c]);
            }
            out.gamma[l][i] = s.value();
        }
    }
    out.bc0 = out.gamma[top][a.start];
    return out;
}

double hellinger_cross_identity_dev(const LayeredMP& a, const LayeredMP& b) {
    BetaPass bp = beta_pass(a, b);
    HellingerForward fw = hellinger_forward(a, b);
    int top = a.layer_count();
    double dev = 0.0;
    for (int l = 0; l <= top; ++l) {
        KahanSum s;
        for (size_t i = 0; i < bp.beta[l].size(); ++i) s.add(bp.beta[l][i] * fw.gamma[l][i]);
        s.add(bp.beta_cem[l]);  // gamma at the cemetery is 1 at every layer
        dev = std::max(dev, std::fabs(s.value() - fw.bc0));
    }
    return dev;
}

double hellinger_distance(const LayeredMP& a, const LayeredMP& b) {
    return hellinger_backward(a, b).h0();
}

ConditionedSurvival conditioned_survival(const LayeredMP& a, const LayeredMP& b) {
    a.validate();
    b.validate();
    require_same_graph(a, b);
    int top = a.layer_count();

    auto survival = [&](const LayeredMP& mp) {
        std::vector<Vec> h(top + 1);
        h[0].assign(mp.states[0].size(), 1.0);
        for (int l = 1; l <= top; ++l) {
            h[l].assign(mp.states[l].size(), 0.0);
            for (size_t i = 0; i < mp.states[l].size(); ++i) {
                double s = 0.0;
                for (size_t c = 0; c + 1 < mp.rows[l][i].size(); ++c)
                    s += mp.rows[l][i][c + 1] * h[l - 1][c];
                h[l][i] = s;
            }
        }
        return h;
    };
    std::vector<Vec> ha = survival(a);
    std::vector<Vec> hb = survival(b);

    ConditionedSurvival out;
    out.z_a = ha[top][a.start];
    out.z_b = hb[top][b.start];
    if (out.z_a <= 0.0) throw ConfigError("conditioned_survival: no surviving mass in model A");
    if (out.z_b <= 0.0) throw ConfigError("conditioned_survival: no surviving mass in model B");

    // Backward pass with the Doob-conditioned geometric kernel on ordinary
    // states. States with zero survival in either model receive no mass.
    std::vector<Vec> beta(top + 1);
    beta[top].assign(a.states[top].size(), 0.0);
    beta[top][a.start] = 1.0;
    for (int l = top; l >= 1; --l) {
        size_t prev = a.states[l - 1].size();
        std::vector<KahanSum> acc(prev);
        for (size_t i = 0; i < a.states[l].size(); ++i) {
            double m = beta[l][i];
            if (m == 0.0 || ha[l][i] <= 0.0 || hb[l][i] <= 0.0) continue;
            double denom = geom(ha[l][i], hb[l][i]);
            const Vec& ra = a.rows[l][i];
            const Vec& rb = b.rows[l][i];
            for (size_t c = 0; c < prev; ++c) {
                double g = geom(ra[c + 1], rb[c + 1]);
                if (g <= 0.0) continue;
                double num = geom(ha[l - 1][c], hb[l - 1][c]);
                if (num <= 0.0) continue;
                acc[c].add(m * g * num / denom);
            }
        }
        beta[l - 1].resize(prev);
        for (size_t c = 0; c < prev; ++c) beta[l - 1][c] = acc[c].value();
    }
    KahanSum bc;
    for (double v : beta[0]) bc.add(v);
    out.bc_surv = bc.value();
    out.h_surv = clamped_sqrt_1m(out.bc_surv);

    HellingerResult base = hellinger_backward(a, b);
    out.h_surv_posthoc = clamped_sqrt_1m(base.bc0_ord / std::sqrt(out.z_a * out.z_b));
    out.route_gap = std::fabs((1.0 - out.bc_surv) -
                              (1.0 - base.bc0_ord / std::sqrt(out.z_a * out.z_b)));

    MarginalPass ma = marginal_pass(a);
    MarginalPass mb = marginal_pass(b);
    size_t t = a.states[0].size();
    out.alpha0_surv_a.resize(t);
    out.alpha0_surv_b.resize(t);
    out.h2_surv.resize(t);
    for (size_t s = 0; s < t; ++s) {
        out.alpha0_surv_a[s] = ma.alpha[0][s] / out.z_a;
        out.alpha0_surv_b[s] = mb.alpha[0][s] / out.z_b;
        out.h2_surv[s] = 0.5 * (out.alpha0_surv_a[s] + out.alpha0_surv_b[s]) - beta[0][s];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Permutation search

LayeredMP permute_mp(const LayeredMP& b, const std::vector<std::vector<int>>& perms) {
    int top = b.layer_count();
    if (static_cast<int>(perms.size()) != top + 1)
        throw ConfigError("permute_mp: need one permutation per layer");
    // Position maps: where does state index i of the permuted process find its
    // data in b? Permuting neurons by pi sends b's state (n, t) to (pi[n], t).
    std::vector<std::vector<int>> from(top + 1);
    for (int l = 0; l <= top; ++l) {
        const auto& st = b.states[l];
        std::map<std::pair<int, int>, int> index;
        for (size_t i = 0; i < st.size(); ++i) index[{st[i].neuron, st[i].tag}] = static_cast<int>(i);
        from[l].resize(st.size());
        for (size_t i = 0; i < st.size(); ++i) {
            int n = st[i].neuron;
            if (n >= static_cast<int>(perms[l].size()))
                throw ConfigError("permute_mp: permutation too short at layer " + std::to_string(l));
            // the state that lands at label (n, t) is b's (pi^{-1}(n), t)
            int src = -1;
            for (size_t m = 0; m < perms[l].size(); ++m)
                if (perms[l][m] == n) src = static_cast<int>(m);
            auto it = index.find({src, st[i].tag});
            if (src < 0 || it == index.end())
                throw ConfigError("permute_mp: permutation does not preserve the label set");
            from[l][i] = it->second;
        }
    }
    LayeredMP out;
    out.states = b.states;
    out.rows.resize(b.rows.size());
    out.start = b.start;  // start layer uses the identity permutation
    for (int l = 1; l <= top; ++l) {
        out.rows[l].resize(b.rows[l].size());
        for (size_t i = 0; i < b.rows[l].size(); ++i) {
            const Vec& src = b.rows[l][from[l][i]];
            Vec row(src.size());
            row[0] = src[0];
            for (size_t c = 0; c + 1 < src.size(); ++c) row[c + 1] = src[from[l - 1][c] + 1];
            out.rows[l][i] = std::move(row);
        }
    }
    return out;
}

PermSearch perm_invariant_hellinger(const LayeredMP& a, const LayeredMP& b,
                                    int max_states_per_layer) {
    a.validate();
    b.validate();
    require_same_graph(a, b);
    int top = a.layer_count();
    for (int l = 0; l <= top; ++l)
        if (static_cast<int>(a.states[l].size()) > max_states_per_layer)
            throw GuardError("perm_invariant_hellinger: layer " + std::to_string(l) + " has " +
                             std::to_string(a.states[l].size()) + " states, over the limit of " +
                             std::to_string(max_states_per_layer));

    // Neuron id sets per layer; hidden layers 1..top-1 are permutable.
    std::vector<std::vector<int>> neurons(top + 1);
    for (int l = 0; l <= top; ++l) {
        for (const MPState& s : a.states[l])
            if (std::find(neurons[l].begin(), neurons[l].end(), s.neuron) == neurons[l].end())
                neurons[l].push_back(s.neuron);
        std::sort(neurons[l].begin(), neurons[l].end());
    }

    std::vector<std::vector<int>> identity(top + 1);
    for (int l = 0; l <= top; ++l) {
        int n = neurons[l].empty() ? 0 : neurons[l].back() + 1;
        identity[l].resize(n);
        std::iota(identity[l].begin(), identity[l].end(), 0);
    }

    PermSearch best;
    best.h_perm = hellinger_distance(a, b);
    best.perms = identity;

    std::vector<std::vector<int>> current = identity;
    std::vector<int> layer_order;
    for (int l = 1; l < top; ++l)
        if (neurons[l].size() > 1) layer_order.push_back(l);

    std::function<void(size_t)> search = [&](size_t k) {
        if (k == layer_order.size()) {
            double h = hellinger_distance(a, permute_mp(b, current));
            if (h < best.h_perm) {
                best.h_perm = h;
                best.perms = current;
            }
            return;
        }
        int l = layer_order[k];
        std::vector<int> perm = neurons[l];
        do {
            for (size_t i = 0; i < perm.size(); ++i) current[l][neurons[l][i]] = perm[i];
            search(k + 1);
        } while (std::next_permutation(perm.begin(), perm.end()));
        for (int n : neurons[l]) current[l][n] = n;
    };
    search(0);
    return best;
}

LayeredMP random_mp(const std::vector<int>& widths, std::uint64_t seed, double cemetery_weight) {
    if (widths.size() < 2) throw ConfigError("random_mp: need at least two layers");
    std::mt19937_64 rng = substream(seed, "random-mp");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LayeredMP mp;
    int top = static_cast<int>(widths.size()) - 1;
    mp.states.resize(top + 1);
    mp.rows.resize(top + 1);
    for (int l = 0; l <= top; ++l)
        for (int i = 0; i < widths[l]; ++i) mp.states[l].push_back({i, 0});
    for (int l = 1; l <= top; ++l) {
        mp.rows[l].resize(widths[l]);
        for (int i = 0; i < widths[l]; ++i) {
            Vec row(widths[l - 1] + 1, 0.0);
            double s = 0.0;
            row[0] = cemetery_weight * u(rng);
            s += row[0];
            for (int c = 0; c < widths[l - 1]; ++c) {
                row[c + 1] = u(rng);
                s += row[c + 1];
            }
            for (double& p : row) p /= s;
            mp.rows[l][i] = std::move(row);
        }
    }
    mp.start = 0;
    mp.validate();
    return mp;
}

}  // namespace attrgame
