#include "attrgame/path_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "attrgame/errors.hpp"

namespace attrgame {

namespace {

void walk(const LayeredMP& mp, int layer, int state, double p, std::vector<int>& steps,
          TrajectoryList& out, std::uint64_t guard) {
    if (layer == 0) {
        out.items.push_back({steps, p});
        out.total += p;
        if (out.items.size() > guard)
            throw GuardError("enumerate_trajectories: more than " + std::to_string(guard) +
                             " trajectories");
        return;
    }
    const Vec& row = mp.rows[layer][state];
    if (row[0] > 0.0) {
        steps.push_back(-1);
        out.items.push_back({steps, p * row[0]});
        out.total += p * row[0];
        steps.pop_back();
        if (out.items.size() > guard)
            throw GuardError("enumerate_trajectories: more than " + std::to_string(guard) +
                             " trajectories");
    }
    for (size_t c = 0; c + 1 < row.size(); ++c) {
        if (row[c + 1] == 0.0) continue;
        steps.push_back(static_cast<int>(c));
        walk(mp, layer - 1, static_cast<int>(c), p * row[c + 1], steps, out, guard);
        steps.pop_back();
    }
}

}  // namespace

TrajectoryList enumerate_trajectories(const LayeredMP& mp, std::uint64_t guard) {
    mp.validate();
    TrajectoryList out;
    std::vector<int> steps{mp.start};
    walk(mp, mp.layer_count(), mp.start, 1.0, steps, out, guard);
    return out;
}

double oracle_bc(const LayeredMP& a, const LayeredMP& b, std::uint64_t guard) {
    require_same_graph(a, b);
    TrajectoryList ta = enumerate_trajectories(a, guard);
    TrajectoryList tb = enumerate_trajectories(b, guard);
    std::map<std::vector<int>, double> pa;
    for (const Trajectory& t : ta.items) pa[t.steps] += t.p;
    KahanSum bc;
    for (const Trajectory& t : tb.items) {
        auto it = pa.find(t.steps);
        if (it != pa.end()) bc.add(std::sqrt(it->second * t.p));
    }
    return bc.value();
}

double oracle_tv(const LayeredMP& a, const LayeredMP& b, std::uint64_t guard) {
    require_same_graph(a, b);
    TrajectoryList ta = enumerate_trajectories(a, guard);
    TrajectoryList tb = enumerate_trajectories(b, guard);
    std::map<std::vector<int>, std::pair<double, double>> u;
    for (const Trajectory& t : ta.items) u[t.steps].first += t.p;
    for (const Trajectory& t : tb.items) u[t.steps].second += t.p;
    KahanSum tv;
    for (const auto& [k, pq] : u) tv.add(std::fabs(pq.first - pq.second));
    return 0.5 * tv.value();
}

std::map<std::pair<int, int>, double> oracle_occupation(const LayeredMP& mp,
                                                        const EdgeDiscount& discount,
                                                        std::uint64_t guard) {
    TrajectoryList list = enumerate_trajectories(mp, guard);
    int top = mp.layer_count();
    std::map<std::pair<int, int>, double> gamma;
    for (const Trajectory& t : list.items) {
        double d = 1.0;
        for (size_t k = 0; k < t.steps.size(); ++k) {
            int layer = top - static_cast<int>(k);
            int s = t.steps[k];
            if (s < 0) break;  // cemetery states carry no occupation
            gamma[{layer, s}] += t.p * d;
            if (layer >= 1 && k + 1 < t.steps.size()) d *= discount(layer, s, t.steps[k + 1]);
        }
    }
    return gamma;
}

std::pair<double, double> parity_path_sum(const NetSpec& net, const Vec& x, int node, int neuron,
                                          std::uint64_t guard) {
    net.validate();
    for (const LayerSpec& l : net.layers) {
        if (!l.is_dense()) throw ConfigError("parity_path_sum: dense chains only");
        if (l.dense().act.kind != Activation::ReLU)
            throw ConfigError("parity_path_sum: ReLU nets only");
    }
    if (!net.bias_free()) throw ConfigError("parity_path_sum: bias-free nets only");
    if (node < 1 || node > net.out_node()) throw ConfigError("parity_path_sum: bad node index");
    if (neuron < 0 || neuron >= net.width(node)) throw ConfigError("parity_path_sum: bad neuron");

    std::uint64_t paths = 1;
    for (int l = node; l >= 1; --l) {
        paths *= static_cast<std::uint64_t>(net.width(l - 1));
        if (paths > guard)
            throw GuardError("parity_path_sum: path count exceeds the guard");
    }

    ForwardTrace tr = forward(net, x);
    double zp = 0.0, zm = 0.0;
    // Depth-first over backward paths, tracking |w| product, the parity of
    // negative edges, and the gate factor over intermediate layers.
    std::function<void(int, int, double, int)> dfs = [&](int layer, int idx, double wprod,
                                                         int parity) {
        if (layer == 0) {
            double part = parity == 0 ? std::max(x[idx], 0.0) : std::max(-x[idx], 0.0);
            double other = parity == 0 ? std::max(-x[idx], 0.0) : std::max(x[idx], 0.0);
            zp += wprod * part;
            zm += wprod * other;
            return;
        }
        if (layer < node && tr.pre_act[layer][idx] <= 0.0) return;  // closed gate
        const Matrix& w = net.layers[layer - 1].dense().w;
        for (int j = 0; j < w.cols; ++j) {
            double wij = w(idx, j);
            if (wij == 0.0) continue;
            dfs(layer - 1, j, wprod * std::fabs(wij), wij < 0.0 ? 1 - parity : parity);
        }
    };
    dfs(node, neuron, 1.0, 0);
    return {zp, zm};
}

bool fd_boundary_ok(const NetSpec& net, const Vec& x, double h) {
    ForwardTrace tr = forward(net, x);
    for (int n = 1; n < net.node_count(); ++n) {
        const LayerSpec& l = net.layers[n - 1];
        if (l.is_dense() && l.dense().act.kind == Activation::ReLU) {
            for (double z : tr.pre_act[n])
                if (std::fabs(z) <= 10.0 * h) return false;
        } else if (l.is_maxpool()) {
            const Vec& in = tr.node_out[n - 1];
            for (const auto& g : l.maxpool().groups) {
                if (g.size() < 2) continue;
                double top = -1e300, second = -1e300;
                for (int idx : g) {
                    if (in[idx] > top) {
                        second = top;
                        top = in[idx];
                    } else {
                        second = std::max(second, in[idx]);
                    }
                }
                if (top - second <= 10.0 * h) return false;
            }
        }
    }
    return true;
}

Vec finite_diff_gradient(const NetSpec& net, const Vec& x, double h) {
    if (!(h > 0.0)) throw ConfigError("finite_diff_gradient: h must be > 0");
    if (!fd_boundary_ok(net, x, h))
        throw GuardError("finite_diff_gradient: input too close to a gate boundary; resample");
    Vec g(x.size());
    for (size_t k = 0; k < x.size(); ++k) {
        Vec xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        g[k] = (forward(net, xp).output - forward(net, xm).output) / (2.0 * h);
    }
    return g;
}

}  // namespace attrgame
