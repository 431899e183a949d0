#include "attrgame/rand_harness.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "attrgame/errors.hpp"
#include "attrgame/rng.hpp"

namespace attrgame {

NetSpec cascade_randomize(const NetSpec& net, int depth, std::uint64_t seed) {
    net.validate();
    std::vector<int> dense_layers;
    for (size_t i = 0; i < net.layers.size(); ++i)
        if (net.layers[i].is_dense()) dense_layers.push_back(static_cast<int>(i));
    if (depth < 0 || depth > static_cast<int>(dense_layers.size()))
        throw ConfigError("cascade_randomize: depth out of range");
    NetSpec out = net;
    for (int k = 0; k < depth; ++k) {
        int li = dense_layers[dense_layers.size() - 1 - k];
        DenseLayer& d = std::get<DenseLayer>(out.layers[li].node);
        std::mt19937_64 rng = substream(seed, "cascade", static_cast<std::uint64_t>(li));
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / d.w.cols));
        for (double& w : d.w.data) w = dist(rng);
        for (double& b : d.b) b = 0.0;
    }
    return out;
}

namespace {

struct Cell {
    double h = 0.0;
    double bc = 0.0;
    double hsurv = 0.0;
    bool has_surv = false;
};

Cell compare_mps(const LayeredMP& a, const LayeredMP& b) {
    Cell c;
    HellingerResult hr = hellinger_backward(a, b);
    c.h = hr.h0();
    c.bc = hr.bc.front();
    if (hr.z_a > 0.0 && hr.z_b > 0.0) {
        c.hsurv = conditioned_survival(a, b).h_surv;
        c.has_surv = true;
    }
    return c;
}

SweepRow aggregate(int step, const std::string& layer, const std::string& game,
                   const std::vector<Cell>& cells) {
    SweepRow r;
    r.step = step;
    r.layer = layer;
    r.game = game;
    r.cells = static_cast<int>(cells.size());
    double hs = 0.0, hs2 = 0.0, bcs = 0.0, sv = 0.0, sv2 = 0.0;
    for (const Cell& c : cells) {
        hs += c.h;
        hs2 += c.h * c.h;
        bcs += c.bc;
        if (c.has_surv) {
            ++r.surv_cells;
            sv += c.hsurv;
            sv2 += c.hsurv * c.hsurv;
        }
    }
    int n = r.cells;
    r.h_mean = hs / n;
    r.h_std = n > 1 ? std::sqrt(std::max(0.0, hs2 / n - r.h_mean * r.h_mean)) : 0.0;
    r.bc_mean = bcs / n;
    if (r.surv_cells > 0) {
        r.hsurv_mean = sv / r.surv_cells;
        r.hsurv_std = r.surv_cells > 1
                          ? std::sqrt(std::max(0.0, sv2 / r.surv_cells - r.hsurv_mean * r.hsurv_mean))
                          : 0.0;
    } else {
        r.hsurv_mean = std::nan("");
        r.hsurv_std = std::nan("");
    }
    return r;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void SweepResult::write_csv(std::ostream& os) const {
    os << "step,layer,game,H_mean,H_std,Hsurv_mean,Hsurv_std\n";
    for (const SweepRow& r : rows)
        os << r.step << "," << r.layer << "," << r.game << "," << fmt17(r.h_mean) << ","
           << fmt17(r.h_std) << "," << fmt17(r.hsurv_mean) << "," << fmt17(r.hsurv_std) << "\n";
}

SweepResult randomization_sweep(const NetSpec& net, const std::vector<Vec>& inputs,
                                const RGConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                RunMode mode) {
    if (inputs.empty() || seeds.empty())
        throw ConfigError("randomization_sweep: need at least one input and one seed");
    std::vector<int> dense_layers;
    for (size_t i = 0; i < net.layers.size(); ++i)
        if (net.layers[i].is_dense()) dense_layers.push_back(static_cast<int>(i));
    int depths = static_cast<int>(dense_layers.size());

    int per_depth = static_cast<int>(inputs.size() * seeds.size());
    SweepResult out;
    for (int depth = 0; depth <= depths; ++depth) {
        std::vector<Cell> sg_cells(per_depth), rg_cells(per_depth);
        for_each_cell(per_depth, mode, [&](int cell) {
            int ii = cell % static_cast<int>(inputs.size());
            int si = cell / static_cast<int>(inputs.size());
            NetSpec randomized = cascade_randomize(net, depth, seeds[si]);
            const Vec& x = inputs[ii];
            sg_cells[cell] = compare_mps(sg_trajectory_mp(net, x), sg_trajectory_mp(randomized, x));
            rg_cells[cell] =
                compare_mps(rg_trajectory_mp(net, x, cfg), rg_trajectory_mp(randomized, x, cfg));
        });
        std::string layer = depth == 0
                                ? std::string("-")
                                : "dense" + std::to_string(dense_layers[depths - depth]);
        out.rows.push_back(aggregate(depth, layer, "sg", sg_cells));
        out.rows.push_back(aggregate(depth, layer, "rg", rg_cells));
    }
    return out;
}

SweepResult input_noise_sweep(const NetSpec& net, const Vec& x, const std::vector<double>& sigmas,
                              const RGConfig& cfg, std::uint64_t seed, int draws, RunMode mode) {
    if (draws < 1) throw ConfigError("input_noise_sweep: draws must be >= 1");
    LayeredMP sg_base = sg_trajectory_mp(net, x);
    LayeredMP rg_base = rg_trajectory_mp(net, x, cfg);
    SweepResult out;
    for (size_t si = 0; si < sigmas.size(); ++si) {
        double sigma = sigmas[si];
        if (sigma < 0.0) throw ConfigError("input_noise_sweep: sigma must be >= 0");
        std::vector<Cell> sg_cells(draws), rg_cells(draws);
        for_each_cell(draws, mode, [&](int r) {
            std::mt19937_64 rng = substream(seed, "input-noise", si * 1000 + r);
            std::normal_distribution<double> dist(0.0, 1.0);
            Vec xp = x;
            for (double& v : xp) v += sigma * dist(rng);
            sg_cells[r] = compare_mps(sg_base, sg_trajectory_mp(net, xp));
            rg_cells[r] = compare_mps(rg_base, rg_trajectory_mp(net, xp, cfg));
        });
        char label[32];
        std::snprintf(label, sizeof label, "sigma=%g", sigma);
        out.rows.push_back(aggregate(static_cast<int>(si), label, "sg", sg_cells));
        out.rows.push_back(aggregate(static_cast<int>(si), label, "rg", rg_cells));
    }
    return out;
}

CemeteryFloor cemetery_floor(double q, double p, double delta, int n_layers) {
    if (q < 0.0 || q > 1.0 || p < 0.0 || p > 1.0)
        throw ConfigError("cemetery_floor: q and p must lie in [0, 1]");
    if (delta <= 0.0 || delta >= 1.0) throw ConfigError("cemetery_floor: delta must lie in (0, 1)");
    if (n_layers < 1) throw ConfigError("cemetery_floor: N must be >= 1");
    double d = q * (1.0 - p);
    double kappa = (1.0 - delta) * (1.0 - d);
    CemeteryFloor out;
    double kn = std::pow(kappa, n_layers);
    out.c0 = kappa == 1.0 ? d * n_layers : d * (1.0 - kn) / (1.0 - kappa);
    out.f0_bound = kn;
    out.bc_bound = out.c0 + out.f0_bound;
    out.asymptote = kappa == 1.0 ? 0.0 : d / (1.0 - kappa);
    return out;
}

std::pair<LayeredMP, LayeredMP> mean_field_floor_mps(double q, double p, double delta,
                                                     int n_layers) {
    double d = q * (1.0 - p);
    double kappa = (1.0 - delta) * (1.0 - d);
    // One live state per layer; pick (u_a, u_b) with u_a u_b = kappa^2 and
    // (1-u_a)(1-u_b) = d^2, so the per-layer ordinary shrink is exactly kappa
    // and the per-layer cemetery gain exactly d.
    double s = 1.0 + kappa * kappa - d * d;
    double disc = s * s - 4.0 * kappa * kappa;
    if (disc < 0.0) disc = 0.0;
    double ua = 0.5 * (s + std::sqrt(disc));
    double ub = kappa * kappa / std::max(ua, 1e-300);
    auto chain = [&](double u) {
        LayeredMP mp;
        mp.states.assign(n_layers + 1, {MPState{0, 0}});
        mp.rows.resize(n_layers + 1);
        for (int l = 1; l <= n_layers; ++l) mp.rows[l] = {Vec{1.0 - u, u}};
        mp.start = 0;
        mp.validate();
        return mp;
    };
    return {chain(ua), chain(ub)};
}

}  // namespace attrgame
