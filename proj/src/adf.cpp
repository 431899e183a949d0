#include "attrgame/adf.hpp"

#include <cmath>

#include "attrgame/errors.hpp"
#include "attrgame/gauss.hpp"

namespace attrgame {

MomentField adf_forward(const NetSpec& net, const Vec& x, double sigma2) {
    if (sigma2 < 0.0) throw ConfigError("adf_forward: sigma2 must be >= 0");
    net.validate();
    if (static_cast<int>(x.size()) != net.input_dim)
        throw SchemaError("adf_forward: input length != input_dim");

    ForwardTrace tr = forward(net, x);  // winners and detached attention rows
    MomentField f;
    int nn = net.node_count();
    f.mu.resize(nn);
    f.var.resize(nn);
    f.mu[0] = x;
    f.var[0].assign(x.size(), sigma2);

    for (int n = 1; n < nn; ++n) {
        const LayerSpec& l = net.layers[n - 1];
        if (l.is_dense()) {
            const DenseLayer& d = l.dense();
            int out = d.w.rows;
            f.mu[n].assign(out, 0.0);
            f.var[n].assign(out, 0.0);
            for (int i = 0; i < out; ++i) {
                double m = d.b[i], v = 0.0;
                for (int j = 0; j < d.w.cols; ++j) {
                    double w = d.w(i, j);
                    m += w * f.mu[n - 1][j];
                    v += w * w * f.var[n - 1][j];
                }
                // Gaussian moment matching through the gate; Softplus and GELU
                // layers reuse the ReLU closed forms as an approximation.
                auto [am, av] = relu_gaussian_moments(m, v);
                f.mu[n][i] = am;
                f.var[n][i] = av;
            }
        } else if (l.is_add()) {
            int a = l.add().left, b = l.add().right;
            int w = net.width(n);
            f.mu[n].resize(w);
            f.var[n].resize(w);
            for (int i = 0; i < w; ++i) {
                f.mu[n][i] = f.mu[a][i] + f.mu[b][i];
                f.var[n][i] = f.var[a][i] + f.var[b][i];
            }
        } else if (l.is_maxpool()) {
            // winner-take-all: propagate the forward winner's moments
            const auto& groups = l.maxpool().groups;
            f.mu[n].resize(groups.size());
            f.var[n].resize(groups.size());
            for (size_t g = 0; g < groups.size(); ++g) {
                int win = tr.winner[n][g];
                f.mu[n][g] = f.mu[n - 1][win];
                f.var[n][g] = f.var[n - 1][win];
            }
        } else {
            // Attention with detached rows: V projection is linear per token,
            // the AV mixing propagates variance through A o A.
            const AttentionLayer& al = l.attention();
            const Matrix& a = tr.attn->a;
            int s = al.tokens, dim = al.wq.rows, dh = al.d_h;
            Matrix mu_v(s, dh), var_v(s, dh);
            for (int k = 0; k < s; ++k)
                for (int d = 0; d < dh; ++d) {
                    double m = 0.0, v = 0.0;
                    for (int e = 0; e < dim; ++e) {
                        double w = al.wv(e, d);
                        m += w * f.mu[n - 1][static_cast<size_t>(k) * dim + e];
                        v += w * w * f.var[n - 1][static_cast<size_t>(k) * dim + e];
                    }
                    mu_v(k, d) = m;
                    var_v(k, d) = v;
                }
            f.attn_node = n;
            f.attn_key_sigma.assign(s, 0.0);
            for (int k = 0; k < s; ++k) {
                double acc = 0.0;
                for (int d = 0; d < dh; ++d) acc += var_v(k, d);
                f.attn_key_sigma[k] = std::sqrt(acc / dh);
            }
            f.mu[n].assign(static_cast<size_t>(s) * dh, 0.0);
            f.var[n].assign(static_cast<size_t>(s) * dh, 0.0);
            for (int q = 0; q < s; ++q)
                for (int d = 0; d < dh; ++d) {
                    double m = 0.0, v = 0.0;
                    for (int k = 0; k < s; ++k) {
                        m += a(q, k) * mu_v(k, d);
                        v += a(q, k) * a(q, k) * var_v(k, d);
                    }
                    f.mu[n][static_cast<size_t>(q) * dh + d] = m;
                    f.var[n][static_cast<size_t>(q) * dh + d] = v;
                }
        }
    }
    return f;
}

double risk_value(double mu, double v, double lambda) {
    if (lambda > 0.0) throw ConfigError("risk_value: lambda must be <= 0");
    if (v < 0.0) throw ConfigError("risk_value: variance must be >= 0");
    double r = mu + lambda * std::sqrt(v);
    return r > 0.0 ? r : 0.0;
}

}  // namespace attrgame
