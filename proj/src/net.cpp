#include "attrgame/net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "attrgame/errors.hpp"
#include "attrgame/gauss.hpp"
#include "attrgame/rng.hpp"

namespace attrgame {

int NetSpec::width(int n) const {
    if (n == 0) return input_dim;
    const LayerSpec& l = layers[n - 1];
    if (l.is_dense()) return l.dense().w.rows;
    if (l.is_add()) return width(l.add().left);
    if (l.is_maxpool()) return static_cast<int>(l.maxpool().groups.size());
    const AttentionLayer& a = l.attention();
    return a.tokens * a.d_h;
}

std::vector<int> NetSpec::inputs_of(int n) const {
    const LayerSpec& l = layers[n - 1];
    if (l.is_add()) return {l.add().left, l.add().right};
    return {n - 1};
}

bool NetSpec::has_attention() const {
    for (const auto& l : layers)
        if (l.is_attention()) return true;
    return false;
}

bool NetSpec::all_dense_relu() const {
    for (const auto& l : layers)
        if (l.is_dense() && l.dense().act.kind != Activation::ReLU) return false;
    return true;
}

bool NetSpec::bias_free() const {
    for (const auto& l : layers)
        if (l.is_dense())
            for (double b : l.dense().b)
                if (b != 0.0) return false;
    return true;
}

void NetSpec::validate() const {
    if (input_dim <= 0) throw SchemaError("/input_dim: must be a positive integer");
    int attn_count = 0;
    for (int n = 1; n <= out_node(); ++n) {
        const LayerSpec& l = layers[n - 1];
        std::string at = "/layers/" + std::to_string(n - 1);
        if (l.is_dense()) {
            const DenseLayer& d = l.dense();
            if (d.w.rows <= 0 || d.w.cols != width(n - 1))
                throw SchemaError(at + "/W: shape " + std::to_string(d.w.rows) + "x" +
                                  std::to_string(d.w.cols) + " incompatible with producer width " +
                                  std::to_string(width(n - 1)));
            if (static_cast<int>(d.b.size()) != d.w.rows)
                throw SchemaError(at + "/b: length must equal the layer's output width");
            if (!all_finite(d.w) || !all_finite(d.b))
                throw SchemaError(at + ": non-finite weight or bias");
            if (d.act.kind == Activation::Softplus && !(d.act.theta > 0.0))
                throw SchemaError(at + "/activation/softplus: theta must be > 0");
        } else if (l.is_add()) {
            const ResidualAddLayer& a = l.add();
            if (a.left < 0 || a.right < 0 || a.left >= n || a.right >= n)
                throw SchemaError(at + ": residual_add must reference upstream nodes");
            if (width(a.left) != width(a.right))
                throw SchemaError(at + ": residual_add operands must have equal width");
        } else if (l.is_maxpool()) {
            int in = width(n - 1);
            std::vector<int> seen(in, 0);
            if (l.maxpool().groups.empty()) throw SchemaError(at + "/groups: empty");
            for (const auto& g : l.maxpool().groups) {
                if (g.empty()) throw SchemaError(at + "/groups: empty group");
                for (int idx : g) {
                    if (idx < 0 || idx >= in)
                        throw SchemaError(at + "/groups: index " + std::to_string(idx) +
                                          " out of range for width " + std::to_string(in));
                    if (seen[idx]++)
                        throw SchemaError(at + "/groups: index " + std::to_string(idx) +
                                          " appears twice; groups must partition the input");
                }
            }
            for (int i = 0; i < in; ++i)
                if (!seen[i])
                    throw SchemaError(at + "/groups: index " + std::to_string(i) +
                                      " missing; groups must partition the input");
        } else {
            const AttentionLayer& a = l.attention();
            ++attn_count;
            if (a.tokens < 1 || a.d_h < 1) throw SchemaError(at + ": tokens and d_h must be >= 1");
            int dim = a.wq.rows;
            if (a.wq.cols != a.d_h || a.wk.cols != a.d_h || a.wv.cols != a.d_h ||
                a.wk.rows != dim || a.wv.rows != dim)
                throw SchemaError(at + ": WQ/WK/WV must all be D x d_h");
            if (!all_finite(a.wq) || !all_finite(a.wk) || !all_finite(a.wv))
                throw SchemaError(at + ": non-finite projection matrix");
            if (width(n - 1) != a.tokens * dim)
                throw SchemaError(at + ": producer width " + std::to_string(width(n - 1)) +
                                  " != tokens*D = " + std::to_string(a.tokens * dim));
        }
    }
    if (attn_count > 1) throw SchemaError("/layers: at most one attention block is supported");
    if (layers.empty()) throw SchemaError("/layers: at least one layer required");
    if (output_neuron < 0 || output_neuron >= width(out_node()))
        throw SchemaError("/output_neuron: out of range for the final layer");
}

double activation_value(const ActivationKind& act, double z) {
    switch (act.kind) {
        case Activation::ReLU:
            return z > 0.0 ? z : 0.0;
        case Activation::Softplus:
            return softplus_theta(z, act.theta);
        case Activation::Gelu:
            return smoothed_relu(z);
    }
    return 0.0;
}

ForwardTrace forward(const NetSpec& net, const Vec& x) {
    net.validate();
    if (static_cast<int>(x.size()) != net.input_dim)
        throw SchemaError("input: length " + std::to_string(x.size()) + " != input_dim " +
                          std::to_string(net.input_dim));
    if (!all_finite(x)) throw SchemaError("input: non-finite entry");

    ForwardTrace t;
    int nn = net.node_count();
    t.node_out.resize(nn);
    t.pre_act.resize(nn);
    t.winner.resize(nn);
    t.node_out[0] = x;

    for (int n = 1; n < nn; ++n) {
        const LayerSpec& l = net.layers[n - 1];
        if (l.is_dense()) {
            const DenseLayer& d = l.dense();
            Vec z = matvec(d.w, t.node_out[n - 1]);
            for (size_t i = 0; i < z.size(); ++i) z[i] += d.b[i];
            Vec a(z.size());
            for (size_t i = 0; i < z.size(); ++i) a[i] = activation_value(d.act, z[i]);
            t.pre_act[n] = std::move(z);
            t.node_out[n] = std::move(a);
        } else if (l.is_add()) {
            const Vec& u = t.node_out[l.add().left];
            const Vec& v = t.node_out[l.add().right];
            Vec out(u.size());
            for (size_t i = 0; i < u.size(); ++i) out[i] = u[i] + v[i];
            t.node_out[n] = std::move(out);
        } else if (l.is_maxpool()) {
            const Vec& in = t.node_out[n - 1];
            const auto& groups = l.maxpool().groups;
            Vec out(groups.size());
            std::vector<int> win(groups.size());
            for (size_t g = 0; g < groups.size(); ++g) {
                int best = groups[g][0];
                for (int idx : groups[g])
                    if (in[idx] > in[best]) best = idx;  // smallest index wins ties
                out[g] = in[best];
                win[g] = best;
            }
            t.node_out[n] = std::move(out);
            t.winner[n] = std::move(win);
        } else {
            const AttentionLayer& al = l.attention();
            int s = al.tokens, dim = al.wq.rows, dh = al.d_h;
            const Vec& in = t.node_out[n - 1];
            AttnTrace at;
            at.x = Matrix(s, dim);
            for (int k = 0; k < s; ++k)
                for (int e = 0; e < dim; ++e) at.x(k, e) = in[static_cast<size_t>(k) * dim + e];
            Matrix q(s, dh), kk(s, dh);
            at.v = Matrix(s, dh);
            for (int k = 0; k < s; ++k)
                for (int d = 0; d < dh; ++d) {
                    double sq = 0, sk = 0, sv = 0;
                    for (int e = 0; e < dim; ++e) {
                        sq += at.x(k, e) * al.wq(e, d);
                        sk += at.x(k, e) * al.wk(e, d);
                        sv += at.x(k, e) * al.wv(e, d);
                    }
                    q(k, d) = sq;
                    kk(k, d) = sk;
                    at.v(k, d) = sv;
                }
            at.logits = Matrix(s, s);
            double scale = 1.0 / std::sqrt(static_cast<double>(dh));
            for (int qi = 0; qi < s; ++qi)
                for (int ki = 0; ki < s; ++ki) {
                    double e = 0;
                    for (int d = 0; d < dh; ++d) e += q(qi, d) * kk(ki, d);
                    at.logits(qi, ki) = e * scale;
                }
            at.a = Matrix(s, s);
            for (int qi = 0; qi < s; ++qi) {
                double m = at.logits(qi, 0);
                for (int ki = 1; ki < s; ++ki) m = std::max(m, at.logits(qi, ki));
                double z = 0;
                for (int ki = 0; ki < s; ++ki) {
                    at.a(qi, ki) = std::exp(at.logits(qi, ki) - m);
                    z += at.a(qi, ki);
                }
                for (int ki = 0; ki < s; ++ki) at.a(qi, ki) /= z;
            }
            Vec out(static_cast<size_t>(s) * dh, 0.0);
            for (int qi = 0; qi < s; ++qi)
                for (int d = 0; d < dh; ++d) {
                    double o = 0;
                    for (int ki = 0; ki < s; ++ki) o += at.a(qi, ki) * at.v(ki, d);
                    out[static_cast<size_t>(qi) * dh + d] = o;
                }
            t.attn = std::move(at);
            t.attn_node = n;
            t.node_out[n] = std::move(out);
        }
    }
    t.output = t.node_out[nn - 1][net.output_neuron];
    return t;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw SchemaError(path + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) fail(path + "/" + key, "missing required field");
    return j.at(key);
}

int need_int(const json& j, const char* key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_number_integer()) fail(path + "/" + key, "expected an integer");
    return v.get<int>();
}

double need_num(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

Vec read_vec(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    Vec out;
    out.reserve(v.size());
    for (size_t i = 0; i < v.size(); ++i) out.push_back(need_num(v[i], path + "/" + std::to_string(i)));
    return out;
}

Matrix read_matrix(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of rows");
    Matrix m;
    m.rows = static_cast<int>(v.size());
    Vec first = read_vec(v[0], path + "/0");
    m.cols = static_cast<int>(first.size());
    if (m.cols == 0) fail(path + "/0", "rows must be non-empty");
    m.data = std::move(first);
    for (int r = 1; r < m.rows; ++r) {
        Vec row = read_vec(v[r], path + "/" + std::to_string(r));
        if (static_cast<int>(row.size()) != m.cols)
            fail(path + "/" + std::to_string(r), "ragged matrix row");
        m.data.insert(m.data.end(), row.begin(), row.end());
    }
    return m;
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& path) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) fail(path + "/" + it.key(), "unknown field");
    }
}

ActivationKind read_activation(const json& v, const std::string& path) {
    ActivationKind act;
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s == "relu") act.kind = Activation::ReLU;
        else if (s == "gelu") act.kind = Activation::Gelu;
        else fail(path, "unknown activation '" + s + "'");
        return act;
    }
    if (v.is_object() && v.contains("softplus") && v.size() == 1) {
        act.kind = Activation::Softplus;
        act.theta = need_num(v.at("softplus"), path + "/softplus");
        if (!(act.theta > 0.0)) fail(path + "/softplus", "theta must be > 0");
        return act;
    }
    fail(path, "expected \"relu\", \"gelu\" or {\"softplus\": theta}");
}

json activation_to_json(const ActivationKind& act) {
    switch (act.kind) {
        case Activation::ReLU:
            return "relu";
        case Activation::Gelu:
            return "gelu";
        case Activation::Softplus:
            return json{{"softplus", act.theta}};
    }
    return "relu";
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows; ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols; ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

NetSpec net_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail("", "expected a JSON object");
    reject_unknown(j, {"input_dim", "output_neuron", "layers"}, "");
    NetSpec net;
    net.input_dim = need_int(j, "input_dim", "");
    net.output_neuron = need_int(j, "output_neuron", "");
    const json& layers = need(j, "layers", "");
    if (!layers.is_array()) fail("/layers", "expected an array");
    for (size_t li = 0; li < layers.size(); ++li) {
        const json& l = layers[li];
        std::string at = "/layers/" + std::to_string(li);
        if (!l.is_object()) fail(at, "expected an object");
        std::string kind = need(l, "kind", at).is_string() ? l.at("kind").get<std::string>() : "";
        if (kind.empty()) fail(at + "/kind", "expected a string");
        LayerSpec spec;
        if (kind == "dense") {
            reject_unknown(l, {"kind", "W", "b", "activation"}, at);
            DenseLayer d;
            d.w = read_matrix(need(l, "W", at), at + "/W");
            d.b = read_vec(need(l, "b", at), at + "/b");
            d.act = read_activation(need(l, "activation", at), at + "/activation");
            spec.node = std::move(d);
        } else if (kind == "residual_add") {
            reject_unknown(l, {"kind", "left", "right"}, at);
            ResidualAddLayer a;
            a.left = need_int(l, "left", at);
            a.right = need_int(l, "right", at);
            spec.node = a;
        } else if (kind == "max_pool") {
            reject_unknown(l, {"kind", "groups"}, at);
            const json& gs = need(l, "groups", at);
            if (!gs.is_array()) fail(at + "/groups", "expected an array of index arrays");
            MaxPoolLayer mp;
            for (size_t gi = 0; gi < gs.size(); ++gi) {
                const json& g = gs[gi];
                std::string gp = at + "/groups/" + std::to_string(gi);
                if (!g.is_array()) fail(gp, "expected an index array");
                std::vector<int> idx;
                for (size_t k = 0; k < g.size(); ++k) {
                    if (!g[k].is_number_integer()) fail(gp + "/" + std::to_string(k), "expected an integer");
                    idx.push_back(g[k].get<int>());
                }
                mp.groups.push_back(std::move(idx));
            }
            spec.node = std::move(mp);
        } else if (kind == "attention") {
            reject_unknown(l, {"kind", "WQ", "WK", "WV", "d_h", "tokens"}, at);
            AttentionLayer a;
            a.wq = read_matrix(need(l, "WQ", at), at + "/WQ");
            a.wk = read_matrix(need(l, "WK", at), at + "/WK");
            a.wv = read_matrix(need(l, "WV", at), at + "/WV");
            a.d_h = need_int(l, "d_h", at);
            a.tokens = need_int(l, "tokens", at);
            spec.node = std::move(a);
        } else {
            fail(at + "/kind", "unknown layer kind '" + kind + "'");
        }
        net.layers.push_back(std::move(spec));
    }
    net.validate();
    return net;
}

nlohmann::json net_to_json(const NetSpec& net) {
    json j;
    j["input_dim"] = net.input_dim;
    j["output_neuron"] = net.output_neuron;
    json layers = json::array();
    for (const LayerSpec& l : net.layers) {
        json o;
        if (l.is_dense()) {
            o["kind"] = "dense";
            o["W"] = matrix_to_json(l.dense().w);
            o["b"] = l.dense().b;
            o["activation"] = activation_to_json(l.dense().act);
        } else if (l.is_add()) {
            o["kind"] = "residual_add";
            o["left"] = l.add().left;
            o["right"] = l.add().right;
        } else if (l.is_maxpool()) {
            o["kind"] = "max_pool";
            o["groups"] = l.maxpool().groups;
        } else {
            o["kind"] = "attention";
            o["WQ"] = matrix_to_json(l.attention().wq);
            o["WK"] = matrix_to_json(l.attention().wk);
            o["WV"] = matrix_to_json(l.attention().wv);
            o["d_h"] = l.attention().d_h;
            o["tokens"] = l.attention().tokens;
        }
        layers.push_back(std::move(o));
    }
    j["layers"] = std::move(layers);
    return j;
}

NetSpec load_net(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path + ": cannot open file");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw SchemaError(path + ": invalid JSON (" + e.what() + ")");
    }
    return net_from_json(j);
}

void save_net(const NetSpec& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SchemaError(path + ": cannot open file for writing");
    out << net_to_json(net).dump(2) << "\n";
}

NetSpec gen_net(const GenNetOptions& opt, std::uint64_t seed) {
    if (opt.widths.size() < 2) throw ConfigError("gen_net: need at least input and one layer width");
    for (int w : opt.widths)
        if (w <= 0) throw ConfigError("gen_net: widths must be positive");
    std::mt19937_64 rng = substream(seed, "gen-net");
    auto he_dense = [&](int out, int in) {
        DenseLayer d;
        d.w = Matrix(out, in);
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / in));
        for (double& v : d.w.data) v = dist(rng);
        d.b = Vec(out, 0.0);
        d.act = opt.act;
        return d;
    };

    NetSpec net;
    net.input_dim = opt.widths[0];
    int cur_width = opt.widths[0];
    int node = 0;

    auto push_dense = [&](int out) {
        LayerSpec l;
        l.node = he_dense(out, cur_width);
        net.layers.push_back(std::move(l));
        cur_width = out;
        ++node;
    };

    for (size_t i = 1; i < opt.widths.size(); ++i) {
        push_dense(opt.widths[i]);
        if (opt.with_skip && i == 1) {
            int a = node;
            push_dense(cur_width);  // square companion so both operands match
            LayerSpec l;
            l.node = ResidualAddLayer{a, node};
            net.layers.push_back(std::move(l));
            ++node;
        }
        if (opt.with_maxpool && i == 1 && cur_width >= 2) {
            MaxPoolLayer mp;
            for (int k = 0; k < cur_width; k += 2) {
                std::vector<int> g{k};
                if (k + 1 < cur_width) g.push_back(k + 1);
                mp.groups.push_back(std::move(g));
            }
            int out = static_cast<int>(mp.groups.size());
            LayerSpec l;
            l.node = std::move(mp);
            net.layers.push_back(std::move(l));
            cur_width = out;
            ++node;
        }
        if (opt.with_attention && i == 1) {
            if (cur_width % opt.attn_tokens != 0)
                throw ConfigError("gen_net: width after first layer must divide by attention tokens");
            int dim = cur_width / opt.attn_tokens;
            AttentionLayer a;
            a.tokens = opt.attn_tokens;
            a.d_h = opt.attn_dh;
            std::normal_distribution<double> dist(0.0, std::sqrt(1.0 / dim));
            a.wq = Matrix(dim, a.d_h);
            a.wk = Matrix(dim, a.d_h);
            a.wv = Matrix(dim, a.d_h);
            for (double& v : a.wq.data) v = dist(rng);
            for (double& v : a.wk.data) v = dist(rng);
            for (double& v : a.wv.data) v = dist(rng);
            int out = a.tokens * a.d_h;
            LayerSpec l;
            l.node = std::move(a);
            net.layers.push_back(std::move(l));
            cur_width = out;
            ++node;
        }
    }
    net.output_neuron = 0;
    net.validate();
    return net;
}

}  // namespace attrgame
