#include "attrgame/attention.hpp"

#include <cmath>

#include "attrgame/errors.hpp"

namespace attrgame {

namespace {

void check_block(const AttentionBlock& blk) {
    int dim = blk.wq.rows;
    if (blk.tokens < 1 || blk.d_h < 1) throw ConfigError("attention: tokens and d_h must be >= 1");
    if (blk.wq.cols != blk.d_h || blk.wk.cols != blk.d_h || blk.wv.cols != blk.d_h ||
        blk.wk.rows != dim || blk.wv.rows != dim)
        throw ConfigError("attention: WQ/WK/WV must all be D x d_h");
    if (blk.x.rows != blk.tokens || blk.x.cols != dim)
        throw ConfigError("attention: X must be S x D");
    for (double v : blk.x.data)
        if (v < 0.0) throw ConfigError("attention: X must be entrywise non-negative");
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix a(logits.rows, logits.cols);
    for (int q = 0; q < logits.rows; ++q) {
        double m = logits(q, 0);
        for (int k = 1; k < logits.cols; ++k) m = std::max(m, logits(q, k));
        double z = 0.0;
        for (int k = 0; k < logits.cols; ++k) {
            a(q, k) = std::exp(logits(q, k) - m);
            z += a(q, k);
        }
        for (int k = 0; k < logits.cols; ++k) a(q, k) /= z;
    }
    return a;
}

}  // namespace

AttnForward attn_forward(const AttentionBlock& blk) {
    check_block(blk);
    int s = blk.tokens, dim = blk.dim(), dh = blk.d_h;
    Matrix q(s, dh), k(s, dh);
    AttnForward out;
    out.v = Matrix(s, dh);
    for (int t = 0; t < s; ++t)
        for (int d = 0; d < dh; ++d) {
            double sq = 0, sk = 0, sv = 0;
            for (int e = 0; e < dim; ++e) {
                sq += blk.x(t, e) * blk.wq(e, d);
                sk += blk.x(t, e) * blk.wk(e, d);
                sv += blk.x(t, e) * blk.wv(e, d);
            }
            q(t, d) = sq;
            k(t, d) = sk;
            out.v(t, d) = sv;
        }
    out.logits = Matrix(s, s);
    double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    for (int qi = 0; qi < s; ++qi)
        for (int ki = 0; ki < s; ++ki) {
            double e = 0.0;
            for (int d = 0; d < dh; ++d) e += q(qi, d) * k(ki, d);
            out.logits(qi, ki) = e * scale;
        }
    out.a = softmax_rows(out.logits);
    out.o = Matrix(s, dh);
    for (int qi = 0; qi < s; ++qi)
        for (int d = 0; d < dh; ++d) {
            double o = 0.0;
            for (int ki = 0; ki < s; ++ki) o += out.a(qi, ki) * out.v(ki, d);
            out.o(qi, d) = o;
        }
    return out;
}

Matrix qk_oracle(const AttentionBlock& blk, double lambda_sm, const Vec& key_sigma) {
    if (lambda_sm > 0.0) throw ConfigError("qk_oracle: lambda_sm must be <= 0");
    AttnForward fw = attn_forward(blk);
    if (lambda_sm == 0.0) return fw.a;
    if (static_cast<int>(key_sigma.size()) != blk.tokens)
        throw ConfigError("qk_oracle: key uncertainty must have one entry per token");
    for (double v : key_sigma)
        if (v < 0.0) throw ConfigError("qk_oracle: key uncertainty must be >= 0");
    Matrix shifted = fw.logits;
    for (int q = 0; q < blk.tokens; ++q)
        for (int k = 0; k < blk.tokens; ++k) shifted(q, k) += lambda_sm * key_sigma[k];
    return softmax_rows(shifted);
}

Matrix v_stream_split(const AttentionBlock& blk, int sigma) {
    int s = blk.tokens, dim = blk.dim(), dh = blk.d_h;
    Matrix v(s, dh);
    for (int k = 0; k < s; ++k)
        for (int d = 0; d < dh; ++d) {
            double acc = 0.0;
            for (int e = 0; e < dim; ++e) {
                double w = blk.wv(e, d);
                double part = sigma > 0 ? std::max(w, 0.0) : std::max(-w, 0.0);
                acc += part * blk.x(k, e);
            }
            v(k, d) = acc;
        }
    return v;
}

AttnRelevance attn_lrp(const AttentionBlock& blk, const Matrix& r_o, double alpha, double beta,
                       const Matrix& oracle_a) {
    check_block(blk);
    int s = blk.tokens, dim = blk.dim(), dh = blk.d_h;
    if (r_o.rows != s || r_o.cols != dh) throw ConfigError("attn_lrp: R_O must be S x d_h");
    if (oracle_a.rows != s || oracle_a.cols != s)
        throw ConfigError("attn_lrp: oracle rows must be S x S");

    AttnRelevance out;
    out.r_o = r_o;
    Matrix vt_p = v_stream_split(blk, +1);
    Matrix vt_m = v_stream_split(blk, -1);
    out.z_plus = Matrix(s, dh);
    out.z_minus = Matrix(s, dh);
    for (int q = 0; q < s; ++q)
        for (int d = 0; d < dh; ++d) {
            double zp = 0.0, zm = 0.0;
            for (int k = 0; k < s; ++k) {
                zp += oracle_a(q, k) * vt_p(k, d);
                zm += oracle_a(q, k) * vt_m(k, d);
            }
            out.z_plus(q, d) = zp;
            out.z_minus(q, d) = zm;
        }

    // R_V per stream; a zero-mass stream routes nothing (cemetery semantics).
    Matrix rv_p(s, dh), rv_m(s, dh);
    for (int k = 0; k < s; ++k)
        for (int d = 0; d < dh; ++d) {
            double p = 0.0, m = 0.0;
            for (int q = 0; q < s; ++q) {
                if (out.z_plus(q, d) > 0.0)
                    p += oracle_a(q, k) * vt_p(k, d) / out.z_plus(q, d) * r_o(q, d);
                if (out.z_minus(q, d) > 0.0)
                    m += oracle_a(q, k) * vt_m(k, d) / out.z_minus(q, d) * r_o(q, d);
            }
            rv_p(k, d) = p;
            rv_m(k, d) = m;
        }
    out.r_v = Matrix(s, dh);
    for (int k = 0; k < s; ++k)
        for (int d = 0; d < dh; ++d) out.r_v(k, d) = alpha * rv_p(k, d) - beta * rv_m(k, d);

    // V projection: route each stream by its matching weight ratio.
    out.r_x = Matrix(s, dim);
    for (int k = 0; k < s; ++k)
        for (int e = 0; e < dim; ++e) {
            double acc = 0.0;
            for (int d = 0; d < dh; ++d) {
                double wp = std::max(blk.wv(e, d), 0.0);
                double wm = std::max(-blk.wv(e, d), 0.0);
                if (wp > 0.0 && vt_p(k, d) > 0.0)
                    acc += alpha * wp * blk.x(k, e) / vt_p(k, d) * rv_p(k, d);
                if (wm > 0.0 && vt_m(k, d) > 0.0)
                    acc -= beta * wm * blk.x(k, e) / vt_m(k, d) * rv_m(k, d);
            }
            out.r_x(k, e) = acc;
        }
    return out;
}

AttnWalk attn_rg_walk(const AttentionBlock& blk, const Matrix& gamma_o_plus,
                      const Matrix& gamma_o_minus, double alpha, double beta,
                      const Matrix& oracle_a) {
    check_block(blk);
    int s = blk.tokens, dim = blk.dim(), dh = blk.d_h;
    Matrix vt_p = v_stream_split(blk, +1);
    Matrix vt_m = v_stream_split(blk, -1);

    AttnWalk out;
    out.gamma_x_plus = Matrix(s, dim);
    out.gamma_x_minus = Matrix(s, dim);

    // Three steps per (q, d) source: sign oracle (1/2 with discount 2*alpha or
    // 2*beta), Value routing over keys, V-projection routing over input dims.
    for (int q = 0; q < s; ++q)
        for (int d = 0; d < dh; ++d) {
            double zp = 0.0, zm = 0.0;
            for (int k = 0; k < s; ++k) {
                zp += oracle_a(q, k) * vt_p(k, d);
                zm += oracle_a(q, k) * vt_m(k, d);
            }
            for (int player = 0; player < 2; ++player) {
                double src = player == 0 ? gamma_o_plus(q, d) : gamma_o_minus(q, d);
                if (src == 0.0) continue;
                // + branch keeps the player
                if (zp > 0.0) {
                    for (int k = 0; k < s; ++k) {
                        double pk = oracle_a(q, k) * vt_p(k, d) / zp;
                        if (pk == 0.0) continue;
                        for (int e = 0; e < dim; ++e) {
                            double wp = std::max(blk.wv(e, d), 0.0);
                            if (wp == 0.0) continue;
                            double pe = wp * blk.x(k, e) / vt_p(k, d);
                            double mass = alpha * src * pk * pe;
                            if (player == 0)
                                out.gamma_x_plus(k, e) += mass;
                            else
                                out.gamma_x_minus(k, e) += mass;
                        }
                    }
                }
                // - branch switches the turn
                if (zm > 0.0) {
                    for (int k = 0; k < s; ++k) {
                        double pk = oracle_a(q, k) * vt_m(k, d) / zm;
                        if (pk == 0.0) continue;
                        for (int e = 0; e < dim; ++e) {
                            double wm = std::max(-blk.wv(e, d), 0.0);
                            if (wm == 0.0) continue;
                            double pe = wm * blk.x(k, e) / vt_m(k, d);
                            double mass = beta * src * pk * pe;
                            if (player == 0)
                                out.gamma_x_minus(k, e) += mass;
                            else
                                out.gamma_x_plus(k, e) += mass;
                        }
                    }
                }
            }
        }
    return out;
}

}  // namespace attrgame
