#pragma once

#include "attrgame/matrix.hpp"

namespace attrgame {

// Single-head toy block; X is the non-negative input as fed by an upstream
// gated layer.
struct AttentionBlock {
    Matrix wq, wk, wv;  // D x d_h
    int tokens = 1;
    int d_h = 1;
    Matrix x;  // S x D

    int dim() const { return wq.rows; }
};

struct AttnForward {
    Matrix a;       // softmax rows, detached downstream
    Matrix v;       // S x d_h
    Matrix o;       // S x d_h
    Matrix logits;  // e_qk
};

AttnForward attn_forward(const AttentionBlock& blk);

// Reference policy softmax(e + lambda_sm * s_k); lambda_sm = 0 reduces to the
// plain rows. The forward output is never recomputed from the shift.
Matrix qk_oracle(const AttentionBlock& blk, double lambda_sm, const Vec& key_sigma);

struct AttnRelevance {
    Matrix r_o;               // seed, S x d_h
    Matrix r_v;               // S x d_h
    Matrix r_x;               // S x D
    Matrix z_plus, z_minus;   // per-output-entry stream sums
};

// alpha-beta target rule through the composite AV + W_V map with the W_V
// sign-stream split; zero-mass streams contribute nothing.
AttnRelevance attn_lrp(const AttentionBlock& blk, const Matrix& r_o, double alpha, double beta,
                       const Matrix& oracle_a);

// W_V sign-stream split of the Value tensor, sum_e WV^{sigma} X.
Matrix v_stream_split(const AttentionBlock& blk, int sigma);

struct AttnWalk {
    Matrix gamma_x_plus, gamma_x_minus;  // S x D per player
};

// Occupation walk through the attention state space: sign oracle, Value
// routing against the reference rows, V-projection routing.
AttnWalk attn_rg_walk(const AttentionBlock& blk, const Matrix& gamma_o_plus,
                      const Matrix& gamma_o_minus, double alpha, double beta,
                      const Matrix& oracle_a);

}  // namespace attrgame
