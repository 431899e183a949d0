#pragma once

#include "attrgame/net.hpp"

namespace attrgame {

// Per-node Gaussian moments under the independence assumption; the input layer
// starts at (x, sigma2) per pixel.
struct MomentField {
    std::vector<Vec> mu, var;
    int attn_node = -1;
    Vec attn_key_sigma;  // per key token, Euclidean mean of the Value std devs
};

MomentField adf_forward(const NetSpec& net, const Vec& x, double sigma2);

// Clamped lower-confidence bound max(mu + lambda*sqrt(v), 0), lambda <= 0.
double risk_value(double mu, double v, double lambda);

}  // namespace attrgame
