#pragma once

#include <cmath>
#include <utility>

namespace attrgame {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
inline constexpr double kInvSqrt2 = 0.7071067811865475244008444;

inline double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

// Gaussian-smoothed ReLU, E[max(z + eps, 0)] for eps ~ N(0,1). Its derivative is
// exactly norm_cdf(z); common GELU implementations drop the pdf term.
inline double smoothed_relu(double z) { return z * norm_cdf(z) + norm_pdf(z); }

// Softplus at temperature theta: sigma_theta(z) = theta * log(1 + exp(z/theta)).
inline double softplus_theta(double z, double theta) {
    double u = z / theta;
    if (u > 0.0) return theta * (u + std::log1p(std::exp(-u)));
    return theta * std::log1p(std::exp(u));
}

// d/dz softplus_theta = logistic sigmoid at temperature theta.
inline double sigmoid_theta(double z, double theta) {
    double u = z / theta;
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    double e = std::exp(u);
    return e / (1.0 + e);
}

// Mean and variance of max(X, 0) for X ~ N(mu, v); v = 0 degenerates to the
// deterministic ReLU.
inline std::pair<double, double> relu_gaussian_moments(double mu, double v) {
    if (v <= 0.0) return {mu > 0.0 ? mu : 0.0, 0.0};
    double sd = std::sqrt(v);
    double t = mu / sd;
    double cdf = norm_cdf(t);
    double pdf = norm_pdf(t);
    double mean = mu * cdf + sd * pdf;
    double second = (mu * mu + v) * cdf + mu * sd * pdf;
    double var = second - mean * mean;
    if (var < 0.0) var = 0.0;
    return {mean, var};
}

}  // namespace attrgame
