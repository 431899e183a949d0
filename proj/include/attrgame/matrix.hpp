#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace attrgame {

using Vec = std::vector<double>;

// Row-major dense matrix. W(i, j) is the weight from predecessor j to neuron i.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), fill) {}

    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

inline Vec matvec(const Matrix& w, const Vec& x) {
    if (static_cast<int>(x.size()) != w.cols)
        throw std::invalid_argument("matvec: dimension mismatch");
    Vec y(w.rows, 0.0);
    for (int i = 0; i < w.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < w.cols; ++j) s += w(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline bool all_finite(const Matrix& m) { return all_finite(m.data); }

inline double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

inline double sum(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

// Compensated summation; the Hellinger accumulations quote tolerances assuming it.
struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

}  // namespace attrgame
