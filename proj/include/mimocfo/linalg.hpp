#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

// Minimal dense matrix helpers. Everything in this simulator is tiny
// (at most 8x8 real systems per subcarrier), so plain row-major vectors
// beat any heavyweight dependency.

namespace mimocfo {

using cplx = std::complex<double>;

struct CMat {
    int rows = 0, cols = 0;
    std::vector<cplx> a;

    CMat() = default;
    CMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    cplx& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const cplx& operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

struct RMat {
    int rows = 0, cols = 0;
    std::vector<double> a;

    RMat() = default;
    RMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const double& operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

inline CMat operator*(const CMat& x, const CMat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("CMat multiply: dimension mismatch");
    CMat z(x.rows, y.cols);
    for (int r = 0; r < x.rows; ++r)
        for (int k = 0; k < x.cols; ++k) {
            const cplx v = x(r, k);
            for (int c = 0; c < y.cols; ++c) z(r, c) += v * y(k, c);
        }
    return z;
}

inline RMat matmul(const RMat& x, const RMat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("RMat multiply: dimension mismatch");
    RMat z(x.rows, y.cols);
    for (int r = 0; r < x.rows; ++r)
        for (int k = 0; k < x.cols; ++k) {
            const double v = x(r, k);
            for (int c = 0; c < y.cols; ++c) z(r, c) += v * y(k, c);
        }
    return z;
}

// y = A x
inline std::vector<double> matvec(const RMat& m, std::span<const double> x) {
    if (static_cast<size_t>(m.cols) != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> y(m.rows, 0.0);
    for (int r = 0; r < m.rows; ++r) {
        double acc = 0.0;
        for (int c = 0; c < m.cols; ++c) acc += m(r, c) * x[c];
        y[r] = acc;
    }
    return y;
}

// y = A^T x
inline std::vector<double> matvec_t(const RMat& m, std::span<const double> x) {
    if (static_cast<size_t>(m.rows) != x.size()) throw std::invalid_argument("matvec_t: dimension mismatch");
    std::vector<double> y(m.cols, 0.0);
    for (int r = 0; r < m.rows; ++r) {
        const double v = x[r];
        for (int c = 0; c < m.cols; ++c) y[c] += m(r, c) * v;
    }
    return y;
}

// A^T A
inline RMat gram(const RMat& m) {
    RMat g(m.cols, m.cols);
    for (int i = 0; i < m.cols; ++i)
        for (int j = i; j < m.cols; ++j) {
            double acc = 0.0;
            for (int r = 0; r < m.rows; ++r) acc += m(r, i) * m(r, j);
            g(i, j) = g(j, i) = acc;
        }
    return g;
}

// A A^T
inline RMat outer_gram(const RMat& m) {
    RMat g(m.rows, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = i; j < m.rows; ++j) {
            double acc = 0.0;
            for (int c = 0; c < m.cols; ++c) acc += m(i, c) * m(j, c);
            g(i, j) = g(j, i) = acc;
        }
    return g;
}

// In-place Cholesky of a symmetric positive definite matrix (lower triangle).
// Returns false if a non-positive pivot is hit.
inline bool cholesky(RMat& m) {
    const int n = m.rows;
    for (int j = 0; j < n; ++j) {
        double d = m(j, j);
        for (int k = 0; k < j; ++k) d -= m(j, k) * m(j, k);
        if (d <= 0.0) return false;
        const double lj = std::sqrt(d);
        m(j, j) = lj;
        for (int i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (int k = 0; k < j; ++k) s -= m(i, k) * m(j, k);
            m(i, j) = s / lj;
        }
    }
    return true;
}

// Solve (L L^T) x = b in place, with L from cholesky() above.
inline void chol_solve(const RMat& l, std::span<double> x) {
    const int n = l.rows;
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
}

inline double frob_norm_sq(const CMat& m) {
    double acc = 0.0;
    for (const cplx& v : m.a) acc += std::norm(v);
    return acc;
}

}  // namespace mimocfo
