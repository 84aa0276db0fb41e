#include "mimocfo/realify.hpp"

#include <cmath>
#include <stdexcept>

namespace mimocfo {

std::vector<double> realify_vec(std::span<const cplx> v) {
    std::vector<double> r(2 * v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        r[2 * i] = v[i].real();
        r[2 * i + 1] = v[i].imag();
    }
    return r;
}

std::vector<cplx> unrealify_vec(std::span<const double> r) {
    if (r.size() % 2 != 0) throw std::invalid_argument("unrealify_vec: odd length");
    std::vector<cplx> v(r.size() / 2);
    for (size_t i = 0; i < v.size(); ++i) v[i] = {r[2 * i], r[2 * i + 1]};
    return v;
}

std::vector<double> realify_mat(const CMat& m) {
    return realify_vec(std::span<const cplx>(m.a.data(), m.a.size()));
}

RMat build_g(const CMat& h_eq, int t_slots) {
    const int mr = h_eq.rows, mt = h_eq.cols;
    RMat g(2 * mr * t_slots, 2 * mt * t_slots);
    for (int j = 0; j < mr; ++j)
        for (int i = 0; i < mt; ++i) {
            const double hr = h_eq(j, i).real();
            const double hi = h_eq(j, i).imag();
            for (int t = 0; t < t_slots; ++t) {
                const int r0 = 2 * (j * t_slots + t);
                const int c0 = 2 * (i * t_slots + t);
                g(r0, c0) = hr;
                g(r0, c0 + 1) = -hi;
                g(r0 + 1, c0) = hi;
                g(r0 + 1, c0 + 1) = hr;
            }
        }
    return g;
}

RealifiedSystem build_system(const CMat& h, cplx phi_nn, const RMat& f,
                             double noise_var, const CMat& y_complex, int subcarrier) {
    const int t_slots = y_complex.cols;
    if (f.rows != 2 * h.cols * t_slots)
        throw std::invalid_argument("build_system: F/H/Y dimensions inconsistent");
    if (y_complex.rows != h.rows)
        throw std::invalid_argument("build_system: Y/H row mismatch");

    // effective channel the receiver equalizes: CFO rotation/attenuation and
    // the 1/sqrt(M_T) transmit scaling folded in
    CMat h_eq(h.rows, h.cols);
    const cplx c = phi_nn / std::sqrt(static_cast<double>(h.cols));
    for (size_t k = 0; k < h.a.size(); ++k) h_eq.a[k] = c * h.a[k];

    RealifiedSystem sys;
    sys.g_eq = matmul(build_g(h_eq, t_slots), f);
    sys.y = realify_mat(y_complex);
    sys.noise_var = noise_var;
    sys.subcarrier = subcarrier;
    return sys;
}

}  // namespace mimocfo
