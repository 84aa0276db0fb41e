#pragma once

#include <span>
#include <vector>

#include "mimocfo/linalg.hpp"

namespace mimocfo {

// Real-valued view of the per-subcarrier complex system. The interleaving
// order is fixed everywhere as [Re, Im] pairs, rows (antennas) major, time
// slots minor; a single canonical order avoids silent permutation bugs.

// [v1, v2, ...] -> [Re v1, Im v1, Re v2, Im v2, ...]
std::vector<double> realify_vec(std::span<const cplx> v);
std::vector<cplx> unrealify_vec(std::span<const double> r);

// (M x T) complex matrix -> length 2*M*T real vector, row-major
std::vector<double> realify_mat(const CMat& m);

// Block channel matrix: block (j,i) is block-diagonal with T copies of the
// 2x2 complex-multiplication block [[hR, -hI], [hI, hR]] for h = h_eq(j,i),
// so that realify(H X) = G realify(X).
RMat build_g(const CMat& h_eq, int t_slots);

/**
 * One subcarrier's real-valued observation: y = G_eq s + (ici) + w.
 *
 * g_eq = G F where G is built from the CFO-attenuated effective channel
 * phi(n,n)/sqrt(M_T) * H[n]; the ICI term stays unknown to the detector.
 * noise_var is the per-real-dimension variance the detector assumes.
 */
struct RealifiedSystem {
    std::vector<double> y;
    RMat g_eq;
    double noise_var = 0.0;
    int subcarrier = 0;
};

RealifiedSystem build_system(const CMat& h, cplx phi_nn, const RMat& f,
                             double noise_var, const CMat& y_complex, int subcarrier = 0);

}  // namespace mimocfo
