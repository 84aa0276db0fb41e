#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "mimocfo/linalg.hpp"

namespace mimocfo {

enum class Scheme { Alamouti, VBlast, LD, Golden };

Scheme scheme_from_name(std::string_view name);  // "alamouti" | "vblast" | "ld" | "golden"
const char* to_string(Scheme s);

// Q complex symbols -> (M_T x T) code matrix, closed form per scheme
// (including the 1/sqrt(2) and 1/sqrt(5) normalizations of LD and Golden).
CMat st_encode(Scheme s, std::span<const cplx> symbols);

/**
 * Space-time block code descriptor.
 *
 * Dispersion matrices are extracted by probing st_encode() at unit basis
 * inputs (s_q = 1 gives U_q, s_q = j gives j V_q); hand-coding them would
 * just be a transcription risk for the Golden/LD constants. F maps the
 * realified symbol vector to the realified code matrix: realify(X) = F s.
 */
struct StScheme {
    Scheme name;
    int mt = 2;   // transmit antennas
    int q = 0;    // symbols per block
    int t = 0;    // slots per block
    double rate = 0.0;  // L = Q/T

    std::vector<CMat> u;  // Q dispersion matrices, real parts
    std::vector<CMat> v;  // Q dispersion matrices, imaginary parts
    RMat f;               // (2*M_T*T x 2Q)

    static const StScheme& get(Scheme s);
};

}  // namespace mimocfo
