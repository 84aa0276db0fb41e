#pragma once

#include <span>
#include <vector>

#include "mimocfo/linalg.hpp"

namespace mimocfo {

/**
 * Gray-mapped square QAM, unit average energy.
 *
 * A symbol carries B bits: the first B/2 select the in-phase PAM level, the
 * last B/2 the quadrature one. Each dimension is an independent Gray-labeled
 * PAM constellation, which is what lets the receiver demap per real
 * dimension.
 */
class Constellation {
public:
    // order in {4, 16, 64, 256}
    static Constellation qam(int order);

    int order() const { return order_; }
    int bits_per_symbol() const { return bits_per_symbol_; }
    int bits_per_dim() const { return bits_per_dim_; }
    int levels() const { return levels_; }

    // PAM amplitudes in ascending order; pam_bit(i, b) is bit b (MSB first)
    // of the Gray label of level i.
    const std::vector<double>& pam_points() const { return pam_; }
    int pam_bit(int level, int bit) const { return (labels_[level] >> (bits_per_dim_ - 1 - bit)) & 1; }

    // bits (size B, MSB first per dimension) -> complex symbol
    cplx map(std::span<const int> bits) const;
    // hard decision back to bits (size B)
    void unmap_hard(cplx s, std::span<int> bits) const;

    double symbol_energy() const { return 1.0; }
    double dim_energy() const { return 0.5; }

private:
    Constellation() = default;

    int nearest_level(double x) const;
    int level_of_label(int label) const;

    int order_ = 0;
    int bits_per_symbol_ = 0;
    int bits_per_dim_ = 0;
    int levels_ = 0;
    std::vector<double> pam_;   // ascending amplitudes
    std::vector<int> labels_;   // Gray label per level
    std::vector<int> level_of_; // level per Gray label
};

}  // namespace mimocfo
