#include "mimocfo/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace mimocfo {

Constellation Constellation::qam(int order) {
    if (order != 4 && order != 16 && order != 64 && order != 256)
        throw std::invalid_argument("unsupported QAM order");

    Constellation c;
    c.order_ = order;
    c.bits_per_symbol_ = 0;
    while ((1 << c.bits_per_symbol_) < order) ++c.bits_per_symbol_;
    c.bits_per_dim_ = c.bits_per_symbol_ / 2;
    c.levels_ = 1 << c.bits_per_dim_;

    // Levels at odd integers +-1, +-3, ... scaled so E|s|^2 = 1 over both
    // dimensions: E per dimension = (L^2-1)/3 * scale^2 = 1/2.
    const int l = c.levels_;
    const double scale = std::sqrt(3.0 / (2.0 * (static_cast<double>(l) * l - 1.0)));
    c.pam_.resize(l);
    c.labels_.resize(l);
    c.level_of_.resize(l);
    for (int i = 0; i < l; ++i) {
        c.pam_[i] = scale * (2 * i - l + 1);
        // binary-reflected Gray label, all-zero label on the positive end so
        // that positive LLR <=> bit 0 lines up with positive amplitudes
        const int g = (l - 1 - i) ^ ((l - 1 - i) >> 1);
        c.labels_[i] = g;
        c.level_of_[g] = i;
    }
    return c;
}

int Constellation::level_of_label(int label) const { return level_of_[label]; }

cplx Constellation::map(std::span<const int> bits) const {
    if (bits.size() != static_cast<size_t>(bits_per_symbol_))
        throw std::invalid_argument("map: wrong bit count");
    int li = 0, lq = 0;
    for (int b = 0; b < bits_per_dim_; ++b) {
        li = (li << 1) | (bits[b] & 1);
        lq = (lq << 1) | (bits[bits_per_dim_ + b] & 1);
    }
    return {pam_[level_of_label(li)], pam_[level_of_label(lq)]};
}

int Constellation::nearest_level(double x) const {
    const double scale = pam_[1] - pam_[0];  // 2*base scale
    int i = static_cast<int>(std::lround((x - pam_[0]) / scale));
    if (i < 0) i = 0;
    if (i >= levels_) i = levels_ - 1;
    return i;
}

void Constellation::unmap_hard(cplx s, std::span<int> bits) const {
    if (bits.size() != static_cast<size_t>(bits_per_symbol_))
        throw std::invalid_argument("unmap_hard: wrong bit count");
    const int li = labels_[nearest_level(s.real())];
    const int lq = labels_[nearest_level(s.imag())];
    for (int b = 0; b < bits_per_dim_; ++b) {
        bits[b] = (li >> (bits_per_dim_ - 1 - b)) & 1;
        bits[bits_per_dim_ + b] = (lq >> (bits_per_dim_ - 1 - b)) & 1;
    }
}

}  // namespace mimocfo
