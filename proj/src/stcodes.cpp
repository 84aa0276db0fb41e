#include "mimocfo/stcodes.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "mimocfo/realify.hpp"

namespace mimocfo {

namespace {

constexpr cplx kJ{0.0, 1.0};

struct SchemeShape {
    int q, t;
};

SchemeShape shape_of(Scheme s) {
    switch (s) {
        case Scheme::Alamouti: return {2, 2};
        case Scheme::VBlast: return {2, 1};
        case Scheme::LD: return {4, 2};
        case Scheme::Golden: return {4, 2};
    }
    throw std::invalid_argument("unknown scheme");
}

}  // namespace

Scheme scheme_from_name(std::string_view name) {
    if (name == "alamouti") return Scheme::Alamouti;
    if (name == "vblast") return Scheme::VBlast;
    if (name == "ld") return Scheme::LD;
    if (name == "golden") return Scheme::Golden;
    throw std::invalid_argument("unknown scheme name: " + std::string(name));
}

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::Alamouti: return "alamouti";
        case Scheme::VBlast: return "vblast";
        case Scheme::LD: return "ld";
        case Scheme::Golden: return "golden";
    }
    return "?";
}

CMat st_encode(Scheme s, std::span<const cplx> sym) {
    const auto [q, t] = shape_of(s);
    if (sym.size() != static_cast<size_t>(q))
        throw std::invalid_argument("st_encode: expected Q symbols");

    CMat x(2, t);
    switch (s) {
        case Scheme::Alamouti:
            x(0, 0) = sym[0];
            x(0, 1) = sym[1];
            x(1, 0) = -std::conj(sym[1]);
            x(1, 1) = std::conj(sym[0]);
            break;
        case Scheme::VBlast:
            x(0, 0) = sym[0];
            x(1, 0) = sym[1];
            break;
        case Scheme::LD: {
            const double a = 1.0 / std::sqrt(2.0);
            x(0, 0) = a * (sym[0] + sym[2]);
            x(0, 1) = a * (sym[1] - sym[3]);
            x(1, 0) = a * (sym[1] + sym[3]);
            x(1, 1) = a * (sym[0] - sym[2]);
            break;
        }
        case Scheme::Golden: {
            const double s5 = std::sqrt(5.0);
            const double theta = (1.0 + s5) / 2.0;
            const double theta_bar = 1.0 - theta;
            const cplx beta = 1.0 + kJ * (1.0 - theta);
            const cplx beta_bar = 1.0 + kJ * (1.0 - theta_bar);
            const cplx mu = kJ;
            x(0, 0) = beta * (sym[0] + theta * sym[1]) / s5;
            x(0, 1) = beta * (sym[2] + theta * sym[3]) / s5;
            x(1, 0) = mu * beta_bar * (sym[2] + theta_bar * sym[3]) / s5;
            x(1, 1) = beta_bar * (sym[0] + theta_bar * sym[1]) / s5;
            break;
        }
    }
    return x;
}

namespace {

StScheme make_descriptor(Scheme s) {
    const auto [q, t] = shape_of(s);
    StScheme d;
    d.name = s;
    d.q = q;
    d.t = t;
    d.rate = static_cast<double>(q) / t;
    d.u.reserve(q);
    d.v.reserve(q);

    std::vector<cplx> probe(q, cplx{0.0, 0.0});
    for (int i = 0; i < q; ++i) {
        probe[i] = 1.0;
        d.u.push_back(st_encode(s, probe));  // X(e_q) = U_q
        probe[i] = kJ;
        CMat xv = st_encode(s, probe);       // X(j e_q) = j V_q
        for (cplx& c : xv.a) c *= -kJ;
        d.v.push_back(std::move(xv));
        probe[i] = 0.0;
    }

    // F columns from the same probes: col 2q is realify(X(e_q)),
    // col 2q+1 is realify(X(j e_q)).
    d.f = RMat(2 * d.mt * t, 2 * q);
    for (int i = 0; i < q; ++i) {
        probe[i] = 1.0;
        auto cr = realify_mat(st_encode(s, probe));
        probe[i] = kJ;
        auto ci = realify_mat(st_encode(s, probe));
        probe[i] = 0.0;
        for (int r = 0; r < d.f.rows; ++r) {
            d.f(r, 2 * i) = cr[r];
            d.f(r, 2 * i + 1) = ci[r];
        }
    }
    return d;
}

}  // namespace

const StScheme& StScheme::get(Scheme s) {
    static const std::array<StScheme, 4> all = {
        make_descriptor(Scheme::Alamouti),
        make_descriptor(Scheme::VBlast),
        make_descriptor(Scheme::LD),
        make_descriptor(Scheme::Golden),
    };
    return all[static_cast<int>(s)];
}

}  // namespace mimocfo
