#include "covert/gf.hpp"

#include <stdexcept>

namespace covert {

namespace {

// Minimal-weight primitive polynomials, indexed by m.
constexpr std::uint32_t kDefaultPoly[17] = {
    0, 0,
    0x7,      // m=2:  x^2+x+1
    0xb,      // m=3:  x^3+x+1
    0x13,     // m=4:  x^4+x+1
    0x25,     // m=5:  x^5+x^2+1
    0x43,     // m=6:  x^6+x+1
    0x89,     // m=7:  x^7+x^3+1
    0x11d,    // m=8:  x^8+x^4+x^3+x^2+1
    0x211,    // m=9:  x^9+x^4+1
    0x409,    // m=10: x^10+x^3+1
    0x805,    // m=11: x^11+x^2+1
    0x1053,   // m=12: x^12+x^6+x^4+x+1
    0x201b,   // m=13: x^13+x^4+x^3+x+1
    0x4443,   // m=14: x^14+x^10+x^6+x+1
    0x8003,   // m=15: x^15+x+1
    0x1100b,  // m=16: x^16+x^12+x^3+x+1
};

}  // namespace

GaloisField::GaloisField(int m) : GaloisField(m, m >= 2 && m <= 16 ? kDefaultPoly[m] : 0) {}

GaloisField::GaloisField(int m, std::uint32_t primitive_poly)
    : m_(m), size_(1 << m), poly_(primitive_poly) {
    if (m < 2 || m > 16) throw std::invalid_argument("GaloisField: m must be in [2, 16]");
    if ((poly_ >> m) != 1u) {
        throw std::invalid_argument("GaloisField: polynomial must have degree exactly m");
    }
    build_tables();
}

void GaloisField::build_tables() {
    const int order = size_ - 1;
    exp_.assign(static_cast<std::size_t>(2 * order), 0);
    log_.assign(static_cast<std::size_t>(size_), -1);
    std::uint32_t v = 1;
    for (int i = 0; i < order; ++i) {
        exp_[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(v);
        if (log_[v] != -1) {
            throw std::invalid_argument("GaloisField: polynomial is not primitive");
        }
        log_[v] = i;
        v <<= 1;
        if (v & static_cast<std::uint32_t>(size_)) v ^= poly_;
    }
    if (v != 1) throw std::invalid_argument("GaloisField: polynomial is not primitive");
    for (int i = 0; i < order; ++i) {
        exp_[static_cast<std::size_t>(order + i)] = exp_[static_cast<std::size_t>(i)];
    }
}

std::uint16_t GaloisField::div(std::uint16_t a, std::uint16_t b) const {
    if (b == 0) throw std::domain_error("GaloisField: division by zero");
    if (a == 0) return 0;
    int e = log_[a] - log_[b];
    if (e < 0) e += order();
    return exp_[static_cast<std::size_t>(e)];
}

std::uint16_t GaloisField::inv(std::uint16_t a) const {
    if (a == 0) throw std::domain_error("GaloisField: zero has no inverse");
    return exp_[static_cast<std::size_t>(order() - log_[a])];
}

std::uint16_t GaloisField::alpha_pow(long long e) const {
    long long r = e % order();
    if (r < 0) r += order();
    return exp_[static_cast<std::size_t>(r)];
}

int GaloisField::log(std::uint16_t a) const {
    if (a == 0) throw std::domain_error("GaloisField: log of zero");
    return log_[a];
}

}  // namespace covert
