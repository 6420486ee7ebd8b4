#pragma once

#include <cstdint>
#include <vector>

namespace covert {

// GF(2^m) arithmetic over log/antilog tables, 2 <= m <= 16. Elements are raw
// integers in {0..2^m-1}; alpha (the residue of x) generates the
// multiplicative group when the polynomial is primitive.
class GaloisField {
  public:
    // Uses a standard minimal-weight primitive polynomial for m.
    explicit GaloisField(int m);
    // Custom polynomial, given with the leading x^m bit set (e.g. x^5+x^2+1
    // as 0b100101). Throws if the polynomial is not primitive.
    GaloisField(int m, std::uint32_t primitive_poly);

    int m() const { return m_; }
    int size() const { return size_; }          // 2^m
    int order() const { return size_ - 1; }     // multiplicative order of alpha
    std::uint32_t primitive_poly() const { return poly_; }

    std::uint16_t add(std::uint16_t a, std::uint16_t b) const { return a ^ b; }
    std::uint16_t mul(std::uint16_t a, std::uint16_t b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }
    std::uint16_t div(std::uint16_t a, std::uint16_t b) const;
    std::uint16_t inv(std::uint16_t a) const;

    // alpha^e for any integer e (reduced mod 2^m - 1).
    std::uint16_t alpha_pow(long long e) const;
    // Discrete log base alpha; a must be nonzero.
    int log(std::uint16_t a) const;

  private:
    void build_tables();

    int m_;
    int size_;
    std::uint32_t poly_;
    std::vector<std::uint16_t> exp_;  // length 2*(size-1)
    std::vector<int> log_;            // length size
};

}  // namespace covert
