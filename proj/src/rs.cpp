#include "covert/rs.hpp"

#include <stdexcept>

#include "covert/errors.hpp"

namespace covert {

RsCodec::RsCodec(int m, int k) : gf_(m), n_((1 << m) - 1), k_(k) {
    if (k < 1 || k >= n_) throw std::invalid_argument("RsCodec: require 1 <= k < n");
    // g(x) = prod_{j=1..n-k} (x + alpha^j), low degree first.
    generator_.assign(1, 1);
    for (int j = 1; j <= n_ - k_; ++j) {
        const std::uint16_t root = gf_.alpha_pow(j);
        std::vector<std::uint16_t> next(generator_.size() + 1, 0);
        for (std::size_t i = 0; i < generator_.size(); ++i) {
            next[i + 1] ^= generator_[i];                  // x * g
            next[i] ^= gf_.mul(generator_[i], root);       // root * g
        }
        generator_ = std::move(next);
    }
}

std::vector<std::uint16_t> RsCodec::encode(std::span<const std::uint16_t> message) const {
    if (static_cast<int>(message.size()) != k_) {
        throw ValidationError(Errc::length_mismatch, "rs_encode: message length must equal rs_k");
    }
    // Codeword index i holds the coefficient of x^(n-1-i): message occupies
    // the high-degree positions, parity = (message * x^(n-k)) mod g.
    std::vector<std::uint16_t> codeword(static_cast<std::size_t>(n_), 0);
    for (int i = 0; i < k_; ++i) {
        if (message[static_cast<std::size_t>(i)] >= gf_.size()) {
            throw ValidationError(Errc::bad_argument, "rs_encode: symbol outside field");
        }
        codeword[static_cast<std::size_t>(i)] = message[static_cast<std::size_t>(i)];
    }
    const int p = n_ - k_;
    std::vector<std::uint16_t> rem(static_cast<std::size_t>(p), 0);
    for (int i = 0; i < k_; ++i) {
        const std::uint16_t feedback = static_cast<std::uint16_t>(message[static_cast<std::size_t>(i)] ^ rem[0]);
        for (int j = 0; j < p - 1; ++j) {
            rem[static_cast<std::size_t>(j)] = static_cast<std::uint16_t>(
                rem[static_cast<std::size_t>(j + 1)] ^
                gf_.mul(feedback, generator_[static_cast<std::size_t>(p - 1 - j)]));
        }
        rem[static_cast<std::size_t>(p - 1)] = gf_.mul(feedback, generator_[0]);
    }
    for (int j = 0; j < p; ++j) codeword[static_cast<std::size_t>(k_ + j)] = rem[static_cast<std::size_t>(j)];
    return codeword;
}

std::vector<std::uint16_t> RsCodec::syndromes(std::span<const std::uint16_t> word) const {
    std::vector<std::uint16_t> synd(static_cast<std::size_t>(n_ - k_), 0);
    for (int j = 1; j <= n_ - k_; ++j) {
        const std::uint16_t x = gf_.alpha_pow(j);
        std::uint16_t acc = 0;
        for (int i = 0; i < n_; ++i) {
            acc = static_cast<std::uint16_t>(gf_.mul(acc, x) ^ word[static_cast<std::size_t>(i)]);
        }
        synd[static_cast<std::size_t>(j - 1)] = acc;
    }
    return synd;
}

std::optional<RsDecodeOutcome> RsCodec::decode(const RsCodeword& received) const {
    return decode(received.symbols, received.erasure_mask);
}

std::optional<RsDecodeOutcome> RsCodec::decode(std::span<const std::uint16_t> symbols,
                                               std::span<const std::uint8_t> erasure_mask) const {
    if (static_cast<int>(symbols.size()) != n_) {
        throw ValidationError(Errc::length_mismatch, "rs_decode: word length must equal rs_n");
    }
    if (!erasure_mask.empty() && erasure_mask.size() != symbols.size()) {
        throw ValidationError(Errc::length_mismatch, "rs_decode: erasure mask length mismatch");
    }
    for (std::uint16_t s : symbols) {
        if (s >= gf_.size()) {
            throw ValidationError(Errc::bad_argument, "rs_decode: symbol outside the field");
        }
    }
    const int two_t = n_ - k_;

    std::vector<int> erased;
    std::vector<std::uint16_t> word(symbols.begin(), symbols.end());
    for (std::size_t i = 0; i < erasure_mask.size(); ++i) {
        if (erasure_mask[i]) {
            erased.push_back(static_cast<int>(i));
            word[i] = 0;
        }
    }
    const int rho = static_cast<int>(erased.size());
    if (rho > two_t) return std::nullopt;

    std::vector<std::uint16_t> synd = syndromes(word);
    bool all_zero = true;
    for (std::uint16_t s : synd) all_zero = all_zero && s == 0;
    if (all_zero) {
        // The word with erased positions set to zero is already a codeword.
        RsDecodeOutcome out;
        out.message.assign(word.begin(), word.begin() + k_);
        out.erasures_corrected = rho;
        return out;
    }

    // Combined locator, seeded with the erasure locator. Locator value of
    // position i is alpha^(n-1-i), matching the coefficient convention.
    std::vector<std::uint16_t> lambda(static_cast<std::size_t>(two_t + 1), 0);
    lambda[0] = 1;
    for (int pos : erased) {
        const std::uint16_t x = gf_.alpha_pow(n_ - 1 - pos);
        for (int i = two_t; i >= 1; --i) {
            lambda[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(
                lambda[static_cast<std::size_t>(i)] ^
                gf_.mul(lambda[static_cast<std::size_t>(i - 1)], x));
        }
    }

    // Berlekamp-Massey over the remaining 2t - rho degrees of freedom.
    std::vector<std::uint16_t> prev = lambda;
    int el = rho;
    for (int r = rho + 1; r <= two_t; ++r) {
        std::uint16_t discrepancy = 0;
        for (int i = 0; i < r; ++i) {
            if (i <= two_t && lambda[static_cast<std::size_t>(i)] != 0) {
                discrepancy = static_cast<std::uint16_t>(
                    discrepancy ^
                    gf_.mul(lambda[static_cast<std::size_t>(i)], synd[static_cast<std::size_t>(r - i - 1)]));
            }
        }
        if (discrepancy == 0) {
            // prev <- x * prev
            prev.insert(prev.begin(), 0);
            prev.pop_back();
            continue;
        }
        std::vector<std::uint16_t> next(lambda.size());
        next[0] = lambda[0];
        for (int i = 0; i < two_t; ++i) {
            next[static_cast<std::size_t>(i + 1)] = static_cast<std::uint16_t>(
                lambda[static_cast<std::size_t>(i + 1)] ^
                gf_.mul(discrepancy, prev[static_cast<std::size_t>(i)]));
        }
        if (2 * el <= r + rho - 1) {
            el = r + rho - el;
            for (std::size_t i = 0; i < prev.size(); ++i) {
                prev[i] = lambda[i] == 0 ? 0 : gf_.div(lambda[i], discrepancy);
            }
        } else {
            prev.insert(prev.begin(), 0);
            prev.pop_back();
        }
        lambda = std::move(next);
    }

    int deg_lambda = 0;
    for (int i = two_t; i >= 0; --i) {
        if (lambda[static_cast<std::size_t>(i)] != 0) {
            deg_lambda = i;
            break;
        }
    }
    if (deg_lambda == 0) return std::nullopt;  // nonzero syndromes but no locator

    // Chien search over all positions.
    std::vector<int> positions;
    for (int pos = 0; pos < n_ && static_cast<int>(positions.size()) <= deg_lambda; ++pos) {
        const std::uint16_t x_inv = gf_.alpha_pow(-(n_ - 1 - pos));
        std::uint16_t acc = 0;
        for (int i = deg_lambda; i >= 0; --i) {
            acc = static_cast<std::uint16_t>(gf_.mul(acc, x_inv) ^ lambda[static_cast<std::size_t>(i)]);
        }
        if (acc == 0) positions.push_back(pos);
    }
    if (static_cast<int>(positions.size()) != deg_lambda) return std::nullopt;

    // Omega(x) = S(x) * lambda(x) mod x^(2t).
    std::vector<std::uint16_t> omega(static_cast<std::size_t>(two_t), 0);
    for (int i = 0; i < two_t; ++i) {
        std::uint16_t acc = 0;
        for (int j = 0; j <= i && j <= deg_lambda; ++j) {
            acc = static_cast<std::uint16_t>(
                acc ^ gf_.mul(lambda[static_cast<std::size_t>(j)], synd[static_cast<std::size_t>(i - j)]));
        }
        omega[static_cast<std::size_t>(i)] = acc;
    }

    // Forney: magnitude at locator X is Omega(X^-1) / lambda'(X^-1).
    for (int pos : positions) {
        const std::uint16_t x_inv = gf_.alpha_pow(-(n_ - 1 - pos));
        std::uint16_t num = 0;
        for (int i = two_t - 1; i >= 0; --i) {
            num = static_cast<std::uint16_t>(gf_.mul(num, x_inv) ^ omega[static_cast<std::size_t>(i)]);
        }
        std::uint16_t den = 0;
        const std::uint16_t x_inv_sq = gf_.mul(x_inv, x_inv);
        for (int i = 1; i <= deg_lambda; i += 2) {
            std::uint16_t term = lambda[static_cast<std::size_t>(i)];
            // term * (x_inv)^(i-1), i odd
            for (int e = 0; e < (i - 1) / 2; ++e) term = gf_.mul(term, x_inv_sq);
            den = static_cast<std::uint16_t>(den ^ term);
        }
        if (den == 0) return std::nullopt;
        word[static_cast<std::size_t>(pos)] =
            static_cast<std::uint16_t>(word[static_cast<std::size_t>(pos)] ^ gf_.div(num, den));
    }

    // A corrected word must have zero syndromes; anything else is a failure.
    std::vector<std::uint16_t> check = syndromes(word);
    for (std::uint16_t s : check) {
        if (s != 0) return std::nullopt;
    }

    RsDecodeOutcome out;
    out.message.assign(word.begin(), word.begin() + k_);
    for (int pos : positions) {
        bool was_erased = false;
        for (int e : erased) was_erased = was_erased || e == pos;
        if (was_erased) {
            ++out.erasures_corrected;
        } else {
            ++out.errors_corrected;
        }
    }
    return out;
}

}  // namespace covert
