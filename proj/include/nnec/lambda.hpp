#ifndef NNEC_LAMBDA_HPP
#define NNEC_LAMBDA_HPP

#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "error.hpp"

namespace nnec {

/**
 * @brief Exact positive rational threshold for the equilibrium condition.
 *
 * The membership test compares |N_k(x) ∩ C| / k against λ |C| / n. Holding λ as
 * num/den lets that test run in integer arithmetic as
 * `den * n * overlap > num * k * |C|`, so decimal grids like 1.0, 1.2, ...
 * and thirds like 4/3 never suffer round-off at the boundary.
 */
class Lambda {
public:
    /// Largest denominator accepted. Keeps den*n*k well inside int64 for n up to ~10^9/k.
    static constexpr std::int64_t max_denominator = 1000000;

    constexpr Lambda() = default;

    Lambda(std::int64_t num, std::int64_t den) {
        if (den <= 0 || num <= 0) {
            throw ValidationError("lambda must be a positive rational, got " + std::to_string(num) + "/" +
                                  std::to_string(den));
        }
        const auto g = std::gcd(num, den);
        num_ = num / g;
        den_ = den / g;
        if (den_ > max_denominator) {
            throw ValidationError("lambda denominator too large: " + std::to_string(den_));
        }
    }

    /// Tenths, e.g. `from_tenths(20)` is 2.0.
    static Lambda from_tenths(std::int64_t tenths) { return Lambda(tenths, 10); }

    /**
     * Parses a decimal literal exactly ("2", "1.25", "0.5"). Fractions "a/b" are
     * also accepted. Anything else (exponents, signs, junk) is rejected.
     */
    static Lambda parse(std::string_view text) {
        const auto bad = [&] { return ValidationError("invalid lambda value '" + std::string(text) + "'"); };
        if (text.empty()) {
            throw bad();
        }
        if (const auto slash = text.find('/'); slash != std::string_view::npos) {
            return Lambda(parse_digits(text.substr(0, slash), bad), parse_digits(text.substr(slash + 1), bad));
        }
        const auto dot = text.find('.');
        const auto int_part = text.substr(0, dot);
        const auto frac_part = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
        if (int_part.empty() && frac_part.empty()) {
            throw bad();
        }
        if (frac_part.size() > 6) {
            throw bad();
        }
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac_part.size(); ++i) {
            den *= 10;
        }
        const std::int64_t whole = int_part.empty() ? 0 : parse_digits(int_part, bad);
        const std::int64_t frac = frac_part.empty() ? 0 : parse_digits(frac_part, bad);
        if (whole > (std::int64_t{1} << 40)) {
            throw bad();
        }
        return Lambda(whole * den + frac, den);
    }

    /// Nearest multiple of 1/1000 to `value`. Used only for values that arrive as doubles.
    static Lambda approximate(double value) {
        if (!std::isfinite(value) || value <= 0.0) {
            throw ValidationError("lambda must be positive and finite");
        }
        const auto thousandths = static_cast<std::int64_t>(std::llround(value * 1000.0));
        if (thousandths <= 0) {
            throw ValidationError("lambda rounds to zero at 1/1000 resolution");
        }
        return Lambda(thousandths, 1000);
    }

    constexpr std::int64_t num() const { return num_; }
    constexpr std::int64_t den() const { return den_; }
    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string to_string() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend bool operator==(const Lambda& a, const Lambda& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend std::strong_ordering operator<=>(const Lambda& a, const Lambda& b) {
        return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
    }

    friend Lambda operator+(const Lambda& a, const Lambda& b) {
        return Lambda(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }

private:
    template <typename MakeError>
    static std::int64_t parse_digits(std::string_view s, const MakeError& bad) {
        if (s.empty() || s.size() > 15) {
            throw bad();
        }
        std::int64_t out = 0;
        for (char c : s) {
            if (c < '0' || c > '9') {
                throw bad();
            }
            out = out * 10 + (c - '0');
        }
        return out;
    }

    std::int64_t num_ = 1;
    std::int64_t den_ = 1;
};

}  // namespace nnec

#endif  // NNEC_LAMBDA_HPP
