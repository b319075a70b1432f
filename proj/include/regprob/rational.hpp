#ifndef REGPROB_RATIONAL_HPP
#define REGPROB_RATIONAL_HPP

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regprob/errors.hpp"

namespace regprob {

/// Exact rational scalar. Always stored in lowest terms with positive
/// denominator; every operation is exact.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}  // NOLINT: implicit by design
    Rational(long num, long den);
    explicit Rational(const mpz_class& num, const mpz_class& den);
    explicit Rational(mpq_class q) : v_(std::move(q)) { v_.canonicalize(); }

    const mpz_class& num() const { return v_.get_num(); }
    const mpz_class& den() const { return v_.get_den(); }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_negative() const { return sgn(v_) < 0; }
    bool is_integer() const { return v_.get_den() == 1; }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    Rational operator-() const { return Rational(mpq_class(-v_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    Rational abs() const { return Rational(mpq_class(::abs(v_))); }

    /// Exact nonnegative integer power.
    Rational pow(unsigned long e) const;

    /// floor(v * 2^k) as an integer.
    mpz_class floor_mul_2exp(unsigned long k) const;

    /// "a/b", or just "a" when the denominator is 1.
    std::string to_string() const;

    /// Accepts "a", "-a", "a/b" with b > 0 after sign normalization.
    static std::optional<Rational> parse(std::string_view text);

    double to_double() const { return v_.get_d(); }

private:
    mpq_class v_;
};

/// 2^e for any integer e (negative exponents give dyadic fractions).
Rational pow2(long e);

/// Number of bits of |z|; bit_length(0) == 0, bit_length(1) == 1.
std::size_t bit_length(const mpz_class& z);

/// Smallest integer k with 2^k >= q. Requires q > 0.
long ceil_log2(const Rational& q);

using RatVector = std::vector<Rational>;

struct RatMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Rational> a;  // row-major

    RatMatrix() = default;
    RatMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

    Rational& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const Rational& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static RatMatrix identity(std::size_t n);
    bool operator==(const RatMatrix& o) const = default;
};

Rational inf_norm(const RatVector& v);
Rational inf_norm(const RatMatrix& m);  // max absolute row sum

/// Nonnegative vector whose entries are all multiples of 2^-bits.
struct DyadicVector {
    unsigned long bits = 0;
    RatVector values;

    bool operator==(const DyadicVector& o) const = default;
};

/// Per-coordinate floor(max(v_i, 0) * 2^k) / 2^k.
DyadicVector round_down_dyadic(const RatVector& v, unsigned long k);

/// ceil(v * 2^k) / 2^k.
Rational round_up_to_dyadic(const Rational& v, unsigned long k);

/// Exact finite decimal expansion of a dyadic rational (denominator a power
/// of two); used when serializing rounded iterates.
std::string dyadic_decimal_string(const Rational& v);

}  // namespace regprob

#endif
