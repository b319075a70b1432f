#include "regprob/rational.hpp"

#include <cctype>

namespace regprob {

Rational::Rational(long num, long den) {
    if (den == 0) throw Error("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw Error("rational with zero denominator");
    v_ = mpq_class(num) / mpq_class(den);
    v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) throw Error("division by zero");
    v_ /= o.v_;
    return *this;
}

Rational Rational::pow(unsigned long e) const {
    mpq_class r;
    mpz_pow_ui(r.get_num_mpz_t(), v_.get_num_mpz_t(), e);
    mpz_pow_ui(r.get_den_mpz_t(), v_.get_den_mpz_t(), e);
    // num/den coprime implies num^e/den^e coprime; no canonicalize needed,
    // but den sign matters only if den were negative, which it never is.
    return Rational(std::move(r));
}

mpz_class Rational::floor_mul_2exp(unsigned long k) const {
    mpz_class scaled_num;
    mpz_mul_2exp(scaled_num.get_mpz_t(), v_.get_num_mpz_t(), k);
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), scaled_num.get_mpz_t(), v_.get_den_mpz_t());
    return q;
}

std::string Rational::to_string() const {
    if (v_.get_den() == 1) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::optional<Rational> Rational::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::size_t i = 0;
    if (text[0] == '-' || text[0] == '+') i = 1;
    std::size_t digits = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        ++i;
        ++digits;
    }
    if (digits == 0) return std::nullopt;
    std::string_view den_part;
    if (i < text.size()) {
        if (text[i] != '/') return std::nullopt;
        den_part = text.substr(i + 1);
        if (den_part.empty()) return std::nullopt;
        for (char c : den_part)
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    }
    mpz_class num(std::string(text.substr(0, i)));
    mpz_class den = den_part.empty() ? mpz_class(1) : mpz_class(std::string(den_part));
    if (den == 0) return std::nullopt;
    return Rational(num, den);
}

Rational pow2(long e) {
    mpq_class r(1);
    if (e >= 0)
        mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), static_cast<unsigned long>(e));
    else
        mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), static_cast<unsigned long>(-e));
    return Rational(std::move(r));
}

std::size_t bit_length(const mpz_class& z) {
    if (z == 0) return 0;
    return mpz_sizeinbase(z.get_mpz_t(), 2);
}

long ceil_log2(const Rational& q) {
    if (q.is_zero() || q.is_negative()) throw Error("ceil_log2 requires a positive argument");
    // 2^k >= a/b  <=>  2^k * b >= a.  The answer is within one of
    // bit_length(a) - bit_length(b); search the three candidates.
    long guess = static_cast<long>(bit_length(q.num())) - static_cast<long>(bit_length(q.den()));
    for (long k = guess - 1; k <= guess + 1; ++k) {
        if (pow2(k) >= q) return k;
    }
    throw Error("ceil_log2: no candidate matched");  // unreachable
}

RatMatrix RatMatrix::identity(std::size_t n) {
    RatMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Rational(1);
    return m;
}

Rational inf_norm(const RatVector& v) {
    Rational best;
    for (const auto& x : v) {
        Rational a = x.abs();
        if (a > best) best = a;
    }
    return best;
}

Rational inf_norm(const RatMatrix& m) {
    Rational best;
    for (std::size_t i = 0; i < m.rows; ++i) {
        Rational row_sum;
        for (std::size_t j = 0; j < m.cols; ++j) row_sum += m.at(i, j).abs();
        if (row_sum > best) best = row_sum;
    }
    return best;
}

DyadicVector round_down_dyadic(const RatVector& v, unsigned long k) {
    if (k < 1) throw Error("round_down_dyadic requires k >= 1");
    DyadicVector out;
    out.bits = k;
    out.values.reserve(v.size());
    Rational scale = pow2(-static_cast<long>(k));
    for (const auto& x : v) {
        if (x.is_negative() || x.is_zero()) {
            out.values.emplace_back();
            continue;
        }
        out.values.push_back(Rational(x.floor_mul_2exp(k), mpz_class(1)) * scale);
    }
    return out;
}

Rational round_up_to_dyadic(const Rational& v, unsigned long k) {
    mpz_class scaled_num;
    mpz_mul_2exp(scaled_num.get_mpz_t(), v.num().get_mpz_t(), k);
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), scaled_num.get_mpz_t(), v.den().get_mpz_t());
    return Rational(q, mpz_class(1)) * pow2(-static_cast<long>(k));
}

std::string dyadic_decimal_string(const Rational& v) {
    const mpz_class& den = v.den();
    if (den == 1) return v.num().get_str();
    std::size_t k = bit_length(den) - 1;  // den == 2^k for dyadics
    mpz_class check;
    mpz_ui_pow_ui(check.get_mpz_t(), 2, k);
    if (check != den) throw Error("dyadic_decimal_string: denominator is not a power of two");
    mpz_class five_k;
    mpz_ui_pow_ui(five_k.get_mpz_t(), 5, k);
    mpz_class scaled = v.num() * five_k;  // v = scaled / 10^k
    bool neg = scaled < 0;
    mpz_class magnitude(abs(scaled));
    std::string digits = magnitude.get_str();
    if (digits.size() <= k) digits.insert(0, k + 1 - digits.size(), '0');
    digits.insert(digits.size() - k, ".");
    return (neg ? "-" : "") + digits;
}

}  // namespace regprob
