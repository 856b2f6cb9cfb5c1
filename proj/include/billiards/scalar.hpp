#pragma once

// Scalar backends shared by every geometric routine.
//
// Two backends are supported: `Rational` (exact, GMP-backed, always in lowest
// terms) and `double`. Generic code queries `ScalarTraits<T>` for anything
// that differs between them: sign tests (exact vs. tolerance based) and
// conversion to and from double.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace billiards {

/// Exact rational number. Wraps mpq_class so that expression templates never
/// leak into generic code (`auto x = a * b` is always a value).
class Rational {
public:
    Rational() = default;
    Rational(int v) : q_(v) {}
    Rational(long v) : q_(v) {}
    Rational(long long v) : q_(static_cast<long>(v)) {}
    Rational(long num, long den) {
        if (den == 0) throw std::invalid_argument("rational with zero denominator");
        q_ = mpq_class(num, den);
        q_.canonicalize();
    }
    explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }
    explicit Rational(const mpz_class& z) : q_(z) {}

    /// Parses "p", "-p", "p/q" or a finite decimal literal such as "2.75".
    static Rational parse(std::string_view text) {
        std::string s(text);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
        std::size_t start = 0;
        while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
        s = s.substr(start);
        if (s.empty()) throw std::invalid_argument("empty rational literal");

        auto parse_int = [&](const std::string& part) {
            mpz_class z;
            if (part.empty() || z.set_str(part, 10) != 0)
                throw std::invalid_argument("malformed rational literal \"" + s + "\"");
            return z;
        };

        if (auto slash = s.find('/'); slash != std::string::npos) {
            mpz_class num = parse_int(s.substr(0, slash));
            mpz_class den = parse_int(s.substr(slash + 1));
            if (den == 0) throw std::invalid_argument("zero denominator in \"" + s + "\"");
            return Rational(mpq_class(num, den));
        }
        if (auto dot = s.find('.'); dot != std::string::npos) {
            std::string whole = s.substr(0, dot);
            std::string frac = s.substr(dot + 1);
            bool negative = !whole.empty() && whole[0] == '-';
            if (whole.empty() || whole == "-" || whole == "+") whole += "0";
            mpz_class w = parse_int(whole);
            if (frac.empty()) return Rational(w);
            mpz_class f = parse_int(frac);
            if (f < 0) throw std::invalid_argument("malformed rational literal \"" + s + "\"");
            mpz_class scale;
            mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
            mpz_class num = abs(w) * scale + f;
            if (negative) num = -num;
            return Rational(mpq_class(num, scale));
        }
        return Rational(parse_int(s));
    }

    /// Exact conversion of a finite double (every double is a dyadic rational).
    static Rational from_double(double v) {
        if (!std::isfinite(v)) throw std::domain_error("non-finite double to rational");
        return Rational(mpq_class(v));
    }

    [[nodiscard]] const mpq_class& raw() const { return q_; }
    [[nodiscard]] mpz_class numerator() const { return q_.get_num(); }
    [[nodiscard]] mpz_class denominator() const { return q_.get_den(); }
    [[nodiscard]] double to_double() const { return q_.get_d(); }
    [[nodiscard]] int sign() const { return sgn(q_); }
    [[nodiscard]] bool is_zero() const { return sgn(q_) == 0; }

    /// "p/q", or "p" when the denominator is 1.
    [[nodiscard]] std::string str() const { return q_.get_str(10); }

    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::domain_error("rational division by zero");
        q_ /= o.q_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        int c = cmp(a.q_, b.q_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    mpq_class q_;
};

template <typename T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static constexpr const char* name = "exact";
    static Rational from_double(double v) { return Rational::from_double(v); }
    static double to_double(const Rational& v) { return v.to_double(); }
    static int sign(const Rational& v, double /*scale*/ = 1.0) { return v.sign(); }
    static bool is_zero(const Rational& v, double /*scale*/ = 1.0) { return v.is_zero(); }
    static Rational abs(const Rational& v) { return v.sign() < 0 ? -v : v; }
};

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static constexpr const char* name = "float";
    /// Absolute tolerance for containment / in-plane predicates, applied to
    /// quantities already normalized to unit scale.
    static constexpr double tolerance = 1e-9;
    static double from_double(double v) { return v; }
    static double to_double(double v) { return v; }
    static int sign(double v, double scale = 1.0) {
        if (v > tolerance * scale) return 1;
        if (v < -tolerance * scale) return -1;
        return 0;
    }
    static bool is_zero(double v, double scale = 1.0) { return sign(v, scale) == 0; }
    static double abs(double v) { return std::fabs(v); }
};

template <typename T>
concept Scalar = requires { ScalarTraits<T>::exact; };

template <Scalar T>
double to_double(const T& v) {
    return ScalarTraits<T>::to_double(v);
}

template <Scalar T>
T scalar_from_double(double v) {
    return ScalarTraits<T>::from_double(v);
}

}  // namespace billiards
