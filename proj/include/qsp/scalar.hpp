#pragma once

#include <gmpxx.h>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsp {

using Rational = mpq_class;

/// Dense polynomial in the indeterminate v with rational coefficients.
/// Coefficients are stored ascending; the vector never ends in zero.
struct Poly {
    std::vector<Rational> c;

    Poly() = default;
    explicit Poly(Rational r) {
        if (r != 0) c.push_back(std::move(r));
    }

    static Poly zero() { return Poly{}; }
    static Poly one() { return Poly{Rational(1)}; }
    static Poly vpow(int k); // k >= 0

    bool is_zero() const { return c.empty(); }
    int degree() const { return static_cast<int>(c.size()) - 1; }
    int valuation() const; // lowest nonzero exponent, 0 for the zero poly
    const Rational& lead() const { return c.back(); }
    void trim();

    Rational eval(const Rational& x) const;

    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend bool operator==(const Poly& a, const Poly& b) { return a.c == b.c; }

    Poly shifted(int k) const; // multiply by v^k, k >= 0
    Poly reversed() const;     // v^deg * p(1/v), trimmed of trailing/leading zeros
};

/// divmod in Q[v]; q and r with a = q*b + r, deg r < deg b.
void poly_divmod(const Poly& a, const Poly& b, Poly& quo, Poly& rem);
Poly poly_gcd(Poly a, Poly b); // monic gcd
Poly poly_div_exact(const Poly& a, const Poly& b);

/// Element of the field Q(v) where v = q^{1/d}.  Canonical form: the
/// denominator is monic and coprime to the numerator, so equality of values
/// is equality of representations.  Each value carries the d it was created
/// under (0 when v does not occur); combining values from different d throws.
class Scalar {
public:
    Scalar() : num_(), den_(Poly::one()), d_(0) {}
    Scalar(long n) : num_(Rational(n)), den_(Poly::one()), d_(0) {}
    Scalar(int n) : Scalar(static_cast<long>(n)) {}
    explicit Scalar(const Rational& r) : num_(r), den_(Poly::one()), d_(0) {}
    Scalar(Poly num, Poly den, int d);

    /// v^k as a Scalar (k may be negative), v = q^{1/d}.
    static Scalar v_pow(long k, int d);
    /// q^e for a rational exponent e with d*e an integer.
    static Scalar q_pow(const Rational& e, int d);

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const;
    int unit_d() const { return d_; }

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o);
    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    Scalar inv() const;
    /// The bar involution v -> v^{-1}.
    Scalar bar() const;

    /// Evaluate at a rational point (probabilistic fast path for identity
    /// checks; the exact comparison stays the verdict).  Throws if the
    /// denominator vanishes at x.
    Rational eval_at(const Rational& x) const;

    /// Serialization in the report grammar: integers, q, q^(a/d), + - * / ( ).
    std::string str() const;
    /// Parse the same grammar; d is the session root of q in force.
    static Scalar parse(const std::string& text, int d);

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

private:
    Poly num_, den_;
    int d_;
    void normalize();
    static int join_d(int a, int b);
};

/// Balanced q-integer [n] in the variable q_i = v^{epsd}, epsd = d*eps_i.
Scalar qint(long n, long epsd, int d);
/// [n]! in q_i.
Scalar qfactorial(long n, long epsd, int d);
/// Balanced q-binomial [m over n] in q_i; a Laurent polynomial (denominator
/// reduces to a v-power).  Requires m >= n >= 0.
Scalar qbinom(long m, long n, long epsd, int d);

} // namespace qsp
