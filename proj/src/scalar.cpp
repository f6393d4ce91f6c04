#include "qsp/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace qsp {

void Poly::trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

Poly Poly::vpow(int k) {
    Poly p;
    p.c.assign(static_cast<size_t>(k) + 1, Rational(0));
    p.c.back() = 1;
    return p;
}

int Poly::valuation() const {
    for (size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0) return static_cast<int>(i);
    return 0;
}

Rational Poly::eval(const Rational& x) const {
    Rational acc(0);
    for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

Poly Poly::shifted(int k) const {
    if (is_zero()) return Poly{};
    Poly p;
    p.c.assign(c.size() + static_cast<size_t>(k), Rational(0));
    for (size_t i = 0; i < c.size(); ++i) p.c[i + k] = c[i];
    return p;
}

Poly Poly::reversed() const {
    Poly p;
    p.c.assign(c.rbegin(), c.rend());
    p.trim();
    // strip leading zeros (old trailing), i.e. divide by v^k
    size_t k = 0;
    while (k < p.c.size() && p.c[k] == 0) ++k;
    if (k) p.c.erase(p.c.begin(), p.c.begin() + k);
    return p;
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), Rational(0));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
    r.trim();
    return r;
}

Poly operator-(const Poly& a, const Poly& b) {
    Poly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), Rational(0));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] -= b.c[i];
    r.trim();
    return r;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly{};
    Poly r;
    r.c.assign(a.c.size() + b.c.size() - 1, Rational(0));
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        for (size_t j = 0; j < b.c.size(); ++j) {
            if (b.c[j] == 0) continue;
            r.c[i + j] += a.c[i] * b.c[j];
        }
    }
    r.trim();
    return r;
}

void poly_divmod(const Poly& a, const Poly& b, Poly& quo, Poly& rem) {
    if (b.is_zero()) throw std::domain_error("poly_divmod: division by zero polynomial");
    rem = a;
    quo = Poly{};
    if (a.degree() < b.degree()) return;
    quo.c.assign(static_cast<size_t>(a.degree() - b.degree()) + 1, Rational(0));
    Rational invlead = 1 / b.lead();
    while (!rem.is_zero() && rem.degree() >= b.degree()) {
        int k = rem.degree() - b.degree();
        Rational f = rem.lead() * invlead;
        quo.c[k] = f;
        for (size_t i = 0; i < b.c.size(); ++i) rem.c[i + k] -= f * b.c[i];
        rem.trim();
    }
}

namespace {

// primitive integer image of a rational polynomial
std::vector<mpz_class> to_primitive(const Poly& p) {
    mpz_class l(1);
    for (const auto& c : p.c) {
        mpz_class t;
        mpz_lcm(t.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
        l = t;
    }
    std::vector<mpz_class> out;
    out.reserve(p.c.size());
    mpz_class g(0);
    for (const auto& c : p.c) {
        out.push_back(mpz_class(c.get_num() * (l / c.get_den())));
        mpz_class t;
        mpz_gcd(t.get_mpz_t(), g.get_mpz_t(), out.back().get_mpz_t());
        g = t;
    }
    if (g != 0 && g != 1)
        for (auto& x : out) x /= g;
    return out;
}

void strip_content(std::vector<mpz_class>& p) {
    mpz_class g(0);
    for (const auto& x : p) {
        mpz_class t;
        mpz_gcd(t.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        g = t;
    }
    if (g != 0 && g != 1)
        for (auto& x : p) x /= g;
}

void trim_int(std::vector<mpz_class>& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

} // namespace

Poly poly_gcd(Poly a, Poly b) {
    if (a.is_zero() && b.is_zero()) return Poly::one();
    // primitive polynomial remainder sequence over Z[v]; pseudo-division with
    // content stripping keeps the integer coefficients polynomially bounded
    std::vector<mpz_class> A = to_primitive(a), B = to_primitive(b);
    trim_int(A);
    trim_int(B);
    if (A.size() < B.size()) std::swap(A, B);
    while (!B.empty()) {
        // pseudo-remainder: R with lc(B)^k A = Q B + R, deg R < deg B
        long da = static_cast<long>(A.size()) - 1, db = static_cast<long>(B.size()) - 1;
        const mpz_class lb = B.back();
        std::vector<mpz_class> R = A;
        for (long k = da; k >= db; --k) {
            if (static_cast<long>(R.size()) - 1 < k) continue;
            mpz_class f = R[static_cast<size_t>(k)];
            if (f == 0) continue;
            for (auto& x : R) x *= lb;
            for (long i = 0; i <= db; ++i) R[static_cast<size_t>(k - db + i)] -= f * B[static_cast<size_t>(i)];
            trim_int(R);
        }
        strip_content(R);
        A = std::move(B);
        B = std::move(R);
    }
    Poly g;
    g.c.reserve(A.size());
    for (auto& x : A) g.c.emplace_back(Rational(x));
    g.trim();
    if (g.is_zero()) return Poly::one();
    Rational il = 1 / g.lead();
    for (auto& x : g.c) x *= il;
    return g;
}

Poly poly_div_exact(const Poly& a, const Poly& b) {
    Poly q, r;
    poly_divmod(a, b, q, r);
    if (!r.is_zero()) throw std::domain_error("poly_div_exact: inexact division");
    return q;
}

Scalar::Scalar(Poly num, Poly den, int d) : num_(std::move(num)), den_(std::move(den)), d_(d) {
    if (den_.is_zero()) throw std::domain_error("Scalar: zero denominator");
    normalize();
}

int Scalar::join_d(int a, int b) {
    if (a == 0) return b;
    if (b == 0) return a;
    if (a != b) throw std::domain_error("Scalar: mixing values from different q-roots d");
    return a;
}

void Scalar::normalize() {
    if (num_.is_zero()) {
        den_ = Poly::one();
        d_ = 0;
        return;
    }
    Poly g = poly_gcd(num_, den_);
    if (g.degree() > 0) {
        num_ = poly_div_exact(num_, g);
        den_ = poly_div_exact(den_, g);
    }
    Rational il = 1 / den_.lead();
    if (il != 1) {
        for (auto& x : num_.c) x *= il;
        for (auto& x : den_.c) x *= il;
    }
    if (num_.degree() <= 0 && den_.degree() <= 0) d_ = 0;
}

Scalar Scalar::v_pow(long k, int d) {
    Scalar s;
    if (k >= 0)
        s = Scalar(Poly::vpow(static_cast<int>(k)), Poly::one(), d);
    else
        s = Scalar(Poly::one(), Poly::vpow(static_cast<int>(-k)), d);
    s.d_ = (k == 0) ? 0 : d;
    return s;
}

Scalar Scalar::q_pow(const Rational& e, int d) {
    Rational k = e * d;
    if (k.get_den() != 1)
        throw std::domain_error("Scalar::q_pow: exponent " + std::string(e.get_str()) +
                                " not in (1/d)Z for d=" + std::to_string(d));
    if (!k.get_num().fits_slong_p()) throw std::domain_error("Scalar::q_pow: exponent overflow");
    return v_pow(k.get_num().get_si(), d);
}

bool Scalar::is_one() const {
    return den_.degree() == 0 && num_.degree() == 0 && !num_.is_zero() && num_.c[0] == den_.c[0];
}

Scalar Scalar::operator-() const {
    Scalar r(*this);
    for (auto& x : r.num_.c) x = -x;
    return r;
}

namespace {

bool poly_is_one(const Poly& p) {
    return p.degree() == 0 && p.c[0] == 1;
}

} // namespace

// Both operands are canonical, so the cross-gcd trick keeps every gcd small:
// for sums gcd(b, d) is extracted first; for products gcd(a, d) and gcd(c, b)
// leave the factors coprime.

Scalar& Scalar::operator+=(const Scalar& o) {
    d_ = join_d(d_, o.d_);
    if (o.is_zero()) return *this;
    if (is_zero()) {
        num_ = o.num_;
        den_ = o.den_;
        return *this;
    }
    Poly g = poly_gcd(den_, o.den_);
    if (poly_is_one(g)) {
        num_ = num_ * o.den_ + o.num_ * den_;
        den_ = den_ * o.den_;
        num_.trim();
        if (num_.is_zero()) {
            den_ = Poly::one();
            d_ = 0;
            return *this;
        }
        Rational il = 1 / den_.lead();
        if (il != 1) {
            for (auto& x : num_.c) x *= il;
            for (auto& x : den_.c) x *= il;
        }
        if (num_.degree() <= 0 && den_.degree() <= 0) d_ = 0;
        return *this;
    }
    Poly bred = poly_div_exact(den_, g);
    Poly dred = poly_div_exact(o.den_, g);
    Poly t = num_ * dred + o.num_ * bred;
    if (t.is_zero()) {
        num_ = Poly{};
        den_ = Poly::one();
        d_ = 0;
        return *this;
    }
    Poly g2 = poly_gcd(t, g);
    if (!poly_is_one(g2)) {
        t = poly_div_exact(t, g2);
        g = poly_div_exact(g, g2);
    }
    num_ = std::move(t);
    den_ = bred * dred * g;
    Rational il = 1 / den_.lead();
    if (il != 1) {
        for (auto& x : num_.c) x *= il;
        for (auto& x : den_.c) x *= il;
    }
    if (num_.degree() <= 0 && den_.degree() <= 0) d_ = 0;
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
    return *this += -o;
}

Scalar& Scalar::operator*=(const Scalar& o) {
    d_ = join_d(d_, o.d_);
    if (is_zero() || o.is_zero()) {
        num_ = Poly{};
        den_ = Poly::one();
        d_ = 0;
        return *this;
    }
    Poly a = num_, b = den_, c = o.num_, d = o.den_;
    Poly g1 = poly_gcd(a, d);
    if (!poly_is_one(g1)) {
        a = poly_div_exact(a, g1);
        d = poly_div_exact(d, g1);
    }
    Poly g2 = poly_gcd(c, b);
    if (!poly_is_one(g2)) {
        c = poly_div_exact(c, g2);
        b = poly_div_exact(b, g2);
    }
    num_ = a * c;
    den_ = b * d;
    Rational il = 1 / den_.lead();
    if (il != 1) {
        for (auto& x : num_.c) x *= il;
        for (auto& x : den_.c) x *= il;
    }
    if (num_.degree() <= 0 && den_.degree() <= 0) d_ = 0;
    return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
    if (o.is_zero()) throw std::domain_error("Scalar: division by zero");
    return *this *= o.inv();
}

Scalar Scalar::inv() const {
    if (is_zero()) throw std::domain_error("Scalar: inverse of zero");
    // canonical input: numerator and denominator already coprime
    Scalar r;
    r.num_ = den_;
    r.den_ = num_;
    r.d_ = d_;
    Rational il = 1 / r.den_.lead();
    if (il != 1) {
        for (auto& x : r.num_.c) x *= il;
        for (auto& x : r.den_.c) x *= il;
    }
    if (r.num_.degree() <= 0 && r.den_.degree() <= 0) r.d_ = 0;
    return r;
}

Scalar Scalar::bar() const {
    if (is_zero()) return Scalar();
    // p(1/v)/q(1/v) = rev(p) v^{deg q - deg p} / rev(q)
    Poly rn = num_.reversed();
    Poly rd = den_.reversed();
    int shift = den_.degree() - num_.degree();
    Scalar r;
    if (shift >= 0)
        r = Scalar(rn.shifted(shift), rd, d_);
    else
        r = Scalar(rn, rd.shifted(-shift), d_);
    r.d_ = d_;
    r.normalize();
    return r;
}

Rational Scalar::eval_at(const Rational& x) const {
    Rational dv = den_.eval(x);
    if (dv == 0) throw std::domain_error("Scalar::eval_at: denominator vanishes");
    return num_.eval(x) / dv;
}

namespace {

std::string rational_str(const Rational& r) {
    return r.get_str();
}

// prints a monomial c*v^k in the q grammar
void print_term(std::ostream& os, const Rational& coef, int k, int d, bool first) {
    Rational c = coef;
    if (!first) {
        if (c < 0) {
            os << " - ";
            c = -c;
        } else {
            os << " + ";
        }
    } else if (c < 0) {
        os << "-";
        c = -c;
    }
    bool unit_coef = (c == 1);
    if (k == 0) {
        os << rational_str(c);
        return;
    }
    if (!unit_coef) os << rational_str(c) << "*";
    if (k == d) {
        os << "q";
    } else if (k % d == 0) {
        os << "q^" << (k / d);
    } else {
        Rational e(k, d);
        e.canonicalize();
        os << "q^(" << e.get_num().get_str() << "/" << e.get_den().get_str() << ")";
    }
}

void print_poly(std::ostream& os, const Poly& p, int d) {
    if (p.is_zero()) {
        os << "0";
        return;
    }
    bool first = true;
    for (int k = p.degree(); k >= 0; --k) {
        if (p.c[k] == 0) continue;
        print_term(os, p.c[k], k, d, first);
        first = false;
    }
}

} // namespace

std::string Scalar::str() const {
    int d = d_ ? d_ : 1;
    std::ostringstream os;
    bool denom_trivial = (den_.degree() == 0);
    // pull v-powers of the denominator into negative q-exponents only when the
    // denominator is a pure power of v
    if (!denom_trivial && den_.valuation() == den_.degree()) {
        // den = v^k (monic)
        Poly shiftedNum = num_;
        std::ostringstream os2;
        os2 << "(";
        print_poly(os2, shiftedNum, d);
        os2 << ")*q^(";
        Rational e(-den_.degree(), d);
        e.canonicalize();
        os2 << e.get_num().get_str();
        if (e.get_den() != 1) os2 << "/" << e.get_den().get_str();
        os2 << ")";
        // simple single-term numerators read better without parens
        int terms = 0;
        for (const auto& cc : num_.c)
            if (cc != 0) ++terms;
        if (terms == 1) {
            std::ostringstream os3;
            print_term(os3, num_.c[num_.valuation()], num_.valuation() - den_.degree(), d, true);
            return os3.str();
        }
        return os2.str();
    }
    if (denom_trivial) {
        print_poly(os, num_, d);
        return os.str();
    }
    os << "(";
    print_poly(os, num_, d);
    os << ")/(";
    print_poly(os, den_, d);
    os << ")";
    return os.str();
}

// ---- parser for the scalar grammar ----

namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;
    int d;

    explicit Parser(const std::string& text, int dd) : s(text), d(dd) {}

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw std::domain_error("Scalar::parse: " + what + " at position " + std::to_string(pos) +
                                " in \"" + s + "\"");
    }

    long integer() {
        skip();
        bool neg = eat('-');
        skip();
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) fail("expected integer");
        long v = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            v = v * 10 + (s[pos] - '0');
            ++pos;
        }
        return neg ? -v : v;
    }

    Rational exponent() {
        skip();
        if (eat('(')) {
            long a = integer();
            Rational e(a, 1);
            if (eat('/')) {
                long b = integer();
                e = Rational(a, b);
                e.canonicalize();
            }
            if (!eat(')')) fail("expected ')' in exponent");
            return e;
        }
        return Rational(integer(), 1);
    }

    Scalar atom() {
        skip();
        if (eat('(')) {
            Scalar e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (pos < s.size() && (s[pos] == 'q' || s[pos] == 'v')) {
            bool isv = (s[pos] == 'v');
            ++pos;
            Rational e(1, 1);
            bool powed = false;
            skip();
            if (pos < s.size() && s[pos] == '^') {
                ++pos;
                e = exponent();
                powed = true;
            }
            (void)powed;
            if (isv) e /= d;
            return Scalar::q_pow(e, d);
        }
        if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            long v = integer();
            return Scalar(v);
        }
        fail("expected atom");
    }

    Scalar factor() {
        skip();
        if (eat('-')) return -factor();
        return atom();
    }

    Scalar term() {
        Scalar r = factor();
        for (;;) {
            skip();
            if (eat('*')) {
                r *= factor();
            } else if (eat('/')) {
                Scalar f = factor();
                if (f.is_zero()) fail("division by zero");
                r /= f;
            } else {
                break;
            }
        }
        return r;
    }

    Scalar expr() {
        Scalar r = term();
        for (;;) {
            skip();
            if (pos < s.size() && s[pos] == '+') {
                ++pos;
                r += term();
            } else if (pos < s.size() && s[pos] == '-') {
                ++pos;
                r -= term();
            } else {
                break;
            }
        }
        return r;
    }
};

} // namespace

Scalar Scalar::parse(const std::string& text, int d) {
    Parser p(text, d);
    Scalar r = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    return r;
}

Scalar qint(long n, long epsd, int d) {
    if (n < 0) throw std::domain_error("qint: negative argument");
    // [n] = sum_{k=0}^{n-1} v^{epsd(n-1-2k)}
    Scalar acc;
    for (long k = 0; k < n; ++k) acc += Scalar::v_pow(epsd * (n - 1 - 2 * k), d);
    return acc;
}

Scalar qfactorial(long n, long epsd, int d) {
    if (n < 0) throw std::domain_error("qfactorial: negative argument");
    Scalar acc(1);
    for (long k = 2; k <= n; ++k) acc *= qint(k, epsd, d);
    return acc;
}

Scalar qbinom(long m, long n, long epsd, int d) {
    if (n < 0 || m < n) throw std::domain_error("qbinom: requires m >= n >= 0");
    Scalar r = qfactorial(m, epsd, d) / (qfactorial(n, epsd, d) * qfactorial(m - n, epsd, d));
    // reduced form must be a Laurent polynomial
    const Poly& den = r.den();
    if (den.degree() != den.valuation())
        throw std::logic_error("qbinom: result is not a Laurent polynomial");
    return r;
}

} // namespace qsp
