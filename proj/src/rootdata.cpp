#include "qsp/rootdata.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace qsp {

QVec qvec_add(const QVec& a, const QVec& b) {
    QVec r(a);
    for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}
QVec qvec_sub(const QVec& a, const QVec& b) {
    QVec r(a);
    for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}
QVec qvec_neg(const QVec& a) {
    QVec r(a);
    for (auto& x : r) x = -x;
    return r;
}
bool qvec_is_zero(const QVec& a) {
    return std::all_of(a.begin(), a.end(), [](int x) { return x == 0; });
}
bool qvec_nonneg(const QVec& a) {
    return std::all_of(a.begin(), a.end(), [](int x) { return x >= 0; });
}
int qvec_height(const QVec& a) {
    return std::accumulate(a.begin(), a.end(), 0);
}
QVec qvec_zero(int n) {
    return QVec(static_cast<size_t>(n), 0);
}
PWeight pw_from_qvec(const QVec& a) {
    PWeight r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = Rational(a[i]);
    return r;
}
PWeight pw_add(const PWeight& a, const PWeight& b) {
    PWeight r(a);
    for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}
PWeight pw_sub(const PWeight& a, const PWeight& b) {
    PWeight r(a);
    for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}
PWeight pw_neg(const PWeight& a) {
    PWeight r(a);
    for (auto& x : r) x = -x;
    return r;
}
PWeight pw_scale(const PWeight& a, const Rational& c) {
    PWeight r(a);
    for (auto& x : r) x *= c;
    return r;
}
bool pw_is_zero(const PWeight& a) {
    return std::all_of(a.begin(), a.end(), [](const Rational& x) { return x == 0; });
}
std::string qvec_str(const QVec& a) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
    os << ")";
    return os.str();
}
std::string pw_str(const PWeight& a) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i].get_str();
    os << ")";
    return os.str();
}

namespace {

// small integer matrix helpers for Weyl-group bookkeeping
using IMat = std::vector<std::vector<long>>;

IMat imat_identity(int n) {
    IMat m(n, std::vector<long>(n, 0));
    for (int i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}
IMat imat_mul(const IMat& a, const IMat& b) {
    int n = static_cast<int>(a.size());
    IMat r(n, std::vector<long>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (a[i][k] == 0) continue;
            for (int j = 0; j < n; ++j) r[i][j] += a[i][k] * b[k][j];
        }
    return r;
}
bool imat_is_identity(const IMat& a) {
    int n = static_cast<int>(a.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (a[i][j] != (i == j ? 1 : 0)) return false;
    return true;
}
QVec imat_apply(const IMat& a, const QVec& v) {
    int n = static_cast<int>(a.size());
    QVec r(static_cast<size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        long acc = 0;
        for (int j = 0; j < n; ++j) acc += a[i][j] * v[j];
        r[static_cast<size_t>(i)] = static_cast<int>(acc);
    }
    return r;
}

// column i of the matrix as a QVec
QVec imat_col(const IMat& a, int i) {
    QVec r(a.size(), 0);
    for (size_t r2 = 0; r2 < a.size(); ++r2) r[r2] = static_cast<int>(a[r2][static_cast<size_t>(i)]);
    return r;
}

bool qvec_strictly_negative(const QVec& v) {
    bool nonzero = false;
    for (int x : v) {
        if (x > 0) return false;
        if (x < 0) nonzero = true;
    }
    return nonzero;
}

Rational rational_det(std::vector<std::vector<Rational>> m) {
    int n = static_cast<int>(m.size());
    Rational det(1);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (m[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return Rational(0);
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        Rational ip = 1 / m[c][c];
        for (int r = c + 1; r < n; ++r) {
            if (m[r][c] == 0) continue;
            Rational f = m[r][c] * ip;
            for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

} // namespace

RootDatum::RootDatum(std::vector<std::vector<int>> cartan) : cartan_(std::move(cartan)) {
    n_ = static_cast<int>(cartan_.size());
    if (n_ == 0) throw std::domain_error("RootDatum: empty Cartan matrix");
    for (auto& row : cartan_)
        if (static_cast<int>(row.size()) != n_) throw std::domain_error("RootDatum: non-square Cartan matrix");
    for (int i = 0; i < n_; ++i) {
        if (cartan_[i][i] != 2) throw std::domain_error("RootDatum: diagonal entries must be 2");
        for (int j = 0; j < n_; ++j)
            if (i != j && cartan_[i][j] > 0) throw std::domain_error("RootDatum: positive off-diagonal entry");
        for (int j = 0; j < n_; ++j)
            if (i != j && ((cartan_[i][j] == 0) != (cartan_[j][i] == 0)))
                throw std::domain_error("RootDatum: not symmetrizable (zero pattern)");
    }
    compute_symmetrizers();

    // finite type <=> symmetrized form positive definite
    std::vector<std::vector<Rational>> sym(n_, std::vector<Rational>(n_));
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) sym[i][j] = Rational(eps_[i] * cartan_[i][j]);
    finite_ = true;
    for (int k = 1; k <= n_ && finite_; ++k) {
        std::vector<std::vector<Rational>> lead(k, std::vector<Rational>(k));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) lead[i][j] = sym[i][j];
        if (rational_det(lead) <= 0) finite_ = false;
    }

    if (finite_) {
        // rank(A) = |I|, so A_ext = A in the block formula of the minimal realization
        std::vector<std::vector<Rational>> a(n_, std::vector<Rational>(n_));
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) a[i][j] = Rational(cartan_[i][j]);
        Rational det = rational_det(a);
        det_ = static_cast<long>(mpz_class(det.get_num()).get_si());
        long ad = det_ < 0 ? -det_ : det_;
        d_ = static_cast<int>(ad);
        // fundamental weights: column j of A^{-1} in the alpha basis
        fw_.assign(static_cast<size_t>(n_), PWeight(static_cast<size_t>(n_), Rational(0)));
        for (int j = 0; j < n_; ++j) {
            // solve A c = e_j by elimination
            std::vector<std::vector<Rational>> m(n_, std::vector<Rational>(n_ + 1));
            for (int r = 0; r < n_; ++r) {
                for (int c = 0; c < n_; ++c) m[r][c] = Rational(cartan_[r][c]);
                m[r][n_] = Rational(r == j ? 1 : 0);
            }
            for (int c = 0; c < n_; ++c) {
                int piv = c;
                while (m[piv][c] == 0) ++piv;
                std::swap(m[piv], m[c]);
                Rational ip = 1 / m[c][c];
                for (int k = c; k <= n_; ++k) m[c][k] *= ip;
                for (int r = 0; r < n_; ++r) {
                    if (r == c || m[r][c] == 0) continue;
                    Rational f = m[r][c];
                    for (int k = c; k <= n_; ++k) m[r][k] -= f * m[c][k];
                }
            }
            for (int r = 0; r < n_; ++r) fw_[static_cast<size_t>(j)][static_cast<size_t>(r)] = m[r][n_];
        }
    } else {
        det_ = 0;
        d_ = 1;
    }
}

void RootDatum::compute_symmetrizers() {
    // propagate rational eps over the Dynkin graph, then clear denominators
    std::vector<Rational> e(static_cast<size_t>(n_), Rational(0));
    for (int start = 0; start < n_; ++start) {
        if (e[static_cast<size_t>(start)] != 0) continue;
        e[static_cast<size_t>(start)] = 1;
        std::vector<int> stack{start};
        while (!stack.empty()) {
            int i = stack.back();
            stack.pop_back();
            for (int j = 0; j < n_; ++j) {
                if (i == j || cartan_[i][j] == 0) continue;
                Rational want = e[static_cast<size_t>(i)] * cartan_[i][j] / cartan_[j][i];
                if (e[static_cast<size_t>(j)] == 0) {
                    e[static_cast<size_t>(j)] = want;
                    stack.push_back(j);
                } else if (e[static_cast<size_t>(j)] != want) {
                    throw std::domain_error("RootDatum: Cartan matrix is not symmetrizable");
                }
            }
        }
    }
    mpz_class lcm_den(1), gcd_num(0);
    for (auto& x : e) {
        mpz_class l;
        mpz_lcm(l.get_mpz_t(), lcm_den.get_mpz_t(), x.get_den().get_mpz_t());
        lcm_den = l;
    }
    std::vector<mpz_class> ints;
    for (auto& x : e) ints.push_back(mpz_class(x.get_num() * (lcm_den / x.get_den())));
    for (auto& x : ints) {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), gcd_num.get_mpz_t(), x.get_mpz_t());
        gcd_num = g;
    }
    eps_.clear();
    for (auto& x : ints) eps_.push_back(mpz_class(x / gcd_num).get_si());
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (eps_[i] * cartan_[i][j] != eps_[j] * cartan_[j][i])
                throw std::domain_error("RootDatum: Cartan matrix is not symmetrizable");
}

void RootDatum::require_finite(const char* what) const {
    if (!finite_) throw std::domain_error(std::string(what) + ": requires finite type");
}

long RootDatum::pair_qq(const QVec& a, const QVec& b) const {
    long acc = 0;
    for (int i = 0; i < n_; ++i) {
        if (a[i] == 0) continue;
        for (int j = 0; j < n_; ++j) acc += a[i] * eps_[i] * cartan_[i][j] * b[j];
    }
    return acc;
}

Rational RootDatum::pair(const PWeight& a, const PWeight& b) const {
    Rational acc(0);
    for (int i = 0; i < n_; ++i) {
        if (a[i] == 0) continue;
        for (int j = 0; j < n_; ++j)
            if (b[j] != 0) acc += a[i] * Rational(eps_[i] * cartan_[i][j]) * b[j];
    }
    return acc;
}

Rational RootDatum::hpair(const PWeight& lam, int i) const {
    Rational acc(0);
    for (int j = 0; j < n_; ++j)
        if (lam[j] != 0) acc += lam[j] * Rational(cartan_[i][j]);
    return acc;
}

long RootDatum::hpair_q(const QVec& lam, int i) const {
    long acc = 0;
    for (int j = 0; j < n_; ++j) acc += static_cast<long>(lam[j]) * cartan_[i][j];
    return acc;
}

Scalar RootDatum::q_power(const Rational& e) const {
    return Scalar::q_pow(e, d_);
}

Scalar RootDatum::q_pair(const PWeight& a, const PWeight& b) const {
    return q_power(pair(a, b));
}

Scalar RootDatum::qi(int i) const {
    return Scalar::v_pow(d_ * eps_[i], d_);
}

Scalar RootDatum::qi_bracket(int i) const {
    return qi(i) - qi(i).inv();
}

PWeight RootDatum::reflect(int i, const PWeight& lam) const {
    PWeight r(lam);
    Rational c = hpair(lam, i);
    r[static_cast<size_t>(i)] -= c;
    return r;
}

QVec RootDatum::reflect_q(int i, const QVec& lam) const {
    QVec r(lam);
    r[static_cast<size_t>(i)] -= static_cast<int>(hpair_q(lam, i));
    return r;
}

PWeight RootDatum::apply_word(const std::vector<int>& word, const PWeight& lam) const {
    PWeight r(lam);
    for (auto it = word.rbegin(); it != word.rend(); ++it) r = reflect(*it, r);
    return r;
}

QVec RootDatum::apply_word_q(const std::vector<int>& word, const QVec& lam) const {
    QVec r(lam);
    for (auto it = word.rbegin(); it != word.rend(); ++it) r = reflect_q(*it, r);
    return r;
}

PWeight RootDatum::rho() const {
    require_finite("rho");
    PWeight r(static_cast<size_t>(n_), Rational(0));
    for (int i = 0; i < n_; ++i) r = pw_add(r, fw_[static_cast<size_t>(i)]);
    return r;
}

bool RootDatum::is_dominant(const PWeight& lam) const {
    for (int i = 0; i < n_; ++i) {
        Rational c = hpair(lam, i);
        if (c < 0 || c.get_den() != 1) return false;
    }
    return true;
}

QVec RootDatum::simple_root(int i) const {
    QVec r = qvec_zero(n_);
    r[static_cast<size_t>(i)] = 1;
    return r;
}

const std::vector<QVec>& RootDatum::positive_roots() const {
    if (!posroots_.empty()) return posroots_;
    require_finite("positive_roots");
    std::set<QVec> all;
    std::vector<QVec> frontier;
    for (int i = 0; i < n_; ++i) {
        all.insert(simple_root(i));
        frontier.push_back(simple_root(i));
    }
    while (!frontier.empty()) {
        std::vector<QVec> next;
        for (const auto& r : frontier)
            for (int i = 0; i < n_; ++i) {
                QVec s = reflect_q(i, r);
                if (!all.count(s)) {
                    all.insert(s);
                    next.push_back(s);
                }
            }
        frontier = std::move(next);
    }
    for (const auto& r : all)
        if (qvec_nonneg(r) && !qvec_is_zero(r)) posroots_.push_back(r);
    std::sort(posroots_.begin(), posroots_.end(), [](const QVec& a, const QVec& b) {
        int ha = qvec_height(a), hb = qvec_height(b);
        if (ha != hb) return ha < hb;
        return a < b;
    });
    return posroots_;
}

namespace {

// reflection matrix S_i acting on alpha coordinates
IMat reflection_matrix(const RootDatum& rd, int i) {
    int n = rd.rank();
    IMat m = imat_identity(n);
    for (int j = 0; j < n; ++j) m[i][j] -= rd.a(i, j);
    return m;
}

// lexicographically smallest reduced word of the element with matrix mw
std::vector<int> lex_word(const RootDatum& rd, IMat mw, IMat minv) {
    std::vector<int> word;
    int guard = 0;
    while (!imat_is_identity(mw)) {
        int pick = -1;
        for (int i = 0; i < rd.rank(); ++i) {
            if (qvec_strictly_negative(imat_col(minv, i))) {
                pick = i;
                break;
            }
        }
        if (pick < 0) throw std::logic_error("lex_word: no descent found");
        word.push_back(pick);
        IMat s = reflection_matrix(rd, pick);
        mw = imat_mul(s, mw);
        minv = imat_mul(minv, s);
        if (++guard > 10000) throw std::logic_error("lex_word: runaway");
    }
    return word;
}

} // namespace

std::vector<int> RootDatum::longest_word(const std::vector<int>& X) const {
    if (X.empty()) return {};
    // descent walk within the parabolic from a strictly X-dominant start
    // rho_X works: rho_X(h_i) = 1 for i in X
    std::vector<bool> in(static_cast<size_t>(n_), false);
    for (int i : X) in[static_cast<size_t>(i)] = true;

    // enumerate the X-subsystem roots inside the ambient lattice
    std::set<QVec> sub;
    std::vector<QVec> frontier;
    for (int i : X) {
        sub.insert(simple_root(i));
        frontier.push_back(simple_root(i));
    }
    while (!frontier.empty()) {
        std::vector<QVec> next;
        for (const auto& r : frontier)
            for (int i : X) {
                QVec s = reflect_q(i, r);
                if (!sub.count(s)) {
                    sub.insert(s);
                    next.push_back(s);
                }
            }
        frontier = std::move(next);
        if (sub.size() > 10000) throw std::domain_error("longest_word: X not of finite type");
    }
    PWeight rhoX(static_cast<size_t>(n_), Rational(0));
    for (const auto& r : sub)
        if (qvec_nonneg(r) && !qvec_is_zero(r)) rhoX = pw_add(rhoX, pw_scale(pw_from_qvec(r), Rational(1, 2)));

    IMat mw = imat_identity(n_);
    PWeight lam = rhoX;
    int guard = 0;
    for (;;) {
        int pick = -1;
        for (int i : X)
            if (hpair(lam, i) > 0) {
                pick = i;
                break;
            }
        if (pick < 0) break;
        lam = reflect(pick, lam);
        mw = imat_mul(mw, reflection_matrix(*this, pick)); // builds sigma_{j1} ... sigma_{jk}
        if (++guard > 10000) throw std::logic_error("longest_word: runaway");
    }
    // mw == w_X^{-1} composed in walk order; longest elements are involutions,
    // but re-derive the lexicographically smallest word from the matrix anyway
    return lex_word(*this, mw, mw);
}

std::vector<int> RootDatum::longest_word_with_prefix(const std::vector<int>& prefix) const {
    require_finite("longest_word_with_prefix");
    // w0 via descent walk from rho
    IMat mw = imat_identity(n_);
    PWeight lam = rho();
    int guard = 0;
    for (;;) {
        int pick = -1;
        for (int i = 0; i < n_; ++i)
            if (hpair(lam, i) > 0) {
                pick = i;
                break;
            }
        if (pick < 0) break;
        lam = reflect(pick, lam);
        mw = imat_mul(mw, reflection_matrix(*this, pick));
        if (++guard > 100000) throw std::logic_error("longest_word_with_prefix: runaway");
    }
    // peel the prefix from the left: w0 = s_{i1} ... s_{is} r, so r = s_{is} ... s_{i1} w0
    IMat acc = imat_identity(n_);
    for (int i : prefix) acc = imat_mul(reflection_matrix(*this, i), acc);
    IMat r = imat_mul(acc, mw);
    // inverse of a Weyl matrix: w0 and r act orthogonally w.r.t. the form; just
    // invert by repeated squaring of the finite order?  Compute via word:
    // r is a Weyl element; its inverse matrix equals the matrix of r^{-1};
    // obtain it by transposing in the metric: r^{-1} = D^{-1} r^T D with
    // D_{ij} = eps_i a_ij (the invariant form).  Integer-safe version below.
    IMat rinv;
    {
        int n = n_;
        // solve r * rinv = I over the rationals; entries are integers
        std::vector<std::vector<Rational>> m(n, std::vector<Rational>(2 * n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                m[i][j] = Rational(r[i][j]);
                m[i][n + j] = Rational(i == j ? 1 : 0);
            }
        for (int c = 0; c < n; ++c) {
            int piv = c;
            while (m[piv][c] == 0) ++piv;
            std::swap(m[piv], m[c]);
            Rational ip = 1 / m[c][c];
            for (int k = c; k < 2 * n; ++k) m[c][k] *= ip;
            for (int row = 0; row < n; ++row) {
                if (row == c || m[row][c] == 0) continue;
                Rational f = m[row][c];
                for (int k = c; k < 2 * n; ++k) m[row][k] -= f * m[c][k];
            }
        }
        rinv = imat_identity(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (m[i][n + j].get_den() != 1) throw std::logic_error("weyl inverse not integral");
                rinv[i][j] = mpz_class(m[i][n + j].get_num()).get_si();
            }
    }
    std::vector<int> word = prefix;
    std::vector<int> tail = lex_word(*this, r, rinv);
    word.insert(word.end(), tail.begin(), tail.end());
    if (word.size() != positive_roots().size())
        throw std::domain_error("longest_word_with_prefix: prefix is not length-additive in w0");
    return word;
}

long RootDatum::weyl_dim(const PWeight& lam) const {
    require_finite("weyl_dim");
    Rational num(1), den(1);
    PWeight lr = pw_add(lam, rho());
    PWeight r = rho();
    for (const auto& g : positive_roots()) {
        num *= pair(lr, pw_from_qvec(g));
        den *= pair(r, pw_from_qvec(g));
    }
    Rational dim = num / den;
    if (dim.get_den() != 1) throw std::logic_error("weyl_dim: non-integral result");
    return static_cast<long>(mpz_class(dim.get_num()).get_si());
}

std::string RootDatum::describe() const {
    std::ostringstream os;
    os << "rank " << n_ << ", eps (";
    for (int i = 0; i < n_; ++i) os << (i ? "," : "") << eps_[i];
    os << "), det(A_ext) " << det_ << ", d " << d_ << (finite_ ? ", finite type" : ", not finite type");
    return os.str();
}

// ---- Satake data ----

PWeight SatakeDatum::theta(const PWeight& lam) const {
    PWeight t = tau_weight(lam);
    return pw_neg(rd->apply_word(wX_word, t));
}

QVec SatakeDatum::theta_q(const QVec& lam) const {
    QVec t = tau_q(lam);
    return qvec_neg(rd->apply_word_q(wX_word, t));
}

PWeight SatakeDatum::tau_weight(const PWeight& lam) const {
    PWeight r(lam.size(), Rational(0));
    for (size_t i = 0; i < lam.size(); ++i) r[static_cast<size_t>(tau[i])] = lam[i];
    return r;
}

QVec SatakeDatum::tau_q(const QVec& lam) const {
    QVec r(lam.size(), 0);
    for (size_t i = 0; i < lam.size(); ++i) r[static_cast<size_t>(tau[i])] = lam[i];
    return r;
}

QVec SatakeDatum::tautau0_q(const QVec& lam) const {
    QVec r(lam.size(), 0);
    for (size_t i = 0; i < lam.size(); ++i) r[static_cast<size_t>(tautau0(static_cast<int>(i)))] = lam[i];
    return r;
}

PWeight SatakeDatum::tautau0_weight(const PWeight& lam) const {
    PWeight r(lam.size(), Rational(0));
    for (size_t i = 0; i < lam.size(); ++i) r[static_cast<size_t>(tautau0(static_cast<int>(i)))] = lam[i];
    return r;
}

std::vector<QVec> SatakeDatum::qtheta_span() const {
    std::vector<QVec> out;
    for (int i = 0; i < rd->rank(); ++i) {
        if (in_X(i)) {
            out.push_back(rd->simple_root(i));
            continue;
        }
        QVec v = qvec_add(rd->simple_root(i), theta_q(rd->simple_root(i)));
        if (!qvec_is_zero(v)) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool SatakeDatum::in_wXQplus(const QVec& mu) const {
    if (!qvec_nonneg(mu)) return false;
    return qvec_nonneg(rd->apply_word_q(wX_word, mu));
}

SatakeDatum validate_admissible(const RootDatum& rd, const std::vector<int>& Xin,
                                const std::vector<int>& tau, AdmissibilityReport* report) {
    SatakeDatum sd;
    sd.rd = &rd;
    sd.X = Xin;
    std::sort(sd.X.begin(), sd.X.end());
    sd.tau = tau;
    sd.inX.assign(static_cast<size_t>(rd.rank()), false);
    for (int i : sd.X) {
        if (i < 0 || i >= rd.rank()) throw std::domain_error("validate_admissible: X node out of range");
        sd.inX[static_cast<size_t>(i)] = true;
    }
    std::vector<std::string> fail;

    // tau must be a permutation in Aut(A, X)
    bool perm_ok = static_cast<int>(tau.size()) == rd.rank();
    std::vector<bool> seen(static_cast<size_t>(rd.rank()), false);
    if (perm_ok)
        for (int v : tau) {
            if (v < 0 || v >= rd.rank() || seen[static_cast<size_t>(v)]) {
                perm_ok = false;
                break;
            }
            seen[static_cast<size_t>(v)] = true;
        }
    if (!perm_ok) fail.push_back("tau is not a permutation of the node set");
    if (perm_ok) {
        for (int i = 0; i < rd.rank() && perm_ok; ++i)
            for (int j = 0; j < rd.rank(); ++j)
                if (rd.a(i, j) != rd.a(tau[static_cast<size_t>(i)], tau[static_cast<size_t>(j)])) {
                    fail.push_back("tau is not a Cartan-matrix automorphism");
                    perm_ok = false;
                    break;
                }
        for (int i : sd.X)
            if (!sd.inX[static_cast<size_t>(tau[static_cast<size_t>(i)])]) {
                fail.push_back("tau does not preserve X");
                break;
            }
    }
    if (!fail.empty() && !report) throw std::domain_error("validate_admissible: " + fail.front());
    if (!fail.empty()) {
        report->admissible = false;
        report->failures = fail;
        return sd;
    }

    // condition (1): involutive
    for (int i = 0; i < rd.rank(); ++i)
        if (tau[static_cast<size_t>(tau[static_cast<size_t>(i)])] != i) {
            fail.push_back("condition (1): tau^2 != id");
            break;
        }

    sd.wX_word = rd.longest_word(sd.X);

    // rho_X and rho_X^vee
    PWeight rhoX(static_cast<size_t>(rd.rank()), Rational(0));
    PWeight rhoXv(static_cast<size_t>(rd.rank()), Rational(0));
    {
        // positive roots with support in X, enumerated inside the ambient lattice
        std::set<QVec> sub;
        std::vector<QVec> frontier;
        for (int i : sd.X) {
            sub.insert(rd.simple_root(i));
            frontier.push_back(rd.simple_root(i));
        }
        while (!frontier.empty()) {
            std::vector<QVec> next;
            for (const auto& r : frontier)
                for (int i : sd.X) {
                    QVec s = rd.reflect_q(i, r);
                    if (!sub.count(s)) {
                        sub.insert(s);
                        next.push_back(s);
                    }
                }
            frontier = std::move(next);
        }
        for (const auto& g : sub) {
            if (!qvec_nonneg(g) || qvec_is_zero(g)) continue;
            rhoX = pw_add(rhoX, pw_scale(pw_from_qvec(g), Rational(1, 2)));
            Rational len = Rational(rd.pair_qq(g, g));
            rhoXv = pw_add(rhoXv, pw_scale(pw_from_qvec(g), 1 / len));
        }
    }
    sd.rhoX = rhoX;
    sd.rhoXvee = rhoXv;

    // condition (2): tau acts on X as -w_X
    for (int i : sd.X) {
        QVec img = qvec_neg(rd.apply_word_q(sd.wX_word, rd.simple_root(i)));
        if (img != rd.simple_root(tau[static_cast<size_t>(i)])) {
            fail.push_back("condition (2): tau|_X differs from -w_X");
            break;
        }
    }

    // condition (3): alpha_j(rho_X^vee) integral for tau-fixed j outside X
    for (int j = 0; j < rd.rank(); ++j) {
        if (sd.inX[static_cast<size_t>(j)] || tau[static_cast<size_t>(j)] != j) continue;
        Rational val = rd.pair(pw_from_qvec(rd.simple_root(j)), rhoXv);
        if (val.get_den() != 1) {
            fail.push_back("condition (3): alpha_j(rho_X^vee) not integral for fixed j=" + std::to_string(j));
        }
    }

    // bar-involution rank-two conditions (i)/(ii)
    for (int i = 0; i < rd.rank(); ++i) {
        if (sd.inX[static_cast<size_t>(i)] || tau[static_cast<size_t>(i)] != i) continue;
        for (int j = 0; j < rd.rank(); ++j) {
            if (j == i) continue;
            int aij = rd.a(i, j);
            if (sd.inX[static_cast<size_t>(j)]) {
                if (aij < -2) fail.push_back("condition (i): a_ij out of {0,-1,-2} for fixed i, j in X");
            } else {
                if (aij < -3) fail.push_back("condition (ii): a_ij out of {0,-1,-2,-3} for fixed i, j not in X");
            }
        }
    }

    if (report) {
        report->admissible = fail.empty();
        report->failures = fail;
        if (!fail.empty()) return sd;
    } else if (!fail.empty()) {
        throw std::domain_error("validate_admissible: " + fail.front());
    }

    // s-function with values in {-1, +1}: s(i) = 1 on X and tau-fixed nodes,
    // and s(i)/s(tau(i)) = (-1)^{alpha_i(2 rho_X^vee)} on the rest
    sd.sfun.assign(static_cast<size_t>(rd.rank()), 1);
    for (int i = 0; i < rd.rank(); ++i) {
        int ti = tau[static_cast<size_t>(i)];
        if (sd.inX[static_cast<size_t>(i)] || ti == i || ti < i) continue;
        Rational expo = 2 * rd.pair(pw_from_qvec(rd.simple_root(i)), rhoXv);
        if (expo.get_den() != 1) throw std::domain_error("s-function exponent not integral");
        long e = static_cast<long>(mpz_class(expo.get_num()).get_si());
        sd.sfun[static_cast<size_t>(ti)] = (e % 2 == 0) ? 1 : -1;
    }

    if (rd.finite_type()) {
        sd.w0_word = rd.longest_word_with_prefix(sd.wX_word);
        sd.tau0.assign(static_cast<size_t>(rd.rank()), 0);
        for (int i = 0; i < rd.rank(); ++i) {
            QVec img = rd.apply_word_q(sd.w0_word, rd.simple_root(i));
            QVec neg = qvec_neg(img);
            int hit = -1;
            for (int j = 0; j < rd.rank(); ++j)
                if (neg == rd.simple_root(j)) hit = j;
            if (hit < 0) throw std::logic_error("tau0: w0(alpha_i) is not minus a simple root");
            sd.tau0[static_cast<size_t>(i)] = hit;
        }
    } else {
        sd.tau0.resize(static_cast<size_t>(rd.rank()));
        for (int i = 0; i < rd.rank(); ++i) sd.tau0[static_cast<size_t>(i)] = i; // placeholder; K-level features require finite type
    }

    // I_ns
    for (int i = 0; i < rd.rank(); ++i) {
        if (sd.inX[static_cast<size_t>(i)] || tau[static_cast<size_t>(i)] != i) continue;
        bool ok = true;
        for (int j : sd.X)
            if (rd.a(i, j) != 0) ok = false;
        if (ok) sd.Ins.push_back(i);
    }

    // internal coherence: Theta is an involutive isometry and the tau-shift
    // identity Theta(a_{tau(i)}) - a_{tau(i)} = Theta(a_i) - a_i holds
    for (int i = 0; i < rd.rank(); ++i) {
        QVec ai = rd.simple_root(i);
        if (sd.theta_q(sd.theta_q(ai)) != ai) throw std::logic_error("Theta^2 != id");
        QVec lhs = qvec_sub(sd.theta_q(sd.tau_q(ai)), sd.tau_q(ai));
        QVec rhs = qvec_sub(sd.theta_q(ai), ai);
        if (lhs != rhs) throw std::logic_error("tau-shift identity for Theta failed");
    }

    return sd;
}

std::vector<std::vector<int>> cartan_of_type(const std::string& type, int rank) {
    if (rank < 1) throw std::domain_error("cartan_of_type: rank must be positive");
    std::vector<std::vector<int>> a(static_cast<size_t>(rank), std::vector<int>(static_cast<size_t>(rank), 0));
    for (int i = 0; i < rank; ++i) a[static_cast<size_t>(i)][static_cast<size_t>(i)] = 2;
    auto link = [&](int i, int j, int v) { a[static_cast<size_t>(i)][static_cast<size_t>(j)] = v; };
    if (type == "A") {
        for (int i = 0; i + 1 < rank; ++i) {
            link(i, i + 1, -1);
            link(i + 1, i, -1);
        }
    } else if (type == "B") {
        if (rank < 2) throw std::domain_error("cartan_of_type: B needs rank >= 2");
        for (int i = 0; i + 1 < rank; ++i) {
            link(i, i + 1, -1);
            link(i + 1, i, -1);
        }
        link(rank - 1, rank - 2, -2); // last simple root short
    } else if (type == "C") {
        if (rank < 2) throw std::domain_error("cartan_of_type: C needs rank >= 2");
        for (int i = 0; i + 1 < rank; ++i) {
            link(i, i + 1, -1);
            link(i + 1, i, -1);
        }
        link(rank - 2, rank - 1, -2);
    } else if (type == "D") {
        if (rank < 3) throw std::domain_error("cartan_of_type: D needs rank >= 3");
        for (int i = 0; i + 2 < rank; ++i) {
            link(i, i + 1, -1);
            link(i + 1, i, -1);
        }
        link(rank - 3, rank - 1, -1);
        link(rank - 1, rank - 3, -1);
    } else {
        throw std::domain_error("cartan_of_type: unsupported type " + type);
    }
    return a;
}

} // namespace qsp
