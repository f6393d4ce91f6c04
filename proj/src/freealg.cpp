#include "qsp/freealg.hpp"

#include <algorithm>
#include <sstream>

namespace qsp {

QVec word_weight(const Word& w, int rank) {
    QVec mu = qvec_zero(rank);
    for (int l : w) mu[static_cast<size_t>(l)] += 1;
    return mu;
}

namespace {

std::vector<Word> words_of_weight(const QVec& mu, bool revlex) {
    // multiset permutations in lexicographic order
    std::vector<Word> out;
    Word letters;
    for (size_t i = 0; i < mu.size(); ++i)
        for (int k = 0; k < mu[i]; ++k) letters.push_back(static_cast<int>(i));
    if (letters.empty()) {
        out.push_back({});
        return out;
    }
    std::sort(letters.begin(), letters.end());
    do {
        out.push_back(letters);
    } while (std::next_permutation(letters.begin(), letters.end()));
    if (revlex) std::reverse(out.begin(), out.end());
    return out;
}

} // namespace

std::vector<std::pair<Word, Scalar>> skew_r_word(const RootDatum& rd, int i, const Word& w) {
    std::vector<std::pair<Word, Scalar>> out;
    for (size_t p = 0; p < w.size(); ++p) {
        if (w[p] != i) continue;
        QVec suffix = qvec_zero(rd.rank());
        for (size_t k = p + 1; k < w.size(); ++k) suffix[static_cast<size_t>(w[k])] += 1;
        long e = rd.pair_qq(rd.simple_root(i), suffix);
        Word rest;
        rest.reserve(w.size() - 1);
        for (size_t k = 0; k < w.size(); ++k)
            if (k != p) rest.push_back(w[k]);
        out.emplace_back(std::move(rest), Scalar::v_pow(rd.d() * e, rd.d()));
    }
    return out;
}

std::vector<std::pair<Word, Scalar>> skew_ir_word(const RootDatum& rd, int i, const Word& w) {
    std::vector<std::pair<Word, Scalar>> out;
    for (size_t p = 0; p < w.size(); ++p) {
        if (w[p] != i) continue;
        QVec prefix = qvec_zero(rd.rank());
        for (size_t k = 0; k < p; ++k) prefix[static_cast<size_t>(w[k])] += 1;
        long e = rd.pair_qq(rd.simple_root(i), prefix);
        Word rest;
        rest.reserve(w.size() - 1);
        for (size_t k = 0; k < w.size(); ++k)
            if (k != p) rest.push_back(w[k]);
        out.emplace_back(std::move(rest), Scalar::v_pow(rd.d() * e, rd.d()));
    }
    return out;
}

Scalar AlgebraCtx::cFE(int i) const {
    return Scalar(-1) / rd_.qi_bracket(i);
}

Scalar AlgebraCtx::pair_words_locked(const Word& wm, const Word& wp) const {
    if (wm.empty() && wp.empty()) return Scalar(1);
    if (wm.size() != wp.size()) return Scalar(0);
    if (word_weight(wm, rd_.rank()) != word_weight(wp, rd_.rank())) return Scalar(0);
    auto key = std::make_pair(wm, wp);
    auto it = pair_memo_.find(key);
    if (it != pair_memo_.end()) return it->second;
    // <F_i y, x> = <F_i, E_i> <y, ir(x)>
    int i = wm.front();
    Word rest(wm.begin() + 1, wm.end());
    Scalar acc(0);
    for (auto& [word, coef] : skew_ir_word(rd_, i, wp)) acc += coef * pair_words_locked(rest, word);
    acc *= cFE(i);
    pair_memo_.emplace(std::move(key), acc);
    return acc;
}

Scalar AlgebraCtx::pair_words(const Word& wm, const Word& wp) const {
    std::lock_guard<std::mutex> lock(mu_);
    return pair_words_locked(wm, wp);
}

namespace {
// fixed evaluation point v = 3/2; every denominator in sight is a product of
// brackets q_i - q_i^{-1}, none of which vanish there
const Rational kEvalPoint(3, 2);

Rational rational_vpow(long e) {
    Rational r(1);
    Rational base = e >= 0 ? kEvalPoint : 1 / kEvalPoint;
    for (long k = 0; k < (e >= 0 ? e : -e); ++k) r *= base;
    return r;
}
} // namespace

Rational AlgebraCtx::pair_eval_locked(const Word& wm, const Word& wp) const {
    if (wm.empty() && wp.empty()) return Rational(1);
    if (wm.size() != wp.size()) return Rational(0);
    auto key = std::make_pair(wm, wp);
    auto it = pair_eval_memo_.find(key);
    if (it != pair_eval_memo_.end()) return it->second;
    int i = wm.front();
    Word rest(wm.begin() + 1, wm.end());
    Rational acc(0);
    const RootDatum& rd = rd_;
    for (size_t p = 0; p < wp.size(); ++p) {
        if (wp[p] != i) continue;
        QVec prefix = qvec_zero(rd.rank());
        for (size_t k = 0; k < p; ++k) prefix[static_cast<size_t>(wp[k])] += 1;
        long e = rd.pair_qq(rd.simple_root(i), prefix);
        Word w2;
        w2.reserve(wp.size() - 1);
        for (size_t k = 0; k < wp.size(); ++k)
            if (k != p) w2.push_back(wp[k]);
        acc += rational_vpow(rd.d() * e) * pair_eval_locked(rest, w2);
    }
    Rational qi = rational_vpow(rd.d() * rd.eps(i));
    acc *= Rational(-1) / (qi - 1 / qi);
    pair_eval_memo_.emplace(std::move(key), acc);
    return acc;
}

std::vector<int> AlgebraCtx::select_words_numeric(const std::vector<Word>& words, long expected) const {
    // greedy principal-minor growth over the evaluated Gram
    std::vector<int> chosen;
    std::vector<std::vector<Rational>> inv; // inverse of the selected block
    for (int j = 0; j < static_cast<int>(words.size()); ++j) {
        if (expected >= 0 && static_cast<long>(chosen.size()) == expected) break;
        const int r = static_cast<int>(chosen.size());
        std::vector<Rational> col(static_cast<size_t>(r));
        for (int k = 0; k < r; ++k)
            col[static_cast<size_t>(k)] =
                pair_eval_locked(words[static_cast<size_t>(chosen[static_cast<size_t>(k)])], words[static_cast<size_t>(j)]);
        Rational self = pair_eval_locked(words[static_cast<size_t>(j)], words[static_cast<size_t>(j)]);
        std::vector<Rational> iu(static_cast<size_t>(r), Rational(0));
        for (int a = 0; a < r; ++a)
            for (int k = 0; k < r; ++k) iu[static_cast<size_t>(a)] += inv[static_cast<size_t>(a)][static_cast<size_t>(k)] * col[static_cast<size_t>(k)];
        Rational schur = self;
        for (int a = 0; a < r; ++a) schur -= col[static_cast<size_t>(a)] * iu[static_cast<size_t>(a)];
        if (schur == 0) continue;
        Rational si = 1 / schur;
        std::vector<std::vector<Rational>> ninv(static_cast<size_t>(r) + 1,
                                                std::vector<Rational>(static_cast<size_t>(r) + 1, Rational(0)));
        for (int a = 0; a < r; ++a)
            for (int b = 0; b < r; ++b)
                ninv[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                    inv[static_cast<size_t>(a)][static_cast<size_t>(b)] + si * iu[static_cast<size_t>(a)] * iu[static_cast<size_t>(b)];
        for (int a = 0; a < r; ++a) {
            ninv[static_cast<size_t>(a)][static_cast<size_t>(r)] = -si * iu[static_cast<size_t>(a)];
            ninv[static_cast<size_t>(r)][static_cast<size_t>(a)] = -si * iu[static_cast<size_t>(a)];
        }
        ninv[static_cast<size_t>(r)][static_cast<size_t>(r)] = si;
        inv = std::move(ninv);
        chosen.push_back(j);
    }
    return chosen;
}

const WeightBasis& AlgebraCtx::basis_locked(const QVec& mu) const {
    auto it = bases_.find(mu);
    if (it != bases_.end()) return *it->second;
    auto wb = std::make_unique<WeightBasis>();
    wb->mu = mu;
    wb->words = words_of_weight(mu, revlex_);
    const int W = static_cast<int>(wb->words.size());

    // Invertible principal minor of the word Gram matrix, words in ambient
    // order.  The cheap screen picks candidates at a fixed rational point; the
    // exact Gram inverse below stays the verdict, with a fully exact greedy
    // (plus pair extension) as the fallback path.
    const long expected = rd_.finite_type() ? kostant_dim(mu) : -1;
    auto exact_greedy = [&]() {
        PrincipalMinorSelector sel;
        std::vector<int> chosen;
        std::vector<int> deferred;
        for (int j = 0; j < W; ++j) {
            if (expected >= 0 && static_cast<long>(chosen.size()) == expected) break;
            const int r = static_cast<int>(chosen.size());
            Vec col(r);
            for (int k = 0; k < r; ++k)
                col(k) = pair_words_locked(wb->words[static_cast<size_t>(chosen[static_cast<size_t>(k)])],
                                           wb->words[static_cast<size_t>(j)]);
            Scalar self = pair_words_locked(wb->words[static_cast<size_t>(j)], wb->words[static_cast<size_t>(j)]);
            if (sel.try_add(col, self))
                chosen.push_back(j);
            else
                deferred.push_back(j);
        }
        bool complete = expected >= 0 && static_cast<long>(chosen.size()) == expected;
        if (!deferred.empty() && !complete) {
            // pair extension: a symmetric form that is zero on all remaining
            // diagonal Schur complements still pairs two leftover words
            bool grew = true;
            while (grew) {
                grew = false;
                for (size_t a = 0; a < deferred.size() && !grew; ++a) {
                    for (size_t b = a + 1; b < deferred.size() && !grew; ++b) {
                        std::vector<int> cand = chosen;
                        cand.push_back(deferred[a]);
                        cand.push_back(deferred[b]);
                        Mat g(static_cast<int>(cand.size()), static_cast<int>(cand.size()));
                        for (size_t x = 0; x < cand.size(); ++x)
                            for (size_t y = 0; y < cand.size(); ++y)
                                g(static_cast<int>(x), static_cast<int>(y)) =
                                    pair_words_locked(wb->words[static_cast<size_t>(cand[x])],
                                                      wb->words[static_cast<size_t>(cand[y])]);
                        if (exact_rank(g) == static_cast<int>(cand.size())) {
                            chosen = cand;
                            std::sort(chosen.begin(), chosen.end());
                            deferred.erase(deferred.begin() + static_cast<long>(b));
                            deferred.erase(deferred.begin() + static_cast<long>(a));
                            grew = true;
                        }
                    }
                }
            }
        }
        return chosen;
    };

    std::vector<int> chosen;
    bool screened = false;
    if (expected > 0) {
        chosen = select_words_numeric(wb->words, expected);
        screened = static_cast<long>(chosen.size()) == expected;
    } else if (expected == 0) {
        screened = true;
    }
    if (!screened) chosen = exact_greedy();

    auto assemble = [&](const std::vector<int>& sel_idx) -> bool {
        const int r = static_cast<int>(sel_idx.size());
        wb->sel = sel_idx;
        wb->sel_words.clear();
        wb->gram_sel = Mat(r, r);
        for (int a = 0; a < r; ++a) {
            wb->sel_words.push_back(wb->words[static_cast<size_t>(sel_idx[static_cast<size_t>(a)])]);
            for (int b = 0; b < r; ++b)
                wb->gram_sel(a, b) =
                    pair_words_locked(wb->words[static_cast<size_t>(sel_idx[static_cast<size_t>(a)])],
                                      wb->words[static_cast<size_t>(sel_idx[static_cast<size_t>(b)])]);
        }
        if (r == 0) {
            wb->gram_sel_inv = Mat(0, 0);
            return true;
        }
        try {
            wb->gram_sel_inv = exact_inverse(wb->gram_sel);
        } catch (const std::domain_error&) {
            return false;
        }
        return true;
    };
    if (!assemble(chosen)) {
        if (!screened)
            throw std::logic_error("WeightBasis: exact greedy produced a singular Gram at " + qvec_str(mu));
        chosen = exact_greedy();
        if (!assemble(chosen))
            throw std::logic_error("WeightBasis: singular Gram after exact fallback at " + qvec_str(mu));
    }
    for (size_t k = 0; k < wb->words.size(); ++k) wb->word_index[wb->words[k]] = static_cast<int>(k);

    if (expected >= 0 && expected != static_cast<long>(wb->sel.size()))
        throw std::logic_error("WeightBasis: dimension differs from the positive-root multiset count at " +
                               qvec_str(mu));

    auto& slot = bases_[mu];
    slot = std::move(wb);
    return *slot;
}

const WeightBasis& AlgebraCtx::basis(const QVec& mu) const {
    std::lock_guard<std::mutex> lock(mu_);
    return basis_locked(mu);
}

Vec AlgebraCtx::reduce_word(const Word& w, Side side) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto& memo = (side == Side::Plus) ? reduce_plus_memo_ : reduce_minus_memo_;
    auto it = memo.find(w);
    if (it != memo.end()) return it->second;
    QVec mu = word_weight(w, rd_.rank());
    const WeightBasis& wb = basis_locked(mu);
    const int r = wb.dim();
    Vec rhs(r);
    if (side == Side::Plus) {
        for (int t = 0; t < r; ++t) rhs(t) = pair_words_locked(wb.sel_words[static_cast<size_t>(t)], w);
    } else {
        for (int t = 0; t < r; ++t) rhs(t) = pair_words_locked(w, wb.sel_words[static_cast<size_t>(t)]);
    }
    Vec coords(r);
    const Mat& inv = wb.gram_sel_inv;
    for (int a = 0; a < r; ++a) {
        Scalar acc(0);
        for (int t = 0; t < r; ++t) acc += (side == Side::Plus ? inv(a, t) : inv(t, a)) * rhs(t);
        coords(a) = acc;
    }
    memo.emplace(w, coords);
    return coords;
}

long AlgebraCtx::kostant_dim(const QVec& mu) const {
    rd_.require_finite("kostant_dim");
    const auto& roots = rd_.positive_roots();
    // count multisets of positive roots summing to mu
    std::function<long(QVec, size_t)> rec = [&](QVec rem, size_t idx) -> long {
        if (qvec_is_zero(rem)) return 1;
        if (idx >= roots.size()) return 0;
        long total = 0;
        // use roots[idx] k times
        QVec r = rem;
        for (int k = 0;; ++k) {
            if (k > 0) {
                bool ok = true;
                for (size_t c = 0; c < r.size(); ++c) {
                    r[c] -= roots[idx][c];
                    if (r[c] < 0) ok = false;
                }
                if (!ok) break;
            }
            total += rec(r, idx + 1);
        }
        return total;
    };
    return rec(mu, 0);
}

// ---- AlgebraElement ----

AlgebraElement::AlgebraElement(const AlgebraCtx* ctx, Side side) : ctx_(ctx), side_(side) {
    ktag_ = qvec_zero(ctx->rd().rank());
}

AlgebraElement AlgebraElement::zero(const AlgebraCtx* ctx, Side side) {
    return AlgebraElement(ctx, side);
}

AlgebraElement AlgebraElement::one(const AlgebraCtx* ctx, Side side) {
    AlgebraElement e(ctx, side);
    Vec v(1);
    v(0) = Scalar(1);
    e.comp_[qvec_zero(ctx->rd().rank())] = v;
    return e;
}

AlgebraElement AlgebraElement::generator(const AlgebraCtx* ctx, Side side, int i) {
    AlgebraElement e(ctx, side);
    QVec mu = ctx->rd().simple_root(i);
    const WeightBasis& wb = ctx->basis(mu);
    Vec v(wb.dim());
    for (int a = 0; a < wb.dim(); ++a) v(a) = Scalar(0);
    // the single word (i) is always the basis of its weight space
    v(0) = Scalar(1);
    e.comp_[mu] = v;
    return e;
}

AlgebraElement AlgebraElement::from_words(const AlgebraCtx* ctx, Side side,
                                          const std::vector<std::pair<Word, Scalar>>& terms) {
    AlgebraElement e(ctx, side);
    for (const auto& [w, c] : terms) {
        if (c.is_zero()) continue;
        QVec mu = word_weight(w, ctx->rd().rank());
        Vec coords = ctx->reduce_word(w, side);
        auto it = e.comp_.find(mu);
        if (it == e.comp_.end()) {
            Vec v = coords;
            for (int a = 0; a < v.size(); ++a) v(a) = coords(a) * c;
            e.comp_[mu] = v;
        } else {
            for (int a = 0; a < it->second.size(); ++a) it->second(a) += coords(a) * c;
        }
    }
    e.prune();
    return e;
}

void AlgebraElement::prune() {
    for (auto it = comp_.begin(); it != comp_.end();) {
        bool zero = true;
        for (int a = 0; a < it->second.size(); ++a)
            if (!it->second(a).is_zero()) zero = false;
        if (zero)
            it = comp_.erase(it);
        else
            ++it;
    }
}

bool AlgebraElement::is_zero() const {
    return comp_.empty();
}

AlgebraElement AlgebraElement::with_ktag(const QVec& beta) const {
    AlgebraElement e(*this);
    e.ktag_ = qvec_add(e.ktag_, beta);
    return e;
}

Vec AlgebraElement::component(const QVec& mu) const {
    auto it = comp_.find(mu);
    if (it != comp_.end()) return it->second;
    int r = ctx_->basis(mu).dim();
    Vec v(r);
    for (int a = 0; a < r; ++a) v(a) = Scalar(0);
    return v;
}

void AlgebraElement::set_component(const QVec& mu, Vec v) {
    comp_[mu] = std::move(v);
    prune();
}

std::vector<std::pair<Word, Scalar>> AlgebraElement::word_expansion() const {
    std::vector<std::pair<Word, Scalar>> out;
    for (const auto& [mu, coords] : comp_) {
        const WeightBasis& wb = ctx_->basis(mu);
        for (int a = 0; a < coords.size(); ++a)
            if (!coords(a).is_zero()) out.emplace_back(wb.sel_words[static_cast<size_t>(a)], coords(a));
    }
    return out;
}

std::string AlgebraElement::dump() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [w, c] : word_expansion()) {
        if (!first) os << " + ";
        first = false;
        os << "(";
        if (w.empty()) os << "1";
        for (size_t k = 0; k < w.size(); ++k) os << (k ? "." : "") << (side_ == Side::Plus ? "E" : "F") << w[k];
        os << ") * " << c.str();
    }
    if (first) os << "0";
    if (!qvec_is_zero(ktag_)) os << " * K" << qvec_str(ktag_);
    return os.str();
}

AlgebraElement AlgebraElement::operator-() const {
    AlgebraElement e(*this);
    for (auto& [mu, v] : e.comp_)
        for (int a = 0; a < v.size(); ++a) v(a) = -v(a);
    return e;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
    if (o.is_zero()) return *this;
    if (is_zero()) {
        *this = o;
        return *this;
    }
    if (side_ != o.side_ || ktag_ != o.ktag_)
        throw std::domain_error("AlgebraElement: adding incompatible elements");
    for (const auto& [mu, v] : o.comp_) {
        auto it = comp_.find(mu);
        if (it == comp_.end())
            comp_[mu] = v;
        else
            for (int a = 0; a < v.size(); ++a) it->second(a) += v(a);
    }
    prune();
    return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& o) {
    return *this += -o;
}

AlgebraElement AlgebraElement::scaled(const Scalar& c) const {
    if (c.is_zero()) return zero(ctx_, side_);
    AlgebraElement e(*this);
    for (auto& [mu, v] : e.comp_)
        for (int a = 0; a < v.size(); ++a) v(a) = v(a) * c;
    return e;
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.ctx_ != b.ctx_ || a.side_ != b.side_)
        throw std::domain_error("AlgebraElement: side or context mismatch in product");
    const AlgebraCtx* ctx = a.ctx_;
    const RootDatum& rd = ctx->rd();
    AlgebraElement out(ctx, a.side_);
    out.ktag_ = qvec_add(a.ktag_, b.ktag_);
    for (const auto& [mu, cu] : a.comp_) {
        const WeightBasis& wbu = ctx->basis(mu);
        for (const auto& [nu, cv] : b.comp_) {
            const WeightBasis& wbv = ctx->basis(nu);
            // K_{ktag_a} commutes past the nu-part of b
            long e = rd.pair_qq(a.ktag_, nu);
            if (a.side_ == Side::Minus) e = -e;
            Scalar kfac = Scalar::v_pow(rd.d() * e, rd.d());
            QVec tot = qvec_add(mu, nu);
            const WeightBasis& wbt = ctx->basis(tot);
            auto slot = out.comp_.find(tot);
            if (slot == out.comp_.end()) {
                Vec z(wbt.dim());
                for (int t = 0; t < z.size(); ++t) z(t) = Scalar(0);
                slot = out.comp_.emplace(tot, std::move(z)).first;
            }
            for (int x = 0; x < cu.size(); ++x) {
                if (cu(x).is_zero()) continue;
                for (int y = 0; y < cv.size(); ++y) {
                    if (cv(y).is_zero()) continue;
                    Word w = wbu.sel_words[static_cast<size_t>(x)];
                    const Word& w2 = wbv.sel_words[static_cast<size_t>(y)];
                    w.insert(w.end(), w2.begin(), w2.end());
                    Vec red = ctx->reduce_word(w, a.side_);
                    Scalar f = cu(x) * cv(y) * kfac;
                    for (int t = 0; t < red.size(); ++t) slot->second(t) += red(t) * f;
                }
            }
        }
    }
    out.prune();
    return out;
}

bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.is_zero() && b.is_zero()) return true;
    if (a.side_ != b.side_) return false;
    if (a.ktag_ != b.ktag_) return false;
    if (a.comp_.size() != b.comp_.size()) return false;
    for (const auto& [mu, v] : a.comp_) {
        auto it = b.comp_.find(mu);
        if (it == b.comp_.end()) return false;
        if (v.size() != it->second.size()) return false;
        for (int x = 0; x < v.size(); ++x)
            if (v(x) != it->second(x)) return false;
    }
    return true;
}

AlgebraElement AlgebraElement::power(int k) const {
    if (k < 0) throw std::domain_error("AlgebraElement::power: negative exponent");
    AlgebraElement acc = one(ctx_, side_);
    for (int j = 0; j < k; ++j) acc = acc * (*this);
    return acc;
}

AlgebraElement AlgebraElement::divided_power(const AlgebraCtx* ctx, Side side, int i, int k) {
    const RootDatum& rd = ctx->rd();
    AlgebraElement p = generator(ctx, side, i).power(k);
    return p.scaled(qfactorial(k, rd.d() * rd.eps(i), rd.d()).inv());
}

AlgebraElement AlgebraElement::bar() const {
    AlgebraElement e(*this);
    for (auto& [mu, v] : e.comp_)
        for (int a = 0; a < v.size(); ++a) v(a) = v(a).bar();
    e.ktag_ = qvec_neg(ktag_);
    return e;
}

AlgebraElement AlgebraElement::sigma() const {
    if (has_ktag()) throw std::domain_error("sigma: tagged element unsupported");
    std::vector<std::pair<Word, Scalar>> terms;
    for (auto& [w, c] : word_expansion()) {
        Word r(w.rbegin(), w.rend());
        terms.emplace_back(std::move(r), c);
    }
    return from_words(ctx_, side_, terms);
}

AlgebraElement skew_r(int i, const AlgebraElement& x) {
    if (x.has_ktag()) throw std::domain_error("skew_r: tagged element unsupported");
    std::vector<std::pair<Word, Scalar>> terms;
    for (auto& [w, c] : x.word_expansion())
        for (auto& [w2, c2] : skew_r_word(x.ctx_->rd(), i, w)) terms.emplace_back(w2, c * c2);
    return AlgebraElement::from_words(x.ctx_, x.side_, terms);
}

AlgebraElement skew_ir(int i, const AlgebraElement& x) {
    if (x.has_ktag()) throw std::domain_error("skew_ir: tagged element unsupported");
    std::vector<std::pair<Word, Scalar>> terms;
    for (auto& [w, c] : x.word_expansion())
        for (auto& [w2, c2] : skew_ir_word(x.ctx_->rd(), i, w)) terms.emplace_back(w2, c * c2);
    return AlgebraElement::from_words(x.ctx_, x.side_, terms);
}

Scalar pairing(const AlgebraElement& y, const AlgebraElement& x) {
    if (y.side_ != Side::Minus || x.side_ != Side::Plus)
        throw std::domain_error("pairing: expects (minus, plus)");
    const AlgebraCtx* ctx = y.ctx_;
    Scalar acc(0);
    for (const auto& [mu, cy] : y.comp_) {
        auto it = x.comp_.find(mu);
        if (it == x.comp_.end()) continue; // vanishes identically on weight mismatch
        const Mat& g = ctx->basis(mu).gram_sel;
        for (int a = 0; a < cy.size(); ++a) {
            if (cy(a).is_zero()) continue;
            for (int b = 0; b < it->second.size(); ++b)
                if (!it->second(b).is_zero()) acc += cy(a) * g(a, b) * it->second(b);
        }
    }
    // <y K_g, x K_h> = q^{-(g,h)} <y, x>
    long e = ctx->rd().pair_qq(y.ktag_, x.ktag_);
    return acc * Scalar::v_pow(-ctx->rd().d() * e, ctx->rd().d());
}

// ---- braid operators ----

namespace {

AlgebraElement braid_gen(const AlgebraCtx* ctx, Side side, int i, int j, BraidDir dir) {
    const RootDatum& rd = ctx->rd();
    if (i == j) throw std::domain_error("braid_gen: j must differ from i");
    int m = -rd.a(i, j);
    long epsd = rd.d() * rd.eps(i);
    AlgebraElement acc = AlgebraElement::zero(ctx, side);
    for (int k = 0; k <= m; ++k) {
        // plus fwd: (-1)^k q_i^{-k} E_i^{(m-k)} E_j E_i^{(k)}
        // plus inv: (-1)^k q_i^{-k} E_i^{(k)} E_j E_i^{(m-k)}
        // minus fwd: (-1)^k q_i^{k} F_i^{(k)} F_j F_i^{(m-k)}
        // minus inv: (-1)^k q_i^{k} F_i^{(m-k)} F_j F_i^{(k)}
        bool qpos = (side == Side::Minus);
        bool left_big = (side == Side::Plus) == (dir == BraidDir::Fwd);
        Scalar c = Scalar::v_pow((qpos ? 1 : -1) * epsd * k, rd.d());
        if (k % 2 == 1) c = -c;
        int a = left_big ? m - k : k;
        int b = left_big ? k : m - k;
        AlgebraElement t = AlgebraElement::divided_power(ctx, side, i, a) *
                           AlgebraElement::generator(ctx, side, j) *
                           AlgebraElement::divided_power(ctx, side, i, b);
        acc += t.scaled(c);
    }
    return acc;
}

} // namespace

AlgebraElement braid_gen_plus(const AlgebraCtx* ctx, int i, int j, BraidDir dir) {
    return braid_gen(ctx, Side::Plus, i, j, dir);
}

AlgebraElement braid_gen_minus(const AlgebraCtx* ctx, int i, int j, BraidDir dir) {
    return braid_gen(ctx, Side::Minus, i, j, dir);
}

AlgebraElement braid_T(int i, const AlgebraElement& x, BraidDir dir, bool allow_mixed) {
    if (x.has_ktag()) throw std::domain_error("braid_T: tagged element unsupported");
    const AlgebraCtx* ctx = x.ctx();
    bool avoids = true;
    for (auto& [w, c] : x.word_expansion()) {
        (void)c;
        for (int l : w)
            if (l == i) avoids = false;
    }
    if (avoids) {
        AlgebraElement acc = AlgebraElement::zero(ctx, x.side());
        for (auto& [w, c] : x.word_expansion()) {
            AlgebraElement t = AlgebraElement::one(ctx, x.side());
            for (int l : w) t = t * braid_gen(ctx, x.side(), i, l, dir);
            acc += t.scaled(c);
        }
        return acc;
    }
    if (!allow_mixed)
        throw std::domain_error("braid_T: input contains the letter being braided; "
                                "permitted only in a root-vector context");
    MixedElement m = (x.side() == Side::Plus) ? MixedElement::from_plus(x) : MixedElement::from_minus(x);
    MixedElement r = braid_T_mixed(i, m, dir);
    return (x.side() == Side::Plus) ? r.pure_plus() : r.pure_minus();
}

// ---- MixedElement ----

void MixedElement::prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (mat_is_zero(it->second))
            it = terms_.erase(it);
        else
            ++it;
    }
}

void MixedElement::add_term(const Key& k, int a, int b, const Scalar& c) {
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        int r = ctx_->basis(k.fmu).dim();
        int cdim = ctx_->basis(k.enu).dim();
        it = terms_.emplace(k, mat_zero(r, cdim)).first;
    }
    it->second(a, b) += c;
}

MixedElement MixedElement::from_scalar(const AlgebraCtx* ctx, const Scalar& c) {
    MixedElement m(ctx);
    if (c.is_zero()) return m;
    QVec z = qvec_zero(ctx->rd().rank());
    m.add_term({z, z, z}, 0, 0, c);
    return m;
}

MixedElement MixedElement::gen_E(const AlgebraCtx* ctx, int i) {
    MixedElement m(ctx);
    QVec z = qvec_zero(ctx->rd().rank());
    m.add_term({z, z, ctx->rd().simple_root(i)}, 0, 0, Scalar(1));
    return m;
}

MixedElement MixedElement::gen_F(const AlgebraCtx* ctx, int i) {
    MixedElement m(ctx);
    QVec z = qvec_zero(ctx->rd().rank());
    m.add_term({ctx->rd().simple_root(i), z, z}, 0, 0, Scalar(1));
    return m;
}

MixedElement MixedElement::gen_K(const AlgebraCtx* ctx, const QVec& beta) {
    MixedElement m(ctx);
    QVec z = qvec_zero(ctx->rd().rank());
    m.add_term({z, beta, z}, 0, 0, Scalar(1));
    return m;
}

MixedElement MixedElement::from_plus(const AlgebraElement& x) {
    if (x.side() != Side::Plus) throw std::domain_error("from_plus: wrong side");
    MixedElement m(x.ctx());
    QVec z = qvec_zero(x.ctx()->rd().rank());
    for (const auto& [mu, coords] : x.components())
        for (int b = 0; b < coords.size(); ++b)
            if (!coords(b).is_zero()) m.add_term({z, x.ktag(), mu}, 0, b, coords(b));
    // normal order: the tag means u K_b = sum c_w E_w K_b, and moving K_b to
    // the left across E_w costs q^{-(b, mu)}
    MixedElement out(x.ctx());
    const RootDatum& rd = x.ctx()->rd();
    for (auto& [k, matv] : m.terms_) {
        Key nk = k;
        long e = -rd.pair_qq(k.kbeta, k.enu);
        Scalar f = Scalar::v_pow(rd.d() * e, rd.d());
        for (int b = 0; b < matv.cols(); ++b)
            if (!matv(0, b).is_zero()) out.add_term(nk, 0, b, matv(0, b) * f);
    }
    out.prune();
    return out;
}

MixedElement MixedElement::from_minus(const AlgebraElement& y) {
    if (y.side() != Side::Minus) throw std::domain_error("from_minus: wrong side");
    MixedElement m(y.ctx());
    QVec z = qvec_zero(y.ctx()->rd().rank());
    for (const auto& [mu, coords] : y.components())
        for (int a = 0; a < coords.size(); ++a)
            if (!coords(a).is_zero()) m.add_term({mu, y.ktag(), z}, a, 0, coords(a));
    m.prune();
    return m;
}

MixedElement MixedElement::operator-() const {
    MixedElement m(*this);
    for (auto& [k, v] : m.terms_)
        for (int a = 0; a < v.rows(); ++a)
            for (int b = 0; b < v.cols(); ++b) v(a, b) = -v(a, b);
    return m;
}

MixedElement& MixedElement::operator+=(const MixedElement& o) {
    if (!ctx_) ctx_ = o.ctx_;
    for (const auto& [k, v] : o.terms_) {
        auto it = terms_.find(k);
        if (it == terms_.end())
            terms_[k] = v;
        else
            it->second += v;
    }
    prune();
    return *this;
}

MixedElement& MixedElement::operator-=(const MixedElement& o) {
    return *this += -o;
}

MixedElement MixedElement::scaled(const Scalar& c) const {
    MixedElement m(ctx_);
    if (c.is_zero()) return m;
    for (const auto& [k, v] : terms_) {
        Mat w = v;
        for (int a = 0; a < w.rows(); ++a)
            for (int b = 0; b < w.cols(); ++b) w(a, b) = w(a, b) * c;
        m.terms_[k] = std::move(w);
    }
    return m;
}

bool operator==(const MixedElement& a, const MixedElement& b) {
    MixedElement d = a;
    d -= b;
    return d.is_zero();
}

namespace {

// (F-part ⊗ K_beta ⊗ E-part) * F_j, normal-ordered
MixedElement term_times_F(const AlgebraCtx* ctx, const MixedElement::Key& key, const Mat& coef, int j) {
    const RootDatum& rd = ctx->rd();
    MixedElement out(ctx);
    QVec aj = rd.simple_root(j);
    Scalar br = rd.qi_bracket(j);
    long dn = rd.d();

    const WeightBasis& wbf = ctx->basis(key.fmu);
    const WeightBasis& wbe = ctx->basis(key.enu);

    // (i) F-part gains the letter j
    {
        Scalar kf = Scalar::v_pow(-dn * rd.pair_qq(key.kbeta, aj), static_cast<int>(dn));
        MixedElement::Key nk{qvec_add(key.fmu, aj), key.kbeta, key.enu};
        for (int a = 0; a < coef.rows(); ++a) {
            bool rowzero = true;
            for (int b = 0; b < coef.cols(); ++b)
                if (!coef(a, b).is_zero()) rowzero = false;
            if (rowzero) continue;
            Word w = wbf.sel_words[static_cast<size_t>(a)];
            w.push_back(j);
            Vec red = ctx->reduce_word(w, Side::Minus);
            for (int t = 0; t < red.size(); ++t) {
                if (red(t).is_zero()) continue;
                for (int b = 0; b < coef.cols(); ++b)
                    if (!coef(a, b).is_zero()) out.add_term(nk, t, b, red(t) * coef(a, b) * kf);
            }
        }
    }
    if (qvec_is_zero(key.enu)) {
        out.prune();
        return out;
    }
    // (ii) + q^{-(a_j, nu - a_j)} / (q_j - q_j^{-1}) * F ⊗ K_{beta+a_j} ⊗ r_j(E)
    // (iii) - 1 / (q_j - q_j^{-1}) * F ⊗ K_{beta-a_j} ⊗ jr(E)
    QVec numu = qvec_sub(key.enu, aj);
    if (qvec_nonneg(numu)) {
        Scalar c2 = Scalar::v_pow(-dn * rd.pair_qq(aj, numu), static_cast<int>(dn)) / br;
        Scalar c3 = Scalar(-1) / br;
        MixedElement::Key k2{key.fmu, qvec_add(key.kbeta, aj), numu};
        MixedElement::Key k3{key.fmu, qvec_sub(key.kbeta, aj), numu};
        for (int b = 0; b < coef.cols(); ++b) {
            bool colzero = true;
            for (int a = 0; a < coef.rows(); ++a)
                if (!coef(a, b).is_zero()) colzero = false;
            if (colzero) continue;
            const Word& w = wbe.sel_words[static_cast<size_t>(b)];
            for (auto& [w2, c] : skew_r_word(rd, j, w)) {
                Vec red = ctx->reduce_word(w2, Side::Plus);
                for (int t = 0; t < red.size(); ++t) {
                    if (red(t).is_zero()) continue;
                    for (int a = 0; a < coef.rows(); ++a)
                        if (!coef(a, b).is_zero()) out.add_term(k2, a, t, coef(a, b) * c * red(t) * c2);
                }
            }
            for (auto& [w2, c] : skew_ir_word(rd, j, w)) {
                Vec red = ctx->reduce_word(w2, Side::Plus);
                for (int t = 0; t < red.size(); ++t) {
                    if (red(t).is_zero()) continue;
                    for (int a = 0; a < coef.rows(); ++a)
                        if (!coef(a, b).is_zero()) out.add_term(k3, a, t, coef(a, b) * c * red(t) * c3);
                }
            }
        }
    }
    out.prune();
    return out;
}

} // namespace

MixedElement operator*(const MixedElement& A, const MixedElement& B) {
    const AlgebraCtx* ctx = A.ctx() ? A.ctx() : B.ctx();
    const RootDatum& rd = ctx->rd();
    MixedElement out(ctx);
    for (const auto& [kb, mb] : B.terms()) {
        const WeightBasis& wbf = ctx->basis(kb.fmu);
        const WeightBasis& wbe = ctx->basis(kb.enu);
        for (int kr = 0; kr < mb.rows(); ++kr) {
            // A * F_{w_kr}
            MixedElement left(ctx);
            left = A;
            for (int l : wbf.sel_words[static_cast<size_t>(kr)]) {
                MixedElement step(ctx);
                for (const auto& [k, v] : left.terms()) step += term_times_F(ctx, k, v, l);
                left = std::move(step);
            }
            // * K_{kb.kbeta}
            MixedElement mid(ctx);
            for (const auto& [k, v] : left.terms()) {
                Scalar f = Scalar::v_pow(-rd.d() * rd.pair_qq(kb.kbeta, k.enu), rd.d());
                MixedElement::Key nk{k.fmu, qvec_add(k.kbeta, kb.kbeta), k.enu};
                for (int a = 0; a < v.rows(); ++a)
                    for (int b = 0; b < v.cols(); ++b)
                        if (!v(a, b).is_zero()) mid.add_term(nk, a, b, v(a, b) * f);
            }
            for (int kc = 0; kc < mb.cols(); ++kc) {
                if (mb(kr, kc).is_zero()) continue;
                // * E_{w_kc}
                MixedElement right = mid.scaled(mb(kr, kc));
                const Word& ew = wbe.sel_words[static_cast<size_t>(kc)];
                if (!ew.empty()) {
                    MixedElement step(ctx);
                    for (const auto& [k, v] : right.terms()) {
                        const WeightBasis& wbk = ctx->basis(k.enu);
                        QVec nnu = qvec_add(k.enu, word_weight(ew, rd.rank()));
                        MixedElement::Key nk{k.fmu, k.kbeta, nnu};
                        for (int b = 0; b < v.cols(); ++b) {
                            bool colzero = true;
                            for (int a = 0; a < v.rows(); ++a)
                                if (!v(a, b).is_zero()) colzero = false;
                            if (colzero) continue;
                            Word w = wbk.sel_words[static_cast<size_t>(b)];
                            w.insert(w.end(), ew.begin(), ew.end());
                            Vec red = ctx->reduce_word(w, Side::Plus);
                            for (int t = 0; t < red.size(); ++t) {
                                if (red(t).is_zero()) continue;
                                for (int a = 0; a < v.rows(); ++a)
                                    if (!v(a, b).is_zero()) step.add_term(nk, a, t, v(a, b) * red(t));
                            }
                        }
                    }
                    right = std::move(step);
                }
                out += right;
            }
        }
    }
    return out;
}

MixedElement MixedElement::bar() const {
    MixedElement m(ctx_);
    for (const auto& [k, v] : terms_) {
        Key nk{k.fmu, qvec_neg(k.kbeta), k.enu};
        Mat w = v;
        for (int a = 0; a < w.rows(); ++a)
            for (int b = 0; b < w.cols(); ++b) w(a, b) = w(a, b).bar();
        auto it = m.terms_.find(nk);
        if (it == m.terms_.end())
            m.terms_[nk] = std::move(w);
        else
            it->second += w;
    }
    m.prune();
    return m;
}

MixedElement MixedElement::relabel(const std::vector<int>& perm) const {
    MixedElement m(ctx_);
    const RootDatum& rd = ctx_->rd();
    for (const auto& [k, v] : terms_) {
        const WeightBasis& wbf = ctx_->basis(k.fmu);
        const WeightBasis& wbe = ctx_->basis(k.enu);
        QVec nbeta = qvec_zero(rd.rank());
        for (size_t i = 0; i < k.kbeta.size(); ++i) nbeta[static_cast<size_t>(perm[i])] = k.kbeta[i];
        for (int a = 0; a < v.rows(); ++a)
            for (int b = 0; b < v.cols(); ++b) {
                if (v(a, b).is_zero()) continue;
                Word fw = wbf.sel_words[static_cast<size_t>(a)];
                Word ew = wbe.sel_words[static_cast<size_t>(b)];
                for (int& l : fw) l = perm[static_cast<size_t>(l)];
                for (int& l : ew) l = perm[static_cast<size_t>(l)];
                MixedElement t = MixedElement::from_scalar(ctx_, v(a, b));
                AlgebraElement fe = AlgebraElement::from_words(ctx_, Side::Minus, {{fw, Scalar(1)}});
                AlgebraElement ee = AlgebraElement::from_words(ctx_, Side::Plus, {{ew, Scalar(1)}});
                t = t * MixedElement::from_minus(fe) * MixedElement::gen_K(ctx_, nbeta) *
                    MixedElement::from_plus(ee);
                m += t;
            }
    }
    return m;
}

MixedElement MixedElement::tw() const {
    MixedElement m(ctx_);
    const RootDatum& rd = ctx_->rd();
    for (const auto& [k, v] : terms_) {
        const WeightBasis& wbf = ctx_->basis(k.fmu);
        const WeightBasis& wbe = ctx_->basis(k.enu);
        for (int a = 0; a < v.rows(); ++a)
            for (int b = 0; b < v.cols(); ++b) {
                if (v(a, b).is_zero()) continue;
                MixedElement t = MixedElement::from_scalar(ctx_, v(a, b));
                for (int l : wbf.sel_words[static_cast<size_t>(a)]) {
                    // tw(F_l) = -E_l K_l
                    t = t * (MixedElement::gen_E(ctx_, l) * MixedElement::gen_K(ctx_, rd.simple_root(l))).scaled(Scalar(-1));
                }
                t = t * MixedElement::gen_K(ctx_, qvec_neg(k.kbeta));
                for (int l : wbe.sel_words[static_cast<size_t>(b)]) {
                    // tw(E_l) = -K_l^{-1} F_l
                    t = t * (MixedElement::gen_K(ctx_, qvec_neg(rd.simple_root(l))) * MixedElement::gen_F(ctx_, l)).scaled(Scalar(-1));
                }
                m += t;
            }
    }
    return m;
}

bool MixedElement::is_pure_plus() const {
    for (const auto& [k, v] : terms_) {
        (void)v;
        if (!qvec_is_zero(k.fmu) || !qvec_is_zero(k.kbeta)) return false;
    }
    return true;
}

AlgebraElement MixedElement::pure_plus() const {
    AlgebraElement e(ctx_, Side::Plus);
    for (const auto& [k, v] : terms_) {
        if (!qvec_is_zero(k.fmu) || !qvec_is_zero(k.kbeta))
            throw std::logic_error("pure_plus: element has F or K content");
        Vec coords(v.cols());
        for (int b = 0; b < v.cols(); ++b) coords(b) = v(0, b);
        e.set_component(k.enu, coords);
    }
    return e;
}

AlgebraElement MixedElement::pure_minus() const {
    AlgebraElement e(ctx_, Side::Minus);
    for (const auto& [k, v] : terms_) {
        if (!qvec_is_zero(k.enu) || !qvec_is_zero(k.kbeta))
            throw std::logic_error("pure_minus: element has E or K content");
        Vec coords(v.rows());
        for (int a = 0; a < v.rows(); ++a) coords(a) = v(a, 0);
        e.set_component(k.fmu, coords);
    }
    return e;
}

MixedElement braid_T_mixed(int i, const MixedElement& x, BraidDir dir) {
    const AlgebraCtx* ctx = x.ctx();
    const RootDatum& rd = ctx->rd();
    MixedElement out(ctx);
    // letter images
    auto img_E = [&](int j) -> MixedElement {
        if (j == i) {
            if (dir == BraidDir::Fwd) // T_i(E_i) = -F_i K_i
                return (MixedElement::gen_F(ctx, i) * MixedElement::gen_K(ctx, rd.simple_root(i))).scaled(Scalar(-1));
            return (MixedElement::gen_K(ctx, qvec_neg(rd.simple_root(i))) * MixedElement::gen_F(ctx, i)).scaled(Scalar(-1));
        }
        return MixedElement::from_plus(braid_gen_plus(ctx, i, j, dir));
    };
    auto img_F = [&](int j) -> MixedElement {
        if (j == i) {
            if (dir == BraidDir::Fwd) // T_i(F_i) = -K_i^{-1} E_i
                return (MixedElement::gen_K(ctx, qvec_neg(rd.simple_root(i))) * MixedElement::gen_E(ctx, i)).scaled(Scalar(-1));
            return (MixedElement::gen_E(ctx, i) * MixedElement::gen_K(ctx, rd.simple_root(i))).scaled(Scalar(-1));
        }
        return MixedElement::from_minus(braid_gen_minus(ctx, i, j, dir));
    };
    for (const auto& [k, v] : x.terms()) {
        const WeightBasis& wbf = ctx->basis(k.fmu);
        const WeightBasis& wbe = ctx->basis(k.enu);
        QVec nbeta = rd.reflect_q(i, k.kbeta);
        for (int a = 0; a < v.rows(); ++a)
            for (int b = 0; b < v.cols(); ++b) {
                if (v(a, b).is_zero()) continue;
                MixedElement t = MixedElement::from_scalar(ctx, v(a, b));
                for (int l : wbf.sel_words[static_cast<size_t>(a)]) t = t * img_F(l);
                t = t * MixedElement::gen_K(ctx, nbeta);
                for (int l : wbe.sel_words[static_cast<size_t>(b)]) t = t * img_E(l);
                out += t;
            }
    }
    return out;
}

} // namespace qsp
