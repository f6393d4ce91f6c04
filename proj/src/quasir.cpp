#include "qsp/quasir.hpp"

#include <algorithm>
#include <set>

namespace qsp {

RootVectorTable root_vectors(const AlgebraCtx* ctx, const std::vector<int>& word) {
    const RootDatum& rd = ctx->rd();
    RootVectorTable rv;
    rv.word = word;
    std::set<QVec> seen;
    for (size_t j = 0; j < word.size(); ++j) {
        QVec gamma = rd.simple_root(word[j]);
        for (size_t k = j; k-- > 0;) gamma = rd.reflect_q(word[k], gamma);
        if (!qvec_nonneg(gamma) || seen.count(gamma))
            throw std::domain_error("root_vectors: word is not reduced");
        seen.insert(gamma);
        AlgebraElement e = AlgebraElement::generator(ctx, Side::Plus, word[j]);
        AlgebraElement f = AlgebraElement::generator(ctx, Side::Minus, word[j]);
        for (size_t k = j; k-- > 0;) {
            e = braid_T(word[k], e, BraidDir::Fwd, /*allow_mixed=*/true);
            f = braid_T(word[k], f, BraidDir::Fwd, /*allow_mixed=*/true);
        }
        if (e.components().size() != 1 || e.components().begin()->first != gamma)
            throw std::logic_error("root_vectors: weight of E_gamma is off");
        rv.roots.push_back(gamma);
        rv.Epos.push_back(std::move(e));
        rv.Fneg.push_back(std::move(f));
        rv.node.push_back(word[j]);
    }
    if (rd.finite_type() && word.size() == rd.positive_roots().size()) {
        std::set<QVec> all(rv.roots.begin(), rv.roots.end());
        for (const auto& g : rd.positive_roots())
            if (!all.count(g)) throw std::logic_error("root_vectors: roots do not enumerate Phi+");
    }
    return rv;
}

void QuasiR::prune() {
    for (auto it = comp_.begin(); it != comp_.end();) {
        for (auto jt = it->second.begin(); jt != it->second.end();)
            jt = jt->second.is_zero() ? it->second.erase(jt) : std::next(jt);
        it = it->second.empty() ? comp_.erase(it) : std::next(it);
    }
}

QuasiR::Comp QuasiR::component(const QVec& mu) const {
    auto it = comp_.find(mu);
    return it == comp_.end() ? Comp{} : it->second;
}

QuasiR QuasiR::one(const AlgebraCtx* ctx, int cutoff) {
    QuasiR r(ctx, cutoff);
    r.add(qvec_zero(ctx->rd().rank()), 0, 0, Scalar(1));
    return r;
}

void QuasiR::add(const QVec& mu, int a, int b, const Scalar& c) {
    if (c.is_zero()) return;
    auto& m = comp_[mu];
    auto key = std::make_pair(a, b);
    auto it = m.find(key);
    if (it == m.end())
        m[key] = c;
    else {
        it->second += c;
        if (it->second.is_zero()) m.erase(it);
    }
    if (m.empty()) comp_.erase(mu);
}

QuasiR QuasiR::pbw_factor(const AlgebraCtx* ctx, const AlgebraElement& Fg, const AlgebraElement& Eg,
                          int node, int cutoff) {
    const RootDatum& rd = ctx->rd();
    QuasiR out(ctx, cutoff);
    QVec gamma = Eg.components().begin()->first;
    int hg = qvec_height(gamma);
    long epsd = rd.d() * rd.eps(node);
    Scalar qi = Scalar::v_pow(epsd, rd.d());
    Scalar bracket = qi - qi.inv();
    AlgebraElement fp = AlgebraElement::one(ctx, Side::Minus);
    AlgebraElement ep = AlgebraElement::one(ctx, Side::Plus);
    Scalar coef(1);
    for (int r = 0; r * hg <= cutoff; ++r) {
        if (r > 0) {
            fp = fp * Fg;
            ep = ep * Eg;
            // (-1)^r q_i^{-r(r-1)/2} (q_i - q_i^{-1})^r / [r]!
            coef = Scalar(1);
            for (int k = 1; k <= r; ++k) coef *= bracket;
            coef = coef * Scalar::v_pow(-epsd * (static_cast<long>(r) * (r - 1) / 2), rd.d()) /
                   qfactorial(r, epsd, rd.d());
            if (r % 2 == 1) coef = -coef;
        }
        // single weight r*gamma on both legs
        QVec mu = qvec_zero(rd.rank());
        for (int t = 0; t < rd.rank(); ++t) mu[static_cast<size_t>(t)] = gamma[static_cast<size_t>(t)] * r;
        Vec fc = fp.component(mu);
        Vec ec = ep.component(mu);
        for (int a = 0; a < fc.size(); ++a) {
            if (fc(a).is_zero()) continue;
            for (int b = 0; b < ec.size(); ++b)
                if (!ec(b).is_zero()) out.add(mu, a, b, coef * fc(a) * ec(b));
        }
    }
    return out;
}

QuasiR QuasiR::mul(const QuasiR& o) const {
    const AlgebraCtx* ctx = ctx_;
    int cutoff = std::min(cutoff_, o.cutoff_);
    QuasiR out(ctx, cutoff);
    for (const auto& [mu, ca] : comp_) {
        int ha = qvec_height(mu);
        if (ha > cutoff) continue;
        const WeightBasis& bfa = ctx->basis(mu);
        for (const auto& [nu, cb] : o.comp_) {
            if (ha + qvec_height(nu) > cutoff) continue;
            const WeightBasis& bfb = ctx->basis(nu);
            QVec tot = qvec_add(mu, nu);
            for (const auto& [ab, c1] : ca)
                for (const auto& [cd, c2] : cb) {
                    // minus legs multiply, plus legs multiply
                    Word fw = bfa.sel_words[static_cast<size_t>(ab.first)];
                    const Word& fw2 = bfb.sel_words[static_cast<size_t>(cd.first)];
                    fw.insert(fw.end(), fw2.begin(), fw2.end());
                    Word ew = bfa.sel_words[static_cast<size_t>(ab.second)];
                    const Word& ew2 = bfb.sel_words[static_cast<size_t>(cd.second)];
                    ew.insert(ew.end(), ew2.begin(), ew2.end());
                    Vec fred = ctx->reduce_word(fw, Side::Minus);
                    Vec ered = ctx->reduce_word(ew, Side::Plus);
                    Scalar f = c1 * c2;
                    for (int a = 0; a < fred.size(); ++a) {
                        if (fred(a).is_zero()) continue;
                        for (int b = 0; b < ered.size(); ++b)
                            if (!ered(b).is_zero()) out.add(tot, a, b, f * fred(a) * ered(b));
                    }
                }
        }
    }
    return out;
}

QuasiR QuasiR::bar() const {
    QuasiR out(ctx_, cutoff_);
    for (const auto& [mu, c] : comp_)
        for (const auto& [ab, v] : c) out.add(mu, ab.first, ab.second, v.bar());
    return out;
}

bool operator==(const QuasiR& a, const QuasiR& b) {
    return a.comp_ == b.comp_;
}

QuasiR::Comp quasiR_dual(const AlgebraCtx* ctx, const QVec& mu) {
    const WeightBasis& wb = ctx->basis(mu);
    QuasiR::Comp out;
    const Mat& inv = wb.gram_sel_inv; // G^{-1}, G(a,b) = <F_a, E_b>
    for (int a = 0; a < wb.dim(); ++a)
        for (int b = 0; b < wb.dim(); ++b)
            if (!inv(b, a).is_zero()) out[{a, b}] = inv(b, a);
    return out;
}

QuasiR quasiR_dual_all(const AlgebraCtx* ctx, int cutoff) {
    QuasiR out(ctx, cutoff);
    int n = ctx->rd().rank();
    // enumerate Q^+ up to the height cutoff
    std::vector<QVec> frontier{qvec_zero(n)};
    std::set<QVec> seen(frontier.begin(), frontier.end());
    while (!frontier.empty()) {
        std::vector<QVec> next;
        for (const auto& mu : frontier) {
            for (const auto& [ab, c] : quasiR_dual(ctx, mu)) out.add(mu, ab.first, ab.second, c);
            if (qvec_height(mu) == cutoff) continue;
            for (int i = 0; i < n; ++i) {
                QVec nu = qvec_add(mu, ctx->rd().simple_root(i));
                if (!seen.count(nu)) {
                    seen.insert(nu);
                    next.push_back(nu);
                }
            }
        }
        frontier = std::move(next);
    }
    return out;
}

namespace {

QuasiR product_range(const AlgebraCtx* ctx, const RootVectorTable& rv, size_t lo, size_t hi, int cutoff) {
    // literal right-to-left product R^{[hi]} ... R^{[lo+1]}, 1-based factors
    QuasiR acc = QuasiR::one(ctx, cutoff);
    for (size_t j = hi; j > lo; --j) {
        QuasiR f = QuasiR::pbw_factor(ctx, rv.Fneg[j - 1], rv.Epos[j - 1], rv.node[j - 1], cutoff);
        acc = acc.mul(f);
    }
    return acc;
}

} // namespace

QuasiR quasiR_pbw(const AlgebraCtx* ctx, const RootVectorTable& rv, int cutoff) {
    return product_range(ctx, rv, 0, rv.roots.size(), cutoff);
}

QuasiR quasiR_X(const AlgebraCtx* ctx, const RootVectorTable& rv, size_t prefix_len, int cutoff) {
    return product_range(ctx, rv, 0, prefix_len, cutoff);
}

QuasiR R_times_RXbar(const AlgebraCtx* ctx, const RootVectorTable& rv, size_t prefix_len, int cutoff) {
    return product_range(ctx, rv, prefix_len, rv.roots.size(), cutoff);
}

} // namespace qsp
