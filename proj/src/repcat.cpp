#include "qsp/repcat.hpp"

#include <functional>
#include <sstream>

namespace qsp {

namespace {

std::vector<QVec> weights_of_height(int rank, int h) {
    std::vector<QVec> out;
    QVec cur(static_cast<size_t>(rank), 0);
    std::function<void(int, int)> rec = [&](int pos, int rem) {
        if (pos == rank - 1) {
            cur[static_cast<size_t>(pos)] = rem;
            out.push_back(cur);
            return;
        }
        for (int k = 0; k <= rem; ++k) {
            cur[static_cast<size_t>(pos)] = k;
            rec(pos + 1, rem - k);
        }
    };
    rec(0, h);
    return out;
}

} // namespace

Mat ModuleData::diag_K(const QVec& beta) const {
    Mat d = mat_zero(dim(), dim());
    for (int j = 0; j < dim(); ++j)
        d(j, j) = ctx->rd().q_pair(pw_from_qvec(beta), wts[static_cast<size_t>(j)]);
    return d;
}

Mat ModuleData::diag_K_weight(const PWeight& b) const {
    Mat d = mat_zero(dim(), dim());
    for (int j = 0; j < dim(); ++j) d(j, j) = ctx->rd().q_pair(b, wts[static_cast<size_t>(j)]);
    return d;
}

Mat ModuleData::diag_fn(const std::function<Scalar(const PWeight&)>& f) const {
    Mat d = mat_zero(dim(), dim());
    for (int j = 0; j < dim(); ++j) d(j, j) = f(wts[static_cast<size_t>(j)]);
    return d;
}

int ModuleData::weight_gap() const {
    int gap = 0;
    for (const auto& a : wts)
        for (const auto& b : wts) {
            PWeight diff = pw_sub(a, b);
            bool inQp = true;
            int h = 0;
            for (auto& x : diff) {
                if (x.get_den() != 1 || x < 0) inQp = false;
                if (inQp) h += static_cast<int>(mpz_class(x.get_num()).get_si());
            }
            if (inQp) gap = std::max(gap, h);
        }
    return gap;
}

ModuleData build_irrep(const AlgebraCtx* ctx, const PWeight& lambda) {
    const RootDatum& rd = ctx->rd();
    rd.require_finite("build_irrep");
    if (!rd.is_dominant(lambda)) throw std::domain_error("build_irrep: weight is not dominant integral");
    const long want = rd.weyl_dim(lambda);

    ModuleData M;
    M.ctx = ctx;
    M.highest = lambda;

    // Shapovalov form on F-words, recursively; memo per (word, word)
    std::map<std::pair<Word, Word>, Scalar> memo;
    std::function<Scalar(const Word&, const Word&)> shap = [&](const Word& w, const Word& w2) -> Scalar {
        if (w.empty() && w2.empty()) return Scalar(1);
        if (w.size() != w2.size()) return Scalar(0);
        auto key = std::make_pair(w, w2);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        int i = w.front();
        Word rest(w.begin() + 1, w.end());
        // E_i (F_{w2} v) = [ q^{(a_i, lam-mu+a_i)} ir(F_{w2}) - q^{-(a_i,lam)} r_i(F_{w2}) ] v / (q_i - q_i^{-1})
        QVec mu = word_weight(w2, rd.rank());
        PWeight ai = pw_from_qvec(rd.simple_root(i));
        PWeight at = pw_add(pw_sub(lambda, pw_from_qvec(mu)), ai);
        Scalar cplus = rd.q_pair(ai, at);
        Scalar cminus = rd.q_pair(ai, lambda).inv();
        Scalar acc(0);
        for (auto& [wr, c] : skew_ir_word(rd, i, w2)) acc += cplus * c * shap(rest, wr);
        for (auto& [wr, c] : skew_r_word(rd, i, w2)) acc -= cminus * c * shap(rest, wr);
        acc = acc / rd.qi_bracket(i);
        memo.emplace(std::move(key), acc);
        return acc;
    };

    struct WtBlock {
        QVec mu;
        std::vector<Word> basis_words;
        Mat shap_sel, shap_sel_inv;
        int offset = 0;
    };
    std::vector<WtBlock> blocks;
    std::map<QVec, int> block_of;
    long total = 0;
    for (int h = 0; total < want; ++h) {
        long at_h = 0;
        for (const QVec& mu : weights_of_height(rd.rank(), h)) {
            const WeightBasis& wb = ctx->basis(mu);
            PrincipalMinorSelector sel;
            std::vector<Word> chosen;
            for (const Word& w : wb.sel_words) {
                const int r = static_cast<int>(chosen.size());
                Vec col(r);
                for (int t = 0; t < r; ++t) col(t) = shap(chosen[static_cast<size_t>(t)], w);
                if (sel.try_add(col, shap(w, w))) chosen.push_back(w);
            }
            if (chosen.empty()) continue;
            WtBlock blk;
            blk.mu = mu;
            blk.basis_words = chosen;
            const int r = static_cast<int>(chosen.size());
            blk.shap_sel = Mat(r, r);
            for (int a = 0; a < r; ++a)
                for (int b = 0; b < r; ++b)
                    blk.shap_sel(a, b) = shap(chosen[static_cast<size_t>(a)], chosen[static_cast<size_t>(b)]);
            blk.shap_sel_inv = exact_inverse(blk.shap_sel);
            blk.offset = static_cast<int>(total);
            block_of[mu] = static_cast<int>(blocks.size());
            blocks.push_back(std::move(blk));
            at_h += r;
            total += r;
        }
        if (at_h == 0 && h > 0) break;
        if (h > 512) throw std::logic_error("build_irrep: runaway");
    }
    if (total != want)
        throw std::logic_error("build_irrep: dimension " + std::to_string(total) + " differs from the Weyl value " +
                               std::to_string(want));

    for (const auto& blk : blocks)
        for (size_t k = 0; k < blk.basis_words.size(); ++k)
            M.wts.push_back(pw_sub(lambda, pw_from_qvec(blk.mu)));

    const int n = rd.rank();
    const int D = static_cast<int>(total);
    M.matE.assign(static_cast<size_t>(n), mat_zero(D, D));
    M.matF.assign(static_cast<size_t>(n), mat_zero(D, D));

    // project an F-word combination at weight mu to module coordinates
    auto project = [&](const QVec& mu, const std::vector<std::pair<Word, Scalar>>& terms,
                       std::vector<std::pair<int, Scalar>>& out) {
        auto bi = block_of.find(mu);
        if (bi == block_of.end()) return; // lies in the radical entirely
        const WtBlock& blk = blocks[static_cast<size_t>(bi->second)];
        const int r = static_cast<int>(blk.basis_words.size());
        Vec rhs(r);
        for (int t = 0; t < r; ++t) {
            Scalar acc(0);
            for (const auto& [w, c] : terms) acc += c * shap(blk.basis_words[static_cast<size_t>(t)], w);
            rhs(t) = acc;
        }
        for (int a = 0; a < r; ++a) {
            Scalar acc(0);
            for (int t = 0; t < r; ++t) acc += blk.shap_sel_inv(a, t) * rhs(t);
            if (!acc.is_zero()) out.emplace_back(blk.offset + a, acc);
        }
    };

    for (const auto& blk : blocks) {
        for (size_t k = 0; k < blk.basis_words.size(); ++k) {
            int col = blk.offset + static_cast<int>(k);
            const Word& w = blk.basis_words[k];
            for (int i = 0; i < n; ++i) {
                // F_i (F_w v) = F_{(i)+w} v
                Word fw;
                fw.push_back(i);
                fw.insert(fw.end(), w.begin(), w.end());
                std::vector<std::pair<int, Scalar>> img;
                project(qvec_add(blk.mu, rd.simple_root(i)), {{fw, Scalar(1)}}, img);
                for (auto& [row, c] : img) M.matF[static_cast<size_t>(i)](row, col) = c;
                // E_i (F_w v) via the commutator formula
                QVec down = qvec_sub(blk.mu, rd.simple_root(i));
                if (!qvec_nonneg(down)) continue;
                PWeight ai = pw_from_qvec(rd.simple_root(i));
                Scalar cplus = rd.q_pair(ai, pw_add(pw_sub(lambda, pw_from_qvec(blk.mu)), ai));
                Scalar cminus = rd.q_pair(ai, lambda).inv();
                Scalar br = rd.qi_bracket(i);
                std::vector<std::pair<Word, Scalar>> terms;
                for (auto& [wr, c] : skew_ir_word(rd, i, w)) terms.emplace_back(wr, cplus * c / br);
                for (auto& [wr, c] : skew_r_word(rd, i, w)) terms.emplace_back(wr, -cminus * c / br);
                img.clear();
                project(down, terms, img);
                for (auto& [row, c] : img) M.matE[static_cast<size_t>(i)](row, col) = c;
            }
        }
    }
    std::ostringstream nm;
    nm << "V(";
    bool first = true;
    bool any = false;
    for (int i = 0; i < n; ++i) {
        Rational ci = rd.hpair(lambda, i);
        if (ci == 0) continue;
        if (!first) nm << "+";
        first = false;
        any = true;
        if (ci != 1) nm << ci.get_str();
        nm << "w" << (i + 1);
    }
    if (!any) nm << "0";
    nm << ")";
    M.name = nm.str();
    return M;
}

ModuleData tensor_module(const ModuleData& m, const ModuleData& n) {
    ModuleData t;
    t.ctx = m.ctx;
    const RootDatum& rd = m.ctx->rd();
    t.name = m.name + "(x)" + n.name;
    for (int a = 0; a < m.dim(); ++a)
        for (int b = 0; b < n.dim(); ++b)
            t.wts.push_back(pw_add(m.wts[static_cast<size_t>(a)], n.wts[static_cast<size_t>(b)]));
    t.highest = t.wts.empty() ? PWeight{} : t.wts.front();
    Mat idm = mat_identity(m.dim()), idn = mat_identity(n.dim());
    for (int i = 0; i < rd.rank(); ++i) {
        // Delta(E_i) = E_i ⊗ 1 + K_i ⊗ E_i ; Delta(F_i) = F_i ⊗ K_i^{-1} + 1 ⊗ F_i
        t.matE.push_back(kron(m.matE[static_cast<size_t>(i)], idn) +
                         kron(m.diag_K(rd.simple_root(i)), n.matE[static_cast<size_t>(i)]));
        t.matF.push_back(kron(m.matF[static_cast<size_t>(i)], n.diag_K(qvec_neg(rd.simple_root(i)))) +
                         kron(idm, n.matF[static_cast<size_t>(i)]));
    }
    return t;
}

namespace {

Mat act_word(const std::vector<Mat>& gens, const Word& w, int dim) {
    Mat acc = mat_identity(dim);
    for (int l : w) acc = acc * gens[static_cast<size_t>(l)];
    return acc;
}

} // namespace

Mat act(const AlgebraElement& x, const ModuleData& m) {
    Mat acc = mat_zero(m.dim(), m.dim());
    const auto& gens = (x.side() == Side::Plus) ? m.matE : m.matF;
    for (const auto& [w, c] : x.word_expansion()) {
        Mat t = act_word(gens, w, m.dim());
        for (int r = 0; r < m.dim(); ++r)
            for (int s = 0; s < m.dim(); ++s) acc(r, s) += c * t(r, s);
    }
    if (x.has_ktag()) acc = acc * m.diag_K(x.ktag());
    return acc;
}

Mat act(const MixedElement& x, const ModuleData& m) {
    Mat acc = mat_zero(m.dim(), m.dim());
    const AlgebraCtx* ctx = m.ctx;
    for (const auto& [k, v] : x.terms()) {
        const WeightBasis& wbf = ctx->basis(k.fmu);
        const WeightBasis& wbe = ctx->basis(k.enu);
        Mat kd = m.diag_K(k.kbeta);
        for (int a = 0; a < v.rows(); ++a) {
            for (int b = 0; b < v.cols(); ++b) {
                if (v(a, b).is_zero()) continue;
                Mat t = act_word(m.matF, wbf.sel_words[static_cast<size_t>(a)], m.dim()) * kd *
                        act_word(m.matE, wbe.sel_words[static_cast<size_t>(b)], m.dim());
                for (int r = 0; r < m.dim(); ++r)
                    for (int s = 0; s < m.dim(); ++s) acc(r, s) += v(a, b) * t(r, s);
            }
        }
    }
    return acc;
}

Mat act_relabeled(const AlgebraElement& x, const ModuleData& m, const std::vector<int>& perm) {
    Mat acc = mat_zero(m.dim(), m.dim());
    const auto& gens = (x.side() == Side::Plus) ? m.matE : m.matF;
    for (const auto& [w, c] : x.word_expansion()) {
        Word pw;
        for (int l : w) pw.push_back(perm[static_cast<size_t>(l)]);
        Mat t = act_word(gens, pw, m.dim());
        for (int r = 0; r < m.dim(); ++r)
            for (int s = 0; s < m.dim(); ++s) acc(r, s) += c * t(r, s);
    }
    if (x.has_ktag()) throw std::domain_error("act_relabeled: tagged element unsupported");
    return acc;
}

Mat lusztig_T(int i, const ModuleData& m, BraidDir dir) {
    const RootDatum& rd = m.ctx->rd();
    const int D = m.dim();
    // divided powers until nilpotent
    std::vector<Mat> Fd{mat_identity(D)}, Ed{mat_identity(D)};
    long epsd = rd.d() * rd.eps(i);
    for (int k = 1;; ++k) {
        Mat f = Fd.back() * m.matF[static_cast<size_t>(i)];
        Mat e = Ed.back() * m.matE[static_cast<size_t>(i)];
        Scalar inv = qint(k, epsd, rd.d()).inv();
        for (int r = 0; r < D; ++r)
            for (int s = 0; s < D; ++s) {
                f(r, s) = f(r, s) * inv;
                e(r, s) = e(r, s) * inv;
            }
        bool fz = mat_is_zero(f), ez = mat_is_zero(e);
        Fd.push_back(std::move(f));
        Ed.push_back(std::move(e));
        if (fz && ez) break;
        if (k > 4 * D + 4) throw std::logic_error("lusztig_T: runaway divided powers");
    }
    const int N = static_cast<int>(Fd.size()) - 1;
    Mat tinv = mat_zero(D, D);
    for (int j = 0; j < D; ++j) {
        Rational lh = rd.hpair(m.wts[static_cast<size_t>(j)], i);
        if (lh.get_den() != 1) throw std::logic_error("lusztig_T: weight not integral on h_i");
        long L = static_cast<long>(mpz_class(lh.get_num()).get_si());
        for (int b = 0; b <= N; ++b)
            for (int c = 0; c <= N; ++c) {
                long a = L + b - c;
                if (a < 0 || a > N) continue;
                // T_i^{-1} m = sum (-1)^b q_i^{ac-b} F^{(a)} E^{(b)} F^{(c)} m
                Scalar coef = Scalar::v_pow(epsd * (a * c - b), rd.d());
                if (b % 2 == 1) coef = -coef;
                for (int r = 0; r < D; ++r) {
                    Scalar acc(0);
                    for (int u = 0; u < D; ++u) {
                        Scalar mid(0);
                        for (int v2 = 0; v2 < D; ++v2) {
                            const Scalar& fc = Fd[static_cast<size_t>(c)](v2, j);
                            if (fc.is_zero()) continue;
                            mid += Ed[static_cast<size_t>(b)](u, v2) * fc;
                        }
                        if (mid.is_zero()) continue;
                        acc += Fd[static_cast<size_t>(a)](r, u) * mid;
                    }
                    if (!acc.is_zero()) tinv(r, j) += coef * acc;
                }
            }
    }
    if (dir == BraidDir::Inv) return tinv;
    return exact_inverse(tinv);
}

Mat lusztig_T_word(const std::vector<int>& word, const ModuleData& m, BraidDir dir) {
    Mat acc = mat_identity(m.dim());
    if (dir == BraidDir::Fwd) {
        for (int i : word) acc = acc * lusztig_T(i, m, BraidDir::Fwd);
    } else {
        for (auto it = word.rbegin(); it != word.rend(); ++it) acc = acc * lusztig_T(*it, m, BraidDir::Inv);
    }
    return acc;
}

Mat kappa(const ModuleData& m, const ModuleData& n) {
    const RootDatum& rd = m.ctx->rd();
    Mat d = mat_zero(m.dim() * n.dim(), m.dim() * n.dim());
    for (int a = 0; a < m.dim(); ++a)
        for (int b = 0; b < n.dim(); ++b) {
            int idx = a * n.dim() + b;
            d(idx, idx) = rd.q_pair(m.wts[static_cast<size_t>(a)], n.wts[static_cast<size_t>(b)]);
        }
    return d;
}

Mat kappa_f(const ModuleData& m, const ModuleData& n, const std::function<PWeight(const PWeight&)>& f) {
    const RootDatum& rd = m.ctx->rd();
    Mat d = mat_zero(m.dim() * n.dim(), m.dim() * n.dim());
    for (int a = 0; a < m.dim(); ++a)
        for (int b = 0; b < n.dim(); ++b) {
            int idx = a * n.dim() + b;
            d(idx, idx) = rd.q_pair(f(m.wts[static_cast<size_t>(a)]), n.wts[static_cast<size_t>(b)]);
        }
    return d;
}

Mat flip_matrix(const ModuleData& m, const ModuleData& n) {
    Mat f = mat_zero(m.dim() * n.dim(), m.dim() * n.dim());
    for (int a = 0; a < m.dim(); ++a)
        for (int b = 0; b < n.dim(); ++b) f(b * m.dim() + a, a * n.dim() + b) = Scalar(1);
    return f;
}

Mat quasiR_on(const QuasiR& R, const ModuleData& m, const ModuleData& n) {
    const AlgebraCtx* ctx = m.ctx;
    Mat acc = mat_zero(m.dim() * n.dim(), m.dim() * n.dim());
    for (const auto& [mu, comp] : R.components()) {
        const WeightBasis& wb = ctx->basis(mu);
        for (const auto& [ab, c] : comp) {
            Mat fm = act_word(m.matF, wb.sel_words[static_cast<size_t>(ab.first)], m.dim());
            if (mat_is_zero(fm)) continue;
            Mat em = act_word(n.matE, wb.sel_words[static_cast<size_t>(ab.second)], n.dim());
            if (mat_is_zero(em)) continue;
            Mat t = kron(fm, em);
            for (int r = 0; r < acc.rows(); ++r)
                for (int s = 0; s < acc.cols(); ++s) acc(r, s) += c * t(r, s);
        }
    }
    return acc;
}

Mat quasiR_on_relabel(const QuasiR& R, const ModuleData& m, const ModuleData& n,
                      const std::vector<int>& perm_minus_leg) {
    const AlgebraCtx* ctx = m.ctx;
    Mat acc = mat_zero(m.dim() * n.dim(), m.dim() * n.dim());
    for (const auto& [mu, comp] : R.components()) {
        const WeightBasis& wb = ctx->basis(mu);
        for (const auto& [ab, c] : comp) {
            Word fw = wb.sel_words[static_cast<size_t>(ab.first)];
            for (int& l : fw) l = perm_minus_leg[static_cast<size_t>(l)];
            Mat fm = act_word(m.matF, fw, m.dim());
            if (mat_is_zero(fm)) continue;
            Mat em = act_word(n.matE, wb.sel_words[static_cast<size_t>(ab.second)], n.dim());
            if (mat_is_zero(em)) continue;
            Mat t = kron(fm, em);
            for (int r = 0; r < acc.rows(); ++r)
                for (int s = 0; s < acc.cols(); ++s) acc(r, s) += c * t(r, s);
        }
    }
    return acc;
}

Mat rhat(const QuasiR& R, const ModuleData& m, const ModuleData& n, const SatakeDatum* sd, RhatVariant variant) {
    Mat fl = flip_matrix(m, n);
    if (!variant.twisted) {
        Mat kinv = kappa(n, m);
        for (int j = 0; j < kinv.rows(); ++j) kinv(j, j) = kinv(j, j).inv();
        return quasiR_on(R, n, m) * kinv * fl;
    }
    // tau tau0 variant: second leg relabeled, kappa^{-tau tau0}
    if (!sd) throw std::domain_error("rhat: twisted variant needs a Satake datum");
    std::vector<int> perm(static_cast<size_t>(m.ctx->rd().rank()));
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = sd->tautau0(static_cast<int>(i));
    Mat kinv = kappa_f(n, m, [&](const PWeight& w) { return sd->tautau0_weight(w); });
    for (int j = 0; j < kinv.rows(); ++j) kinv(j, j) = kinv(j, j).inv();
    const AlgebraCtx* ctx = m.ctx;
    Mat acc = mat_zero(n.dim() * m.dim(), n.dim() * m.dim());
    for (const auto& [mu, comp] : R.components()) {
        const WeightBasis& wb = ctx->basis(mu);
        for (const auto& [ab, c] : comp) {
            Mat fm = act_word(n.matF, wb.sel_words[static_cast<size_t>(ab.first)], n.dim());
            if (mat_is_zero(fm)) continue;
            Word ew = wb.sel_words[static_cast<size_t>(ab.second)];
            for (int& l : ew) l = perm[static_cast<size_t>(l)];
            Mat em = act_word(m.matE, ew, m.dim());
            if (mat_is_zero(em)) continue;
            Mat t = kron(fm, em);
            for (int r = 0; r < acc.rows(); ++r)
                for (int s = 0; s < acc.cols(); ++s) acc(r, s) += c * t(r, s);
        }
    }
    return acc * kinv * fl;
}

} // namespace qsp
