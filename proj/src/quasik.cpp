#include "qsp/quasik.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
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

std::pair<AlgebraElement, AlgebraElement> QuasiKEngine::rhs_pair(const QVec& mu, int i) const {
    const AlgebraCtx* ctx = p_->ctx;
    const RootDatum& rd = ctx->rd();
    const SatakeDatum& sd = *p_->sd;
    AlgebraElement A = AlgebraElement::zero(ctx, Side::Plus);
    AlgebraElement iA = AlgebraElement::zero(ctx, Side::Plus);
    Scalar bracket = rd.qi_bracket(i);
    QVec ai = rd.simple_root(i);
    if (!sd.in_X(i)) {
        QVec shift = qvec_add(mu, qvec_sub(sd.theta_q(ai), ai));
        if (qvec_nonneg(shift)) {
            AlgebraElement Xs = component(shift);
            if (!Xs.is_zero()) {
                A += Xs * p_->bar_cX(i);
                long e = -rd.pair_qq(sd.theta_q(ai), ai);
                AlgebraElement cx = p_->Xi[static_cast<size_t>(i)]
                                        .scaled(p_->c[static_cast<size_t>(i)] * Scalar::v_pow(rd.d() * e, rd.d()));
                iA += cx * Xs;
            }
        }
    }
    if (!p_->s[static_cast<size_t>(i)].is_zero()) {
        QVec down = qvec_sub(mu, ai);
        if (qvec_nonneg(down)) {
            AlgebraElement Xd = component(down);
            A += Xd.scaled(p_->s[static_cast<size_t>(i)].bar());
            iA += Xd.scaled(p_->s[static_cast<size_t>(i)]);
        }
    }
    return {A.scaled(-bracket), iA.scaled(-bracket)};
}

void QuasiKEngine::check_solvable(const QVec& mu, const std::vector<AlgebraElement>& A,
                                  const std::vector<AlgebraElement>& iA) const {
    const AlgebraCtx* ctx = p_->ctx;
    const RootDatum& rd = ctx->rd();
    const int n = rd.rank();
    // cross-derivation condition: r_i(jA) = jr(A_i) for all i, j (including i = j)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            AlgebraElement lhs = skew_r(i, iA[static_cast<size_t>(j)]);
            AlgebraElement rhs = skew_ir(j, A[static_cast<size_t>(i)]);
            if (!(lhs == rhs)) throw SolvabilityError(mu, i, j, "cross-derivation");
        }
    // Serre-pairing condition for i != j; pairings taken
    // word against word so no new weight bases are forced
    auto pair_word_elem = [&](const Word& w, const AlgebraElement& x) {
        Scalar acc(0);
        for (const auto& [w2, c2] : x.word_expansion()) acc += c2 * ctx->pair_words(w, w2);
        return acc;
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (A[static_cast<size_t>(i)].is_zero() && A[static_cast<size_t>(j)].is_zero()) continue;
            long m = 1 - rd.a(i, j);
            long epsd = rd.d() * rd.eps(i);
            Scalar acc(0);
            for (long sdx = 1; sdx <= m; ++sdx) {
                Word w;
                for (long k = 0; k < m - sdx; ++k) w.push_back(i);
                w.push_back(j);
                for (long k = 0; k < sdx - 1; ++k) w.push_back(i);
                Scalar term = qbinom(m, sdx, epsd, rd.d()) * pair_word_elem(w, A[static_cast<size_t>(i)]);
                if (sdx % 2 == 1) term = -term;
                acc += term;
            }
            acc = acc * Scalar(-1) / rd.qi_bracket(i);
            Word w2(static_cast<size_t>(m), i);
            acc -= pair_word_elem(w2, A[static_cast<size_t>(j)]) / rd.qi_bracket(j);
            if (!acc.is_zero()) throw SolvabilityError(mu, i, j, "Serre-pairing");
        }
}

AlgebraElement QuasiKEngine::solve_step(const QVec& mu, const std::vector<AlgebraElement>& A) const {
    const AlgebraCtx* ctx = p_->ctx;
    const RootDatum& rd = ctx->rd();
    const int n = rd.rank();
    const WeightBasis& wb = ctx->basis(mu);
    const int dim = wb.dim();
    // stack the linear maps r_i over the weight basis
    std::vector<int> offs;
    int rows = 0;
    std::vector<const WeightBasis*> lower(static_cast<size_t>(n), nullptr);
    for (int i = 0; i < n; ++i) {
        offs.push_back(rows);
        QVec down = qvec_sub(mu, rd.simple_root(i));
        if (qvec_nonneg(down)) {
            lower[static_cast<size_t>(i)] = &ctx->basis(down);
            rows += lower[static_cast<size_t>(i)]->dim();
        }
    }
    Mat M = mat_zero(rows, dim);
    Mat rhs = mat_zero(rows, 1);
    for (int i = 0; i < n; ++i) {
        if (!lower[static_cast<size_t>(i)]) continue;
        for (int b = 0; b < dim; ++b) {
            for (auto& [w, c] : skew_r_word(rd, i, wb.sel_words[static_cast<size_t>(b)])) {
                Vec red = ctx->reduce_word(w, Side::Plus);
                for (int t = 0; t < red.size(); ++t)
                    if (!red(t).is_zero()) M(offs[static_cast<size_t>(i)] + t, b) += c * red(t);
            }
        }
        QVec down = qvec_sub(mu, rd.simple_root(i));
        Vec av = A[static_cast<size_t>(i)].component(down);
        for (int t = 0; t < av.size(); ++t) rhs(offs[static_cast<size_t>(i)] + t, 0) = av(t);
    }
    Mat x;
    bool unique = false;
    if (!exact_solve(M, rhs, x, &unique))
        throw std::runtime_error("solve_step: inconsistent system at mu=" + qvec_str(mu) +
                                 " (should be unreachable after check_solvable)");
    if (dim > 0 && !unique)
        throw std::runtime_error("solve_step: rank-deficient system at mu=" + qvec_str(mu));
    AlgebraElement out(ctx, Side::Plus);
    Vec coords(dim);
    for (int b = 0; b < dim; ++b) coords(b) = x(b, 0);
    out.set_component(mu, coords);
    return out;
}

void QuasiKEngine::ensure(int cutoff) {
    const AlgebraCtx* ctx = p_->ctx;
    const RootDatum& rd = ctx->rd();
    const SatakeDatum& sd = *p_->sd;
    if (cutoff <= cutoff_) return;
    if (cutoff_ < 0) {
        comp_[qvec_zero(rd.rank())] = AlgebraElement::one(ctx, Side::Plus);
        cutoff_ = 0;
    }
    for (int h = cutoff_ + 1; h <= cutoff; ++h) {
        for (const QVec& mu : weights_of_height(rd.rank(), h)) {
            std::vector<AlgebraElement> A, iA;
            bool all_zero = true;
            for (int i = 0; i < rd.rank(); ++i) {
                auto [a, ia] = rhs_pair(mu, i);
                all_zero = all_zero && a.is_zero() && ia.is_zero();
                A.push_back(std::move(a));
                iA.push_back(std::move(ia));
            }
            if (all_zero) {
                // r_i(X_mu) = 0 for all i forces X_mu = 0 (joint kernel of the
                // skew derivations is trivial); nothing to solve or record
                log_.push_back({mu, true, false});
                continue;
            }
            if (h >= 2) check_solvable(mu, A, iA);
            AlgebraElement x = solve_step(mu, A);
            // redundant half of the system
            for (int i = 0; i < rd.rank(); ++i)
                if (!(skew_ir(i, x) == iA[static_cast<size_t>(i)]))
                    throw std::runtime_error("quasi K-matrix: ir(X_mu) != iA at mu=" + qvec_str(mu));
            // support: X_mu != 0 forces Theta(mu) = -mu
            if (!x.is_zero() && sd.theta_q(mu) != qvec_neg(mu))
                throw std::runtime_error("quasi K-matrix: support violates Theta(mu) = -mu at mu=" + qvec_str(mu));
            log_.push_back({mu, true, !x.is_zero()});
            if (!x.is_zero()) comp_[mu] = std::move(x);
        }
        cutoff_ = h;
    }
}

AlgebraElement QuasiKEngine::component(const QVec& mu) const {
    auto it = comp_.find(mu);
    if (it != comp_.end()) return it->second;
    return AlgebraElement::zero(p_->ctx, Side::Plus);
}

std::string QuasiKEngine::fingerprint() const {
    const RootDatum& rd = p_->ctx->rd();
    const SatakeDatum& sd = *p_->sd;
    std::ostringstream os;
    for (int i = 0; i < rd.rank(); ++i)
        for (int j = 0; j < rd.rank(); ++j) os << rd.a(i, j) << ",";
    os << "|X:";
    for (int i : sd.X) os << i << ",";
    os << "|tau:";
    for (int i : sd.tau) os << i << ",";
    os << "|c:";
    for (auto& x : p_->c) os << x.str() << ";";
    os << "|s:";
    for (auto& x : p_->s) os << x.str() << ";";
    os << "|wX:";
    for (int i : sd.wX_word) os << i << ",";
    os << "|w0:";
    for (int i : sd.w0_word) os << i << ",";
    os << "|order:" << (p_->ctx->reverse_lex() ? "revlex" : "lex");
    // FNV-1a
    const std::string s = os.str();
    uint64_t hsh = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        hsh ^= ch;
        hsh *= 1099511628211ULL;
    }
    std::ostringstream hex;
    hex << std::hex << hsh;
    return hex.str();
}

void QuasiKEngine::save_cache(const std::string& path) const {
    nlohmann::json j;
    j["fingerprint"] = fingerprint();
    j["cutoff"] = cutoff_;
    nlohmann::json comps = nlohmann::json::object();
    for (const auto& [mu, x] : comp_) {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& [w, c] : x.word_expansion()) {
            nlohmann::json t;
            t.push_back(w);
            t.push_back(c.str());
            terms.push_back(t);
        }
        comps[qvec_str(mu)] = {{"weight", mu}, {"terms", terms}};
    }
    j["components"] = comps;
    std::ofstream os(path);
    os << j.dump(1);
}

bool QuasiKEngine::load_cache(const std::string& path) {
    std::ifstream is(path);
    if (!is) return false;
    nlohmann::json j;
    try {
        is >> j;
    } catch (...) {
        return false;
    }
    if (j.value("fingerprint", std::string()) != fingerprint()) return false;
    const RootDatum& rd = p_->ctx->rd();
    std::map<QVec, AlgebraElement> loaded;
    int cut = j.value("cutoff", -1);
    if (cut < 0) return false;
    for (auto& [key, val] : j["components"].items()) {
        (void)key;
        QVec mu = val["weight"].get<QVec>();
        std::vector<std::pair<Word, Scalar>> terms;
        for (auto& t : val["terms"])
            terms.emplace_back(t[0].get<Word>(), Scalar::parse(t[1].get<std::string>(), rd.d()));
        loaded[mu] = AlgebraElement::from_words(p_->ctx, Side::Plus, terms);
    }
    comp_ = std::move(loaded);
    cutoff_ = cut;
    return true;
}

} // namespace qsp
