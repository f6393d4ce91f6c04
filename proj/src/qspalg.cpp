#include "qsp/qspalg.hpp"

#include <algorithm>
#include <sstream>

namespace qsp {

Scalar QspParams::gamma_node(int i) const {
    if (sd->in_X(i)) return Scalar(1);
    return c[static_cast<size_t>(i)] * Scalar(sd->sfun[static_cast<size_t>(sd->tau[static_cast<size_t>(i)])]);
}

Scalar QspParams::gamma_eval(const PWeight& lam) const {
    const RootDatum& rd = ctx->rd();
    Scalar acc(1);
    for (int j = 0; j < rd.rank(); ++j) {
        Rational nj = rd.hpair(lam, j);
        if (nj.get_den() != 1) throw std::domain_error("gamma_eval: weight not in P");
        long e = static_cast<long>(mpz_class(nj.get_num()).get_si());
        Scalar g = gamma_fw[static_cast<size_t>(j)];
        for (long k = 0; k < (e > 0 ? e : -e); ++k) acc *= (e > 0 ? g : g.inv());
    }
    return acc;
}

AlgebraElement QspParams::bar_cX(int i) const {
    // the literal bar image; equal to -rho_i T_{wX}^{-1}(E_{tau(i)}) exactly
    // when octau holds (checked at validation), but computed honestly so that
    // corrupted parameters surface in the recursion
    return Xi[static_cast<size_t>(i)].bar().scaled(c[static_cast<size_t>(i)].bar());
}

MixedElement QspParams::B(int i) const {
    const RootDatum& rd = ctx->rd();
    if (sd->in_X(i)) return MixedElement::gen_F(ctx, i);
    QVec mai = qvec_neg(rd.simple_root(i));
    MixedElement b = MixedElement::gen_F(ctx, i);
    b += MixedElement::from_plus(Xi[static_cast<size_t>(i)].scaled(c[static_cast<size_t>(i)]).with_ktag(mai));
    b += MixedElement::gen_K(ctx, mai).scaled(s[static_cast<size_t>(i)]);
    return b;
}

namespace {

// order of varpi_j in P/Q
long fw_order(const RootDatum& rd, int j) {
    for (long m = 1; m <= 64; ++m) {
        PWeight w = pw_scale(rd.fundamental_weight(j), Rational(m));
        bool integral = true;
        for (auto& x : w)
            if (x.get_den() != 1) integral = false;
        if (integral) return m;
    }
    throw std::logic_error("fw_order: runaway");
}

Scalar gamma_on_q(const QspParams& p, const QVec& mu) {
    Scalar acc(1);
    for (size_t i = 0; i < mu.size(); ++i) {
        Scalar g = p.gamma_node(static_cast<int>(i));
        long e = mu[i];
        for (long k = 0; k < (e > 0 ? e : -e); ++k) acc *= (e > 0 ? g : g.inv());
    }
    return acc;
}

// search gamma(varpi_j) within the multiplicative group generated by v, -1
// and the gamma(i); fail with a pointer at the choice-of-parameters issue
std::vector<Scalar> solve_gamma(const QspParams& p) {
    const RootDatum& rd = p.ctx->rd();
    const int n = rd.rank();
    std::vector<std::vector<Scalar>> cand(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        long m = fw_order(rd, j);
        // target: gamma(m varpi_j) evaluated on Q
        PWeight w = pw_scale(rd.fundamental_weight(j), Rational(m));
        QVec wq(static_cast<size_t>(n), 0);
        for (int t = 0; t < n; ++t) wq[static_cast<size_t>(t)] = static_cast<int>(mpz_class(w[static_cast<size_t>(t)].get_num()).get_si());
        Scalar target = gamma_on_q(p, wq);
        // deterministic preference: positive sign, small |e|, few factors
        std::vector<std::string> seen;
        for (long absd = 0; absd <= 2L * rd.d(); ++absd)
            for (long e : (absd == 0 ? std::vector<long>{0} : std::vector<long>{absd, -absd}))
                for (int sign = 0; sign < 2; ++sign)
                    for (long mask = 0; mask < (1L << n); ++mask) {
                        Scalar g = Scalar::v_pow(e, rd.d());
                        if (sign) g = -g;
                        bool ok = true;
                        for (int i = 0; i < n && ok; ++i)
                            if (mask & (1L << i)) {
                                Scalar gi = p.gamma_node(i);
                                if (gi.is_one()) {
                                    ok = false; // redundant mask
                                    continue;
                                }
                                g *= gi;
                            }
                        if (!ok) continue;
                        Scalar pw(1);
                        for (long k = 0; k < m; ++k) pw *= g;
                        if (pw == target) {
                            std::string key = g.str();
                            if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
                                seen.push_back(key);
                                cand[static_cast<size_t>(j)].push_back(g);
                            }
                        }
                    }
        if (cand[static_cast<size_t>(j)].empty())
            throw std::domain_error(
                "gamma extension from Q to P not found over K(q^{1/d}); the parameter choice "
                "forces roots of unity (pick a Choice-2-style c instead)");
    }
    // backtrack over candidates against the consistency conditions
    std::vector<Scalar> pick(static_cast<size_t>(n), Scalar(1));
    std::function<bool(int)> rec = [&](int j) -> bool {
        if (j == n) {
            for (int i = 0; i < n; ++i) {
                Scalar prod(1);
                for (int t = 0; t < n; ++t) {
                    long e = rd.a(t, i);
                    Scalar g = pick[static_cast<size_t>(t)];
                    for (long k = 0; k < (e > 0 ? e : -e); ++k) prod *= (e > 0 ? g : g.inv());
                }
                if (!(prod == p.gamma_node(i))) return false;
            }
            return true;
        }
        for (const Scalar& g : cand[static_cast<size_t>(j)]) {
            pick[static_cast<size_t>(j)] = g;
            if (rec(j + 1)) return true;
        }
        return false;
    };
    if (!rec(0))
        throw std::domain_error(
            "gamma extension from Q to P inconsistent over K(q^{1/d}); the parameter choice "
            "forces roots of unity (pick a Choice-2-style c instead)");
    return pick;
}

} // namespace

QspParams validate_params(const AlgebraCtx* ctx, const SatakeDatum& sd,
                          const std::map<int, Scalar>& c_in, const std::map<int, Scalar>& s_in,
                          const std::optional<std::vector<Scalar>>& gamma_override, bool skip_checks) {
    const RootDatum& rd = ctx->rd();
    const int n = rd.rank();
    QspParams p;
    p.ctx = ctx;
    p.sd = &sd;
    p.c.assign(static_cast<size_t>(n), Scalar(0));
    p.s.assign(static_cast<size_t>(n), Scalar(0));
    std::vector<std::string> bad;

    for (int i = 0; i < n; ++i) {
        if (sd.in_X(i)) {
            if (c_in.count(i) || s_in.count(i)) bad.push_back("c/s given for a node of X (fixed to 0 there)");
            continue;
        }
        auto it = c_in.find(i);
        if (it == c_in.end() || it->second.is_zero()) {
            bad.push_back("set C: c_" + std::to_string(i + 1) + " missing or zero");
            continue;
        }
        p.c[static_cast<size_t>(i)] = it->second;
        auto js = s_in.find(i);
        if (js != s_in.end()) p.s[static_cast<size_t>(i)] = js->second;
    }

    // set C: c_i = c_{tau(i)} when tau(i) != i and (alpha_i, Theta alpha_i) = 0
    for (int i = 0; i < n; ++i) {
        if (sd.in_X(i)) continue;
        int ti = sd.tau[static_cast<size_t>(i)];
        QVec ai = rd.simple_root(i);
        if (ti != i && rd.pair_qq(ai, sd.theta_q(ai)) == 0 &&
            !(p.c[static_cast<size_t>(i)] == p.c[static_cast<size_t>(ti)]))
            bad.push_back("set C: c_i != c_{tau(i)} at i=" + std::to_string(i + 1));
    }
    // set S
    for (int i = 0; i < n; ++i) {
        if (p.s[static_cast<size_t>(i)].is_zero()) continue;
        bool in_ns = std::find(sd.Ins.begin(), sd.Ins.end(), i) != sd.Ins.end();
        if (!in_ns) {
            bad.push_back("set S: s_" + std::to_string(i + 1) + " nonzero outside I_ns");
            continue;
        }
        for (int j : sd.Ins) {
            if (j == i) continue;
            int aji = rd.a(j, i);
            if (aji > 0 || (-aji) % 2 != 0) bad.push_back("set S: a_{ji} not in -2N_0 for i=" + std::to_string(i + 1));
        }
        // Mparameters2
        if (!(p.s[static_cast<size_t>(i)].bar() == p.s[static_cast<size_t>(i)]))
            bad.push_back("Mparameters2: s_" + std::to_string(i + 1) + " not bar-invariant");
    }

    // X_i, T_{wX}^{-1}(E_{tau i}), Z_i, rho_i
    p.Xi.assign(static_cast<size_t>(n), AlgebraElement::zero(ctx, Side::Plus));
    p.TwXinvE.assign(static_cast<size_t>(n), AlgebraElement::zero(ctx, Side::Plus));
    p.Zi.assign(static_cast<size_t>(n), AlgebraElement::zero(ctx, Side::Plus));
    p.rho.assign(static_cast<size_t>(n), Scalar(0));
    for (int i = 0; i < n; ++i) {
        if (sd.in_X(i)) continue;
        int ti = sd.tau[static_cast<size_t>(i)];
        AlgebraElement e = AlgebraElement::generator(ctx, Side::Plus, ti);
        // T_{wX} = T_{j1} ... T_{js}: apply T_{js} first; the inverse applies
        // T_{j1}^{-1} first
        AlgebraElement einv = e;
        for (int j : sd.wX_word) einv = braid_T(j, einv, BraidDir::Inv, true);
        AlgebraElement efwd = e;
        for (auto it = sd.wX_word.rbegin(); it != sd.wX_word.rend(); ++it)
            efwd = braid_T(*it, efwd, BraidDir::Fwd, true);
        p.Xi[static_cast<size_t>(i)] = efwd.scaled(Scalar(-sd.sfun[static_cast<size_t>(ti)]));
        p.TwXinvE[static_cast<size_t>(i)] = einv;
        QVec ai = rd.simple_root(i);
        // weight of X_i must be -Theta(alpha_i)
        QVec want = qvec_neg(sd.theta_q(ai));
        if (p.Xi[static_cast<size_t>(i)].components().size() != 1 ||
            p.Xi[static_cast<size_t>(i)].components().begin()->first != want)
            throw std::logic_error("X_i has unexpected weight");
        // r_j(X_i) = 0 unless j = tau(i)
        for (int j = 0; j < n; ++j)
            if (j != ti && !skew_r(j, p.Xi[static_cast<size_t>(i)]).is_zero())
                throw std::logic_error("r_j(X_i) != 0 for j != tau(i)");
        p.Zi[static_cast<size_t>(i)] =
            skew_r(ti, p.Xi[static_cast<size_t>(i)]).with_ktag(qvec_sub(rd.simple_root(ti), ai));
        long epair = rd.pair_qq(ai, sd.theta_q(ai));
        p.rho[static_cast<size_t>(i)] = p.c[static_cast<size_t>(sd.tau[static_cast<size_t>(i)])] *
                                        Scalar(sd.sfun[static_cast<size_t>(i)]) *
                                        Scalar::v_pow(-rd.d() * epair, rd.d());
    }

    // bar consistency through Z_i
    for (int i = 0; i < n && !skip_checks; ++i) {
        if (sd.in_X(i)) continue;
        int ti = sd.tau[static_cast<size_t>(i)];
        QVec ai = rd.simple_root(i);
        QVec ati = rd.simple_root(ti);
        // octau: c_{tau(i)} = q^{(alpha_i, Theta(alpha_i) - 2 rho_X)} bar(c_i)
        Rational ex = rd.pair(pw_from_qvec(ai),
                              pw_sub(pw_from_qvec(sd.theta_q(ai)), pw_scale(sd.rhoX, Rational(2))));
        Scalar rhs = rd.q_power(ex) * p.c[static_cast<size_t>(i)].bar();
        if (!(p.c[static_cast<size_t>(ti)] == rhs))
            bad.push_back("octau: c_{tau(i)} != q^{(a_i,Theta a_i - 2 rho_X)} bar(c_i) at i=" + std::to_string(i + 1));
        // overlineciXi: bar(c_i X_i) = -rho_i T_{wX}^{-1}(E_{tau(i)})
        if (!(p.bar_cX(i) == p.TwXinvE[static_cast<size_t>(i)].scaled(-p.rho[static_cast<size_t>(i)])))
            bad.push_back("overlineciXi: bar(c_i X_i) != -rho_i TwX^{-1}(E_tau(i)) at i=" + std::to_string(i + 1));
        // Mparameters1: bar(c_i Z_i) = q^{(alpha_i, alpha_{tau(i)})} c_{tau(i)} Z_{tau(i)}
        AlgebraElement lhs = p.Zi[static_cast<size_t>(i)].bar().scaled(p.c[static_cast<size_t>(i)].bar());
        AlgebraElement rhs2 =
            p.Zi[static_cast<size_t>(ti)].scaled(rd.q_power(Rational(rd.pair_qq(ai, ati))) * p.c[static_cast<size_t>(ti)]);
        if (!(lhs == rhs2)) bad.push_back("Mparameters1: bar(c_i Z_i) mismatch at i=" + std::to_string(i + 1));
        // nu_i = 1 in finite type: bar(Z_i) = q^{(alpha_i, alpha_i - wX(alpha_i) - 2 rho_X)} Z_{tau(i)}
        if (rd.finite_type()) {
            PWeight w = pw_sub(pw_from_qvec(qvec_sub(ai, rd.apply_word_q(sd.wX_word, ai))),
                               pw_scale(sd.rhoX, Rational(2)));
            Scalar f = rd.q_power(rd.pair(pw_from_qvec(ai), w));
            if (!(p.Zi[static_cast<size_t>(i)].bar() == p.Zi[static_cast<size_t>(ti)].scaled(f)))
                bad.push_back("oZ with nu_i=1 fails at i=" + std::to_string(i + 1));
        }
        // Assumption (tau0)
        int t0t = sd.tautau0(i);
        if (!(p.c[static_cast<size_t>(t0t)] == p.c[static_cast<size_t>(i)]))
            bad.push_back("Assumption (tau0): c_{tau0 tau(i)} != c_i at i=" + std::to_string(i + 1));
        int t0i = sd.tau0[static_cast<size_t>(i)];
        if (!(p.s[static_cast<size_t>(t0i)] == p.s[static_cast<size_t>(i)]))
            bad.push_back("Assumption (tau0): s_{tau0(i)} != s_i at i=" + std::to_string(i + 1));
        if (sd.sfun[static_cast<size_t>(ti)] != sd.sfun[static_cast<size_t>(t0i)])
            bad.push_back("Assumption (tau0): s(tau(i)) != s(tau0(i)) at i=" + std::to_string(i + 1));
    }

    if (!bad.empty() && !skip_checks) throw ParamError(std::move(bad));

    if (gamma_override) {
        p.gamma_fw = *gamma_override;
        if (static_cast<int>(p.gamma_fw.size()) != n) throw std::domain_error("gamma override has wrong length");
    } else {
        rd.require_finite("gamma extension");
        p.gamma_fw = solve_gamma(p);
    }
    if (rd.finite_type() && !skip_checks) {
        // consistency with gamma on Q and tau tau0 invariance
        for (int i = 0; i < n; ++i) {
            Scalar prod(1);
            for (int t = 0; t < n; ++t) {
                long e = rd.a(t, i);
                Scalar g = p.gamma_fw[static_cast<size_t>(t)];
                for (long k = 0; k < (e > 0 ? e : -e); ++k) prod *= (e > 0 ? g : g.inv());
            }
            if (!(prod == p.gamma_node(i))) throw ParamError({"gamma override inconsistent with gamma on Q"});
            if (!(p.gamma_fw[static_cast<size_t>(sd.tautau0(i))] == p.gamma_fw[static_cast<size_t>(i)]))
                throw ParamError({"gamma(tau tau0(mu)) != gamma(mu)"});
        }
    }
    return p;
}

Scalar XiFun::operator()(const PWeight& lam) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(lam);
    if (it != memo_.end()) return it->second;
    const RootDatum& rd = p_->ctx->rd();
    const SatakeDatum& sd = *p_->sd;
    PWeight th = sd.theta(lam);
    PWeight plus = pw_scale(pw_add(lam, th), Rational(1, 2));
    Rational expo = -rd.pair(plus, plus);
    for (int k = 0; k < rd.rank(); ++k) {
        QVec ak = rd.simple_root(k);
        PWeight tk = pw_scale(pw_sub(pw_from_qvec(ak), pw_from_qvec(sd.theta_q(ak))), Rational(1, 2));
        expo += rd.pair(tk, tk) * lam[static_cast<size_t>(k)]; // lam(varpi_k^vee) = alpha-coordinate k
    }
    Rational dx = expo * rd.d();
    if (dx.get_den() != 1)
        throw std::domain_error("xi exponent " + std::string(expo.get_str()) +
                                " is not in (1/d)Z; the finite-type integrality claim failed");
    Scalar val = p_->gamma_eval(lam) * Scalar::v_pow(static_cast<long>(mpz_class(dx.get_num()).get_si()), rd.d());
    if (corrupt_) {
        // negative control: an extra q^{(lam, alpha_1)} violates the recursion
        Rational bad = rd.pair(lam, pw_from_qvec(rd.simple_root(0))) * rd.d();
        val *= Scalar::v_pow(static_cast<long>(mpz_class(bad.get_num()).get_si()), rd.d());
    }
    memo_.emplace(lam, val);
    return val;
}

} // namespace qsp
