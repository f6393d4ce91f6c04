#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qsp/catalog.hpp"

#include <random>

using namespace qsp;

namespace {

PWeight random_weight(const RootDatum& rd, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> co(-3, 3);
    PWeight w(static_cast<size_t>(rd.rank()), Rational(0));
    for (int j = 0; j < rd.rank(); ++j) w = pw_add(w, pw_scale(rd.fundamental_weight(j), Rational(co(rng))));
    return w;
}

} // namespace

TEST_CASE("X_i in the split case and its weight in general") {
    SUBCASE("X empty, tau = id, s = 1: X_i = -E_i") {
        Session s = make_session(catalog_entry("A2-split"));
        for (int i = 0; i < 2; ++i)
            CHECK(s.params.Xi[static_cast<size_t>(i)] ==
                  -AlgebraElement::generator(s.ctx.get(), Side::Plus, i));
    }
    SUBCASE("X empty, tau = (1 2): X_i = -s(tau(i)) E_{tau(i)}") {
        Session s = make_session(catalog_entry("A2-quasisplit"));
        for (int i = 0; i < 2; ++i) {
            int ti = s.sd->tau[static_cast<size_t>(i)];
            CHECK(s.params.Xi[static_cast<size_t>(i)] ==
                  AlgebraElement::generator(s.ctx.get(), Side::Plus, ti)
                      .scaled(Scalar(-s.sd->sfun[static_cast<size_t>(ti)])));
        }
    }
    SUBCASE("A3, X={2}: weight(X_1) = alpha_2 + alpha_3") {
        Session s = make_session(catalog_entry("A3-X2"));
        REQUIRE(s.params.Xi[0].components().size() == 1);
        CHECK(s.params.Xi[0].components().begin()->first == QVec{0, 1, 1});
        // r_j(X_i) = 0 whenever j != tau(i)
        for (int j : {0, 1}) CHECK(skew_r(j, s.params.Xi[0]).is_zero());
        CHECK_FALSE(skew_r(2, s.params.Xi[0]).is_zero());
    }
}

TEST_CASE("bar(X_i) matches the inverse-braid formula") {
    for (const char* name : {"A2-quasisplit", "A3-X2", "B2-split"}) {
        Session s = make_session(catalog_entry(name));
        const RootDatum& rd = *s.rd;
        for (int i = 0; i < rd.rank(); ++i) {
            if (s.sd->in_X(i)) continue;
            AlgebraElement lhs = s.params.Xi[static_cast<size_t>(i)].bar();
            Rational e = -rd.pair(pw_scale(s.sd->rhoX, Rational(2)), pw_from_qvec(rd.simple_root(i)));
            AlgebraElement rhs = s.params.TwXinvE[static_cast<size_t>(i)]
                                     .scaled(rd.q_power(e) * Scalar(-s.sd->sfun[static_cast<size_t>(i)]));
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("catalog parameters validate; derived values match the worked example") {
    for (const auto& e : catalog()) {
        CAPTURE(e.name);
        CHECK_NOTHROW(make_session(e));
    }
    // A3 Choice 2: gamma(varpi_1) = gamma(varpi_2) = gamma(varpi_3) = q^2 - 1
    Session s = make_session(catalog_entry("A3-X2"));
    Scalar q = Scalar::v_pow(s.rd->d(), s.rd->d());
    for (int j = 0; j < 3; ++j) CHECK(s.params.gamma_fw[static_cast<size_t>(j)] == q * q - 1);
}

TEST_CASE("parameter rejection paths") {
    Session base = make_session(catalog_entry("A2-quasisplit"));
    const RootDatum& rd = *base.rd;
    SUBCASE("s outside I_ns is rejected") {
        // A2 quasisplit has I_ns empty (tau swaps the two nodes)
        std::map<int, Scalar> c{{0, Scalar::parse("1-q^2", rd.d())}, {1, Scalar::parse("q-q^(-1)", rd.d())}};
        std::map<int, Scalar> sv{{0, Scalar(1)}};
        CHECK_THROWS_AS(validate_params(base.ctx.get(), *base.sd, c, sv), ParamError);
    }
    SUBCASE("octau/Mparameters1 violation is caught and named") {
        std::map<int, Scalar> c{{0, Scalar::parse("q", rd.d())}, {1, Scalar::parse("q", rd.d())}};
        std::map<int, Scalar> sv;
        try {
            validate_params(base.ctx.get(), *base.sd, c, sv);
            FAIL("expected ParamError");
        } catch (const ParamError& pe) {
            bool octau = false, mp1 = false;
            for (auto& v : pe.violations) {
                if (v.find("octau") != std::string::npos) octau = true;
                if (v.find("Mparameters1") != std::string::npos) mp1 = true;
            }
            CHECK(octau);
            CHECK(mp1);
        }
    }
    SUBCASE("missing c is rejected") {
        std::map<int, Scalar> c{{0, Scalar::parse("1-q^2", rd.d())}};
        CHECK_THROWS_AS(validate_params(base.ctx.get(), *base.sd, c, {}), ParamError);
    }
    SUBCASE("zero c is rejected") {
        std::map<int, Scalar> c{{0, Scalar(0)}, {1, Scalar(1)}};
        CHECK_THROWS_AS(validate_params(base.ctx.get(), *base.sd, c, {}), ParamError);
    }
}

TEST_CASE("A1 with s: set S permits s_1 there") {
    Session s = make_session(catalog_entry("A1-s"));
    CHECK(s.params.s[0] == Scalar(1));
}

TEST_CASE("gamma is multiplicative and tau tau0 invariant") {
    for (const char* name : {"A1-split", "A2-quasisplit", "A3-X2", "B2-split"}) {
        Session s = make_session(catalog_entry(name));
        const RootDatum& rd = *s.rd;
        std::mt19937_64 rng(11);
        for (int t = 0; t < 20; ++t) {
            PWeight a = random_weight(rd, rng), b = random_weight(rd, rng);
            CHECK(s.params.gamma_eval(pw_add(a, b)) == s.params.gamma_eval(a) * s.params.gamma_eval(b));
            CHECK(s.params.gamma_eval(s.sd->tautau0_weight(a)) == s.params.gamma_eval(a));
        }
        // consistency with gamma on Q
        for (int i = 0; i < rd.rank(); ++i)
            CHECK(s.params.gamma_eval(pw_from_qvec(rd.simple_root(i))) == s.params.gamma_node(i));
    }
}

TEST_CASE("xi: normalization, recursions, product rule") {
    for (const char* name : {"A1-split", "A1-s", "A2-split", "A2-quasisplit", "A3-X2", "B2-split"}) {
        CAPTURE(name);
        Session s = make_session(catalog_entry(name));
        const RootDatum& rd = *s.rd;
        XiFun xi(&s.params);
        PWeight zero(static_cast<size_t>(rd.rank()), Rational(0));
        CHECK(xi(zero) == Scalar(1));
        std::mt19937_64 rng(13);
        for (int t = 0; t < 50; ++t) {
            PWeight mu = random_weight(rd, rng);
            // xi(mu + a_i) = gamma(i) q^{-(a_i, Th a_i) - (mu, a_i + Th a_i)} xi(mu)
            for (int i = 0; i < rd.rank(); ++i) {
                PWeight ai = pw_from_qvec(rd.simple_root(i));
                PWeight thai = pw_from_qvec(s.sd->theta_q(rd.simple_root(i)));
                Rational expo = -rd.pair(ai, thai) - rd.pair(mu, pw_add(ai, thai));
                CHECK(xi(pw_add(mu, ai)) == s.params.gamma_node(i) * rd.q_power(expo) * xi(mu));
            }
            // product rule
            PWeight nu = random_weight(rd, rng);
            Rational e2 = -rd.pair(pw_add(mu, s.sd->theta(mu)), nu);
            CHECK(xi(pw_add(mu, nu)) == xi(mu) * xi(nu) * rd.q_power(e2));
        }
        // the Q_X recursion for lambda supported on X
        if (!s.sd->X.empty()) {
            std::mt19937_64 rng2(17);
            for (int t = 0; t < 20; ++t) {
                PWeight mu = random_weight(rd, rng2);
                QVec lam = qvec_zero(rd.rank());
                for (int i : s.sd->X) lam[static_cast<size_t>(i)] = static_cast<int>(rng2() % 3);
                PWeight lw = pw_from_qvec(lam);
                Rational e = -rd.pair(lw, lw) - 2 * rd.pair(mu, lw);
                CHECK(xi(pw_add(mu, lw)) == rd.q_power(e) * xi(mu));
            }
        }
    }
    // split A1: xi(alpha) = gamma(1) q^{(a~, a~) alpha(varpi^vee)} = q^{-1} q^2 = q
    Session s = make_session(catalog_entry("A1-split"));
    XiFun xi(&s.params);
    CHECK(xi(pw_from_qvec(s.rd->simple_root(0))) == Scalar::v_pow(s.rd->d(), s.rd->d()));
}

TEST_CASE("corrupted xi breaks the recursion (negative-control wiring)") {
    Session s = make_session(catalog_entry("A1-split"));
    XiFun bad(&s.params, /*corrupt=*/true);
    const RootDatum& rd = *s.rd;
    PWeight zero(1, Rational(0));
    PWeight a = pw_from_qvec(rd.simple_root(0));
    PWeight th = pw_from_qvec(s.sd->theta_q(rd.simple_root(0)));
    Rational expo = -rd.pair(a, th) - rd.pair(zero, pw_add(a, th));
    CHECK_FALSE(bad(a) == s.params.gamma_node(0) * rd.q_power(expo) * bad(zero));
}
