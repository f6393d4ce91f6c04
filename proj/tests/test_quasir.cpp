#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qsp/quasir.hpp"
#include "qsp/rootdata.hpp"

using namespace qsp;

namespace {

struct Fixture {
    RootDatum rd;
    AlgebraCtx ctx;
    explicit Fixture(const std::string& type, int rank) : rd(cartan_of_type(type, rank)), ctx(rd) {}
};

} // namespace

TEST_CASE("root vectors along reduced words") {
    Fixture f("A", 2);
    std::vector<int> word{0, 1, 0};
    RootVectorTable rv = root_vectors(&f.ctx, word);
    CHECK(rv.roots.size() == 3);
    // gamma_1 = alpha_1, E_{gamma_1} = E_1 (empty braid product)
    CHECK(rv.roots[0] == QVec{1, 0});
    CHECK(rv.Epos[0] == AlgebraElement::generator(&f.ctx, Side::Plus, 0));
    // gamma_2 = sigma_1(alpha_2) = alpha_1 + alpha_2 and E_{gamma_2} = T_1(E_2)
    CHECK(rv.roots[1] == QVec{1, 1});
    CHECK(rv.Epos[1] == braid_T(0, AlgebraElement::generator(&f.ctx, Side::Plus, 1), BraidDir::Fwd));
    // the three roots enumerate Phi+
    CHECK(rv.roots[2] == QVec{0, 1});
    // non-reduced word is refused
    CHECK_THROWS(root_vectors(&f.ctx, std::vector<int>{0, 0}));
}

TEST_CASE("dual-basis quasi R-matrix components") {
    Fixture f("A", 2);
    // R_0 = 1 (x) 1
    auto c0 = quasiR_dual(&f.ctx, QVec{0, 0});
    REQUIRE(c0.size() == 1);
    CHECK(c0.begin()->second == Scalar(1));
    // R_{alpha_i} = -(q_i - q_i^{-1}) F_i (x) E_i
    auto c1 = quasiR_dual(&f.ctx, QVec{1, 0});
    REQUIRE(c1.size() == 1);
    CHECK(c1.begin()->second == -f.rd.qi_bracket(0));
}

TEST_CASE("A1: PBW factor reproduces the closed form") {
    Fixture f("A", 1);
    RootVectorTable rv = root_vectors(&f.ctx, std::vector<int>{0});
    QuasiR pbw = quasiR_pbw(&f.ctx, rv, 4);
    long epsd = f.rd.d();
    Scalar q = Scalar::v_pow(epsd, f.rd.d());
    Scalar br = q - q.inv();
    for (int r = 0; r <= 4; ++r) {
        auto comp = pbw.component(QVec{r});
        REQUIRE(comp.size() == 1);
        // (-1)^r q^{-r(r-1)/2} (q-q^{-1})^r / [r]!
        Scalar expect(1);
        for (int k = 0; k < r; ++k) expect *= br;
        expect = expect * Scalar::v_pow(-epsd * (static_cast<long>(r) * (r - 1) / 2), f.rd.d()) /
                 qfactorial(r, epsd, f.rd.d());
        if (r % 2 == 1) expect = -expect;
        CHECK(comp.begin()->second == expect);
        // and it agrees with the dual-basis construction
        auto dual = quasiR_dual(&f.ctx, QVec{r});
        CHECK(comp == dual);
    }
}

TEST_CASE("cutoff zero gives the identity") {
    Fixture f("A", 2);
    RootVectorTable rv = root_vectors(&f.ctx, f.rd.longest_word_with_prefix({}));
    QuasiR pbw = quasiR_pbw(&f.ctx, rv, 0);
    CHECK(pbw == QuasiR::one(&f.ctx, 0));
}

TEST_CASE("cross-oracle: dual = PBW per weight") {
    SUBCASE("A2 to height 4") {
        Fixture f("A", 2);
        RootVectorTable rv = root_vectors(&f.ctx, f.rd.longest_word_with_prefix({}));
        QuasiR pbw = quasiR_pbw(&f.ctx, rv, 4);
        QuasiR dual = quasiR_dual_all(&f.ctx, 4);
        CHECK(pbw == dual);
    }
    SUBCASE("B2 to height 4") {
        Fixture f("B", 2);
        RootVectorTable rv = root_vectors(&f.ctx, f.rd.longest_word_with_prefix({}));
        CHECK(rv.roots.size() == 4);
        QuasiR pbw = quasiR_pbw(&f.ctx, rv, 4);
        QuasiR dual = quasiR_dual_all(&f.ctx, 4);
        CHECK(pbw == dual);
    }
    SUBCASE("A3 to height 3") {
        Fixture f("A", 3);
        RootVectorTable rv = root_vectors(&f.ctx, f.rd.longest_word_with_prefix({1}));
        QuasiR pbw = quasiR_pbw(&f.ctx, rv, 3);
        QuasiR dual = quasiR_dual_all(&f.ctx, 3);
        CHECK(pbw == dual);
    }
}

TEST_CASE("R^{-1} = bar(R) per weight up to the cutoff") {
    Fixture f("A", 2);
    QuasiR R = quasiR_dual_all(&f.ctx, 4);
    QuasiR prod = R.mul(R.bar());
    CHECK(prod == QuasiR::one(&f.ctx, 4));
}

TEST_CASE("prefix/suffix factorizations") {
    SUBCASE("X = empty: suffix product is all of R") {
        Fixture f("A", 2);
        RootVectorTable rv = root_vectors(&f.ctx, f.rd.longest_word_with_prefix({}));
        CHECK(R_times_RXbar(&f.ctx, rv, 0, 4) == quasiR_pbw(&f.ctx, rv, 4));
        CHECK(quasiR_X(&f.ctx, rv, 0, 4) == QuasiR::one(&f.ctx, 4));
    }
    SUBCASE("X = I: suffix empty") {
        Fixture f("A", 2);
        RootVectorTable rv = root_vectors(&f.ctx, f.rd.longest_word_with_prefix({}));
        CHECK(R_times_RXbar(&f.ctx, rv, rv.roots.size(), 4) == QuasiR::one(&f.ctx, 4));
    }
    SUBCASE("A3, X = {2}: five suffix factors; R = (R bar R_X) R_X") {
        Fixture f("A", 3);
        std::vector<int> w0 = f.rd.longest_word_with_prefix({1});
        RootVectorTable rv = root_vectors(&f.ctx, w0);
        CHECK(rv.roots.size() - 1 == 5);
        QuasiR suffix = R_times_RXbar(&f.ctx, rv, 1, 3);
        QuasiR rx = quasiR_X(&f.ctx, rv, 1, 3);
        CHECK(suffix.mul(rx) == quasiR_pbw(&f.ctx, rv, 3));
        // R_X is the quasi R-matrix of the X subsystem: compare against the
        // dual construction restricted to Q_X^+ weights
        for (const auto& [mu, comp] : rx.components()) {
            CHECK(mu[0] == 0);
            CHECK(mu[2] == 0);
            CHECK(comp == quasiR_dual(&f.ctx, mu));
        }
    }
}
