#include "qsp/catalog.hpp"

#include <cctype>

namespace qsp {

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = [] {
        std::vector<CatalogEntry> v;
        {
            CatalogEntry e;
            e.name = "A1-split";
            e.type = "A";
            e.rank = 1;
            e.tau = {0};
            e.c = {{0, "q^(-1)"}};
            e.modules = {"V(w1)", "V(2w1)"};
            e.pairs = {{"V(w1)", "V(w1)"}};
            v.push_back(e);
        }
        {
            CatalogEntry e;
            e.name = "A1-s";
            e.type = "A";
            e.rank = 1;
            e.tau = {0};
            e.c = {{0, "q^(-1)"}};
            e.s = {{0, "1"}};
            e.modules = {"V(w1)", "V(2w1)"};
            e.pairs = {{"V(w1)", "V(w1)"}};
            v.push_back(e);
        }
        {
            CatalogEntry e;
            e.name = "A2-split";
            e.type = "A";
            e.rank = 2;
            e.tau = {0, 1};
            e.c = {{0, "q^(-1)"}, {1, "q^(-1)"}};
            e.modules = {"V(w1)", "V(w2)"};
            e.pairs = {{"V(w1)", "V(w1)"}, {"V(w1)", "V(w2)"}};
            v.push_back(e);
        }
        {
            CatalogEntry e;
            e.name = "A2-quasisplit";
            e.type = "A";
            e.rank = 2;
            e.tau = {1, 0};
            e.c = {{0, "1-q^2"}, {1, "q-q^(-1)"}};
            e.modules = {"V(w1)", "V(w2)"};
            e.pairs = {{"V(w1)", "V(w1)"}, {"V(w1)", "V(w2)"}};
            v.push_back(e);
        }
        {
            CatalogEntry e;
            e.name = "A3-X2";
            e.type = "A";
            e.rank = 3;
            e.X = {1};
            e.tau = {2, 1, 0};
            e.c = {{0, "1-q^2"}, {2, "q^2-1"}};
            e.modules = {"V(w1)", "V(w3)"};
            e.pairs = {{"V(w1)", "V(w3)"}};
            v.push_back(e);
        }
        {
            CatalogEntry e;
            e.name = "B2-split";
            e.type = "B";
            e.rank = 2;
            e.tau = {0, 1};
            e.c = {{0, "q^(-2)"}, {1, "q^(-1)"}};
            e.modules = {"V(w1)", "V(w2)"};
            e.pairs = {{"V(w2)", "V(w2)"}};
            v.push_back(e);
        }
        return v;
    }();
    return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
    for (const auto& e : catalog())
        if (e.name == name) return e;
    throw std::domain_error("catalog_entry: unknown entry " + name);
}

int default_cutoff(int rank) {
    return rank <= 2 ? 8 : 6;
}

Session make_session(const CatalogEntry& e, bool reverse_lex) {
    Session s;
    s.name = e.name;
    s.rd = std::make_unique<RootDatum>(cartan_of_type(e.type, e.rank));
    s.ctx = std::make_unique<AlgebraCtx>(*s.rd, reverse_lex);
    s.sd = std::make_unique<SatakeDatum>(validate_admissible(*s.rd, e.X, e.tau));
    std::map<int, Scalar> c, sc;
    for (auto& [i, str] : e.c) c[i] = Scalar::parse(str, s.rd->d());
    for (auto& [i, str] : e.s) sc[i] = Scalar::parse(str, s.rd->d());
    s.params = validate_params(s.ctx.get(), *s.sd, c, sc);
    return s;
}

PWeight parse_module_descriptor(const RootDatum& rd, const std::string& text) {
    // V( term (+ term)* ), term = [int] w<index>
    size_t pos = 0;
    auto fail = [&](const std::string& m) -> void {
        throw std::domain_error("module descriptor \"" + text + "\": " + m);
    };
    auto skip = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    skip();
    if (pos >= text.size() || text[pos] != 'V') fail("expected V(...)");
    ++pos;
    skip();
    if (pos >= text.size() || text[pos] != '(') fail("expected '('");
    ++pos;
    PWeight lam(static_cast<size_t>(rd.rank()), Rational(0));
    for (;;) {
        skip();
        long coef = 1;
        if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            coef = 0;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                coef = coef * 10 + (text[pos++] - '0');
            if (pos < text.size() && text[pos] == '*') ++pos;
        }
        skip();
        if (pos >= text.size() || text[pos] != 'w') fail("expected fundamental weight wk");
        ++pos;
        long idx = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            idx = idx * 10 + (text[pos++] - '0');
        if (idx < 1 || idx > rd.rank()) fail("weight index out of range");
        lam = pw_add(lam, pw_scale(rd.fundamental_weight(static_cast<int>(idx) - 1), Rational(coef)));
        skip();
        if (pos < text.size() && text[pos] == '+') {
            ++pos;
            continue;
        }
        break;
    }
    if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
    return lam;
}

} // namespace qsp
