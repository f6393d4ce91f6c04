#include "qsp/cli_run.hpp"

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>

namespace qsp {

DatumSpec parse_datum_json(const nlohmann::json& j) {
    DatumSpec d;
    if (j.contains("cartan")) {
        d.cartan = j["cartan"].get<std::vector<std::vector<int>>>();
    } else {
        d.cartan = cartan_of_type(j.value("type", "A"), j.value("rank", 1));
    }
    int n = static_cast<int>(d.cartan.size());
    if (j.contains("X"))
        for (int x : j["X"]) d.X.push_back(x - 1);
    d.tau.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) d.tau[static_cast<size_t>(i)] = i;
    if (j.contains("tau"))
        for (auto& [k, v] : j["tau"].items()) d.tau[static_cast<size_t>(std::stoi(k) - 1)] = v.get<int>() - 1;
    return d;
}

namespace {

struct Resolved {
    Session session;
    std::vector<std::string> modules;
    std::vector<std::pair<std::string, std::string>> pairs;
    int cutoff;
};

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::domain_error("cannot open " + path);
    nlohmann::json j;
    is >> j;
    return j;
}

void apply_params_file(Session& s, const std::string& path) {
    nlohmann::json pj = load_json_file(path);
    nlohmann::json cj = pj.value("c", nlohmann::json::object());
    nlohmann::json sj = pj.value("s", nlohmann::json::object());
    std::map<int, Scalar> c, sc;
    for (auto& [k, v] : cj.items()) c[std::stoi(k) - 1] = Scalar::parse(v.get<std::string>(), s.rd->d());
    for (auto& [k, v] : sj.items()) sc[std::stoi(k) - 1] = Scalar::parse(v.get<std::string>(), s.rd->d());
    std::optional<std::vector<Scalar>> gamma;
    if (pj.contains("gamma")) {
        std::vector<Scalar> g;
        for (auto& v : pj["gamma"]) g.push_back(Scalar::parse(v.get<std::string>(), s.rd->d()));
        gamma = std::move(g);
    }
    s.params = validate_params(s.ctx.get(), *s.sd, c, sc, gamma);
}

Resolved resolve(const RunConfig& cfg, bool need_params) {
    Resolved r{Session{}, {}, {}, cfg.cutoff};
    const CatalogEntry* entry = nullptr;
    for (const auto& e : catalog())
        if (e.name == cfg.datum) entry = &e;
    if (entry) {
        r.session = make_session(*entry);
        r.modules = entry->modules;
        r.pairs = entry->pairs;
        if (!cfg.params_file.empty()) apply_params_file(r.session, cfg.params_file);
    } else {
        DatumSpec ds = parse_datum_json(load_json_file(cfg.datum));
        Session s;
        s.name = cfg.datum;
        s.rd = std::make_unique<RootDatum>(ds.cartan);
        s.ctx = std::make_unique<AlgebraCtx>(*s.rd);
        s.sd = std::make_unique<SatakeDatum>(validate_admissible(*s.rd, ds.X, ds.tau));
        if (need_params) {
            if (cfg.params_file.empty()) throw std::domain_error("--params required for a JSON datum");
            apply_params_file(s, cfg.params_file);
        }
        r.session = std::move(s);
    }
    if (!cfg.modules.empty()) {
        r.modules = cfg.modules;
        r.pairs.clear();
        for (size_t a = 0; a < r.modules.size(); ++a)
            for (size_t b = a; b < r.modules.size(); ++b) r.pairs.emplace_back(r.modules[a], r.modules[b]);
    }
    if (r.cutoff < 0) r.cutoff = default_cutoff(r.session.rd->rank());
    if (r.session.rd->rank() > cfg.rank_guard)
        throw std::domain_error("rank guard: module-level runs restricted to rank <= " +
                                std::to_string(cfg.rank_guard) + " (override with --rank-guard)");
    return r;
}

nlohmann::json result_json(const CheckResult& c) {
    nlohmann::json j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["ms"] = c.ms;
    j["dim"] = c.dim;
    if (!c.detail.empty()) j["detail"] = c.detail;
    return j;
}

} // namespace

void write_report(const nlohmann::json& j, const std::string& path) {
    if (path.empty()) return;
    std::ofstream os(path);
    os << j.dump(1) << "\n";
}

nlohmann::json sparse_triples(const Mat& m) {
    nlohmann::json out = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            if (m(i, j).is_zero()) continue;
            nlohmann::json t;
            t.push_back(i);
            t.push_back(j);
            t.push_back(m(i, j).str());
            out.push_back(t);
        }
    return out;
}

nlohmann::json cmd_datum(const RunConfig& cfg) {
    nlohmann::json out;
    // validation report with per-condition booleans even on failure
    std::vector<std::vector<int>> cartan;
    std::vector<int> X, tau;
    bool is_cat = false;
    for (const auto& e : catalog())
        if (e.name == cfg.datum) {
            cartan = cartan_of_type(e.type, e.rank);
            X = e.X;
            tau = e.tau;
            is_cat = true;
        }
    if (!is_cat) {
        DatumSpec ds = parse_datum_json(load_json_file(cfg.datum));
        cartan = ds.cartan;
        X = ds.X;
        tau = ds.tau;
    }
    RootDatum rd(cartan);
    out["rank"] = rd.rank();
    out["finite_type"] = rd.finite_type();
    out["det_Aext"] = rd.det_aext();
    out["d"] = rd.d();
    std::vector<long> eps;
    for (int i = 0; i < rd.rank(); ++i) eps.push_back(rd.eps(i));
    out["eps"] = eps;
    if (rd.finite_type()) {
        // weight lattice: fundamental weights in simple-root coordinates
        nlohmann::json fw = nlohmann::json::array();
        for (int i = 0; i < rd.rank(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            PWeight w = rd.fundamental_weight(i);
            for (const auto& x : w) row.push_back(x.get_str());
            fw.push_back(row);
        }
        out["fundamental_weights"] = fw;
    }

    AdmissibilityReport rep;
    SatakeDatum sd = validate_admissible(rd, X, tau, &rep);
    out["admissible"] = rep.admissible;
    nlohmann::json conds;
    conds["tau_involutive"] = true;
    conds["tau_equals_minus_wX_on_X"] = true;
    conds["rhoXvee_integrality"] = true;
    conds["rank_two_conditions"] = true;
    for (const auto& f : rep.failures) {
        if (f.find("condition (1)") != std::string::npos) conds["tau_involutive"] = false;
        if (f.find("condition (2)") != std::string::npos) conds["tau_equals_minus_wX_on_X"] = false;
        if (f.find("condition (3)") != std::string::npos) conds["rhoXvee_integrality"] = false;
        if (f.find("condition (i") != std::string::npos) conds["rank_two_conditions"] = false;
    }
    out["conditions"] = conds;
    out["failures"] = rep.failures;
    if (rep.admissible) {
        nlohmann::json theta;
        for (int i = 0; i < rd.rank(); ++i)
            theta["alpha" + std::to_string(i + 1)] = sd.theta_q(rd.simple_root(i));
        out["theta"] = theta;
        std::vector<int> tau0;
        for (int i : sd.tau0) tau0.push_back(i + 1);
        out["tau0"] = tau0;
        std::vector<int> w0, wX;
        for (int i : sd.w0_word) w0.push_back(i + 1);
        for (int i : sd.wX_word) wX.push_back(i + 1);
        out["w0_word"] = w0;
        out["wX_word"] = wX;
        out["s_function"] = sd.sfun;
    }
    write_report(out, cfg.out);
    return out;
}

nlohmann::json cmd_quasik(const RunConfig& cfg) {
    Resolved r = resolve(cfg, true);
    QuasiKEngine qk(&r.session.params);
    const char* cachedir = std::getenv("QSP_CACHE_DIR");
    std::string cachefile;
    if (cachedir) {
        cachefile = std::string(cachedir) + "/quasik-" + qk.fingerprint() + ".json";
        qk.load_cache(cachefile);
    }
    qk.ensure(r.cutoff);
    if (!cachefile.empty()) qk.save_cache(cachefile);
    nlohmann::json out;
    out["datum"] = r.session.name;
    out["cutoff"] = r.cutoff;
    out["fingerprint"] = qk.fingerprint();
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& [mu, x] : qk.components()) {
        nlohmann::json c;
        c["weight"] = mu;
        c["height"] = qvec_height(mu);
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& [w, s] : x.word_expansion()) {
            nlohmann::json t;
            t.push_back(w);
            t.push_back(s.str());
            terms.push_back(t);
        }
        c["terms"] = terms;
        comps.push_back(c);
    }
    out["components"] = comps;
    nlohmann::json log = nlohmann::json::array();
    for (const auto& st : qk.log()) {
        nlohmann::json l;
        l["weight"] = st.mu;
        l["solvable"] = st.solvable;
        l["nonzero"] = st.nonzero;
        log.push_back(l);
    }
    out["solvability_log"] = log;
    write_report(out, cfg.out);
    return out;
}

nlohmann::json cmd_verify(const RunConfig& cfg, bool& ok) {
    Resolved r = resolve(cfg, true);
    auto want = [&](const std::string& c) {
        if (cfg.checks.empty()) return true;
        for (const auto& w : cfg.checks)
            if (w == c) return true;
        return false;
    };
    KMachine km(&r.session.params);
    std::vector<ModuleData> mods;
    for (const auto& mname : r.modules)
        mods.push_back(build_irrep(r.session.ctx.get(), parse_module_descriptor(*r.session.rd, mname)));
    auto find_mod = [&](const std::string& name) -> const ModuleData& {
        for (size_t i = 0; i < mods.size(); ++i)
            if (r.modules[i] == name) return mods[i];
        throw std::domain_error("pair references unknown module " + name);
    };

    // warm shared caches so parallel checks only read
    int maxgap = 0, maxpairgap = 0;
    for (const auto& m : mods) maxgap = std::max(maxgap, m.weight_gap());
    for (const auto& [a, b] : r.pairs)
        maxpairgap = std::max(maxpairgap, find_mod(a).weight_gap() + find_mod(b).weight_gap());
    km.quasik().ensure(std::max(r.cutoff, std::max(maxgap, maxpairgap)));
    km.R(maxgap);
    km.RX(maxgap);
    km.RRXbar(maxgap);

    std::vector<std::function<CheckResult()>> tasks;
    for (const auto& m : mods) {
        const ModuleData* pm = &m;
        if (want("quasik")) tasks.push_back([&km, pm] { return km.check_quasiK_intertwining(*pm); });
        if (want("intertwining")) tasks.push_back([&km, pm] { return km.check_intertwining(*pm); });
        if (want("intertwiningKprime"))
            tasks.push_back([&km, pm] { return km.check_intertwining_Kprime(*pm); });
        if (want("adxi")) tasks.push_back([&km, pm, &cfg] { return km.check_adxi(*pm, cfg.seed); });
    }
    for (const auto& [a, b] : r.pairs) {
        const ModuleData *pa = &find_mod(a), *pb = &find_mod(b);
        if (want("deltaXi")) tasks.push_back([&km, pa, pb] { return km.check_deltaXi(*pa, *pb); });
        if (want("deltaX")) tasks.push_back([&km, pa, pb] { return km.check_deltaX(*pa, *pb); });
        if (want("KX1X")) tasks.push_back([&km, pa, pb] { return km.check_KX1X(*pa, *pb); });
        if (want("deltaK")) tasks.push_back([&km, pa, pb] { return km.check_deltaK(*pa, *pb); });
        if (want("fusion")) tasks.push_back([&km, pa, pb] { return km.check_fusion(*pa, *pb); });
        if (want("reflection")) tasks.push_back([&km, pa, pb] { return km.check_reflection(*pa, *pb); });
    }

    std::vector<CheckResult> results(tasks.size());
    if (cfg.jobs <= 1) {
        for (size_t i = 0; i < tasks.size(); ++i) results[i] = tasks[i]();
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                results[i] = tasks[i]();
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < cfg.jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    nlohmann::json out;
    out["datum"] = r.session.name;
    out["cutoff"] = r.cutoff;
    nlohmann::json checks = nlohmann::json::array();
    ok = true;
    for (const auto& c : results) {
        ok = ok && c.pass;
        checks.push_back(result_json(c));
    }
    out["checks"] = checks;
    out["pass"] = ok;
    // exact K entries for small modules, as sparse (row, col, scalar) triples
    nlohmann::json kdump = nlohmann::json::object();
    for (const auto& m : mods) {
        if (m.dim() > 4) continue;
        KParts kp = km.build_KParts(m);
        kdump[m.name] = sparse_triples(kp.K);
    }
    out["K_matrices"] = kdump;
    write_report(out, cfg.out);
    return out;
}

} // namespace qsp
