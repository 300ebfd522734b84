#pragma once

#include "ksv/fixture.hpp"
#include "ksv/ks_hodge.hpp"
#include "ksv/local_lemmas.hpp"
#include "ksv/quatalg.hpp"
#include "ksv/random.hpp"
#include "ksv/report.hpp"
#include "ksv/siegel.hpp"
#include "ksv/twisted.hpp"
#include "ksv/zlattice.hpp"

#include <atomic>
#include <chrono>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace ksv {

inline constexpr double kIdentityTolerance = 1e-10;
inline constexpr double kLemmaAppTolerance = 1e-12;
inline constexpr double kFiniteDifferenceTolerance = 1e-8;

struct SuiteConfig {
    /// Any of siegel, twisted, local, lemma-app, ks-pairing, cech, lattice.
    std::vector<std::string> modules;
    std::vector<std::pair<int, int>> siegel_shapes{{1, 1}, {2, 1}, {3, 1}, {1, 2}};  ///< (r, g)
    int samples = 100;
    std::uint64_t seed = 0;
    int digits = kDefaultDigits;
    std::vector<std::string> fixtures;
    std::vector<std::int64_t> primes{5, 13};
    std::vector<int> levels{2, 3};
    bool good = true;
    bool bad = true;
    std::vector<int> ks_ranks{1, 2, 3};
    int ks_points = 10;
    int lemma_samples = 50;
    int grid = 3;
    Rational delta{1, 5};
    int random_lattices = 20;
    int jobs = 1;
    bool timing = false;
};

inline const std::vector<std::string>& all_modules() {
    static const std::vector<std::string> m{"cech", "ks-pairing", "lattice", "lemma-app", "local", "siegel", "twisted"};
    return m;
}

namespace detail {

struct Task {
    std::string id;
    std::function<CheckRecord()> run;
};

/// Pass iff every residual is below tol (NaN fails) and extra holds.
inline CheckRecord sampled_check(std::string id, nlohmann::json params, double tol, std::vector<double> residuals,
                                 bool extra = true, std::string witness = {}) {
    CheckRecord c;
    c.id = std::move(id);
    c.parameters = std::move(params);
    c.tolerance = tol;
    c.pass = extra;
    double worst = 0;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        double v = residuals[i];
        if (!(v < tol)) {
            c.pass = false;
            if (witness.empty()) witness = "sample " + std::to_string(i) + ": residual " + format_residual(v);
        }
        if (!(v <= worst)) worst = v;
    }
    c.residual = worst;
    c.samples = std::move(residuals);
    c.witness = std::move(witness);
    return c;
}

inline CheckRecord exact_check(std::string id, nlohmann::json params, bool pass, std::string witness = {}) {
    CheckRecord c;
    c.id = std::move(id);
    c.parameters = std::move(params);
    c.exact = true;
    c.pass = pass;
    if (!pass) c.witness = std::move(witness);
    return c;
}

inline std::string shape_tag(int r, int g) { return "r" + std::to_string(r) + ".g" + std::to_string(g); }

inline void siegel_tasks(const SuiteConfig& cfg, std::vector<Task>& tasks) {
    for (auto [r, g] : cfg.siegel_shapes) {
        const std::string tag = shape_tag(r, g);
        nlohmann::json params{{"r", r}, {"g", g}, {"samples", cfg.samples}};
        // main and covolume checks share the same points
        auto points = [cfg, r = r, g = g, tag] {
            Rng rng(cfg.seed, "siegel.points." + tag);
            std::vector<SiegelPoint> pts;
            for (int t = 0; t < cfg.samples; ++t) pts.push_back(sample_siegel_point(rng, r, g));
            return pts;
        };
        tasks.push_back({"siegel.main." + tag, [=] {
                             std::vector<double> res;
                             for (const auto& Z : points()) res.push_back(verify_siegel_main(Z).residual);
                             return sampled_check("siegel.main." + tag, params, kIdentityTolerance, res);
                         }});
        tasks.push_back({"siegel.covolume." + tag, [=] {
                             std::vector<double> res;
                             for (const auto& Z : points()) res.push_back(faltings_norm_sq_detail(Z).relative_defect);
                             return sampled_check("siegel.covolume." + tag, params, kIdentityTolerance, res);
                         }});
        tasks.push_back({"siegel.axioms." + tag, [=] {
                             IntegerMatrix G = siegel_gram(r);
                             bool exact = G.transpose() == Integer(-1) * G && determinant(G) == 1;
                             Rng rng(cfg.seed, "siegel.axioms." + tag);
                             std::vector<double> res;
                             bool positive = true;
                             std::string witness = exact ? "" : "Siegel Gram matrix not alternating unimodular";
                             for (const auto& Z : points()) {
                                 auto rep = riemann_axioms(Z, rng, 20);
                                 res.push_back(rep.compatibility_defect);
                                 if (!(rep.ok() && rep.min_margin > 0)) {
                                     positive = false;
                                     if (witness.empty()) witness = rep.witness;
                                 }
                             }
                             auto p = params;
                             p["orientation"] = -1;
                             return sampled_check("siegel.axioms." + tag, p, kIdentityTolerance, res, exact && positive, witness);
                         }});
    }
}

inline void twisted_tasks(const SuiteConfig& cfg, const std::vector<Fixture>& fixtures, std::vector<Task>& tasks) {
    for (const auto& fx : fixtures) {
        const std::string n = fx.name;
        auto eng = std::make_shared<const TwistedEngine>(fx.order, fx.mu, fx.d_B, cfg.digits);
        nlohmann::json params{{"fixture", n}, {"samples", cfg.samples}, {"degree", eng->degree()},
                              {"mu_flipped", eng->flipped()}, {"norm_d_B", to_string(eng->norm_dB())}};
        auto points = [cfg, n, eng] {
            Rng rng(cfg.seed, "twisted.points." + n);
            std::vector<TwistedPoint> pts;
            for (int t = 0; t < cfg.samples; ++t) pts.push_back(sample_twisted_point(rng, eng->degree()));
            return pts;
        };
        tasks.push_back({"twisted.main." + n, [=] {
                             std::vector<double> res;
                             for (const auto& tau : points()) res.push_back(eng->verify_main(tau).literal_residual);
                             return sampled_check("twisted.main." + n, params, kIdentityTolerance, res);
                         }});
        tasks.push_back({"twisted.main_normalized." + n, [=] {
                             std::vector<double> res;
                             for (const auto& tau : points()) res.push_back(eng->verify_main(tau).normalized_residual);
                             auto p = params;
                             p["constant"] = "d_F^2 Nm(d_B)";
                             return sampled_check("twisted.main_normalized." + n, p, kIdentityTolerance, res);
                         }});
        tasks.push_back({"twisted.volume." + n, [=] {
                             std::vector<double> res;
                             for (const auto& tau : points()) res.push_back(eng->verify_volume(tau).literal_residual);
                             return sampled_check("twisted.volume." + n, params, kIdentityTolerance, res);
                         }});
        tasks.push_back({"twisted.axioms." + n, [=] {
                             bool exact = eng->alternating() && eng->integral();
                             std::string witness = exact ? "" : "E not alternating and integral on the order basis";
                             Rng rng(cfg.seed, "twisted.axioms." + n);
                             std::vector<double> res;
                             bool positive = true;
                             for (const auto& tau : points()) {
                                 auto rep = eng->riemann_axioms(tau, rng, 20);
                                 res.push_back(rep.compatibility_defect);
                                 if (!(rep.ok() && rep.orientation == 1)) {
                                     positive = false;
                                     if (witness.empty()) witness = rep.witness.empty() ? "orientation changed" : rep.witness;
                                 }
                             }
                             return sampled_check("twisted.axioms." + n, params, kIdentityTolerance, res, exact && positive, witness);
                         }});
        tasks.push_back({"twisted.ks_vectors." + n, [=] {
                             std::vector<double> res;
                             for (const auto& tau : points()) {
                                 auto k = verify_twisted_ks(*eng, tau);
                                 res.push_back(std::max(k.max_defect, k.determinant_defect));
                             }
                             res.push_back(eng->ks_constant_defect());
                             return sampled_check("twisted.ks_vectors." + n, params, kIdentityTolerance, res);
                         }});
        tasks.push_back({"quatalg.dual_index." + n, [=] {
                             auto idx = dual_index(fx.order);
                             auto disc = reduced_discriminant(fx.order);
                             Integer d2 = disc.field_disc * disc.field_disc;
                             Integer expected = d2 * d2 * disc.norm * disc.norm;
                             nlohmann::json p{{"fixture", n}, {"index", to_string(Rational(idx.index))},
                                              {"expected", to_string(Rational(expected))}};
                             return exact_check("quatalg.dual_index." + n, p, idx.index == expected,
                                                "index " + to_string(Rational(idx.index)) + " != " + to_string(Rational(expected)));
                         }});
        tasks.push_back({"quatalg.unimodular." + n, [=] {
                             auto sl = scaled_unimodular_lattice(fx.order, fx.a_pure, fx.lambda);
                             bool self_dual = dual(sl.lattice, sl.pairing) == sl.lattice;
                             bool literal = dual(sl.lattice, sl.raw_pairing) == sl.scaled;
                             nlohmann::json p{{"fixture", n}, {"lambda", sl.lambda.str()}};
                             return exact_check("quatalg.unimodular." + n, p, self_dual && literal,
                                                self_dual ? "dual(O, psi) != l^-1 D^-1 O" : "scaled lattice is not self-dual");
                         }});
    }
}

inline void local_tasks(const SuiteConfig& cfg, std::vector<Task>& tasks) {
    for (auto p : cfg.primes)
        for (int k : cfg.levels) {
            const std::string tag = "p" + std::to_string(p) + ".k" + std::to_string(k);
            nlohmann::json params{{"p", p}, {"k", k}, {"depth", "Z/p^" + std::to_string(k)}};
            if (cfg.bad) {
                tasks.push_back({"local.classify." + tag, [=] {
                                     auto c = classify_modules(p, k);
                                     std::string w;
                                     for (const auto& f : c.failures) w += (w.empty() ? "" : "; ") + f;
                                     auto q = params;
                                     q["rank_T"] = c.rank_T;
                                     q["rank_T_prime"] = c.rank_Tprime;
                                     return exact_check("local.classify." + tag, q, c.ok(), w.empty() ? "witness mismatch" : w);
                                 }});
                tasks.push_back({"local.bad." + tag, [=] {
                                     auto b = verify_bad_prime(p, k);
                                     std::string certs;
                                     for (const auto& s : b.certificates) certs += (certs.empty() ? "" : " ") + s;
                                     auto q = params;
                                     q["image_generators"] = certs;
                                     q["det_valuation"] = b.det_valuation;
                                     return exact_check("local.bad." + tag, q, b.ok(), "image " + certs);
                                 }});
            }
            if (cfg.good)
                tasks.push_back({"local.good." + tag, [=] {
                                     auto g = verify_good_prime(p, k);
                                     auto q = params;
                                     q["index"] = g.index;
                                     return exact_check("local.good." + tag, q, g.ok(), "index " + std::to_string(g.index));
                                 }});
        }
}

inline void lemma_app_tasks(const SuiteConfig& cfg, const std::vector<Fixture>& fixtures, std::vector<Task>& tasks) {
    auto record = [](const std::string& id, nlohmann::json params, const LemmaAppResult& res) {
        std::string w = res.hermitian_defect < kLemmaAppTolerance && res.min_h_margin > 0 ? "" : "H not Hermitian positive";
        params["hermitian_defect"] = format_residual(res.hermitian_defect);
        return sampled_check(id, params, kLemmaAppTolerance, res.per_sample,
                             res.hermitian_defect < kLemmaAppTolerance && res.min_h_margin > 0, w);
    };
    for (int r : cfg.ks_ranks) {
        const std::string id = "lemma_app.siegel.r" + std::to_string(r);
        tasks.push_back({id, [=] {
                             Rng rng(cfg.seed, id);
                             auto T = siegel_torus(sample_siegel_point(rng, r, 1, 0.5), 0);
                             return record(id, {{"r", r}, {"samples", cfg.lemma_samples}, {"orientation", -1}},
                                           verify_lemma_app(T, -1, rng, cfg.lemma_samples));
                         }});
    }
    for (const auto& fx : fixtures) {
        const std::string id = "lemma_app.twisted." + fx.name;
        tasks.push_back({id, [=] {
                             TwistedEngine eng(fx.order, fx.mu, fx.d_B, cfg.digits);
                             Rng rng(cfg.seed, id);
                             auto T = eng.torus(sample_twisted_point(rng, eng.degree()));
                             return record(id, {{"fixture", fx.name}, {"samples", cfg.lemma_samples}, {"orientation", 1}},
                                           verify_lemma_app(T, 1, rng, cfg.lemma_samples));
                         }});
    }
}

inline void ks_pairing_tasks(const SuiteConfig& cfg, std::vector<Task>& tasks) {
    for (int r : cfg.ks_ranks) {
        const std::string id = "ks_pairing.r" + std::to_string(r);
        tasks.push_back({id, [=] {
                             Rng rng(cfg.seed, id);
                             bool exact = true;
                             std::string w;
                             std::vector<double> fd;
                             for (int t = 0; t < cfg.ks_points; ++t) {
                                 auto Z = sample_rational_siegel(rng, r);
                                 for (int i = 0; i < r; ++i)
                                     for (int k = i; k < r; ++k) {
                                         auto res = verify_ks_pairing(Z, i, k);
                                         if (!res.ok() && exact) {
                                             exact = false;
                                             w = "point " + std::to_string(t) + ": " + res.offending;
                                         }
                                         fd.push_back(ks_finite_difference_defect(Z, i, k));
                                     }
                             }
                             return sampled_check(id, {{"r", r}, {"points", cfg.ks_points}, {"step", "1e-6"}},
                                                  kFiniteDifferenceTolerance, fd, exact, w);
                         }});
    }
}

inline void cech_tasks(const SuiteConfig& cfg, std::vector<Task>& tasks) {
    const std::string id = "cech.grid" + std::to_string(cfg.grid);
    // validate the cover eagerly so an inadmissible grid is a configuration error
    auto cover = std::make_shared<const CechCoverToy>(cfg.grid, cfg.delta);
    tasks.push_back({id, [=] {
                         Rng rng(cfg.seed, id);
                         auto q = [&] { return Rational(static_cast<long>(rng.next() % 41) - 20, static_cast<long>(rng.next() % 7) + 1); };
                         std::size_t triples = 0, violations = 0;
                         std::string w;
                         bool additive = true;
                         for (int t = 0; t < 10; ++t) {
                             auto a = t == 0 ? LatticeHom{} : riemann_hom(q(), q());
                             auto res = cech_cocycle_check(*cover, a);
                             triples = res.triples;
                             violations += res.violations;
                             if (w.empty() && !res.ok()) w = "triple " + res.witness;
                             additive = additive && cech_additive(*cover, a, riemann_hom(q(), q()));
                         }
                         nlohmann::json p{{"grid", cfg.grid}, {"delta", to_string(cfg.delta)}, {"triple_overlaps", triples}};
                         return exact_check(id, p, violations == 0 && additive && triples > 0, w.empty() ? "not additive" : w);
                     }});
}

inline RationalMatrix random_rational_basis(Rng& rng, std::size_t n) {
    while (true) {
        RationalMatrix B(n, n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                B(a, b) = Rational(static_cast<long>(rng.next() % 19) - 9, static_cast<long>(rng.next() % 5) + 1);
        if (determinant(B) != 0) return B;
    }
}

inline void lattice_tasks(const SuiteConfig& cfg, std::vector<Task>& tasks) {
    tasks.push_back({"zlattice.dual_volume", [=] {
                         Rng rng(cfg.seed, "zlattice.dual_volume");
                         bool ok = true;
                         std::string w;
                         for (int t = 0; t < cfg.random_lattices; ++t) {
                             std::size_t n = 2 + t % 4;
                             IntegerLattice L(random_rational_basis(rng, n));
                             Rational prod = covolume(L) * covolume(dual(L, PairingForm::dot(n)));
                             if (prod != 1 && ok) {
                                 ok = false;
                                 w = "lattice " + std::to_string(t) + ": product " + to_string(prod);
                             }
                         }
                         return exact_check("zlattice.dual_volume", {{"lattices", cfg.random_lattices}}, ok, w);
                     }});
}

inline void run_tasks(std::vector<Task>& tasks, VerificationReport& report, int jobs) {
    std::vector<CheckRecord> out(tasks.size());
    auto run_one = [&](std::size_t i) {
        auto t0 = std::chrono::steady_clock::now();
        try {
            out[i] = tasks[i].run();
        } catch (const std::exception& e) {
            out[i] = exact_check(tasks[i].id, nlohmann::json::object(), false, std::string("exception: ") + e.what());
        }
        out[i].runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    if (jobs <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next++) < tasks.size();) run_one(i);
            });
        for (auto& t : pool) t.join();
    }
    report.checks = std::move(out);
}

}  // namespace detail

/// Loads fixtures (fixture_error aborts before any check runs), executes the selected checks and
/// returns the report sorted by check id.
inline VerificationReport run_suite(const SuiteConfig& cfg) {
    if (cfg.digits < 1 || cfg.digits > kMaxDigits)
        throw precondition_error("digits must lie in [1, " + std::to_string(kMaxDigits) + "]");
    if (cfg.samples < 0) throw precondition_error("samples must be non-negative");
    for (const auto& m : cfg.modules)
        if (std::find(all_modules().begin(), all_modules().end(), m) == all_modules().end())
            throw precondition_error("unknown module " + m);
    for (auto [r, g] : cfg.siegel_shapes)
        if (r < 1 || g < 1) throw precondition_error("r and g must be positive");
    for (int r : cfg.ks_ranks)
        if (r < 1) throw precondition_error("r must be positive");

    auto wants = [&](const std::string& m) { return std::find(cfg.modules.begin(), cfg.modules.end(), m) != cfg.modules.end(); };
    std::vector<Fixture> fixtures;
    if (wants("twisted") || wants("lemma-app"))
        for (const auto& path : cfg.fixtures) {
            fixtures.push_back(load_fixture(path));
            for (std::size_t i = 0; i + 1 < fixtures.size(); ++i)
                if (fixtures[i].name == fixtures.back().name)
                    throw fixture_error(path + ": duplicate fixture name " + fixtures.back().name);
        }

    std::vector<detail::Task> tasks;
    if (wants("siegel")) detail::siegel_tasks(cfg, tasks);
    if (wants("twisted")) detail::twisted_tasks(cfg, fixtures, tasks);
    if (wants("local")) detail::local_tasks(cfg, tasks);
    if (wants("lemma-app")) detail::lemma_app_tasks(cfg, fixtures, tasks);
    if (wants("ks-pairing")) detail::ks_pairing_tasks(cfg, tasks);
    if (wants("cech")) detail::cech_tasks(cfg, tasks);
    if (wants("lattice")) detail::lattice_tasks(cfg, tasks);

    VerificationReport report;
    report.seed = cfg.seed;
    report.digits = cfg.digits;
    report.timing = cfg.timing;
    detail::run_tasks(tasks, report, cfg.jobs);
    report.sort();
    for (std::size_t i = 1; i < report.checks.size(); ++i)
        if (report.checks[i].id == report.checks[i - 1].id) throw std::logic_error("duplicate check id " + report.checks[i].id);
    return report;
}

}  // namespace ksv
