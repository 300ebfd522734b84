// Acceptance criteria 1-10. One PASS/FAIL line per criterion; indented lines carry the details.
// Usage: acceptance [--criterion N]

#include "ksv/fixture.hpp"
#include "ksv/ks_hodge.hpp"
#include "ksv/local_lemmas.hpp"
#include "ksv/siegel.hpp"
#include "ksv/suite.hpp"
#include "ksv/twisted.hpp"
#include "ksv/zlattice.hpp"

#include "hilbert_oracle.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

using namespace ksv;

namespace {

constexpr std::uint64_t kSeed = 20240601;
constexpr double kTolIdentity = 1e-10;
constexpr double kTolLemmaApp = 1e-12;
constexpr double kTolFiniteDiff = 1e-8;
constexpr double kSiegelBudgetSeconds = 10.0;
constexpr double kLocalBudgetSeconds = 1.0;
constexpr int kSiegelSamples = 100;
constexpr int kTwistedSamples = 100;
constexpr int kLemmaSamples = 50;
constexpr int kRandomLattices = 20;
constexpr int kKsPoints = 10;

const std::vector<std::pair<int, int>> kSiegelShapes{{1, 1}, {2, 1}, {3, 1}, {1, 2}};
const std::vector<std::string> kFixtures{"split_q", "division_q6", "real_quadratic_split"};

std::string path(const std::string& n) { return std::string(KSV_FIXTURE_DIR) + "/" + n + ".json"; }

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;
    void note(bool ok, const std::string& what) {
        pass = pass && ok;
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void info(const std::string& what) { details.push_back("info " + what); }
};

std::string sci(double v) { return format_residual(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<SiegelPoint> siegel_points(int r, int g) {
    Rng rng(kSeed, "acceptance.siegel.r" + std::to_string(r) + ".g" + std::to_string(g));
    std::vector<SiegelPoint> pts;
    for (int t = 0; t < kSiegelSamples; ++t) pts.push_back(sample_siegel_point(rng, r, g));
    return pts;
}

std::vector<TwistedPoint> twisted_points(const std::string& name, std::size_t g) {
    Rng rng(kSeed, "acceptance.twisted." + name);
    std::vector<TwistedPoint> pts;
    for (int t = 0; t < kTwistedSamples; ++t) pts.push_back(sample_twisted_point(rng, g));
    return pts;
}

Outcome criterion1() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    for (auto [r, g] : kSiegelShapes) {
        double worst = 0;
        for (const auto& Z : siegel_points(r, g)) worst = std::max(worst, verify_siegel_main(Z).residual);
        o.note(worst < kTolIdentity, "(r,g)=(" + std::to_string(r) + "," + std::to_string(g) + ") " +
                                         std::to_string(kSiegelSamples) + " points, max residual " + sci(worst));
    }
    double s = seconds_since(t0);
    o.note(s < kSiegelBudgetSeconds, "runtime " + std::to_string(s) + " s < " + std::to_string(kSiegelBudgetSeconds) + " s");
    return o;
}

Outcome criterion2() {
    Outcome o;
    for (auto [r, g] : kSiegelShapes) {
        double worst = 0;
        for (const auto& Z : siegel_points(r, g)) worst = std::max(worst, faltings_norm_sq_detail(Z).relative_defect);
        o.note(worst < kTolIdentity, "(r,g)=(" + std::to_string(r) + "," + std::to_string(g) +
                                         ") det Y vs embedded covolume, max defect " + sci(worst));
    }
    return o;
}

Outcome criterion3() {
    Outcome o;
    for (const auto& n : kFixtures) {
        auto fx = load_fixture(path(n));
        TwistedEngine eng(fx.order, fx.mu, fx.d_B);
        double main_lit = 0, vol_lit = 0, main_norm = 0, vol_norm = 0;
        for (const auto& tau : twisted_points(n, eng.degree())) {
            auto m = eng.verify_main(tau);
            auto v = eng.verify_volume(tau);
            main_lit = std::max(main_lit, m.literal_residual);
            vol_lit = std::max(vol_lit, v.literal_residual);
            main_norm = std::max(main_norm, m.normalized_residual);
            vol_norm = std::max(vol_norm, v.normalized_residual);
        }
        o.note(main_lit < kTolIdentity, n + ": main identity with Nm(d_B), max residual " + sci(main_lit));
        o.note(vol_lit < kTolIdentity, n + ": covolume = Nm(d_B) prod Im^2, max residual " + sci(vol_lit));
        if (eng.degree() > 1 || main_norm != main_lit)
            o.info(n + ": with d_F^2 Nm(d_B) in place of Nm(d_B): main " + sci(main_norm) + ", covolume " + sci(vol_norm));
    }
    return o;
}

Outcome criterion4() {
    Outcome o;
    auto fx = load_fixture(path("division_q6"));
    auto idx = dual_index(fx.order);
    Integer dB = testkit::discriminant_oracle(-1, 3);
    std::string divs;
    for (const auto& d : idx.elementary_divisors) divs += (divs.empty() ? "" : ",") + to_string(Rational(d));
    o.note(idx.index == dB * dB, "division_q6: index(dual(O), O) = " + to_string(Rational(idx.index)) + " (SNF " + divs +
                                     "), oracle d_B^2 = " + to_string(Rational(dB * dB)));
    Rng rng(kSeed, "acceptance.lattices");
    int good = 0;
    for (int t = 0; t < kRandomLattices; ++t) {
        std::size_t n = 2 + t % 4;
        IntegerLattice L(detail::random_rational_basis(rng, n));
        good += covolume(L) * covolume(dual(L, PairingForm::dot(n))) == 1;
    }
    o.note(good == kRandomLattices, "vol * vol(dual) = 1 exactly on " + std::to_string(good) + "/" +
                                        std::to_string(kRandomLattices) + " random rational lattices");
    return o;
}

Outcome criterion5() {
    Outcome o;
    for (const auto& n : kFixtures) {
        auto fx = load_fixture(path(n));
        auto sl = scaled_unimodular_lattice(fx.order, fx.a_pure, fx.lambda);
        bool self_dual = dual(sl.lattice, sl.pairing) == sl.lattice;
        o.note(self_dual, n + ": dual(Lambda, psi) = Lambda (HNF equality), lambda = " + sl.lambda.str());
    }
    return o;
}

Outcome criterion6() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    for (std::int64_t p : {5, 13})
        for (int k : {2, 3}) {
            auto b = verify_bad_prime(p, k);
            auto g = verify_good_prime(p, k);
            std::string certs;
            for (const auto& c : b.certificates) certs += (certs.empty() ? "" : " ") + c;
            std::string tag = "p=" + std::to_string(p) + " k=" + std::to_string(k);
            o.note(b.ok(), tag + ": bad prime image {" + certs + "} = Wx + pWy, det image p^" +
                               std::to_string(b.det_valuation) + " det(T)");
            o.note(g.ok(), tag + ": good prime index " + std::to_string(g.index));
        }
    double s = seconds_since(t0);
    o.note(s < kLocalBudgetSeconds, "runtime " + std::to_string(s) + " s < " + std::to_string(kLocalBudgetSeconds) + " s");
    return o;
}

Outcome criterion7() {
    Outcome o;
    Rng rng(kSeed, "acceptance.ks");
    bool exact = true;
    double fd = 0;
    std::size_t directions = 0;
    std::string first;
    for (int t = 0; t < kKsPoints; ++t) {
        std::size_t r = 1 + t % 3;
        auto Z = sample_rational_siegel(rng, r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t k = i; k < r; ++k) {
                auto res = verify_ks_pairing(Z, i, k);
                if (!res.ok() && first.empty()) first = res.offending;
                exact = exact && res.ok();
                fd = std::max(fd, ks_finite_difference_defect(Z, i, k));
                ++directions;
            }
    }
    o.note(exact, "B(j,k) = B(k,j) = -dZ_jk exactly on " + std::to_string(kKsPoints) + " rational points, " +
                      std::to_string(directions) + " directions" + (first.empty() ? "" : " (" + first + ")"));
    o.note(fd < kTolFiniteDiff, "finite-difference oracle max defect " + sci(fd));
    return o;
}

Outcome criterion8() {
    Outcome o;
    for (int r = 1; r <= 3; ++r) {
        Rng rng(kSeed, "acceptance.lemma.siegel.r" + std::to_string(r));
        auto T = siegel_torus(sample_siegel_point(rng, r, 1, 0.5), 0);
        auto res = verify_lemma_app(T, -1, rng, kLemmaSamples);
        o.note(res.max_defect < kTolLemmaApp && res.min_h_margin > 0,
               "Siegel r=" + std::to_string(r) + ": antilinear part defect " + sci(res.max_defect));
    }
    for (const auto& n : kFixtures) {
        auto fx = load_fixture(path(n));
        TwistedEngine eng(fx.order, fx.mu, fx.d_B);
        Rng rng(kSeed, "acceptance.lemma.twisted." + n);
        auto res = verify_lemma_app(eng.torus(sample_twisted_point(rng, eng.degree())), 1, rng, kLemmaSamples);
        o.note(res.max_defect < kTolLemmaApp && res.min_h_margin > 0,
               "twisted " + n + ": antilinear part defect " + sci(res.max_defect));
    }
    CechCoverToy cover(3, Rational(1, 5));
    Rng rng(kSeed, "acceptance.cech");
    auto q = [&] { return Rational(static_cast<long>(rng.next() % 41) - 20, static_cast<long>(rng.next() % 7) + 1); };
    std::size_t violations = 0, triples = 0;
    for (int t = 0; t < 10; ++t) {
        auto res = cech_cocycle_check(cover, riemann_hom(q(), q()));
        violations += res.violations;
        triples = res.triples;
    }
    o.note(violations == 0 && triples > 0, "Cech 3x3 cover: cocycle identity exact on all " + std::to_string(triples) +
                                               " triple overlaps");
    return o;
}

Outcome criterion9() {
    Outcome o;
    for (auto [r, g] : kSiegelShapes) {
        IntegerMatrix G = siegel_gram(r);
        bool exact = G.transpose() == Integer(-1) * G && determinant(G) == 1;
        Rng rng(kSeed, "acceptance.axioms.siegel");
        double margin = std::numeric_limits<double>::infinity(), compat = 0;
        bool ok = exact;
        for (const auto& Z : siegel_points(r, g)) {
            auto rep = riemann_axioms(Z, rng, 10);
            ok = ok && rep.ok();
            margin = std::min(margin, rep.min_margin);
            compat = std::max(compat, rep.compatibility_defect);
        }
        o.note(ok, "Siegel (r,g)=(" + std::to_string(r) + "," + std::to_string(g) + "): alternating integral unimodular, min margin " +
                       sci(margin) + " (orientation -1), compatibility " + sci(compat));
    }
    for (const auto& n : kFixtures) {
        auto fx = load_fixture(path(n));
        TwistedEngine eng(fx.order, fx.mu, fx.d_B);
        Rng rng(kSeed, "acceptance.axioms.twisted." + n);
        bool ok = eng.alternating() && eng.integral();
        double margin = std::numeric_limits<double>::infinity(), compat = 0;
        for (const auto& tau : twisted_points(n, eng.degree())) {
            auto rep = eng.riemann_axioms(tau, rng, 10);
            ok = ok && rep.ok() && rep.orientation == 1;
            margin = std::min(margin, rep.min_margin);
            compat = std::max(compat, rep.compatibility_defect);
        }
        o.note(ok, "twisted " + n + ": alternating integral, min margin " + sci(margin) + ", compatibility " + sci(compat) +
                       (eng.flipped() ? ", mu sign flipped" : ""));
    }
    return o;
}

Outcome criterion10() {
    Outcome o;
    for (const auto& m : all_modules()) {
        SuiteConfig cfg;
        cfg.modules = {m};
        cfg.seed = kSeed;
        cfg.samples = 20;
        for (const auto& n : kFixtures) cfg.fixtures.push_back(path(n));
        auto a = to_json_string(run_suite(cfg));
        auto b = to_json_string(run_suite(cfg));
        cfg.jobs = 4;
        auto c = to_json_string(run_suite(cfg));
        o.note(a == b && a == c, m + ": reruns (serial, serial, 4 threads) byte-identical, " + std::to_string(a.size()) + " bytes");
    }
    return o;
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
        else {
            std::cerr << "usage: acceptance [--criterion N]\n";
            return 2;
        }
    }
    const std::vector<Criterion> all{
        {1, "Siegel metric identity", criterion1},
        {2, "covolume cross-check", criterion2},
        {3, "twisted metric identity", criterion3},
        {4, "dual-lattice index", criterion4},
        {5, "unimodularity of scaled lattices", criterion5},
        {6, "bad-prime and good-prime local lemmas", criterion6},
        {7, "Kodaira-Spencer pairing", criterion7},
        {8, "antilinear part and Cech cocycles", criterion8},
        {9, "Riemann-form axioms", criterion9},
        {10, "determinism", criterion10},
    };
    bool all_pass = true;
    bool ran = false;
    for (const auto& c : all) {
        if (only && c.id != only) continue;
        ran = true;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.note(false, std::string("exception: ") + e.what());
        }
        std::printf("CRITERION %d %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title);
        for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
        all_pass = all_pass && o.pass;
    }
    if (!ran) {
        std::cerr << "no criterion " << only << "\n";
        return 2;
    }
    return all_pass ? 0 : 1;
}
