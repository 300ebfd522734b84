#include "ksv/suite.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#ifndef KSV_DEFAULT_FIXTURE_DIR
#define KSV_DEFAULT_FIXTURE_DIR "fixtures"
#endif

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitInvalid = 2;

int default_digits() {
    if (const char* env = std::getenv("KSV_DIGITS")) {
        try {
            return std::stoi(env);
        } catch (const std::exception&) {
            throw ksv::precondition_error(std::string("KSV_DIGITS is not an integer: ") + env);
        }
    }
    return ksv::kDefaultDigits;
}

std::vector<std::string> default_fixtures() {
    const std::string dir = KSV_DEFAULT_FIXTURE_DIR;
    return {dir + "/split_q.json", dir + "/division_q6.json", dir + "/real_quadratic_split.json"};
}

void emit(const std::string& content, const std::string& out) {
    if (out.empty() || out == "-") std::cout << content;
    else ksv::write_file(out, content);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and numeric checks for metric identities on Siegel and twisted abelian varieties"};
    app.require_subcommand(1);

    ksv::SuiteConfig cfg;
    std::string module, out, format = "json", in_path;
    std::optional<int> r, g, digits, samples;
    std::vector<std::int64_t> primes;
    std::vector<int> levels;
    bool good = false, bad = false;
    std::string delta;

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", module, "siegel, twisted, local, lemma-app, ks-pairing, cech, lattice or all")
        ->required()
        ->check(CLI::IsMember({"siegel", "twisted", "local", "lemma-app", "ks-pairing", "cech", "lattice", "all"}));
    verify->add_option("--r", r, "Siegel rank r (siegel, ks-pairing, lemma-app)")->check(CLI::Range(1, 8));
    verify->add_option("--g", g, "number of places g (siegel)")->check(CLI::Range(1, 8));
    verify->add_option("--samples", samples, "random samples per check")->check(CLI::NonNegativeNumber);
    verify->add_option("--seed", cfg.seed, "master seed");
    verify->add_option("--digits", digits, "decimal digits for exact-to-real conversion (default $KSV_DIGITS or 40)");
    verify->add_option("--fixture", cfg.fixtures, "fixture JSON (repeatable; default: bundled fixtures)");
    verify->add_option("--p", primes, "odd primes for local checks (repeatable)");
    verify->add_option("--k", levels, "truncation levels for local checks (repeatable)");
    verify->add_flag("--good", good, "good-prime lemma only");
    verify->add_flag("--bad", bad, "bad-prime lemma only");
    verify->add_option("--grid", cfg.grid, "charts per axis of the Cech toy cover")->check(CLI::PositiveNumber);
    verify->add_option("--delta", delta, "chart overlap as a rational, default 1/5");
    verify->add_option("--out", out, "report path (default stdout)");
    verify->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
    verify->add_flag("--timing", cfg.timing, "include per-check runtime (breaks byte-identical reruns)");
    verify->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber);

    auto* report = app.add_subcommand("report", "render a stored JSON report");
    report->add_option("--in", in_path, "report JSON")->required();
    report->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
    report->add_option("--out", out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitPass : kExitInvalid;
    }

    try {
        if (*report) {
            std::ifstream f(in_path);
            if (!f) throw ksv::precondition_error("cannot open " + in_path);
            nlohmann::json j;
            try {
                f >> j;
            } catch (const nlohmann::json::exception& e) {
                throw ksv::precondition_error(in_path + ": " + e.what());
            }
            if (auto err = ksv::validate_report_json(j)) throw ksv::precondition_error(in_path + ": " + *err);
            auto rep = ksv::report_from_json(j);
            emit(format == "text" ? ksv::to_text_table(rep) : ksv::to_json_string(rep), out);
            return rep.all_pass() ? kExitPass : kExitCheckFailure;
        }

        cfg.modules = module == "all" ? ksv::all_modules() : std::vector<std::string>{module};
        cfg.digits = digits ? *digits : default_digits();
        if (samples) cfg.samples = *samples;
        if (samples) cfg.lemma_samples = *samples;
        if (r) {
            cfg.ks_ranks = {*r};
            cfg.siegel_shapes = {{*r, g.value_or(1)}};
        } else if (g) {
            cfg.siegel_shapes = {{1, *g}};
        }
        if (!primes.empty()) cfg.primes = primes;
        if (!levels.empty()) cfg.levels = levels;
        if (good || bad) {
            cfg.good = good;
            cfg.bad = bad;
        }
        if (!delta.empty()) cfg.delta = ksv::parse_rational(delta);
        if (cfg.fixtures.empty()) cfg.fixtures = default_fixtures();

        auto rep = ksv::run_suite(cfg);
        emit(format == "text" ? ksv::to_text_table(rep) : ksv::to_json_string(rep), out);
        return rep.all_pass() ? kExitPass : kExitCheckFailure;
    } catch (const ksv::precondition_error& e) {
        std::cerr << "ks-verify: invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "ks-verify: " << e.what() << "\n";
        return kExitInvalid;
    }
}
