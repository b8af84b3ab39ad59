// qfrep: exact representation counts, local densities, and the asymptotic
// main-term report for X^T A X = B over the integers.
//
// Subcommands: count | report | reduce | gamma | alpha-p | alpha-inf | sseries
// All results go to stdout as a single JSON document; diagnostics to stderr.
// Exit codes: 0 ok, 2 parse, 3 validation, 4 stabilization failure, 5 cap
// exceeded.

#include <CLI11.hpp>

#include <qfrep/qfrep.hpp>

#include <chrono>
#include <future>
#include <iostream>
#include <string>
#include <thread>

using namespace qfrep;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

struct ReportParams {
    long long prime_cap = 100;
    int t_cap = 8;
    long long q_cap = 100000000;  // direct exponential-sum cap q^{mn}
    double eps = 1e-2;
    long long samples = 1000000;
    std::uint64_t seed = 0;
    int threads = 1;
    bool deterministic = false;
};

ordered_json run_report(const QuadraticForm& a, const QuadraticForm& b, const ReportParams& rp) {
    Timer total;
    const int n = a.dim(), m = b.dim();

    ordered_json j;
    j["problem"] = ordered_json{{"n", n},
                                {"m", m},
                                {"R", pair_count(m)},
                                {"A", form_json(a)},
                                {"B", form_json(b)}};

    Timer t_reduce;
    ReductionResult red = minkowski_reduce(b);
    GammaProfile prof = gamma_profile(red.reduced);
    j["reduced_B"] = form_json(red.reduced);
    j["transform"] = matrix_json(red.transform);
    j["gamma"] = gamma_json(prof);
    double ms_reduce = t_reduce.ms();

    if (prof.degenerate) {
        j["theorem"] = ordered_json{{"n_min", nullptr}, {"hypothesis_met", false}};
    } else {
        TheoremThreshold th = theorem_threshold(prof, m);
        j["theorem"] = ordered_json{{"n_min", th.n_min},
                                    {"bound", round12(static_cast<double>(th.bound))},
                                    {"hypothesis_met", n >= th.n_min}};
    }

    Timer t_count;
    RepresentationCount cnt = count_representations({a, b}, rp.threads);
    j["exact_count"] = int_json(cnt.count);
    j["nodes"] = cnt.nodes_visited;
    double ms_count = t_count.ms();

    Timer t_arch;
    ArchimedeanDensity ainf = alpha_infinity_closed(a, b);
    j["alpha_inf"] = round12(ainf.value);
    ArchimedeanDensity shell = alpha_infinity_shell(a, b, rp.eps, rp.samples, rp.seed, rp.threads);
    j["alpha_inf_shell"] = arch_json(shell);
    double ms_arch = t_arch.ms();

    Timer t_alpha;
    AlphaOptions aopt;
    aopt.t_cap = rp.t_cap;
    std::vector<Int> primes;
    for (Int p = 2; p <= rp.prime_cap; ++p)
        if (is_prime(p)) primes.push_back(p);
    std::vector<LocalDensity> table(primes.size());
    {
        std::vector<std::future<LocalDensity>> futs;
        futs.reserve(primes.size());
        for (const Int& p : primes)
            futs.push_back(std::async(rp.threads > 1 ? std::launch::async : std::launch::deferred,
                                      [&, p]() { return alpha_p(a, b, p, aopt); }));
        for (std::size_t i = 0; i < futs.size(); ++i) table[i] = futs[i].get();
    }
    HP euler(1);
    std::vector<Int> obstructions;
    ordered_json alpha_rows = ordered_json::array();
    for (const auto& d : table) {
        alpha_rows.push_back(local_density_json(d));
        euler *= HP(numerator(d.value).str()) / HP(denominator(d.value).str());
        if (d.value == 0) obstructions.push_back(d.p);
    }
    double ms_alpha = t_alpha.ms();

    j["alpha_p"] = ordered_json{{"prime_cap", rp.prime_cap}, {"table", std::move(alpha_rows)}};
    const double euler_d = euler.convert_to<double>();
    j["euler_partial"] = round12(euler_d);
    const double main_term = ainf.value * euler_d;
    j["main_term"] = round12(main_term);
    if (main_term > 0) {
        double exact = cnt.count.convert_to<double>();
        j["relative_error"] = round12((exact - main_term) / main_term);
    }
    ordered_json obs = ordered_json::array();
    for (const Int& p : obstructions) obs.push_back(int_json(p));
    j["local_obstructions"] = std::move(obs);
    j["verdict"] = (obstructions.empty() || cnt.count == 0) ? "consistent" : "inconsistent";

    ordered_json timings;
    auto tval = [&](double v) { return rp.deterministic ? 0.0 : round12(v); };
    timings["reduce"] = tval(ms_reduce);
    timings["count"] = tval(ms_count);
    timings["alpha_inf"] = tval(ms_arch);
    timings["alpha_p"] = tval(ms_alpha);
    timings["total"] = tval(total.ms());
    j["timings_ms"] = std::move(timings);
    return j;
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact representation counts and local densities for X^T A X = B"};
    app.require_subcommand(1);

    std::string file_a, file_b;
    ReportParams rp;
    long long prime_p = 2;
    long long series_q = 10;
    bool shell = false;

    auto* c_count = app.add_subcommand("count", "exact N(A,B)");
    c_count->add_option("A", file_a, "form file for A")->required();
    c_count->add_option("B", file_b, "form file for B")->required();
    c_count->add_option("--threads", rp.threads, "worker threads (result is thread-invariant)");

    auto* c_report = app.add_subcommand("report", "full asymptotic report");
    c_report->add_option("A", file_a)->required();
    c_report->add_option("B", file_b)->required();
    c_report->add_option("--prime-cap", rp.prime_cap, "largest prime in the Euler product");
    c_report->add_option("--t-cap", rp.t_cap, "stabilization level cap for alpha_p");
    c_report->add_option("--q-cap", rp.q_cap, "direct exponential-sum cap (reserved)");
    c_report->add_option("--eps", rp.eps, "shell half-width");
    c_report->add_option("--samples", rp.samples, "shell Monte Carlo samples");
    c_report->add_option("--seed", rp.seed, "shell RNG seed");
    c_report->add_option("--threads", rp.threads);
    c_report->add_flag("--deterministic", rp.deterministic, "zero the timing fields");

    auto* c_reduce = app.add_subcommand("reduce", "Minkowski reduction of B (m <= 3)");
    c_reduce->add_option("B", file_b)->required();

    auto* c_gamma = app.add_subcommand("gamma", "gamma profile of B (reduced internally)");
    c_gamma->add_option("B", file_b)->required();

    auto* c_alpha_p = app.add_subcommand("alpha-p", "stabilized local density alpha_p(A,B)");
    c_alpha_p->add_option("A", file_a)->required();
    c_alpha_p->add_option("B", file_b)->required();
    c_alpha_p->add_option("p", prime_p, "prime")->required();
    c_alpha_p->add_option("--t-cap", rp.t_cap);

    auto* c_alpha_inf = app.add_subcommand("alpha-inf", "archimedean density alpha_inf(A,B)");
    c_alpha_inf->add_option("A", file_a)->required();
    c_alpha_inf->add_option("B", file_b)->required();
    c_alpha_inf->add_flag("--shell", shell, "Monte Carlo shell estimate instead of closed form");
    c_alpha_inf->add_option("--eps", rp.eps);
    c_alpha_inf->add_option("--samples", rp.samples);
    c_alpha_inf->add_option("--seed", rp.seed);
    c_alpha_inf->add_option("--threads", rp.threads);

    auto* c_sseries = app.add_subcommand("sseries", "truncated singular series");
    c_sseries->add_option("A", file_a)->required();
    c_sseries->add_option("B", file_b)->required();
    c_sseries->add_option("Q", series_q, "modulus cutoff")->required();
    c_sseries->add_option("--q-cap", rp.q_cap, "direct exponential-sum cap q^{mn}");
    c_sseries->add_option("--t-cap", rp.t_cap);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (*c_count) {
            QuadraticForm a = QuadraticForm::validate(load_form_matrix(file_a));
            QuadraticForm b = QuadraticForm::validate(load_form_matrix(file_b));
            emit(count_json(count_representations({a, b}, rp.threads)));
        } else if (*c_report) {
            QuadraticForm a = QuadraticForm::validate(load_form_matrix(file_a));
            QuadraticForm b = QuadraticForm::validate(load_form_matrix(file_b));
            emit(run_report(a, b, rp));
        } else if (*c_reduce) {
            QuadraticForm b = QuadraticForm::validate(load_form_matrix(file_b));
            emit(reduction_json(minkowski_reduce(b)));
        } else if (*c_gamma) {
            QuadraticForm b = QuadraticForm::validate(load_form_matrix(file_b));
            ReductionResult red = minkowski_reduce(b);
            ordered_json j = gamma_json(gamma_profile(red.reduced));
            j["reduced"] = form_json(red.reduced);
            emit(j);
        } else if (*c_alpha_p) {
            QuadraticForm a = QuadraticForm::validate(load_form_matrix(file_a));
            QuadraticForm b = QuadraticForm::validate(load_form_matrix(file_b));
            AlphaOptions opt;
            opt.t_cap = rp.t_cap;
            emit(local_density_json(alpha_p(a, b, Int(prime_p), opt)));
        } else if (*c_alpha_inf) {
            QuadraticForm a = QuadraticForm::validate(load_form_matrix(file_a));
            QuadraticForm b = QuadraticForm::validate(load_form_matrix(file_b));
            ArchimedeanDensity d =
                shell ? alpha_infinity_shell(a, b, rp.eps, rp.samples, rp.seed, rp.threads)
                      : alpha_infinity_closed(a, b);
            emit(arch_json(d));
        } else if (*c_sseries) {
            QuadraticForm a = QuadraticForm::validate(load_form_matrix(file_a));
            QuadraticForm b = QuadraticForm::validate(load_form_matrix(file_b));
            ExpSumOptions eopt;
            eopt.direct_cap = Int(rp.q_cap);
            AlphaOptions aopt;
            aopt.t_cap = rp.t_cap;
            emit(sseries_json(singular_series_truncated(a, b, Int(series_q), eopt, aopt)));
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const StabilizationNotReached& e) {
        std::cerr << "stabilization failure: " << e.what() << "\n";
        return 4;
    } catch (const CapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 5;
    } catch (const OracleTooLarge& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 5;
    } catch (const QfError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
