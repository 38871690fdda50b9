// End-to-end acceptance gate: every numbered check prints one PASS/FAIL line
// and the process exits with the number of failures.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ri2d/experiments.hpp"
#include "ri2d/report.hpp"

using namespace ri2d;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Timed {
    ExperimentOutcome outcome;
    double seconds = 0.0;
};

Timed run(const std::string& id,
          const std::vector<std::pair<std::string, double>>& params = {},
          std::uint64_t replicas = 0)
{
    ExperimentConfig cfg;
    cfg.id = id;
    cfg.seed = kSeed;
    cfg.replicas = replicas;
    for (const auto& [k, v] : params) cfg.params[k] = v;
    const auto t0 = std::chrono::steady_clock::now();
    Timed t;
    t.outcome = run_experiment(cfg);
    t.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    return t;
}

std::size_t col(const ResultTable& t, const std::string& name)
{
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i] == name) return i;
    throw std::runtime_error("missing column " + name);
}

double cell(const ResultTable& t, std::size_t row, const std::string& name)
{
    return std::stod(t.rows.at(row).at(col(t, name)));
}

std::string meta(const ResultTable& t, const std::string& key)
{
    for (const auto& [k, v] : t.meta)
        if (k == key) return v;
    throw std::runtime_error("missing meta " + key);
}

int g_failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail)
{
    std::cout << (pass ? "PASS" : "FAIL") << " " << (number < 10 ? "0" : "")
              << number << " " << name << "  [" << detail << "]\n"
              << std::flush;
    if (!pass) ++g_failures;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

// ---- criteria ---------------------------------------------------------------

void criterion_poisson_tv()
{
    const Timed t = run("poisson-tv");
    bool ok = t.seconds < 1.0;
    for (const auto& row : t.outcome.table.rows)
        ok = ok && row.back() == "true";
    report(1, "poisson-tv-bounds", ok,
           "16/16 exact<=bound, " + fmt(t.seconds) + "s");
}

void criterion_potential()
{
    const auto t0 = std::chrono::steady_clock::now();
    const PotentialTable& a = shared_potential();
    const double residual = a.harmonicity_residual(50);
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    const bool ok = residual < 1e-9 && std::abs(a.at({1, 0}) - 1.0) < 1e-6 &&
                    std::abs(a.at({1, 1}) - 4.0 / 3.141592653589793) < 1e-4 &&
                    secs < 60.0;
    report(2, "potential-kernel", ok,
           "residual=" + fmt(residual) + ", a(1,0)-1=" +
               fmt(a.at({1, 0}) - 1.0) + ", " + fmt(secs) + "s");
}

void criterion_hm_close()
{
    const Timed t = run("hm-close");
    const ResultTable& tab = t.outcome.table;
    const double g8 = cell(tab, 0, "max_ratio_gap");
    const double g16 = cell(tab, 1, "max_ratio_gap");
    const double g32 = cell(tab, 2, "max_ratio_gap");
    const bool ok = g8 > g16 && g16 > g32 && g32 <= 5.0 / 32.0 &&
                    t.seconds < 300.0;
    report(3, "hm-closeness-trend", ok,
           "gaps " + fmt(g8) + ">" + fmt(g16) + ">" + fmt(g32) + ", " +
               fmt(t.seconds) + "s");
}

void criterion_capacity()
{
    const Timed t = run("capacity-scan");
    const ResultTable& tab = t.outcome.table;
    bool in_range = true;
    std::vector<double> gaps;
    for (std::size_t r = 0; r < tab.rows.size(); ++r) {
        const double ratio = cell(tab, r, "ratio");
        in_range = in_range && ratio >= 0.7 && ratio <= 1.3;
        gaps.push_back(std::abs(ratio - 1.0));
    }
    const bool toward_one = gaps[0] > gaps[1] && gaps[1] > gaps[2];
    const bool ok = in_range && toward_one && t.seconds < 600.0;
    report(4, "capacity-of-distant-ball", ok,
           std::string("range ") + (in_range ? "ok" : "BAD") + ", |ratio-1| " +
               fmt(gaps[0]) + "," + fmt(gaps[1]) + "," + fmt(gaps[2]) +
               (toward_one ? " toward 1" : " NOT toward 1") + ", " +
               fmt(t.seconds) + "s");
}

void criterion_n_distribution()
{
    const Timed t = run("n-distribution");
    const ResultTable& tab = t.outcome.table;
    const double ks25 = cell(tab, 0, "ks");
    const double ks100 = cell(tab, 1, "ks");
    const double ks400 = cell(tab, 2, "ks");
    const double down = cell(tab, 1, "downward");
    const bool ok = ks100 <= 0.1 && ks25 > ks100 && ks100 > ks400 &&
                    down >= 0.25 && down <= 0.37 && t.seconds < 60.0;
    report(5, "compound-count-normality", ok,
           "ks=" + fmt(ks25) + ">" + fmt(ks100) + ">" + fmt(ks400) +
               ", down=" + fmt(down) + ", " + fmt(t.seconds) + "s");
}

void criterion_torus_counts()
{
    const Timed t = run("torus-excursions");
    const ResultTable& tab = t.outcome.table;
    const double r16 = cell(tab, 0, "ratio");
    const double r32 = cell(tab, 1, "ratio");
    const double r64 = cell(tab, 2, "ratio");
    const bool in_range = r32 >= 0.6 && r32 <= 1.4;
    const bool trend = std::abs(r16 - 1.0) >= std::abs(r32 - 1.0) &&
                       std::abs(r32 - 1.0) >= std::abs(r64 - 1.0);
    const bool ok = in_range && trend && t.seconds < 1800.0;
    report(6, "torus-excursion-counts", ok,
           "ratios " + fmt(r16) + "," + fmt(r32) + "," + fmt(r64) +
               (in_range ? "" : " (n=32 out of [0.6,1.4])") + ", " +
               fmt(t.seconds) + "s");
}

void criterion_iid_noncover()
{
    const Timed t = run("iid-noncover");
    const ResultTable& tab = t.outcome.table;
    // frequencies compared at the Wilson-99 resolution: a later scale must
    // not sit significantly below an earlier one
    bool nondecreasing = true;
    for (std::size_t r = 0; r + 1 < tab.rows.size(); ++r)
        nondecreasing = nondecreasing &&
                        cell(tab, r + 1, "wilson_hi") >= cell(tab, r, "wilson_lo");
    const double lo64 = cell(tab, 2, "wilson_lo");
    const bool ok = nondecreasing && lo64 >= 0.5 && t.seconds < 1800.0;
    report(7, "iid-noncoverage", ok,
           "freqs " + fmt(cell(tab, 0, "noncover_freq")) + "," +
               fmt(cell(tab, 1, "noncover_freq")) + "," +
               fmt(cell(tab, 2, "noncover_freq")) + ", lo64=" + fmt(lo64) +
               ", " + fmt(t.seconds) + "s");
}

void criterion_slt()
{
    const Timed tm = run("slt-marginal");
    const double p = std::stod(tm.outcome.table.rows[0][1]);
    const bool cone = tm.outcome.table.rows[1][1] == "true";

    const Timed td = run("slt-dominance");
    const ResultTable& tab = td.outcome.table;
    const double d16 = cell(tab, 0, "dominance");
    const double d32 = cell(tab, 1, "dominance");
    const double d64 = cell(tab, 2, "dominance");
    bool contained = true;
    for (std::size_t r = 0; r < tab.rows.size(); ++r)
        contained = contained && tab.rows[r][col(tab, "containment_ok")] == "true";
    const bool ok = p > 0.01 && cone && d16 <= d32 && d32 <= d64 && contained &&
                    tm.seconds + td.seconds < 1200.0;
    report(8, "soft-local-times", ok,
           "p=" + fmt(p) + (cone ? ", cone exact" : ", cone BROKEN") +
               ", dominance " + fmt(d16) + "<=" + fmt(d32) + "<=" + fmt(d64) +
               ", " + fmt(tm.seconds + td.seconds) + "s");
}

void criterion_interlacement_laws()
{
    const Timed t = run("xi-law");
    const ResultTable& tab = t.outcome.table;
    bool ok = t.seconds < 600.0;
    std::string ps;
    for (std::size_t r = 0; r < tab.rows.size(); ++r) {
        const std::string& metric = tab.rows[r][1];
        const double v = std::stod(tab.rows[r][2]);
        if (metric == "chi2_p") {
            ok = ok && v > 0.01;
            ps += (ps.empty() ? "" : ",") + fmt(v);
        } else if (metric == "reconstruction_violations" ||
                   metric == "thinning_violations") {
            ok = ok && v == 0.0;
        }
    }
    report(9, "interlacement-laws", ok,
           "chi2 p " + ps + ", zero violations req'd, " + fmt(t.seconds) + "s");
}

void criterion_vacant_window()
{
    const Timed t = run("ri-vacant");
    const ResultTable& tab = t.outcome.table;
    // rows alternate: (s, kill), (s, 2 kill)
    bool lower_ok = true, doubling_ok = true;
    std::vector<double> ests;
    for (std::size_t r = 0; r + 1 < tab.rows.size(); r += 2) {
        const double e1 = cell(tab, r, "nonempty_freq");
        const double e2 = cell(tab, r + 1, "nonempty_freq");
        const double lo = cell(tab, r, "wilson_lo");
        const double width = cell(tab, r, "wilson_hi") - lo;
        lower_ok = lower_ok && lo >= 0.05;
        doubling_ok = doubling_ok && std::abs(e1 - e2) < width;
        ests.push_back(e1);
    }
    const bool no_collapse = !(ests[0] > ests[1] && ests[1] > ests[2] &&
                               ests[2] < 0.05);
    const bool ok = lower_ok && doubling_ok && no_collapse &&
                    t.seconds < 3600.0 && !t.outcome.truncation_exceeded;
    report(10, "vacant-set-window", ok,
           "estimates " + fmt(ests[0]) + "," + fmt(ests[1]) + "," + fmt(ests[2]) +
               (doubling_ok ? ", kill-doubling stable" : ", kill-doubling UNSTABLE") +
               ", " + fmt(t.seconds) + "s");
}

void criterion_pipeline()
{
    const Timed t = run("lemma2");
    const ResultTable& tab = t.outcome.table;
    const double tv = std::stod(meta(tab, "count_coupling_tv"));
    const double lo = std::stod(meta(tab, "count_coupling_wilson_lo"));
    const double hi = std::stod(meta(tab, "count_coupling_wilson_hi"));
    const bool calib = lo <= 1.0 - tv && 1.0 - tv <= hi;
    const double s16 = cell(tab, 0, "success_freq");
    const double s32 = cell(tab, 1, "success_freq");
    const double s64 = cell(tab, 2, "success_freq");
    const bool bitwise =
        cell(tab, 1, "equal_on_success") == cell(tab, 1, "success");
    const bool failure_trend = (1 - s16) >= (1 - s32) && (1 - s32) >= (1 - s64);
    const bool ok = calib && bitwise && failure_trend && t.seconds < 1800.0 &&
                    !t.outcome.truncation_exceeded;
    report(11, "decomposition-pipeline", ok,
           std::string("1-tv in CI: ") + (calib ? "yes" : "NO") +
               ", equal-on-success " + (bitwise ? "exact" : "VIOLATED") +
               ", success " + fmt(s16) + "," + fmt(s32) + "," + fmt(s64) +
               ", " + fmt(t.seconds) + "s");
}

std::string cheap_report(const std::string& id)
{
    ExperimentConfig cfg;
    cfg.id = id;
    cfg.seed = 99;
    if (id == "n-distribution") cfg.replicas = 2000;
    if (id == "torus-excursions") { cfg.replicas = 2; cfg.params["n"] = 16; }
    if (id == "iid-noncover") { cfg.replicas = 5; cfg.params["n"] = 16; }
    if (id == "slt-marginal") cfg.replicas = 300;
    if (id == "slt-dominance") { cfg.replicas = 2; cfg.params["n"] = 16; }
    if (id == "ri-vacant") { cfg.replicas = 3; cfg.params["s"] = 64; }
    if (id == "xi-law") cfg.replicas = 60;
    if (id == "lemma2") { cfg.replicas = 5; cfg.params["n"] = 16; }
    if (id == "hm-close") cfg.params["n"] = 8;
    if (id == "capacity-scan") cfg.params["s"] = 200;
    std::ostringstream os;
    emit_report(run_experiment(cfg).table, ReportFormat::csv, os);
    return os.str();
}

void criterion_reproducibility()
{
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path golden_dir = RI2D_GOLDEN_DIR;
    const bool update = std::getenv("RI2D_UPDATE_GOLDEN") != nullptr;
    bool ok = true;
    std::string bad;
    for (const std::string& id : experiment_ids()) {
        const std::string once = cheap_report(id);
        const std::string twice = cheap_report(id);
        if (once != twice) {
            ok = false;
            bad += " " + id + "(rerun)";
            continue;
        }
        const fs::path file = golden_dir / (id + ".csv");
        if (update) {
            fs::create_directories(golden_dir);
            std::ofstream(file, std::ios::binary) << once;
            continue;
        }
        std::ifstream is(file, std::ios::binary);
        std::stringstream want;
        want << is.rdbuf();
        if (!is || want.str() != once) {
            ok = false;
            bad += " " + id + "(golden)";
        }
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    ok = ok && secs < 300.0;
    report(12, "reproducibility", ok,
           (update ? "golden files regenerated"
                   : (ok ? "11/11 byte-identical" : "mismatch:" + bad)) +
               ", " + fmt(secs) + "s");
}

} // namespace

int main()
{
    criterion_poisson_tv();
    criterion_potential();
    criterion_hm_close();
    criterion_capacity();
    criterion_n_distribution();
    criterion_torus_counts();
    criterion_iid_noncover();
    criterion_slt();
    criterion_interlacement_laws();
    criterion_vacant_window();
    criterion_pipeline();
    criterion_reproducibility();
    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                  : std::to_string(g_failures) + " CRITERIA FAILED")
              << "\n";
    return g_failures;
}
