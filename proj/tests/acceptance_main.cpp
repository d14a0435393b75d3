// Acceptance gate: one pass/fail line per criterion. argv[1] is the CLI.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fgshift/fgshift.hpp>

#include "subprocess.hpp"

using namespace fgshift;

namespace {

std::string cli;
std::string dir;
int failed_criteria = 0;

void report(int criterion, const std::string& what, bool ok,
            const std::string& note = std::string()) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion << ": " << what;
    if (!note.empty()) std::cout << " [" << note << "]";
    std::cout << std::endl;
    failed_criteria += !ok;
}

RunResult run(const std::string& args) { return run_cmd(shq(cli) + " " + args); }

// value of the first "key\t..." line
std::string tsv_value(const std::string& out, const std::string& key) {
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(key + "\t", 0) == 0) return line.substr(key.size() + 1);
    return "<missing>";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Rational Q(const std::string& s) { return parse_rational(s); }

// ------------------------------------------------------------ measures ----

TransitionSystem same_matrix_ts(std::vector<Rational> pi,
                                std::vector<std::vector<Rational>> p, const GroupSpec& spec) {
    std::vector<std::vector<std::vector<Rational>>> mats(letter_count(spec), p);
    return ts_from_dense(std::move(pi), mats);
}

MeasureSpec make_measure(const std::string& kind, std::uint32_t K, const GroupSpec& spec) {
    if (kind == "uniform")
        return MeasureSpec::bernoulli(std::vector<Rational>(K, Rational(1, K)));
    if (kind == "biased")
        return MeasureSpec::bernoulli(K == 2 ? std::vector<Rational>{Q("1/4"), Q("3/4")}
                                             : std::vector<Rational>{Q("1/6"), Q("1/3"),
                                                                     Q("1/2")});
    if (kind == "chain") { // deterministic: states never change along an edge
        std::vector<std::vector<Rational>> p(K, std::vector<Rational>(K, 0));
        for (std::uint32_t i = 0; i < K; ++i) p[i][i] = 1;
        return MeasureSpec::tree_markov(
            same_matrix_ts(std::vector<Rational>(K, Rational(1, K)), p, spec));
    }
    // full-support reversible tree-Markov chain
    if (K == 2)
        return MeasureSpec::tree_markov(same_matrix_ts(
            {Q("1/3"), Q("2/3")}, {{Q("1/2"), Q("1/2")}, {Q("1/4"), Q("3/4")}}, spec));
    return MeasureSpec::tree_markov(
        same_matrix_ts({Q("1/6"), Q("1/3"), Q("1/2")},
                       {{Q("1/2"), Q("1/4"), Q("1/4")},
                        {Q("1/8"), Q("5/8"), Q("1/4")},
                        {Q("1/12"), Q("1/6"), Q("3/4")}},
                       spec));
}

std::string config_json(const GroupSpec& spec, std::uint32_t K, const MeasureSpec& mu,
                        std::uint32_t n, std::uint64_t budget) {
    std::ostringstream out;
    out << "{\"group\":{\"rank\":" << spec.rank << ",\"mode\":\""
        << (spec.mode == GroupMode::group ? "group" : "semigroup") << "\"},";
    out << "\"alphabet\":" << K << ",\"measure\":";
    if (mu.kind == MeasureSpec::Kind::bernoulli) {
        out << "{\"type\":\"bernoulli\",\"p\":[";
        for (std::size_t i = 0; i < mu.p.size(); ++i)
            out << (i ? "," : "") << '"' << rational_to_string(mu.p[i]) << '"';
        out << "]}";
    } else {
        out << "{\"type\":\"tree-markov\",\"pi\":[";
        for (std::size_t i = 0; i < mu.ts.pi.size(); ++i)
            out << (i ? "," : "") << '"' << rational_to_string(mu.ts.pi[i]) << '"';
        out << "],\"P\":{";
        for (Letter t = 0; t < letter_count(spec); ++t) {
            out << (t ? "," : "") << '"' << letter_name(t, spec) << "\":[";
            for (std::uint32_t i = 0; i < mu.ts.states; ++i) {
                out << (i ? "," : "") << "[";
                for (std::uint32_t j = 0; j < mu.ts.states; ++j)
                    out << (j ? "," : "") << '"'
                        << rational_to_string(transition(mu.ts, t, i, j)) << '"';
                out << "]";
            }
            out << "]";
        }
        out << "}}";
    }
    out << ",\"n\":" << n << ",\"budget\":" << budget << ",\"unit\":\"bits\"}";
    return out.str();
}

struct GridCase {
    GroupSpec spec;
    std::uint32_t n;
    std::uint32_t K;
    std::string kind;
    std::string path;
};

// the verification grid: every (geometry, alphabet, measure) combination
// that fits the enumeration budget
std::vector<GridCase> build_grid() {
    const std::uint64_t budget = 1ull << 34;
    std::vector<std::pair<GroupSpec, std::uint32_t>> shapes = {
        {{1, GroupMode::group}, 1},     {{1, GroupMode::group}, 2},
        {{1, GroupMode::group}, 3},     {{2, GroupMode::group}, 1},
        {{2, GroupMode::semigroup}, 1}, {{2, GroupMode::semigroup}, 2},
    };
    std::vector<GridCase> grid;
    int idx = 0;
    for (const auto& [spec, n] : shapes)
        for (std::uint32_t K : {2u, 3u}) {
            // |B(4)| = 31 sites at alphabet 3 outruns any reasonable budget
            if (spec.mode == GroupMode::semigroup && n == 2 && K == 3) continue;
            for (const std::string kind : {"uniform", "biased", "chain", "markov"}) {
                GridCase c{spec, n, K, kind, dir + "/grid" + std::to_string(idx++) + ".json"};
                write_file(c.path,
                           config_json(spec, K, make_measure(kind, K, spec), n, budget));
                grid.push_back(c);
            }
        }
    return grid;
}

std::string case_name(const GridCase& c) {
    return "rank" + std::to_string(c.spec.rank) +
           (c.spec.mode == GroupMode::group ? "g" : "s") + " n" + std::to_string(c.n) + " K" +
           std::to_string(c.K) + " " + c.kind;
}

// ----------------------------------------------------------- criteria -----

void criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    RunResult r = run("counterexample --n-max 8");
    double dt = seconds_since(t0);
    bool ok = r.code == 0;
    std::istringstream in(r.out);
    std::string line;
    int rows = 0, frows = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string a, b, c, d, e;
        std::getline(ls, a, '\t');
        if (a.size() == 1 && a[0] >= '1' && a[0] <= '8') {
            std::getline(ls, b, '\t'); // H_Pn
            std::getline(ls, c, '\t'); // H_join
            std::getline(ls, d, '\t'); // H_cond
            std::getline(ls, e, '\t'); // F_Pn
            int n = a[0] - '0';
            ok = ok && b == std::to_string(2 * n) && c == std::to_string(2 * n + 2) &&
                 d == "2" && e == "2";
            ++rows;
        } else if (a == "f_seq") {
            std::getline(ls, b, '\t');
            std::getline(ls, c, '\t');
            ok = ok && c == "1";
            ++frows;
        }
    }
    ok = ok && rows == 8 && frows == 9 && dt < 5.0;
    report(1, "window-vs-conditional table is exact for n = 1..8", ok,
           "H_cond = F = 2 and f-sequence = 1 throughout, " +
               std::to_string(dt).substr(0, 4) + "s");
}

void criterion2(const std::vector<GridCase>& grid) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string bad;
    for (const GridCase& c : grid) {
        RunResult r = run("verify-lemma --config " + shq(c.path));
        if (r.code != 0 || tsv_value(r.out, "violations") != "0" ||
            tsv_value(r.out, "completed_radius") != std::to_string(c.n)) {
            ok = false;
            if (bad.empty()) bad = case_name(c);
        }
    }
    double dt = seconds_since(t0);
    ok = ok && dt < 120.0;
    report(2, "readback check passes on the whole verification grid", ok,
           std::to_string(grid.size()) + " runs, " + std::to_string(dt).substr(0, 5) + "s" +
               (bad.empty() ? "" : ", first failure: " + bad));
}

void criterion3(const std::vector<GridCase>& grid) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string bad;
    for (const GridCase& c : grid) {
        RunResult r =
            run("oracle-compare --config " + shq(c.path) + " --m " + std::to_string(c.n));
        if (r.code != 0 || tsv_value(r.out, "equal") != "true" ||
            tsv_value(r.out, "admissible_count") != tsv_value(r.out, "image_count")) {
            ok = false;
            if (bad.empty()) bad = case_name(c);
        }
    }
    report(3, "admissible patterns equal actual recodings at m = n on the grid", ok,
           std::to_string(grid.size()) + " runs, " +
               std::to_string(seconds_since(t0)).substr(0, 5) + "s" +
               (bad.empty() ? "" : ", first failure: " + bad));
}

void criterion4() {
    std::string fair = dir + "/c4_fair.json";
    write_file(fair, config_json({1, GroupMode::group}, 2,
                                 make_measure("uniform", 2, {1, GroupMode::group}), 1,
                                 10000000));
    write_file(dir + "/c4_and.json",
               R"({"window":["e","a"],"target_size":2,
                   "map":[["00","0"],["01","0"],["10","0"],["11","1"]]})");
    write_file(dir + "/c4_xor.json",
               R"({"window":["e","a"],"target_size":2,
                   "map":[["00","0"],["01","1"],["10","1"],["11","0"]]})");
    write_file(dir + "/c4_id.json",
               R"({"window":["e"],"target_size":2,"map":[["0","0"],["1","1"]]})");

    RunResult r = run("support-gap --config " + shq(fair) + " --code " +
                      shq(dir + "/c4_and.json") + " --m-max 2 --max-sites 6");
    // the witness sits on (e, a, A); read as (x(-1), x(0), x(1)) it is 1,0,1
    bool ok = r.code == 1 && tsv_value(r.out, "gap") == "found" &&
              tsv_value(r.out, "m") == "1" && tsv_value(r.out, "sites") == "e,a,A" &&
              tsv_value(r.out, "witness") == "0,1,1" &&
              tsv_value(r.out, "preimage_found") == "false";
    for (const char* code : {"c4_xor.json", "c4_id.json"}) {
        RunResult s = run("support-gap --config " + shq(fair) + " --code " +
                          shq(dir + "/" + code) + " --m-max 4");
        ok = ok && s.code == 0 && tsv_value(s.out, "gap") == "none" &&
             tsv_value(s.out, "m_examined") == "4";
    }
    report(4, "AND exhibits a support gap with no preimage; XOR and identity do not", ok);
}

void criterion5(const std::vector<GridCase>& grid) {
    bool ok = true;
    std::string bad;
    for (const GridCase& c : grid) {
        Budget budget(1ull << 34);
        CodingLevel lv = make_level(c.spec, Alphabet{c.K}, c.n, budget);
        TransitionSystem ts = markovize(make_measure(c.kind, c.K, c.spec), lv, budget);
        ValidationReport rep = validate_ts(ts, c.spec);
        if (!(rep.stochastic && rep.stationary && rep.reversible)) {
            ok = false;
            if (bad.empty()) bad = case_name(c);
        }
    }
    report(5, "every recoded system is exactly stationary and reversible", ok,
           std::to_string(grid.size()) + " systems" +
               (bad.empty() ? "" : ", first failure: " + bad));
}

void criterion6() {
    const long double tol = 1e-12L;
    std::mt19937 rng(12345);
    bool ok = true;
    int pairs = 0, identity_checks = 0;
    Budget budget(1ull << 30);
    for (int trial = 0; trial < 120 && ok; ++trial) {
        GroupSpec spec{1u + trial % 2, GroupMode::group};
        MeasureSpec mu = make_measure("uniform", 2, spec);
        int which = trial % 3;
        if (which == 1) mu = make_measure("biased", 2, spec);
        if (which == 2) {
            // random symmetric conductances give an exactly reversible chain
            std::vector<std::vector<Rational>> c(2, std::vector<Rational>(2));
            c[0][0] = Rational(1 + (int)(rng() % 6));
            c[1][1] = Rational(1 + (int)(rng() % 6));
            c[0][1] = c[1][0] = Rational(1 + (int)(rng() % 6));
            Rational r0 = c[0][0] + c[0][1], r1 = c[1][0] + c[1][1];
            std::vector<std::vector<Rational>> p = {{c[0][0] / r0, c[0][1] / r0},
                                                    {c[1][0] / r1, c[1][1] / r1}};
            mu = MeasureSpec::tree_markov(
                same_matrix_ts({r0 / (r0 + r1), r1 / (r0 + r1)}, p, spec));
        }
        SiteSet b2 = ball(spec, 2);
        auto random_partition = [&]() {
            std::vector<Word> win;
            std::uint32_t wsize = 1 + rng() % 3;
            for (std::uint32_t i = 0; i < wsize; ++i) win.push_back(b2[rng() % b2.size()]);
            WindowPartition p;
            p.alphabet = Alphabet{2};
            p.window = SiteSet{std::move(win)};
            std::uint32_t want = 2 + rng() % 3;
            p.labels.resize(1u << p.window.size());
            for (auto& l : p.labels) l = rng() % want;
            // compress to the labels actually hit so the labeling is surjective
            std::vector<std::uint32_t> remap(want, UINT32_MAX);
            for (auto& l : p.labels) {
                if (remap[l] == UINT32_MAX) remap[l] = p.label_count++;
                l = remap[l];
            }
            return p;
        };
        WindowPartition p = random_partition();
        WindowPartition q = random_partition();
        EntropyValue hp = partition_entropy(mu, p, spec, Unit::bits, budget);
        EntropyValue hq = partition_entropy(mu, q, spec, Unit::bits, budget);
        EntropyValue hj = partition_entropy(mu, join(p, q, budget), spec, Unit::bits, budget);
        EntropyValue hc = cond_entropy(mu, p, q, spec, Unit::bits, budget);
        Word g = b2[rng() % b2.size()];
        EntropyValue hs = partition_entropy(mu, translate_partition(p, g, spec, budget), spec,
                                            Unit::bits, budget);
        ok = ok && hj.value <= hp.value + hq.value + tol; // subadditivity
        ok = ok && hc.value >= -tol;                      // conditioning cannot go negative
        ok = ok && std::abs(hs.value - hp.value) < tol; // shift invariance
        if (hj.exact && hp.exact && hq.exact) ok = ok && *hj.exact <= *hp.exact + *hq.exact;
        if (spec.rank == 1) {
            EntropyValue f = F_quantity(mu, p, spec, Unit::bits, budget);
            WindowPartition sh =
                translate_partition(p, parse_word("A", spec), spec, budget);
            EntropyValue cc = cond_entropy(mu, p, sh, spec, Unit::bits, budget);
            ok = ok && ev_equal(f, cc, tol);
            ++identity_checks;
        }
        ++pairs;
    }
    ok = ok && pairs >= 100 && identity_checks >= 50;
    report(6, "entropy inequalities hold on random seeded partition pairs", ok,
           std::to_string(pairs) + " pairs, " + std::to_string(identity_checks) +
               " rank-one identity checks");
}

void criterion7() {
    bool ok = true;
    const std::uint64_t expect_group[3][5] = {
        {1, 3, 5, 7, 9}, {1, 5, 17, 53, 161}, {1, 7, 37, 187, 937}};
    const std::uint64_t expect_semi[3][5] = {
        {1, 2, 3, 4, 5}, {1, 3, 7, 15, 31}, {1, 4, 13, 40, 121}};
    for (std::uint32_t r = 1; r <= 3 && ok; ++r)
        for (std::uint32_t n = 0; n <= 4 && ok; ++n)
            for (GroupMode mode : {GroupMode::group, GroupMode::semigroup}) {
                GroupSpec spec{r, mode};
                std::uint64_t want =
                    mode == GroupMode::group ? expect_group[r - 1][n] : expect_semi[r - 1][n];
                SiteSet b = ball(spec, n);
                ok = ok && b.size() == want;
                ok = ok && ball_size_closed_form(spec, n) == mpz_class(want);
                ParentStructure ps = parent_structure(b, spec);
                // a spanning tree: |V|-1 edges, each pointing strictly rootward
                for (std::uint32_t k = 1; k < b.size() && ok; ++k) {
                    ok = ok && ps.parent[k] < k &&
                         left_mul(ps.letter[k], b[ps.parent[k]], spec) == b[k];
                    std::uint32_t cur = k, hops = 0;
                    while (cur != 0 && hops <= b.size()) cur = ps.parent[cur], ++hops;
                    ok = ok && cur == 0;
                }
            }
    report(7, "ball sizes match the closed forms and parent maps span the balls", ok,
           "ranks 1-3, radii 0-4, both modes");
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: fgshift_acceptance <path-to-cli>\n";
        return 2;
    }
    cli = argv[1];
    char tmpl[] = "/tmp/fgshift_acceptance_XXXXXX";
    if (!mkdtemp(tmpl)) {
        std::cerr << "mkdtemp failed\n";
        return 2;
    }
    dir = tmpl;
    std::vector<GridCase> grid = build_grid();

    criterion1();
    criterion2(grid);
    criterion3(grid);
    criterion4();
    criterion5(grid);
    criterion6();
    criterion7();

    if (failed_criteria) {
        std::cerr << failed_criteria << " criterion(s) failed\n";
        return 1;
    }
    return 0;
}
