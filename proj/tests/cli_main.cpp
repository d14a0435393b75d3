// End-to-end checks of the command-line tool: exact output bytes, exit
// codes, and determinism. argv[1] is the path to the binary.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <json.hpp>

#include "subprocess.hpp"

namespace {

int failures = 0;
std::string cli;
std::string dir;

void check(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        std::cerr << "FAILED: " << what << "\n";
    }
}

void check_eq(const std::string& got, const std::string& want, const std::string& what) {
    if (got != want) {
        ++failures;
        std::cerr << "FAILED: " << what << "\n  want: " << want << "\n  got:  " << got << "\n";
    }
}

bool has_line(const std::string& out, const std::string& line) {
    return ("\n" + out).find("\n" + line + "\n") != std::string::npos;
}

RunResult run(const std::string& args) { return run_cmd(shq(cli) + " " + args); }

const char* kFair = R"({"group":{"rank":1,"mode":"group"},"alphabet":2,
  "measure":{"type":"bernoulli","p":["1/2","1/2"]},"n":1,"budget":10000000,"unit":"bits"})";

const char* kChain = R"({"group":{"rank":1,"mode":"group"},"alphabet":2,
  "measure":{"type":"tree-markov","pi":["1/3","2/3"],
             "P":{"a":[["1/2","1/2"],["1/4","3/4"]],
                  "A":[["1/2","1/2"],["1/4","3/4"]]}},"n":1,"budget":10000000,"unit":"bits"})";

void test_ball() {
    RunResult r = run("ball --rank 1 --mode group --n 2");
    check(r.code == 0, "ball exit code");
    check_eq(r.out,
             "size\t5\nelement\te\nelement\ta\nelement\tA\nelement\taa\nelement\tAA\n",
             "ball output bytes");
    r = run("ball --rank 2 --mode semigroup --n 3");
    check(has_line(r.out, "size\t15"), "semigroup ball size");
    check(run("ball --rank 1 --mode ring --n 2").code == 2, "bad mode rejected");
    check(run("ball --rank 1 --mode group").code == 2, "missing flag rejected");
    check(run("ball --rank 3 --mode group --n 9 --budget 100").code == 3,
          "ball budget exhaustion");
    r = run("ball --rank 1 --mode group --n 1 --json");
    check(r.code == 0 && nlohmann::json::parse(r.out)["size"] == 3, "ball json");
}

void test_validate_ts() {
    RunResult r = run("validate-ts --config " + shq(dir + "/chain.json"));
    check(r.code == 0, "validate-ts exit");
    check(has_line(r.out, "check\tstochastic\tpass"), "stochastic line");
    check(has_line(r.out, "result\tpass"), "result line");

    write_file(dir + "/chain_bad.json", std::string(kChain).replace(
        std::string(kChain).find("\"1/3\",\"2/3\""), 11, "\"1/2\",\"1/2\""));
    r = run("validate-ts --config " + shq(dir + "/chain_bad.json"));
    check(r.code == 1, "non-stationary chain exits 1");
    check(has_line(r.out, "check\tstationary\tfail"), "stationary failure line");
    check(has_line(r.out, "result\tfail"), "failed result line");

    check(run("validate-ts --config " + shq(dir + "/fair.json")).code == 2,
          "bernoulli config rejected by validate-ts");
}

void test_markovize() {
    RunResult r = run("markovize --config " + shq(dir + "/fair.json"));
    check(r.code == 0, "markovize exit");
    check(has_line(r.out, "states\t8"), "markovize states");
    check(has_line(r.out, "pi\t0\t1/8"), "markovize pi");
    check(has_line(r.out, "P\ta\t0\t0\t1/2"), "markovize row");
    check(has_line(r.out, "P\tA\t7\t7\t1/2"), "markovize last row");
    RunResult again = run("markovize --config " + shq(dir + "/fair.json"));
    check(r.out == again.out, "markovize deterministic");
    RunResult js = run("markovize --config " + shq(dir + "/fair.json") + " --json");
    auto j = nlohmann::json::parse(js.out);
    check(j["states"] == 8 && j["pi"][0] == "1/8", "markovize json");
}

void test_admissible() {
    RunResult r = run("admissible --config " + shq(dir + "/fair.json") + " --m 1");
    check(r.code == 0, "admissible exit");
    check(has_line(r.out, "count\t32"), "admissible count");
    r = run("admissible --config " + shq(dir + "/fair.json") + " --m 0 --print");
    check(has_line(r.out, "count\t8"), "admissible m=0 count");
    check(has_line(r.out, "pattern\t0"), "admissible prints patterns");
}

void test_verify_lemma() {
    RunResult r = run("verify-lemma --config " + shq(dir + "/fair.json"));
    check(r.code == 0, "verify-lemma exit");
    check(has_line(r.out, "patterns_checked\t32"), "verify-lemma patterns checked");
    check(has_line(r.out, "violations\t0"), "verify-lemma violations");
    check(has_line(r.out, "completed_radius\t1"), "verify-lemma completed radius");
    r = run("verify-lemma --config " + shq(dir + "/chain.json"));
    check(r.code == 0 && has_line(r.out, "violations\t0"), "verify-lemma on the chain");
    check(run("verify-lemma --config " + shq(dir + "/fair.json") + " --budget 10").code == 3,
          "verify-lemma budget exit");
}

void test_oracle_compare() {
    RunResult r = run("oracle-compare --config " + shq(dir + "/fair.json") + " --m 1");
    check(r.code == 0, "oracle-compare exit");
    check(has_line(r.out, "admissible_count\t32"), "oracle-compare admissible");
    check(has_line(r.out, "image_count\t32"), "oracle-compare image");
    check(has_line(r.out, "equal\ttrue"), "oracle-compare equal");
    r = run("oracle-compare --config " + shq(dir + "/chain.json") + " --m 2");
    check(r.code == 0 && has_line(r.out, "equal\ttrue"), "oracle-compare chain m=2");
}

void test_support_gap() {
    std::string base = "support-gap --config " + shq(dir + "/fair.json");
    RunResult r = run(base + " --code " + shq(dir + "/and.json") + " --m-max 4");
    check(r.code == 1, "gap exit code");
    check(has_line(r.out, "gap\tfound"), "gap found line");
    check(has_line(r.out, "m\t1"), "gap radius");
    check(has_line(r.out, "sites\te,a,A"), "gap sites");
    check(has_line(r.out, "witness\t0,1,1"), "gap witness");
    check(has_line(r.out, "preimage_found\tfalse"), "gap preimage check");
    RunResult again = run(base + " --code " + shq(dir + "/and.json") + " --m-max 4");
    check(r.out == again.out, "support-gap deterministic");

    r = run(base + " --code " + shq(dir + "/xor.json") + " --m-max 4");
    check(r.code == 0, "xor no-gap exit");
    check(has_line(r.out, "gap\tnone"), "xor no-gap line");
    check(has_line(r.out, "m_examined\t4"), "xor searched all radii");

    r = run(base + " --code " + shq(dir + "/id.json") + " --m-max 4");
    check(r.code == 0 && has_line(r.out, "gap\tnone"), "identity no-gap");
}

void test_entropy() {
    write_file(dir + "/p1.json", R"({"window":["A","a"],"label_count":4,"labels":[0,1,2,3]})");
    write_file(dir + "/alpha.json", R"({"window":["e"],"label_count":2,"labels":[0,1]})");
    std::string base = "entropy --config " + shq(dir + "/fair.json");
    RunResult r = run(base + " --partition " + shq(dir + "/p1.json"));
    check(r.code == 0, "entropy exit");
    check_eq(r.out, "exact\t2\nvalue\t2\nunit\tbits\n", "entropy output");
    r = run(base + " --partition " + shq(dir + "/p1.json") + " --conditional " +
            shq(dir + "/alpha.json"));
    check(has_line(r.out, "exact\t2"), "conditional entropy");

    std::string nats(kFair);
    nats.replace(nats.find("bits"), 4, "nats");
    write_file(dir + "/fair_nats.json", nats);
    r = run("entropy --config " + shq(dir + "/fair_nats.json") + " --partition " +
            shq(dir + "/alpha.json"));
    check(has_line(r.out, "exact\tnone"), "nats are never exact");
    check(has_line(r.out, "unit\tnats"), "nats unit line");
    check(has_line(r.out, "value\t0.69314718056"), "nats value");
}

void test_f_seq() {
    RunResult r = run("f-seq --config " + shq(dir + "/fair.json") + " --n-max 3");
    check(r.code == 0, "f-seq exit");
    check_eq(r.out, "m\tF_exact\tF_value\n0\t1\t1\n1\t1\t1\n2\t1\t1\n3\t1\t1\n",
             "f-seq output");
    r = run("f-seq --config " + shq(dir + "/fair.json") + " --n-max 8 --budget 300");
    check(r.code == 3, "f-seq budget exit");
    check(has_line(r.out, "truncated\ttrue"), "f-seq truncation marker");
    check(r.out.find("m\tF_exact\tF_value\n0\t1\t1\n") == 0, "f-seq prefix survives");
}

void test_counterexample() {
    RunResult r = run("counterexample --n-max 8");
    check(r.code == 0, "counterexample exit");
    std::string expect = "n\tH_Pn\tH_join\tH_cond\tF_Pn\n";
    for (int n = 1; n <= 8; ++n)
        expect += std::to_string(n) + "\t" + std::to_string(2 * n) + "\t" +
                  std::to_string(2 * n + 2) + "\t2\t2\n";
    for (int m = 0; m <= 8; ++m) expect += "f_seq\t" + std::to_string(m) + "\t1\n";
    expect += "h\t1\nverdict\tliminf F(P_n) = 2 != 1 = f(alpha)\n";
    check_eq(r.out, expect, "counterexample full table");
    RunResult again = run("counterexample --n-max 8");
    check(r.out == again.out, "counterexample deterministic");
    RunResult js = run("counterexample --n-max 2 --json");
    auto j = nlohmann::json::parse(js.out);
    check(j["rows"][1]["H_join"] == "6" && j["h"] == "1", "counterexample json");
}

void test_error_paths() {
    check(run("markovize --config /nonexistent.json").code == 2, "missing config file");
    write_file(dir + "/broken.json", "{");
    check(run("markovize --config " + shq(dir + "/broken.json")).code == 2, "broken json");
    write_file(dir + "/zero_den.json", std::string(kFair).replace(
        std::string(kFair).find("\"1/2\""), 5, "\"1/0\""));
    check(run("markovize --config " + shq(dir + "/zero_den.json")).code == 2,
          "zero denominator");
    write_file(dir + "/negative.json", std::string(kFair).replace(
        std::string(kFair).find("\"1/2\",\"1/2\""), 11, "\"-1/2\",\"3/2\""));
    check(run("markovize --config " + shq(dir + "/negative.json")).code == 2,
          "negative probability");
    check(run("frobnicate").code == 2, "unknown subcommand");
    check(run("markovize --config " + shq(dir + "/fair.json") + " --bogus").code == 2,
          "unknown flag");
    check(run("--help").code == 0, "help exits zero");
    check(run("markovize --config " + shq(dir + "/fair.json") + " --budget 0").code == 2,
          "zero budget rejected");
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: fgshift_cli_tests <path-to-cli>\n";
        return 2;
    }
    cli = argv[1];
    char tmpl[] = "/tmp/fgshift_cli_test_XXXXXX";
    if (!mkdtemp(tmpl)) {
        std::cerr << "mkdtemp failed\n";
        return 2;
    }
    dir = tmpl;
    write_file(dir + "/fair.json", kFair);
    write_file(dir + "/chain.json", kChain);
    write_file(dir + "/and.json",
               R"({"window":["e","a"],"target_size":2,
                   "map":[["00","0"],["01","0"],["10","0"],["11","1"]]})");
    write_file(dir + "/xor.json",
               R"({"window":["e","a"],"target_size":2,
                   "map":[["00","0"],["01","1"],["10","1"],["11","0"]]})");
    write_file(dir + "/id.json",
               R"({"window":["e"],"target_size":2,"map":[["0","0"],["1","1"]]})");

    test_ball();
    test_validate_ts();
    test_markovize();
    test_admissible();
    test_verify_lemma();
    test_oracle_compare();
    test_support_gap();
    test_entropy();
    test_f_seq();
    test_counterexample();
    test_error_paths();

    if (failures) {
        std::cerr << failures << " CLI check(s) failed\n";
        return 1;
    }
    std::cout << "all CLI checks passed\n";
    return 0;
}
