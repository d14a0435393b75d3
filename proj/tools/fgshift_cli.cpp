// fgshift command-line frontend: every subcommand reads exact-rational
// inputs, computes deterministically, and writes TSV (or --json) to stdout.
// Exit codes: 0 verified/success, 1 violation or gap found, 2 invalid input,
// 3 budget exceeded.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <fgshift/fgshift.hpp>

using namespace fgshift;
using nlohmann::ordered_json;

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> budget_override;
    bool json = false;
};

RunConfig load_config(const CommonOpts& opt) {
    RunConfig cfg = load_run_config(opt.config_path);
    if (opt.budget_override) cfg.budget = *opt.budget_override;
    if (cfg.budget == 0) throw invalid_input_error("budget must be at least 1");
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opt, bool with_config = true) {
    if (with_config)
        cmd->add_option("--config", opt.config_path, "run configuration (JSON)")->required();
    cmd->add_option("--budget", opt.budget_override, "override the enumeration budget");
    cmd->add_flag("--json", opt.json, "structured JSON output instead of TSV");
}

std::string csv(const std::vector<std::uint32_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

std::string sites_csv(const SiteSet& sites, const GroupSpec& spec) {
    std::string s;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (i) s += ',';
        s += word_to_string(sites[i], spec);
    }
    return s;
}

ordered_json entropy_json(const EntropyValue& ev) {
    ordered_json j;
    j["exact"] = ev.exact ? ordered_json(rational_to_string(*ev.exact)) : ordered_json(nullptr);
    j["value"] = format_long_double(ev.value);
    j["unit"] = ev.unit == Unit::bits ? "bits" : "nats";
    return j;
}

std::string entropy_exact_str(const EntropyValue& ev) {
    return ev.exact ? rational_to_string(*ev.exact) : std::string("none");
}

void print_entropy_tsv(const EntropyValue& ev) {
    std::cout << "exact\t" << entropy_exact_str(ev) << "\n";
    std::cout << "value\t" << format_long_double(ev.value) << "\n";
    std::cout << "unit\t" << (ev.unit == Unit::bits ? "bits" : "nats") << "\n";
}

// ---------------------------------------------------------------- ball ----

int run_ball(std::uint32_t rank, const std::string& mode, std::uint32_t n,
             std::optional<std::uint64_t> budget_override, bool json) {
    GroupSpec spec;
    spec.rank = rank;
    if (mode == "group")
        spec.mode = GroupMode::group;
    else if (mode == "semigroup")
        spec.mode = GroupMode::semigroup;
    else
        throw invalid_input_error("--mode must be group or semigroup");
    validate_spec(spec);
    Budget budget(budget_override.value_or(kDefaultBudget));
    SiteSet b = ball(spec, n, &budget);
    if (json) {
        ordered_json j;
        j["size"] = b.size();
        std::vector<std::string> elems;
        for (std::size_t i = 0; i < b.size(); ++i) elems.push_back(word_to_string(b[i], spec));
        j["elements"] = elems;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "size\t" << b.size() << "\n";
        for (std::size_t i = 0; i < b.size(); ++i)
            std::cout << "element\t" << word_to_string(b[i], spec) << "\n";
    }
    return 0;
}

// --------------------------------------------------------- validate-ts ----

int run_validate_ts(const CommonOpts& opt) {
    RunConfig cfg = load_config(opt);
    if (cfg.measure.kind != MeasureSpec::Kind::tree_markov)
        throw invalid_input_error("validate-ts requires a tree-markov measure");
    ValidationReport rep = validate_ts(cfg.measure.ts, cfg.group);
    if (opt.json) {
        ordered_json j;
        j["stochastic"] = rep.stochastic;
        j["stationary"] = rep.stationary;
        j["reversible"] = rep.reversible;
        j["failures"] = rep.failures;
        j["result"] = rep.pass() ? "pass" : "fail";
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "check\tstochastic\t" << (rep.stochastic ? "pass" : "fail") << "\n";
        std::cout << "check\tstationary\t" << (rep.stationary ? "pass" : "fail") << "\n";
        std::cout << "check\treversible\t" << (rep.reversible ? "pass" : "fail") << "\n";
        for (const std::string& f : rep.failures) std::cout << "detail\t" << f << "\n";
        std::cout << "result\t" << (rep.pass() ? "pass" : "fail") << "\n";
    }
    return rep.pass() ? 0 : 1;
}

// ----------------------------------------------------------- markovize ----

int run_markovize(const CommonOpts& opt) {
    RunConfig cfg = load_config(opt);
    Budget budget(cfg.budget);
    CodingLevel lv = make_level(cfg.group, cfg.alphabet, cfg.n, budget);
    TransitionSystem ts = markovize(cfg.measure, lv, budget);
    if (opt.json) {
        ordered_json j;
        j["states"] = ts.states;
        std::vector<std::string> pi;
        for (const Rational& q : ts.pi) pi.push_back(rational_to_string(q));
        j["pi"] = pi;
        ordered_json mats = ordered_json::object();
        for (Letter t = 0; t < letter_count(cfg.group); ++t) {
            ordered_json entries = ordered_json::array();
            for (std::uint32_t i = 0; i < ts.states; ++i)
                for (const auto& [col, q] : ts.rows[t][i])
                    entries.push_back(ordered_json::array({i, col, rational_to_string(q)}));
            mats[std::string(1, letter_name(t, cfg.group))] = entries;
        }
        j["P"] = mats;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "states\t" << ts.states << "\n";
        for (std::uint32_t i = 0; i < ts.states; ++i)
            std::cout << "pi\t" << i << "\t" << rational_to_string(ts.pi[i]) << "\n";
        for (Letter t = 0; t < letter_count(cfg.group); ++t)
            for (std::uint32_t i = 0; i < ts.states; ++i)
                for (const auto& [col, q] : ts.rows[t][i])
                    std::cout << "P\t" << letter_name(t, cfg.group) << "\t" << i << "\t" << col
                              << "\t" << rational_to_string(q) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------- admissible ----

int run_admissible(const CommonOpts& opt, std::optional<std::uint32_t> m_flag, bool print) {
    RunConfig cfg = load_config(opt);
    Budget budget(cfg.budget);
    std::uint32_t m = m_flag ? *m_flag : cfg.m.value_or(1);
    CodingLevel lv = make_level(cfg.group, cfg.alphabet, cfg.n, budget);
    TransitionSystem ts = markovize(cfg.measure, lv, budget);
    SiteSet dom = ball(cfg.group, m, &budget);
    std::uint64_t count = 0;
    std::vector<std::vector<std::uint32_t>> printed;
    for_each_admissible(ts, dom, cfg.group, budget, [&](const std::vector<std::uint32_t>& v) {
        ++count;
        if (print) printed.push_back(v);
    });
    if (opt.json) {
        ordered_json j;
        j["n"] = cfg.n;
        j["m"] = m;
        j["count"] = count;
        if (print) {
            ordered_json arr = ordered_json::array();
            for (const auto& v : printed) arr.push_back(v);
            j["patterns"] = arr;
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "n\t" << cfg.n << "\n";
        std::cout << "m\t" << m << "\n";
        std::cout << "count\t" << count << "\n";
        if (print)
            for (const auto& v : printed) std::cout << "pattern\t" << csv(v) << "\n";
    }
    return 0;
}

// -------------------------------------------------------- verify-lemma ----

int run_verify_lemma(const CommonOpts& opt) {
    RunConfig cfg = load_config(opt);
    Budget budget(cfg.budget);
    CodingLevel lv = make_level(cfg.group, cfg.alphabet, cfg.n, budget);
    ReconstructionReport rep = check_reconstruction(cfg.measure, lv, budget);
    if (opt.json) {
        ordered_json j;
        j["level_n"] = rep.level_n;
        j["patterns_checked"] = rep.patterns_checked;
        j["violations"] = rep.violations;
        j["completed_radius"] = rep.completed_radius;
        j["budget_exceeded"] = rep.budget_exceeded;
        ordered_json samples = ordered_json::array();
        for (const auto& s : rep.samples)
            samples.push_back(ordered_json{{"f_index", s.f_index}, {"z", s.z}});
        j["violation_samples"] = samples;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "level_n\t" << rep.level_n << "\n";
        std::cout << "patterns_checked\t" << rep.patterns_checked << "\n";
        std::cout << "violations\t" << rep.violations << "\n";
        std::cout << "completed_radius\t" << rep.completed_radius << "\n";
        for (const auto& s : rep.samples)
            std::cout << "violation\t" << s.f_index << "\t" << csv(s.z) << "\n";
        if (rep.budget_exceeded) std::cout << "budget_exceeded\ttrue\n";
    }
    if (rep.budget_exceeded) return 3;
    return rep.violations == 0 ? 0 : 1;
}

// ------------------------------------------------------ oracle-compare ----

int run_oracle_compare(const CommonOpts& opt, std::optional<std::uint32_t> m_flag) {
    RunConfig cfg = load_config(opt);
    Budget budget(cfg.budget);
    std::uint32_t m = m_flag ? *m_flag : cfg.m.value_or(cfg.n);
    CodingLevel lv = make_level(cfg.group, cfg.alphabet, cfg.n, budget);
    OracleCompareReport rep = oracle_compare(cfg.measure, lv, m, budget);
    if (opt.json) {
        ordered_json j;
        j["n"] = cfg.n;
        j["m"] = rep.m;
        j["admissible_count"] = rep.admissible_count;
        j["image_count"] = rep.image_count.get_str();
        j["equal"] = rep.equal;
        ordered_json missing = ordered_json::array();
        for (const auto& z : rep.missing_samples) missing.push_back(z);
        j["missing_samples"] = missing;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "n\t" << cfg.n << "\n";
        std::cout << "m\t" << rep.m << "\n";
        std::cout << "admissible_count\t" << rep.admissible_count << "\n";
        std::cout << "image_count\t" << rep.image_count.get_str() << "\n";
        std::cout << "equal\t" << (rep.equal ? "true" : "false") << "\n";
        for (const auto& z : rep.missing_samples) std::cout << "missing\t" << csv(z) << "\n";
    }
    return rep.equal ? 0 : 1;
}

// --------------------------------------------------------- support-gap ----

int run_support_gap(const CommonOpts& opt, const std::string& code_path, std::uint32_t m_max,
                    std::uint32_t max_sites) {
    RunConfig cfg = load_config(opt);
    Budget budget(cfg.budget);
    GeneralCode code = parse_code_file(read_text_file(code_path), cfg.alphabet, cfg.group);
    GapReport rep = support_gap_search(cfg.measure, code, cfg.group, m_max, budget);
    std::optional<PreimageCheck> pre;
    if (rep.found)
        pre = verify_no_preimage(code, cfg.group, rep.domain, rep.witness, max_sites, budget);
    if (opt.json) {
        ordered_json j;
        j["gap"] = rep.found ? "found" : "none";
        j["m_examined"] = rep.m_examined;
        j["m"] = rep.m;
        j["admissible_count"] = rep.admissible_count;
        j["image_count"] = rep.image_count;
        if (rep.found) {
            std::vector<std::string> sites;
            for (std::size_t i = 0; i < rep.domain.size(); ++i)
                sites.push_back(word_to_string(rep.domain[i], cfg.group));
            j["sites"] = sites;
            j["witness"] = rep.witness;
            j["preimage_found"] = pre->preimage_found;
            j["preimage_candidates"] = pre->candidates;
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "gap\t" << (rep.found ? "found" : "none") << "\n";
        std::cout << "m_examined\t" << rep.m_examined << "\n";
        std::cout << "m\t" << rep.m << "\n";
        std::cout << "admissible_count\t" << rep.admissible_count << "\n";
        std::cout << "image_count\t" << rep.image_count << "\n";
        if (rep.found) {
            std::cout << "sites\t" << sites_csv(rep.domain, cfg.group) << "\n";
            std::cout << "witness\t" << csv(rep.witness) << "\n";
            std::cout << "preimage_found\t" << (pre->preimage_found ? "true" : "false") << "\n";
            std::cout << "preimage_candidates\t" << pre->candidates << "\n";
        }
    }
    return rep.found ? 1 : 0;
}

// ------------------------------------------------------------- entropy ----

int run_entropy(const CommonOpts& opt, const std::string& part_path,
                const std::string& cond_path) {
    RunConfig cfg = load_config(opt);
    Budget budget(cfg.budget);
    WindowPartition part =
        parse_partition_file(read_text_file(part_path), cfg.alphabet, cfg.group, budget);
    EntropyValue ev;
    if (cond_path.empty()) {
        ev = partition_entropy(cfg.measure, part, cfg.group, cfg.unit, budget);
    } else {
        WindowPartition cond =
            parse_partition_file(read_text_file(cond_path), cfg.alphabet, cfg.group, budget);
        ev = cond_entropy(cfg.measure, part, cond, cfg.group, cfg.unit, budget);
    }
    if (opt.json)
        std::cout << entropy_json(ev).dump(2) << "\n";
    else
        print_entropy_tsv(ev);
    return 0;
}

// --------------------------------------------------------------- f-seq ----

int run_f_seq(const CommonOpts& opt, std::optional<std::uint32_t> n_max_flag) {
    RunConfig cfg = load_config(opt);
    Budget budget(cfg.budget);
    std::uint32_t n_max = n_max_flag ? *n_max_flag : cfg.n;
    WindowPartition alpha = alpha_partition(cfg.alphabet, budget);
    FSequence seq = f_sequence(cfg.measure, alpha, cfg.group, n_max, cfg.unit, budget);
    if (opt.json) {
        ordered_json j;
        ordered_json rows = ordered_json::array();
        for (std::size_t m = 0; m < seq.values.size(); ++m) {
            ordered_json row = entropy_json(seq.values[m]);
            row["m"] = m;
            rows.push_back(row);
        }
        j["rows"] = rows;
        j["truncated"] = seq.truncated;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "m\tF_exact\tF_value\n";
        for (std::size_t m = 0; m < seq.values.size(); ++m)
            std::cout << m << "\t" << entropy_exact_str(seq.values[m]) << "\t"
                      << format_long_double(seq.values[m].value) << "\n";
        if (seq.truncated) std::cout << "truncated\ttrue\n";
    }
    return seq.truncated ? 3 : 0;
}

// ------------------------------------------------------- counterexample ----

int run_counterexample(std::uint32_t n_max, std::optional<std::uint64_t> budget_override,
                       bool json) {
    Budget budget(budget_override.value_or(kDefaultBudget));
    EntropyReport rep = counterexample_report(n_max, Unit::bits, budget);
    const std::string verdict = "liminf F(P_n) = 2 != 1 = f(alpha)";
    if (json) {
        ordered_json j;
        ordered_json rows = ordered_json::array();
        for (const auto& row : rep.rows)
            rows.push_back(ordered_json{{"n", row.n},
                                        {"H_Pn", entropy_exact_str(row.H_Pn)},
                                        {"H_join", entropy_exact_str(row.H_join)},
                                        {"H_cond", entropy_exact_str(row.H_cond)},
                                        {"F_Pn", entropy_exact_str(row.F_Pn)}});
        j["rows"] = rows;
        ordered_json fseq = ordered_json::array();
        for (std::size_t m = 0; m < rep.f_seq.values.size(); ++m)
            fseq.push_back(
                ordered_json{{"m", m}, {"F", entropy_exact_str(rep.f_seq.values[m])}});
        j["f_seq"] = fseq;
        j["f_seq_stable"] = rep.f_seq_stable;
        j["h"] = entropy_exact_str(rep.h);
        j["verdict"] = verdict;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "n\tH_Pn\tH_join\tH_cond\tF_Pn\n";
        for (const auto& row : rep.rows)
            std::cout << row.n << "\t" << entropy_exact_str(row.H_Pn) << "\t"
                      << entropy_exact_str(row.H_join) << "\t" << entropy_exact_str(row.H_cond)
                      << "\t" << entropy_exact_str(row.F_Pn) << "\n";
        for (std::size_t m = 0; m < rep.f_seq.values.size(); ++m)
            std::cout << "f_seq\t" << m << "\t" << entropy_exact_str(rep.f_seq.values[m]) << "\n";
        std::cout << "h\t" << entropy_exact_str(rep.h) << "\n";
        std::cout << "verdict\t" << verdict << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact computations on shift spaces over free groups and semigroups"};
    app.require_subcommand(1);

    // ball
    auto* c_ball = app.add_subcommand("ball", "enumerate a word-metric ball");
    std::uint32_t ball_rank = 1, ball_n = 0;
    std::string ball_mode = "group";
    CommonOpts ball_opt;
    c_ball->add_option("--rank", ball_rank, "number of generators")->required();
    c_ball->add_option("--mode", ball_mode, "group or semigroup")->required();
    c_ball->add_option("--n", ball_n, "radius")->required();
    add_common(c_ball, ball_opt, false);

    auto* c_validate = app.add_subcommand("validate-ts", "check transition-system invariants");
    CommonOpts validate_opt;
    add_common(c_validate, validate_opt);

    auto* c_markovize = app.add_subcommand("markovize", "transition system of the ball recoding");
    CommonOpts markovize_opt;
    add_common(c_markovize, markovize_opt);

    auto* c_admissible = app.add_subcommand("admissible", "count admissible recoded patterns");
    CommonOpts admissible_opt;
    std::optional<std::uint32_t> admissible_m;
    bool admissible_print = false;
    add_common(c_admissible, admissible_opt);
    c_admissible->add_option("--m", admissible_m, "pattern ball radius (default: config m or 1)");
    c_admissible->add_flag("--print", admissible_print, "also print every pattern");

    auto* c_verify = app.add_subcommand("verify-lemma", "readback check on admissible patterns");
    CommonOpts verify_opt;
    add_common(c_verify, verify_opt);

    auto* c_oracle = app.add_subcommand("oracle-compare",
                                        "admissible patterns versus actual recodings");
    CommonOpts oracle_opt;
    std::optional<std::uint32_t> oracle_m;
    add_common(c_oracle, oracle_opt);
    c_oracle->add_option("--m", oracle_m, "pattern ball radius (default: config m or n)");

    auto* c_gap = app.add_subcommand("support-gap", "search for admissible non-images of a code");
    CommonOpts gap_opt;
    std::string gap_code;
    std::uint32_t gap_m_max = 2, gap_max_sites = 6;
    add_common(c_gap, gap_opt);
    c_gap->add_option("--code", gap_code, "sliding-block code file (JSON)")->required();
    c_gap->add_option("--m-max", gap_m_max, "largest ball radius to search");
    c_gap->add_option("--max-sites", gap_max_sites, "preimage search size cap");

    auto* c_entropy = app.add_subcommand("entropy", "partition entropy under the measure");
    CommonOpts entropy_opt;
    std::string entropy_part, entropy_cond;
    add_common(c_entropy, entropy_opt);
    c_entropy->add_option("--partition", entropy_part, "partition file (JSON)")->required();
    c_entropy->add_option("--conditional", entropy_cond, "condition on a second partition");

    auto* c_fseq = app.add_subcommand("f-seq", "F along the ball joins of the one-site partition");
    CommonOpts fseq_opt;
    std::optional<std::uint32_t> fseq_n_max;
    add_common(c_fseq, fseq_opt);
    c_fseq->add_option("--n-max", fseq_n_max, "largest ball radius (default: config n)");

    auto* c_counter = app.add_subcommand("counterexample",
                                         "punctured-window table for the fair coin on the line");
    std::uint32_t counter_n_max = 8;
    std::optional<std::uint64_t> counter_budget;
    bool counter_json = false;
    c_counter->add_option("--n-max", counter_n_max, "largest window parameter");
    c_counter->add_option("--budget", counter_budget, "override the enumeration budget");
    c_counter->add_flag("--json", counter_json, "structured JSON output instead of TSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (c_ball->parsed())
            return run_ball(ball_rank, ball_mode, ball_n, ball_opt.budget_override, ball_opt.json);
        if (c_validate->parsed()) return run_validate_ts(validate_opt);
        if (c_markovize->parsed()) return run_markovize(markovize_opt);
        if (c_admissible->parsed())
            return run_admissible(admissible_opt, admissible_m, admissible_print);
        if (c_verify->parsed()) return run_verify_lemma(verify_opt);
        if (c_oracle->parsed()) return run_oracle_compare(oracle_opt, oracle_m);
        if (c_gap->parsed()) return run_support_gap(gap_opt, gap_code, gap_m_max, gap_max_sites);
        if (c_entropy->parsed()) return run_entropy(entropy_opt, entropy_part, entropy_cond);
        if (c_fseq->parsed()) return run_f_seq(fseq_opt, fseq_n_max);
        if (c_counter->parsed())
            return run_counterexample(counter_n_max, counter_budget, counter_json);
    } catch (const budget_exceeded_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const invalid_input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
