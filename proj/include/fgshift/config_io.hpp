#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fgshift/budget.hpp"
#include "fgshift/entropy.hpp"
#include "fgshift/errors.hpp"
#include "fgshift/group.hpp"
#include "fgshift/measure.hpp"
#include "fgshift/partition.hpp"
#include "fgshift/rational.hpp"
#include "fgshift/support_gap.hpp"

namespace fgshift {

struct RunConfig {
    GroupSpec group;
    Alphabet alphabet;
    MeasureSpec measure;
    std::uint32_t n = 0;
    std::optional<std::uint32_t> m;
    std::uint64_t budget = kDefaultBudget;
    Unit unit = Unit::bits;
};

/// Structural validation only: bernoulli specs are fully validated here;
/// tree-markov property checks stay observable through validate-ts.
inline void validate_measure_shape(const RunConfig& cfg) {
    if (cfg.measure.kind == MeasureSpec::Kind::bernoulli) validate_measure(cfg.measure, cfg.group);
}

namespace detail {

inline void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (item.key() == a) ok = true;
        if (!ok) throw invalid_input_error("unknown key '" + item.key() + "' in " + where);
    }
}

inline const nlohmann::json& require(const nlohmann::json& j, const char* key,
                                     const std::string& where) {
    if (!j.is_object() || !j.contains(key))
        throw invalid_input_error(where + " is missing '" + key + "'");
    return j.at(key);
}

inline std::uint64_t uint_from_json(const nlohmann::json& j, const std::string& what,
                                    std::uint64_t max) {
    if (!j.is_number_unsigned())
        throw invalid_input_error(what + " must be a nonnegative integer");
    std::uint64_t v = j.get<std::uint64_t>();
    if (v > max) throw invalid_input_error(what + " is too large");
    return v;
}

inline Rational rational_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_string()) throw invalid_input_error(what + " must be a rational string like \"1/2\"");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const invalid_input_error& e) {
        throw invalid_input_error(what + ": " + e.what());
    }
}

inline std::vector<Rational> rational_vector(const nlohmann::json& j, std::size_t len,
                                             const std::string& what) {
    if (!j.is_array() || j.size() != len)
        throw invalid_input_error(what + " must be an array of " + std::to_string(len) +
                                  " rationals");
    std::vector<Rational> out;
    out.reserve(len);
    for (std::size_t i = 0; i < len; ++i)
        out.push_back(rational_from_json(j[i], what + "[" + std::to_string(i) + "]"));
    return out;
}

} // namespace detail

inline RunConfig parse_run_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw invalid_input_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw invalid_input_error("config must be a JSON object");
    detail::require_keys(j, {"group", "alphabet", "measure", "n", "m", "budget", "unit"},
                         "config");

    RunConfig cfg;
    const auto& jg = detail::require(j, "group", "config");
    if (!jg.is_object()) throw invalid_input_error("'group' must be an object");
    detail::require_keys(jg, {"rank", "mode"}, "group");
    cfg.group.rank =
        static_cast<std::uint32_t>(detail::uint_from_json(detail::require(jg, "rank", "group"),
                                                          "group.rank", 0xFFFFFFFFull));
    const auto& jm = detail::require(jg, "mode", "group");
    if (!jm.is_string()) throw invalid_input_error("group.mode must be a string");
    std::string mode = jm.get<std::string>();
    if (mode == "group")
        cfg.group.mode = GroupMode::group;
    else if (mode == "semigroup")
        cfg.group.mode = GroupMode::semigroup;
    else
        throw invalid_input_error("group.mode must be \"group\" or \"semigroup\"");
    validate_spec(cfg.group);

    cfg.alphabet.size = static_cast<std::uint32_t>(
        detail::uint_from_json(detail::require(j, "alphabet", "config"), "alphabet",
                               0xFFFFFFFFull));
    validate_alphabet(cfg.alphabet);

    if (j.contains("n"))
        cfg.n = static_cast<std::uint32_t>(
            detail::uint_from_json(j.at("n"), "n", 0xFFFFFFFFull));
    if (j.contains("m"))
        cfg.m = static_cast<std::uint32_t>(
            detail::uint_from_json(j.at("m"), "m", 0xFFFFFFFFull));
    if (j.contains("budget"))
        cfg.budget = detail::uint_from_json(j.at("budget"), "budget", ~0ull);
    if (cfg.budget == 0) throw invalid_input_error("budget must be at least 1");
    if (j.contains("unit")) {
        const auto& ju = j.at("unit");
        if (!ju.is_string()) throw invalid_input_error("unit must be a string");
        std::string unit = ju.get<std::string>();
        if (unit == "bits")
            cfg.unit = Unit::bits;
        else if (unit == "nats")
            cfg.unit = Unit::nats;
        else
            throw invalid_input_error("unit must be \"bits\" or \"nats\"");
    }

    const auto& jmu = detail::require(j, "measure", "config");
    if (!jmu.is_object()) throw invalid_input_error("'measure' must be an object");
    const auto& jt = detail::require(jmu, "type", "measure");
    if (!jt.is_string()) throw invalid_input_error("measure.type must be a string");
    std::string type = jt.get<std::string>();
    if (type == "bernoulli") {
        detail::require_keys(jmu, {"type", "p"}, "measure");
        cfg.measure = MeasureSpec::bernoulli(detail::rational_vector(
            detail::require(jmu, "p", "measure"), cfg.alphabet.size, "measure.p"));
    } else if (type == "tree-markov") {
        detail::require_keys(jmu, {"type", "pi", "P"}, "measure");
        std::vector<Rational> pi = detail::rational_vector(detail::require(jmu, "pi", "measure"),
                                                           cfg.alphabet.size, "measure.pi");
        const auto& jp = detail::require(jmu, "P", "measure");
        if (!jp.is_object()) throw invalid_input_error("measure.P must be an object");
        std::vector<std::string> names;
        for (Letter t = 0; t < letter_count(cfg.group); ++t)
            names.emplace_back(1, letter_name(t, cfg.group));
        for (const auto& item : jp.items()) {
            bool ok = false;
            for (const auto& nm : names)
                if (item.key() == nm) ok = true;
            if (!ok)
                throw invalid_input_error("unknown letter '" + item.key() + "' in measure.P");
        }
        std::vector<std::vector<std::vector<Rational>>> mats;
        for (Letter t = 0; t < letter_count(cfg.group); ++t) {
            const auto& jmat = detail::require(jp, names[t].c_str(), "measure.P");
            if (!jmat.is_array() || jmat.size() != cfg.alphabet.size)
                throw invalid_input_error("measure.P." + names[t] + " must be a " +
                                          std::to_string(cfg.alphabet.size) + "-row matrix");
            std::vector<std::vector<Rational>> mat;
            for (std::size_t i = 0; i < jmat.size(); ++i)
                mat.push_back(detail::rational_vector(jmat[i], cfg.alphabet.size,
                                                      "measure.P." + names[t] + " row " +
                                                          std::to_string(i)));
            mats.push_back(std::move(mat));
        }
        cfg.measure = MeasureSpec::tree_markov(ts_from_dense(std::move(pi), mats));
    } else {
        throw invalid_input_error("measure.type must be \"bernoulli\" or \"tree-markov\"");
    }
    validate_measure_shape(cfg);
    return cfg;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline RunConfig load_run_config(const std::string& path) {
    return parse_run_config(read_text_file(path));
}

namespace detail {

inline std::uint32_t decimal_u32(const std::string& s, const std::string& what, std::uint64_t max) {
    std::uint64_t v = 0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || s.empty())
        throw invalid_input_error(what + " must be a decimal integer");
    if (v > max) throw invalid_input_error(what + " out of range");
    return static_cast<std::uint32_t>(v);
}

// parse a window list (distinct words, given order kept for digit keys)
inline std::vector<Word> window_words(const nlohmann::json& j, const GroupSpec& spec,
                                      const std::string& where) {
    if (!j.is_array() || j.empty())
        throw invalid_input_error(where + ".window must be a nonempty array of words");
    std::vector<Word> words;
    for (const auto& item : j) {
        if (!item.is_string()) throw invalid_input_error(where + ".window entries must be words");
        words.push_back(parse_word(item.get<std::string>(), spec));
    }
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t k = i + 1; k < words.size(); ++k)
            if (words[i] == words[k])
                throw invalid_input_error(where + ".window lists a site twice");
    return words;
}

// canonical position -> listed position
inline std::vector<std::size_t> listed_positions(const std::vector<Word>& words,
                                                 const SiteSet& win) {
    std::vector<std::size_t> listed(win.size());
    for (std::size_t c = 0; c < win.size(); ++c)
        for (std::size_t i = 0; i < words.size(); ++i)
            if (words[i] == win[c]) listed[c] = i;
    return listed;
}

} // namespace detail

/// Code file: {"window": [...], "target_size": M, "map": [[key, value], ...]}
/// where key spells the source values on the window in listed order (digit
/// characters, so the source alphabet must have at most 10 symbols) and
/// value is the target symbol in decimal.
inline GeneralCode parse_code_file(const std::string& text, const Alphabet& source,
                                   const GroupSpec& spec) {
    if (source.size > 10)
        throw invalid_input_error("code files support alphabets of at most 10 symbols");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw invalid_input_error(std::string("code file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw invalid_input_error("code file must be a JSON object");
    detail::require_keys(j, {"window", "target_size", "map"}, "code");

    std::vector<Word> words =
        detail::window_words(detail::require(j, "window", "code"), spec, "code");
    SiteSet win{std::vector<Word>(words)};
    std::vector<std::size_t> listed = detail::listed_positions(words, win);
    const std::size_t w = words.size();
    const std::uint32_t K = source.size;

    std::uint32_t target = static_cast<std::uint32_t>(detail::uint_from_json(
        detail::require(j, "target_size", "code"), "code.target_size", 0xFFFFFFFFull));
    if (target == 0) throw invalid_input_error("code.target_size must be positive");

    mpz_class total_z = pattern_space_size(w, Alphabet{K});
    if (!total_z.fits_ulong_p() || total_z.get_ui() > (1ull << 26))
        throw invalid_input_error("code table is too large");
    std::uint64_t total = total_z.get_ui();

    const auto& jmap = detail::require(j, "map", "code");
    if (!jmap.is_array() || jmap.size() != total)
        throw invalid_input_error("code.map must list all " + std::to_string(total) +
                                  " window patterns");
    std::vector<std::uint32_t> table(total, 0);
    std::vector<bool> seen(total, false);
    for (const auto& entry : jmap) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() ||
            !entry[1].is_string())
            throw invalid_input_error("code.map entries must be [key, value] string pairs");
        std::string key = entry[0].get<std::string>();
        if (key.size() != w)
            throw invalid_input_error("code.map key '" + key + "' has the wrong length");
        std::uint64_t idx = 0;
        for (std::size_t c = 0; c < w; ++c) {
            char ch = key[listed[c]];
            if (ch < '0' || static_cast<std::uint32_t>(ch - '0') >= K)
                throw invalid_input_error("code.map key '" + key + "' has a bad digit");
            idx = idx * K + static_cast<std::uint32_t>(ch - '0');
        }
        if (seen[idx]) throw invalid_input_error("code.map key '" + key + "' appears twice");
        seen[idx] = true;
        table[idx] = detail::decimal_u32(entry[1].get<std::string>(), "code.map value", target - 1);
    }
    GeneralCode code{win, source, Alphabet{target}, std::move(table)};
    validate_code(code);
    return code;
}

/// Partition file: {"window": [...], "label_count": c, "labels": [...]} with
/// labels indexed by the window pattern spelled in listed order.
inline WindowPartition parse_partition_file(const std::string& text, const Alphabet& alphabet,
                                            const GroupSpec& spec, Budget& budget) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw invalid_input_error(std::string("partition file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw invalid_input_error("partition file must be a JSON object");
    detail::require_keys(j, {"window", "label_count", "labels"}, "partition");

    std::vector<Word> words =
        detail::window_words(detail::require(j, "window", "partition"), spec, "partition");
    SiteSet win{std::vector<Word>(words)};
    std::vector<std::size_t> listed = detail::listed_positions(words, win);
    const std::size_t w = words.size();
    const std::uint32_t K = alphabet.size;

    std::uint64_t total = charge_pattern_space(w, Alphabet{K}, budget);
    if (total > 0xFFFFFFFFull) throw budget_exceeded_error(budget.limit());
    std::uint32_t label_count = static_cast<std::uint32_t>(detail::uint_from_json(
        detail::require(j, "label_count", "partition"), "partition.label_count", 0xFFFFFFFFull));

    const auto& jl = detail::require(j, "labels", "partition");
    if (!jl.is_array() || jl.size() != total)
        throw invalid_input_error("partition.labels must list all " + std::to_string(total) +
                                  " window patterns");
    // listed-order index for each canonical index: walk canonical patterns
    // and refold the digits in listed positions
    WindowPartition part;
    part.alphabet = alphabet;
    part.window = win;
    part.label_count = label_count;
    part.labels.resize(total);
    std::vector<std::size_t> canon_at(w, 0); // canonical position sitting at each listed slot
    for (std::size_t c = 0; c < w; ++c) canon_at[listed[c]] = c;
    std::vector<std::uint32_t> digit(w, 0);
    for (std::uint64_t idx = 0;; ++idx) {
        std::uint64_t lidx = 0;
        for (std::size_t li = 0; li < w; ++li) lidx = lidx * K + digit[canon_at[li]];
        const auto& lab = jl[lidx];
        part.labels[idx] = static_cast<std::uint32_t>(detail::uint_from_json(
            lab, "partition.labels[" + std::to_string(lidx) + "]", 0xFFFFFFFFull));
        std::size_t k = w;
        while (k > 0 && digit[k - 1] + 1 == K) digit[--k] = 0;
        if (k == 0) break;
        ++digit[k - 1];
    }
    validate_partition(part);
    return part;
}

} // namespace fgshift
