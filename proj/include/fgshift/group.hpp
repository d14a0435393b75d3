#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fgshift/errors.hpp"

namespace fgshift {

enum class GroupMode : std::uint8_t { group, semigroup };

/// A finitely generated free group or free semigroup, identified by its rank.
/// Generators are encoded as small integer letters:
///   group mode:      letter 2*i is s_{i+1}, letter 2*i+1 is s_{i+1}^{-1}
///   semigroup mode:  letter i is s_{i+1}
/// Letter order is the canonical generator order s1 < s1^{-1} < s2 < ... used
/// for all shortlex enumeration.
struct GroupSpec {
    std::uint32_t rank = 1;
    GroupMode mode = GroupMode::group;

    friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

using Letter = std::uint8_t;

inline void validate_spec(const GroupSpec& spec) {
    if (spec.rank < 1) throw invalid_input_error("group rank must be >= 1");
    if (spec.rank > 25) throw invalid_input_error("group rank too large (max 25)");
}

inline std::uint32_t letter_count(const GroupSpec& spec) {
    return spec.mode == GroupMode::group ? 2 * spec.rank : spec.rank;
}

inline std::uint32_t generator_of(Letter t, const GroupSpec& spec) {
    return spec.mode == GroupMode::group ? t / 2u : t;
}

inline bool is_inverse_letter(Letter t, const GroupSpec& spec) {
    return spec.mode == GroupMode::group && (t & 1u);
}

inline Letter inverse_letter(Letter t, const GroupSpec& spec) {
    if (spec.mode != GroupMode::group)
        throw invalid_input_error("semigroup letters have no inverses");
    return static_cast<Letter>(t ^ 1u);
}

/// Letter for the positive generator s_{i+1}, i in [0, rank).
inline Letter positive_generator(std::uint32_t i, const GroupSpec& spec) {
    return static_cast<Letter>(spec.mode == GroupMode::group ? 2 * i : i);
}

/// A reduced word t_1 t_2 ... t_m; letters[0] is the leftmost letter t_1.
/// The empty word is the identity e. In semigroup mode every letter sequence
/// is reduced.
struct Word {
    std::vector<Letter> letters;

    std::size_t length() const noexcept { return letters.size(); }
    bool empty() const noexcept { return letters.empty(); }

    friend bool operator==(const Word&, const Word&) = default;
};

/// Shortlex: by length first, then lexicographically by letter code.
inline bool shortlex_less(const Word& a, const Word& b) {
    if (a.letters.size() != b.letters.size()) return a.letters.size() < b.letters.size();
    return a.letters < b.letters;
}

struct WordHash {
    std::size_t operator()(const Word& w) const noexcept {
        std::string_view bytes(reinterpret_cast<const char*>(w.letters.data()),
                               w.letters.size());
        return std::hash<std::string_view>{}(bytes);
    }
};

inline void check_letter(Letter t, const GroupSpec& spec) {
    if (t >= letter_count(spec))
        throw invalid_input_error("generator index out of range for the given rank");
}

/// Free reduction of a raw letter sequence. In semigroup mode this only
/// validates the letters and returns the input unchanged.
inline Word reduce(const std::vector<Letter>& raw, const GroupSpec& spec) {
    Word out;
    out.letters.reserve(raw.size());
    for (Letter t : raw) {
        check_letter(t, spec);
        if (spec.mode == GroupMode::group && !out.letters.empty() &&
            out.letters.back() == (t ^ 1u)) {
            out.letters.pop_back();
        } else {
            out.letters.push_back(t);
        }
    }
    return out;
}

/// t * w for a single letter t, with cancellation at the seam.
inline Word left_mul(Letter t, const Word& w, const GroupSpec& spec) {
    check_letter(t, spec);
    if (spec.mode == GroupMode::group && !w.letters.empty() && w.letters.front() == (t ^ 1u)) {
        Word out;
        out.letters.assign(w.letters.begin() + 1, w.letters.end());
        return out;
    }
    Word out;
    out.letters.reserve(w.letters.size() + 1);
    out.letters.push_back(t);
    out.letters.insert(out.letters.end(), w.letters.begin(), w.letters.end());
    return out;
}

/// u * v with cancellation at the seam. Inputs must be reduced.
inline Word mul(const Word& u, const Word& v, const GroupSpec& spec) {
    std::size_t i = u.letters.size(), j = 0;
    if (spec.mode == GroupMode::group) {
        while (i > 0 && j < v.letters.size() && u.letters[i - 1] == (v.letters[j] ^ 1u)) {
            --i;
            ++j;
        }
    }
    Word out;
    out.letters.reserve(i + v.letters.size() - j);
    out.letters.insert(out.letters.end(), u.letters.begin(), u.letters.begin() + i);
    out.letters.insert(out.letters.end(), v.letters.begin() + j, v.letters.end());
    return out;
}

inline Word inverse(const Word& w, const GroupSpec& spec) {
    if (spec.mode != GroupMode::group)
        throw invalid_input_error("semigroup words have no inverses");
    Word out;
    out.letters.reserve(w.letters.size());
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
        out.letters.push_back(static_cast<Letter>(*it ^ 1u));
    return out;
}

// Generator spelling for text I/O: s1..s25 are a,b,c,d,f,... ('e' is skipped,
// it always denotes the identity); uppercase is the inverse.
inline constexpr char kGeneratorChars[] = "abcdfghijklmnopqrstuvwxyz";

inline char letter_name(Letter t, const GroupSpec& spec) {
    std::uint32_t gen = generator_of(t, spec);
    if (gen >= 25) throw invalid_input_error("no letter name for generators beyond rank 25");
    char c = kGeneratorChars[gen];
    return is_inverse_letter(t, spec) ? static_cast<char>(c - 'a' + 'A') : c;
}

inline std::string word_to_string(const Word& w, const GroupSpec& spec) {
    if (w.empty()) return "e";
    std::string s;
    s.reserve(w.letters.size());
    for (Letter t : w.letters) s.push_back(letter_name(t, spec));
    return s;
}

/// Parse a word written with the spelling above; "e" is the identity. The
/// result is reduced.
inline Word parse_word(const std::string& text, const GroupSpec& spec) {
    if (text == "e") return Word{};
    if (text.empty()) throw invalid_input_error("empty word string (use \"e\" for the identity)");
    std::vector<Letter> raw;
    raw.reserve(text.size());
    for (char c : text) {
        bool inv = (c >= 'A' && c <= 'Z');
        char low = inv ? static_cast<char>(c - 'A' + 'a') : c;
        const std::string_view names(kGeneratorChars);
        auto pos = names.find(low);
        if (pos == std::string_view::npos || low == 'e')
            throw invalid_input_error(std::string("invalid letter '") + c + "' in word \"" + text + "\"");
        auto gen = static_cast<std::uint32_t>(pos);
        if (gen >= spec.rank)
            throw invalid_input_error(std::string("letter '") + c + "' exceeds rank " +
                                      std::to_string(spec.rank));
        if (inv && spec.mode != GroupMode::group)
            throw invalid_input_error("inverse letters are not allowed in semigroup mode");
        raw.push_back(inv ? static_cast<Letter>(2 * gen + 1) : positive_generator(gen, spec));
    }
    return reduce(raw, spec);
}

} // namespace fgshift
