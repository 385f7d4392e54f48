#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "diffprobe/detail/common.hpp"

namespace diffprobe::wordle {

struct WordFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GuessRejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GameOverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A five-letter word, uppercase A-Z. The only way to construct one is
/// through parse()/must(), so a Word is valid by construction.
class Word {
  public:
    static constexpr int kLength = 5;

    static std::optional<Word> parse(std::string_view text) {
        std::string s = detail::to_upper(detail::trim(text));
        if (s.size() != kLength) return std::nullopt;
        Word w;
        for (int i = 0; i < kLength; ++i) {
            if (s[i] < 'A' || s[i] > 'Z') return std::nullopt;
            w.letters_[i] = s[i];
        }
        return w;
    }

    static Word must(std::string_view text) {
        auto w = parse(text);
        if (!w) throw WordFormatError("not a five-letter A-Z word: '" + std::string(text) + "'");
        return *w;
    }

    char operator[](int i) const { return letters_[static_cast<size_t>(i)]; }

    std::string str() const { return std::string(letters_.begin(), letters_.end()); }

    /// "[A, P, P, L, E]" — the list form used whenever a word is shown to an LLM.
    std::string bracketed() const {
        std::string out = "[";
        for (int i = 0; i < kLength; ++i) {
            out += letters_[static_cast<size_t>(i)];
            if (i + 1 < kLength) out += ", ";
        }
        out += "]";
        return out;
    }

    auto operator<=>(const Word&) const = default;

  private:
    std::array<char, kLength> letters_{};
};

enum class Verdict : std::uint8_t { Gray = 0, Yellow = 1, Green = 2 };

/// Prompt-facing verdict terms. Deliberately none of these is a five-letter
/// token, so state descriptions stay free of bare word-shaped strings.
inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Green: return "correct";
        case Verdict::Yellow: return "present";
        default: return "absent";
    }
}

/// Per-letter verdicts for one guess.
struct FeedbackPattern {
    std::array<Verdict, Word::kLength> cells{};

    bool all_green() const {
        return std::all_of(cells.begin(), cells.end(),
                           [](Verdict v) { return v == Verdict::Green; });
    }

    /// Base-3 encoding, 0..242. Used as a compact partition key by the solver.
    std::uint8_t code() const {
        int c = 0;
        for (Verdict v : cells) c = c * 3 + static_cast<int>(v);
        return static_cast<std::uint8_t>(c);
    }

    static FeedbackPattern from_code(std::uint8_t code) {
        FeedbackPattern fb;
        int c = code;
        for (int i = Word::kLength - 1; i >= 0; --i) {
            fb.cells[static_cast<size_t>(i)] = static_cast<Verdict>(c % 3);
            c /= 3;
        }
        return fb;
    }

    /// Compact form for logs and tests: G=green, Y=yellow, X=gray.
    std::string str() const {
        std::string out;
        for (Verdict v : cells)
            out += v == Verdict::Green ? 'G' : (v == Verdict::Yellow ? 'Y' : 'X');
        return out;
    }

    static FeedbackPattern from_str(std::string_view s) {
        if (s.size() != Word::kLength) throw WordFormatError("bad feedback string");
        FeedbackPattern fb;
        for (int i = 0; i < Word::kLength; ++i) {
            switch (s[static_cast<size_t>(i)]) {
                case 'G': fb.cells[static_cast<size_t>(i)] = Verdict::Green; break;
                case 'Y': fb.cells[static_cast<size_t>(i)] = Verdict::Yellow; break;
                case 'X': fb.cells[static_cast<size_t>(i)] = Verdict::Gray; break;
                default: throw WordFormatError("bad feedback char");
            }
        }
        return fb;
    }

    auto operator<=>(const FeedbackPattern&) const = default;
};

/// Two-pass scoring: greens consume answer letters first, then yellows are
/// assigned left to right while unconsumed copies of the letter remain.
/// Matches the deployed NYT behavior for duplicate letters.
inline FeedbackPattern score_guess(const Word& answer, const Word& guess) {
    std::array<std::uint8_t, 26> remaining{};
    FeedbackPattern fb;  // all gray
    for (int i = 0; i < Word::kLength; ++i) {
        if (guess[i] == answer[i])
            fb.cells[static_cast<size_t>(i)] = Verdict::Green;
        else
            ++remaining[static_cast<size_t>(answer[i] - 'A')];
    }
    for (int i = 0; i < Word::kLength; ++i) {
        if (fb.cells[static_cast<size_t>(i)] == Verdict::Green) continue;
        auto& cnt = remaining[static_cast<size_t>(guess[i] - 'A')];
        if (cnt > 0) {
            fb.cells[static_cast<size_t>(i)] = Verdict::Yellow;
            --cnt;
        }
    }
    return fb;
}

/// score_guess without materializing the pattern struct; used for bulk table builds.
inline std::uint8_t score_code(const Word& answer, const Word& guess) {
    return score_guess(answer, guess).code();
}

/// Allowed-guess and answer lists. answers is always a subset of allowed.
class WordList {
  public:
    WordList(std::vector<Word> allowed, std::vector<Word> answers)
        : allowed_(std::move(allowed)), answers_(std::move(answers)) {
        normalize(allowed_);
        normalize(answers_);
        if (allowed_.empty() || answers_.empty())
            throw FormatError("word lists must be non-empty");
        for (const Word& w : answers_)
            if (!contains(allowed_, w))
                throw FormatError("answer word not in allowed list: " + w.str());
        hash_ = compute_hash();
    }

    static WordList from_single(std::vector<Word> words) {
        auto copy = words;
        return WordList(std::move(words), std::move(copy));
    }

    const std::vector<Word>& allowed() const { return allowed_; }
    const std::vector<Word>& answers() const { return answers_; }

    bool is_allowed(const Word& w) const { return contains(allowed_, w); }
    bool is_answer(const Word& w) const { return contains(answers_, w); }

    /// Stable content hash; keys the solver's per-list caches and run manifests.
    std::uint64_t hash() const { return hash_; }

  private:
    static void normalize(std::vector<Word>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    static bool contains(const std::vector<Word>& v, const Word& w) {
        return std::binary_search(v.begin(), v.end(), w);
    }
    std::uint64_t compute_hash() const {
        std::uint64_t h = detail::kFnvOffset;
        for (const Word& w : allowed_) h = detail::fnv1a64(w.str(), h);
        h = detail::fnv1a64("|", h);
        for (const Word& w : answers_) h = detail::fnv1a64(w.str(), h);
        return h;
    }

    std::vector<Word> allowed_;
    std::vector<Word> answers_;
    std::uint64_t hash_ = 0;
};

namespace detail_io {

inline std::vector<Word> read_word_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open word list: " + path);
    std::vector<Word> words;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = diffprobe::detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto w = Word::parse(t);
        if (!w)
            throw FormatError(path + ":" + std::to_string(lineno) +
                              ": not a five-letter A-Z word: '" + t + "'");
        words.push_back(*w);
    }
    return words;
}

}  // namespace detail_io

/// Loads word lists from text files (one word per line, '#' comments ignored,
/// case-insensitive). With no answers file, every allowed word is an answer.
inline WordList load_word_list(const std::string& allowed_path,
                               const std::string& answers_path = "") {
    std::vector<Word> allowed = detail_io::read_word_file(allowed_path);
    std::vector<Word> answers =
        answers_path.empty() ? allowed : detail_io::read_word_file(answers_path);
    try {
        return WordList(std::move(allowed), std::move(answers));
    } catch (const FormatError& e) {
        throw FormatError(std::string(e.what()) + " (allowed: " + allowed_path +
                          ", answers: " + (answers_path.empty() ? allowed_path : answers_path) +
                          ")");
    }
}

enum class PuzzleStatus { InProgress, Solved, Failed };

/// One puzzle in play. Value type: submit_guess returns the successor state.
struct PuzzleState {
    Word answer;
    std::vector<std::pair<Word, FeedbackPattern>> history;
    int guess_cap = 12;
    PuzzleStatus status = PuzzleStatus::InProgress;

    PuzzleState(Word answer_, int cap = 12) : answer(answer_), guess_cap(cap) {
        if (cap < 1) throw std::invalid_argument("guess cap must be positive");
    }

    int guesses_used() const { return static_cast<int>(history.size()); }
};

/// Scores `guess` against the puzzle and advances the state.
/// strict=true additionally rejects guesses outside the allowed list.
inline std::pair<PuzzleState, FeedbackPattern> submit_guess(const PuzzleState& state,
                                                            std::string_view guess_text,
                                                            const WordList& list,
                                                            bool strict = false) {
    if (state.status != PuzzleStatus::InProgress)
        throw GameOverError("puzzle is not in progress");
    auto guess = Word::parse(guess_text);
    if (!guess)
        throw GuessRejected("guess must be exactly five letters A-Z: '" +
                            std::string(guess_text) + "'");
    if (strict && !list.is_allowed(*guess))
        throw GuessRejected("guess not in allowed list: " + guess->str());

    PuzzleState next = state;
    FeedbackPattern fb = score_guess(state.answer, *guess);
    next.history.emplace_back(*guess, fb);
    if (fb.all_green())
        next.status = PuzzleStatus::Solved;
    else if (next.guesses_used() >= next.guess_cap)
        next.status = PuzzleStatus::Failed;
    return {std::move(next), fb};
}

}  // namespace diffprobe::wordle
