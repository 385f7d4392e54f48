#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "diffprobe/wordle.hpp"

namespace diffprobe::wordle {

struct EmptyResult : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Words still consistent with the feedback seen so far. Kept sorted.
struct CandidateSet {
    std::vector<Word> candidates;

    bool empty() const { return candidates.empty(); }
    size_t size() const { return candidates.size(); }
    bool contains(const Word& w) const {
        return std::binary_search(candidates.begin(), candidates.end(), w);
    }
};

/// The full answer list as the starting candidate set.
inline CandidateSet initial_candidates(const WordList& list) {
    return CandidateSet{list.answers()};
}

/// Keeps exactly the candidates whose feedback for `guess` equals `observed`.
inline CandidateSet filter_candidates(const CandidateSet& set, const Word& guess,
                                      const FeedbackPattern& observed) {
    CandidateSet out;
    for (const Word& c : set.candidates)
        if (score_guess(c, guess) == observed) out.candidates.push_back(c);
    if (out.empty())
        throw EmptyResult("no candidate matches feedback " + observed.str() + " for guess " +
                          guess.str());
    return out;
}

/// Shannon entropy (bits) of the feedback partition `guess` induces on `set`.
inline double entropy_of_guess(const Word& guess, const CandidateSet& set) {
    if (set.empty()) throw EmptyResult("entropy of empty candidate set");
    std::array<int, 243> counts{};
    for (const Word& c : set.candidates) ++counts[score_code(c, guess)];
    const double n = static_cast<double>(set.size());
    double h = 0.0;
    for (int cnt : counts) {
        if (cnt == 0) continue;
        double p = static_cast<double>(cnt) / n;
        h -= p * std::log2(p);
    }
    return h;
}

// With this many candidates or fewer, restrict the guess pool to the
// candidates themselves; above it, probe the whole allowed list.
inline constexpr size_t kCandidatePoolThreshold = 3;

/// Precomputed feedback codes for one word list plus memoized opening guess.
/// Shared per list-hash so repeated solves (benchmarks, agents) pay the
/// table build once. The table is allowed x answers, one byte per pair.
class SolverContext {
  public:
    explicit SolverContext(WordList list) : list_(std::move(list)) {}

    /// Process-wide write-once cache keyed by word-list hash.
    static std::shared_ptr<SolverContext> shared_for(const WordList& list) {
        static std::mutex mu;
        static std::map<std::uint64_t, std::shared_ptr<SolverContext>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(list.hash());
        if (it != cache.end()) return it->second;
        auto ctx = std::make_shared<SolverContext>(list);
        cache.emplace(list.hash(), ctx);
        return ctx;
    }

    const WordList& list() const { return list_; }

    std::uint8_t code(size_t allowed_idx, size_t answer_idx) const {
        ensure_table();
        return table_[allowed_idx * list_.answers().size() + answer_idx];
    }

    const std::uint8_t* row(size_t allowed_idx) const {
        ensure_table();
        return table_.data() + allowed_idx * list_.answers().size();
    }

    std::optional<size_t> answer_index(const Word& w) const {
        const auto& v = list_.answers();
        auto it = std::lower_bound(v.begin(), v.end(), w);
        if (it == v.end() || *it != w) return std::nullopt;
        return static_cast<size_t>(it - v.begin());
    }

    Word opening_guess() const {
        std::call_once(opener_once_, [this] { opener_ = compute_opening_guess(); });
        return *opener_;
    }

  private:
    void ensure_table() const {
        std::call_once(table_once_, [this] {
            const auto& allowed = list_.allowed();
            const auto& answers = list_.answers();
            table_.resize(allowed.size() * answers.size());
            size_t k = 0;
            for (const Word& g : allowed)
                for (const Word& a : answers) table_[k++] = score_code(a, g);
        });
    }

    Word compute_opening_guess() const;

    WordList list_;
    mutable std::once_flag table_once_;
    mutable std::vector<std::uint8_t> table_;
    mutable std::once_flag opener_once_;
    mutable std::optional<Word> opener_;
};

namespace detail_solver {

// Entropy over answer-index candidates using a precomputed table row.
inline double entropy_from_row(const std::uint8_t* row, const std::vector<size_t>& cand) {
    std::array<int, 243> counts{};
    for (size_t idx : cand) ++counts[row[idx]];
    const double n = static_cast<double>(cand.size());
    double h = 0.0;
    for (int cnt : counts) {
        if (cnt == 0) continue;
        double p = static_cast<double>(cnt) / n;
        h -= p * std::log2(p);
    }
    return h;
}

// Argmax of entropy over `pool`, ties broken candidate-first then by the
// lexicographic iteration order (pool is sorted, first hit wins).
inline Word argmax_entropy(const SolverContext& ctx, const std::vector<Word>& pool,
                           const std::vector<size_t>& cand_indices) {
    const auto& allowed = ctx.list().allowed();
    double best_h = -1.0;
    bool best_is_cand = false;
    size_t best = 0;
    for (size_t gi = 0; gi < pool.size(); ++gi) {
        // pool is either the whole allowed list or a subset of it; map to row index
        size_t row_idx;
        if (pool.size() == allowed.size()) {
            row_idx = gi;
        } else {
            auto it = std::lower_bound(allowed.begin(), allowed.end(), pool[gi]);
            row_idx = static_cast<size_t>(it - allowed.begin());
        }
        double h = entropy_from_row(ctx.row(row_idx), cand_indices);
        bool is_cand = false;
        if (h >= best_h) {
            auto ai = ctx.answer_index(pool[gi]);
            if (ai) is_cand = std::binary_search(cand_indices.begin(), cand_indices.end(), *ai);
        }
        if (h > best_h || (h == best_h && is_cand && !best_is_cand)) {
            best_h = h;
            best_is_cand = is_cand;
            best = gi;
        }
    }
    return pool[best];
}

inline Word next_guess_indexed(const SolverContext& ctx, const std::vector<size_t>& cand_indices,
                               int history_len) {
    if (cand_indices.empty()) throw EmptyResult("candidate set is empty");
    const auto& answers = ctx.list().answers();
    if (cand_indices.size() <= 2) return answers[cand_indices.front()];
    if (history_len == 0 && cand_indices.size() == answers.size()) return ctx.opening_guess();
    if (cand_indices.size() <= kCandidatePoolThreshold) {
        std::vector<Word> pool;
        for (size_t idx : cand_indices) pool.push_back(answers[idx]);
        return argmax_entropy(ctx, pool, cand_indices);
    }
    return argmax_entropy(ctx, ctx.list().allowed(), cand_indices);
}

}  // namespace detail_solver

inline Word SolverContext::compute_opening_guess() const {
    std::vector<size_t> all(list_.answers().size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;
    return detail_solver::argmax_entropy(*this, list_.allowed(), all);
}

/// Highest-entropy next guess. With two or fewer candidates left, guessing a
/// candidate weakly dominates, so the lexicographically first one is returned.
inline Word next_guess(const CandidateSet& set, const WordList& list, int history_len) {
    if (set.empty()) throw EmptyResult("candidate set is empty");
    auto ctx = SolverContext::shared_for(list);
    std::vector<size_t> indices;
    indices.reserve(set.size());
    for (const Word& w : set.candidates) {
        auto idx = ctx->answer_index(w);
        if (!idx) throw std::invalid_argument("candidate not in answer list: " + w.str());
        indices.push_back(*idx);
    }
    std::sort(indices.begin(), indices.end());
    return detail_solver::next_guess_indexed(*ctx, indices, history_len);
}

struct SolveResult {
    bool solved = false;
    int guesses = 0;  // guesses consumed (== cap when unsolved)
    std::vector<Word> sequence;
};

/// Plays one puzzle to completion: guess, observe feedback, filter, repeat.
/// Deterministic for a fixed word list.
inline SolveResult solve(const Word& answer, const WordList& list, int cap = 12) {
    auto ctx = SolverContext::shared_for(list);
    auto answer_idx = ctx->answer_index(answer);
    if (!answer_idx) throw std::invalid_argument("answer not in answer list: " + answer.str());

    const auto& answers = list.answers();
    const auto& allowed = list.allowed();
    std::vector<size_t> cand(answers.size());
    for (size_t i = 0; i < cand.size(); ++i) cand[i] = i;

    SolveResult result;
    for (int turn = 0; turn < cap; ++turn) {
        Word guess = detail_solver::next_guess_indexed(*ctx, cand, turn);
        result.sequence.push_back(guess);
        result.guesses = turn + 1;
        std::uint8_t observed = score_code(answer, guess);
        if (FeedbackPattern::from_code(observed).all_green()) {
            result.solved = true;
            return result;
        }
        auto it = std::lower_bound(allowed.begin(), allowed.end(), guess);
        const std::uint8_t* row = ctx->row(static_cast<size_t>(it - allowed.begin()));
        std::vector<size_t> next;
        for (size_t idx : cand)
            if (row[idx] == observed) next.push_back(idx);
        if (next.empty()) throw EmptyResult("solver filtered out every candidate");
        cand = std::move(next);
    }
    return result;
}

struct BenchResult {
    struct Row {
        Word answer;
        int guesses;
        bool solved;
    };
    std::vector<Row> rows;
    double mean_guesses = 0.0;
    double win_rate_within_6 = 0.0;
    double win_rate_within_cap = 0.0;
};

/// Runs the solver over every answer in the list once (it is deterministic).
inline BenchResult bench_solver(const WordList& list, int cap = 12) {
    BenchResult bench;
    long total = 0, wins6 = 0, wins = 0;
    for (const Word& answer : list.answers()) {
        SolveResult r = solve(answer, list, cap);
        bench.rows.push_back({answer, r.guesses, r.solved});
        total += r.guesses;
        if (r.solved) {
            ++wins;
            if (r.guesses <= 6) ++wins6;
        }
    }
    const double n = static_cast<double>(bench.rows.size());
    bench.mean_guesses = static_cast<double>(total) / n;
    bench.win_rate_within_6 = static_cast<double>(wins6) / n;
    bench.win_rate_within_cap = static_cast<double>(wins) / n;
    return bench;
}

}  // namespace diffprobe::wordle
