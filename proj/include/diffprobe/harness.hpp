#pragma once

#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "diffprobe/agent.hpp"
#include "diffprobe/battle.hpp"
#include "diffprobe/detail/common.hpp"
#include "diffprobe/prompts.hpp"
#include "diffprobe/protocol.hpp"
#include "diffprobe/wordle.hpp"

namespace diffprobe::harness {

using nlohmann::json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingMetric : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- challenges ---------------------------------------------------------------

enum class ChallengeKind { Wordle, Battle, External };

struct Challenge {
    std::string id;
    ChallengeKind kind = ChallengeKind::Wordle;
    std::optional<wordle::Word> answer;  // wordle
    std::string boss_name;               // battle
    std::string deck_name = "default";   // battle
    std::string command;                 // external: shell command

    static Challenge wordle_answer(const wordle::Word& w) {
        Challenge c;
        c.id = w.str();
        c.kind = ChallengeKind::Wordle;
        c.answer = w;
        return c;
    }

    static Challenge battle_boss(const std::string& boss, const std::string& deck = "default") {
        Challenge c;
        c.id = boss;
        c.kind = ChallengeKind::Battle;
        c.boss_name = boss;
        c.deck_name = deck;
        return c;
    }

    static Challenge external(const std::string& id, const std::string& command) {
        Challenge c;
        c.id = id;
        c.kind = ChallengeKind::External;
        c.command = command;
        return c;
    }
};

// ---- run configuration -----------------------------------------------------------

struct RunConfig {
    int trials_per_challenge = 20;
    int guess_cap = 12;
    int turn_cap = 50;
    int parallelism = 1;
    std::uint64_t base_seed = 0;
    std::string output_dir = ".";
    std::string transcript_dir;       // empty: transcripts not persisted
    bool strict_dictionary = false;   // reject non-dictionary wordle submissions
    protocol::ExternalLimits external_limits;
    std::map<std::string, std::string> provenance;  // extra manifest entries
    json config_echo = json::object();              // effective CLI/file config
    std::function<void(const struct TrialRecord&)> progress;  // optional

    void validate() const {
        if (trials_per_challenge < 1) throw std::invalid_argument("trials_per_challenge >= 1");
        if (guess_cap < 1 || turn_cap < 1) throw std::invalid_argument("caps must be >= 1");
        if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
    }
};

/// One agent as configured for a run; a fresh Agent is built per trial so
/// trials are independent. The bundle, when unset, defaults per game kind.
struct AgentSetup {
    agent::AgentConfig config;
    std::optional<agent::PromptBundle> bundle;
    std::shared_ptr<agent::ChatTransport> transport;
};

/// Shared immutable inputs for trial execution.
struct RunEnvironment {
    const wordle::WordList* words = nullptr;
    const battle::BattleFixtures* fixtures = nullptr;
};

// ---- trial records ------------------------------------------------------------------

enum class TrialOutcome { Win, Loss, ProtocolFailure };

inline const char* outcome_name(TrialOutcome o) {
    switch (o) {
        case TrialOutcome::Win: return "win";
        case TrialOutcome::Loss: return "loss";
        default: return "protocol_failure";
    }
}

inline TrialOutcome outcome_from_name(const std::string& s) {
    if (s == "win") return TrialOutcome::Win;
    if (s == "loss") return TrialOutcome::Loss;
    if (s == "protocol_failure") return TrialOutcome::ProtocolFailure;
    throw std::invalid_argument("unknown outcome: " + s);
}

struct TrialRecord {
    std::string challenge_id;
    std::string agent_id;
    int trial_index = 0;
    std::uint64_t seed = 0;
    TrialOutcome outcome = TrialOutcome::Loss;
    std::map<std::string, double> metrics;
    std::string transcript_path;
    std::string error;  // detail for protocol failures
    std::int64_t wall_ms = 0;

    json to_json() const {
        json j = {{"challenge_id", challenge_id}, {"agent_id", agent_id},
                  {"trial_index", trial_index},   {"seed", seed},
                  {"outcome", outcome_name(outcome)}, {"metrics", metrics},
                  {"wall_ms", wall_ms}};
        if (!transcript_path.empty()) j["transcript_path"] = transcript_path;
        if (!error.empty()) j["error"] = error;
        return j;
    }

    static TrialRecord from_json(const json& j) {
        TrialRecord r;
        r.challenge_id = j.at("challenge_id").get<std::string>();
        r.agent_id = j.at("agent_id").get<std::string>();
        r.trial_index = j.at("trial_index").get<int>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.outcome = outcome_from_name(j.at("outcome").get<std::string>());
        if (j.contains("metrics"))
            for (const auto& [k, v] : j["metrics"].items()) r.metrics[k] = v.get<double>();
        r.transcript_path = j.value("transcript_path", "");
        r.error = j.value("error", "");
        r.wall_ms = j.value("wall_ms", 0);
        return r;
    }
};

// ---- aggregation -------------------------------------------------------------------

struct ChallengeAggregate {
    std::string agent_id;
    std::string challenge_id;
    int n_trials = 0;
    int wins = 0;
    double win_rate = 0.0;
    std::optional<double> avg_guesses;       // failed trials counted at guess_cap
    std::optional<double> avg_hp_remaining;  // losses counted as 0
    std::optional<double> avg_turns;
    int protocol_failure_count = 0;
};

struct AggregateOptions {
    int guess_cap = 12;
    bool exclude_protocol_failures = false;
};

namespace detail_harness {

/// Permutation-invariant mean: values are sorted before summation so record
/// order can never change the result, even in the last bit.
inline double stable_mean(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace detail_harness

/// Per-(agent, challenge) difficulty metrics with explicit failure
/// accounting: a non-win contributes guess_cap to avg_guesses and 0 to
/// avg_hp_remaining regardless of what the raw record stored.
inline std::vector<ChallengeAggregate> aggregate(const std::vector<TrialRecord>& records,
                                                 const AggregateOptions& opts = {}) {
    std::map<std::pair<std::string, std::string>, std::vector<const TrialRecord*>> groups;
    for (const auto& r : records) groups[{r.agent_id, r.challenge_id}].push_back(&r);

    std::vector<ChallengeAggregate> out;
    for (const auto& [key, recs] : groups) {
        ChallengeAggregate agg;
        agg.agent_id = key.first;
        agg.challenge_id = key.second;
        std::vector<const TrialRecord*> usable;
        for (const TrialRecord* r : recs) {
            if (r->outcome == TrialOutcome::ProtocolFailure) {
                ++agg.protocol_failure_count;
                if (opts.exclude_protocol_failures) continue;
            }
            usable.push_back(r);
        }
        if (usable.empty()) continue;  // nothing left to aggregate for this pair
        agg.n_trials = static_cast<int>(usable.size());
        for (const TrialRecord* r : usable)
            if (r->outcome == TrialOutcome::Win) ++agg.wins;
        agg.win_rate = static_cast<double>(agg.wins) / agg.n_trials;

        bool wordle_style = false, battle_style = false;
        for (const TrialRecord* r : usable) {
            if (r->metrics.count("guesses")) wordle_style = true;
            if (r->metrics.count("hp_remaining")) battle_style = true;
        }
        if (wordle_style) {
            std::vector<double> vals;
            for (const TrialRecord* r : usable) {
                if (r->outcome == TrialOutcome::Win) {
                    auto it = r->metrics.find("guesses");
                    if (it == r->metrics.end())
                        throw MissingMetric("win record without 'guesses' for challenge " +
                                            r->challenge_id);
                    vals.push_back(it->second);
                } else {
                    vals.push_back(static_cast<double>(opts.guess_cap));
                }
            }
            agg.avg_guesses = detail_harness::stable_mean(std::move(vals));
        }
        if (battle_style) {
            std::vector<double> vals;
            for (const TrialRecord* r : usable) {
                if (r->outcome == TrialOutcome::Win) {
                    auto it = r->metrics.find("hp_remaining");
                    if (it == r->metrics.end())
                        throw MissingMetric("win record without 'hp_remaining' for challenge " +
                                            r->challenge_id);
                    vals.push_back(it->second);
                } else {
                    vals.push_back(0.0);
                }
            }
            agg.avg_hp_remaining = detail_harness::stable_mean(std::move(vals));
        }
        {
            std::vector<double> turns;
            for (const TrialRecord* r : usable) {
                auto it = r->metrics.find("turns");
                if (it != r->metrics.end()) turns.push_back(it->second);
            }
            if (!turns.empty()) agg.avg_turns = detail_harness::stable_mean(std::move(turns));
        }
        out.push_back(std::move(agg));
    }
    return out;
}

// ---- trials.jsonl persistence -----------------------------------------------------

/// Loads complete, valid lines from an existing trial log. A partial trailing
/// line (e.g. from a killed run) is truncated away so appends stay clean.
inline std::vector<TrialRecord> load_trial_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::vector<TrialRecord> records;
    std::string line;
    std::uint64_t good_end = 0;
    std::uint64_t pos = 0;
    while (std::getline(in, line)) {
        bool terminated = !in.eof();  // getline stripped a real '\n'
        std::uint64_t line_end = pos + line.size() + (terminated ? 1 : 0);
        if (!terminated) break;  // unterminated tail: treat as partial
        try {
            records.push_back(TrialRecord::from_json(json::parse(line)));
            good_end = line_end;
        } catch (const std::exception&) {
            break;  // corrupt line: drop it and everything after
        }
        pos = line_end;
    }
    in.close();
    std::error_code ec;
    auto size = std::filesystem::file_size(path, ec);
    if (!ec && size > good_end) std::filesystem::resize_file(path, good_end, ec);
    return records;
}

// ---- the runner ---------------------------------------------------------------------

namespace detail_harness {

inline std::string sanitize_for_filename(std::string s) {
    for (char& c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) c = '_';
    return s;
}

/// Executes one trial tuple. All agent/game errors land in the record as
/// ProtocolFailure; only harness-level IO problems escape as exceptions.
inline TrialRecord execute_trial(const Challenge& challenge, const AgentSetup& setup,
                                 int trial_index, const RunConfig& config,
                                 const RunEnvironment& env) {
    TrialRecord rec;
    rec.challenge_id = challenge.id;
    rec.agent_id = setup.config.agent_id;
    rec.trial_index = trial_index;
    rec.seed = diffprobe::detail::mix_seed(config.base_seed, challenge.id,
                                           setup.config.agent_id, trial_index);
    auto t0 = std::chrono::steady_clock::now();

    agent::PromptBundle bundle =
        setup.bundle ? *setup.bundle
                     : agent::default_prompt_bundle(
                           challenge.kind == ChallengeKind::Wordle ? "wordle" : "battle");
    agent::Agent player(setup.config, bundle, setup.transport);
    if (env.words) player.bind_word_list(env.words);
    player.begin_trial(rec.seed);
    agent::Transcript transcript;

    try {
        switch (challenge.kind) {
            case ChallengeKind::Wordle: {
                if (!env.words) throw IoError("wordle challenge needs a word list");
                if (!challenge.answer) throw IoError("wordle challenge needs an answer");
                wordle::PuzzleState st(*challenge.answer, config.guess_cap);
                int reject_streak = 0;
                while (st.status == wordle::PuzzleStatus::InProgress) {
                    auto obs = agent::wordle_observation(st);
                    auto action = player.act(obs, transcript);
                    try {
                        auto [next, fb] = wordle::submit_guess(st, action.parsed, *env.words,
                                                               config.strict_dictionary);
                        st = std::move(next);
                        reject_streak = 0;
                    } catch (const wordle::GuessRejected&) {
                        if (++reject_streak >= 3)
                            throw agent::ProtocolFailure(
                                "dictionary rejected 3 consecutive submissions");
                        transcript.append("user",
                                          "That submission is not in the dictionary. "
                                          "Submit a different attempt.");
                    }
                }
                bool won = st.status == wordle::PuzzleStatus::Solved;
                rec.outcome = won ? TrialOutcome::Win : TrialOutcome::Loss;
                rec.metrics["guesses"] = static_cast<double>(
                    won ? st.history.size() : static_cast<size_t>(config.guess_cap));
                break;
            }
            case ChallengeKind::Battle: {
                if (!env.fixtures) throw IoError("battle challenge needs fixtures");
                const auto& boss = env.fixtures->boss(challenge.boss_name);
                const auto& deck = env.fixtures->deck(challenge.deck_name);
                int decision_index = 0;
                battle::BattlePolicy policy =
                    [&](const battle::BattleState& st,
                        const std::vector<std::string>&) -> std::string {
                    auto obs = agent::battle_observation(st, decision_index++);
                    return player.act(obs, transcript).parsed;
                };
                auto result = battle::run_battle(boss, deck, policy, rec.seed, config.turn_cap,
                                                 env.fixtures->player_hp);
                rec.outcome = result.outcome == battle::BattleOutcome::Win
                                  ? TrialOutcome::Win
                                  : TrialOutcome::Loss;
                rec.metrics["hp_remaining"] = result.hp_remaining;
                rec.metrics["turns"] = result.turns;
                rec.metrics["turn_cap_exceeded"] = result.turn_cap_exceeded ? 1 : 0;
                rec.metrics["illegal_plays"] = result.illegal_plays;
                break;
            }
            case ChallengeKind::External: {
                auto ext = protocol::run_external_challenge(challenge.command, player,
                                                            transcript, config.external_limits);
                rec.metrics = ext.metrics;
                if (ext.status == protocol::ExternalStatus::Completed) {
                    rec.outcome = ext.outcome == "win" ? TrialOutcome::Win : TrialOutcome::Loss;
                } else if (ext.status == protocol::ExternalStatus::TurnLimitExceeded) {
                    rec.outcome = TrialOutcome::Loss;
                    rec.metrics["turn_limit_exceeded"] = 1;
                    rec.error = ext.error_detail;
                } else {
                    rec.outcome = TrialOutcome::ProtocolFailure;
                    rec.error = std::string(protocol::external_status_name(ext.status)) +
                                (ext.error_detail.empty() ? "" : ": " + ext.error_detail);
                }
                if (!ext.stderr_text.empty())
                    transcript.append("system", "[game stderr]\n" + ext.stderr_text);
                break;
            }
        }
    } catch (const agent::ProtocolFailure& e) {
        rec.outcome = TrialOutcome::ProtocolFailure;
        rec.error = e.what();
    } catch (const IoError&) {
        throw;  // harness misconfiguration: abort the run
    } catch (const std::exception& e) {
        rec.outcome = TrialOutcome::ProtocolFailure;
        rec.error = e.what();
    }

    rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    if (!config.transcript_dir.empty()) {
        std::filesystem::create_directories(config.transcript_dir);
        rec.transcript_path = config.transcript_dir + "/" +
                              sanitize_for_filename(rec.challenge_id) + "_" +
                              sanitize_for_filename(rec.agent_id) + "_" +
                              std::to_string(trial_index) + ".jsonl";
        agent::save_transcript(rec.transcript_path, transcript);
    }
    return rec;
}

}  // namespace detail_harness

inline void write_manifest(const std::string& path, const RunConfig& config,
                           const std::vector<Challenge>& challenges,
                           const std::vector<AgentSetup>& agents) {
    json m;
    m["created_ms"] = diffprobe::detail::now_ms();
    m["base_seed"] = config.base_seed;
    m["trials_per_challenge"] = config.trials_per_challenge;
    m["guess_cap"] = config.guess_cap;
    m["turn_cap"] = config.turn_cap;
    m["parallelism"] = config.parallelism;
    m["strict_dictionary"] = config.strict_dictionary;
    m["challenges"] = json::array();
    for (const auto& c : challenges) m["challenges"].push_back(c.id);
    m["agents"] = json::array();
    for (const auto& a : agents) m["agents"].push_back(a.config.agent_id);
    for (const auto& [k, v] : config.provenance) m[k] = v;
    m["config_echo"] = config.config_echo;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << m.dump(2) << "\n";
}

/// Executes every (challenge, agent, trial) tuple not already present in the
/// run directory's trials.jsonl, appending each record durably as it
/// completes. Returns all records for the run, previously-done ones included,
/// in canonical (challenge, agent, trial) order.
inline std::vector<TrialRecord> run(const RunConfig& config,
                                    const std::vector<Challenge>& challenges,
                                    const std::vector<AgentSetup>& agents,
                                    const RunEnvironment& env) {
    config.validate();
    if (challenges.empty() || agents.empty())
        throw std::invalid_argument("run needs at least one challenge and one agent");
    {
        std::set<std::string> ids;
        for (const auto& c : challenges)
            if (!ids.insert(c.id).second)
                throw std::invalid_argument("duplicate challenge id: " + c.id);
    }
    std::filesystem::create_directories(config.output_dir);
    const std::string log_path = config.output_dir + "/trials.jsonl";
    write_manifest(config.output_dir + "/manifest.json", config, challenges, agents);

    std::vector<TrialRecord> existing = load_trial_log(log_path);
    std::set<std::tuple<std::string, std::string, int>> done;
    for (const auto& r : existing) done.insert({r.challenge_id, r.agent_id, r.trial_index});

    struct Tuple {
        const Challenge* challenge;
        const AgentSetup* setup;
        int trial_index;
    };
    std::vector<Tuple> todo;
    for (const auto& c : challenges)
        for (const auto& a : agents)
            for (int t = 0; t < config.trials_per_challenge; ++t)
                if (!done.count({c.id, a.config.agent_id, t})) todo.push_back({&c, &a, t});

    std::FILE* log = std::fopen(log_path.c_str(), "ab");
    if (!log) throw IoError("cannot open trial log for append: " + log_path);

    std::vector<TrialRecord> fresh(todo.size());
    std::atomic<size_t> next{0};
    std::mutex emit_mu;
    std::vector<std::string> worker_errors;

    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= todo.size()) return;
            const Tuple& t = todo[i];
            TrialRecord rec;
            try {
                rec = detail_harness::execute_trial(*t.challenge, *t.setup, t.trial_index,
                                                    config, env);
            } catch (const std::exception& e) {
                std::lock_guard lock(emit_mu);
                worker_errors.push_back(e.what());
                return;
            }
            std::string line = rec.to_json().dump() + "\n";
            {
                std::lock_guard lock(emit_mu);
                if (std::fwrite(line.data(), 1, line.size(), log) != line.size() ||
                    std::fflush(log) != 0) {
                    worker_errors.push_back("short write to " + log_path);
                    return;
                }
                if (config.progress) config.progress(rec);
            }
            fresh[i] = std::move(rec);
        }
    };

    int n_workers = std::min<int>(config.parallelism, static_cast<int>(todo.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    std::fclose(log);
    if (!worker_errors.empty())
        throw IoError("run aborted (resumable): " + worker_errors.front());

    std::vector<TrialRecord> all = std::move(existing);
    all.insert(all.end(), std::make_move_iterator(fresh.begin()),
               std::make_move_iterator(fresh.end()));
    std::sort(all.begin(), all.end(), [](const TrialRecord& a, const TrialRecord& b) {
        return std::tie(a.challenge_id, a.agent_id, a.trial_index) <
               std::tie(b.challenge_id, b.agent_id, b.trial_index);
    });
    return all;
}

}  // namespace diffprobe::harness
