#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "diffprobe/battle.hpp"
#include "diffprobe/detail/common.hpp"
#include "diffprobe/transport.hpp"
#include "diffprobe/wordle.hpp"
#include "diffprobe/wordle_solver.hpp"

namespace diffprobe::agent {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// Trial-level failure: the agent's output stayed unusable after all retries
/// (or the transport gave up). Recorded as a loss but flagged separately.
struct ProtocolFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- observation ------------------------------------------------------------

struct Observation {
    std::string game_id;  // "wordle" | "battle" | external id
    int turn_index = 0;
    std::string state_text;       // natural-language state, ready for a prompt
    json structured_state;        // machine-readable mirror
    std::vector<std::string> legal_actions;  // optional; empty for free-form games
};

struct AgentAction {
    std::string raw_text;  // full response as produced
    std::string parsed;    // canonical action (5-letter word, or battle action string)
};

// ---- configuration ----------------------------------------------------------

enum class AgentKind { ZeroShot, CoT, CoTPlus, Random, Scripted, SolverBacked };

inline const char* kind_name(AgentKind k) {
    switch (k) {
        case AgentKind::ZeroShot: return "zero_shot";
        case AgentKind::CoT: return "cot";
        case AgentKind::CoTPlus: return "cot_plus";
        case AgentKind::Random: return "random";
        case AgentKind::Scripted: return "scripted";
        default: return "solver";
    }
}

struct AgentConfig {
    AgentKind kind = AgentKind::SolverBacked;
    std::string agent_id;  // label used in records and reports
    std::string model_name;
    double temperature = 1.0;
    int max_parse_retries = 3;
    std::uint64_t seed = 0;              // mock kinds only
    std::string strategy_text;           // CoTPlus only; overrides the bundle's
    std::vector<std::string> script;     // Scripted: fixed actions by turn index
    std::string policy_name;             // Scripted: named built-in policy

    bool is_llm() const {
        return kind == AgentKind::ZeroShot || kind == AgentKind::CoT ||
               kind == AgentKind::CoTPlus;
    }
};

struct PromptBundle {
    std::string rules_text;
    std::string io_format_text;
    std::string reasoning_text;  // CoT / CoTPlus
    std::string strategy_text;   // CoTPlus
};

// ---- transcript --------------------------------------------------------------

struct TranscriptEntry {
    std::string role;  // system | user | assistant
    std::string content;
    std::int64_t ts_ms = 0;
    long long prompt_tokens = -1;
    long long completion_tokens = -1;
};

struct Transcript {
    std::vector<TranscriptEntry> entries;
    long long total_prompt_tokens = 0;
    long long total_completion_tokens = 0;

    bool empty() const { return entries.empty(); }

    void append(std::string role, std::string content, long long ptok = -1,
                long long ctok = -1) {
        entries.push_back(TranscriptEntry{std::move(role), std::move(content),
                                          diffprobe::detail::now_ms(), ptok, ctok});
        if (ptok > 0) total_prompt_tokens += ptok;
        if (ctok > 0) total_completion_tokens += ctok;
    }
};

/// One JSON object per line: role, content, timestamp, token counts when known.
inline void save_transcript(const std::string& path, const Transcript& tr) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write transcript: " + path);
    for (const auto& e : tr.entries) {
        json j = {{"role", e.role}, {"content", e.content}, {"ts_ms", e.ts_ms}};
        if (e.prompt_tokens >= 0) j["prompt_tokens"] = e.prompt_tokens;
        if (e.completion_tokens >= 0) j["completion_tokens"] = e.completion_tokens;
        out << j.dump() << "\n";
    }
}

inline Transcript load_transcript(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read transcript: " + path);
    Transcript tr;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        TranscriptEntry e;
        e.role = j.at("role").get<std::string>();
        e.content = j.at("content").get<std::string>();
        e.ts_ms = j.value("ts_ms", 0);
        e.prompt_tokens = j.value("prompt_tokens", -1);
        e.completion_tokens = j.value("completion_tokens", -1);
        tr.entries.push_back(std::move(e));
    }
    return tr;
}

// ---- action formatting / parsing ----------------------------------------------

/// Canonical response line for an action, the exact shape parse_action expects.
inline std::string format_action(const std::string& game_id, const std::string& parsed) {
    if (game_id == "wordle") {
        auto w = wordle::Word::parse(parsed);
        if (!w) throw ParseFailure("not a five-letter word: " + parsed);
        return "GUESS: " + w->bracketed();
    }
    return parsed;  // battle actions are already canonical lines
}

namespace detail_agent {

inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    lines.push_back(cur);
    return lines;
}

/// Extracts the letters of a bracketed list like "[c, R,a , N, E]".
inline std::optional<std::string> letters_from_list(const std::string& text) {
    auto open = text.find('[');
    auto close = text.find(']', open == std::string::npos ? 0 : open);
    if (open == std::string::npos || close == std::string::npos) return std::nullopt;
    std::string letters;
    for (size_t i = open + 1; i < close; ++i) {
        char c = text[i];
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) continue;
        if (!std::isalpha(static_cast<unsigned char>(c))) return std::nullopt;
        letters += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return letters;
}

}  // namespace detail_agent

/// Pulls the final marker line out of a raw response. Wordle expects
/// "GUESS: [A, B, C, D, E]" (spacing/case tolerated); battle expects
/// "PLAY: <card> | TARGET: <enemy>" or "END TURN". Any other game gets the
/// last non-empty line verbatim — external games define their own grammar.
inline AgentAction parse_action(const std::string& raw, const std::string& game_id) {
    using diffprobe::detail::to_upper;
    using diffprobe::detail::trim;
    auto lines = detail_agent::split_lines(raw);
    if (game_id == "wordle") {
        for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
            std::string line = trim(*it);
            std::string upper = to_upper(line);
            auto pos = upper.find("GUESS:");
            if (pos == std::string::npos) continue;
            std::string tail = trim(line.substr(pos + 6));
            auto letters = detail_agent::letters_from_list(tail);
            if (!letters) {
                // tolerate a bare word after the marker
                std::string word = to_upper(tail);
                if (word.size() == wordle::Word::kLength &&
                    std::all_of(word.begin(), word.end(),
                                [](char c) { return c >= 'A' && c <= 'Z'; }))
                    return AgentAction{raw, word};
                throw ParseFailure("malformed letter list following GUESS:");
            }
            if (letters->size() != wordle::Word::kLength)
                throw ParseFailure("letter list has length " +
                                   std::to_string(letters->size()) + ", expected " +
                                   std::to_string(wordle::Word::kLength));
            return AgentAction{raw, *letters};
        }
        throw ParseFailure("no GUESS: marker in response");
    }
    if (game_id == "battle") {
        for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
            std::string line = trim(*it);
            auto parsed = battle::parse_battle_action(line);
            if (!parsed) continue;
            if (parsed->end_turn) return AgentAction{raw, battle::kEndTurnAction};
            std::string canon = "PLAY: " + parsed->card_name;
            if (!parsed->target_name.empty()) canon += " | TARGET: " + parsed->target_name;
            return AgentAction{raw, canon};
        }
        throw ParseFailure("no PLAY:/END TURN marker in response");
    }
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
        std::string line = trim(*it);
        if (!line.empty()) return AgentAction{raw, line};
    }
    throw ParseFailure("empty response");
}

// ---- prompt construction -------------------------------------------------------

/// System + prior turns + current state. ZeroShot sends rules and IO format
/// only; CoT adds the step-by-step instructions; CoTPlus further appends the
/// strategy text (config's text wins over the bundle's).
inline std::vector<ChatMessage> build_prompt(const AgentConfig& config,
                                             const PromptBundle& bundle, const Observation& obs,
                                             const Transcript& transcript) {
    if (bundle.rules_text.empty() || bundle.io_format_text.empty())
        throw ConfigError("prompt bundle needs rules_text and io_format_text");
    std::string system = bundle.rules_text + "\n\n" + bundle.io_format_text;
    if (config.kind == AgentKind::CoT || config.kind == AgentKind::CoTPlus) {
        if (!bundle.reasoning_text.empty()) system += "\n\n" + bundle.reasoning_text;
    }
    if (config.kind == AgentKind::CoTPlus) {
        const std::string& strategy =
            !config.strategy_text.empty() ? config.strategy_text : bundle.strategy_text;
        if (strategy.empty())
            throw ConfigError("CoTPlus agent requires non-empty strategy text");
        system += "\n\n" + strategy;
    }
    std::vector<ChatMessage> messages;
    messages.push_back({"system", system});
    for (const auto& e : transcript.entries)
        if (e.role != "system") messages.push_back({e.role, e.content});
    messages.push_back({"user", obs.state_text});
    return messages;
}

// ---- game observation builders ---------------------------------------------------

/// Natural-language Wordle state. Every in-play word is rendered as a
/// bracketed letter list; prose avoids bare five-letter word tokens.
inline Observation wordle_observation(const wordle::PuzzleState& st) {
    Observation obs;
    obs.game_id = "wordle";
    obs.turn_index = static_cast<int>(st.history.size());
    std::string text;
    text += "Attempt " + std::to_string(st.history.size() + 1) + " of " +
            std::to_string(st.guess_cap) + ".\n";
    if (st.history.empty()) {
        text += "No attempts so far. Submit an opening attempt.\n";
    } else {
        text += "Feedback so far:\n";
        for (size_t i = 0; i < st.history.size(); ++i) {
            const auto& [w, fb] = st.history[i];
            text += std::to_string(i + 1) + ". " + w.bracketed() + " -> [";
            for (int k = 0; k < wordle::Word::kLength; ++k) {
                if (k) text += ", ";
                text += wordle::verdict_name(fb.cells[k]);
            }
            text += "]\n";
        }
    }
    obs.state_text = text;
    json hist = json::array();
    for (const auto& [w, fb] : st.history) {
        json letters = json::array();
        for (int k = 0; k < wordle::Word::kLength; ++k)
            letters.push_back(std::string(1, w[k]));
        hist.push_back({{"guess", letters}, {"feedback", fb.str()}});
    }
    obs.structured_state = {{"history", hist},
                            {"attempts_used", st.history.size()},
                            {"guess_cap", st.guess_cap}};
    return obs;
}

/// `decision_index` counts act() calls within the trial (several per battle
/// turn), matching the `turn` field the stdio server sends, so agents behave
/// identically in-process and behind the adapter.
inline Observation battle_observation(const battle::BattleState& st, int decision_index) {
    Observation obs;
    obs.game_id = "battle";
    obs.turn_index = decision_index;
    obs.state_text = battle::describe_state(st);
    obs.structured_state = battle::make_structured_state(st);
    obs.legal_actions = battle::legal_actions(st);
    return obs;
}

// ---- the agent -------------------------------------------------------------------

class Agent {
  public:
    Agent(AgentConfig config, PromptBundle bundle,
          std::shared_ptr<ChatTransport> transport = nullptr)
        : config_(std::move(config)), bundle_(std::move(bundle)),
          transport_(std::move(transport)) {
        if (config_.kind == AgentKind::CoTPlus && config_.strategy_text.empty() &&
            bundle_.strategy_text.empty())
            throw ConfigError("CoTPlus agent requires non-empty strategy text");
        if (config_.is_llm() && !transport_)
            throw ConfigError("LLM agent kind needs a transport");
        if (config_.agent_id.empty()) config_.agent_id = kind_name(config_.kind);
    }

    const AgentConfig& config() const { return config_; }
    const std::string& id() const { return config_.agent_id; }

    /// Word list for offline Wordle play (random guessing, solver recompute).
    void bind_word_list(const wordle::WordList* list) { word_list_ = list; }

    /// Resets per-trial state; mock randomness derives from (config.seed,
    /// trial_seed, turn) so distinct trials vary but replays are identical.
    void begin_trial(std::uint64_t trial_seed) {
        trial_rng_base_ = diffprobe::detail::splitmix64(config_.seed ^ trial_seed);
    }

    /// One decision. Always records the exchange in the transcript, so mock
    /// runs emit the same prompt stream as LLM runs.
    AgentAction act(const Observation& obs, Transcript& transcript) {
        auto messages = build_prompt(config_, bundle_, obs, transcript);
        if (transcript.empty()) transcript.append("system", messages.front().content);
        transcript.append("user", obs.state_text);
        if (config_.is_llm()) return act_llm(obs, messages, transcript);

        AgentAction action = act_mock(obs);
        transcript.append("assistant", action.raw_text);
        return action;
    }

  private:
    AgentAction act_llm(const Observation& obs, std::vector<ChatMessage> messages,
                        Transcript& transcript) {
        std::string last_reason;
        for (int attempt = 0; attempt <= config_.max_parse_retries; ++attempt) {
            ChatResult res;
            try {
                res = transport_->complete(messages, config_.model_name, config_.temperature);
            } catch (const TransportError& e) {
                throw ProtocolFailure(std::string("transport gave up: ") + e.what());
            }
            transcript.append("assistant", res.text, res.prompt_tokens, res.completion_tokens);
            try {
                return parse_action(res.text, obs.game_id);
            } catch (const ParseFailure& e) {
                last_reason = e.what();
                if (attempt == config_.max_parse_retries) break;
                std::string corrective =
                    std::string("That response was not parseable (") + e.what() +
                    "). Respond with exactly one line in the required form: " +
                    (obs.game_id == "wordle" ? "GUESS: [A, B, C, D, E]"
                                             : "PLAY: <card> | TARGET: <enemy>, or END TURN");
                messages.push_back({"assistant", res.text});
                messages.push_back({"user", corrective});
                transcript.append("user", corrective);
            }
        }
        throw ProtocolFailure("unparseable response after " +
                              std::to_string(config_.max_parse_retries) +
                              " retries: " + last_reason);
    }

    AgentAction act_mock(const Observation& obs) {
        switch (config_.kind) {
            case AgentKind::Random: return act_random(obs);
            case AgentKind::Scripted: return act_scripted(obs);
            case AgentKind::SolverBacked: return act_solver(obs);
            default: throw ConfigError("not a mock agent kind");
        }
    }

    diffprobe::detail::SplitMix64 turn_rng(int turn_index) const {
        return diffprobe::detail::SplitMix64(
            trial_rng_base_ ^ diffprobe::detail::splitmix64(0x9e3779b97f4a7c15ull +
                                                            static_cast<std::uint64_t>(turn_index)));
    }

    AgentAction act_random(const Observation& obs) {
        auto rng = turn_rng(obs.turn_index);
        if (!obs.legal_actions.empty()) {
            const std::string& pick = obs.legal_actions[rng.bounded(obs.legal_actions.size())];
            return AgentAction{pick, parse_action(pick, obs.game_id).parsed};
        }
        if (obs.game_id == "wordle") {
            if (!word_list_ || word_list_->allowed().empty())
                throw ProtocolFailure("random agent has no word list bound");
            const auto& pool = word_list_->allowed();
            const auto& w = pool[rng.bounded(pool.size())];
            return AgentAction{format_action("wordle", w.str()), w.str()};
        }
        throw ProtocolFailure("random agent: no legal actions available");
    }

    AgentAction act_scripted(const Observation& obs) {
        if (!config_.script.empty()) {
            size_t idx = std::min(static_cast<size_t>(obs.turn_index),
                                  config_.script.size() - 1);
            const std::string& entry = config_.script[idx];
            // bare five-letter entries are accepted as Wordle shorthand
            if (obs.game_id == "wordle") {
                if (auto w = wordle::Word::parse(entry))
                    return AgentAction{format_action("wordle", w->str()), w->str()};
            }
            return AgentAction{entry, parse_action(entry, obs.game_id).parsed};
        }
        if (config_.policy_name == "battle_expert") {
            std::string choice = battle::expert_action(obs.structured_state, obs.legal_actions);
            return AgentAction{choice, choice};
        }
        throw ConfigError("scripted agent has neither a script nor a known policy");
    }

    AgentAction act_solver(const Observation& obs) {
        if (obs.game_id != "wordle")
            throw ConfigError("solver-backed agent only plays wordle");
        if (!word_list_) throw ProtocolFailure("solver agent has no word list bound");
        // stateless recompute: replay the observed feedback over the full list
        wordle::CandidateSet set = wordle::initial_candidates(*word_list_);
        const auto& hist = obs.structured_state.at("history");
        for (const auto& h : hist) {
            std::string letters;
            for (const auto& l : h.at("guess")) letters += l.get<std::string>();
            wordle::Word guess = wordle::Word::must(letters);
            auto fb = wordle::FeedbackPattern::from_str(h.at("feedback").get<std::string>());
            set = wordle::filter_candidates(set, guess, fb);
        }
        wordle::Word next =
            wordle::next_guess(set, *word_list_, static_cast<int>(hist.size()));
        return AgentAction{format_action("wordle", next.str()), next.str()};
    }

    AgentConfig config_;
    PromptBundle bundle_;
    std::shared_ptr<ChatTransport> transport_;
    const wordle::WordList* word_list_ = nullptr;
    std::uint64_t trial_rng_base_ = 0;
};

// ---- agent spec strings ------------------------------------------------------------

/// Parses CLI-style agent specs: "solver", "random", "scripted:expert",
/// "zs:<model>", "cot:<model>", "cot+:<model>". The full string becomes the
/// agent_id.
inline AgentConfig parse_agent_spec(const std::string& spec) {
    AgentConfig cfg;
    cfg.agent_id = spec;
    auto colon = spec.find(':');
    std::string head = colon == std::string::npos ? spec : spec.substr(0, colon);
    std::string tail = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (head == "solver") {
        cfg.kind = AgentKind::SolverBacked;
    } else if (head == "random") {
        cfg.kind = AgentKind::Random;
    } else if (head == "scripted") {
        cfg.kind = AgentKind::Scripted;
        if (tail == "expert" || tail == "battle_expert") cfg.policy_name = "battle_expert";
        // otherwise the script is supplied via config
    } else if (head == "zs") {
        cfg.kind = AgentKind::ZeroShot;
        cfg.model_name = tail;
    } else if (head == "cot") {
        cfg.kind = AgentKind::CoT;
        cfg.model_name = tail;
    } else if (head == "cot+") {
        cfg.kind = AgentKind::CoTPlus;
        cfg.model_name = tail;
    } else {
        throw ConfigError("unknown agent spec: " + spec);
    }
    if (cfg.is_llm() && cfg.model_name.empty())
        throw ConfigError("agent spec '" + spec + "' needs a model name after the colon");
    return cfg;
}

}  // namespace diffprobe::agent
