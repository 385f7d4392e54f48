#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "diffprobe/agent.hpp"
#include "diffprobe/battle.hpp"

namespace diffprobe::protocol {

using nlohmann::json;

inline constexpr int kProtocolVersion = 1;

struct SchemaError : std::runtime_error {
    std::string offending_line;
    SchemaError(const std::string& what, std::string line)
        : std::runtime_error(what + " | line: " + (line.size() > 200 ? line.substr(0, 200) + "…"
                                                                     : line)),
          offending_line(std::move(line)) {}
};
/// Local process/pipe failures (fork, pipe, exec) — caller misuse or OS
/// trouble, distinct from game-side protocol failures.
struct SubprocessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class MessageType { Hello, State, Action, Result, Error };

inline const char* type_name(MessageType t) {
    switch (t) {
        case MessageType::Hello: return "hello";
        case MessageType::State: return "state";
        case MessageType::Action: return "action";
        case MessageType::Result: return "result";
        default: return "error";
    }
}

struct ProtocolMessage {
    MessageType type = MessageType::Hello;
    int protocol_version = kProtocolVersion;
    json payload = json::object();

    bool operator==(const ProtocolMessage& o) const {
        return type == o.type && protocol_version == o.protocol_version && payload == o.payload;
    }
};

/// One compact JSON object, newline-terminated.
inline std::string encode(const ProtocolMessage& msg) {
    json j = {{"type", type_name(msg.type)},
              {"protocol_version", msg.protocol_version},
              {"payload", msg.payload}};
    return j.dump() + "\n";
}

namespace detail_protocol {

inline void require(bool ok, const std::string& what, const std::string& line) {
    if (!ok) throw SchemaError(what, line);
}

inline void validate_metrics(const json& payload, const std::string& line) {
    if (!payload.contains("metrics")) return;
    require(payload["metrics"].is_object(), "metrics must be an object", line);
    for (const auto& [k, v] : payload["metrics"].items()) {
        (void)k;
        require(v.is_number(), "metrics values must be numbers", line);
    }
}

}  // namespace detail_protocol

/// Parses and schema-validates one line. Unknown extra fields are ignored for
/// forward compatibility; unknown types and malformed payloads are rejected.
inline ProtocolMessage decode(const std::string& line) {
    using detail_protocol::require;
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("not valid JSON: ") + e.what(), line);
    }
    require(j.is_object(), "top level must be an object", line);
    require(j.contains("type") && j["type"].is_string(), "missing string field 'type'", line);
    require(j.contains("protocol_version") && j["protocol_version"].is_number_integer(),
            "missing integer field 'protocol_version'", line);
    ProtocolMessage msg;
    msg.protocol_version = j["protocol_version"].get<int>();
    msg.payload = j.value("payload", json::object());
    require(msg.payload.is_object(), "payload must be an object", line);
    const std::string t = j["type"].get<std::string>();

    if (t == "hello") {
        msg.type = MessageType::Hello;
    } else if (t == "state") {
        msg.type = MessageType::State;
        require(msg.payload.contains("challenge_id") && msg.payload["challenge_id"].is_string(),
                "state needs string challenge_id", line);
        require(msg.payload.contains("turn") && msg.payload["turn"].is_number_integer() &&
                    msg.payload["turn"].get<int>() >= 0,
                "state needs integer turn >= 0", line);
        require(msg.payload.contains("state_text") && msg.payload["state_text"].is_string() &&
                    !msg.payload["state_text"].get<std::string>().empty(),
                "state needs non-empty state_text", line);
        if (msg.payload.contains("terminal"))
            require(msg.payload["terminal"].is_boolean(), "terminal must be a boolean", line);
        if (msg.payload.contains("legal_actions")) {
            require(msg.payload["legal_actions"].is_array(), "legal_actions must be an array",
                    line);
            for (const auto& a : msg.payload["legal_actions"])
                require(a.is_string(), "legal_actions entries must be strings", line);
        }
        if (msg.payload.contains("structured_state"))
            require(msg.payload["structured_state"].is_object(),
                    "structured_state must be an object", line);
        detail_protocol::validate_metrics(msg.payload, line);
    } else if (t == "action") {
        msg.type = MessageType::Action;
        require(msg.payload.contains("action_text") && msg.payload["action_text"].is_string(),
                "action needs string action_text", line);
    } else if (t == "result") {
        msg.type = MessageType::Result;
        require(msg.payload.contains("outcome") && msg.payload["outcome"].is_string(),
                "result needs string outcome", line);
        detail_protocol::validate_metrics(msg.payload, line);
    } else if (t == "error") {
        msg.type = MessageType::Error;
        require(msg.payload.contains("message") && msg.payload["message"].is_string(),
                "error needs string message", line);
    } else {
        throw SchemaError("unknown message type '" + t + "'", line);
    }
    return msg;
}

// ---- subprocess plumbing ----------------------------------------------------

namespace detail_protocol {

inline void ignore_sigpipe_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace detail_protocol

/// Child process with piped stdin/stdout/stderr, launched via /bin/sh -c.
/// Destruction always reaps: SIGTERM to the process group, short grace
/// period, then SIGKILL — no orphans on any exit path.
class Subprocess {
  public:
    explicit Subprocess(const std::string& shell_command) {
        detail_protocol::ignore_sigpipe_once();
        int in_pipe[2], out_pipe[2], err_pipe[2];
        if (::pipe(in_pipe) || ::pipe(out_pipe) || ::pipe(err_pipe))
            throw SubprocessError("pipe() failed: " + std::string(std::strerror(errno)));
        pid_ = ::fork();
        if (pid_ < 0) throw SubprocessError("fork() failed: " + std::string(std::strerror(errno)));
        if (pid_ == 0) {
            ::setpgid(0, 0);  // own group so the parent can signal the whole tree
            ::dup2(in_pipe[0], STDIN_FILENO);
            ::dup2(out_pipe[1], STDOUT_FILENO);
            ::dup2(err_pipe[1], STDERR_FILENO);
            for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0],
                           err_pipe[1]})
                ::close(fd);
            ::execl("/bin/sh", "sh", "-c", shell_command.c_str(), (char*)nullptr);
            ::_exit(127);
        }
        ::close(in_pipe[0]);
        ::close(out_pipe[1]);
        ::close(err_pipe[1]);
        stdin_fd_ = in_pipe[1];
        stdout_fd_ = out_pipe[0];
        stderr_fd_ = err_pipe[0];
    }

    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    ~Subprocess() { terminate(); }

    pid_t pid() const { return pid_; }

    /// True if the line was fully written; false when the child closed stdin.
    bool write_line(const std::string& line) {
        size_t off = 0;
        while (off < line.size()) {
            ssize_t n = ::write(stdin_fd_, line.data() + off, line.size() - off);
            if (n < 0) {
                if (errno == EINTR) continue;
                return false;
            }
            off += static_cast<size_t>(n);
        }
        return true;
    }

    enum class ReadStatus { Line, Eof, Timeout };

    /// Reads one newline-terminated line from the child's stdout, draining
    /// stderr into `err_accum` along the way so a chatty child cannot block.
    ReadStatus read_line(int timeout_ms, std::string& out_line, std::string& err_accum) {
        auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
        while (true) {
            auto nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                out_line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return ReadStatus::Line;
            }
            if (stdout_eof_) {
                if (!buffer_.empty()) {  // unterminated trailing data
                    out_line = std::move(buffer_);
                    buffer_.clear();
                    return ReadStatus::Line;
                }
                return ReadStatus::Eof;
            }
            int remaining = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                                 deadline - std::chrono::steady_clock::now())
                                                 .count());
            if (remaining <= 0) return ReadStatus::Timeout;

            struct pollfd fds[2];
            fds[0] = {stdout_fd_, POLLIN, 0};
            fds[1] = {stderr_fd_, POLLIN, 0};
            int nfds = stderr_open_ ? 2 : 1;
            int rc = ::poll(fds, static_cast<nfds_t>(nfds), remaining);
            if (rc < 0) {
                if (errno == EINTR) continue;
                throw SubprocessError("poll() failed: " + std::string(std::strerror(errno)));
            }
            if (rc == 0) return ReadStatus::Timeout;
            if (stderr_open_ && (fds[1].revents & (POLLIN | POLLHUP))) {
                char buf[4096];
                ssize_t n = ::read(stderr_fd_, buf, sizeof buf);
                if (n > 0)
                    err_accum.append(buf, static_cast<size_t>(n));
                else if (n == 0)
                    stderr_open_ = false;
            }
            if (fds[0].revents & (POLLIN | POLLHUP)) {
                char buf[4096];
                ssize_t n = ::read(stdout_fd_, buf, sizeof buf);
                if (n > 0)
                    buffer_.append(buf, static_cast<size_t>(n));
                else if (n == 0)
                    stdout_eof_ = true;
            }
        }
    }

    /// Drains whatever stderr still holds (bounded wait).
    void drain_stderr(std::string& err_accum, int timeout_ms = 200) {
        auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
        while (stderr_open_) {
            int remaining = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                                 deadline - std::chrono::steady_clock::now())
                                                 .count());
            if (remaining <= 0) break;
            struct pollfd fd = {stderr_fd_, POLLIN, 0};
            int rc = ::poll(&fd, 1, remaining);
            if (rc <= 0) break;
            char buf[4096];
            ssize_t n = ::read(stderr_fd_, buf, sizeof buf);
            if (n > 0)
                err_accum.append(buf, static_cast<size_t>(n));
            else
                stderr_open_ = false;
        }
    }

    /// Terminates and reaps the child (idempotent). Returns the exit status.
    int terminate() {
        if (pid_ <= 0) return exit_status_;
        if (!reaped_) {
            ::kill(-pid_, SIGTERM);
            for (int i = 0; i < 20 && !try_reap(); ++i)
                ::usleep(100 * 1000);
            if (!reaped_) {
                ::kill(-pid_, SIGKILL);
                int status = 0;
                ::waitpid(pid_, &status, 0);
                exit_status_ = status;
                reaped_ = true;
            }
        }
        close_fds();
        return exit_status_;
    }

    /// Non-blocking reap; true once the child has exited and been collected.
    bool try_reap() {
        if (reaped_) return true;
        int status = 0;
        pid_t r = ::waitpid(pid_, &status, WNOHANG);
        if (r == pid_) {
            exit_status_ = status;
            reaped_ = true;
        }
        return reaped_;
    }

    bool reaped() const { return reaped_; }

  private:
    void close_fds() {
        for (int* fd : {&stdin_fd_, &stdout_fd_, &stderr_fd_}) {
            if (*fd >= 0) ::close(*fd);
            *fd = -1;
        }
    }

    pid_t pid_ = -1;
    int stdin_fd_ = -1, stdout_fd_ = -1, stderr_fd_ = -1;
    std::string buffer_;
    bool stdout_eof_ = false;
    bool stderr_open_ = true;
    bool reaped_ = false;
    int exit_status_ = -1;
};

// ---- external challenge loop ---------------------------------------------------

struct ExternalLimits {
    int max_turns = 200;           // state messages before the trial is cut off
    int handshake_timeout_ms = 5000;
    int read_timeout_ms = 10000;
    int wall_clock_ms = 120000;
};

enum class ExternalStatus {
    Completed,        // game reported a result
    HandshakeTimeout,
    SchemaViolation,
    SubprocessCrash,  // EOF / broken pipe before a result
    ReadTimeout,
    TurnLimitExceeded,  // recorded as a loss, flagged
    AgentFailure,       // the agent's ProtocolFailure
    GameError,          // game sent an error message
};

inline const char* external_status_name(ExternalStatus s) {
    switch (s) {
        case ExternalStatus::Completed: return "completed";
        case ExternalStatus::HandshakeTimeout: return "handshake_timeout";
        case ExternalStatus::SchemaViolation: return "schema_violation";
        case ExternalStatus::SubprocessCrash: return "subprocess_crash";
        case ExternalStatus::ReadTimeout: return "read_timeout";
        case ExternalStatus::TurnLimitExceeded: return "turn_limit_exceeded";
        case ExternalStatus::AgentFailure: return "agent_failure";
        default: return "game_error";
    }
}

struct ExternalTrialResult {
    ExternalStatus status = ExternalStatus::SubprocessCrash;
    std::string outcome;  // "win"/"loss" as reported (empty when absent)
    std::map<std::string, double> metrics;
    int turns_seen = 0;
    std::string error_detail;
    std::string stderr_text;
    pid_t child_pid = -1;  // reaped by return time; exposed for tests
    int exit_status = -1;
};

/// Drives one trial against an external game subprocess: handshake, then a
/// strict read-state / write-action loop until the game reports a result or
/// a limit trips. The child is always terminated and reaped before returning.
inline ExternalTrialResult run_external_challenge(const std::string& command,
                                                  agent::Agent& player,
                                                  agent::Transcript& transcript,
                                                  const ExternalLimits& limits = {}) {
    Subprocess proc(command);
    ExternalTrialResult out;
    out.child_pid = proc.pid();
    auto wall_deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(limits.wall_clock_ms);
    auto remaining_ms = [&](int cap) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                        wall_deadline - std::chrono::steady_clock::now())
                        .count();
        return static_cast<int>(std::min<long long>(cap, std::max<long long>(0, left)));
    };
    auto finish = [&](ExternalStatus status, const std::string& detail) {
        out.status = status;
        out.error_detail = detail;
        proc.drain_stderr(out.stderr_text);
        out.exit_status = proc.terminate();
        return out;
    };

    // --- handshake: the game speaks first ---
    std::string line;
    auto rs = proc.read_line(remaining_ms(limits.handshake_timeout_ms), line, out.stderr_text);
    if (rs == Subprocess::ReadStatus::Timeout)
        return finish(ExternalStatus::HandshakeTimeout, "no hello within handshake timeout");
    if (rs == Subprocess::ReadStatus::Eof)
        return finish(ExternalStatus::SubprocessCrash, "game exited before hello");
    ProtocolMessage hello;
    try {
        hello = decode(line);
    } catch (const SchemaError& e) {
        return finish(ExternalStatus::SchemaViolation, e.what());
    }
    if (hello.type != MessageType::Hello)
        return finish(ExternalStatus::SchemaViolation, "first message was not hello");
    if (hello.protocol_version != kProtocolVersion)
        return finish(ExternalStatus::SchemaViolation,
                      "protocol_version mismatch: game speaks " +
                          std::to_string(hello.protocol_version));
    ProtocolMessage reply;
    reply.type = MessageType::Hello;
    reply.payload = {{"role", "harness"}};
    if (!proc.write_line(encode(reply)))
        return finish(ExternalStatus::SubprocessCrash, "game closed stdin during handshake");

    // --- main loop: state -> action, half-duplex ---
    bool awaiting_result = false;  // after a terminal state only result may follow
    while (true) {
        rs = proc.read_line(remaining_ms(limits.read_timeout_ms), line, out.stderr_text);
        if (rs == Subprocess::ReadStatus::Timeout)
            return finish(ExternalStatus::ReadTimeout, "no message within read timeout");
        if (rs == Subprocess::ReadStatus::Eof)
            return finish(ExternalStatus::SubprocessCrash, "game exited without a result");
        ProtocolMessage msg;
        try {
            msg = decode(line);
        } catch (const SchemaError& e) {
            return finish(ExternalStatus::SchemaViolation, e.what());
        }
        if (msg.type == MessageType::Result) {
            out.outcome = msg.payload.at("outcome").get<std::string>();
            if (msg.payload.contains("metrics"))
                for (const auto& [k, v] : msg.payload["metrics"].items())
                    out.metrics[k] = v.get<double>();
            return finish(ExternalStatus::Completed, "");
        }
        if (msg.type == MessageType::Error)
            return finish(ExternalStatus::GameError,
                          msg.payload.at("message").get<std::string>());
        if (msg.type != MessageType::State)
            return finish(ExternalStatus::SchemaViolation,
                          std::string("unexpected message type ") + type_name(msg.type));
        if (awaiting_result)
            return finish(ExternalStatus::SchemaViolation,
                          "state received after a terminal state");

        ++out.turns_seen;
        if (out.turns_seen > limits.max_turns)
            return finish(ExternalStatus::TurnLimitExceeded, "turn limit exceeded");
        if (msg.payload.value("terminal", false)) {
            awaiting_result = true;
            continue;
        }

        agent::Observation obs;
        obs.game_id = msg.payload.value("game", "battle");
        obs.turn_index = msg.payload["turn"].get<int>();
        obs.state_text = msg.payload["state_text"].get<std::string>();
        obs.structured_state = msg.payload.value("structured_state", json::object());
        if (msg.payload.contains("legal_actions"))
            for (const auto& a : msg.payload["legal_actions"])
                obs.legal_actions.push_back(a.get<std::string>());

        std::string action_text;
        try {
            action_text = player.act(obs, transcript).parsed;
        } catch (const agent::ProtocolFailure& e) {
            return finish(ExternalStatus::AgentFailure, e.what());
        }
        ProtocolMessage act_msg;
        act_msg.type = MessageType::Action;
        act_msg.payload = {{"action_text", action_text}};
        if (!proc.write_line(encode(act_msg)))
            return finish(ExternalStatus::SubprocessCrash, "game closed stdin mid-trial");
    }
}

// ---- battle game served over stdio ------------------------------------------------

struct BattleServeOptions {
    std::string boss_name;
    std::string deck_name = "default";
    std::uint64_t seed = 0;
    int turn_cap = 50;
};

/// Runs one battle as the game side of the protocol: hello handshake, then a
/// state message per decision point, reading one action back each time, and a
/// final result message. The rules engine is the library's own run_battle, so
/// behavior is identical to in-process execution by construction.
inline int serve_battle_over_stdio(const battle::BattleFixtures& fixtures,
                                   const BattleServeOptions& opts, std::istream& in,
                                   std::ostream& out) {
    struct Abort {
        std::string why;
    };
    auto say = [&](const ProtocolMessage& m) {
        out << encode(m);
        out.flush();
    };
    try {
        const battle::BossSpec& boss = fixtures.boss(opts.boss_name);
        const auto& deck = fixtures.deck(opts.deck_name);

        ProtocolMessage hello;
        hello.type = MessageType::Hello;
        hello.payload = {{"game", "battle"}, {"challenge_id", boss.name}};
        say(hello);
        std::string line;
        if (!std::getline(in, line)) throw Abort{"no hello from harness"};
        ProtocolMessage reply = decode(line);
        if (reply.type != MessageType::Hello) throw Abort{"expected hello from harness"};
        if (reply.protocol_version != kProtocolVersion)
            throw Abort{"protocol_version mismatch"};

        int decision_index = 0;
        auto policy = [&](const battle::BattleState& st,
                          const std::vector<std::string>& legal) -> std::string {
            ProtocolMessage state;
            state.type = MessageType::State;
            state.payload = {{"game", "battle"},
                             {"challenge_id", boss.name},
                             {"turn", decision_index},
                             {"state_text", battle::describe_state(st)},
                             {"structured_state", battle::make_structured_state(st)},
                             {"legal_actions", legal},
                             {"terminal", false},
                             {"metrics",
                              {{"hp_remaining", st.player.hp}, {"turns", st.turn}}}};
            ++decision_index;
            say(state);
            std::string action_line;
            if (!std::getline(in, action_line)) throw Abort{"harness closed the stream"};
            ProtocolMessage action = decode(action_line);
            if (action.type != MessageType::Action) throw Abort{"expected an action message"};
            return action.payload.at("action_text").get<std::string>();
        };

        battle::BattleResult result = battle::run_battle(boss, deck, policy, opts.seed,
                                                         opts.turn_cap, fixtures.player_hp);
        ProtocolMessage res;
        res.type = MessageType::Result;
        res.payload = {
            {"outcome", result.outcome == battle::BattleOutcome::Win ? "win" : "loss"},
            {"metrics",
             {{"hp_remaining", result.hp_remaining},
              {"turns", result.turns},
              {"turn_cap_exceeded", result.turn_cap_exceeded ? 1 : 0},
              {"illegal_plays", result.illegal_plays}}}};
        say(res);
        return 0;
    } catch (const Abort& a) {
        ProtocolMessage err;
        err.type = MessageType::Error;
        err.payload = {{"message", a.why}};
        say(err);
        return 1;
    } catch (const std::exception& e) {
        ProtocolMessage err;
        err.type = MessageType::Error;
        err.payload = {{"message", std::string("internal error: ") + e.what()}};
        say(err);
        return 1;
    }
}

}  // namespace diffprobe::protocol
