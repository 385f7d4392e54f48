// diffprobe: run game-difficulty experiments, benchmark the reference solver,
// correlate agent results against human statistics, and exercise the stdio
// game protocol.
//
// Exit codes: 0 success, 2 input error, 3 runtime IO error, 4 statistics
// error, 64 unknown flag / bad invocation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "diffprobe/agent.hpp"
#include "diffprobe/battle.hpp"
#include "diffprobe/harness.hpp"
#include "diffprobe/prompts.hpp"
#include "diffprobe/protocol.hpp"
#include "diffprobe/report.hpp"
#include "diffprobe/stats.hpp"
#include "diffprobe/transport.hpp"
#include "diffprobe/wordle.hpp"
#include "diffprobe/wordle_solver.hpp"

namespace {

using nlohmann::json;
using namespace diffprobe;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitStats = 4;
constexpr int kExitUsage = 64;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Global options shared by every subcommand; a JSON config file can supply
// any of them, with command-line flags taking precedence.
struct GlobalOpts {
    std::string config_path;
    std::string out_dir = "runs/latest";
    std::uint64_t seed = 0;
    int parallelism = 1;
    int trials = 20;
    int guess_cap = 12;
    json config = json::object();  // parsed config file (empty when none)
    json effective() const {
        json j = config;
        j["out_dir"] = out_dir;
        j["seed"] = seed;
        j["parallelism"] = parallelism;
        j["trials"] = trials;
        j["guess_cap"] = guess_cap;
        return j;
    }
};

void load_config_file(GlobalOpts& g, const CLI::App& app) {
    if (g.config_path.empty()) return;
    std::ifstream in(g.config_path);
    if (!in) throw InputError("cannot open config file: " + g.config_path);
    try {
        in >> g.config;
    } catch (const std::exception& e) {
        throw InputError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!g.config.is_object()) throw InputError("config file must hold a JSON object");
    // Flags override config: only absorb keys whose flag was not passed.
    auto absorb = [&](const char* flag, auto& target, const char* key) {
        if (app.count(flag) == 0 && g.config.contains(key))
            target = g.config[key].get<std::decay_t<decltype(target)>>();
    };
    absorb("--out-dir", g.out_dir, "out_dir");
    absorb("--seed", g.seed, "seed");
    absorb("--parallelism", g.parallelism, "parallelism");
    absorb("--trials", g.trials, "trials");
    absorb("--guess-cap", g.guess_cap, "guess_cap");
}

std::vector<wordle::Word> read_answer_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open answers file: " + path);
    std::vector<wordle::Word> words;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto w = wordle::Word::parse(line);
        if (!w) throw InputError("answers file " + path + ": bad word '" + line + "'");
        words.push_back(*w);
    }
    if (words.empty()) throw InputError("answers file " + path + " has no words");
    return words;
}

std::shared_ptr<agent::ChatTransport> make_llm_transport(const GlobalOpts& g,
                                                         const std::string& endpoint_flag) {
    agent::HttpTransportOptions opts;
    std::string endpoint = endpoint_flag;
    if (endpoint.empty() && g.config.contains("endpoint"))
        endpoint = g.config["endpoint"].get<std::string>();
    if (endpoint.empty())
        throw InputError("LLM agent configured but no --endpoint (or config 'endpoint') given");
    opts.endpoint_url = endpoint;
    return std::make_shared<agent::HttpChatTransport>(opts);
}

// ---- bench-solver ----------------------------------------------------------------

int cmd_bench_solver(const GlobalOpts& g, const std::string& allowed_path,
                     const std::string& answers_path, int limit, std::string out_csv) {
    auto list = wordle::load_word_list(allowed_path, answers_path);
    if (limit > 0 && static_cast<size_t>(limit) < list.answers().size()) {
        std::vector<wordle::Word> trimmed(list.answers().begin(),
                                          list.answers().begin() + limit);
        list = wordle::WordList(list.allowed(), std::move(trimmed));
    }
    auto bench = wordle::bench_solver(list, g.guess_cap);

    std::filesystem::create_directories(g.out_dir);
    if (out_csv.empty()) out_csv = g.out_dir + "/bench_solver.csv";
    std::ofstream out(out_csv, std::ios::trunc);
    if (!out) throw harness::IoError("cannot write " + out_csv);
    out << "answer,guesses,solved\n";
    for (const auto& row : bench.rows)
        out << row.answer.str() << "," << row.guesses << "," << (row.solved ? 1 : 0) << "\n";
    if (!out.flush()) throw harness::IoError("short write to " + out_csv);

    // 3.97 is the published global human average for comparison.
    std::printf(
        "bench-solver: n=%zu mean_guesses=%.4f win_within_6=%.2f%% win_within_%d=%.2f%% "
        "(human reference avg 3.97)\n",
        bench.rows.size(), bench.mean_guesses, 100.0 * bench.win_rate_within_6, g.guess_cap,
        100.0 * bench.win_rate_within_cap);
    std::printf("wrote %s\n", out_csv.c_str());
    return kExitOk;
}

// ---- run ------------------------------------------------------------------------------

int cmd_run(const GlobalOpts& g, const CLI::App& sub, std::string game,
            std::vector<std::string> agent_specs, std::string answers_path, int limit,
            std::vector<std::string> bosses, std::string fixtures_path,
            std::string external_cmd, std::string external_id, int turn_cap,
            bool strict_dictionary, bool transcripts, const std::string& endpoint,
            const std::string& allowed_path) {
    // Config-file fallbacks for run-specific settings.
    auto cfg_str = [&](const char* flag, std::string& v, const char* key) {
        if (sub.count(flag) == 0 && g.config.contains(key))
            v = g.config[key].get<std::string>();
    };
    cfg_str("--game", game, "game");
    cfg_str("--answers", answers_path, "answers");
    cfg_str("--fixtures", fixtures_path, "fixtures");
    if (sub.count("--agent") == 0 && g.config.contains("agents"))
        agent_specs = g.config["agents"].get<std::vector<std::string>>();
    if (sub.count("--boss") == 0 && g.config.contains("bosses"))
        bosses = g.config["bosses"].get<std::vector<std::string>>();
    if (sub.count("--turn-cap") == 0 && g.config.contains("turn_cap"))
        turn_cap = g.config["turn_cap"].get<int>();
    if (sub.count("--limit") == 0 && g.config.contains("limit"))
        limit = g.config["limit"].get<int>();

    if (game != "wordle" && game != "battle" && game != "external")
        throw InputError("--game must be wordle, battle, or external");
    if (agent_specs.empty())
        throw InputError("at least one --agent is required (e.g. --agent solver)");

    // Assemble challenges.
    std::optional<wordle::WordList> words;
    std::optional<battle::BattleFixtures> fixtures;
    std::vector<harness::Challenge> challenges;
    if (game == "wordle") {
        auto answers = read_answer_file(answers_path);
        if (limit > 0 && static_cast<size_t>(limit) < answers.size()) answers.resize(limit);
        words = wordle::load_word_list(allowed_path, answers_path);
        for (const auto& w : answers) challenges.push_back(harness::Challenge::wordle_answer(w));
    } else if (game == "battle") {
        fixtures = battle::load_fixtures(fixtures_path);
        if (bosses.empty())
            for (const auto& b : fixtures->bosses) bosses.push_back(b.name);
        for (const auto& name : bosses) {
            fixtures->boss(name);  // validate early
            challenges.push_back(harness::Challenge::battle_boss(name));
        }
    } else {
        if (external_cmd.empty())
            throw InputError("--game external requires --external-cmd");
        if (external_id.empty()) external_id = "external";
        challenges.push_back(harness::Challenge::external(external_id, external_cmd));
    }

    // Assemble agents; a shared transport is created only when an LLM agent
    // is explicitly configured.
    std::vector<harness::AgentSetup> setups;
    std::shared_ptr<agent::ChatTransport> transport;
    for (const auto& spec : agent_specs) {
        harness::AgentSetup s;
        s.config = agent::parse_agent_spec(spec);
        if (s.config.is_llm()) {
            if (!transport) transport = make_llm_transport(g, endpoint);
            s.transport = transport;
        }
        setups.push_back(std::move(s));
    }

    harness::RunConfig rc;
    rc.trials_per_challenge = g.trials;
    rc.guess_cap = g.guess_cap;
    rc.turn_cap = turn_cap;
    rc.parallelism = g.parallelism;
    rc.base_seed = g.seed;
    rc.output_dir = g.out_dir;
    rc.strict_dictionary = strict_dictionary;
    if (transcripts) rc.transcript_dir = g.out_dir + "/transcripts";
    rc.config_echo = g.effective();
    rc.config_echo["game"] = game;
    rc.config_echo["agents"] = agent_specs;
    if (game == "wordle") {
        rc.provenance["word_list_hash"] =
            diffprobe::detail::hex64(diffprobe::detail::fnv1a64_file(allowed_path) ^
                                      diffprobe::detail::fnv1a64_file(answers_path));
    } else if (game == "battle") {
        rc.provenance["fixture_hash"] =
            diffprobe::detail::hex64(diffprobe::detail::fnv1a64_file(fixtures_path));
    }
    long done = 0;
    const long total =
        static_cast<long>(challenges.size()) * static_cast<long>(setups.size()) * g.trials;
    rc.progress = [&](const harness::TrialRecord& r) {
        ++done;
        std::fprintf(stderr, "[%ld/%ld] %s %s #%d %s\n", done, total, r.challenge_id.c_str(),
                     r.agent_id.c_str(), r.trial_index, harness::outcome_name(r.outcome));
    };

    harness::RunEnvironment env;
    if (words) env.words = &*words;
    if (fixtures) env.fixtures = &*fixtures;
    auto records = harness::run(rc, challenges, setups, env);

    long pf = 0;
    for (const auto& r : records)
        if (r.outcome == harness::TrialOutcome::ProtocolFailure) ++pf;
    std::printf("run complete: %zu records (%ld protocol failures) in %s/trials.jsonl\n",
                records.size(), pf, g.out_dir.c_str());
    return kExitOk;  // protocol failures are data, not an error
}

// ---- correlate -----------------------------------------------------------------------

int cmd_correlate(const GlobalOpts& g, bool guess_cap_explicit, std::string trials_path,
                  const std::string& human_path, std::string metric,
                  bool exclude_protocol_failures, bool no_markdown, bool no_svg,
                  const report::CsvSchema& schema, bool rank_descending) {
    if (trials_path.empty()) trials_path = g.out_dir + "/trials.jsonl";
    if (!std::filesystem::exists(trials_path))
        throw InputError("trials file not found: " + trials_path);
    if (!std::filesystem::exists(human_path))
        throw InputError("human stats CSV not found: " + human_path);

    auto records = harness::load_trial_log(trials_path);
    if (records.empty()) throw InputError("no trial records in " + trials_path);

    // Prefer the run's own guess cap from its manifest; flags still win.
    int guess_cap = g.guess_cap;
    std::string manifest_hash;
    {
        auto manifest_path =
            std::filesystem::path(trials_path).parent_path() / "manifest.json";
        if (std::filesystem::exists(manifest_path)) {
            manifest_hash = diffprobe::detail::hex64(
                diffprobe::detail::fnv1a64_file(manifest_path.string()));
            if (!guess_cap_explicit && !g.config.contains("guess_cap")) {
                std::ifstream in(manifest_path);
                json m;
                in >> m;
                if (m.contains("guess_cap")) guess_cap = m["guess_cap"].get<int>();
            }
        }
    }

    auto aggregates = harness::aggregate(
        records, {.guess_cap = guess_cap, .exclude_protocol_failures = exclude_protocol_failures});
    if (aggregates.empty()) throw InputError("aggregation produced no rows");
    auto human = report::load_human_csv(human_path, schema);

    // One series per agent over its primary metric (or the explicit override).
    std::map<std::string, stats::MetricSeries> per_agent;
    for (const auto& a : aggregates) {
        std::string m = metric;
        if (m.empty()) m = report::detail_report::primary_metric_name(a);
        auto v = report::aggregate_metric(a, m);
        if (!v)
            throw report::MissingMetric("agent " + a.agent_id + " challenge " + a.challenge_id +
                                        ": no metric '" + m + "'");
        auto& series = per_agent[a.agent_id];
        series.label = a.agent_id;
        series.values[a.challenge_id] = *v;
    }
    stats::MetricSeries human_series;
    human_series.label = "human/" + schema.avg_metric;
    for (const auto& h : human) human_series.values[h.challenge_id] = h.avg_metric;

    std::vector<stats::JoinedCorrelation> correlations;
    for (const auto& [aid, series] : per_agent) {
        try {
            correlations.push_back(stats::correlate_series(series, human_series));
        } catch (const stats::DegenerateInput& e) {
            throw stats::DegenerateInput("agent '" + aid + "': " + e.what());
        }
    }

    report::ReportOptions opts;
    opts.out_dir = g.out_dir;
    opts.write_markdown = !no_markdown;
    opts.write_svg = !no_svg;
    opts.manifest_hash = manifest_hash;
    opts.human_metric_label = schema.avg_metric;
    opts.rank_direction =
        rank_descending ? report::RankDirection::Descending : report::RankDirection::Ascending;
    auto files = report::render_report(aggregates, human, correlations, opts);

    for (const auto& c : correlations)
        std::printf("agent=%s n=%ld r=%.6f p=%s strength=%s\n", c.agent_label.c_str(),
                    c.result.n, c.result.r, report::format_p(c.result.p).c_str(),
                    stats::bucket_name(c.result.strength));
    std::printf("wrote %s, %s%s%s\n", files.csv_path.c_str(), files.json_path.c_str(),
                files.md_path.empty() ? "" : (", " + files.md_path).c_str(),
                files.svg_paths.empty() ? "" : (", " + std::to_string(files.svg_paths.size()) +
                                                    " scatter plot(s)")
                                                   .c_str());
    return kExitOk;
}

// ---- demo-battle ----------------------------------------------------------------------

int cmd_demo_battle(const GlobalOpts& g, const std::string& fixtures_path,
                    const std::string& boss, const std::string& deck,
                    const std::string& agent_spec, int turn_cap, bool stdio_mode) {
    auto fixtures = battle::load_fixtures(fixtures_path);
    if (stdio_mode) {
        protocol::BattleServeOptions opts;
        opts.boss_name = boss;
        opts.deck_name = deck;
        opts.seed = g.seed;
        opts.turn_cap = turn_cap;
        return protocol::serve_battle_over_stdio(fixtures, opts, std::cin, std::cout) == 0
                   ? kExitOk
                   : kExitRuntime;
    }

    auto cfg = agent::parse_agent_spec(agent_spec);
    agent::Agent player(cfg, agent::battle_prompt_bundle());
    player.begin_trial(g.seed);
    agent::Transcript transcript;
    int decision_index = 0;
    battle::BattlePolicy policy = [&](const battle::BattleState& st,
                                      const std::vector<std::string>&) {
        std::printf("%s\n", battle::describe_state(st).c_str());
        auto action = player.act(agent::battle_observation(st, decision_index++), transcript);
        std::printf(">> %s\n\n", action.parsed.c_str());
        return action.parsed;
    };
    auto result =
        battle::run_battle(fixtures.boss(boss), fixtures.deck(deck), policy, g.seed, turn_cap,
                           fixtures.player_hp);
    std::printf("outcome=%s hp_remaining=%d turns=%d illegal_plays=%d\n",
                result.outcome == battle::BattleOutcome::Win ? "win" : "loss",
                result.hp_remaining, result.turns, result.illegal_plays);
    return kExitOk;
}

// ---- protocol-check -------------------------------------------------------------------

int cmd_protocol_check(const GlobalOpts& g, const std::string& command, int max_turns,
                       int timeout_ms) {
    auto cfg = agent::parse_agent_spec("random");
    cfg.seed = g.seed;
    agent::Agent probe(cfg, agent::battle_prompt_bundle());
    probe.begin_trial(g.seed);
    agent::Transcript transcript;

    protocol::ExternalLimits limits;
    limits.max_turns = max_turns;
    limits.handshake_timeout_ms = timeout_ms;
    limits.read_timeout_ms = timeout_ms;
    auto result = protocol::run_external_challenge(command, probe, transcript, limits);

    std::printf("handshake: %s\n",
                result.status == protocol::ExternalStatus::HandshakeTimeout ? "FAIL (timeout)"
                                                                            : "ok");
    std::printf("turns seen: %d\n", result.turns_seen);
    std::printf("status: %s\n", protocol::external_status_name(result.status));
    if (!result.outcome.empty()) std::printf("outcome: %s\n", result.outcome.c_str());
    for (const auto& [k, v] : result.metrics) std::printf("metric %s=%g\n", k.c_str(), v);
    if (!result.error_detail.empty()) std::printf("detail: %s\n", result.error_detail.c_str());
    if (result.status == protocol::ExternalStatus::Completed) {
        std::printf("protocol-check: PASS\n");
        return kExitOk;
    }
    if (!result.stderr_text.empty())
        std::fprintf(stderr, "game stderr:\n%s\n", result.stderr_text.c_str());
    std::printf("protocol-check: FAIL\n");
    return kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diffprobe: game difficulty measurement harness"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON config file (flags override its values)");
    app.add_option("--out-dir", g.out_dir, "run directory for outputs")
        ->capture_default_str();
    app.add_option("--seed", g.seed, "base seed")->capture_default_str();
    app.add_option("--parallelism", g.parallelism, "worker threads")->capture_default_str();
    app.add_option("--trials", g.trials, "trials per challenge")->capture_default_str();
    app.add_option("--guess-cap", g.guess_cap, "maximum guesses per puzzle")
        ->capture_default_str();

    // bench-solver
    auto* bench = app.add_subcommand("bench-solver", "benchmark the reference solver");
    std::string b_allowed = "data/wordle_allowed.txt";
    std::string b_answers = "data/wordle_answers.txt";
    int b_limit = 0;
    std::string b_out;
    bench->add_option("--allowed", b_allowed, "allowed-guess list")->capture_default_str();
    bench->add_option("--answers", b_answers, "answer list")->capture_default_str();
    bench->add_option("--limit", b_limit, "benchmark only the first N answers");
    bench->add_option("--out", b_out, "benchmark CSV path (default <out-dir>/bench_solver.csv)");

    // run
    auto* run = app.add_subcommand("run", "run an experiment grid");
    std::string r_game = "wordle";
    std::vector<std::string> r_agents;
    std::string r_answers = "data/wordle_answers.txt";
    std::string r_allowed = "data/wordle_allowed.txt";
    int r_limit = 0;
    std::vector<std::string> r_bosses;
    std::string r_fixtures = "data/battle_fixtures.json";
    std::string r_external_cmd, r_external_id;
    int r_turn_cap = 50;
    bool r_strict = false, r_transcripts = false;
    std::string r_endpoint;
    run->add_option("--game", r_game, "wordle | battle | external")->capture_default_str();
    run->add_option("--agent", r_agents,
                    "agent spec: solver | random | scripted:expert | zs:<model> | cot:<model> "
                    "| cot+:<model> (repeatable)");
    run->add_option("--answers", r_answers, "wordle answer list")->capture_default_str();
    run->add_option("--allowed", r_allowed, "wordle allowed-guess list")->capture_default_str();
    run->add_option("--limit", r_limit, "use only the first N wordle answers");
    run->add_option("--boss", r_bosses, "battle boss name (repeatable; default: full roster)");
    run->add_option("--fixtures", r_fixtures, "battle fixtures JSON")->capture_default_str();
    run->add_option("--external-cmd", r_external_cmd, "external game shell command");
    run->add_option("--challenge-id", r_external_id, "challenge id for --game external");
    run->add_option("--turn-cap", r_turn_cap, "battle turn cap")->capture_default_str();
    run->add_flag("--strict-dictionary", r_strict, "reject non-dictionary submissions");
    run->add_flag("--transcripts", r_transcripts, "persist per-trial transcripts");
    run->add_option("--endpoint", r_endpoint, "chat completion endpoint URL for LLM agents");

    // correlate
    auto* corr = app.add_subcommand("correlate", "correlate agent results with human stats");
    std::string c_trials, c_human, c_metric;
    bool c_exclude = false, c_no_md = false, c_no_svg = false, c_rank_desc = false;
    report::CsvSchema c_schema;
    corr->add_option("--trials", c_trials, "trials.jsonl path (default <out-dir>/trials.jsonl)");
    corr->add_option("--human", c_human, "human statistics CSV")->required();
    corr->add_option("--metric", c_metric,
                     "agent metric: avg_guesses | avg_hp_remaining | win_rate (default: "
                     "per-game primary)");
    corr->add_flag("--exclude-protocol-failures", c_exclude,
                   "drop protocol-failure trials from aggregates");
    corr->add_flag("--no-markdown", c_no_md, "skip report.md");
    corr->add_flag("--no-svg", c_no_svg, "skip scatter plots");
    corr->add_flag("--rank-descending", c_rank_desc,
                   "higher human metric = rank 1 (use for HP-style metrics)");
    corr->add_option("--id-col", c_schema.challenge_id, "human CSV id column")
        ->capture_default_str();
    corr->add_option("--metric-col", c_schema.avg_metric, "human CSV metric column")
        ->capture_default_str();
    corr->add_option("--rate-col", c_schema.win_rate, "human CSV win-rate column")
        ->capture_default_str();
    corr->add_option("--size-col", c_schema.sample_size, "human CSV sample-size column")
        ->capture_default_str();

    // demo-battle
    auto* demo = app.add_subcommand("demo-battle", "play one battle (or serve it over stdio)");
    std::string d_fixtures = "data/battle_fixtures.json";
    std::string d_boss = "Clay Golem";
    std::string d_deck = "default";
    std::string d_agent = "scripted:expert";
    int d_turn_cap = 50;
    bool d_stdio = false;
    demo->add_option("--fixtures", d_fixtures, "battle fixtures JSON")->capture_default_str();
    demo->add_option("--boss", d_boss, "boss name")->capture_default_str();
    demo->add_option("--deck", d_deck, "deck name")->capture_default_str();
    demo->add_option("--agent", d_agent, "agent spec for the player")->capture_default_str();
    demo->add_option("--turn-cap", d_turn_cap, "turn cap")->capture_default_str();
    demo->add_flag("--stdio", d_stdio, "serve the battle as a protocol game on stdin/stdout");

    // protocol-check
    auto* check = app.add_subcommand("protocol-check", "validate an external game command");
    std::string k_cmd;
    int k_max_turns = 200, k_timeout = 10000;
    check->add_option("--cmd", k_cmd, "shell command that speaks the stdio protocol")
        ->required();
    check->add_option("--max-turns", k_max_turns, "turn limit")->capture_default_str();
    check->add_option("--timeout-ms", k_timeout, "per-read and handshake timeout")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ExtrasError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        // Unrecognized or malformed flags are usage errors; bad values are
        // input errors.
        return std::string(e.get_name()) == "RequiredError" ? kExitInput : kExitUsage;
    }

    try {
        load_config_file(g, app);
        if (bench->parsed())
            return cmd_bench_solver(g, b_allowed, b_answers, b_limit, b_out);
        if (run->parsed())
            return cmd_run(g, *run, r_game, r_agents, r_answers, r_limit, r_bosses, r_fixtures,
                           r_external_cmd, r_external_id, r_turn_cap, r_strict, r_transcripts,
                           r_endpoint, r_allowed);
        if (corr->parsed())
            return cmd_correlate(g, app.count("--guess-cap") > 0, c_trials, c_human, c_metric,
                                 c_exclude, c_no_md, c_no_svg, c_schema, c_rank_desc);
        if (demo->parsed())
            return cmd_demo_battle(g, d_fixtures, d_boss, d_deck, d_agent, d_turn_cap, d_stdio);
        if (check->parsed()) return cmd_protocol_check(g, k_cmd, k_max_turns, k_timeout);
        std::fprintf(stderr, "error: no subcommand\n");
        return kExitUsage;
    } catch (const stats::JoinTooSmall& e) {
        std::fprintf(stderr, "statistics error: %s\n", e.what());
        return kExitStats;
    } catch (const stats::DegenerateInput& e) {
        std::fprintf(stderr, "statistics error: %s\n", e.what());
        return kExitStats;
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const report::SchemaError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const report::RangeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const report::MissingMetric& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const wordle::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const battle::FixtureError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const agent::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const report::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitRuntime;
    } catch (const harness::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}
