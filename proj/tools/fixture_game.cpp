// fixture_game: a tiny external game speaking the NDJSON stdio protocol,
// used to exercise the adapter. Fault-injection flags simulate misbehaving
// games: garbage output, mid-trial crashes, hangs, version mismatches, and
// missing results.
//
// Deliberately written against the protocol document alone (plain iostream,
// no library headers) so it stands in for a third-party implementation.

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>
#include <thread>

#include "json.hpp"

using nlohmann::json;

int main(int argc, char** argv) {
    int turns = 3;
    int crash_after = -1;      // emit this many states, then _exit(7)
    bool garbage = false;      // emit a non-JSON line before the first state
    bool hang = false;         // never send hello
    bool wrong_version = false;
    bool no_result = false;    // terminal state, then EOF without a result
    bool stderr_noise = false;
    std::string outcome = "win";
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--turns" && i + 1 < argc) turns = std::atoi(argv[++i]);
        else if (a == "--crash-after" && i + 1 < argc) crash_after = std::atoi(argv[++i]);
        else if (a == "--garbage") garbage = true;
        else if (a == "--hang") hang = true;
        else if (a == "--wrong-version") wrong_version = true;
        else if (a == "--no-result") no_result = true;
        else if (a == "--stderr-noise") stderr_noise = true;
        else if (a == "--outcome" && i + 1 < argc) outcome = argv[++i];
        else {
            std::cerr << "fixture_game: unknown flag " << a << "\n";
            return 2;
        }
    }

    auto say = [](const json& j) {
        std::cout << j.dump() << "\n";
        std::cout.flush();
    };

    if (hang) {
        // Simulate a game that starts but never speaks.
        std::this_thread::sleep_for(std::chrono::hours(1));
        return 0;
    }

    say({{"type", "hello"},
         {"protocol_version", wrong_version ? 99 : 1},
         {"payload", {{"role", "game"}, {"game", "echo"}, {"name", "fixture_game"}}}});

    std::string line;
    if (!std::getline(std::cin, line)) return 1;  // expect the harness hello back

    for (int t = 0; t < turns; ++t) {
        if (garbage && t == 0) {
            std::cout << "this is not JSON\n";
            std::cout.flush();
        }
        if (crash_after >= 0 && t >= crash_after) {
            if (stderr_noise) std::cerr << "fixture_game: crashing as requested\n";
            std::_Exit(7);
        }
        if (stderr_noise) std::cerr << "fixture_game: turn " << t << "\n";
        say({{"type", "state"},
             {"protocol_version", 1},
             {"payload",
              {{"challenge_id", "fixture"},
               {"game", "echo"},
               {"turn", t},
               {"state_text", "Round " + std::to_string(t + 1) + ". Pick a token."},
               {"structured_state", {{"round", t}}},
               {"legal_actions", {"alpha", "bravo", "charlie"}},
               {"terminal", false},
               {"metrics", {{"progress", t}}}}}});
        if (!std::getline(std::cin, line)) return 1;
        json action;
        try {
            action = json::parse(line);
        } catch (...) {
            say({{"type", "error"},
                 {"protocol_version", 1},
                 {"payload", {{"message", "unparseable action line"}}}});
            return 1;
        }
        if (action.value("type", "") != "action") {
            say({{"type", "error"},
                 {"protocol_version", 1},
                 {"payload", {{"message", "expected an action message"}}}});
            return 1;
        }
    }

    say({{"type", "state"},
         {"protocol_version", 1},
         {"payload",
          {{"challenge_id", "fixture"},
           {"game", "echo"},
           {"turn", turns},
           {"state_text", "Done."},
           {"structured_state", json::object()},
           {"legal_actions", json::array()},
           {"terminal", true},
           {"metrics", {{"progress", turns}}}}}});
    if (no_result) return 0;

    say({{"type", "result"},
         {"protocol_version", 1},
         {"payload",
          {{"challenge_id", "fixture"},
           {"outcome", outcome},
           {"metrics", {{"turns", turns}, {"score", turns * 10}}}}}});
    return 0;
}
