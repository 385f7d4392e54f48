#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "diffprobe/detail/common.hpp"

namespace diffprobe::battle {

using nlohmann::json;

struct IllegalPlay : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FixtureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Card {
    std::string name;
    int cost = 0;
    int damage = 0;
    int block = 0;
    int strength_multiplier = 0;  // damage gains multiplier x current strength
    int applies_vulnerable = 0;   // turns of vulnerable applied to the target
    int grants_strength = 0;
    int draw = 0;
    bool requires_attack_intent = false;  // playable only on an enemy about to attack

    bool targets_enemy() const {
        return damage > 0 || strength_multiplier > 0 || applies_vulnerable > 0 ||
               requires_attack_intent;
    }

    bool has_effect() const {
        return damage > 0 || block > 0 || strength_multiplier > 0 || applies_vulnerable > 0 ||
               grants_strength > 0 || draw > 0;
    }
};

/// Human-readable effect line, also used in prompts.
inline std::string card_text(const Card& c) {
    std::string out;
    auto add = [&](const std::string& s) {
        if (!out.empty()) out += " ";
        out += s;
    };
    if (c.damage > 0) {
        std::string dmg = "Deal " + std::to_string(c.damage) + " damage.";
        if (c.strength_multiplier > 1)
            dmg = "Deal " + std::to_string(c.damage) + " damage. Strength affects this card " +
                  std::to_string(c.strength_multiplier) + " times.";
        add(dmg);
    }
    if (c.applies_vulnerable > 0)
        add("Apply " + std::to_string(c.applies_vulnerable) + " vulnerable to the enemy.");
    if (c.block > 0) add("Gain " + std::to_string(c.block) + " block.");
    if (c.grants_strength > 0) {
        if (c.requires_attack_intent)
            add("If the enemy intends to attack, gain " + std::to_string(c.grants_strength) +
                " strength.");
        else
            add("Gain " + std::to_string(c.grants_strength) + " strength.");
    }
    if (c.draw > 0) add("Draw " + std::to_string(c.draw) + " card" + (c.draw > 1 ? "s." : "."));
    return out;
}

struct Combatant {
    std::string name;
    int hp = 0;
    int max_hp = 0;
    int block = 0;
    int strength = 0;
    int vulnerable_turns = 0;

    bool alive() const { return hp > 0; }
};

enum class IntentKind { Attack, Debuff, Block };

struct Intent {
    IntentKind kind = IntentKind::Attack;
    int amount = 0;
};

inline std::string intent_text(const Intent& it) {
    switch (it.kind) {
        case IntentKind::Attack: return "Attack, " + std::to_string(it.amount) + " damage";
        case IntentKind::Debuff: return "Debuff";
        default: return "Block, " + std::to_string(it.amount);
    }
}

struct BossSpec {
    std::string name;
    int hp = 0;
    std::vector<Intent> intent_script;  // cycles
};

/// Attack damage: base plus strength scaling, then the vulnerable multiplier.
/// Vulnerable adds 50%, rounded down. Applies to attacks only, never block.
inline int compute_damage(int base, int strength, int multiplier, bool target_vulnerable) {
    if (base < 0) throw std::invalid_argument("base damage must be non-negative");
    int raw = base + multiplier * strength;
    if (target_vulnerable) raw = raw * 3 / 2;
    return raw;
}

struct BattleState {
    Combatant player;
    std::vector<Combatant> enemies;
    std::vector<BossSpec> enemy_specs;
    std::vector<size_t> intent_pos;  // per-enemy cursor into its script
    int energy = 3;
    std::vector<Card> hand;
    std::vector<Card> draw_pile;     // drawn from the back
    std::vector<Card> discard_pile;
    int turn = 1;
    std::uint64_t rng_state = 0;

    const Intent& current_intent(size_t enemy_idx) const {
        const auto& script = enemy_specs[enemy_idx].intent_script;
        return script[intent_pos[enemy_idx] % script.size()];
    }

    bool enemies_defeated() const {
        return std::none_of(enemies.begin(), enemies.end(),
                            [](const Combatant& c) { return c.alive(); });
    }
};

inline constexpr int kEnergyPerTurn = 3;
inline constexpr int kHandSize = 5;

namespace detail_battle {

inline void shuffle(std::vector<Card>& cards, std::uint64_t& rng_state) {
    diffprobe::detail::SplitMix64 rng(rng_state);
    // Fisher-Yates, explicit so shuffles are identical across standard libraries
    for (size_t i = cards.size(); i > 1; --i) {
        size_t j = rng.bounded(i);
        std::swap(cards[i - 1], cards[j]);
    }
    rng_state = rng.next();
}

inline void draw_cards(BattleState& st, int n) {
    for (int i = 0; i < n; ++i) {
        if (st.draw_pile.empty()) {
            if (st.discard_pile.empty()) return;  // nothing left to draw
            st.draw_pile = std::move(st.discard_pile);
            st.discard_pile.clear();
            shuffle(st.draw_pile, st.rng_state);
        }
        st.hand.push_back(std::move(st.draw_pile.back()));
        st.draw_pile.pop_back();
    }
}

inline void deal_to(Combatant& target, int dmg) {
    int absorbed = std::min(target.block, dmg);
    target.block -= absorbed;
    target.hp = std::max(0, target.hp - (dmg - absorbed));
}

}  // namespace detail_battle

inline BattleState init_battle(const BossSpec& boss, const std::vector<Card>& deck,
                               std::uint64_t seed, int player_hp = 80,
                               const std::string& player_name = "Player") {
    if (deck.empty()) throw std::invalid_argument("deck must be non-empty");
    if (boss.intent_script.empty()) throw std::invalid_argument("boss intent script is empty");
    BattleState st;
    st.player = Combatant{player_name, player_hp, player_hp, 0, 0, 0};
    st.enemies.push_back(Combatant{boss.name, boss.hp, boss.hp, 0, 0, 0});
    st.enemy_specs.push_back(boss);
    st.intent_pos.push_back(0);
    st.energy = kEnergyPerTurn;
    st.draw_pile = deck;
    st.rng_state = diffprobe::detail::splitmix64(seed ^ 0xb7e151628aed2a6bull);
    detail_battle::shuffle(st.draw_pile, st.rng_state);
    detail_battle::draw_cards(st, kHandSize);
    return st;
}

/// Plays hand[hand_index] (optionally at enemies[target_index]) and returns
/// the successor state. Throws IllegalPlay without side effects.
inline BattleState play_card(const BattleState& state, size_t hand_index,
                             std::optional<size_t> target_index = std::nullopt) {
    if (hand_index >= state.hand.size()) throw IllegalPlay("no such card in hand");
    const Card& card = state.hand[hand_index];
    if (state.energy < card.cost)
        throw IllegalPlay("not enough energy for " + card.name + " (cost " +
                          std::to_string(card.cost) + ", have " + std::to_string(state.energy) +
                          ")");
    size_t target = 0;
    if (card.targets_enemy()) {
        if (!target_index) {
            // unambiguous when a single enemy is alive
            size_t alive_count = 0;
            for (size_t i = 0; i < state.enemies.size(); ++i)
                if (state.enemies[i].alive()) {
                    target = i;
                    ++alive_count;
                }
            if (alive_count != 1) throw IllegalPlay(card.name + " needs a target");
        } else {
            target = *target_index;
        }
        if (target >= state.enemies.size() || !state.enemies[target].alive())
            throw IllegalPlay("invalid target for " + card.name);
        if (card.requires_attack_intent &&
            state.current_intent(target).kind != IntentKind::Attack)
            throw IllegalPlay(card.name + " requires an enemy that intends to attack");
    }

    BattleState next = state;
    next.energy -= card.cost;
    if (card.damage > 0 || card.strength_multiplier > 0) {
        Combatant& tgt = next.enemies[target];
        int dmg = compute_damage(card.damage, next.player.strength, card.strength_multiplier,
                                 tgt.vulnerable_turns > 0);
        detail_battle::deal_to(tgt, dmg);
    }
    if (card.applies_vulnerable > 0)
        next.enemies[target].vulnerable_turns += card.applies_vulnerable;
    if (card.grants_strength > 0) next.player.strength += card.grants_strength;
    if (card.block > 0) next.player.block += card.block;

    Card played = next.hand[hand_index];
    next.hand.erase(next.hand.begin() + static_cast<std::ptrdiff_t>(hand_index));
    next.discard_pile.push_back(std::move(played));
    if (card.draw > 0) detail_battle::draw_cards(next, card.draw);
    return next;
}

/// Enemy phase plus turn rollover: living enemies execute their scripted
/// intents (attacks hit block first), vulnerable counters tick down, the hand
/// is redrawn to five and energy resets.
inline BattleState enemy_turn(const BattleState& state) {
    BattleState next = state;
    for (size_t i = 0; i < next.enemies.size(); ++i) {
        Combatant& enemy = next.enemies[i];
        if (!enemy.alive()) continue;
        enemy.block = 0;  // block expires when the enemy takes its turn
        const Intent& intent = next.current_intent(i);
        switch (intent.kind) {
            case IntentKind::Attack: {
                int dmg = compute_damage(intent.amount, enemy.strength, 1,
                                         next.player.vulnerable_turns > 0);
                detail_battle::deal_to(next.player, dmg);
                break;
            }
            case IntentKind::Debuff:
                next.player.vulnerable_turns += 2;
                break;
            case IntentKind::Block:
                enemy.block += intent.amount;
                break;
        }
        ++next.intent_pos[i];
    }
    for (auto& e : next.enemies)
        if (e.vulnerable_turns > 0) --e.vulnerable_turns;
    if (next.player.vulnerable_turns > 0) --next.player.vulnerable_turns;

    // turn rollover
    next.player.block = 0;
    std::move(next.hand.begin(), next.hand.end(), std::back_inserter(next.discard_pile));
    next.hand.clear();
    detail_battle::draw_cards(next, kHandSize);
    next.energy = kEnergyPerTurn;
    next.turn += 1;
    return next;
}

// ---- action strings ------------------------------------------------------

inline constexpr const char* kEndTurnAction = "END TURN";

inline std::string play_action(const Card& card, const std::optional<std::string>& target) {
    std::string s = "PLAY: " + card.name;
    if (target) s += " | TARGET: " + *target;
    return s;
}

/// Every distinct legal action in the current state, END TURN last.
inline std::vector<std::string> legal_actions(const BattleState& st) {
    std::vector<std::string> out;
    for (size_t h = 0; h < st.hand.size(); ++h) {
        const Card& c = st.hand[h];
        if (st.energy < c.cost) continue;
        if (c.targets_enemy()) {
            for (size_t e = 0; e < st.enemies.size(); ++e) {
                if (!st.enemies[e].alive()) continue;
                if (c.requires_attack_intent &&
                    st.current_intent(e).kind != IntentKind::Attack)
                    continue;
                std::string a = play_action(c, st.enemies[e].name);
                if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
            }
        } else {
            std::string a = play_action(c, std::nullopt);
            if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
        }
    }
    out.push_back(kEndTurnAction);
    return out;
}

struct ParsedBattleAction {
    bool end_turn = false;
    std::string card_name;
    std::string target_name;  // empty when omitted
};

/// Parses "PLAY: <card> | TARGET: <enemy>" / "END TURN". Case-insensitive,
/// whitespace-tolerant. Returns nullopt when the text is not action-shaped.
inline std::optional<ParsedBattleAction> parse_battle_action(const std::string& text) {
    using diffprobe::detail::to_upper;
    using diffprobe::detail::trim;
    std::string t = trim(text);
    if (to_upper(t) == "END TURN" || to_upper(t) == "END_TURN")
        return ParsedBattleAction{true, "", ""};
    std::string upper = to_upper(t);
    if (upper.rfind("PLAY:", 0) != 0) return std::nullopt;
    std::string rest = trim(t.substr(5));
    ParsedBattleAction act;
    size_t bar = rest.find('|');
    if (bar == std::string::npos) {
        act.card_name = trim(rest);
    } else {
        act.card_name = trim(rest.substr(0, bar));
        std::string tgt = trim(rest.substr(bar + 1));
        if (to_upper(tgt).rfind("TARGET:", 0) != 0) return std::nullopt;
        act.target_name = trim(tgt.substr(7));
    }
    if (act.card_name.empty()) return std::nullopt;
    return act;
}

/// Applies an action string to the state. Returns nullopt for END TURN.
inline std::optional<BattleState> apply_action(const BattleState& st, const std::string& text) {
    auto parsed = parse_battle_action(text);
    if (!parsed) throw IllegalPlay("unrecognized action: '" + text + "'");
    if (parsed->end_turn) return std::nullopt;

    using diffprobe::detail::to_upper;
    std::optional<size_t> hand_index;
    for (size_t h = 0; h < st.hand.size(); ++h)
        if (to_upper(st.hand[h].name) == to_upper(parsed->card_name)) {
            hand_index = h;
            break;
        }
    if (!hand_index) throw IllegalPlay("card not in hand: " + parsed->card_name);

    std::optional<size_t> target;
    if (!parsed->target_name.empty()) {
        for (size_t e = 0; e < st.enemies.size(); ++e)
            if (to_upper(st.enemies[e].name) == to_upper(parsed->target_name)) {
                target = e;
                break;
            }
        if (!target) throw IllegalPlay("no such enemy: " + parsed->target_name);
    }
    return play_card(st, *hand_index, target);
}

// ---- observation building ------------------------------------------------

inline json make_structured_state(const BattleState& st) {
    json j;
    j["turn"] = st.turn;
    j["energy"] = st.energy;
    j["player"] = {{"name", st.player.name},       {"hp", st.player.hp},
                   {"max_hp", st.player.max_hp},   {"block", st.player.block},
                   {"strength", st.player.strength}, {"vulnerable", st.player.vulnerable_turns}};
    j["enemies"] = json::array();
    for (size_t i = 0; i < st.enemies.size(); ++i) {
        const Combatant& e = st.enemies[i];
        json je = {{"name", e.name},           {"hp", e.hp},
                   {"max_hp", e.max_hp},       {"block", e.block},
                   {"strength", e.strength},   {"vulnerable", e.vulnerable_turns},
                   {"alive", e.alive()}};
        const Intent& it = st.current_intent(i);
        je["intent"] = {{"kind", it.kind == IntentKind::Attack
                                     ? "attack"
                                     : (it.kind == IntentKind::Debuff ? "debuff" : "block")},
                        {"amount", it.amount}};
        j["enemies"].push_back(je);
    }
    j["hand"] = json::array();
    for (const Card& c : st.hand)
        j["hand"].push_back({{"name", c.name}, {"cost", c.cost}, {"text", card_text(c)}});
    j["draw_pile"] = st.draw_pile.size();
    j["discard_pile"] = st.discard_pile.size();
    return j;
}

inline std::string describe_state(const BattleState& st) {
    std::string s;
    s += "Turn " + std::to_string(st.turn) + ". Energy: " + std::to_string(st.energy) + "/" +
         std::to_string(kEnergyPerTurn) + ".\n";
    s += "You: " + std::to_string(st.player.hp) + "/" + std::to_string(st.player.max_hp) +
         " hp, block " + std::to_string(st.player.block) + ", strength " +
         std::to_string(st.player.strength);
    if (st.player.vulnerable_turns > 0)
        s += ", vulnerable for " + std::to_string(st.player.vulnerable_turns) + " turn(s)";
    s += ".\nEnemies:\n";
    for (size_t i = 0; i < st.enemies.size(); ++i) {
        const Combatant& e = st.enemies[i];
        if (!e.alive()) {
            s += "- " + e.name + ": defeated\n";
            continue;
        }
        s += "- " + e.name + ": " + std::to_string(e.hp) + "/" + std::to_string(e.max_hp) +
             " hp, block " + std::to_string(e.block);
        if (e.vulnerable_turns > 0)
            s += ", vulnerable for " + std::to_string(e.vulnerable_turns) + " turn(s)";
        s += ". Intent: " + intent_text(st.current_intent(i)) + "\n";
    }
    s += "Hand:\n";
    for (const Card& c : st.hand)
        s += "- " + c.name + " (cost " + std::to_string(c.cost) + "): " + card_text(c) + "\n";
    s += "Draw pile: " + std::to_string(st.draw_pile.size()) +
         " cards. Discard pile: " + std::to_string(st.discard_pile.size()) + " cards.\n";
    return s;
}

// ---- battle loop ----------------------------------------------------------

enum class BattleOutcome { Win, Loss };

struct BattleResult {
    BattleOutcome outcome = BattleOutcome::Loss;
    int hp_remaining = 0;  // 0 on every loss
    int turns = 0;
    bool turn_cap_exceeded = false;
    int illegal_plays = 0;
};

/// Player decision callback: receives the state and the legal action strings,
/// returns one action string.
using BattlePolicy =
    std::function<std::string(const BattleState&, const std::vector<std::string>&)>;

inline constexpr int kMaxActionsPerTurn = 32;
inline constexpr int kMaxIllegalStreak = 3;

/// Full battle: alternating player/enemy phases until one side dies or the
/// turn cap is reached (counted as a loss, flagged). Deterministic for fixed
/// (boss, deck, policy, seed).
inline BattleResult run_battle(const BossSpec& boss, const std::vector<Card>& deck,
                               const BattlePolicy& policy, std::uint64_t seed, int turn_cap = 50,
                               int player_hp = 80) {
    BattleState st = init_battle(boss, deck, seed, player_hp);
    BattleResult result;
    while (st.turn <= turn_cap) {
        int actions = 0;
        int illegal_streak = 0;
        while (!st.enemies_defeated() && actions < kMaxActionsPerTurn) {
            std::string choice = policy(st, legal_actions(st));
            ++actions;
            try {
                auto next = apply_action(st, choice);
                if (!next) break;  // END TURN
                st = std::move(*next);
                illegal_streak = 0;
            } catch (const IllegalPlay&) {
                ++result.illegal_plays;
                if (++illegal_streak >= kMaxIllegalStreak) break;
            }
        }
        if (st.enemies_defeated()) {
            result.outcome = BattleOutcome::Win;
            result.hp_remaining = st.player.hp;
            result.turns = st.turn;
            return result;
        }
        st = enemy_turn(st);
        if (!st.player.alive()) {
            result.outcome = BattleOutcome::Loss;
            result.hp_remaining = 0;
            result.turns = st.turn - 1;
            return result;
        }
    }
    result.outcome = BattleOutcome::Loss;
    result.hp_remaining = 0;
    result.turns = turn_cap;
    result.turn_cap_exceeded = true;
    return result;
}

// ---- deterministic expert policy ------------------------------------------

/// Rule-based expert play from the structured state only, so the in-process
/// and stdio paths make identical decisions. Priorities: brace for lethal
/// damage, set up strength against attackers, apply vulnerable, then attack
/// the biggest threat.
inline std::string expert_action(const json& state, const std::vector<std::string>& legal) {
    auto find_action = [&](const std::string& prefix) -> std::optional<std::string> {
        for (const auto& a : legal)
            if (a.rfind(prefix, 0) == 0) return a;
        return std::nullopt;
    };

    const auto& player = state.at("player");
    int player_hp = player.at("hp").get<int>();
    int player_block = player.at("block").get<int>();
    bool player_vulnerable = player.value("vulnerable", 0) > 0;

    int incoming = 0;
    std::string threat_name;
    int threat_dmg = -1;
    for (const auto& e : state.at("enemies")) {
        if (!e.value("alive", true)) continue;
        const auto& intent = e.at("intent");
        if (intent.at("kind").get<std::string>() == "attack") {
            int dmg = compute_damage(intent.at("amount").get<int>(),
                                     e.value("strength", 0), 1, player_vulnerable);
            incoming += dmg;
            if (dmg > threat_dmg) {
                threat_dmg = dmg;
                threat_name = e.at("name").get<std::string>();
            }
        }
    }
    bool lethal_threat = incoming >= player_hp + player_block;

    if (lethal_threat) {
        if (auto a = find_action("PLAY: Shrug It Off")) return *a;
        if (auto a = find_action("PLAY: Defend")) return *a;
    }
    if (!threat_name.empty()) {
        if (auto a = find_action("PLAY: Spot Weakness | TARGET: " + threat_name)) return *a;
    }
    std::string target = threat_name;
    if (target.empty()) {
        for (const auto& e : state.at("enemies"))
            if (e.value("alive", true)) {
                target = e.at("name").get<std::string>();
                break;
            }
    }
    if (!target.empty()) {
        bool target_vulnerable = false;
        for (const auto& e : state.at("enemies"))
            if (e.at("name").get<std::string>() == target)
                target_vulnerable = e.value("vulnerable", 0) > 0;
        if (!target_vulnerable) {
            if (auto a = find_action("PLAY: Bash | TARGET: " + target)) return *a;
        }
        if (auto a = find_action("PLAY: Heavy Blade | TARGET: " + target)) return *a;
        if (auto a = find_action("PLAY: Strike | TARGET: " + target)) return *a;
        if (auto a = find_action("PLAY: Bash | TARGET: " + target)) return *a;
    }
    if (incoming > player_block) {
        if (auto a = find_action("PLAY: Shrug It Off")) return *a;
        if (auto a = find_action("PLAY: Defend")) return *a;
    }
    // any remaining play before ending the turn
    for (const auto& a : legal)
        if (a != kEndTurnAction && a.rfind("PLAY: Spot Weakness", 0) != 0 &&
            a.rfind("PLAY: Defend", 0) != 0 && a.rfind("PLAY: Shrug It Off", 0) != 0)
            return a;
    return kEndTurnAction;
}

// ---- fixtures --------------------------------------------------------------

struct BattleFixtures {
    int player_hp = 80;
    std::map<std::string, Card> cards;
    std::map<std::string, std::vector<Card>> decks;
    std::vector<BossSpec> bosses;  // roster order preserved
    std::string default_deck = "default";

    const BossSpec& boss(const std::string& name) const {
        for (const auto& b : bosses)
            if (b.name == name) return b;
        throw FixtureError("unknown boss: " + name);
    }

    const std::vector<Card>& deck(const std::string& name) const {
        auto it = decks.find(name);
        if (it == decks.end()) throw FixtureError("unknown deck: " + name);
        return it->second;
    }
};

inline Card card_from_json(const std::string& name, const json& j) {
    Card c;
    c.name = j.value("name", name);
    c.cost = j.value("cost", 0);
    c.damage = j.value("damage", 0);
    c.block = j.value("block", 0);
    c.strength_multiplier = j.value("strength_multiplier", 0);
    c.applies_vulnerable = j.value("applies_vulnerable", 0);
    c.grants_strength = j.value("grants_strength", 0);
    c.draw = j.value("draw", 0);
    c.requires_attack_intent = j.value("requires_attack_intent", false);
    if (c.cost < 0) throw FixtureError("card " + c.name + ": negative cost");
    if (!c.has_effect()) throw FixtureError("card " + c.name + ": no effect");
    return c;
}

inline BattleFixtures load_fixtures(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FixtureError("cannot open fixture file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FixtureError("fixture file " + path + ": " + e.what());
    }
    BattleFixtures fx;
    fx.player_hp = j.value("player", json::object()).value("hp", 80);
    if (!j.contains("cards") || !j.contains("decks") || !j.contains("bosses"))
        throw FixtureError("fixture file needs cards, decks and bosses sections");
    for (auto& [key, cj] : j.at("cards").items()) fx.cards[key] = card_from_json(key, cj);
    for (auto& [key, dj] : j.at("decks").items()) {
        std::vector<Card> deck;
        for (const auto& entry : dj) {
            std::string card_key = entry.get<std::string>();
            auto it = fx.cards.find(card_key);
            if (it == fx.cards.end())
                throw FixtureError("deck " + key + " references unknown card " + card_key);
            deck.push_back(it->second);
        }
        if (deck.empty()) throw FixtureError("deck " + key + " is empty");
        fx.decks[key] = std::move(deck);
    }
    for (const auto& bj : j.at("bosses")) {
        BossSpec boss;
        boss.name = bj.at("name").get<std::string>();
        boss.hp = bj.at("hp").get<int>();
        if (boss.hp <= 0) throw FixtureError("boss " + boss.name + ": hp must be positive");
        for (const auto& ij : bj.at("intents")) {
            Intent it;
            std::string kind = ij.at("kind").get<std::string>();
            if (kind == "attack")
                it.kind = IntentKind::Attack;
            else if (kind == "debuff")
                it.kind = IntentKind::Debuff;
            else if (kind == "block")
                it.kind = IntentKind::Block;
            else
                throw FixtureError("boss " + boss.name + ": unknown intent kind " + kind);
            it.amount = ij.value("amount", 0);
            boss.intent_script.push_back(it);
        }
        if (boss.intent_script.empty())
            throw FixtureError("boss " + boss.name + ": empty intent script");
        fx.bosses.push_back(std::move(boss));
    }
    if (fx.bosses.empty()) throw FixtureError("fixture file has no bosses");
    if (!fx.decks.count(fx.default_deck)) fx.default_deck = fx.decks.begin()->first;
    return fx;
}

}  // namespace diffprobe::battle
