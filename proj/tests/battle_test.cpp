#include "diffprobe/battle.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

using namespace diffprobe;
using namespace diffprobe::battle;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               fs::path("battle_test_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    fs::path file(const std::string& name, const std::string& content) const {
        fs::path p = path / name;
        std::ofstream out(p);
        out << content;
        return p;
    }
};

const BattleFixtures& fixtures() {
    static BattleFixtures fx = load_fixtures(std::string(DIFFPROBE_DATA_DIR) +
                                             "/battle_fixtures.json");
    return fx;
}

Card card(const std::string& key) { return fixtures().cards.at(key); }

BossSpec attacker(const std::string& name, int hp, int dmg) {
    return BossSpec{name, hp, {Intent{IntentKind::Attack, dmg}}};
}

// A state with a fixed hand and full energy against one boss; skips drawing.
BattleState fixed_hand_state(const BossSpec& boss, std::vector<Card> hand) {
    BattleState st;
    st.player = Combatant{"Player", 80, 80, 0, 0, 0};
    st.enemies.push_back(Combatant{boss.name, boss.hp, boss.hp, 0, 0, 0});
    st.enemy_specs.push_back(boss);
    st.intent_pos.push_back(0);
    st.energy = kEnergyPerTurn;
    st.hand = std::move(hand);
    return st;
}

}  // namespace

TEST(ComputeDamage, CoreFacts) {
    EXPECT_EQ(compute_damage(6, 0, 1, false), 6);    // Strike
    EXPECT_EQ(compute_damage(6, 0, 1, true), 9);     // Strike into vulnerable
    EXPECT_EQ(compute_damage(8, 0, 1, false), 8);    // Bash
    EXPECT_EQ(compute_damage(14, 12, 3, false), 50); // Heavy Blade at 12 strength
    EXPECT_EQ(compute_damage(14, 15, 3, false), 59); // Heavy Blade at 15 strength
}

TEST(ComputeDamage, VulnerableRoundsDown) {
    EXPECT_EQ(compute_damage(7, 0, 1, true), 10);  // 10.5 -> 10
    EXPECT_EQ(compute_damage(14, 3, 3, true), 34); // 23 * 1.5 = 34.5 -> 34
    EXPECT_EQ(compute_damage(0, 0, 0, true), 0);
}

TEST(ComputeDamage, NegativeBaseRejected) {
    EXPECT_THROW(compute_damage(-1, 0, 1, false), std::invalid_argument);
}

TEST(PlayCard, StrikeDealsSixAndScalesWithStrength) {
    auto st = fixed_hand_state(attacker("Dummy", 50, 5), {card("strike")});
    auto next = play_card(st, 0);
    EXPECT_EQ(next.enemies[0].hp, 44);
    EXPECT_EQ(next.energy, kEnergyPerTurn - 1);
    EXPECT_TRUE(next.hand.empty());
    ASSERT_EQ(next.discard_pile.size(), 1u);
    EXPECT_EQ(next.discard_pile[0].name, "Strike");

    st.player.strength = 2;
    EXPECT_EQ(play_card(st, 0).enemies[0].hp, 42);  // 6 + 2
}

TEST(PlayCard, BashDealsEightThenLeavesTargetVulnerable) {
    auto st = fixed_hand_state(attacker("Dummy", 50, 5), {card("bash"), card("strike")});
    auto after_bash = play_card(st, 0);
    // Bash's own hit lands before the debuff exists, so it is unamplified.
    EXPECT_EQ(after_bash.enemies[0].hp, 42);
    EXPECT_EQ(after_bash.enemies[0].vulnerable_turns, 2);
    auto after_strike = play_card(after_bash, 0);
    EXPECT_EQ(after_strike.enemies[0].hp, 33);  // 6 * 1.5 = 9 into vulnerable
}

TEST(PlayCard, HeavyBladeTriplesStrength) {
    auto st = fixed_hand_state(attacker("Dummy", 200, 5), {card("heavy_blade")});
    st.player.strength = 12;
    EXPECT_EQ(play_card(st, 0).enemies[0].hp, 150);  // 14 + 3*12 = 50
    st.player.strength = 15;
    EXPECT_EQ(play_card(st, 0).enemies[0].hp, 141);  // 14 + 3*15 = 59
}

TEST(PlayCard, SpotWeaknessOnlyAgainstAttackIntent) {
    auto vs_attacker = fixed_hand_state(attacker("Raider", 50, 5), {card("spot_weakness")});
    auto next = play_card(vs_attacker, 0);
    EXPECT_EQ(next.player.strength, 3);
    EXPECT_EQ(next.enemies[0].hp, 50);  // no damage dealt

    BossSpec turtle{"Turtle", 50, {Intent{IntentKind::Block, 6}}};
    auto vs_blocker = fixed_hand_state(turtle, {card("spot_weakness")});
    EXPECT_THROW(play_card(vs_blocker, 0), IllegalPlay);
}

TEST(PlayCard, DefendGrantsBlockAndBlockAbsorbsDamage) {
    auto st = fixed_hand_state(attacker("Dummy", 50, 10), {card("defend"), card("defend")});
    auto blocked = play_card(play_card(st, 0), 0);
    EXPECT_EQ(blocked.player.block, 10);

    // Enemy attack of 10 against block 12: two block remain, hp untouched.
    blocked.player.block = 12;
    auto after_enemy = enemy_turn(blocked);
    EXPECT_EQ(after_enemy.player.hp, 80);
    // Leftover block is cleared at the turn rollover, never carried forward.
    EXPECT_EQ(after_enemy.player.block, 0);
}

TEST(PlayCard, EnergyIsEnforced) {
    auto st = fixed_hand_state(attacker("Dummy", 50, 5),
                               {card("bash"), card("strike"), card("strike")});
    auto a = play_card(st, 0);   // Bash, cost 2 -> 1 left
    auto b = play_card(a, 0);    // Strike, cost 1 -> 0 left
    EXPECT_EQ(b.energy, 0);
    EXPECT_THROW(play_card(b, 0), IllegalPlay);
}

TEST(PlayCard, ThrowsWithoutSideEffects) {
    auto st = fixed_hand_state(attacker("Dummy", 50, 5), {card("strike")});
    st.energy = 0;
    EXPECT_THROW(play_card(st, 0), IllegalPlay);
    EXPECT_THROW(play_card(st, 7), IllegalPlay);
    EXPECT_EQ(st.enemies[0].hp, 50);
    EXPECT_EQ(st.hand.size(), 1u);
}

TEST(PlayCard, ShrugItOffBlocksAndDraws) {
    auto st = fixed_hand_state(attacker("Dummy", 50, 5), {card("shrug_it_off")});
    st.draw_pile = {card("strike"), card("defend")};
    auto next = play_card(st, 0);
    EXPECT_EQ(next.player.block, 8);
    ASSERT_EQ(next.hand.size(), 1u);
    EXPECT_EQ(next.hand[0].name, "Defend");  // drawn from the back
    EXPECT_EQ(next.draw_pile.size(), 1u);
}

TEST(EnemyTurn, EnemyBlockAbsorbsThenExpiresOnItsOwnTurn) {
    BossSpec spec{"Guard", 50, {Intent{IntentKind::Block, 12}, Intent{IntentKind::Attack, 5}}};
    auto st = fixed_hand_state(spec, {card("strike"), card("strike")});
    auto after_block = enemy_turn(st);  // enemy gains 12 block
    EXPECT_EQ(after_block.enemies[0].block, 12);

    after_block.hand = {card("strike"), card("strike")};
    after_block.energy = kEnergyPerTurn;
    auto hit1 = play_card(after_block, 0);
    EXPECT_EQ(hit1.enemies[0].hp, 50);
    EXPECT_EQ(hit1.enemies[0].block, 6);
    auto hit2 = play_card(hit1, 0);
    EXPECT_EQ(hit2.enemies[0].hp, 50);
    EXPECT_EQ(hit2.enemies[0].block, 0);

    // On the enemy's own turn any leftover block would have been discarded
    // before it acts.
    auto fresh = fixed_hand_state(spec, {});
    auto b1 = enemy_turn(fresh);       // gains 12 block
    auto b2 = enemy_turn(b1);          // block resets, then attacks for 5
    EXPECT_EQ(b2.enemies[0].block, 0);
    EXPECT_EQ(b2.player.hp, 75);
}

TEST(EnemyTurn, VulnerableOnEnemyTicksDownEachRound) {
    auto st = fixed_hand_state(attacker("Dummy", 50, 0), {card("bash")});
    auto bashed = play_card(st, 0);
    EXPECT_EQ(bashed.enemies[0].vulnerable_turns, 2);
    auto r1 = enemy_turn(bashed);
    EXPECT_EQ(r1.enemies[0].vulnerable_turns, 1);
    auto r2 = enemy_turn(r1);
    EXPECT_EQ(r2.enemies[0].vulnerable_turns, 0);
}

TEST(EnemyTurn, DebuffMakesThePlayerVulnerable) {
    BossSpec spec{"Hexer", 60,
                  {Intent{IntentKind::Debuff, 0}, Intent{IntentKind::Attack, 12},
                   Intent{IntentKind::Attack, 12}}};
    auto st = fixed_hand_state(spec, {});
    auto p1 = enemy_turn(st);  // debuff: +2 vulnerable, end-of-round tick -> 1
    EXPECT_EQ(p1.player.vulnerable_turns, 1);
    EXPECT_EQ(p1.player.hp, 80);
    auto p2 = enemy_turn(p1);  // attack 12 amplified to 18
    EXPECT_EQ(p2.player.hp, 62);
    EXPECT_EQ(p2.player.vulnerable_turns, 0);
    auto p3 = enemy_turn(p2);  // attack 12, no longer vulnerable
    EXPECT_EQ(p3.player.hp, 50);
}

TEST(EnemyTurn, RolloverRefreshesEnergyAndHand) {
    auto fx = fixtures();
    auto st = init_battle(fx.boss("Clay Golem"), fx.deck("default"), 7, fx.player_hp);
    st.energy = 0;
    auto next = enemy_turn(st);
    EXPECT_EQ(next.energy, kEnergyPerTurn);
    EXPECT_EQ(next.hand.size(), static_cast<size_t>(kHandSize));
    EXPECT_EQ(next.turn, st.turn + 1);
}

TEST(InitBattle, SetsUpDeterministically) {
    auto fx = fixtures();
    auto a = init_battle(fx.boss("Clay Golem"), fx.deck("default"), 42, fx.player_hp);
    auto b = init_battle(fx.boss("Clay Golem"), fx.deck("default"), 42, fx.player_hp);
    EXPECT_EQ(a.player.hp, 80);
    EXPECT_EQ(a.energy, 3);
    EXPECT_EQ(a.turn, 1);
    ASSERT_EQ(a.hand.size(), 5u);
    EXPECT_EQ(a.draw_pile.size(), fx.deck("default").size() - 5u);
    for (size_t i = 0; i < a.hand.size(); ++i) EXPECT_EQ(a.hand[i].name, b.hand[i].name);
}

TEST(InitBattle, RejectsDegenerateSetups) {
    auto fx = fixtures();
    EXPECT_THROW(init_battle(fx.boss("Clay Golem"), {}, 1), std::invalid_argument);
    BossSpec no_script{"Silent", 10, {}};
    EXPECT_THROW(init_battle(no_script, fx.deck("default"), 1), std::invalid_argument);
}

TEST(CardConservation, HandDrawDiscardAlwaysSumToDeckSize) {
    auto fx = fixtures();
    const size_t deck_size = fx.deck("default").size();
    auto st = init_battle(fx.boss("Thorn Beast"), fx.deck("default"), 11, fx.player_hp);
    for (int round = 0; round < 6; ++round) {
        EXPECT_EQ(st.hand.size() + st.draw_pile.size() + st.discard_pile.size(), deck_size);
        EXPECT_EQ(st.hand.size(), static_cast<size_t>(kHandSize));
        st = enemy_turn(st);
    }
}

TEST(LegalActions, EndTurnLastAndDeduplicated) {
    auto st = fixed_hand_state(attacker("Dummy", 50, 5),
                               {card("strike"), card("strike"), card("defend")});
    auto legal = legal_actions(st);
    ASSERT_EQ(legal.size(), 3u);  // one Strike entry, one Defend, END TURN
    EXPECT_EQ(legal[0], "PLAY: Strike | TARGET: Dummy");
    EXPECT_EQ(legal[1], "PLAY: Defend");
    EXPECT_EQ(legal.back(), kEndTurnAction);
}

TEST(LegalActions, RespectsEnergyAndIntentGates) {
    BossSpec turtle{"Turtle", 50, {Intent{IntentKind::Block, 6}}};
    auto st = fixed_hand_state(turtle, {card("bash"), card("spot_weakness")});
    st.energy = 1;
    auto legal = legal_actions(st);
    // Bash is too expensive; Spot Weakness needs an attacking enemy.
    ASSERT_EQ(legal.size(), 1u);
    EXPECT_EQ(legal[0], kEndTurnAction);
}

TEST(ParseBattleAction, AcceptsTheDocumentedGrammar) {
    auto end1 = parse_battle_action("END TURN");
    ASSERT_TRUE(end1 && end1->end_turn);
    auto end2 = parse_battle_action("  end_turn  ");
    ASSERT_TRUE(end2 && end2->end_turn);

    auto full = parse_battle_action("PLAY: Strike | TARGET: Clay Golem");
    ASSERT_TRUE(full);
    EXPECT_FALSE(full->end_turn);
    EXPECT_EQ(full->card_name, "Strike");
    EXPECT_EQ(full->target_name, "Clay Golem");

    auto bare = parse_battle_action("play: defend");
    ASSERT_TRUE(bare);
    EXPECT_EQ(bare->card_name, "defend");
    EXPECT_TRUE(bare->target_name.empty());
}

TEST(ParseBattleAction, RejectsNonActions) {
    EXPECT_FALSE(parse_battle_action("hello"));
    EXPECT_FALSE(parse_battle_action("PLAY:"));
    EXPECT_FALSE(parse_battle_action("PLAY: Strike | WHAT: Dummy"));
    EXPECT_FALSE(parse_battle_action(""));
}

TEST(ApplyAction, ResolvesNamesCaseInsensitively) {
    auto st = fixed_hand_state(attacker("Clay Golem", 50, 5), {card("strike")});
    auto next = apply_action(st, "play: STRIKE | target: clay golem");
    ASSERT_TRUE(next);
    EXPECT_EQ(next->enemies[0].hp, 44);

    EXPECT_FALSE(apply_action(st, "END TURN"));  // nullopt signals end of turn
    EXPECT_THROW(apply_action(st, "PLAY: Fireball"), IllegalPlay);
    EXPECT_THROW(apply_action(st, "PLAY: Strike | TARGET: Nobody"), IllegalPlay);
    EXPECT_THROW(apply_action(st, "gibberish"), IllegalPlay);
}

TEST(RunBattle, PassiveplayerLosesToPureAttackerExactlyOnSchedule) {
    BattlePolicy pass = [](const BattleState&, const std::vector<std::string>&) {
        return std::string(kEndTurnAction);
    };
    // 64 hp against a 16-damage attacker: dead after exactly four enemy turns.
    auto r = run_battle(attacker("Bruiser", 999, 16), fixtures().deck("default"), pass, 5, 50,
                        64);
    EXPECT_EQ(r.outcome, BattleOutcome::Loss);
    EXPECT_EQ(r.hp_remaining, 0);
    EXPECT_EQ(r.turns, 4);
    EXPECT_FALSE(r.turn_cap_exceeded);
}

TEST(RunBattle, LossAlwaysReportsZeroHp) {
    BattlePolicy pass = [](const BattleState&, const std::vector<std::string>&) {
        return std::string(kEndTurnAction);
    };
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto r = run_battle(fixtures().boss("Iron Colossus"), fixtures().deck("default"), pass,
                            seed, 50, fixtures().player_hp);
        EXPECT_EQ(r.outcome, BattleOutcome::Loss);
        EXPECT_EQ(r.hp_remaining, 0);
    }
}

TEST(RunBattle, TurnCapCountsAsFlaggedLoss) {
    BattlePolicy pass = [](const BattleState&, const std::vector<std::string>&) {
        return std::string(kEndTurnAction);
    };
    BossSpec turtle{"Turtle", 500, {Intent{IntentKind::Block, 5}}};
    auto r = run_battle(turtle, fixtures().deck("default"), pass, 1, 10, 80);
    EXPECT_EQ(r.outcome, BattleOutcome::Loss);
    EXPECT_TRUE(r.turn_cap_exceeded);
    EXPECT_EQ(r.turns, 10);
    EXPECT_EQ(r.hp_remaining, 0);
}

TEST(RunBattle, IllegalPlaysAreCountedAndBounded) {
    int calls = 0;
    BattlePolicy confused = [&calls](const BattleState&, const std::vector<std::string>&) {
        ++calls;
        return std::string("PLAY: Fireball");
    };
    BossSpec turtle{"Turtle", 500, {Intent{IntentKind::Block, 5}}};
    auto r = run_battle(turtle, fixtures().deck("default"), confused, 1, 4, 80);
    EXPECT_EQ(r.outcome, BattleOutcome::Loss);
    // Three strikes per turn, then the turn is forfeited.
    EXPECT_EQ(r.illegal_plays, 3 * 4);
    EXPECT_EQ(calls, 3 * 4);
}

TEST(RunBattle, FirstLegalPlayPolicyWinsAgainstPushover) {
    BattlePolicy eager = [](const BattleState&, const std::vector<std::string>& legal) {
        return legal.front();
    };
    auto r = run_battle(attacker("Pushover", 10, 1), fixtures().deck("default"), eager, 3, 50,
                        80);
    EXPECT_EQ(r.outcome, BattleOutcome::Win);
    EXPECT_EQ(r.hp_remaining, 80);
    EXPECT_EQ(r.turns, 1);
}

TEST(Expert, PinsPriorityChoices) {
    json state = {
        {"turn", 1},
        {"energy", 3},
        {"player", {{"name", "P"}, {"hp", 60}, {"max_hp", 80}, {"block", 0},
                    {"strength", 0}, {"vulnerable", 0}}},
        {"enemies", json::array({{{"name", "Raider"}, {"hp", 50}, {"max_hp", 50},
                                  {"block", 0}, {"strength", 0}, {"vulnerable", 0},
                                  {"alive", true},
                                  {"intent", {{"kind", "attack"}, {"amount", 9}}}}})},
    };
    std::vector<std::string> legal = {"PLAY: Strike | TARGET: Raider",
                                      "PLAY: Spot Weakness | TARGET: Raider",
                                      "PLAY: Defend", "END TURN"};
    EXPECT_EQ(expert_action(state, legal), "PLAY: Spot Weakness | TARGET: Raider");

    // Lethal incoming damage forces a block first.
    state["player"]["hp"] = 8;
    std::vector<std::string> legal2 = {"PLAY: Strike | TARGET: Raider", "PLAY: Defend",
                                       "END TURN"};
    EXPECT_EQ(expert_action(state, legal2), "PLAY: Defend");

    // Nothing useful: end the turn rather than waste a setup card.
    std::vector<std::string> legal3 = {"END TURN"};
    EXPECT_EQ(expert_action(state, legal3), "END TURN");
}

TEST(Expert, BeatsTheEasyHalfOfTheRoster) {
    BattlePolicy expert = [](const BattleState& st, const std::vector<std::string>& legal) {
        return expert_action(make_structured_state(st), legal);
    };
    for (const char* name : {"Clay Golem", "Thorn Beast", "Ooze Titan", "Bone Warden"}) {
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            auto r = run_battle(fixtures().boss(name), fixtures().deck("default"), expert,
                                seed, 50, fixtures().player_hp);
            EXPECT_EQ(r.outcome, BattleOutcome::Win) << name << " seed " << seed;
            EXPECT_GT(r.hp_remaining, 0) << name << " seed " << seed;
        }
    }
}

TEST(Expert, DeterministicRegressionPin) {
    BattlePolicy expert = [](const BattleState& st, const std::vector<std::string>& legal) {
        return expert_action(make_structured_state(st), legal);
    };
    auto a = run_battle(fixtures().boss("Clay Golem"), fixtures().deck("default"), expert, 1,
                        50, fixtures().player_hp);
    auto b = run_battle(fixtures().boss("Clay Golem"), fixtures().deck("default"), expert, 1,
                        50, fixtures().player_hp);
    EXPECT_EQ(a.outcome, BattleOutcome::Win);
    EXPECT_EQ(a.hp_remaining, 66);
    EXPECT_EQ(a.turns, 3);
    EXPECT_EQ(b.hp_remaining, a.hp_remaining);
    EXPECT_EQ(b.turns, a.turns);
}

TEST(Observation, StructuredStateCarriesTheFullPicture) {
    auto fx = fixtures();
    auto st = init_battle(fx.boss("Clay Golem"), fx.deck("default"), 9, fx.player_hp);
    json j = make_structured_state(st);
    EXPECT_EQ(j["turn"], 1);
    EXPECT_EQ(j["energy"], 3);
    EXPECT_EQ(j["player"]["hp"], 80);
    ASSERT_EQ(j["enemies"].size(), 1u);
    EXPECT_EQ(j["enemies"][0]["name"], "Clay Golem");
    EXPECT_EQ(j["enemies"][0]["intent"]["kind"], "attack");
    EXPECT_EQ(j["enemies"][0]["intent"]["amount"], 7);
    EXPECT_EQ(j["hand"].size(), 5u);
    EXPECT_EQ(j["draw_pile"].get<size_t>(), fx.deck("default").size() - 5u);
}

TEST(Observation, DescribeStateMentionsTheEssentials) {
    auto fx = fixtures();
    auto st = init_battle(fx.boss("Clay Golem"), fx.deck("default"), 9, fx.player_hp);
    std::string text = describe_state(st);
    EXPECT_NE(text.find("Turn 1"), std::string::npos);
    EXPECT_NE(text.find("Clay Golem"), std::string::npos);
    EXPECT_NE(text.find("Attack, 7 damage"), std::string::npos);
    EXPECT_NE(text.find("Draw pile:"), std::string::npos);
}

TEST(CardText, ReadsNaturally) {
    EXPECT_EQ(card_text(card("strike")), "Deal 6 damage.");
    EXPECT_EQ(card_text(card("bash")), "Deal 8 damage. Apply 2 vulnerable to the enemy.");
    EXPECT_EQ(card_text(card("heavy_blade")),
              "Deal 14 damage. Strength affects this card 3 times.");
    EXPECT_EQ(card_text(card("spot_weakness")),
              "If the enemy intends to attack, gain 3 strength.");
    EXPECT_EQ(card_text(card("shrug_it_off")), "Gain 8 block. Draw 1 card.");
}

TEST(Fixtures, LoadsTheShippedRoster) {
    const auto& fx = fixtures();
    EXPECT_EQ(fx.player_hp, 80);
    EXPECT_EQ(fx.cards.size(), 6u);
    EXPECT_EQ(fx.deck("default").size(), 13u);
    ASSERT_EQ(fx.bosses.size(), 6u);
    EXPECT_EQ(fx.bosses[0].name, "Clay Golem");
    EXPECT_EQ(fx.bosses[5].name, "Iron Colossus");
    // Roster order is the difficulty order and must be preserved.
    EXPECT_LT(fx.bosses[0].hp, fx.bosses[5].hp);
    EXPECT_THROW(fx.boss("Nonexistent"), FixtureError);
    EXPECT_THROW(fx.deck("nonexistent"), FixtureError);
}

TEST(Fixtures, RejectsMalformedFiles) {
    TempDir tmp;
    EXPECT_THROW(load_fixtures((tmp.path / "missing.json").string()), FixtureError);
    EXPECT_THROW(load_fixtures(tmp.file("bad.json", "{not json").string()), FixtureError);
    EXPECT_THROW(load_fixtures(tmp.file("empty.json", "{}").string()), FixtureError);
    EXPECT_THROW(
        load_fixtures(tmp.file("dangling.json", R"({
            "cards": {"strike": {"name": "Strike", "cost": 1, "damage": 6}},
            "decks": {"default": ["missing_card"]},
            "bosses": [{"name": "B", "hp": 10, "intents": [{"kind": "attack", "amount": 1}]}]
        })").string()),
        FixtureError);
    EXPECT_THROW(
        load_fixtures(tmp.file("useless.json", R"({
            "cards": {"blank": {"name": "Blank", "cost": 1}},
            "decks": {"default": ["blank"]},
            "bosses": [{"name": "B", "hp": 10, "intents": [{"kind": "attack", "amount": 1}]}]
        })").string()),
        FixtureError);
    EXPECT_THROW(
        load_fixtures(tmp.file("badintent.json", R"({
            "cards": {"strike": {"name": "Strike", "cost": 1, "damage": 6}},
            "decks": {"default": ["strike"]},
            "bosses": [{"name": "B", "hp": 10, "intents": [{"kind": "dance"}]}]
        })").string()),
        FixtureError);
}
