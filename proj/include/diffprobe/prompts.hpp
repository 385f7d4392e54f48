#pragma once

#include "diffprobe/agent.hpp"

namespace diffprobe::agent {

/// Default Wordle prompt bundle. Writing discipline: no sentence here may
/// contain a bare five-letter alphabetic token (the marker GUESS is always
/// followed by a colon), so no matter which answer or attempt is in play, the
/// prompt stream never shows an in-play word outside bracketed letter form.
inline PromptBundle wordle_prompt_bundle() {
    PromptBundle b;
    b.rules_text =
        "You are playing a letter-deduction game. A secret five-letter answer has been "
        "selected from a dictionary. On each attempt you submit one five-letter dictionary "
        "word, and you get one verdict per position:\n"
        "- correct: this letter sits in the answer at this very position.\n"
        "- present: this letter occurs in the answer at another position.\n"
        "- absent: this letter has no remaining occurrence in the answer.\n"
        "Repeated letters: verdicts consume occurrences one by one, so an attempt repeating "
        "a letter gets at most as many non-absent verdicts for it as the answer has copies.\n"
        "You win by submitting the answer within the attempt cap.";
    b.io_format_text =
        "In all of your text, render any five-letter play sequence in bracketed letter form, "
        "e.g. [C, R, A, N, E] — not as an unbroken run of letters. Finish your response with "
        "one line of the form:\n"
        "GUESS: [A, B, C, D, E]";
    b.reasoning_text =
        "Reason step by step before answering: summarize the verdicts so far; note the "
        "letters confirmed in position, the letters present elsewhere, and the letters "
        "absent; shortlist consistent possibilities; then commit to one attempt.";
    b.strategy_text =
        "Advice from experienced players:\n"
        "- Open with an attempt made of distinct, common letters (a few vowels plus frequent "
        "consonants such as R, S, T, L, N).\n"
        "- Keep letters marked correct at the same positions; move letters marked present to "
        "new positions; do not repeat letters marked absent.\n"
        "- Mind repeated letters: when an attempt repeated a letter, one absent verdict for "
        "it can mean the answer has one copy, not zero.\n"
        "- When many possibilities remain, pick the attempt that splits them up the most; "
        "with at most two remaining, just pick one of them.";
    return b;
}

/// Default battle prompt bundle. Per the demo's design, guidance stays
/// high-level: rules plus a short reasoning nudge, no curated strategy text.
inline PromptBundle battle_prompt_bundle() {
    PromptBundle b;
    b.rules_text =
        "You are playing a turn-based card battle. Each turn you get 3 energy and a hand of "
        "5 cards; every card costs energy to play. Attack cards deal damage (strength raises "
        "damage by the card's multiplier); block absorbs damage before hp is touched and "
        "expires at end of turn; a vulnerable combatant takes 50% more attack damage "
        "(rounded down). Enemies telegraph their next move as an intent: Attack (with the "
        "base amount), Debuff (makes you vulnerable), or Block. When you end your turn the "
        "enemies act, then you draw a fresh hand. You win when every enemy reaches 0 hp; you "
        "lose when your hp reaches 0.";
    b.io_format_text =
        "Finish your response with exactly one action line, either:\n"
        "PLAY: <card name> | TARGET: <enemy name>\n"
        "(cards with no enemy target omit the TARGET part), or:\n"
        "END TURN";
    b.reasoning_text =
        "Before acting, reason briefly: read each enemy intent, total the incoming damage, "
        "check your hp, block and energy, then weigh attacking against blocking. Spend "
        "energy where it changes the outcome.";
    return b;
}

/// Bundle lookup by game id.
inline PromptBundle default_prompt_bundle(const std::string& game_id) {
    if (game_id == "wordle") return wordle_prompt_bundle();
    return battle_prompt_bundle();
}

}  // namespace diffprobe::agent
