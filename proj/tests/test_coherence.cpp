// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "covtok/harness.hpp"

using namespace covtok;

namespace {

RunBundle overview_bundle() {
    static RunBundle b = execute_scenario(overview_scenario(), 1);
    return b;
}

Scenario tiny_give_scenario() {
    Scenario s;
    s.name = "tiny";
    s.users = {"A", "B"};
    s.coinbase = {{"x0", "A", 0}, {"x1", "A", 4}};
    s.moves = {
        Move{"gen", "A", {"x0"}, 5, "", {"g"}, "t", ""},
        Move{"give", "A", {"g"}, 0, "B", {"h"}, "", ""},
    };
    return s;
}

}  // namespace

TEST_CASE("the walkthrough scenario pair is coherent") {
    RunBundle b = overview_bundle();
    CHECK(b.coherence.verdict);
    CHECK(b.s_to_c.ok);
    CHECK(b.c_to_s.ok);
    CHECK(b.balance.ok);
    // Every computational label got a matched case, plus the base entry.
    CHECK(b.coherence.steps.size() == b.computational.labels.size());
}

TEST_CASE("relabelling a computational action is caught") {
    // Pair the symbolic run of a give-scenario with the computational run
    // of an xchg-scenario sharing the same prefix.
    Scenario give_s = tiny_give_scenario();
    RunBundle give_b = execute_scenario(give_s, 1);

    Scenario xchg_s = give_s;
    xchg_s.moves[1] = Move{"xchg", "A", {"g", "x1"}, 0, "", {"p", "q"}, "", ""};
    RunBundle xchg_b = execute_scenario(xchg_s, 1);
    REQUIRE(xchg_b.coherence.verdict);

    CoherenceReport crossed =
        check_coherence(give_b.symbolic, xchg_b.computational, xchg_b.maps0);
    CHECK_FALSE(crossed.verdict);
    REQUIRE(crossed.failed_at.has_value());
    CHECK(crossed.failure.find("symbolic") != std::string::npos);
}

TEST_CASE("transactions spending only unmapped outputs match inductive case 2") {
    Scenario s;
    s.name = "detach";
    s.users = {"A"};
    s.coinbase = {{"x0", "A", 3}, {"m0", "M", 6}};
    s.moves = {
        Move{"arbitrary-spend", "M", {}, 0, "", {}, "", ""},  // burn-classified detach
        Move{"arbitrary-spend", "M", {}, 0, "", {}, "", ""},  // spends unmapped junk
    };
    RunBundle b = execute_scenario(s, 3);
    REQUIRE(b.coherence.verdict);
    bool saw_case2_tx = false;
    for (const StepReport& r : b.coherence.steps)
        if (r.matched == "case2:transaction") saw_case2_tx = true;
    CHECK(saw_case2_tx);
    CHECK(b.s_to_c.ok);
    CHECK(b.c_to_s.ok);
}

TEST_CASE("reconstruction lifts the walkthrough run up to renaming") {
    RunBundle b = overview_bundle();
    Reconstruction rec = reconstruct(b.computational);
    CHECK(rec.report.verdict);
    CHECK(runs_alpha_equal(rec.run, b.symbolic));
}

TEST_CASE("adversary forgeries reconstruct as burns") {
    Scenario s;
    s.name = "forge";
    s.users = {"A"};
    s.coinbase = {{"x0", "A", 0}, {"m0", "M", 2}};
    s.moves = {
        Move{"gen", "A", {"x0"}, 10, "", {"g"}, "t", ""},
        Move{"forge-token", "M", {"m0"}, 10, "", {}, "t", ""},
    };
    RunBundle b = execute_scenario(s, 5);
    REQUIRE(b.coherence.verdict);
    CHECK(b.c_to_s.ok);  // classifies the forged output as unspendable

    Reconstruction rec = reconstruct(b.computational);
    CHECK(rec.report.verdict);
    bool saw_burn = false;
    for (const auto& st : rec.run.steps)
        if (!st.label.is_auth() && std::holds_alternative<BurnLabel>(st.label.action))
            saw_burn = true;
    CHECK(saw_burn);
    CHECK(runs_alpha_equal(rec.run, b.symbolic));
}

TEST_CASE("give via an exchange-shaped transaction with an unmapped input") {
    Scenario s;
    s.name = "unmapped-xchg";
    s.users = {"A"};
    s.coinbase = {{"x0", "A", 0}, {"x1", "A", 0}, {"m0", "M", 4}};
    s.moves = {
        Move{"gen", "A", {"x0"}, 6, "", {"g"}, "t", ""},
        Move{"gen", "A", {"x1"}, 3, "", {"h"}, "u", ""},
        Move{"arbitrary-spend", "M", {}, 0, "", {}, "", ""},
        // 5b: the mapped token on input 1 against detached plain funds.
        Move{"xchg-unmapped", "M", {"g"}, 0, "", {}, "", ""},
        // Prepare a self-minted token, then 5c with the token on input 2.
        Move{"self-mint", "M", {}, 0, "", {}, "", ""},
        Move{"xchg-unmapped", "M", {"h"}, 0, "", {}, "", ""},
    };
    RunBundle b = execute_scenario(s, 9);
    REQUIRE(b.coherence.verdict);
    bool saw_5b = false, saw_5c = false;
    for (const StepReport& r : b.coherence.steps) {
        if (r.matched == "case1:item5b(give)") saw_5b = true;
        if (r.matched == "case1:item5c(give)") saw_5c = true;
    }
    CHECK(saw_5b);
    CHECK(saw_5c);
    CHECK(b.s_to_c.ok);
    CHECK(b.c_to_s.ok);
    CHECK(b.balance.ok);

    Reconstruction rec = reconstruct(b.computational);
    CHECK(rec.report.verdict);
    CHECK(runs_alpha_equal(rec.run, b.symbolic));
}

TEST_CASE("the deposit-to-output lemma fails once an image is spent outside the run") {
    RunBundle b = overview_bundle();
    // Spend one mapped deposit behind the symbolic run's back.
    Chain chain = derive_chain(b.computational);
    auto it = b.final_maps.txout.begin();
    while (it != b.final_maps.txout.end() &&
           !token_fields(chain.resolve(it->second)))
        ++it;
    REQUIRE(it != b.final_maps.txout.end());
    KeyPair owner = KeyPair::from_name(b.symbolic.last().find(it->first)->owner);
    Transaction steal = build_give(chain, it->second, owner.public_key, owner);

    ComputationalRun extended = b.computational;
    extended.labels.push_back(AppendTx{steal});
    LemmaReport r = lemma_s_to_c_check(b.symbolic, extended, b.final_maps);
    CHECK_FALSE(r.ok);
    CHECK(r.detail.find("unspent") != std::string::npos);
}

TEST_CASE("lemma checks are vacuous without tokens or deposits") {
    Scenario s;
    s.name = "btc-only";
    s.users = {"A", "B"};
    s.coinbase = {{"x0", "A", 5}};
    s.moves = {
        Move{"give", "A", {"x0"}, 0, "B", {"x1"}, "", ""},
        Move{"burn", "B", {"x1"}, 0, "", {}, "", ""},
    };
    RunBundle b = execute_scenario(s, 0);
    CHECK(b.coherence.verdict);
    CHECK(b.symbolic.last().deposits.empty());
    CHECK(b.s_to_c.ok);   // vacuous: no deposits left
    CHECK(b.c_to_s.ok);   // vacuous: no token outputs
    CHECK(b.balance.ok);  // vacuous: nothing minted
}

TEST_CASE("balance equivalence detects tampered final maps") {
    RunBundle b = overview_bundle();
    REQUIRE(b.balance.ok);
    CoherenceMaps tampered = b.final_maps;
    // Point the token at the wrong output: the computational balance of the
    // walkthrough's burnt token is 0, while token t still holds 10.
    REQUIRE(tampered.tkid.size() == 2);
    auto first = tampered.tkid.begin();
    auto second = std::next(first);
    std::swap(first->second, second->second);
    LemmaReport r = theorem_balance_check(b.symbolic, b.computational, tampered);
    CHECK_FALSE(r.ok);
}

TEST_CASE("base maps must agree with the initial configuration") {
    RunBundle b = overview_bundle();
    CoherenceMaps wrong = b.maps0;
    wrong.txout.erase(wrong.txout.begin());
    CoherenceReport r = check_coherence(b.symbolic, b.computational, wrong);
    CHECK_FALSE(r.verdict);
    CHECK(r.failure.find("base case") != std::string::npos);
}

TEST_CASE("burn transactions must match their announced template") {
    Scenario s;
    s.name = "burnmatch";
    s.users = {"A"};
    s.coinbase = {{"x0", "A", 7}};
    s.moves = {Move{"burn", "A", {"x0"}, 0, "", {}, "", "yy"}};
    RunBundle b = execute_scenario(s, 2);
    REQUIRE(b.coherence.verdict);

    // Replace the burn transaction with a different one: same deposits, one
    // extra output. The authorization announced the original template, so
    // coherence must reject the substitute.
    ComputationalRun tampered = b.computational;
    for (CompLabel& l : tampered.labels) {
        auto* append = std::get_if<AppendTx>(&l);
        if (!append || append->tx.is_coinbase()) continue;
        KeyPair a = KeyPair::from_name("A");
        Transaction alt;
        alt.inputs = append->tx.inputs;
        alt.outputs = append->tx.outputs;
        alt.outputs.push_back(TxOutput{{Atom(BigInt(1))}, false_script(), 0});
        alt.outputs[0].val = 0;
        alt.witnesses = {{Atom(sign_tx(a, alt))}};
        append->tx = alt;
    }
    CoherenceReport r = check_coherence(b.symbolic, tampered, b.maps0);
    CHECK_FALSE(r.verdict);
}

TEST_CASE("classifiable broadcasts not taken by the symbolic run are rejected") {
    Scenario s = tiny_give_scenario();
    RunBundle b = execute_scenario(s, 1);
    REQUIRE(b.coherence.verdict);

    // Drop the give's symbolic steps: its auth broadcast now corresponds to
    // a move the symbolic run never takes.
    SymbolicRun truncated = b.symbolic;
    truncated.steps.resize(truncated.steps.size() - 2);
    CoherenceReport r = check_coherence(truncated, b.computational, b.maps0);
    CHECK_FALSE(r.verdict);
    CHECK(r.failure.find("authorization") != std::string::npos);
}
