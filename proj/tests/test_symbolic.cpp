// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"

#include <algorithm>

using namespace covtok;
using namespace covtok::testsupport;

namespace {

Configuration one_btc_deposit(const Name& x, const User& owner, const BigInt& v) {
    Configuration g;
    g.deposits.push_back(Deposit{x, owner, v, TokenId::btc()});
    return g;
}

StepError::Code step_error(const Configuration& g, const Label& l, const Freshness& f) {
    try {
        step(g, l, f);
    } catch (const StepError& e) {
        return e.code;
    }
    FAIL("step was unexpectedly derivable");
    return StepError::Code::NoSuchDeposit;
}

}  // namespace

TEST_CASE("minting consumes a zero-valued bitcoin deposit and its authorization") {
    Configuration g0 = one_btc_deposit("x0", "A", 0);
    ActionLabel gen = GenLabel{"x0", 10};
    Configuration g1 = step(g0, authorization("x0", "A", gen), {});
    CHECK(g1.count_auth("x0", "A", gen) == 1);
    Configuration g2 = step(g1, action(gen), Freshness{{"x1"}, {"t"}});
    REQUIRE(g2.deposits.size() == 1);
    CHECK(g2.deposits[0].name == "x1");
    CHECK(g2.deposits[0].owner == "A");
    CHECK(g2.deposits[0].amount == 10);
    CHECK(g2.deposits[0].token.id == "t");
    CHECK(g2.auths.empty());
}

TEST_CASE("gen side conditions") {
    Configuration g = one_btc_deposit("x0", "A", 0);
    CHECK(step_error(g, authorization("x0", "A", GenLabel{"x0", 0}), {}) ==
          StepError::Code::SideConditionViolated);
    CHECK(step_error(g, authorization("x0", "B", GenLabel{"x0", 5}), {}) ==
          StepError::Code::NotOwner);

    Configuration valued = one_btc_deposit("x0", "A", 3);
    CHECK(step_error(valued, authorization("x0", "A", GenLabel{"x0", 5}), {}) ==
          StepError::Code::SideConditionViolated);

    // The action itself demands the authorization.
    CHECK(step_error(g, action(GenLabel{"x0", 5}), Freshness{{"y"}, {"t"}}) ==
          StepError::Code::MissingAuthorization);
}

TEST_CASE("join requires equal tokens and both authorizations") {
    Configuration g;
    g.deposits = {Deposit{"x", "A", 8, TokenId{"t"}}, Deposit{"y", "B", 2, TokenId{"u"}}};
    ActionLabel join = JoinLabel{"x", "y", "C"};
    CHECK(step_error(g, authorization("x", "A", join), {}) ==
          StepError::Code::SideConditionViolated);

    g.deposits[1].token = TokenId{"t"};
    Configuration g1 = step(g, authorization("x", "A", join), {});
    CHECK(step_error(g1, action(join), Freshness{{"z"}, {}}) ==
          StepError::Code::MissingAuthorization);
    Configuration g2 = step(g1, authorization("y", "B", join), {});
    Configuration g3 = step(g2, action(join), Freshness{{"z"}, {}});
    REQUIRE(g3.deposits.size() == 1);
    CHECK(g3.deposits[0].owner == "C");
    CHECK(g3.deposits[0].amount == 10);

    CHECK(step_error(g, action(JoinLabel{"x", "missing", "C"}), Freshness{{"z"}, {}}) ==
          StepError::Code::NoSuchDeposit);
}

TEST_CASE("burn of several deposits needs all-bitcoin contents") {
    Configuration g;
    g.deposits = {Deposit{"x1", "A", 5, TokenId::btc()}, Deposit{"x2", "B", 1, TokenId{"t"}}};
    ActionLabel burn = BurnLabel{{"x1", "x2"}, "y"};
    CHECK(step_error(g, authorization("x1", "A", burn), {}) ==
          StepError::Code::SideConditionViolated);

    // A single token deposit burns fine.
    ActionLabel single = BurnLabel{{"x2"}, "y"};
    Configuration g1 = step(g, authorization("x2", "B", single), {});
    Configuration g2 = step(g1, action(single), {});
    CHECK(g2.deposits.size() == 1);
    CHECK(g2.auths.empty());

    // Two bitcoin deposits burn together, sharing the destination name.
    Configuration h;
    h.deposits = {Deposit{"x1", "A", 5, TokenId::btc()}, Deposit{"x2", "B", 1, TokenId::btc()}};
    ActionLabel both = BurnLabel{{"x1", "x2"}, "y"};
    Configuration h1 = step(h, authorization("x1", "A", both), {});
    Configuration h2 = step(h1, authorization("x2", "B", both), {});
    CHECK(step(h2, action(both), {}).deposits.empty());

    // The same y may not be claimed by a different burn.
    ActionLabel other = BurnLabel{{"x2"}, "y"};
    CHECK(step_error(h2, authorization("x2", "B", other), {}) ==
          StepError::Code::SideConditionViolated);
}

TEST_CASE("exchange forbids bitcoins on the first deposit") {
    Configuration g;
    g.deposits = {Deposit{"x", "A", 5, TokenId::btc()}, Deposit{"y", "B", 2, TokenId{"t"}}};
    CHECK(step_error(g, authorization("x", "A", XchgLabel{"x", "y"}), {}) ==
          StepError::Code::SideConditionViolated);

    ActionLabel ok = XchgLabel{"y", "x"};
    Configuration g1 = step(g, authorization("y", "B", ok), {});
    Configuration g2 = step(g1, authorization("x", "A", ok), {});
    Configuration g3 = step(g2, action(ok), Freshness{{"p", "q"}, {}});
    CHECK(tokval_s(TokenId{"t"}, g3) == 2);
    const Deposit* p = g3.find("p");
    REQUIRE(p);
    CHECK(p->owner == "B");
    CHECK(p->token.is_btc());
    CHECK(p->amount == 5);
}

TEST_CASE("token balance sums deposits of exactly that token") {
    Configuration empty;
    CHECK(tokval_s(TokenId{"t"}, empty) == 0);
    Configuration g;
    g.deposits = {Deposit{"a", "A", 8, TokenId{"t"}}, Deposit{"b", "B", 2, TokenId{"t"}},
                  Deposit{"c", "A", 9, TokenId{"u"}}, Deposit{"d", "B", 4, TokenId::btc()}};
    CHECK(tokval_s(TokenId{"t"}, g) == 10);
    CHECK(tokval_s(TokenId{"u"}, g) == 9);
}

TEST_CASE("minted and burnt values over a run") {
    SymbolicRun run;
    run.initial = one_btc_deposit("x0", "A", 0);
    Configuration g = run.initial;
    ActionLabel gen = GenLabel{"x0", 10};
    g = step(g, authorization("x0", "A", gen), {});
    run.steps.push_back({authorization("x0", "A", gen), g});
    g = step(g, action(gen), Freshness{{"x1"}, {"t"}});
    run.steps.push_back({action(gen), g});

    CHECK(genval(TokenId{"t"}, run) == 10);
    CHECK(burnval(TokenId{"t"}, run) == 0);
    CHECK(genval(TokenId{"never"}, run) == 0);
    CHECK(burnval(TokenId{"never"}, run) == 0);

    ActionLabel split = SplitLabel{"x1", 4, "B"};
    g = step(g, authorization("x1", "A", split), {});
    run.steps.push_back({authorization("x1", "A", split), g});
    g = step(g, action(split), Freshness{{"x2", "x3"}, {}});
    run.steps.push_back({action(split), g});

    ActionLabel burn = BurnLabel{{"x3"}, "yb"};
    g = step(g, authorization("x3", "B", burn), {});
    run.steps.push_back({authorization("x3", "B", burn), g});
    g = step(g, action(burn), {});
    run.steps.push_back({action(burn), g});

    CHECK(burnval(TokenId{"t"}, run) == 6);
    CHECK(tokval_s(TokenId{"t"}, run.last()) == 4);
    CHECK(tokval_s(TokenId{"t"}, run.last()) == genval(TokenId{"t"}, run) - burnval(TokenId{"t"}, run));
    validate_run(run);
}

TEST_CASE("step results are insensitive to configuration ordering") {
    Configuration g;
    g.deposits = {Deposit{"x", "A", 4, TokenId{"t"}}, Deposit{"y", "B", 6, TokenId{"t"}},
                  Deposit{"z", "A", 1, TokenId::btc()}};
    ActionLabel join = JoinLabel{"x", "y", "A"};
    g = step(g, authorization("x", "A", join), {});
    g = step(g, authorization("y", "B", join), {});

    Configuration shuffled = g;
    std::reverse(shuffled.deposits.begin(), shuffled.deposits.end());
    std::reverse(shuffled.auths.begin(), shuffled.auths.end());
    CHECK(config_eq(g, shuffled));
    CHECK(config_eq(step(g, action(join), Freshness{{"w"}, {}}),
                    step(shuffled, action(join), Freshness{{"w"}, {}})));
}

TEST_CASE("duplicate authorizations may coexist and are consumed one at a time") {
    Configuration g = one_btc_deposit("x", "A", 7);
    ActionLabel give = GiveLabel{"x", "B"};
    g = step(g, authorization("x", "A", give), {});
    g = step(g, authorization("x", "A", give), {});
    CHECK(g.count_auth("x", "A", give) == 2);
    Configuration g2 = step(g, action(give), Freshness{{"y"}, {}});
    CHECK(g2.count_auth("x", "A", give) == 1);  // the duplicate persists
}

TEST_CASE("freshness violations are rejected") {
    Configuration g = one_btc_deposit("x", "A", 7);
    ActionLabel give = GiveLabel{"x", "B"};
    g = step(g, authorization("x", "A", give), {});
    CHECK(step_error(g, action(give), Freshness{{"x"}, {}}) ==
          StepError::Code::SideConditionViolated);
    Configuration g0 = one_btc_deposit("x", "A", 0);
    g0 = step(g0, authorization("x", "A", GenLabel{"x", 3}), {});
    CHECK(step_error(g0, action(GenLabel{"x", 3}), Freshness{{"y"}, {"BTC"}}) ==
          StepError::Code::SideConditionViolated);
}

TEST_CASE("label inference recovers the transition label") {
    Configuration g = one_btc_deposit("x0", "A", 0);
    Label auth = authorization("x0", "A", GenLabel{"x0", 10});
    Configuration g1 = step(g, auth, {});
    InferResult r = infer_label(g, g1);
    REQUIRE(r.outcome == InferResult::Outcome::Found);
    CHECK(label_eq(*r.label, auth));

    Label act = action(GenLabel{"x0", 10});
    Configuration g2 = step(g1, act, Freshness{{"x1"}, {"t"}});
    r = infer_label(g1, g2);
    REQUIRE(r.outcome == InferResult::Outcome::Found);
    CHECK(label_eq(*r.label, act));

    CHECK(infer_label(g, g).outcome == InferResult::Outcome::NoneFound);
}

TEST_CASE("self-splits are disambiguated by authorization bookkeeping") {
    // A self-split of 5 into 2 + 3 yields the same deposits as a split into
    // 3 + 2 (up to fresh names), but taking the action consumes the
    // authorization carrying its own label, so the residues differ and the
    // label stays uniquely determined.
    Configuration g;
    g.deposits = {Deposit{"x", "A", 5, TokenId{"t"}}};
    g = step(g, authorization("x", "A", SplitLabel{"x", 2, "A"}), {});
    g = step(g, authorization("x", "A", SplitLabel{"x", 3, "A"}), {});
    Configuration g2 = step(g, action(SplitLabel{"x", 2, "A"}), Freshness{{"p", "q"}, {}});
    InferResult r = infer_label(g, g2);
    REQUIRE(r.outcome == InferResult::Outcome::Found);
    CHECK(label_eq(*r.label, action(SplitLabel{"x", 2, "A"})));
}

TEST_CASE("step-then-infer round trip over random runs") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        SymbolicRun run = random_symbolic_run(seed, 30);
        validate_run(run);
        for (std::size_t i = 0; i < run.steps.size(); ++i) {
            InferResult r = infer_label(run.at(i), run.steps[i].config);
            if (r.outcome == InferResult::Outcome::Found) {
                CHECK(label_eq(*r.label, run.steps[i].label));
            } else {
                // Ambiguity must list the true label among the candidates.
                REQUIRE(r.outcome == InferResult::Outcome::Ambiguous);
                bool present = false;
                for (const Label& c : r.candidates)
                    if (label_eq(c, run.steps[i].label)) present = true;
                CHECK(present);
            }
        }
    }
}

TEST_CASE("balance preservation over random runs") {
    for (std::uint64_t seed = 100; seed < 140; ++seed) {
        SymbolicRun run = random_symbolic_run(seed, 40);
        validate_run(run);
        std::set<std::string> tokens;
        for (std::size_t i = 0; i < run.length(); ++i)
            for (const Deposit& d : run.at(i).deposits)
                if (!d.token.is_btc()) tokens.insert(d.token.id);
        for (const std::string& t : tokens)
            CHECK(tokval_s(TokenId{t}, run.last()) ==
                  genval(TokenId{t}, run) - burnval(TokenId{t}, run));
    }
}

TEST_CASE("structural run equivalence is name-insensitive but shape-sensitive") {
    auto make = [](const char* fresh1, const char* fresh2, const char* token) {
        SymbolicRun run;
        run.initial = one_btc_deposit("x0", "A", 0);
        Configuration g = run.initial;
        ActionLabel gen = GenLabel{"x0", 10};
        g = step(g, authorization("x0", "A", gen), {});
        run.steps.push_back({authorization("x0", "A", gen), g});
        g = step(g, action(gen), Freshness{{fresh1}, {token}});
        run.steps.push_back({action(gen), g});
        ActionLabel give = GiveLabel{fresh1, "B"};
        g = step(g, authorization(fresh1, "A", give), {});
        run.steps.push_back({authorization(fresh1, "A", give), g});
        g = step(g, action(give), Freshness{{fresh2}, {}});
        run.steps.push_back({action(give), g});
        return run;
    };
    SymbolicRun a = make("p", "q", "t");
    SymbolicRun b = make("u", "v", "w");
    CHECK(runs_alpha_equal(a, b));

    SymbolicRun c = make("p", "q", "t");
    std::get<GiveLabel>(c.steps[2].label.action).recipient = "A";  // different user
    CHECK_FALSE(runs_alpha_equal(a, c));
}
