// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "covtok/machine.hpp"
#include "test_support.hpp"

using namespace covtok;
using namespace covtok::testsupport;

namespace {

struct Rig {
    KeyPair runner = KeyPair::from_name("runner");
    KeyPair a = KeyPair::from_name("A");
    KeyPair b = KeyPair::from_name("B");
    Chain chain;
    Outpoint funding;

    explicit Rig(const BigInt& funds = 9) {
        chain = Chain::genesis(make_coinbase({{runner.public_key, funds}}));
        funding = Outpoint{txid_of(chain.tx_at(0)), 1};
    }

    CmRun run(const CounterMachine& m, std::size_t max_steps = 1000) {
        return run_on_chain(chain, m, funding, runner, a.public_key, b.public_key, max_steps);
    }
};

CounterMachine from_asm(const std::string& text) { return parse_cm_asm(text); }

// A random machine with in-range jump targets and a final halt.
CounterMachine random_machine(std::mt19937_64& rng) {
    CounterMachine m;
    m.num_registers = 1 + rand_below(rng, 5);
    std::size_t len = 1 + rand_below(rng, 19);
    for (std::size_t i = 0; i + 1 < len; ++i) {
        Instr ins{};
        switch (rand_below(rng, 5)) {
            case 0: ins.op = Instr::Op::Inc; break;
            case 1: ins.op = Instr::Op::Dec; break;
            case 2: ins.op = Instr::Op::Zero; break;
            case 3:
                ins.op = Instr::Op::Jnz;
                ins.target = rand_below(rng, len);
                break;
            default: ins.op = Instr::Op::Halt; break;
        }
        if (ins.op != Instr::Op::Halt) ins.reg = 1 + rand_below(rng, m.num_registers);
        m.program.push_back(ins);
    }
    m.program.push_back(Instr{Instr::Op::Halt, 0, 0});
    return m;
}

}  // namespace

TEST_CASE("the oracle interpreter implements the instruction set") {
    CounterMachine m = from_asm("inc 1\ninc 1\ndec 1\nhalt\n");
    MachineState s = MachineState::initial(m);
    s = std::get<MachineState>(cm_step(m, s));
    CHECK(s.registers[0] == 1);
    CHECK(s.pc == 1);
    s = std::get<MachineState>(cm_step(m, s));
    s = std::get<MachineState>(cm_step(m, s));
    CHECK(s.registers[0] == 1);
    auto halted = cm_step(m, s);
    CHECK(std::get<Halted>(halted).winner == CmOutcome::PaidB);
}

TEST_CASE("decrementing a zero register leaves it at zero") {
    CounterMachine m = from_asm("dec 1\nhalt\n");
    MachineState s = MachineState::initial(m);
    s = std::get<MachineState>(cm_step(m, s));
    CHECK(s.registers[0] == 0);
    CHECK(std::get<Halted>(cm_step(m, s)).winner == CmOutcome::PaidA);
}

TEST_CASE("conditional jumps fire exactly on nonzero registers") {
    CounterMachine m = from_asm("jnz 1 3\ninc 1\njnz 1 0\nhalt\n");
    OracleRun run = run_oracle(m, 100);
    // pc 0 (r=0, fall through), inc, jnz taken to 0, jnz taken to 3, halt.
    CHECK(run.outcome == CmOutcome::PaidB);
    CHECK(run.steps == 4);
}

TEST_CASE("an immediate halt pays the first user") {
    Rig rig;
    CmRun run = rig.run(from_asm("halt\n"));
    CHECK(run.outcome == CmOutcome::PaidA);
    CHECK(run.steps == 0);
    // Payout output belongs to A and carries the whole balance.
    const Transaction& payout = run.chain.tx_at(run.chain.size() - 1);
    CHECK(btc_owner(payout.outputs[0]) == rig.a.public_key);
    CHECK(payout.outputs[0].val == 9);
}

TEST_CASE("a nonzero first register pays the second user") {
    Rig rig;
    CmRun run = rig.run(from_asm("inc 1\nhalt\n"));
    CHECK(run.outcome == CmOutcome::PaidB);
    CHECK(run.steps == 1);
    REQUIRE(run.state_args.size() == 2);
    CHECK(as_int(run.state_args[1][0]) == 1);
    const Transaction& payout = run.chain.tx_at(run.chain.size() - 1);
    CHECK(btc_owner(payout.outputs[0]) == rig.b.public_key);
}

TEST_CASE("the compiled script admits only the successor state") {
    Rig rig;
    CounterMachine m = from_asm("inc 1\nhalt\n");
    Transaction init = build_cm_init(rig.chain, m, rig.funding, rig.runner,
                                     rig.a.public_key, rig.b.public_key);
    Chain chain = validate_and_append(rig.chain, init);
    Outpoint state{txid_of(init), 1};

    auto try_step = [&](std::vector<Atom> arg, BigInt val) {
        Transaction tx;
        tx.inputs = {state};
        tx.witnesses = {{}};
        tx.outputs = {TxOutput{std::move(arg), init.outputs[0].scr, val}};
        return validate_and_append(chain, tx);
    };

    // The correct successor is (1, pc=1) with the balance preserved.
    CHECK(try_step({Atom(BigInt(1)), Atom(BigInt(1))}, 9).size() == 3);
    CHECK_THROWS_AS(try_step({Atom(BigInt(2)), Atom(BigInt(1))}, 9), ValidationError);
    CHECK_THROWS_AS(try_step({Atom(BigInt(1)), Atom(BigInt(0))}, 9), ValidationError);
    CHECK_THROWS_AS(try_step({Atom(BigInt(1)), Atom(BigInt(1))}, 8), ValidationError);

    // Skipping straight to the payout is rejected too.
    Transaction skip;
    skip.inputs = {state};
    skip.witnesses = {{}};
    skip.outputs = {make_btc_output(rig.a.public_key, 9)};
    CHECK_THROWS_AS(validate_and_append(chain, skip), ValidationError);
}

TEST_CASE("a halt-free machine hits the step limit with funds locked") {
    Rig rig;
    CounterMachine m = from_asm("inc 1\njnz 1 0\nhalt\n");  // loops forever
    CmRun run = rig.run(m, 50);
    CHECK(run.outcome == CmOutcome::StepLimit);
    CHECK(run.steps == 50);
    // The last state output still carries the whole balance.
    const Transaction& last = run.chain.tx_at(run.chain.size() - 1);
    CHECK(last.outputs[0].val == 9);
}

TEST_CASE("funds are conserved at every intermediate state") {
    Rig rig;
    CounterMachine m = from_asm("inc 2\ninc 1\ndec 2\nzero 2\nhalt\n");
    CmRun run = rig.run(m);
    for (std::size_t i = 1; i < run.chain.size() - 1; ++i)
        CHECK(run.chain.tx_at(i).outputs[0].val == 9);
}

TEST_CASE("on-chain simulation agrees with the oracle on random machines") {
    std::mt19937_64 rng(31337);
    for (int i = 0; i < 6; ++i) {
        CounterMachine m = random_machine(rng);
        OracleRun oracle = run_oracle(m, 200);
        Rig rig;
        CmRun chain_run = rig.run(m, 200);
        CHECK(chain_run.outcome == oracle.outcome);
        CHECK(chain_run.steps == oracle.steps);
        REQUIRE(chain_run.state_args.size() == oracle.trace.size());
        for (std::size_t k = 0; k < oracle.trace.size(); ++k) {
            std::vector<Atom> want = oracle.trace[k].to_arg();
            REQUIRE(chain_run.state_args[k].size() == want.size());
            for (std::size_t j = 0; j < want.size(); ++j)
                CHECK(atom_eq(chain_run.state_args[k][j], want[j]));
        }
    }
}

TEST_CASE("assembly parses, validates and round trips") {
    CounterMachine m = from_asm("# setup\n inc 2 # bump\n\njnz 2 0\nhalt\n");
    CHECK(m.num_registers == 2);
    CHECK(m.program.size() == 3);
    CHECK(print_cm_asm(parse_cm_asm(print_cm_asm(m))) == print_cm_asm(m));

    CHECK_THROWS_AS(parse_cm_asm("inc 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_cm_asm("jnz 1 99\nhalt\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_cm_asm("frob 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_cm_asm(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_cm_asm("inc 1 2\n"), std::invalid_argument);
}
