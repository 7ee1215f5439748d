// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVTOK_MACHINE_HPP
#define COVTOK_MACHINE_HPP

#include "covtok/token.hpp"

namespace covtok {

// A counter machine: registers r1..rn and a program of simple instructions.
// The machine state is stored on chain as the arg sequence (r1..rn, pc) of a
// single output; pc is 0-based, registers are 1-based.
struct Instr {
    enum class Op { Inc, Dec, Zero, Jnz, Halt };
    Op op;
    std::size_t reg = 0;     // 1-based register (inc/dec/zero/jnz)
    std::size_t target = 0;  // 0-based instruction index (jnz)
};

struct CounterMachine {
    std::size_t num_registers = 1;
    std::vector<Instr> program;
};

void validate_machine(const CounterMachine& m);  // throws std::invalid_argument

struct MachineState {
    std::vector<BigInt> registers;
    std::size_t pc = 0;

    static MachineState initial(const CounterMachine& m);
    std::vector<Atom> to_arg() const;  // (r1..rn, pc)
};

enum class CmOutcome { PaidA, PaidB, StepLimit };
const char* to_string(CmOutcome o);

struct Halted {
    CmOutcome winner;  // PaidA iff r1 == 0
};

// Reference interpreter for one step; requires pc < |program|. Decrementing
// a zero register leaves it at zero.
std::variant<MachineState, Halted> cm_step(const CounterMachine& m, const MachineState& s);

struct OracleRun {
    CmOutcome outcome;
    std::size_t steps = 0;            // instructions executed before halting
    std::vector<MachineState> trace;  // states visited, initial state first
};

OracleRun run_oracle(const CounterMachine& m, std::size_t max_steps);

// The self-enforcing covenant for m: each redemption must either pay out the
// whole balance (on halt, to pk_a iff r1 = 0, else pk_b) or reproduce the
// script with the successor state and the same value.
Script compile_cm(const CounterMachine& m, const Bytes& pk_a, const Bytes& pk_b);

// The state-zero transaction locking the funding output's value under the
// machine script.
Transaction build_cm_init(const Chain& chain, const CounterMachine& m, const Outpoint& funding,
                          const KeyPair& funder, const Bytes& pk_a, const Bytes& pk_b);

struct CmRun {
    Chain chain;
    CmOutcome outcome = CmOutcome::StepLimit;
    std::size_t steps = 0;
    std::vector<std::vector<Atom>> state_args;  // on-chain state snapshots, initial first
};

// Appends one state transaction per step until halt or max_steps; on halt
// appends the payout transaction.
CmRun run_on_chain(const Chain& chain, const CounterMachine& m, const Outpoint& funding,
                   const KeyPair& funder, const Bytes& pk_a, const Bytes& pk_b,
                   std::size_t max_steps);

// Line-oriented assembly: "inc R", "dec R", "zero R", "jnz R TARGET",
// "halt"; '#' starts a comment. Register count is the highest register
// mentioned.
CounterMachine parse_cm_asm(const std::string& text);  // throws std::invalid_argument
std::string print_cm_asm(const CounterMachine& m);

}  // namespace covtok

#endif
