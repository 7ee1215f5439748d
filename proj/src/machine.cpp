// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "covtok/machine.hpp"

#include <sstream>

namespace covtok {

const char* to_string(CmOutcome o) {
    switch (o) {
        case CmOutcome::PaidA: return "PaidA";
        case CmOutcome::PaidB: return "PaidB";
        case CmOutcome::StepLimit: return "StepLimit";
    }
    return "?";
}

void validate_machine(const CounterMachine& m) {
    if (m.num_registers < 1) throw std::invalid_argument("machine needs at least one register");
    if (m.program.empty()) throw std::invalid_argument("empty program");
    for (const Instr& ins : m.program) {
        if (ins.op != Instr::Op::Halt && (ins.reg < 1 || ins.reg > m.num_registers))
            throw std::invalid_argument("register index out of range");
        if (ins.op == Instr::Op::Jnz && ins.target >= m.program.size())
            throw std::invalid_argument("jump target out of range");
    }
}

MachineState MachineState::initial(const CounterMachine& m) {
    MachineState s;
    s.registers.assign(m.num_registers, BigInt(0));
    s.pc = 0;
    return s;
}

std::vector<Atom> MachineState::to_arg() const {
    std::vector<Atom> arg;
    arg.reserve(registers.size() + 1);
    for (const BigInt& r : registers) arg.emplace_back(r);
    arg.emplace_back(BigInt(pc));
    return arg;
}

std::variant<MachineState, Halted> cm_step(const CounterMachine& m, const MachineState& s) {
    if (s.pc >= m.program.size()) throw std::out_of_range("program counter out of range");
    const Instr& ins = m.program[s.pc];
    if (ins.op == Instr::Op::Halt)
        return Halted{s.registers.at(0) == 0 ? CmOutcome::PaidA : CmOutcome::PaidB};

    MachineState next = s;
    BigInt& r = next.registers.at(ins.reg - 1);
    switch (ins.op) {
        case Instr::Op::Inc:
            r += 1;
            next.pc = s.pc + 1;
            break;
        case Instr::Op::Dec:
            if (r > 0) r -= 1;  // registers stay in N
            next.pc = s.pc + 1;
            break;
        case Instr::Op::Zero:
            r = 0;
            next.pc = s.pc + 1;
            break;
        case Instr::Op::Jnz:
            next.pc = r != 0 ? ins.target : s.pc + 1;
            break;
        case Instr::Op::Halt:
            break;
    }
    return next;
}

OracleRun run_oracle(const CounterMachine& m, std::size_t max_steps) {
    validate_machine(m);
    OracleRun run;
    MachineState state = MachineState::initial(m);
    run.trace.push_back(state);
    for (std::size_t i = 0; i < max_steps; ++i) {
        if (state.pc >= m.program.size()) {
            // Fell off the program: the on-chain script admits no successor
            // either, so the simulation is stuck.
            run.outcome = CmOutcome::StepLimit;
            return run;
        }
        auto next = cm_step(m, state);
        if (const auto* halted = std::get_if<Halted>(&next)) {
            run.outcome = halted->winner;
            return run;
        }
        state = std::get<MachineState>(next);
        run.trace.push_back(state);
        ++run.steps;
    }
    run.outcome = CmOutcome::StepLimit;
    return run;
}

namespace {

Script reg(std::size_t i) { return sc_arg_at(ctxo(), i); }                  // ctxo.arg.i
Script next_reg(std::size_t i) { return sc_arg_at(rtxo(1), i); }            // rtxo(1).arg.i
Script pc_of(const CounterMachine& m) { return reg(m.num_registers + 1); }
Script next_pc(const CounterMachine& m) { return sc_arg_at(rtxo(1), m.num_registers + 1); }

Script payout_branch(const Bytes& pk) {
    return sc_all({
        sc_eq(sc_inlen(rtxo(1)), sc_int(1)),
        sc_eq(sc_outlen(rtxo(1)), sc_int(1)),
        sc_verscr(e_btc(), rtxo(1)),
        sc_eq(sc_arg_at(rtxo(1), 1), sc_bytes(pk)),
        sc_eq(sc_val(rtxo(1)), sc_val(ctxo())),
    });
}

Script instr_branch(const CounterMachine& m, const Instr& ins, const Bytes& pk_a,
                    const Bytes& pk_b) {
    if (ins.op == Instr::Op::Halt)
        return sc_if(sc_eq(reg(1), sc_int(0)), payout_branch(pk_a), payout_branch(pk_b));

    std::vector<Script> cs = {
        sc_verrec(rtxo(1)),
        sc_eq(sc_inlen(rtxo(1)), sc_int(1)),
        sc_eq(sc_outlen(rtxo(1)), sc_int(1)),
        sc_eq(sc_val(rtxo(1)), sc_val(ctxo())),
    };
    for (std::size_t k = 1; k <= m.num_registers; ++k) {
        if (ins.op != Instr::Op::Jnz && k == ins.reg) continue;
        cs.push_back(sc_eq(next_reg(k), reg(k)));
    }
    switch (ins.op) {
        case Instr::Op::Inc:
            cs.push_back(sc_eq(next_reg(ins.reg), sc_add(reg(ins.reg), sc_int(1))));
            cs.push_back(sc_eq(next_pc(m), sc_add(pc_of(m), sc_int(1))));
            break;
        case Instr::Op::Dec:
            cs.push_back(sc_if(sc_eq(reg(ins.reg), sc_int(0)),
                               sc_eq(next_reg(ins.reg), sc_int(0)),
                               sc_eq(next_reg(ins.reg), sc_sub(reg(ins.reg), sc_int(1)))));
            cs.push_back(sc_eq(next_pc(m), sc_add(pc_of(m), sc_int(1))));
            break;
        case Instr::Op::Zero:
            cs.push_back(sc_eq(next_reg(ins.reg), sc_int(0)));
            cs.push_back(sc_eq(next_pc(m), sc_add(pc_of(m), sc_int(1))));
            break;
        case Instr::Op::Jnz:
            cs.push_back(sc_if(sc_eq(reg(ins.reg), sc_int(0)),
                               sc_eq(next_pc(m), sc_add(pc_of(m), sc_int(1))),
                               sc_eq(next_pc(m), sc_int(static_cast<long long>(ins.target)))));
            break;
        case Instr::Op::Halt:
            break;
    }
    return sc_all(cs);
}

}  // namespace

Script compile_cm(const CounterMachine& m, const Bytes& pk_a, const Bytes& pk_b) {
    validate_machine(m);
    // Dispatch on the program counter; out-of-range counters admit nothing.
    Script script = sc_false();
    for (std::size_t p = m.program.size(); p-- > 0;) {
        script = sc_if(sc_eq(pc_of(m), sc_int(static_cast<long long>(p))),
                       instr_branch(m, m.program[p], pk_a, pk_b), script);
    }
    return script;
}

Transaction build_cm_init(const Chain& chain, const CounterMachine& m, const Outpoint& funding,
                          const KeyPair& funder, const Bytes& pk_a, const Bytes& pk_b) {
    const TxOutput& out = chain.resolve(funding);
    Transaction tx;
    tx.inputs = {funding};
    tx.outputs = {
        TxOutput{MachineState::initial(m).to_arg(), compile_cm(m, pk_a, pk_b), out.val}};
    tx.witnesses = {{Atom(sign_tx(funder, tx))}};
    return tx;
}

CmRun run_on_chain(const Chain& chain, const CounterMachine& m, const Outpoint& funding,
                   const KeyPair& funder, const Bytes& pk_a, const Bytes& pk_b,
                   std::size_t max_steps) {
    CmRun run;
    Transaction init = build_cm_init(chain, m, funding, funder, pk_a, pk_b);
    run.chain = validate_and_append(chain, init);
    Outpoint state_out{txid_of(init), 1};
    BigInt balance = init.outputs[0].val;
    Script script = init.outputs[0].scr;
    MachineState state = MachineState::initial(m);
    run.state_args.push_back(state.to_arg());

    for (std::size_t i = 0; i < max_steps; ++i) {
        if (state.pc >= m.program.size()) return run;  // stuck; funds stay locked
        auto next = cm_step(m, state);
        if (const auto* halted = std::get_if<Halted>(&next)) {
            const Bytes& winner = halted->winner == CmOutcome::PaidA ? pk_a : pk_b;
            Transaction payout;
            payout.inputs = {state_out};
            payout.witnesses = {{}};
            payout.outputs = {make_btc_output(winner, balance)};
            run.chain = validate_and_append(run.chain, payout);
            run.outcome = halted->winner;
            return run;
        }
        state = std::get<MachineState>(next);
        Transaction tx;
        tx.inputs = {state_out};
        tx.witnesses = {{}};
        tx.outputs = {TxOutput{state.to_arg(), script, balance}};
        run.chain = validate_and_append(run.chain, tx);
        state_out = Outpoint{txid_of(tx), 1};
        run.state_args.push_back(state.to_arg());
        ++run.steps;
    }
    return run;
}

CounterMachine parse_cm_asm(const std::string& text) {
    CounterMachine m;
    m.num_registers = 1;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        auto bad = [&](const std::string& why) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": " + why);
        };
        Instr ins{};
        if (word == "halt") {
            ins.op = Instr::Op::Halt;
        } else if (word == "inc" || word == "dec" || word == "zero" || word == "jnz") {
            long long r = 0;
            if (!(ls >> r) || r < 1) bad("expected a register index >= 1");
            ins.reg = static_cast<std::size_t>(r);
            m.num_registers = std::max(m.num_registers, ins.reg);
            if (word == "inc") ins.op = Instr::Op::Inc;
            else if (word == "dec") ins.op = Instr::Op::Dec;
            else if (word == "zero") ins.op = Instr::Op::Zero;
            else {
                ins.op = Instr::Op::Jnz;
                long long t = 0;
                if (!(ls >> t) || t < 0) bad("expected a jump target >= 0");
                ins.target = static_cast<std::size_t>(t);
            }
        } else {
            bad("unknown instruction '" + word + "'");
        }
        std::string extra;
        if (ls >> extra) bad("trailing input '" + extra + "'");
        m.program.push_back(ins);
    }
    validate_machine(m);
    return m;
}

std::string print_cm_asm(const CounterMachine& m) {
    std::ostringstream os;
    for (const Instr& ins : m.program) {
        switch (ins.op) {
            case Instr::Op::Inc: os << "inc " << ins.reg; break;
            case Instr::Op::Dec: os << "dec " << ins.reg; break;
            case Instr::Op::Zero: os << "zero " << ins.reg; break;
            case Instr::Op::Jnz: os << "jnz " << ins.reg << " " << ins.target; break;
            case Instr::Op::Halt: os << "halt"; break;
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace covtok
