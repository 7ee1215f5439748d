// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "covtok/spend.hpp"

#include "covtok/eval.hpp"

namespace covtok {

Script strip_signatures(const Script& s) {
    return std::visit(
        [&s](const auto& n) -> Script {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Versig>) {
                return sc_true();
            } else if constexpr (std::is_same_v<T, Expr::Bin>) {
                return sc_bin(n.op, strip_signatures(n.lhs), strip_signatures(n.rhs));
            } else if constexpr (std::is_same_v<T, Expr::If>) {
                return sc_if(strip_signatures(n.cond), strip_signatures(n.then_e),
                             strip_signatures(n.else_e));
            } else if constexpr (std::is_same_v<T, Expr::SeqAt>) {
                return sc_at(strip_signatures(n.seq), n.index);
            } else if constexpr (std::is_same_v<T, Expr::Size>) {
                return sc_size(strip_signatures(n.e));
            } else if constexpr (std::is_same_v<T, Expr::Hash>) {
                return sc_hash(strip_signatures(n.e));
            } else {
                // Leaves and txo-based operators have no nested signature
                // checks to strip (verscr literals are compared, not run).
                return s;
            }
        },
        s->node);
}

namespace {

// Candidate redeeming templates. Each template reuses the probed output's
// own script in its outputs, so recursive covenants compare equal.
std::vector<Transaction> probe_templates(const TxOutput& out, const Outpoint& o, bool token_like) {
    std::vector<Transaction> probes;

    // give-shaped: one output preserving the arg contents, op set to give.
    if (token_like && out.arg.size() >= 4) {
        Transaction t;
        t.inputs = {o};
        t.witnesses = {{}};
        std::vector<Atom> arg = out.arg;
        arg[0] = Atom(BigInt(op::give));
        t.outputs = {TxOutput{std::move(arg), out.scr, 0}};
        probes.push_back(std::move(t));
    }

    // burn-shaped: one unspendable output.
    {
        Transaction t;
        t.inputs = {o};
        t.witnesses = {{}};
        t.outputs = {TxOutput{{Atom(BigInt(op::burn))}, false_script(), 0}};
        probes.push_back(std::move(t));
    }

    // split-shaped: the whole balance kept on the first output.
    if (token_like && out.arg.size() >= 4 && is_int(out.arg[2])) {
        Transaction t;
        t.inputs = {o};
        t.witnesses = {{}};
        std::vector<Atom> a1 = out.arg;
        a1[0] = Atom(BigInt(op::split));
        std::vector<Atom> a2 = a1;
        a2[2] = Atom(BigInt(0));
        t.outputs = {TxOutput{std::move(a1), out.scr, 0}, TxOutput{std::move(a2), out.scr, 0}};
        probes.push_back(std::move(t));
    }

    // self-propagating: one output replicating arg, script and value.
    {
        Transaction t;
        t.inputs = {o};
        t.witnesses = {{}};
        t.outputs = {TxOutput{out.arg, out.scr, out.val}};
        probes.push_back(std::move(t));
    }

    return probes;
}

bool any_probe_satisfies(const Chain& chain, const Script& stripped,
                         const std::vector<Transaction>& probes) {
    for (const Transaction& probe : probes) {
        Value v = eval(stripped, EvalCtx{chain, probe, 1});
        if (script_satisfied(v)) return true;
    }
    return false;
}

}  // namespace

bool is_spendable(const Chain& chain, const Outpoint& o) {
    const TxOutput& out = chain.resolve(o);
    if (is_false_script(out.scr)) return false;
    if (is_e_btc(out.scr)) return true;

    if (is_e_tok(out.scr)) {
        static const Script stripped_tok = strip_signatures(e_tok());
        return any_probe_satisfies(chain, stripped_tok, probe_templates(out, o, true));
    }

    Script stripped = strip_signatures(out.scr);
    if (any_probe_satisfies(chain, stripped, probe_templates(out, o, true))) return true;
    throw SpendabilityError("UnknownScriptShape: cannot decide spendability of " + o.to_string());
}

BigInt tokval_c(const Chain& chain, const Outpoint& tok) {
    Bytes target = outpoint_digest(chain, tok).to_bytes();
    BigInt sum = 0;
    for (const Outpoint& o : chain.utxo()) {
        const TxOutput& out = chain.resolve(o);
        auto fields = token_fields(out);
        if (!fields || fields->tkid != target) continue;
        if (is_spendable(chain, o)) sum += fields->tkval;
    }
    return sum;
}

}  // namespace covtok
