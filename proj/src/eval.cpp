// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "covtok/eval.hpp"

#include <sstream>

namespace covtok {

Value Value::from_atom(const Atom& a) {
    if (covtok::is_int(a)) return integer(covtok::as_int(a));
    return bytes(covtok::as_bytes(a));
}

std::string Value::to_string() const {
    if (is_bottom()) return "bottom";
    if (is_int()) return as_int().str();
    if (is_bytes()) return "0x" + to_hex(as_bytes());
    std::string out = "[";
    const auto& s = as_seq();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += atom_to_string(s[i]);
    }
    return out + "]";
}

bool value_eq(const Value& a, const Value& b) {
    if (a.v.index() != b.v.index()) return false;
    if (a.is_bottom()) return true;
    if (a.is_int()) return a.as_int() == b.as_int();
    if (a.is_bytes()) return a.as_bytes() == b.as_bytes();
    const auto& sa = a.as_seq();
    const auto& sb = b.as_seq();
    if (sa.size() != sb.size()) return false;
    for (std::size_t i = 0; i < sa.size(); ++i)
        if (!atom_eq(sa[i], sb[i])) return false;
    return true;
}

bool script_satisfied(const Value& v) {
    if (v.is_bottom()) return false;
    return !(v.is_int() && v.as_int() == 0);
}

namespace {

// A resolved output reference: the transaction holding it plus the 1-based
// output index. rtxo may momentarily be out of range; field access checks.
struct ResolvedTxo {
    const Transaction* tx;
    std::uint64_t index;
};

struct Evaluator {
    const EvalCtx& ctx;

    const Transaction* chain_tx(const Outpoint& o) const {
        if (!ctx.chain.contains_output(o)) return nullptr;
        return &ctx.chain.tx_of(o);
    }

    std::optional<ResolvedTxo> resolve_txo(const TxoSel& sel) {
        Value idx = run(sel.index);
        if (!idx.is_int()) return std::nullopt;
        const BigInt& n = idx.as_int();
        switch (sel.kind) {
            case TxoKind::Rtxo: {
                // The pair (rtx, n) is formed without a range check, so
                // inlen/outlen stay defined for out-of-range n; field access
                // checks the range itself (index 0 marks out-of-range).
                std::uint64_t idx = 0;
                if (n >= 1 && n <= ctx.rtx.outputs.size()) idx = static_cast<std::uint64_t>(n);
                return ResolvedTxo{&ctx.rtx, idx};
            }
            case TxoKind::Stxo: {
                if (n < 1 || n > ctx.rtx.inputs.size()) return std::nullopt;
                const Outpoint& o = ctx.rtx.inputs[static_cast<std::size_t>(n) - 1];
                const Transaction* tx = chain_tx(o);
                if (!tx) return std::nullopt;
                return ResolvedTxo{tx, o.index};
            }
            case TxoKind::Ptxo: {
                if (ctx.input_index < 1 || ctx.input_index > ctx.rtx.inputs.size())
                    return std::nullopt;
                const Outpoint& cur = ctx.rtx.inputs[ctx.input_index - 1];
                const Transaction* holder = chain_tx(cur);
                if (!holder) return std::nullopt;
                // Coinbase parents are inaccessible: no inputs to follow.
                if (n < 1 || n > holder->inputs.size()) return std::nullopt;
                const Outpoint& p = holder->inputs[static_cast<std::size_t>(n) - 1];
                const Transaction* tx = chain_tx(p);
                if (!tx) return std::nullopt;
                return ResolvedTxo{tx, p.index};
            }
        }
        return std::nullopt;
    }

    const TxOutput* output_of(const ResolvedTxo& r) const {
        if (r.index < 1 || r.index > r.tx->outputs.size()) return nullptr;
        return &r.tx->outputs[r.index - 1];
    }

    // The output whose script is being evaluated.
    const TxOutput* current_output() const {
        if (ctx.input_index < 1 || ctx.input_index > ctx.rtx.inputs.size()) return nullptr;
        const Outpoint& cur = ctx.rtx.inputs[ctx.input_index - 1];
        if (!ctx.chain.contains_output(cur)) return nullptr;
        return &ctx.chain.resolve(cur);
    }

    Value apply_bin(BinOp op, const Value& l, const Value& r) {
        if (l.is_bottom() || r.is_bottom()) return Value::bottom();
        switch (op) {
            case BinOp::Add:
            case BinOp::Sub:
                if (!l.is_int() || !r.is_int()) return Value::bottom();
                return Value::integer(op == BinOp::Add ? BigInt(l.as_int() + r.as_int())
                                                       : BigInt(l.as_int() - r.as_int()));
            case BinOp::Eq:
                // Mixed-kind comparison is 0, not bottom; same-kind compares
                // structurally.
                if (l.v.index() != r.v.index()) return Value::boolean(false);
                return Value::boolean(value_eq(l, r));
            case BinOp::Lt:
                if (!l.is_int() || !r.is_int()) return Value::bottom();
                return Value::boolean(l.as_int() < r.as_int());
        }
        return Value::bottom();
    }

    Bytes value_preimage(const Value& v) {
        Encoder enc;
        if (v.is_int()) {
            enc.u8('i');
            enc.bigint(v.as_int());
        } else if (v.is_bytes()) {
            enc.u8('b');
            enc.blob(v.as_bytes());
        } else {
            enc.u8('s');
            enc.atoms(v.as_seq());
        }
        return enc.take();
    }

    Value run(const Script& s) {
        return std::visit(
            [this](const auto& n) -> Value {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Expr::Const>) {
                    return Value::from_atom(n.v);
                } else if constexpr (std::is_same_v<T, Expr::Bin>) {
                    return apply_bin(n.op, run(n.lhs), run(n.rhs));
                } else if constexpr (std::is_same_v<T, Expr::If>) {
                    Value c = run(n.cond);
                    if (c.is_bottom()) return Value::bottom();
                    return script_satisfied(c) ? run(n.then_e) : run(n.else_e);
                } else if constexpr (std::is_same_v<T, Expr::SeqAt>) {
                    Value seq = run(n.seq);
                    if (!seq.is_seq()) return Value::bottom();
                    if (n.index < 1 || n.index > seq.as_seq().size()) return Value::bottom();
                    return Value::from_atom(seq.as_seq()[n.index - 1]);
                } else if constexpr (std::is_same_v<T, Expr::RtxWit>) {
                    if (ctx.input_index < 1 || ctx.input_index > ctx.rtx.witnesses.size())
                        return Value::bottom();
                    const auto& wit = ctx.rtx.witnesses[ctx.input_index - 1];
                    // A one-element witness denotes its single value.
                    if (wit.size() == 1) return Value::from_atom(wit[0]);
                    return Value::seq(wit);
                } else if constexpr (std::is_same_v<T, Expr::Size>) {
                    Value v = run(n.e);
                    if (v.is_bytes()) return Value::integer(v.as_bytes().size());
                    if (v.is_int()) {
                        // Minimal big-endian byte length of the magnitude;
                        // zero takes one byte.
                        BigInt x = v.as_int() < 0 ? BigInt(-v.as_int()) : v.as_int();
                        Bytes mag;
                        export_bits(x, std::back_inserter(mag), 8);
                        return Value::integer(mag.empty() ? 1 : mag.size());
                    }
                    return Value::bottom();
                } else if constexpr (std::is_same_v<T, Expr::Hash>) {
                    Value v = run(n.e);
                    if (v.is_bottom()) return Value::bottom();
                    return Value::bytes(sha256(value_preimage(v)).to_bytes());
                } else if constexpr (std::is_same_v<T, Expr::Versig>) {
                    Value key = run(n.key);
                    Value sig = run(n.sig);
                    if (key.is_bottom() || sig.is_bottom()) return Value::bottom();
                    if (!key.is_bytes() || !sig.is_bytes()) return Value::boolean(false);
                    return Value::boolean(verify_tx(key.as_bytes(), sig.as_bytes(), ctx.rtx));
                } else if constexpr (std::is_same_v<T, Expr::Field>) {
                    auto r = resolve_txo(n.txo);
                    if (!r) return Value::bottom();
                    const TxOutput* out = output_of(*r);
                    if (!out) return Value::bottom();
                    if (n.field == TxField::Arg) return Value::seq(out->arg);
                    return Value::integer(out->val);
                } else if constexpr (std::is_same_v<T, Expr::Verscr>) {
                    auto r = resolve_txo(n.txo);
                    if (!r) return Value::bottom();
                    const TxOutput* out = output_of(*r);
                    if (!out) return Value::bottom();
                    return Value::boolean(script_eq(n.lit, out->scr));
                } else if constexpr (std::is_same_v<T, Expr::Verrec>) {
                    const TxOutput* cur = current_output();
                    if (!cur) return Value::bottom();
                    auto r = resolve_txo(n.txo);
                    if (!r) return Value::bottom();
                    const TxOutput* out = output_of(*r);
                    if (!out) return Value::bottom();
                    return Value::boolean(script_eq(cur->scr, out->scr));
                } else if constexpr (std::is_same_v<T, Expr::InIdx>) {
                    return Value::integer(ctx.input_index);
                } else if constexpr (std::is_same_v<T, Expr::OutIdx>) {
                    if (ctx.input_index < 1 || ctx.input_index > ctx.rtx.inputs.size())
                        return Value::bottom();
                    return Value::integer(ctx.rtx.inputs[ctx.input_index - 1].index);
                } else if constexpr (std::is_same_v<T, Expr::InLen>) {
                    auto r = resolve_txo(n.txo);
                    if (!r) return Value::bottom();
                    return Value::integer(r->tx->inputs.size());
                } else if constexpr (std::is_same_v<T, Expr::OutLen>) {
                    auto r = resolve_txo(n.txo);
                    if (!r) return Value::bottom();
                    return Value::integer(r->tx->outputs.size());
                } else if constexpr (std::is_same_v<T, Expr::TxId>) {
                    auto r = resolve_txo(n.txo);
                    if (!r) return Value::bottom();
                    if (!output_of(*r)) return Value::bottom();
                    return Value::bytes(output_digest(*r->tx, r->index).to_bytes());
                } else {
                    return Value::bottom();
                }
            },
            s->node);
    }
};

}  // namespace

Value eval(const Script& s, const EvalCtx& ctx) {
    if (!s) return Value::bottom();
    Evaluator ev{ctx};
    return ev.run(s);
}

}  // namespace covtok
