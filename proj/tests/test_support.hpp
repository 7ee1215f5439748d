// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

// Shared test helpers: an independent reference evaluator for the script
// semantics, plus random generators for scripts, transactions and symbolic
// runs. The reference evaluator is deliberately written in a different
// style (exceptions for the undefined value, its own selector resolution)
// and must stay independent of src/eval.cpp.

#ifndef COVTOK_TEST_SUPPORT_HPP
#define COVTOK_TEST_SUPPORT_HPP

#include "covtok/eval.hpp"
#include "covtok/spend.hpp"
#include "covtok/symbolic.hpp"

#include <random>

namespace covtok::testsupport {

inline std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n) {
    return n ? rng() % n : 0;
}

// ---------------------------------------------------------------------------
// Reference evaluator

struct RefUndefined {};

class RefEval {
public:
    RefEval(const EvalCtx& ctx) : ctx_(ctx) {}

    Value run(const Script& s) {
        try {
            return go(s);
        } catch (const RefUndefined&) {
            return Value::bottom();
        }
    }

private:
    const EvalCtx& ctx_;

    [[noreturn]] static void undef() { throw RefUndefined{}; }

    const Transaction& tx_on_chain(const Outpoint& o) {
        if (!ctx_.chain.contains_output(o)) undef();
        return ctx_.chain.tx_of(o);
    }

    // Selector resolution, done over (transaction pointer, index) pairs.
    std::pair<const Transaction*, std::uint64_t> sel(const TxoSel& t) {
        Value iv = go(t.index);
        if (!iv.is_int()) undef();
        BigInt n = iv.as_int();
        if (t.kind == TxoKind::Rtxo) {
            if (n < 1 || n > ctx_.rtx.outputs.size())
                return {&ctx_.rtx, 0};  // formed, but no output behind it
            return {&ctx_.rtx, n.convert_to<std::uint64_t>()};
        }
        Outpoint target;
        if (t.kind == TxoKind::Ptxo) {
            if (ctx_.input_index < 1 || ctx_.input_index > ctx_.rtx.inputs.size()) undef();
            const Transaction& holder = tx_on_chain(ctx_.rtx.inputs[ctx_.input_index - 1]);
            if (n < 1 || n > holder.inputs.size()) undef();
            target = holder.inputs[n.convert_to<std::size_t>() - 1];
        } else {
            if (n < 1 || n > ctx_.rtx.inputs.size()) undef();
            target = ctx_.rtx.inputs[n.convert_to<std::size_t>() - 1];
        }
        const Transaction& tx = tx_on_chain(target);
        return {&tx, target.index};
    }

    const TxOutput& output(const std::pair<const Transaction*, std::uint64_t>& p) {
        if (p.second < 1 || p.second > p.first->outputs.size()) undef();
        return p.first->outputs[p.second - 1];
    }

    const TxOutput& current() {
        if (ctx_.input_index < 1 || ctx_.input_index > ctx_.rtx.inputs.size()) undef();
        const Outpoint& o = ctx_.rtx.inputs[ctx_.input_index - 1];
        if (!ctx_.chain.contains_output(o)) undef();
        return ctx_.chain.resolve(o);
    }

    static bool truthy(const Value& v) { return !(v.is_int() && v.as_int() == 0); }

    Value go(const Script& s) {
        const Expr::Node& n = s->node;
        if (const auto* c = std::get_if<Expr::Const>(&n)) return Value::from_atom(c->v);
        if (const auto* b = std::get_if<Expr::Bin>(&n)) {
            Value l = go(b->lhs);
            Value r = go(b->rhs);
            switch (b->op) {
                case BinOp::Add:
                case BinOp::Sub: {
                    if (!l.is_int() || !r.is_int()) undef();
                    BigInt x = l.as_int(), y = r.as_int();
                    return Value::integer(b->op == BinOp::Add ? BigInt(x + y) : BigInt(x - y));
                }
                case BinOp::Eq:
                    if (l.v.index() != r.v.index()) return Value::integer(0);
                    return Value::integer(value_eq(l, r) ? 1 : 0);
                case BinOp::Lt:
                    if (!l.is_int() || !r.is_int()) undef();
                    return Value::integer(l.as_int() < r.as_int() ? 1 : 0);
            }
            undef();
        }
        if (const auto* i = std::get_if<Expr::If>(&n))
            return truthy(go(i->cond)) ? go(i->then_e) : go(i->else_e);
        if (const auto* at = std::get_if<Expr::SeqAt>(&n)) {
            Value v = go(at->seq);
            if (!v.is_seq() || at->index < 1 || at->index > v.as_seq().size()) undef();
            return Value::from_atom(v.as_seq()[at->index - 1]);
        }
        if (std::get_if<Expr::RtxWit>(&n)) {
            if (ctx_.input_index < 1 || ctx_.input_index > ctx_.rtx.witnesses.size()) undef();
            const auto& w = ctx_.rtx.witnesses[ctx_.input_index - 1];
            return w.size() == 1 ? Value::from_atom(w[0]) : Value::seq(w);
        }
        if (const auto* sz = std::get_if<Expr::Size>(&n)) {
            Value v = go(sz->e);
            if (v.is_bytes()) return Value::integer(v.as_bytes().size());
            if (!v.is_int()) undef();
            BigInt x = v.as_int();
            if (x < 0) x = -x;
            std::size_t len = 0;
            do {
                ++len;
                x >>= 8;
            } while (x > 0);
            return Value::integer(len);
        }
        if (const auto* h = std::get_if<Expr::Hash>(&n)) {
            Value v = go(h->e);
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
            return Value::bytes(sha256(enc.bytes()).to_bytes());
        }
        if (const auto* vs = std::get_if<Expr::Versig>(&n)) {
            Value k = go(vs->key);
            Value sig = go(vs->sig);
            if (!k.is_bytes() || !sig.is_bytes()) return Value::integer(0);
            return Value::integer(verify_tx(k.as_bytes(), sig.as_bytes(), ctx_.rtx) ? 1 : 0);
        }
        if (const auto* f = std::get_if<Expr::Field>(&n)) {
            const TxOutput& out = output(sel(f->txo));
            if (f->field == TxField::Arg) return Value::seq(out.arg);
            return Value::integer(out.val);
        }
        if (const auto* v = std::get_if<Expr::Verscr>(&n))
            return Value::integer(script_eq(v->lit, output(sel(v->txo)).scr) ? 1 : 0);
        if (const auto* v = std::get_if<Expr::Verrec>(&n))
            return Value::integer(script_eq(current().scr, output(sel(v->txo)).scr) ? 1 : 0);
        if (std::get_if<Expr::InIdx>(&n)) return Value::integer(ctx_.input_index);
        if (std::get_if<Expr::OutIdx>(&n)) {
            if (ctx_.input_index < 1 || ctx_.input_index > ctx_.rtx.inputs.size()) undef();
            return Value::integer(ctx_.rtx.inputs[ctx_.input_index - 1].index);
        }
        if (const auto* l = std::get_if<Expr::InLen>(&n))
            return Value::integer(sel(l->txo).first->inputs.size());
        if (const auto* l = std::get_if<Expr::OutLen>(&n))
            return Value::integer(sel(l->txo).first->outputs.size());
        if (const auto* t = std::get_if<Expr::TxId>(&n)) {
            auto p = sel(t->txo);
            output(p);
            return Value::bytes(output_digest(*p.first, p.second).to_bytes());
        }
        undef();
    }
};

inline Value ref_eval(const Script& s, const EvalCtx& ctx) { return RefEval(ctx).run(s); }

// ---------------------------------------------------------------------------
// Random script generation

inline Atom random_atom(std::mt19937_64& rng) {
    if (rand_below(rng, 2) == 0)
        return Atom(BigInt(static_cast<long long>(rand_below(rng, 40)) - 8));
    Bytes b;
    std::size_t len = rand_below(rng, 6);
    for (std::size_t i = 0; i < len; ++i) b.push_back(static_cast<std::uint8_t>(rng() & 0xff));
    return Atom(b);
}

inline Script random_script(std::mt19937_64& rng, int depth) {
    TxoSel txo = [&]() -> TxoSel {
        Script idx = depth > 0 && rand_below(rng, 4) == 0
                         ? random_script(rng, 0)
                         : sc_int(static_cast<long long>(rand_below(rng, 4)));
        switch (rand_below(rng, 4)) {
            case 0: return rtxo(idx);
            case 1: return stxo(idx);
            case 2: return ptxo(idx);
            default: return ctxo();
        }
    }();
    if (depth <= 0) {
        switch (rand_below(rng, 6)) {
            case 0: return sc_int(static_cast<long long>(rand_below(rng, 10)) - 2);
            case 1: return sc_bytes(as_bytes(Atom(Bytes{0x01, 0x02})));
            case 2: return sc_inidx();
            case 3: return sc_outidx();
            case 4: return sc_field(txo, rand_below(rng, 2) ? TxField::Arg : TxField::Val);
            default: return sc_rtx_wit();
        }
    }
    auto sub = [&]() { return random_script(rng, depth - 1); };
    switch (rand_below(rng, 14)) {
        case 0: return sc_bin(static_cast<BinOp>(rand_below(rng, 4)), sub(), sub());
        case 1: return sc_if(sub(), sub(), sub());
        case 2: return sc_at(sub(), rand_below(rng, 5));
        case 3: return sc_size(sub());
        case 4: return sc_hash(sub());
        case 5: return sc_versig(sub(), sub());
        case 6: return sc_field(txo, rand_below(rng, 2) ? TxField::Arg : TxField::Val);
        case 7: return sc_verscr(sub(), txo);
        case 8: return sc_verrec(txo);
        case 9: return sc_inlen(txo);
        case 10: return sc_outlen(txo);
        case 11: return sc_txid(txo);
        case 12: return sc_and(sub(), sub());
        default: return sc_not(sub());
    }
}

// A small chain plus an unappended redeeming transaction, exercising parent
// and sibling selectors under random data.
struct RandomCtx {
    Chain chain;
    Transaction rtx;
    std::size_t input_index;
};

inline std::vector<Atom> random_arg(std::mt19937_64& rng) {
    std::vector<Atom> arg;
    std::size_t n = rand_below(rng, 4);
    for (std::size_t i = 0; i < n; ++i) arg.push_back(random_atom(rng));
    return arg;
}

inline RandomCtx random_context(std::mt19937_64& rng) {
    Transaction coinbase;
    std::size_t nout = 2 + rand_below(rng, 3);
    for (std::size_t i = 0; i < nout; ++i)
        coinbase.outputs.push_back(TxOutput{random_arg(rng), sc_true(), BigInt(rand_below(rng, 9))});
    Chain chain = Chain::genesis(coinbase);
    Digest cb = txid_of(coinbase);

    Transaction mid;
    mid.inputs = {Outpoint{cb, 1}, Outpoint{cb, 2}};
    mid.witnesses = {{random_atom(rng)}, {}};
    std::size_t mout = 1 + rand_below(rng, 3);
    BigInt budget = coinbase.outputs[0].val + coinbase.outputs[1].val;
    for (std::size_t i = 0; i < mout; ++i)
        mid.outputs.push_back(TxOutput{random_arg(rng), sc_true(), i == 0 ? budget : BigInt(0)});
    chain = validate_and_append(chain, mid);
    Digest mid_id = txid_of(mid);

    Transaction rtx;
    rtx.inputs = {Outpoint{mid_id, 1}};
    if (coinbase.outputs.size() > 2 && rand_below(rng, 2)) rtx.inputs.push_back(Outpoint{cb, 3});
    for (auto& in : rtx.inputs) (void)in;
    rtx.witnesses.assign(rtx.inputs.size(), {});
    for (auto& w : rtx.witnesses) {
        std::size_t wn = rand_below(rng, 3);
        for (std::size_t i = 0; i < wn; ++i) w.push_back(random_atom(rng));
    }
    std::size_t rout = 1 + rand_below(rng, 3);
    for (std::size_t i = 0; i < rout; ++i)
        rtx.outputs.push_back(TxOutput{random_arg(rng), rand_below(rng, 4) == 0 ? sc_true() : random_script(rng, 1),
                                       BigInt(rand_below(rng, 5))});
    std::size_t idx = 1 + rand_below(rng, rtx.inputs.size());
    return RandomCtx{std::move(chain), std::move(rtx), idx};
}

// A random standalone transaction (structure only, not chain-valid).
inline Transaction random_tx(std::mt19937_64& rng) {
    Transaction tx;
    std::size_t nin = rand_below(rng, 3);
    for (std::size_t i = 0; i < nin; ++i) {
        Outpoint o;
        for (auto& byte : o.txid.bytes) byte = static_cast<std::uint8_t>(rng() & 0xff);
        o.index = 1 + rand_below(rng, 3);
        tx.inputs.push_back(o);
    }
    tx.witnesses.assign(nin, {});
    for (auto& w : tx.witnesses) {
        std::size_t wn = rand_below(rng, 2);
        for (std::size_t i = 0; i < wn; ++i) w.push_back(random_atom(rng));
    }
    std::size_t nout = 1 + rand_below(rng, 3);
    for (std::size_t i = 0; i < nout; ++i)
        tx.outputs.push_back(
            TxOutput{random_arg(rng), random_script(rng, 2), BigInt(rand_below(rng, 100))});
    return tx;
}

// ---------------------------------------------------------------------------
// Random symbolic runs (authorizations and actions over a few users)

struct SymbolicGen {
    std::mt19937_64 rng;
    SymbolicRun run;
    Configuration config;
    std::size_t fresh = 0;

    explicit SymbolicGen(std::uint64_t seed, std::size_t n_deposits = 4) {
        rng.seed(seed);
        for (std::size_t i = 0; i < n_deposits; ++i) {
            run.initial.deposits.push_back(Deposit{"d" + std::to_string(i),
                                                   user(rand_below(rng, 3)),
                                                   BigInt(rand_below(rng, 3) == 0 ? 0 : rand_below(rng, 15)),
                                                   TokenId::btc()});
        }
        config = run.initial;
    }

    static User user(std::uint64_t i) { return std::string(1, static_cast<char>('A' + i % 3)); }
    User random_user() { return user(rand_below(rng, 3)); }
    Name next_name() { return "f" + std::to_string(fresh++); }
    std::string next_token() { return "tk" + std::to_string(fresh++); }

    void push(const Label& l, const Freshness& fr) {
        Configuration next = step(config, l, fr);
        run.steps.push_back(SymbolicRun::Step{l, next});
        config = std::move(next);
    }

    // Performs one random enabled step (an authorization immediately
    // followed by its action when possible); returns false when stuck.
    bool advance() {
        std::vector<const Deposit*> deposits;
        for (const Deposit& d : config.deposits) deposits.push_back(&d);
        if (deposits.empty()) return false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            // Copies: push() reassigns the configuration, so deposit
            // references must not be read across pushes.
            const Deposit* xp = deposits[rand_below(rng, deposits.size())];
            Name xn = xp->name;
            User xo = xp->owner;
            BigInt xa = xp->amount;
            TokenId xt = xp->token;
            try {
                switch (rand_below(rng, 6)) {
                    case 0: {  // gen
                        if (!(xa == 0) || !xt.is_btc()) break;
                        BigInt v(1 + rand_below(rng, 12));
                        ActionLabel a = GenLabel{xn, v};
                        push(authorization(xn, xo, a), {});
                        push(action(a), Freshness{{next_name()}, {next_token()}});
                        return true;
                    }
                    case 1: {  // split
                        BigInt v(rand_below(rng, 1 + xa.convert_to<unsigned long long>()));
                        ActionLabel a = SplitLabel{xn, v, random_user()};
                        push(authorization(xn, xo, a), {});
                        push(action(a), Freshness{{next_name(), next_name()}, {}});
                        return true;
                    }
                    case 2: {  // give
                        ActionLabel a = GiveLabel{xn, random_user()};
                        push(authorization(xn, xo, a), {});
                        push(action(a), Freshness{{next_name()}, {}});
                        return true;
                    }
                    case 3: {  // join
                        const Deposit* yp = deposits[rand_below(rng, deposits.size())];
                        if (yp == xp || yp->token != xt) break;
                        Name yn2 = yp->name;
                        User yo = yp->owner;
                        ActionLabel a = JoinLabel{xn, yn2, random_user()};
                        push(authorization(xn, xo, a), {});
                        push(authorization(yn2, yo, a), {});
                        push(action(a), Freshness{{next_name()}, {}});
                        return true;
                    }
                    case 4: {  // xchg
                        const Deposit* yp = deposits[rand_below(rng, deposits.size())];
                        if (yp == xp || xt.is_btc()) break;
                        Name yn2 = yp->name;
                        User yo = yp->owner;
                        ActionLabel a = XchgLabel{xn, yn2};
                        push(authorization(xn, xo, a), {});
                        push(authorization(yn2, yo, a), {});
                        push(action(a), Freshness{{next_name(), next_name()}, {}});
                        return true;
                    }
                    default: {  // burn
                        std::vector<Name> xs = {xn};
                        std::vector<User> owners = {xo};
                        if (xt.is_btc()) {
                            for (const Deposit* yp : deposits)
                                if (yp != xp && yp->token.is_btc() && rand_below(rng, 3) == 0) {
                                    xs.push_back(yp->name);
                                    owners.push_back(yp->owner);
                                    break;
                                }
                        }
                        Name yn = next_name();
                        ActionLabel a = BurnLabel{xs, yn};
                        for (std::size_t k = 0; k < xs.size(); ++k)
                            push(authorization(xs[k], owners[k], a), {});
                        push(action(a), Freshness{});
                        return true;
                    }
                }
            } catch (const StepError&) {
                return false;  // should not happen; treated as stuck
            }
        }
        return false;
    }
};

inline SymbolicRun random_symbolic_run(std::uint64_t seed, std::size_t max_steps) {
    SymbolicGen gen(seed);
    while (gen.run.steps.size() < max_steps)
        if (!gen.advance()) break;
    return gen.run;
}

}  // namespace covtok::testsupport

#endif
