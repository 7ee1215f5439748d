// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "covtok/token.hpp"

namespace covtok {

namespace {

// Shorthands for the arg layout of token outputs: op, owner, tkval, tkid at
// positions 1..4. Plain deposits keep the owner key at position 1.
Script t_op(TxoSel t) { return sc_arg_at(std::move(t), 1); }
Script t_owner(TxoSel t) { return sc_arg_at(std::move(t), 2); }
Script t_tkval(TxoSel t) { return sc_arg_at(std::move(t), 3); }
Script t_tkid(TxoSel t) { return sc_arg_at(std::move(t), 4); }
Script b_owner(TxoSel t) { return sc_arg_at(std::move(t), 1); }

Script owner_sig() { return sc_versig(t_owner(ctxo()), sc_rtx_wit()); }

Script burn_branch() {
    return sc_all({
        owner_sig(),
        sc_verscr(sc_false(), rtxo(1)),
        sc_eq(sc_inlen(rtxo(1)), sc_int(1)),
        sc_eq(sc_outlen(rtxo(1)), sc_int(1)),
    });
}

Script split_branch() {
    return sc_all({
        owner_sig(),
        sc_verrec(rtxo(1)),
        sc_verrec(rtxo(2)),
        sc_eq(sc_inlen(rtxo(1)), sc_int(1)),
        sc_eq(sc_outlen(rtxo(1)), sc_int(2)),
        sc_not(sc_lt(t_tkval(rtxo(1)), sc_int(0))),
        sc_not(sc_lt(t_tkval(rtxo(2)), sc_int(0))),
        sc_eq(t_owner(rtxo(1)), t_owner(ctxo())),
        sc_eq(t_tkid(rtxo(1)), t_tkid(ctxo())),
        sc_eq(t_tkid(rtxo(2)), t_tkid(ctxo())),
        sc_eq(sc_add(t_tkval(rtxo(1)), t_tkval(rtxo(2))), t_tkval(ctxo())),
    });
}

Script join_branch() {
    // Each input checks the recursive covenant on the output and on both
    // siblings, and ties its own tkid to the output's; together the two
    // evaluations force stxo(1).tkid = stxo(2).tkid.
    return sc_all({
        sc_verrec(rtxo(1)),
        sc_verrec(stxo(1)),
        sc_verrec(stxo(2)),
        sc_eq(sc_inlen(rtxo(1)), sc_int(2)),
        sc_eq(sc_outlen(rtxo(1)), sc_int(1)),
        sc_eq(t_tkid(ctxo()), t_tkid(rtxo(1))),
        owner_sig(),
        sc_eq(sc_add(t_tkval(stxo(1)), t_tkval(stxo(2))), t_tkval(rtxo(1))),
    });
}

Script xchg_branch() {
    // Output 1 mirrors the first input's token. The owner swap reads the
    // counterpart's owner field at the position its script layout dictates:
    // arg 2 for a token sibling, arg 1 for a plain deposit.
    Script token_sibling = sc_all({
        sc_eq(t_owner(rtxo(1)), t_owner(stxo(2))),
        sc_eq(t_owner(rtxo(2)), t_owner(stxo(1))),
        sc_verrec(rtxo(2)),
        sc_eq(t_tkval(rtxo(2)), t_tkval(stxo(2))),
        sc_eq(t_tkid(rtxo(2)), t_tkid(stxo(2))),
    });
    Script plain_sibling = sc_all({
        sc_eq(t_owner(rtxo(1)), b_owner(stxo(2))),
        sc_eq(b_owner(rtxo(2)), t_owner(stxo(1))),
        sc_verscr(e_btc(), rtxo(2)),
        sc_eq(sc_val(rtxo(2)), sc_val(stxo(2))),
    });
    return sc_all({
        sc_eq(sc_inlen(rtxo(1)), sc_int(2)),
        sc_eq(sc_outlen(rtxo(1)), sc_int(2)),
        sc_verrec(stxo(1)),
        sc_verrec(rtxo(1)),
        owner_sig(),
        sc_eq(t_tkval(rtxo(1)), t_tkval(stxo(1))),
        sc_eq(t_tkid(rtxo(1)), t_tkid(stxo(1))),
        sc_if(sc_verrec(stxo(2)), token_sibling, plain_sibling),
    });
}

Script give_branch() {
    return sc_all({
        sc_eq(sc_inlen(rtxo(1)), sc_int(1)),
        sc_eq(sc_outlen(rtxo(1)), sc_int(1)),
        owner_sig(),
        sc_verrec(rtxo(1)),
        sc_eq(t_tkid(rtxo(1)), t_tkid(ctxo())),
        sc_eq(t_tkval(rtxo(1)), t_tkval(ctxo())),
    });
}

Script build_e_tok() {
    // Provenance: when the parent is not a token output, the current output
    // must be a well-formed mint (its tkid names the redeemed deposit, which
    // held 0 bitcoins, the minting transaction has a single output, and the
    // minted amount is positive).
    Script gen_checks = sc_all({
        sc_eq(t_tkid(ctxo()), sc_txid(ptxo(1))),
        sc_eq(sc_val(ptxo(1)), sc_int(0)),
        sc_eq(sc_outlen(ctxo()), sc_int(1)),
        sc_lt(sc_int(0), t_tkval(ctxo())),
    });
    Script provenance = sc_if(sc_not(sc_verrec(ptxo(1))), gen_checks, sc_true());

    Script dispatch = sc_if(
        sc_eq(t_op(rtxo(1)), sc_int(op::burn)), burn_branch(),
        sc_if(sc_eq(t_op(rtxo(1)), sc_int(op::split)), split_branch(),
              sc_if(sc_eq(t_op(rtxo(1)), sc_int(op::join)), join_branch(),
                    sc_if(sc_eq(t_op(rtxo(1)), sc_int(op::xchg)), xchg_branch(),
                          sc_if(sc_eq(t_op(rtxo(1)), sc_int(op::give)), give_branch(),
                                sc_false())))));

    return sc_and(provenance, dispatch);
}

}  // namespace

Script e_btc() {
    static const Script s = sc_versig(sc_arg_at(ctxo(), 1), sc_rtx_wit());
    return s;
}

Script e_tok() {
    static const Script s = build_e_tok();
    return s;
}

Script false_script() {
    static const Script s = sc_false();
    return s;
}

Script intern_script(const Script& s) {
    if (script_eq(s, e_tok())) return e_tok();
    if (script_eq(s, e_btc())) return e_btc();
    if (script_eq(s, false_script())) return false_script();
    return s;
}

bool is_e_btc(const Script& s) { return script_eq(s, e_btc()); }
bool is_e_tok(const Script& s) { return script_eq(s, e_tok()); }
bool is_false_script(const Script& s) { return script_eq(s, false_script()); }

std::optional<TokenFields> token_fields(const TxOutput& out) {
    if (!is_e_tok(out.scr)) return std::nullopt;
    if (out.arg.size() < 4) return std::nullopt;
    if (!is_int(out.arg[0]) || !is_bytes(out.arg[1]) || !is_int(out.arg[2]) ||
        !is_bytes(out.arg[3]))
        return std::nullopt;
    return TokenFields{as_int(out.arg[0]), as_bytes(out.arg[1]), as_int(out.arg[2]),
                       as_bytes(out.arg[3])};
}

std::optional<Bytes> btc_owner(const TxOutput& out) {
    if (!is_e_btc(out.scr)) return std::nullopt;
    if (out.arg.empty() || !is_bytes(out.arg[0])) return std::nullopt;
    return as_bytes(out.arg[0]);
}

std::optional<Bytes> owner_of(const TxOutput& out) {
    std::size_t pos = is_e_tok(out.scr) ? 1 : 0;
    if (out.arg.size() <= pos || !is_bytes(out.arg[pos])) return std::nullopt;
    return as_bytes(out.arg[pos]);
}

TxOutput make_btc_output(const Bytes& owner_pk, const BigInt& val) {
    return TxOutput{{Atom(owner_pk)}, e_btc(), val};
}

TxOutput make_token_output(int opcode, const Bytes& owner_pk, const BigInt& tkval,
                           const Bytes& tkid) {
    return TxOutput{{Atom(BigInt(opcode)), Atom(owner_pk), Atom(tkval), Atom(tkid)}, e_tok(), 0};
}

Transaction make_coinbase(const std::vector<std::pair<Bytes, BigInt>>& allocations) {
    Transaction tx;
    for (const auto& [pk, val] : allocations) tx.outputs.push_back(make_btc_output(pk, val));
    return tx;
}

const char* to_string(BuildError::Code code) {
    switch (code) {
        case BuildError::Code::NonZeroValue: return "NonZeroValue";
        case BuildError::Code::NotBtcDeposit: return "NotBtcDeposit";
        case BuildError::Code::NonPositiveMint: return "NonPositiveMint";
        case BuildError::Code::InsufficientUnits: return "InsufficientUnits";
        case BuildError::Code::UnknownDeposit: return "UnknownDeposit";
        case BuildError::Code::TokenMismatch: return "TokenMismatch";
        case BuildError::Code::MixedAsset: return "MixedAsset";
        case BuildError::Code::FirstInputNotToken: return "FirstInputNotToken";
        case BuildError::Code::MixedBurn: return "MixedBurn";
    }
    return "?";
}

namespace {

using Code = BuildError::Code;

const TxOutput& resolve_deposit(const Chain& chain, const Outpoint& o) {
    try {
        return chain.resolve(o);
    } catch (const ValidationError&) {
        throw BuildError(Code::UnknownDeposit, "no such deposit " + o.to_string());
    }
}

void sign_inputs(Transaction& tx, const std::vector<KeyPair>& keys) {
    tx.witnesses.assign(tx.inputs.size(), {});
    for (std::size_t i = 0; i < tx.inputs.size(); ++i)
        tx.witnesses[i] = {Atom(sign_tx(keys.at(i), tx))};
}

TokenFields require_token(const Chain& chain, const Outpoint& o) {
    auto fields = token_fields(resolve_deposit(chain, o));
    if (!fields)
        throw BuildError(Code::UnknownDeposit, o.to_string() + " is not a token deposit");
    return *fields;
}

}  // namespace

Transaction build_gen(const Chain& chain, const Outpoint& x, const BigInt& v,
                      const KeyPair& owner_key) {
    const TxOutput& deposit = resolve_deposit(chain, x);
    if (!is_e_btc(deposit.scr))
        throw BuildError(Code::NotBtcDeposit, x.to_string() + " does not hold a plain deposit");
    if (deposit.val != 0)
        throw BuildError(Code::NonZeroValue, "minting deposit must hold 0, found " +
                         deposit.val.str());
    if (v <= 0) throw BuildError(Code::NonPositiveMint, "minted amount must be positive");

    Transaction tx;
    tx.inputs = {x};
    Bytes tkid = outpoint_digest(chain, x).to_bytes();
    tx.outputs = {make_token_output(op::gen, owner_key.public_key, v, tkid)};
    sign_inputs(tx, {owner_key});
    return tx;
}

Transaction build_split(const Chain& chain, const Outpoint& x, const BigInt& v1,
                        const Bytes& recipient_pk, const KeyPair& owner_key) {
    const TxOutput& deposit = resolve_deposit(chain, x);
    Transaction tx;
    tx.inputs = {x};
    if (auto fields = token_fields(deposit)) {
        if (v1 < 0 || v1 > fields->tkval)
            throw BuildError(Code::InsufficientUnits, "cannot split " + v1.str() + " out of " +
                             fields->tkval.str());
        tx.outputs = {
            make_token_output(op::split, fields->owner, v1, fields->tkid),
            make_token_output(op::split, recipient_pk, fields->tkval - v1, fields->tkid),
        };
    } else if (auto owner = btc_owner(deposit)) {
        if (v1 < 0 || v1 > deposit.val)
            throw BuildError(Code::InsufficientUnits, "cannot split " + v1.str() + " out of " +
                             deposit.val.str());
        tx.outputs = {
            make_btc_output(*owner, v1),
            make_btc_output(recipient_pk, deposit.val - v1),
        };
    } else {
        throw BuildError(Code::UnknownDeposit, x.to_string() + " is not a deposit");
    }
    sign_inputs(tx, {owner_key});
    return tx;
}

Transaction build_join(const Chain& chain, const Outpoint& x, const Outpoint& y,
                       const Bytes& new_owner_pk, const KeyPair& x_key, const KeyPair& y_key) {
    const TxOutput& dx = resolve_deposit(chain, x);
    const TxOutput& dy = resolve_deposit(chain, y);
    auto fx = token_fields(dx);
    auto fy = token_fields(dy);
    Transaction tx;
    tx.inputs = {x, y};
    if (fx && fy) {
        if (fx->tkid.size() != 32 || fy->tkid.size() != 32)
            throw BuildError(Code::TokenMismatch, "malformed token identifier");
        // The output claims x's identifier; a join of distinct tokens is
        // buildable but fails validation on the second input.
        tx.outputs = {make_token_output(op::join, new_owner_pk, fx->tkval + fy->tkval, fx->tkid)};
    } else if (!fx && !fy) {
        auto ox = btc_owner(dx);
        auto oy = btc_owner(dy);
        if (!ox || !oy)
            throw BuildError(Code::UnknownDeposit, "join inputs are not deposits");
        tx.outputs = {make_btc_output(new_owner_pk, dx.val + dy.val)};
    } else {
        throw BuildError(Code::MixedAsset, "cannot join a token deposit with a plain deposit");
    }
    sign_inputs(tx, {x_key, y_key});
    return tx;
}

Transaction build_xchg(const Chain& chain, const Outpoint& x_token, const Outpoint& y_other,
                       const KeyPair& x_key, const KeyPair& y_key) {
    const TxOutput& dx = resolve_deposit(chain, x_token);
    auto fx = token_fields(dx);
    if (!fx)
        throw BuildError(Code::FirstInputNotToken,
                         "xchg requires a token deposit as its first input");
    const TxOutput& dy = resolve_deposit(chain, y_other);

    Transaction tx;
    tx.inputs = {x_token, y_other};
    if (auto fy = token_fields(dy)) {
        tx.outputs = {
            make_token_output(op::xchg, fy->owner, fx->tkval, fx->tkid),
            make_token_output(op::xchg, fx->owner, fy->tkval, fy->tkid),
        };
    } else if (auto oy = btc_owner(dy)) {
        tx.outputs = {
            make_token_output(op::xchg, *oy, fx->tkval, fx->tkid),
            make_btc_output(fx->owner, dy.val),
        };
    } else {
        throw BuildError(Code::UnknownDeposit, y_other.to_string() + " is not a deposit");
    }
    sign_inputs(tx, {x_key, y_key});
    return tx;
}

Transaction build_give(const Chain& chain, const Outpoint& x, const Bytes& recipient_pk,
                       const KeyPair& owner_key) {
    const TxOutput& deposit = resolve_deposit(chain, x);
    Transaction tx;
    tx.inputs = {x};
    if (auto fields = token_fields(deposit)) {
        tx.outputs = {make_token_output(op::give, recipient_pk, fields->tkval, fields->tkid)};
    } else if (btc_owner(deposit)) {
        tx.outputs = {make_btc_output(recipient_pk, deposit.val)};
    } else {
        throw BuildError(Code::UnknownDeposit, x.to_string() + " is not a deposit");
    }
    sign_inputs(tx, {owner_key});
    return tx;
}

Transaction build_burn(const Chain& chain, const std::vector<Outpoint>& xs,
                       const std::vector<KeyPair>& keys) {
    if (xs.empty()) throw BuildError(Code::UnknownDeposit, "burn needs at least one deposit");
    if (keys.size() != xs.size())
        throw BuildError(Code::UnknownDeposit, "burn needs one signing key per deposit");

    std::size_t tokens = 0;
    BigInt btc_sum = 0;
    for (const Outpoint& x : xs) {
        const TxOutput& d = resolve_deposit(chain, x);
        if (token_fields(d)) ++tokens;
        else if (btc_owner(d)) btc_sum += d.val;
        else throw BuildError(Code::UnknownDeposit, x.to_string() + " is not a deposit");
    }
    if (tokens > 0 && xs.size() > 1)
        throw BuildError(Code::MixedBurn, "a token deposit must be burnt alone");

    Transaction tx;
    tx.inputs = xs;
    // Token burns carry no value; plain-deposit burns lock the whole sum in
    // the unspendable output.
    tx.outputs = {TxOutput{{Atom(BigInt(op::burn))}, false_script(), tokens ? BigInt(0) : btc_sum}};
    sign_inputs(tx, keys);
    return tx;
}

}  // namespace covtok
