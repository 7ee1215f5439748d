// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"

using namespace covtok;
using namespace covtok::testsupport;

namespace {

// A one-input context over a minimal two-transaction chain; enough for
// expressions that do not touch siblings or parents.
struct SimpleCtx {
    Chain chain;
    Transaction rtx;

    SimpleCtx() {
        Transaction coinbase;
        coinbase.outputs = {TxOutput{{Atom(BigInt(7))}, sc_true(), 5}};
        chain = Chain::genesis(coinbase);
        rtx.inputs = {Outpoint{txid_of(coinbase), 1}};
        rtx.witnesses = {{}};
        rtx.outputs = {TxOutput{{Atom(BigInt(1))}, sc_true(), 0}};
    }

    EvalCtx ctx() { return EvalCtx{chain, rtx, 1}; }
};

Value ev(const Script& s) {
    static SimpleCtx sc;
    return eval(s, sc.ctx());
}

}  // namespace

TEST_CASE("constant arithmetic") {
    CHECK(ev(sc_add(sc_int(5), sc_int(3))).as_int() == 8);
    CHECK(ev(sc_sub(sc_int(5), sc_int(8))).as_int() == -3);
    CHECK(ev(sc_lt(sc_int(2), sc_int(3))).as_int() == 1);
    CHECK(ev(sc_eq(sc_int(2), sc_int(2))).as_int() == 1);
}

TEST_CASE("indexing a non-sequence is undefined") {
    CHECK(ev(sc_at(sc_int(7), 1)).is_bottom());
}

TEST_CASE("strictness and the non-strict conditional") {
    Script bot = sc_at(sc_int(7), 1);  // bottom
    CHECK(ev(sc_add(bot, sc_int(1))).is_bottom());
    CHECK(ev(sc_hash(bot)).is_bottom());
    CHECK(ev(sc_size(bot)).is_bottom());
    CHECK(ev(sc_eq(bot, sc_int(0))).is_bottom());
    CHECK(ev(sc_if(bot, sc_int(1), sc_int(2))).is_bottom());
    // Only the selected branch is evaluated.
    CHECK(ev(sc_if(sc_int(1), sc_int(42), bot)).as_int() == 42);
    CHECK(ev(sc_if(sc_int(0), bot, sc_int(24))).as_int() == 24);
}

TEST_CASE("comparison across kinds is 0, order is integer-only") {
    CHECK(ev(sc_eq(sc_int(1), sc_bytes({0x01}))).as_int() == 0);
    CHECK(ev(sc_lt(sc_bytes({0x01}), sc_int(2))).is_bottom());
    CHECK(ev(sc_eq(sc_field(ctxo(), TxField::Arg), sc_int(3))).as_int() == 0);
}

TEST_CASE("size of integers and byte strings") {
    CHECK(ev(sc_size(sc_int(0))).as_int() == 1);
    CHECK(ev(sc_size(sc_int(255))).as_int() == 1);
    CHECK(ev(sc_size(sc_int(256))).as_int() == 2);
    CHECK(ev(sc_size(sc_int(-300))).as_int() == 2);
    CHECK(ev(sc_size(sc_bytes({1, 2, 3}))).as_int() == 3);
    // Sequence sizes are left undefined.
    CHECK(ev(sc_size(sc_field(ctxo(), TxField::Arg))).is_bottom());
}

TEST_CASE("signature verification inside scripts") {
    KeyPair kp = KeyPair::from_name("alice");
    Transaction coinbase;
    coinbase.outputs = {make_btc_output(kp.public_key, 3)};
    Chain chain = Chain::genesis(coinbase);

    Transaction rtx;
    rtx.inputs = {Outpoint{txid_of(coinbase), 1}};
    rtx.outputs = {make_btc_output(kp.public_key, 3)};
    rtx.witnesses = {{Atom(sign_tx(kp, rtx))}};

    EvalCtx ctx{chain, rtx, 1};
    CHECK(eval(e_btc(), ctx).as_int() == 1);
    CHECK(eval(sc_versig(sc_bytes(kp.public_key), sc_rtx_wit()), ctx).as_int() == 1);
    KeyPair other = KeyPair::from_name("bob");
    CHECK(eval(sc_versig(sc_bytes(other.public_key), sc_rtx_wit()), ctx).as_int() == 0);
}

// The four-transaction neighbourhood: the script of the spent output reads
// its own arg, its parent's, the redeeming transaction's third output and
// the sibling redeemed by the second input.
TEST_CASE("neighbourhood selectors see current, parent, redeeming and sibling outputs") {
    BigInt nc = 11, np = 22, nr = 33, ns = 44;

    Script script = sc_all({
        sc_eq(sc_arg_at(ctxo(), 1), sc_int(nc)),
        sc_eq(sc_arg_at(ptxo(1), 1), sc_int(np)),
        sc_eq(sc_arg_at(rtxo(3), 1), sc_int(nr)),
        sc_eq(sc_arg_at(stxo(2), 1), sc_int(ns)),
    });

    Transaction coinbase;  // provides T_p and the funding for T_s
    coinbase.outputs = {TxOutput{{Atom(np)}, sc_true(), 0},
                        TxOutput{{Atom(ns)}, sc_true(), 0}};
    Chain chain = Chain::genesis(coinbase);
    Digest cb = txid_of(coinbase);

    Transaction tc;  // the transaction under test, child of T_p
    tc.inputs = {Outpoint{cb, 1}};
    tc.witnesses = {{}};
    tc.outputs = {TxOutput{{Atom(nc)}, script, 0}};
    chain = validate_and_append(chain, tc);

    Transaction tr;  // redeems (T_c,1) and the sibling (coinbase,2)
    tr.inputs = {Outpoint{txid_of(tc), 1}, Outpoint{cb, 2}};
    tr.witnesses = {{}, {}};
    tr.outputs = {TxOutput{{}, sc_true(), 0}, TxOutput{{}, sc_true(), 0},
                  TxOutput{{Atom(nr)}, sc_true(), 0}};

    CHECK(eval(script, EvalCtx{chain, tr, 1}).as_int() == 1);

    Transaction wrong = tr;
    wrong.outputs[2].arg = {Atom(BigInt(34))};
    CHECK(eval(script, EvalCtx{chain, wrong, 1}).as_int() == 0);
    CHECK(validate_and_append(chain, tr).size() == 3);
}

TEST_CASE("parent access from a coinbase output is undefined") {
    Transaction coinbase;
    coinbase.outputs = {TxOutput{{Atom(BigInt(1))}, sc_true(), 0}};
    Chain chain = Chain::genesis(coinbase);
    Transaction rtx;
    rtx.inputs = {Outpoint{txid_of(coinbase), 1}};
    rtx.witnesses = {{}};
    rtx.outputs = {TxOutput{{}, sc_true(), 0}};
    CHECK(eval(sc_val(ptxo(1)), EvalCtx{chain, rtx, 1}).is_bottom());
    // inlen/outlen stay defined for out-of-range redeeming outputs.
    CHECK(eval(sc_outlen(rtxo(9)), EvalCtx{chain, rtx, 1}).as_int() == 1);
    CHECK(eval(sc_val(rtxo(9)), EvalCtx{chain, rtx, 1}).is_bottom());
}

TEST_CASE("syntactic script equality") {
    Script a = sc_add(sc_int(1), sc_int(2));
    CHECK(script_eq(a, a));
    CHECK(script_eq(a, sc_add(sc_int(1), sc_int(2))));
    CHECK_FALSE(script_eq(a, sc_add(sc_int(2), sc_int(1))));
    // Two independently constructed token scripts compare equal.
    CHECK(script_eq(e_tok(), parse_script(print_script(e_tok()))));
}

TEST_CASE("sugar expands to its conditional form") {
    Script a = sc_eq(sc_int(1), sc_int(1));
    Script b = sc_eq(sc_int(2), sc_int(2));
    CHECK(script_eq(sc_and(a, b), sc_if(a, b, sc_int(0))));
    CHECK(script_eq(sc_or(a, b), sc_if(a, sc_int(1), b)));
    CHECK(script_eq(sc_not(a), sc_if(a, sc_int(0), sc_int(1))));
    CHECK(ev(sc_and(a, b)).as_int() == ev(sc_if(a, b, sc_int(0))).as_int());
}

TEST_CASE("print/parse round trip") {
    CHECK(script_eq(parse_script("if not verrec(ptxo(1)) then ctxo.tkid = txid(ptxo(1)) and "
                                 "ptxo(1).val = 0 and outlen(ctxo) = 1 and 0 < ctxo.tkval "
                                 "else true"),
                    parse_script("if not verrec(ptxo(1)) then ctxo.arg.4 = txid(ptxo(1)) and "
                                 "ptxo(1).val = 0 and outlen(ctxo) = 1 and 0 < ctxo.arg.3 "
                                 "else 1")));

    std::mt19937_64 rng(42);
    for (int i = 0; i < 500; ++i) {
        Script s = random_script(rng, 4);
        Script back = parse_script(print_script(s));
        CHECK(script_eq(s, back));
    }
}

TEST_CASE("binary serialization round trip") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 300; ++i) {
        Script s = random_script(rng, 4);
        Encoder enc;
        serialize_script(enc, s);
        Bytes bytes = enc.take();
        Decoder dec(bytes);
        Script back = decode_script(dec);
        dec.expect_done();
        CHECK(script_eq(s, back));
        Encoder enc2;
        serialize_script(enc2, back);
        CHECK(enc2.bytes() == bytes);
    }
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse_script("(1 + 2"), ParseError);
    CHECK_THROWS_AS(parse_script("1 + "), ParseError);
    CHECK_THROWS_AS(parse_script("frobnicate(1)"), ParseError);
    CHECK_THROWS_AS(parse_script("rtxo(1)"), ParseError);  // bare selector
    CHECK_THROWS_AS(parse_script("1 2"), ParseError);
}

TEST_CASE("gen-branch text reproduces the constructed AST") {
    Script parsed = parse_script(
        "if not verrec(ptxo(1)) then ctxo.tkid = txid(ptxo(1)) and ptxo(1).val = 0 "
        "and outlen(ctxo) = 1 and 0 < ctxo.tkval else true");
    Script built = sc_if(sc_not(sc_verrec(ptxo(1))),
                         sc_all({
                             sc_eq(sc_arg_at(ctxo(), 4), sc_txid(ptxo(1))),
                             sc_eq(sc_val(ptxo(1)), sc_int(0)),
                             sc_eq(sc_outlen(ctxo()), sc_int(1)),
                             sc_lt(sc_int(0), sc_arg_at(ctxo(), 3)),
                         }),
                         sc_true());
    CHECK(script_eq(parsed, built));
}

TEST_CASE("production evaluator agrees with the reference evaluator") {
    std::mt19937_64 rng(2026);
    std::size_t bottoms = 0;
    for (int i = 0; i < 800; ++i) {
        RandomCtx rc = random_context(rng);
        EvalCtx ctx{rc.chain, rc.rtx, rc.input_index};
        for (int k = 0; k < 4; ++k) {
            Script s = random_script(rng, 4);
            Value a = eval(s, ctx);
            Value b = ref_eval(s, ctx);
            if (a.is_bottom()) ++bottoms;
            CHECK(value_eq(a, b));
        }
    }
    CHECK(bottoms > 0);  // the corpus must include undefined cases
}
