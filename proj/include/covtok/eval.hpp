// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVTOK_EVAL_HPP
#define COVTOK_EVAL_HPP

#include "covtok/ledger.hpp"

namespace covtok {

// Script evaluation results: an integer, a byte string, a sequence of
// integers/byte strings, or the undefined value (Bottom). Every operator is
// strict in Bottom; the conditional is the only non-strict position (the
// branch not selected is never evaluated).
struct Value {
    struct Bottom {};
    std::variant<Bottom, BigInt, Bytes, std::vector<Atom>> v;

    bool is_bottom() const { return v.index() == 0; }
    bool is_int() const { return v.index() == 1; }
    bool is_bytes() const { return v.index() == 2; }
    bool is_seq() const { return v.index() == 3; }
    const BigInt& as_int() const { return std::get<BigInt>(v); }
    const Bytes& as_bytes() const { return std::get<Bytes>(v); }
    const std::vector<Atom>& as_seq() const { return std::get<std::vector<Atom>>(v); }

    static Value bottom() { return Value{Bottom{}}; }
    static Value integer(BigInt i) { return Value{std::move(i)}; }
    static Value bytes(Bytes b) { return Value{std::move(b)}; }
    static Value seq(std::vector<Atom> s) { return Value{std::move(s)}; }
    static Value boolean(bool b) { return integer(b ? 1 : 0); }
    static Value from_atom(const Atom& a);

    std::string to_string() const;
};

bool value_eq(const Value& a, const Value& b);  // structural; Bottom == Bottom

// The validity layer treats a script as satisfied iff its value is defined
// and is not the integer 0. The conditional's truth test is the same.
bool script_satisfied(const Value& v);

struct EvalCtx {
    const Chain& chain;        // resolves stxo/ptxo selectors
    const Transaction& rtx;    // the redeeming transaction
    std::size_t input_index;   // 1-based index of the redeeming input
};

// Implements the full script semantics. All failure modes (out-of-range
// access, type mismatch, coinbase-parent access, Bottom operands) yield
// Bottom; eval itself never throws.
Value eval(const Script& s, const EvalCtx& ctx);

}  // namespace covtok

#endif
