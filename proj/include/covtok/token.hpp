// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVTOK_TOKEN_HPP
#define COVTOK_TOKEN_HPP

#include "covtok/ledger.hpp"

namespace covtok {

// Token action codes stored at arg position 1 of token outputs.
namespace op {
inline constexpr int gen = 0;
inline constexpr int burn = 1;
inline constexpr int split = 2;
inline constexpr int join = 3;
inline constexpr int xchg = 4;
inline constexpr int give = 5;
}  // namespace op

// The three standard scripts. Each call returns the same shared AST, so
// verrec/verscr comparisons against builder-made outputs hit the pointer
// fast path; structural equality still holds for independently built copies.
Script e_btc();        // versig(ctxo.arg.1, rtx.wit)
Script e_tok();        // the full token script
Script false_script(); // the constant 0

// Replaces a script by the shared singleton when structurally equal to one
// of the standard scripts (used when loading chains from files).
Script intern_script(const Script& s);

bool is_e_btc(const Script& s);
bool is_e_tok(const Script& s);
bool is_false_script(const Script& s);

// Field views over outputs. Token outputs store (op, owner, tkval, tkid) at
// arg positions 1..4; plain deposits store the owner key at position 1.
struct TokenFields {
    BigInt op;
    Bytes owner;
    BigInt tkval;
    Bytes tkid;
};

std::optional<TokenFields> token_fields(const TxOutput& out);
std::optional<Bytes> btc_owner(const TxOutput& out);
// arg.2 for token-script outputs, arg.1 otherwise; nullopt when missing or
// not a byte string.
std::optional<Bytes> owner_of(const TxOutput& out);

TxOutput make_btc_output(const Bytes& owner_pk, const BigInt& val);
TxOutput make_token_output(int op, const Bytes& owner_pk, const BigInt& tkval, const Bytes& tkid);

// A coinbase whose outputs are plain deposits for the given (owner, value)
// allocations.
Transaction make_coinbase(const std::vector<std::pair<Bytes, BigInt>>& allocations);

struct BuildError : std::runtime_error {
    enum class Code {
        NonZeroValue,
        NotBtcDeposit,
        NonPositiveMint,
        InsufficientUnits,
        UnknownDeposit,
        TokenMismatch,
        MixedAsset,
        FirstInputNotToken,
        MixedBurn,
    };

    BuildError(Code code, const std::string& detail) : std::runtime_error(detail), code(code) {}
    Code code;
};

const char* to_string(BuildError::Code code);

// Transaction builders for the six token actions. Builders sign with the
// provided keys (one signature per input, at the matching witness position)
// but do not append; the returned transaction is ready for
// validate_and_append.

// Mints v units of a fresh token by spending a 0-valued plain deposit.
Transaction build_gen(const Chain& chain, const Outpoint& x, const BigInt& v,
                      const KeyPair& owner_key);

// Splits deposit x into (v1, rest). Token case keeps the owner on output 1;
// plain-deposit case produces two e_BTC outputs.
Transaction build_split(const Chain& chain, const Outpoint& x, const BigInt& v1,
                        const Bytes& recipient_pk, const KeyPair& owner_key);

// Joins two deposits of the same asset into one owned by new_owner_pk.
// Distinct-token joins are built as requested and rejected at validation.
Transaction build_join(const Chain& chain, const Outpoint& x, const Outpoint& y,
                       const Bytes& new_owner_pk, const KeyPair& x_key, const KeyPair& y_key);

// Swaps the owners of a token deposit x and a second deposit y (token or
// plain bitcoin).
Transaction build_xchg(const Chain& chain, const Outpoint& x_token, const Outpoint& y_other,
                       const KeyPair& x_key, const KeyPair& y_key);

// Transfers deposit x to recipient_pk, preserving its content.
Transaction build_give(const Chain& chain, const Outpoint& x, const Bytes& recipient_pk,
                       const KeyPair& owner_key);

// Destroys a single token deposit, or any number of plain deposits, by
// moving them to an unspendable output. keys[i] signs input i.
Transaction build_burn(const Chain& chain, const std::vector<Outpoint>& xs,
                       const std::vector<KeyPair>& keys);

// Balance of the computational token identified by the output `tok` (the
// deposit consumed by its minting transaction): the tkval sum over spendable
// token-script utxos whose tkid equals the digest of `tok`.
BigInt tokval_c(const Chain& chain, const Outpoint& tok);

}  // namespace covtok

#endif
