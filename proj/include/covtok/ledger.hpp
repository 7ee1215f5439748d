// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVTOK_LEDGER_HPP
#define COVTOK_LEDGER_HPP

#include "covtok/crypto.hpp"
#include "covtok/script.hpp"

#include <map>
#include <optional>

namespace covtok {

struct Outpoint {
    Digest txid;
    std::uint64_t index = 1;  // 1-based

    auto operator<=>(const Outpoint&) const = default;
    std::string to_string() const { return txid.hex().substr(0, 16) + ":" + std::to_string(index); }
};

struct TxOutput {
    std::vector<Atom> arg;
    Script scr;
    BigInt val;
};

struct Transaction {
    std::vector<Outpoint> inputs;              // empty iff coinbase
    std::vector<std::vector<Atom>> witnesses;  // same length as inputs
    std::vector<TxOutput> outputs;             // non-empty

    bool is_coinbase() const { return inputs.empty(); }
};

// Injective, deterministic byte encoding. With include_witnesses = false the
// witnesses are replaced by empty sequences (their count is still encoded),
// which is the signing preimage; the full form is the txid preimage.
Bytes canonical_serialize(const Transaction& tx, bool include_witnesses = true);
Transaction decode_transaction(const Bytes& data);  // throws DecodeError

Digest txid_of(const Transaction& tx);

// Preimage for the txid(txo) script operator: full serialization of the
// transaction holding the output, followed by the 1-based output index as an
// 8-byte big-endian integer.
Digest output_digest(const Transaction& tx, std::uint64_t index);

// Signatures cover the witness-cleared serialization, so they are identical
// across all witness assignments of the transaction.
Bytes sign_tx(const KeyPair& key, const Transaction& tx);
bool verify_tx(const Bytes& public_key, const Bytes& signature, const Transaction& tx);

struct ValidationError : std::runtime_error {
    enum class Code {
        UnknownInput,
        UnknownOutpoint,
        DoubleSpend,
        ScriptFailed,
        ValueCreated,
        MalformedTx,
    };

    ValidationError(Code code, const std::string& detail, std::size_t input_index = 0)
        : std::runtime_error(detail), code(code), input_index(input_index) {}

    Code code;
    std::size_t input_index;  // 1-based; 0 when not input-specific
};

const char* to_string(ValidationError::Code code);

// An append-only transaction log with a single coinbase at position 0.
// Chains are immutable values: validate_and_append returns a new chain.
// Transactions are held behind shared pointers, so copies are cheap.
class Chain {
public:
    static Chain genesis(Transaction coinbase);  // throws ValidationError

    std::size_t size() const { return txs_.size(); }
    const Transaction& tx_at(std::size_t position) const { return *txs_.at(position); }
    const Transaction* find(const Digest& txid) const;
    std::optional<std::size_t> position_of(const Digest& txid) const;

    // The output a given outpoint refers to; throws UnknownOutpoint.
    const TxOutput& resolve(const Outpoint& o) const;
    const Transaction& tx_of(const Outpoint& o) const;

    bool contains_output(const Outpoint& o) const;
    bool is_spent(const Outpoint& o) const { return spent_.count(o) != 0; }
    // Spending (txid, input-index) for a spent outpoint.
    std::optional<std::pair<Digest, std::size_t>> spender_of(const Outpoint& o) const;

    // The outputs redeemed by the inputs of o's transaction (empty for
    // coinbase outputs).
    std::vector<Outpoint> parents_of(const Outpoint& o) const;

    // All unspent outputs, ordered by (position, index).
    std::vector<Outpoint> utxo() const;

    friend Chain validate_and_append(const Chain& chain, const Transaction& tx);

private:
    std::vector<std::shared_ptr<const Transaction>> txs_;
    std::map<Digest, std::size_t> index_;
    std::map<Outpoint, std::pair<std::size_t, std::size_t>> spent_;  // -> (position, input idx)
};

// Appends tx iff every input resolves to an unspent prior output, every
// redeemed script evaluates to a defined non-zero value, and the input value
// sum covers the output value sum (the difference is fee).
Chain validate_and_append(const Chain& chain, const Transaction& tx);

Digest outpoint_digest(const Chain& chain, const Outpoint& o);

}  // namespace covtok

#endif
