// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "covtok/ledger.hpp"

#include "covtok/eval.hpp"

#include <algorithm>
#include <set>

namespace covtok {

namespace {

void encode_tx(Encoder& enc, const Transaction& tx, bool include_witnesses) {
    enc.u8('T');
    enc.u64(tx.inputs.size());
    for (const Outpoint& in : tx.inputs) {
        enc.raw(in.txid.to_bytes());
        enc.u64(in.index);
    }
    if (include_witnesses) {
        enc.u64(tx.witnesses.size());
        for (const auto& wit : tx.witnesses) enc.atoms(wit);
    } else {
        // The signing preimage is independent of the witness vector: one
        // cleared slot per input, whether or not witnesses are filled yet.
        enc.u64(tx.inputs.size());
        for (std::size_t i = 0; i < tx.inputs.size(); ++i) enc.atoms({});
    }
    enc.u64(tx.outputs.size());
    for (const TxOutput& out : tx.outputs) {
        enc.atoms(out.arg);
        serialize_script(enc, out.scr);
        enc.bigint(out.val);
    }
}

}  // namespace

Bytes canonical_serialize(const Transaction& tx, bool include_witnesses) {
    Encoder enc;
    encode_tx(enc, tx, include_witnesses);
    return enc.take();
}

Transaction decode_transaction(const Bytes& data) {
    Decoder dec(data);
    if (dec.u8() != 'T') throw DecodeError("bad transaction tag");
    Transaction tx;
    std::uint64_t nin = dec.u64();
    for (std::uint64_t i = 0; i < nin; ++i) {
        Outpoint o;
        Bytes digest;
        for (int b = 0; b < 32; ++b) digest.push_back(dec.u8());
        std::copy(digest.begin(), digest.end(), o.txid.bytes.begin());
        o.index = dec.u64();
        tx.inputs.push_back(o);
    }
    std::uint64_t nwit = dec.u64();
    for (std::uint64_t i = 0; i < nwit; ++i) tx.witnesses.push_back(dec.atoms());
    std::uint64_t nout = dec.u64();
    for (std::uint64_t i = 0; i < nout; ++i) {
        TxOutput out;
        out.arg = dec.atoms();
        out.scr = decode_script(dec);
        out.val = dec.bigint();
        tx.outputs.push_back(std::move(out));
    }
    dec.expect_done();
    return tx;
}

Digest txid_of(const Transaction& tx) { return sha256(canonical_serialize(tx, true)); }

Digest output_digest(const Transaction& tx, std::uint64_t index) {
    Encoder enc;
    enc.raw(canonical_serialize(tx, true));
    enc.u64(index);
    return sha256(enc.bytes());
}

Bytes sign_tx(const KeyPair& key, const Transaction& tx) {
    return sign_bytes(key.secret_key, canonical_serialize(tx, false));
}

bool verify_tx(const Bytes& public_key, const Bytes& signature, const Transaction& tx) {
    return verify_bytes(public_key, signature, canonical_serialize(tx, false));
}

const char* to_string(ValidationError::Code code) {
    switch (code) {
        case ValidationError::Code::UnknownInput: return "UnknownInput";
        case ValidationError::Code::UnknownOutpoint: return "UnknownOutpoint";
        case ValidationError::Code::DoubleSpend: return "DoubleSpend";
        case ValidationError::Code::ScriptFailed: return "ScriptFailed";
        case ValidationError::Code::ValueCreated: return "ValueCreated";
        case ValidationError::Code::MalformedTx: return "MalformedTx";
    }
    return "?";
}

namespace {

void check_well_formed(const Transaction& tx) {
    using Code = ValidationError::Code;
    if (tx.outputs.empty()) throw ValidationError(Code::MalformedTx, "transaction has no outputs");
    if (tx.witnesses.size() != tx.inputs.size())
        throw ValidationError(Code::MalformedTx, "witness count differs from input count");
    for (const TxOutput& out : tx.outputs) {
        if (out.val < 0) throw ValidationError(Code::MalformedTx, "negative output value");
        if (!out.scr) throw ValidationError(Code::MalformedTx, "output without script");
    }
    for (const Outpoint& in : tx.inputs)
        if (in.index < 1) throw ValidationError(Code::MalformedTx, "input index must be >= 1");
}

}  // namespace

Chain Chain::genesis(Transaction coinbase) {
    using Code = ValidationError::Code;
    check_well_formed(coinbase);
    if (!coinbase.is_coinbase())
        throw ValidationError(Code::MalformedTx, "genesis transaction must have no inputs");
    Chain chain;
    Digest id = txid_of(coinbase);
    chain.txs_.push_back(std::make_shared<const Transaction>(std::move(coinbase)));
    chain.index_.emplace(id, 0);
    return chain;
}

const Transaction* Chain::find(const Digest& txid) const {
    auto it = index_.find(txid);
    if (it == index_.end()) return nullptr;
    return txs_[it->second].get();
}

std::optional<std::size_t> Chain::position_of(const Digest& txid) const {
    auto it = index_.find(txid);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const TxOutput& Chain::resolve(const Outpoint& o) const {
    const Transaction* tx = find(o.txid);
    if (!tx)
        throw ValidationError(ValidationError::Code::UnknownOutpoint,
                              "unknown transaction " + o.txid.hex().substr(0, 16));
    if (o.index < 1 || o.index > tx->outputs.size())
        throw ValidationError(ValidationError::Code::UnknownOutpoint,
                              "output index " + std::to_string(o.index) + " out of range");
    return tx->outputs[o.index - 1];
}

const Transaction& Chain::tx_of(const Outpoint& o) const {
    resolve(o);  // range check
    return *find(o.txid);
}

bool Chain::contains_output(const Outpoint& o) const {
    const Transaction* tx = find(o.txid);
    return tx && o.index >= 1 && o.index <= tx->outputs.size();
}

std::optional<std::pair<Digest, std::size_t>> Chain::spender_of(const Outpoint& o) const {
    auto it = spent_.find(o);
    if (it == spent_.end()) return std::nullopt;
    return std::make_pair(txid_of(*txs_[it->second.first]), it->second.second);
}

std::vector<Outpoint> Chain::parents_of(const Outpoint& o) const {
    return tx_of(o).inputs;
}

std::vector<Outpoint> Chain::utxo() const {
    std::vector<Outpoint> out;
    for (const auto& tx : txs_) {
        Digest id = txid_of(*tx);
        for (std::uint64_t i = 1; i <= tx->outputs.size(); ++i) {
            Outpoint o{id, i};
            if (!is_spent(o)) out.push_back(o);
        }
    }
    return out;
}

Chain validate_and_append(const Chain& chain, const Transaction& tx) {
    using Code = ValidationError::Code;
    check_well_formed(tx);
    if (tx.is_coinbase())
        throw ValidationError(Code::MalformedTx, "only the genesis transaction may be a coinbase");

    std::set<Outpoint> seen;
    BigInt in_sum = 0;
    for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
        const Outpoint& o = tx.inputs[i];
        if (!chain.contains_output(o))
            throw ValidationError(Code::UnknownInput, "input " + std::to_string(i + 1) +
                                  " refers to unknown output " + o.to_string(), i + 1);
        if (chain.is_spent(o) || !seen.insert(o).second)
            throw ValidationError(Code::DoubleSpend,
                                  "input " + std::to_string(i + 1) + " double-spends " + o.to_string(),
                                  i + 1);
        in_sum += chain.resolve(o).val;
    }

    for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
        const TxOutput& redeemed = chain.resolve(tx.inputs[i]);
        Value v = eval(redeemed.scr, EvalCtx{chain, tx, i + 1});
        if (!script_satisfied(v))
            throw ValidationError(Code::ScriptFailed,
                                  "script of " + tx.inputs[i].to_string() + " evaluated to " +
                                      v.to_string(),
                                  i + 1);
    }

    BigInt out_sum = 0;
    for (const TxOutput& out : tx.outputs) out_sum += out.val;
    if (out_sum > in_sum)
        throw ValidationError(Code::ValueCreated, "outputs carry " + out_sum.str() +
                              " but inputs only provide " + in_sum.str());

    Chain next = chain;
    std::size_t position = next.txs_.size();
    Digest id = txid_of(tx);
    if (next.index_.count(id))
        throw ValidationError(Code::MalformedTx, "transaction already on chain");
    for (std::size_t i = 0; i < tx.inputs.size(); ++i)
        next.spent_.emplace(tx.inputs[i], std::make_pair(position, i + 1));
    next.txs_.push_back(std::make_shared<const Transaction>(tx));
    next.index_.emplace(id, position);
    return next;
}

Digest outpoint_digest(const Chain& chain, const Outpoint& o) {
    return output_digest(chain.tx_of(o), o.index);
}

}  // namespace covtok
