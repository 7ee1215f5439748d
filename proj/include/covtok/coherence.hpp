// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVTOK_COHERENCE_HPP
#define COVTOK_COHERENCE_HPP

#include "covtok/spend.hpp"
#include "covtok/symbolic.hpp"

#include <set>

namespace covtok {

struct UserKey {
    User name;
    Bytes public_key;
};

// Computational run labels: broadcasting a bitstring, or appending a
// transaction to the blockchain.
struct Broadcast {
    User from;  // claimed sender (informational; the payload's signature decides)
    Bytes data;
};
struct AppendTx {
    Transaction tx;
};
using CompLabel = std::variant<Broadcast, AppendTx>;

struct ComputationalRun {
    std::vector<UserKey> users;
    std::vector<CompLabel> labels;  // labels[0] is the coinbase append
};

// Folds the appends into a chain, validating each in order.
Chain derive_chain(const ComputationalRun& rc);

const UserKey* user_by_name(const std::vector<UserKey>& users, const User& name);
const UserKey* user_by_key(const std::vector<UserKey>& users, const Bytes& pk);

// Broadcast payload carrying a user's signature on a transaction template
// (witness-cleared). Anything that fails to decode or verify is treated as
// an arbitrary adversary bitstring.
struct AuthMessage {
    Bytes signer_pk;
    Bytes signature;
    Transaction tx;
};

Bytes encode_auth_message(const AuthMessage& m);
std::optional<AuthMessage> decode_auth_message(const Bytes& data);
AuthMessage make_auth_message(const KeyPair& signer, const Transaction& tx);

// The coherence maps: txout tracks deposit names, tkid tracks minted tokens,
// txburn tracks burn destinations announced by authorizations. txout_history
// keeps every binding ever added; the parent-closure invariant is stated
// against it, since inputs of mapped transactions are spent outputs.
struct CoherenceMaps {
    std::map<Name, Outpoint> txout;
    std::map<std::string, Outpoint> tkid;
    std::map<Name, Transaction> txburn;  // witness-cleared templates
    std::map<Name, Outpoint> txout_history;
    // Unmapped inputs of exchange-shaped transactions matched as gives
    // (items 5b/5c); those items bind an output whose transaction has, by
    // construction, one input outside ran(txout).
    std::set<Outpoint> counterparty_inputs;

    void bind_txout(const Name& x, const Outpoint& o);
    std::optional<Name> name_of(const Outpoint& o) const;
};

// Base-case maps for an initial run pair: the coinbase outputs, in order,
// are the images of the initial deposits (given in the same order).
CoherenceMaps base_maps(const Configuration& initial, const Transaction& coinbase);

struct StepReport {
    std::size_t comp_index;
    std::string matched;                   // e.g. "case1:item3(join)" or "case2:transaction"
    std::optional<std::size_t> sym_index;  // symbolic step consumed, if any
    std::vector<std::pair<std::string, Outpoint>> minted;  // tkid bindings added
};

struct CoherenceReport {
    bool verdict = false;
    std::vector<StepReport> steps;
    std::string failure;
    std::optional<std::size_t> failed_at;  // computational label index
    CoherenceMaps final_maps;

    std::string summary() const;
};

// Verifies that the symbolic and computational runs are coherent for the
// given base maps, replaying the inductive definition step by step. The
// report records the matched case per computational label.
CoherenceReport check_coherence(const SymbolicRun& rs, const ComputationalRun& rc,
                                const CoherenceMaps& m0);

struct ReconstructionError : std::runtime_error {
    ReconstructionError(std::size_t comp_index, const std::string& what)
        : std::runtime_error("label " + std::to_string(comp_index) + ": " + what),
          comp_index(comp_index) {}
    std::size_t comp_index;
};

struct Reconstruction {
    SymbolicRun run;
    CoherenceMaps maps;  // final maps
    CoherenceReport report;
};

// Lifts a computational run to a coherent symbolic run, following the
// soundness proof's case analysis; the result is re-checked with
// check_coherence before returning. The honest set is accepted for API
// completeness; the decision tree never branches on honesty.
Reconstruction reconstruct(const ComputationalRun& rc, const std::set<User>& honest = {});

struct LemmaReport {
    bool ok = false;
    std::string detail;  // first counterexample when !ok
};

// Every deposit of the final configuration has a distinct unspent image
// with matching fields, spendable by its owner.
LemmaReport lemma_s_to_c_check(const SymbolicRun& rs, const ComputationalRun& rc,
                               const CoherenceMaps& maps);

// Every unspent token output is either unspendable (dangling or forged
// identifier, or unmapped output of a minted token) or mapped to a deposit
// with the matching owner.
LemmaReport lemma_c_to_s_check(const SymbolicRun& rs, const ComputationalRun& rc,
                               const CoherenceMaps& maps);

// For every minted token, the symbolic balance equals the computational one,
// exactly.
LemmaReport theorem_balance_check(const SymbolicRun& rs, const ComputationalRun& rc,
                                  const CoherenceMaps& maps);

}  // namespace covtok

#endif
