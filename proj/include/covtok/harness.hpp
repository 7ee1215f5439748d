// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVTOK_HARNESS_HPP
#define COVTOK_HARNESS_HPP

#include "covtok/coherence.hpp"

#include <json.hpp>

namespace covtok {

// A scenario: an initial coinbase allocation plus an ordered move list.
// Honest moves name the deposits they touch; adversary directives exercise
// the paths honest builders never produce.
struct Move {
    std::string kind;  // gen|split|give|join|xchg|burn|
                       // forge-token|arbitrary-spend|wrong-signature|junk-broadcast|xchg-unmapped
    User actor;
    std::vector<Name> deposits;
    BigInt amount;
    User recipient;
    std::vector<Name> out_names;  // declared fresh deposit names (optional)
    std::string token_name;      // gen: declared token id (optional)
    Name burn_name;              // burn: declared destination name (optional)
};

struct CoinbaseEntry {
    Name name;
    User user;
    BigInt val;
};

struct Scenario {
    std::string name;
    std::vector<User> users;  // adversary directives may add "M" implicitly
    std::vector<CoinbaseEntry> coinbase;
    std::vector<Move> moves;
};

struct RejectedTx {
    std::string reason;  // validation error text
    std::string note;    // which directive produced it
    Transaction tx;
};

// Everything needed to replay and re-check a run offline.
struct RunBundle {
    std::string scenario_name;
    std::uint64_t seed = 0;
    std::vector<UserKey> users;
    SymbolicRun symbolic;
    ComputationalRun computational;
    CoherenceMaps maps0;
    CoherenceMaps final_maps;
    std::vector<RejectedTx> rejected;

    CoherenceReport coherence;
    LemmaReport s_to_c;
    LemmaReport c_to_s;
    LemmaReport balance;

    bool all_ok() const {
        return coherence.verdict && s_to_c.ok && c_to_s.ok && balance.ok;
    }
};

// Executes the scenario: every honest move emits its authorization
// broadcasts and then the built transaction; adversary directives produce
// case-2 or burn-item labels (and recorded rejections for transactions that
// are built to fail). Deterministic for a fixed (scenario, seed).
RunBundle execute_scenario(const Scenario& s, std::uint64_t seed);

// Runs all checks (coherence, both lemmas, balance) on a bundle's runs and
// refreshes its report fields.
void check_bundle(RunBundle& bundle);

// A randomly generated scenario: uniformly mixes enabled honest actions with
// adversary directives. adversary_mix in [0,1] is the directive probability.
RunBundle random_run(std::uint64_t seed, std::size_t steps, const std::vector<User>& honest,
                     double adversary_mix);

// The attack demonstrations.
struct AttackDemoResult {
    bool attack_rejected = false;
    bool forged_unspendable = false;  // forgery demo only
    std::size_t failed_input = 0;
    std::string detail;
};

AttackDemoResult run_join_attack_demo();
AttackDemoResult run_forgery_demo();

// JSON forms. Scripts appear in their textual syntax, byte strings as
// lowercase hex, integers as decimal strings.
nlohmann::json tx_to_json(const Transaction& tx);
Transaction tx_from_json(const nlohmann::json& j);
nlohmann::json chain_to_json(const Chain& chain);
Chain chain_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Configuration& g);
Configuration config_from_json(const nlohmann::json& j);
nlohmann::json label_to_json(const Label& l);
Label label_from_json(const nlohmann::json& j);

nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json bundle_to_json(const RunBundle& b);
RunBundle bundle_from_json(const nlohmann::json& j);

// The shipped walkthrough scenario: mint 10, split 8/2, give, join back to
// 10, mint 2 of a second token, trade 8 against it, buy it back for 1
// bitcoin, and burn it.
Scenario overview_scenario();

}  // namespace covtok

#endif
