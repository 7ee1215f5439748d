// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVTOK_SYMBOLIC_HPP
#define COVTOK_SYMBOLIC_HPP

#include "covtok/basics.hpp"

#include <optional>

namespace covtok {

using User = std::string;
using Name = std::string;

// Token identifiers; the distinguished "BTC" denotes bitcoins.
struct TokenId {
    std::string id;
    auto operator<=>(const TokenId&) const = default;
    bool is_btc() const { return id == "BTC"; }
    static TokenId btc() { return TokenId{"BTC"}; }
};

struct Deposit {
    Name name;
    User owner;
    BigInt amount;
    TokenId token;
};

// The six token actions.
struct GenLabel { Name x; BigInt v; };
struct BurnLabel { std::vector<Name> xs; Name y; };
struct SplitLabel { Name x; BigInt v; User recipient; };
struct JoinLabel { Name x; Name y; User recipient; };
struct XchgLabel { Name x; Name y; };
struct GiveLabel { Name x; User recipient; };

using ActionLabel = std::variant<GenLabel, BurnLabel, SplitLabel, JoinLabel, XchgLabel, GiveLabel>;

// A step label: either an action, or a user's authorization for an action,
// attached to one of their deposits.
struct Label {
    std::optional<std::pair<Name, User>> auth;  // (target deposit, granting user)
    ActionLabel action;

    bool is_auth() const { return auth.has_value(); }
};

Label action(ActionLabel a);
Label authorization(Name target, User user, ActionLabel a);

bool action_eq(const ActionLabel& a, const ActionLabel& b);
bool label_eq(const Label& a, const Label& b);
std::string print_action(const ActionLabel& a);
std::string print_label(const Label& l);

struct Authorization {
    Name target;
    User user;
    ActionLabel action;
};

// A commutative-monoid configuration: a multiset of deposits and
// authorizations. Deposit names are unique; duplicate authorization terms
// are allowed.
struct Configuration {
    std::vector<Deposit> deposits;
    std::vector<Authorization> auths;

    const Deposit* find(const Name& name) const;
    bool has_name(const Name& name) const { return find(name) != nullptr; }
    bool token_occurs(const TokenId& t) const;
    std::size_t count_auth(const Name& target, const User& user, const ActionLabel& a) const;
};

// Multiset equality (order-insensitive).
bool config_eq(const Configuration& a, const Configuration& b);

struct StepError : std::runtime_error {
    enum class Code { MissingAuthorization, NoSuchDeposit, SideConditionViolated, NotOwner };

    StepError(Code code, const std::string& rule, const std::string& detail)
        : std::runtime_error("[" + rule + "] " + detail), code(code), rule(rule) {}

    Code code;
    std::string rule;
};

// Fresh identifiers consumed by an action step: gen needs one deposit name
// and one token id, split and xchg need two names, join and give one.
struct Freshness {
    std::vector<Name> names;
    std::vector<std::string> tokens;
};

// Applies one semantics rule. Authorization labels add the matching
// authorization term; action labels consume their deposits plus exactly the
// authorizations their rule demands. Unused authorizations persist.
Configuration step(const Configuration& g, const Label& l, const Freshness& fresh);

struct SymbolicRun {
    Configuration initial;  // bitcoin deposits only
    struct Step {
        Label label;
        Configuration config;  // configuration after the step
    };
    std::vector<Step> steps;

    const Configuration& last() const { return steps.empty() ? initial : steps.back().config; }
    const Configuration& at(std::size_t i) const { return i == 0 ? initial : steps[i - 1].config; }
    std::size_t length() const { return steps.size() + 1; }
};

// Re-derives every step (checking run-level freshness of introduced names
// and tokens); throws StepError / std::runtime_error on an invalid run.
void validate_run(const SymbolicRun& run);

// Token balance of t in a configuration: the sum of its deposit amounts.
BigInt tokval_s(const TokenId& t, const Configuration& g);

// Minted value of t (the v of the unique gen step introducing it; 0 when t
// was never minted) and total burnt value of t across the run.
BigInt genval(const TokenId& t, const SymbolicRun& run);
BigInt burnval(const TokenId& t, const SymbolicRun& run);

// Recovers the label of a transition by brute force over the labels enabled
// in g. Ambiguity (several distinct labels reaching g2 up to fresh-name
// renaming) is surfaced, never silently resolved.
struct InferResult {
    enum class Outcome { Found, NoneFound, Ambiguous };
    Outcome outcome;
    std::optional<Label> label;
    std::vector<Label> candidates;  // populated when Ambiguous
};

InferResult infer_label(const Configuration& g, const Configuration& g2);

// Structural equivalence of runs up to renaming of fresh deposit names and
// token identifiers (users and amounts must match exactly).
bool runs_alpha_equal(const SymbolicRun& a, const SymbolicRun& b);

}  // namespace covtok

#endif
