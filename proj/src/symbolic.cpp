// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "covtok/symbolic.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace covtok {

Label action(ActionLabel a) { return Label{std::nullopt, std::move(a)}; }

Label authorization(Name target, User user, ActionLabel a) {
    return Label{std::make_pair(std::move(target), std::move(user)), std::move(a)};
}

std::string print_action(const ActionLabel& a) {
    std::ostringstream os;
    std::visit(
        [&os](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, GenLabel>) {
                os << "gen(" << l.x << "," << l.v << ")";
            } else if constexpr (std::is_same_v<T, BurnLabel>) {
                os << "burn(";
                for (std::size_t i = 0; i < l.xs.size(); ++i) os << (i ? " " : "") << l.xs[i];
                os << "," << l.y << ")";
            } else if constexpr (std::is_same_v<T, SplitLabel>) {
                os << "split(" << l.x << "," << l.v << "," << l.recipient << ")";
            } else if constexpr (std::is_same_v<T, JoinLabel>) {
                os << "join(" << l.x << "," << l.y << "," << l.recipient << ")";
            } else if constexpr (std::is_same_v<T, XchgLabel>) {
                os << "xchg(" << l.x << "," << l.y << ")";
            } else {
                os << "give(" << l.x << "," << l.recipient << ")";
            }
        },
        a);
    return os.str();
}

std::string print_label(const Label& l) {
    if (!l.is_auth()) return print_action(l.action);
    return l.auth->second + "[" + print_action(l.action) + "]_" + l.auth->first;
}

bool action_eq(const ActionLabel& a, const ActionLabel& b) {
    return print_action(a) == print_action(b);
}

bool label_eq(const Label& a, const Label& b) {
    if (a.is_auth() != b.is_auth()) return false;
    if (a.is_auth() && *a.auth != *b.auth) return false;
    return action_eq(a.action, b.action);
}

const Deposit* Configuration::find(const Name& name) const {
    for (const Deposit& d : deposits)
        if (d.name == name) return &d;
    return nullptr;
}

bool Configuration::token_occurs(const TokenId& t) const {
    for (const Deposit& d : deposits)
        if (d.token == t) return true;
    return false;
}

std::size_t Configuration::count_auth(const Name& target, const User& user,
                                      const ActionLabel& a) const {
    std::size_t n = 0;
    for (const Authorization& auth : auths)
        if (auth.target == target && auth.user == user && action_eq(auth.action, a)) ++n;
    return n;
}

namespace {

std::string deposit_key(const Deposit& d) {
    return d.name + "|" + d.owner + "|" + d.amount.str() + "|" + d.token.id;
}

std::string auth_key(const Authorization& a) {
    return a.target + "|" + a.user + "|" + print_action(a.action);
}

}  // namespace

bool config_eq(const Configuration& a, const Configuration& b) {
    if (a.deposits.size() != b.deposits.size() || a.auths.size() != b.auths.size()) return false;
    std::vector<std::string> da, db, aa, ab;
    for (const Deposit& d : a.deposits) da.push_back(deposit_key(d));
    for (const Deposit& d : b.deposits) db.push_back(deposit_key(d));
    for (const Authorization& x : a.auths) aa.push_back(auth_key(x));
    for (const Authorization& x : b.auths) ab.push_back(auth_key(x));
    std::sort(da.begin(), da.end());
    std::sort(db.begin(), db.end());
    std::sort(aa.begin(), aa.end());
    std::sort(ab.begin(), ab.end());
    return da == db && aa == ab;
}

namespace {

using Code = StepError::Code;

const Deposit& need_deposit(const Configuration& g, const Name& x, const std::string& rule) {
    const Deposit* d = g.find(x);
    if (!d) throw StepError(Code::NoSuchDeposit, rule, "no deposit named " + x);
    return *d;
}

void need_auth(const Configuration& g, const Name& target, const User& user,
               const ActionLabel& a, const std::string& rule) {
    if (g.count_auth(target, user, a) == 0)
        throw StepError(Code::MissingAuthorization, rule,
                        "missing " + user + "[" + print_action(a) + "]_" + target);
}

void erase_one_auth(Configuration& g, const Name& target, const User& user,
                    const ActionLabel& a) {
    for (auto it = g.auths.begin(); it != g.auths.end(); ++it) {
        if (it->target == target && it->user == user && action_eq(it->action, a)) {
            g.auths.erase(it);
            return;
        }
    }
}

void erase_deposit(Configuration& g, const Name& x) {
    std::erase_if(g.deposits, [&x](const Deposit& d) { return d.name == x; });
}

void check_fresh(const Configuration& g, const Freshness& fresh, std::size_t names,
                 std::size_t tokens, const std::string& rule) {
    if (fresh.names.size() != names || fresh.tokens.size() != tokens)
        throw StepError(Code::SideConditionViolated, rule,
                        "rule needs " + std::to_string(names) + " fresh name(s) and " +
                            std::to_string(tokens) + " fresh token(s)");
    std::set<Name> seen;
    for (const Name& n : fresh.names) {
        if (g.has_name(n) || !seen.insert(n).second)
            throw StepError(Code::SideConditionViolated, rule, "name " + n + " is not fresh");
    }
    for (const std::string& t : fresh.tokens) {
        if (t == "BTC" || g.token_occurs(TokenId{t}))
            throw StepError(Code::SideConditionViolated, rule, "token " + t + " is not fresh");
    }
}

// Burn's destination name y must be fresh, except that it may recur across
// burn authorizations for the same deposit vector.
void check_burn_y(const Configuration& g, const BurnLabel& l, const std::string& rule) {
    if (g.has_name(l.y))
        throw StepError(Code::SideConditionViolated, rule, "name " + l.y + " is not fresh");
    for (const Authorization& a : g.auths) {
        const auto* burn = std::get_if<BurnLabel>(&a.action);
        if (burn && burn->y == l.y && !action_eq(a.action, ActionLabel(l)))
            throw StepError(Code::SideConditionViolated, rule,
                            "name " + l.y + " already used by a different burn");
    }
}

void check_burn_side_condition(const Configuration& g, const BurnLabel& l,
                               const std::string& rule) {
    if (l.xs.empty())
        throw StepError(Code::SideConditionViolated, rule, "burn of an empty deposit vector");
    std::set<Name> distinct(l.xs.begin(), l.xs.end());
    if (distinct.size() != l.xs.size())
        throw StepError(Code::SideConditionViolated, rule, "burn lists a deposit twice");
    bool all_btc = true;
    for (const Name& x : l.xs)
        if (!need_deposit(g, x, rule).token.is_btc()) all_btc = false;
    if (l.xs.size() != 1 && !all_btc)
        throw StepError(Code::SideConditionViolated, rule,
                        "only bitcoin deposits may be burnt together");
}

Configuration apply_auth(const Configuration& g, const Label& l) {
    const auto& [target, user] = *l.auth;
    Configuration out = g;

    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, GenLabel>) {
                const char* rule = "AuthGen";
                if (target != a.x)
                    throw StepError(Code::SideConditionViolated, rule,
                                    "authorization must be attached to " + a.x);
                const Deposit& d = need_deposit(g, a.x, rule);
                if (d.owner != user)
                    throw StepError(Code::NotOwner, rule, user + " does not own " + a.x);
                if (d.amount != 0 || !d.token.is_btc())
                    throw StepError(Code::SideConditionViolated, rule,
                                    a.x + " is not a 0-valued bitcoin deposit");
                if (a.v <= 0)
                    throw StepError(Code::SideConditionViolated, rule,
                                    "minted amount must be positive");
            } else if constexpr (std::is_same_v<T, SplitLabel>) {
                const char* rule = "AuthSplit";
                if (target != a.x)
                    throw StepError(Code::SideConditionViolated, rule,
                                    "authorization must be attached to " + a.x);
                const Deposit& d = need_deposit(g, a.x, rule);
                if (d.owner != user)
                    throw StepError(Code::NotOwner, rule, user + " does not own " + a.x);
                if (a.v < 0 || a.v > d.amount)
                    throw StepError(Code::SideConditionViolated, rule,
                                    "split amounts must be non-negative");
            } else if constexpr (std::is_same_v<T, JoinLabel>) {
                const char* rule = "AuthJoin";
                if (target != a.x && target != a.y)
                    throw StepError(Code::SideConditionViolated, rule,
                                    "authorization must be attached to " + a.x + " or " + a.y);
                const Deposit& dx = need_deposit(g, a.x, rule);
                const Deposit& dy = need_deposit(g, a.y, rule);
                if (dx.token != dy.token)
                    throw StepError(Code::SideConditionViolated, rule,
                                    "deposits hold different tokens");
                const Deposit& dz = target == a.x ? dx : dy;
                if (dz.owner != user)
                    throw StepError(Code::NotOwner, rule, user + " does not own " + target);
            } else if constexpr (std::is_same_v<T, XchgLabel>) {
                const char* rule = "AuthExchange";
                if (target != a.x && target != a.y)
                    throw StepError(Code::SideConditionViolated, rule,
                                    "authorization must be attached to " + a.x + " or " + a.y);
                const Deposit& dx = need_deposit(g, a.x, rule);
                need_deposit(g, a.y, rule);
                if (dx.token.is_btc())
                    throw StepError(Code::SideConditionViolated, rule,
                                    "the first exchanged deposit cannot hold bitcoins");
                const Deposit& dz = *g.find(target);
                if (dz.owner != user)
                    throw StepError(Code::NotOwner, rule, user + " does not own " + target);
            } else if constexpr (std::is_same_v<T, GiveLabel>) {
                const char* rule = "AuthGive";
                if (target != a.x)
                    throw StepError(Code::SideConditionViolated, rule,
                                    "authorization must be attached to " + a.x);
                const Deposit& d = need_deposit(g, a.x, rule);
                if (d.owner != user)
                    throw StepError(Code::NotOwner, rule, user + " does not own " + a.x);
            } else if constexpr (std::is_same_v<T, BurnLabel>) {
                const char* rule = "AuthBurn";
                check_burn_side_condition(g, a, rule);
                if (std::find(a.xs.begin(), a.xs.end(), target) == a.xs.end())
                    throw StepError(Code::SideConditionViolated, rule,
                                    "authorization must be attached to a burnt deposit");
                const Deposit& d = *g.find(target);
                if (d.owner != user)
                    throw StepError(Code::NotOwner, rule, user + " does not own " + target);
                check_burn_y(g, a, rule);
            }
        },
        l.action);

    out.auths.push_back(Authorization{target, user, l.action});
    return out;
}

Configuration apply_action(const Configuration& g, const ActionLabel& al,
                           const Freshness& fresh) {
    Configuration out = g;

    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, GenLabel>) {
                const char* rule = "Gen";
                const Deposit& d = need_deposit(g, a.x, rule);
                if (d.amount != 0 || !d.token.is_btc())
                    throw StepError(Code::SideConditionViolated, rule,
                                    a.x + " is not a 0-valued bitcoin deposit");
                if (a.v <= 0)
                    throw StepError(Code::SideConditionViolated, rule,
                                    "minted amount must be positive");
                need_auth(g, a.x, d.owner, al, rule);
                check_fresh(g, fresh, 1, 1, rule);
                erase_deposit(out, a.x);
                erase_one_auth(out, a.x, d.owner, al);
                out.deposits.push_back(
                    Deposit{fresh.names[0], d.owner, a.v, TokenId{fresh.tokens[0]}});
            } else if constexpr (std::is_same_v<T, BurnLabel>) {
                const char* rule = "Burn";
                check_burn_side_condition(g, a, rule);
                for (const Name& x : a.xs) need_auth(g, x, g.find(x)->owner, al, rule);
                check_fresh(g, fresh, 0, 0, rule);
                for (const Name& x : a.xs) {
                    erase_one_auth(out, x, g.find(x)->owner, al);
                    erase_deposit(out, x);
                }
            } else if constexpr (std::is_same_v<T, SplitLabel>) {
                const char* rule = "Split";
                const Deposit& d = need_deposit(g, a.x, rule);
                if (a.v < 0 || a.v > d.amount)
                    throw StepError(Code::SideConditionViolated, rule,
                                    "split amounts must be non-negative");
                need_auth(g, a.x, d.owner, al, rule);
                check_fresh(g, fresh, 2, 0, rule);
                erase_deposit(out, a.x);
                erase_one_auth(out, a.x, d.owner, al);
                out.deposits.push_back(Deposit{fresh.names[0], d.owner, a.v, d.token});
                out.deposits.push_back(
                    Deposit{fresh.names[1], a.recipient, d.amount - a.v, d.token});
            } else if constexpr (std::is_same_v<T, JoinLabel>) {
                const char* rule = "Join";
                const Deposit& dx = need_deposit(g, a.x, rule);
                const Deposit& dy = need_deposit(g, a.y, rule);
                if (a.x == a.y)
                    throw StepError(Code::SideConditionViolated, rule,
                                    "cannot join a deposit with itself");
                if (dx.token != dy.token)
                    throw StepError(Code::SideConditionViolated, rule,
                                    "deposits hold different tokens");
                need_auth(g, a.x, dx.owner, al, rule);
                need_auth(g, a.y, dy.owner, al, rule);
                check_fresh(g, fresh, 1, 0, rule);
                erase_one_auth(out, a.x, dx.owner, al);
                erase_one_auth(out, a.y, dy.owner, al);
                erase_deposit(out, a.x);
                erase_deposit(out, a.y);
                out.deposits.push_back(
                    Deposit{fresh.names[0], a.recipient, dx.amount + dy.amount, dx.token});
            } else if constexpr (std::is_same_v<T, XchgLabel>) {
                const char* rule = "Exchange";
                const Deposit& dx = need_deposit(g, a.x, rule);
                const Deposit& dy = need_deposit(g, a.y, rule);
                if (a.x == a.y)
                    throw StepError(Code::SideConditionViolated, rule,
                                    "cannot exchange a deposit with itself");
                if (dx.token.is_btc())
                    throw StepError(Code::SideConditionViolated, rule,
                                    "the first exchanged deposit cannot hold bitcoins");
                need_auth(g, a.x, dx.owner, al, rule);
                need_auth(g, a.y, dy.owner, al, rule);
                check_fresh(g, fresh, 2, 0, rule);
                erase_one_auth(out, a.x, dx.owner, al);
                erase_one_auth(out, a.y, dy.owner, al);
                erase_deposit(out, a.x);
                erase_deposit(out, a.y);
                out.deposits.push_back(Deposit{fresh.names[0], dx.owner, dy.amount, dy.token});
                out.deposits.push_back(Deposit{fresh.names[1], dy.owner, dx.amount, dx.token});
            } else if constexpr (std::is_same_v<T, GiveLabel>) {
                const char* rule = "Give";
                const Deposit& d = need_deposit(g, a.x, rule);
                need_auth(g, a.x, d.owner, al, rule);
                check_fresh(g, fresh, 1, 0, rule);
                erase_deposit(out, a.x);
                erase_one_auth(out, a.x, d.owner, al);
                out.deposits.push_back(Deposit{fresh.names[0], a.recipient, d.amount, d.token});
            }
        },
        al);

    return out;
}

void check_config(const Configuration& g) {
    std::set<Name> names;
    for (const Deposit& d : g.deposits) {
        if (!names.insert(d.name).second)
            throw std::runtime_error("duplicate deposit name " + d.name);
        if (d.amount < 0) throw std::runtime_error("negative deposit amount on " + d.name);
    }
}

}  // namespace

Configuration step(const Configuration& g, const Label& l, const Freshness& fresh) {
    check_config(g);
    if (l.is_auth()) {
        if (!fresh.names.empty() || !fresh.tokens.empty())
            throw StepError(Code::SideConditionViolated, "Auth",
                            "authorization steps take no fresh identifiers");
        return apply_auth(g, l);
    }
    return apply_action(g, l.action, fresh);
}

BigInt tokval_s(const TokenId& t, const Configuration& g) {
    BigInt sum = 0;
    for (const Deposit& d : g.deposits)
        if (d.token == t) sum += d.amount;
    return sum;
}

namespace {

// The token introduced by the gen step at position i, if any.
std::optional<TokenId> minted_token(const SymbolicRun& run, std::size_t i) {
    if (run.steps[i].label.is_auth() ||
        !std::holds_alternative<GenLabel>(run.steps[i].label.action))
        return std::nullopt;
    const Configuration& pre = run.at(i);
    const Configuration& post = run.steps[i].config;
    for (const Deposit& d : post.deposits)
        if (!pre.has_name(d.name)) return d.token;
    return std::nullopt;
}

}  // namespace

BigInt genval(const TokenId& t, const SymbolicRun& run) {
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        auto minted = minted_token(run, i);
        if (minted && *minted == t && !run.at(i).token_occurs(t))
            return std::get<GenLabel>(run.steps[i].label.action).v;
    }
    return 0;
}

BigInt burnval(const TokenId& t, const SymbolicRun& run) {
    BigInt sum = 0;
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        const Label& l = run.steps[i].label;
        if (l.is_auth()) continue;
        const auto* burn = std::get_if<BurnLabel>(&l.action);
        if (!burn) continue;
        for (const Name& x : burn->xs) {
            const Deposit* d = run.at(i).find(x);
            if (d && d->token == t) sum += d->amount;
        }
    }
    return sum;
}

namespace {

// Fresh identifiers a label consumes, extracted from the new deposits of a
// target configuration. Returns every plausible assignment (at most two).
std::vector<Freshness> fresh_assignments(const Configuration& pre, const Configuration& post,
                                         const ActionLabel& al) {
    std::vector<Name> new_names;
    std::vector<TokenId> new_tokens;
    for (const Deposit& d : post.deposits) {
        if (!pre.has_name(d.name)) {
            new_names.push_back(d.name);
            if (!pre.token_occurs(d.token) && !d.token.is_btc()) new_tokens.push_back(d.token);
        }
    }
    std::size_t want_names = std::visit(
        [](const auto& a) -> std::size_t {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, GenLabel>) return 1;
            else if constexpr (std::is_same_v<T, BurnLabel>) return 0;
            else if constexpr (std::is_same_v<T, SplitLabel>) return 2;
            else if constexpr (std::is_same_v<T, JoinLabel>) return 1;
            else if constexpr (std::is_same_v<T, XchgLabel>) return 2;
            else return 1;
        },
        al);
    if (new_names.size() != want_names) return {};

    std::vector<std::string> tokens;
    if (std::holds_alternative<GenLabel>(al)) {
        if (new_tokens.size() != 1) return {};
        tokens = {new_tokens[0].id};
    } else if (!new_tokens.empty()) {
        return {};
    }
    std::vector<Freshness> out;
    out.push_back(Freshness{new_names, tokens});
    if (new_names.size() == 2) out.push_back(Freshness{{new_names[1], new_names[0]}, tokens});
    return out;
}

}  // namespace

void validate_run(const SymbolicRun& run) {
    check_config(run.initial);
    for (const Deposit& d : run.initial.deposits)
        if (!d.token.is_btc())
            throw std::runtime_error("initial configuration may hold only bitcoin deposits");
    if (!run.initial.auths.empty())
        throw std::runtime_error("initial configuration may not hold authorizations");

    std::set<Name> used_names;
    std::set<std::string> used_tokens;
    std::map<Name, std::string> burn_y;  // y -> canonical burn action
    for (const Deposit& d : run.initial.deposits) used_names.insert(d.name);

    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        const Configuration& pre = run.at(i);
        const Configuration& post = run.steps[i].config;
        const Label& label = run.steps[i].label;

        if (const auto* burn = std::get_if<BurnLabel>(&label.action)) {
            auto it = burn_y.find(burn->y);
            std::string key = print_action(ActionLabel(*burn));
            if (it != burn_y.end()) {
                if (it->second != key)
                    throw std::runtime_error("burn name " + burn->y + " reused inconsistently");
            } else {
                if (used_names.count(burn->y))
                    throw std::runtime_error("burn name " + burn->y + " is not fresh");
                burn_y.emplace(burn->y, key);
                used_names.insert(burn->y);
            }
        }

        bool matched = false;
        if (label.is_auth()) {
            Configuration computed = step(pre, label, Freshness{});
            matched = config_eq(computed, post);
        } else {
            for (const Freshness& fresh : fresh_assignments(pre, post, label.action)) {
                for (const Name& n : fresh.names)
                    if (used_names.count(n))
                        throw std::runtime_error("name " + n + " is not fresh in the run");
                for (const std::string& t : fresh.tokens)
                    if (used_tokens.count(t))
                        throw std::runtime_error("token " + t + " is not fresh in the run");
                Configuration computed = step(pre, label, fresh);
                if (config_eq(computed, post)) {
                    matched = true;
                    for (const Name& n : fresh.names) used_names.insert(n);
                    for (const std::string& t : fresh.tokens) used_tokens.insert(t);
                    break;
                }
            }
        }
        if (!matched)
            throw std::runtime_error("step " + std::to_string(i) + " (" + print_label(label) +
                                     ") does not derive the recorded configuration");
    }
}

InferResult infer_label(const Configuration& g, const Configuration& g2) {
    std::vector<Label> found;
    auto consider = [&](const Label& l) {
        for (const Label& seen : found)
            if (label_eq(seen, l)) return;
        if (l.is_auth()) {
            try {
                if (config_eq(step(g, l, Freshness{}), g2)) found.push_back(l);
            } catch (const StepError&) {
            }
            return;
        }
        for (const Freshness& fresh : fresh_assignments(g, g2, l.action)) {
            try {
                if (config_eq(step(g, l, fresh), g2)) {
                    found.push_back(l);
                    return;
                }
            } catch (const StepError&) {
            }
        }
    };

    // Candidate authorizations: the single extra auth term of g2, if any.
    if (g2.auths.size() == g.auths.size() + 1) {
        std::multiset<std::string> in_g;
        for (const Authorization& a : g.auths) in_g.insert(auth_key(a));
        for (const Authorization& a : g2.auths) {
            auto it = in_g.find(auth_key(a));
            if (it != in_g.end()) {
                in_g.erase(it);
                continue;
            }
            consider(authorization(a.target, a.user, a.action));
        }
    }

    // Candidate actions: every action some authorization in g enables.
    for (const Authorization& a : g.auths) consider(action(a.action));

    if (found.empty()) return InferResult{InferResult::Outcome::NoneFound, std::nullopt, {}};
    if (found.size() == 1) return InferResult{InferResult::Outcome::Found, found[0], {}};
    return InferResult{InferResult::Outcome::Ambiguous, std::nullopt, found};
}

// ---------------------------------------------------------------------------
// Structural run equivalence

namespace {

struct NameBijection {
    std::map<Name, Name> fwd, bwd;

    bool bind(const Name& a, const Name& b) {
        auto f = fwd.find(a);
        auto r = bwd.find(b);
        if (f != fwd.end() || r != bwd.end())
            return f != fwd.end() && r != bwd.end() && f->second == b && r->second == a;
        fwd.emplace(a, b);
        bwd.emplace(b, a);
        return true;
    }
};

bool bind_labels(const Label& la, const Label& lb, NameBijection& names) {
    if (la.is_auth() != lb.is_auth()) return false;
    if (la.is_auth()) {
        if (la.auth->second != lb.auth->second) return false;
        if (!names.bind(la.auth->first, lb.auth->first)) return false;
    }
    if (la.action.index() != lb.action.index()) return false;
    return std::visit(
        [&](const auto& a) -> bool {
            using T = std::decay_t<decltype(a)>;
            const T& b = std::get<T>(lb.action);
            if constexpr (std::is_same_v<T, GenLabel>) {
                return a.v == b.v && names.bind(a.x, b.x);
            } else if constexpr (std::is_same_v<T, BurnLabel>) {
                if (a.xs.size() != b.xs.size()) return false;
                for (std::size_t i = 0; i < a.xs.size(); ++i)
                    if (!names.bind(a.xs[i], b.xs[i])) return false;
                return names.bind(a.y, b.y);
            } else if constexpr (std::is_same_v<T, SplitLabel>) {
                return a.v == b.v && a.recipient == b.recipient && names.bind(a.x, b.x);
            } else if constexpr (std::is_same_v<T, JoinLabel>) {
                return a.recipient == b.recipient && names.bind(a.x, b.x) &&
                       names.bind(a.y, b.y);
            } else if constexpr (std::is_same_v<T, XchgLabel>) {
                return names.bind(a.x, b.x) && names.bind(a.y, b.y);
            } else {
                return a.recipient == b.recipient && names.bind(a.x, b.x);
            }
        },
        la.action);
}

// Canonical token names per run: BTC stays, user tokens become t#k in order
// of first appearance over the run.
std::map<std::string, std::string> token_classes(const SymbolicRun& run) {
    std::map<std::string, std::string> cls;
    cls.emplace("BTC", "BTC");
    std::size_t next = 0;
    for (std::size_t i = 0; i < run.length(); ++i) {
        for (const Deposit& d : run.at(i).deposits)
            if (!cls.count(d.token.id)) cls.emplace(d.token.id, "t#" + std::to_string(next++));
    }
    return cls;
}

std::string project_action(const ActionLabel& a, const std::map<Name, Name>& names) {
    ActionLabel renamed = a;
    auto rn = [&names](Name& n) {
        auto it = names.find(n);
        if (it != names.end()) n = it->second;
    };
    std::visit(
        [&](auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, BurnLabel>) {
                for (Name& n : l.xs) rn(n);
                rn(l.y);
            } else if constexpr (std::is_same_v<T, JoinLabel> || std::is_same_v<T, XchgLabel>) {
                rn(l.x);
                rn(l.y);
            } else {
                rn(l.x);
            }
        },
        renamed);
    return print_action(renamed);
}

bool configs_structurally_equal(const Configuration& ca, const Configuration& cb,
                                const NameBijection& names,
                                const std::map<std::string, std::string>& tok_a,
                                const std::map<std::string, std::string>& tok_b) {
    std::vector<std::string> da, db, aa, ab;
    for (const Deposit& d : ca.deposits)
        da.push_back(d.owner + "|" + d.amount.str() + "|" + tok_a.at(d.token.id));
    for (const Deposit& d : cb.deposits)
        db.push_back(d.owner + "|" + d.amount.str() + "|" + tok_b.at(d.token.id));
    for (const Authorization& x : ca.auths) {
        auto it = names.fwd.find(x.target);
        std::string target = it == names.fwd.end() ? "?" : it->second;
        aa.push_back(target + "|" + x.user + "|" + project_action(x.action, names.fwd));
    }
    for (const Authorization& x : cb.auths)
        ab.push_back(x.target + "|" + x.user + "|" + print_action(x.action));
    std::sort(da.begin(), da.end());
    std::sort(db.begin(), db.end());
    std::sort(aa.begin(), aa.end());
    std::sort(ab.begin(), ab.end());
    return da == db && aa == ab;
}

}  // namespace

bool runs_alpha_equal(const SymbolicRun& a, const SymbolicRun& b) {
    if (a.steps.size() != b.steps.size()) return false;
    try {
        validate_run(a);
        validate_run(b);
    } catch (const std::exception&) {
        return false;
    }

    NameBijection names;
    for (std::size_t i = 0; i < a.steps.size(); ++i)
        if (!bind_labels(a.steps[i].label, b.steps[i].label, names)) return false;

    auto tok_a = token_classes(a);
    auto tok_b = token_classes(b);
    for (std::size_t i = 0; i < a.length(); ++i)
        if (!configs_structurally_equal(a.at(i), b.at(i), names, tok_a, tok_b)) return false;
    return true;
}

}  // namespace covtok
