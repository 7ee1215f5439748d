// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "covtok/coherence.hpp"

#include <algorithm>
#include <sstream>

namespace covtok {

const UserKey* user_by_name(const std::vector<UserKey>& users, const User& name) {
    for (const UserKey& u : users)
        if (u.name == name) return &u;
    return nullptr;
}

const UserKey* user_by_key(const std::vector<UserKey>& users, const Bytes& pk) {
    for (const UserKey& u : users)
        if (u.public_key == pk) return &u;
    return nullptr;
}

Chain derive_chain(const ComputationalRun& rc) {
    if (rc.labels.empty() || !std::holds_alternative<AppendTx>(rc.labels[0]))
        throw std::runtime_error("computational run must begin with a coinbase transaction");
    Chain chain = Chain::genesis(std::get<AppendTx>(rc.labels[0]).tx);
    for (std::size_t i = 1; i < rc.labels.size(); ++i)
        if (const auto* a = std::get_if<AppendTx>(&rc.labels[i]))
            chain = validate_and_append(chain, a->tx);
    return chain;
}

namespace {
constexpr const char* kAuthMagic = "CVTK-AUTH1";
}

Bytes encode_auth_message(const AuthMessage& m) {
    Encoder enc;
    for (const char* p = kAuthMagic; *p; ++p) enc.u8(static_cast<std::uint8_t>(*p));
    enc.blob(m.signer_pk);
    enc.blob(m.signature);
    enc.blob(canonical_serialize(m.tx, false));
    return enc.take();
}

std::optional<AuthMessage> decode_auth_message(const Bytes& data) {
    try {
        Decoder dec(data);
        for (const char* p = kAuthMagic; *p; ++p)
            if (dec.u8() != static_cast<std::uint8_t>(*p)) return std::nullopt;
        AuthMessage m;
        m.signer_pk = dec.blob();
        m.signature = dec.blob();
        m.tx = decode_transaction(dec.blob());
        dec.expect_done();
        return m;
    } catch (const DecodeError&) {
        return std::nullopt;
    }
}

AuthMessage make_auth_message(const KeyPair& signer, const Transaction& tx) {
    Transaction cleared = tx;
    for (auto& w : cleared.witnesses) w.clear();
    return AuthMessage{signer.public_key, sign_tx(signer, tx), std::move(cleared)};
}

void CoherenceMaps::bind_txout(const Name& x, const Outpoint& o) {
    txout[x] = o;
    txout_history[x] = o;
}

std::optional<Name> CoherenceMaps::name_of(const Outpoint& o) const {
    for (const auto& [name, out] : txout)
        if (out == o) return name;
    return std::nullopt;
}

CoherenceMaps base_maps(const Configuration& initial, const Transaction& coinbase) {
    CoherenceMaps maps;
    Digest id = txid_of(coinbase);
    for (std::size_t i = 0; i < initial.deposits.size() && i < coinbase.outputs.size(); ++i)
        maps.bind_txout(initial.deposits[i].name, Outpoint{id, i + 1});
    return maps;
}

// ---------------------------------------------------------------------------
// Transaction classification against the inductive-case-1 items.

namespace {

struct ClassifyError : std::runtime_error {
    explicit ClassifyError(const std::string& what) : std::runtime_error(what) {}
};

struct Ctx {
    const Chain& chain;
    const std::vector<UserKey>& users;
    const Configuration& config;
    const CoherenceMaps& maps;
};

struct TxClass {
    enum class Kind { Case2, Gen, Split, Join, Xchg, GiveA, GiveB, GiveC, Burn };
    Kind kind = Kind::Case2;
    ActionLabel label;                   // burn's y is filled by the caller
    std::vector<Outpoint> new_outpoints; // fresh-slot bindings in rule order
    std::optional<Outpoint> token_source;  // gen only: the consumed deposit output
    std::optional<Outpoint> counterparty;  // give 5b/5c: the unmapped input
    std::string item;

    bool is_action() const { return kind != Kind::Case2; }
};

std::optional<User> user_of_pk(const Ctx& ctx, const Bytes& pk) {
    const UserKey* u = user_by_key(ctx.users, pk);
    if (!u) return std::nullopt;
    return u->name;
}

Bytes pk_of_user(const Ctx& ctx, const User& user) {
    const UserKey* u = user_by_name(ctx.users, user);
    if (!u) throw ClassifyError("unknown user " + user);
    return u->public_key;
}

// The tkid bytes carried by a mapped token deposit's output.
std::optional<Bytes> spent_tkid(const Ctx& ctx, const Outpoint& o) {
    auto fields = token_fields(ctx.chain.resolve(o));
    if (!fields) return std::nullopt;
    return fields->tkid;
}

std::optional<TxClass> try_gen(const Ctx& ctx, const Transaction& tx, const Name& x) {
    const Deposit& d = *ctx.config.find(x);
    if (!(d.amount == 0) || !d.token.is_btc()) return std::nullopt;
    if (tx.inputs.size() != 1 || tx.outputs.size() != 1) return std::nullopt;
    auto f = token_fields(tx.outputs[0]);
    if (!f) return std::nullopt;
    const Outpoint& source = tx.inputs[0];
    if (f->op != op::gen) return std::nullopt;
    if (f->tkid != outpoint_digest(ctx.chain, source).to_bytes()) return std::nullopt;
    if (f->owner != pk_of_user(ctx, d.owner)) return std::nullopt;
    if (f->tkval <= 0) return std::nullopt;
    if (tx.outputs[0].val != 0) return std::nullopt;

    TxClass out;
    out.kind = TxClass::Kind::Gen;
    out.label = GenLabel{x, f->tkval};
    out.new_outpoints = {Outpoint{txid_of(tx), 1}};
    out.token_source = source;
    out.item = "item1(gen)";
    return out;
}

std::optional<TxClass> try_split(const Ctx& ctx, const Transaction& tx, const Name& x) {
    if (tx.inputs.size() != 1 || tx.outputs.size() != 2) return std::nullopt;
    const Deposit& d = *ctx.config.find(x);
    Digest id = txid_of(tx);
    User recipient;
    BigInt v1;
    if (d.token.is_btc()) {
        auto o1 = btc_owner(tx.outputs[0]);
        auto o2 = btc_owner(tx.outputs[1]);
        if (!o1 || !o2) return std::nullopt;
        if (*o1 != pk_of_user(ctx, d.owner)) return std::nullopt;
        auto rec = user_of_pk(ctx, *o2);
        if (!rec) return std::nullopt;
        if (tx.outputs[0].val + tx.outputs[1].val != d.amount) return std::nullopt;
        v1 = tx.outputs[0].val;
        recipient = *rec;
    } else {
        auto f1 = token_fields(tx.outputs[0]);
        auto f2 = token_fields(tx.outputs[1]);
        if (!f1 || !f2) return std::nullopt;
        auto tkid = spent_tkid(ctx, tx.inputs[0]);
        if (!tkid) return std::nullopt;
        if (f1->op != op::split) return std::nullopt;
        if (f1->tkid != *tkid || f2->tkid != *tkid) return std::nullopt;
        if (f1->owner != pk_of_user(ctx, d.owner)) return std::nullopt;
        auto rec = user_of_pk(ctx, f2->owner);
        if (!rec) return std::nullopt;
        if (f1->tkval < 0 || f2->tkval < 0) return std::nullopt;
        if (f1->tkval + f2->tkval != d.amount) return std::nullopt;
        if (tx.outputs[0].val != 0 || tx.outputs[1].val != 0) return std::nullopt;
        v1 = f1->tkval;
        recipient = *rec;
    }
    TxClass out;
    out.kind = TxClass::Kind::Split;
    out.label = SplitLabel{x, v1, recipient};
    out.new_outpoints = {Outpoint{id, 1}, Outpoint{id, 2}};
    out.item = "item2(split)";
    return out;
}

std::optional<TxClass> try_join(const Ctx& ctx, const Transaction& tx, const Name& x,
                                const Name& y) {
    if (tx.inputs.size() != 2 || tx.outputs.size() != 1) return std::nullopt;
    const Deposit& dx = *ctx.config.find(x);
    const Deposit& dy = *ctx.config.find(y);
    if (dx.token != dy.token) return std::nullopt;
    User recipient;
    if (dx.token.is_btc()) {
        auto o = btc_owner(tx.outputs[0]);
        if (!o) return std::nullopt;
        auto rec = user_of_pk(ctx, *o);
        if (!rec) return std::nullopt;
        if (tx.outputs[0].val != dx.amount + dy.amount) return std::nullopt;
        recipient = *rec;
    } else {
        auto f = token_fields(tx.outputs[0]);
        if (!f) return std::nullopt;
        auto t1 = spent_tkid(ctx, tx.inputs[0]);
        auto t2 = spent_tkid(ctx, tx.inputs[1]);
        if (!t1 || !t2 || *t1 != *t2) return std::nullopt;
        if (f->op != op::join) return std::nullopt;
        if (f->tkid != *t1) return std::nullopt;
        if (f->tkval != dx.amount + dy.amount) return std::nullopt;
        if (tx.outputs[0].val != 0) return std::nullopt;
        auto rec = user_of_pk(ctx, f->owner);
        if (!rec) return std::nullopt;
        recipient = *rec;
    }
    TxClass out;
    out.kind = TxClass::Kind::Join;
    out.label = JoinLabel{x, y, recipient};
    out.new_outpoints = {Outpoint{txid_of(tx), 1}};
    out.item = "item3(join)";
    return out;
}

std::optional<TxClass> try_xchg(const Ctx& ctx, const Transaction& tx, const Name& x,
                                const Name& y) {
    if (tx.inputs.size() != 2 || tx.outputs.size() != 2) return std::nullopt;
    const Deposit& dx = *ctx.config.find(x);
    const Deposit& dy = *ctx.config.find(y);
    if (dx.token.is_btc()) return std::nullopt;

    auto f1 = token_fields(tx.outputs[0]);
    if (!f1) return std::nullopt;
    auto xtkid = spent_tkid(ctx, tx.inputs[0]);
    if (!xtkid) return std::nullopt;
    if (f1->op != op::xchg) return std::nullopt;
    if (f1->owner != pk_of_user(ctx, dy.owner)) return std::nullopt;
    if (f1->tkid != *xtkid) return std::nullopt;
    if (f1->tkval != dx.amount) return std::nullopt;
    if (tx.outputs[0].val != 0) return std::nullopt;

    if (dy.token.is_btc()) {
        auto o2 = btc_owner(tx.outputs[1]);
        if (!o2 || *o2 != pk_of_user(ctx, dx.owner)) return std::nullopt;
        if (tx.outputs[1].val != dy.amount) return std::nullopt;
    } else {
        auto f2 = token_fields(tx.outputs[1]);
        if (!f2) return std::nullopt;
        auto ytkid = spent_tkid(ctx, tx.inputs[1]);
        if (!ytkid) return std::nullopt;
        if (f2->owner != pk_of_user(ctx, dx.owner)) return std::nullopt;
        if (f2->tkval != dy.amount) return std::nullopt;
        if (f2->tkid != *ytkid) return std::nullopt;
        if (tx.outputs[1].val != 0) return std::nullopt;
    }
    TxClass out;
    out.kind = TxClass::Kind::Xchg;
    out.label = XchgLabel{x, y};
    // Fresh slots in rule order: x' (the counter-asset, output 2) then y'.
    Digest id = txid_of(tx);
    out.new_outpoints = {Outpoint{id, 2}, Outpoint{id, 1}};
    out.item = "item4(xchg)";
    return out;
}

std::optional<TxClass> try_give_a(const Ctx& ctx, const Transaction& tx, const Name& x) {
    if (tx.inputs.size() != 1 || tx.outputs.size() != 1) return std::nullopt;
    const Deposit& d = *ctx.config.find(x);
    User recipient;
    if (d.token.is_btc()) {
        auto o = btc_owner(tx.outputs[0]);
        if (!o) return std::nullopt;
        auto rec = user_of_pk(ctx, *o);
        if (!rec) return std::nullopt;
        if (tx.outputs[0].val != d.amount) return std::nullopt;
        recipient = *rec;
    } else {
        auto f = token_fields(tx.outputs[0]);
        if (!f) return std::nullopt;
        auto tkid = spent_tkid(ctx, tx.inputs[0]);
        if (!tkid) return std::nullopt;
        if (f->op != op::give) return std::nullopt;
        if (f->tkid != *tkid) return std::nullopt;
        if (f->tkval != d.amount) return std::nullopt;
        if (tx.outputs[0].val != 0) return std::nullopt;
        auto rec = user_of_pk(ctx, f->owner);
        if (!rec) return std::nullopt;
        recipient = *rec;
    }
    TxClass out;
    out.kind = TxClass::Kind::GiveA;
    out.label = GiveLabel{x, recipient};
    out.new_outpoints = {Outpoint{txid_of(tx), 1}};
    out.item = "item5a(give)";
    return out;
}

// give matching an exchange-shaped transaction whose other input is not
// mapped: the mapped token keeps its identifier and value, changing owner.
std::optional<TxClass> try_give_unmapped(const Ctx& ctx, const Transaction& tx, const Name& x,
                                         bool mapped_is_first) {
    if (tx.inputs.size() != 2 || tx.outputs.size() != 2) return std::nullopt;
    const Deposit& d = *ctx.config.find(x);
    if (d.token.is_btc()) return std::nullopt;

    std::size_t mapped_out = mapped_is_first ? 0 : 1;
    std::size_t other_in = mapped_is_first ? 1 : 0;
    auto f1 = token_fields(tx.outputs[0]);
    if (!f1 || f1->op != op::xchg) return std::nullopt;
    auto f = token_fields(tx.outputs[mapped_out]);
    if (!f) return std::nullopt;
    auto tkid = spent_tkid(ctx, tx.inputs[mapped_is_first ? 0 : 1]);
    if (!tkid || f->tkid != *tkid) return std::nullopt;
    if (f->tkval != d.amount) return std::nullopt;
    if (tx.outputs[mapped_out].val != 0) return std::nullopt;

    auto counterpart_owner = owner_of(ctx.chain.resolve(tx.inputs[other_in]));
    if (!counterpart_owner || f->owner != *counterpart_owner) return std::nullopt;
    auto rec = user_of_pk(ctx, *counterpart_owner);
    if (!rec) return std::nullopt;

    TxClass out;
    out.kind = mapped_is_first ? TxClass::Kind::GiveB : TxClass::Kind::GiveC;
    out.label = GiveLabel{x, *rec};
    out.new_outpoints = {Outpoint{txid_of(tx), mapped_is_first ? 1u : 2u}};
    out.counterparty = tx.inputs[other_in];
    out.item = mapped_is_first ? "item5b(give)" : "item5c(give)";
    return out;
}

std::optional<TxClass> try_burn_token(const Ctx& ctx, const Transaction& tx, const Name& x) {
    if (tx.inputs.size() != 1 || tx.outputs.size() != 1) return std::nullopt;
    const TxOutput& out0 = tx.outputs[0];
    if (out0.arg.empty() || !is_int(out0.arg[0]) || as_int(out0.arg[0]) != op::burn)
        return std::nullopt;
    if (!is_false_script(out0.scr)) return std::nullopt;
    if (out0.val != 0) return std::nullopt;
    TxClass out;
    out.kind = TxClass::Kind::Burn;
    out.label = BurnLabel{{x}, ""};
    out.item = "item6a(burn)";
    return out;
}

TxClass burn_catch_all(const std::vector<Name>& mapped_names) {
    TxClass out;
    out.kind = TxClass::Kind::Burn;
    out.label = BurnLabel{mapped_names, ""};
    out.item = "item6b(burn)";
    return out;
}

// Classifies an appended (or announced) transaction against the coherence
// items, given the current configuration and maps. Follows the soundness
// proof's decision tree: no mapped inputs -> no symbolic step; all mapped
// inputs plain -> gen/split/join/give by shape, else burn; some mapped token
// input -> dispatch on the first output's op code.
TxClass classify_tx(const Ctx& ctx, const Transaction& tx) {
    std::vector<Name> mapped;  // in input order
    bool any_token = false;
    for (const Outpoint& in : tx.inputs) {
        auto name = ctx.maps.name_of(in);
        if (!name) continue;
        const Deposit* d = ctx.config.find(*name);
        if (!d) throw ClassifyError("mapped output " + in.to_string() + " has no deposit");
        mapped.push_back(*name);
        if (!d->token.is_btc()) any_token = true;
    }
    if (mapped.empty()) {
        TxClass out;
        out.item = "case2:transaction";
        return out;
    }

    if (!any_token) {
        if (mapped.size() == 1) {
            if (auto c = try_gen(ctx, tx, mapped[0])) return *c;
            if (auto c = try_split(ctx, tx, mapped[0])) return *c;
            if (auto c = try_give_a(ctx, tx, mapped[0])) return *c;
        }
        if (mapped.size() == 2 && tx.inputs.size() == 2) {
            auto n1 = ctx.maps.name_of(tx.inputs[0]);
            auto n2 = ctx.maps.name_of(tx.inputs[1]);
            if (n1 && n2)
                if (auto c = try_join(ctx, tx, *n1, *n2)) return *c;
        }
        return burn_catch_all(mapped);
    }

    // Some mapped input holds a user token.
    if (tx.outputs.empty() || tx.outputs[0].arg.empty() || !is_int(tx.outputs[0].arg[0]))
        throw ClassifyError("token-spending transaction without an op code");
    BigInt opcode = as_int(tx.outputs[0].arg[0]);

    auto mapped_at = [&](std::size_t input) -> std::optional<Name> {
        if (input >= tx.inputs.size()) return std::nullopt;
        return ctx.maps.name_of(tx.inputs[input]);
    };

    if (opcode == op::burn && mapped.size() == 1) {
        if (auto c = try_burn_token(ctx, tx, mapped[0])) return *c;
    } else if (opcode == op::split && mapped.size() == 1) {
        if (auto c = try_split(ctx, tx, mapped[0])) return *c;
    } else if (opcode == op::join) {
        auto n1 = mapped_at(0);
        auto n2 = mapped_at(1);
        if (n1 && n2) {
            if (auto c = try_join(ctx, tx, *n1, *n2)) return *c;
        } else {
            throw ClassifyError("join spending an unmapped sibling");
        }
    } else if (opcode == op::xchg) {
        auto n1 = mapped_at(0);
        auto n2 = mapped_at(1);
        if (n1 && n2) {
            if (auto c = try_xchg(ctx, tx, *n1, *n2)) return *c;
        } else if (n1) {
            if (auto c = try_give_unmapped(ctx, tx, *n1, true)) return *c;
        } else if (n2) {
            if (auto c = try_give_unmapped(ctx, tx, *n2, false)) return *c;
        }
    } else if (opcode == op::give && mapped.size() == 1) {
        if (auto c = try_give_a(ctx, tx, mapped[0])) return *c;
    }
    throw ClassifyError("transaction spends mapped token outputs but matches no coherence item");
}

// Authorization candidates for a broadcast payload, per items 7-12: the
// payload must carry a valid signature of some user on a transaction
// matching an action item, and the signer must own a consumed deposit.
struct AuthCand {
    Name target;
    User user;
    ActionLabel action_template;  // burn's y unfilled
    TxClass cls;
    Transaction template_tx;  // witness-cleared
};

std::vector<AuthCand> classify_broadcast(const Ctx& ctx, const Bytes& data) {
    auto msg = decode_auth_message(data);
    if (!msg) return {};
    const UserKey* signer = user_by_key(ctx.users, msg->signer_pk);
    if (!signer) return {};
    if (!verify_tx(msg->signer_pk, msg->signature, msg->tx)) return {};

    TxClass cls;
    try {
        cls = classify_tx(ctx, msg->tx);
    } catch (const ClassifyError&) {
        return {};
    }
    if (!cls.is_action()) return {};

    std::vector<Name> consumed;
    std::visit(
        [&consumed](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, BurnLabel>) consumed = l.xs;
            else if constexpr (std::is_same_v<T, JoinLabel> || std::is_same_v<T, XchgLabel>) {
                consumed = {l.x, l.y};
            } else {
                consumed = {l.x};
            }
        },
        cls.label);

    std::vector<AuthCand> out;
    for (const Name& target : consumed) {
        const Deposit* d = ctx.config.find(target);
        if (d && d->owner == signer->name)
            out.push_back(AuthCand{target, signer->name, cls.label, cls, msg->tx});
    }
    return out;
}

std::string auth_item_tag(const ActionLabel& a) {
    return std::visit(
        [](const auto& l) -> std::string {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, GenLabel>) return "item7(auth-gen)";
            else if constexpr (std::is_same_v<T, SplitLabel>) return "item8(auth-split)";
            else if constexpr (std::is_same_v<T, JoinLabel>) return "item9(auth-join)";
            else if constexpr (std::is_same_v<T, XchgLabel>) return "item10(auth-xchg)";
            else if constexpr (std::is_same_v<T, GiveLabel>) return "item11(auth-give)";
            else return "item12(auth-burn)";
        },
        a);
}

Bytes cleared_bytes(const Transaction& tx) { return canonical_serialize(tx, false); }

std::optional<Name> txburn_lookup(const CoherenceMaps& maps, const Transaction& tx) {
    Bytes key = cleared_bytes(tx);
    for (const auto& [y, t] : maps.txburn)
        if (cleared_bytes(t) == key) return y;
    return std::nullopt;
}

// Matches actions ignoring burn's destination name (bound at auth time).
bool action_matches(const ActionLabel& expected, const ActionLabel& classified) {
    if (const auto* eb = std::get_if<BurnLabel>(&expected)) {
        const auto* cb = std::get_if<BurnLabel>(&classified);
        if (!cb) return false;
        std::vector<Name> a = eb->xs, b = cb->xs;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        return a == b;
    }
    return action_eq(expected, classified);
}

// Fresh identifiers of an action step, aligned to rule-slot order by
// re-deriving the recorded post-configuration.
std::optional<Freshness> aligned_freshness(const Configuration& pre, const Configuration& post,
                                           const Label& label) {
    std::vector<Name> new_names;
    std::vector<std::string> new_tokens;
    for (const Deposit& d : post.deposits) {
        if (!pre.has_name(d.name)) {
            new_names.push_back(d.name);
            if (!d.token.is_btc() && !pre.token_occurs(d.token)) new_tokens.push_back(d.token.id);
        }
    }
    std::vector<Freshness> orders;
    orders.push_back(Freshness{new_names, new_tokens});
    if (new_names.size() == 2)
        orders.push_back(Freshness{{new_names[1], new_names[0]}, new_tokens});
    for (const Freshness& fresh : orders) {
        try {
            if (config_eq(step(pre, label, fresh), post)) return fresh;
        } catch (const StepError&) {
        }
    }
    return std::nullopt;
}

// Applies an accepted action item's map updates.
void apply_action_maps(CoherenceMaps& maps, const TxClass& cls, const ActionLabel& label,
                       const Freshness& fresh) {
    std::visit(
        [&](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, GenLabel>) {
                maps.txout.erase(l.x);
                maps.bind_txout(fresh.names[0], cls.new_outpoints[0]);
                maps.tkid[fresh.tokens[0]] = *cls.token_source;
            } else if constexpr (std::is_same_v<T, SplitLabel>) {
                maps.txout.erase(l.x);
                maps.bind_txout(fresh.names[0], cls.new_outpoints[0]);
                maps.bind_txout(fresh.names[1], cls.new_outpoints[1]);
            } else if constexpr (std::is_same_v<T, JoinLabel>) {
                maps.txout.erase(l.x);
                maps.txout.erase(l.y);
                maps.bind_txout(fresh.names[0], cls.new_outpoints[0]);
            } else if constexpr (std::is_same_v<T, XchgLabel>) {
                maps.txout.erase(l.x);
                maps.txout.erase(l.y);
                maps.bind_txout(fresh.names[0], cls.new_outpoints[0]);
                maps.bind_txout(fresh.names[1], cls.new_outpoints[1]);
            } else if constexpr (std::is_same_v<T, GiveLabel>) {
                maps.txout.erase(l.x);
                maps.bind_txout(fresh.names[0], cls.new_outpoints[0]);
                if (cls.counterparty) maps.counterparty_inputs.insert(*cls.counterparty);
            } else if constexpr (std::is_same_v<T, BurnLabel>) {
                for (const Name& x : l.xs) maps.txout.erase(x);
                maps.txburn.erase(l.y);
            }
        },
        label);
}

// The three structural invariants plus map/domain consistency, checked after
// every accepted step.
std::optional<std::string> map_invariant_violation(const Chain& chain, const Configuration& g,
                                                   const CoherenceMaps& maps,
                                                   const std::vector<UserKey>& users) {
    std::set<Name> dep_names;
    for (const Deposit& d : g.deposits) dep_names.insert(d.name);
    for (const auto& [x, o] : maps.txout)
        if (!dep_names.count(x)) return "txout maps " + x + " which is not a deposit";
    for (const Name& x : dep_names)
        if (!maps.txout.count(x)) return "deposit " + x + " has no txout image";

    std::set<Outpoint> images;
    for (const auto& [x, o] : maps.txout)
        if (!images.insert(o).second) return "txout is not injective at " + x;
    std::set<Outpoint> token_images;
    for (const auto& [t, o] : maps.tkid)
        if (!token_images.insert(o).second) return "tkid is not injective at " + t;

    std::set<Outpoint> history;
    for (const auto& [x, o] : maps.txout_history) history.insert(o);

    for (const Deposit& d : g.deposits) {
        const Outpoint& o = maps.txout.at(d.name);
        if (!chain.contains_output(o)) return "txout image of " + d.name + " is not on chain";
        if (chain.is_spent(o)) return "txout image of " + d.name + " is spent";
        const TxOutput& out = chain.resolve(o);
        const Transaction& holder = chain.tx_of(o);
        for (const Outpoint& in : holder.inputs)
            if (!history.count(in) && !maps.counterparty_inputs.count(in))
                return "input " + in.to_string() + " of mapped " + d.name + " was never mapped";
        const UserKey* u = user_by_name(users, d.owner);
        if (!u) return "unknown user " + d.owner;
        if (d.token.is_btc()) {
            auto owner = btc_owner(out);
            if (!owner || *owner != u->public_key)
                return "plain-deposit image of " + d.name + " has wrong owner";
            if (out.val != d.amount)
                return "plain-deposit image of " + d.name + " has wrong value";
        } else {
            auto f = token_fields(out);
            if (!f) return "token-deposit image of " + d.name + " is not a token output";
            if (f->op < 0 || f->op > 5) return "token image of " + d.name + " has bad op";
            auto it = maps.tkid.find(d.token.id);
            if (it == maps.tkid.end()) return "token " + d.token.id + " has no tkid image";
            if (f->tkid != output_digest(chain.tx_of(it->second), it->second.index).to_bytes())
                return "token image of " + d.name + " carries a foreign identifier";
            if (f->owner != u->public_key) return "token image of " + d.name + " has wrong owner";
            if (f->tkval != d.amount) return "token image of " + d.name + " has wrong amount";
            if (out.val != 0) return "token image of " + d.name + " has nonzero value";
        }
    }
    return std::nullopt;
}

}  // namespace

std::string CoherenceReport::summary() const {
    std::ostringstream os;
    os << (verdict ? "coherent" : "INCOHERENT");
    if (!verdict && failed_at) os << " at computational label " << *failed_at << ": " << failure;
    os << " (" << steps.size() << " steps)";
    return os.str();
}

CoherenceReport check_coherence(const SymbolicRun& rs, const ComputationalRun& rc,
                                const CoherenceMaps& m0) {
    CoherenceReport rep;
    auto fail = [&rep](std::size_t idx, const std::string& why) -> CoherenceReport& {
        rep.verdict = false;
        rep.failure = why;
        rep.failed_at = idx;
        return rep;
    };

    try {
        validate_run(rs);
    } catch (const std::exception& e) {
        return fail(0, std::string("invalid symbolic run: ") + e.what());
    }

    if (rc.labels.empty() || !std::holds_alternative<AppendTx>(rc.labels[0]))
        return fail(0, "computational run must begin with a coinbase transaction");
    Chain chain;
    try {
        chain = Chain::genesis(std::get<AppendTx>(rc.labels[0]).tx);
    } catch (const ValidationError& e) {
        return fail(0, std::string("bad coinbase: ") + e.what());
    }

    CoherenceMaps maps = m0;
    if (maps.txout_history.empty()) maps.txout_history = maps.txout;
    if (!maps.tkid.empty()) return fail(0, "base maps must have an empty tkid map");
    if (!maps.txburn.empty()) return fail(0, "base maps must have an empty txburn map");

    // Base case: the initial deposits are exactly the mapped coinbase outputs.
    if (auto why = map_invariant_violation(chain, rs.initial, maps, rc.users))
        return fail(0, "base case: " + *why);
    rep.steps.push_back(StepReport{0, "base", std::nullopt, {}});

    std::size_t s = 0;  // next unconsumed symbolic step
    for (std::size_t i = 1; i < rc.labels.size(); ++i) {
        const Configuration& pre = rs.at(s);
        Ctx ctx{chain, rc.users, pre, maps};

        if (const auto* append = std::get_if<AppendTx>(&rc.labels[i])) {
            const Transaction& tx = append->tx;
            Chain next;
            try {
                next = validate_and_append(chain, tx);
            } catch (const ValidationError& e) {
                return fail(i, std::string("invalid append: ") + e.what());
            }

            TxClass cls;
            try {
                cls = classify_tx(ctx, tx);
            } catch (const ClassifyError& e) {
                return fail(i, e.what());
            }

            if (!cls.is_action()) {
                chain = next;
                rep.steps.push_back(StepReport{i, "case2:transaction", std::nullopt, {}});
                continue;
            }

            if (s >= rs.steps.size())
                return fail(i, "transaction needs a symbolic step (" + cls.item +
                                   ") but the symbolic run is exhausted");
            const Label& label = rs.steps[s].label;
            if (label.is_auth())
                return fail(i, "transaction matches " + cls.item +
                                   " but the next symbolic step is an authorization");
            if (!action_matches(label.action, cls.label))
                return fail(i, "transaction matches " + cls.item + " as " +
                                   print_action(cls.label) + " but the symbolic step is " +
                                   print_action(label.action));

            StepReport sr{i, "case1:" + cls.item, s, {}};
            if (const auto* burn = std::get_if<BurnLabel>(&label.action); burn) {
                auto it = maps.txburn.find(burn->y);
                if (it == maps.txburn.end())
                    return fail(i, "burn destination " + burn->y + " was never announced");
                if (cleared_bytes(it->second) != cleared_bytes(tx))
                    return fail(i, "burn transaction differs from the announced template");
            }

            const Configuration& post = rs.steps[s].config;
            auto fresh = aligned_freshness(pre, post, label);
            if (!fresh) return fail(i, "cannot align fresh names for " + print_label(label));
            apply_action_maps(maps, cls, label.action, *fresh);
            if (std::holds_alternative<GenLabel>(label.action))
                sr.minted.emplace_back(fresh->tokens[0], *cls.token_source);

            chain = next;
            if (auto why = map_invariant_violation(chain, post, maps, rc.users))
                return fail(i, "map invariant broken: " + *why);
            rep.steps.push_back(std::move(sr));
            ++s;
            continue;
        }

        const auto& bc = std::get<Broadcast>(rc.labels[i]);
        std::vector<AuthCand> cands = classify_broadcast(ctx, bc.data);

        bool matched = false;
        if (s < rs.steps.size() && rs.steps[s].label.is_auth()) {
            const Label& label = rs.steps[s].label;
            for (const AuthCand& cand : cands) {
                if (cand.target != label.auth->first || cand.user != label.auth->second) continue;
                if (!action_matches(label.action, cand.action_template)) continue;
                if (const auto* burn = std::get_if<BurnLabel>(&label.action)) {
                    auto it = maps.txburn.find(burn->y);
                    if (it != maps.txburn.end()) {
                        if (cleared_bytes(it->second) != cleared_bytes(cand.template_tx))
                            return fail(i, "burn authorization for " + burn->y +
                                               " references a different template");
                    } else {
                        maps.txburn[burn->y] = cand.template_tx;
                    }
                }
                rep.steps.push_back(
                    StepReport{i, "case1:" + auth_item_tag(label.action), s, {}});
                ++s;
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (!cands.empty())
            return fail(i, "broadcast corresponds to an authorization by " + cands[0].user +
                               " but the symbolic run does not take it");
        rep.steps.push_back(StepReport{i, "case2:broadcast", std::nullopt, {}});
    }

    if (s != rs.steps.size())
        return fail(rc.labels.size(),
                    "symbolic run has " + std::to_string(rs.steps.size() - s) +
                        " step(s) without computational counterparts");

    rep.verdict = true;
    rep.final_maps = maps;
    return rep;
}

// ---------------------------------------------------------------------------
// Reconstruction

namespace {

Name outpoint_name(const Outpoint& o) { return "o:" + o.to_string(); }

std::string token_name(const Outpoint& o) { return "t:" + o.to_string(); }

Name fresh_burn_name(const Transaction& cleared) {
    return "b:" + sha256(cleared_bytes(cleared)).hex().substr(0, 16);
}

}  // namespace

Reconstruction reconstruct(const ComputationalRun& rc, const std::set<User>& honest) {
    (void)honest;
    if (rc.labels.empty() || !std::holds_alternative<AppendTx>(rc.labels[0]))
        throw ReconstructionError(0, "computational run must begin with a coinbase");
    const Transaction& coinbase = std::get<AppendTx>(rc.labels[0]).tx;
    Chain chain;
    try {
        chain = Chain::genesis(coinbase);
    } catch (const ValidationError& e) {
        throw ReconstructionError(0, std::string("bad coinbase: ") + e.what());
    }

    SymbolicRun run;
    Digest cb_id = txid_of(coinbase);
    for (std::size_t i = 0; i < coinbase.outputs.size(); ++i) {
        Outpoint o{cb_id, i + 1};
        auto pk = btc_owner(coinbase.outputs[i]);
        if (!pk) throw ReconstructionError(0, "coinbase output is not a plain deposit");
        const UserKey* u = user_by_key(rc.users, *pk);
        if (!u) throw ReconstructionError(0, "coinbase output owned by an unknown key");
        run.initial.deposits.push_back(
            Deposit{outpoint_name(o), u->name, coinbase.outputs[i].val, TokenId::btc()});
    }
    CoherenceMaps m0 = base_maps(run.initial, coinbase);
    CoherenceMaps maps = m0;

    Configuration config = run.initial;
    for (std::size_t i = 1; i < rc.labels.size(); ++i) {
        Ctx ctx{chain, rc.users, config, maps};

        if (const auto* append = std::get_if<AppendTx>(&rc.labels[i])) {
            const Transaction& tx = append->tx;
            Chain next;
            try {
                next = validate_and_append(chain, tx);
            } catch (const ValidationError& e) {
                throw ReconstructionError(i, std::string("invalid append: ") + e.what());
            }
            TxClass cls;
            try {
                cls = classify_tx(ctx, tx);
            } catch (const ClassifyError& e) {
                throw ReconstructionError(i, e.what());
            }
            if (!cls.is_action()) {
                chain = next;
                continue;
            }

            ActionLabel al = cls.label;
            if (auto* burn = std::get_if<BurnLabel>(&al)) {
                auto y = txburn_lookup(maps, tx);
                if (!y) throw ReconstructionError(i, "burn transaction was never announced");
                burn->y = *y;
            }

            Freshness fresh;
            for (const Outpoint& o : cls.new_outpoints) fresh.names.push_back(outpoint_name(o));
            if (cls.token_source) fresh.tokens.push_back(token_name(*cls.token_source));

            Configuration post;
            try {
                post = step(config, action(al), fresh);
            } catch (const StepError& e) {
                throw ReconstructionError(i, std::string("symbolic step failed: ") + e.what());
            }
            apply_action_maps(maps, cls, al, fresh);
            run.steps.push_back(SymbolicRun::Step{action(al), post});
            config = std::move(post);
            chain = next;
            continue;
        }

        const auto& bc = std::get<Broadcast>(rc.labels[i]);
        std::vector<AuthCand> cands = classify_broadcast(ctx, bc.data);
        if (cands.empty()) continue;  // inductive case 2

        // Prefer a candidate whose authorization is not yet granted, so that
        // repeated identical broadcasts (one per co-signer) cover distinct
        // targets.
        const AuthCand* pick = nullptr;
        for (const AuthCand& cand : cands) {
            ActionLabel al = cand.action_template;
            if (auto* burn = std::get_if<BurnLabel>(&al)) {
                auto y = txburn_lookup(maps, cand.template_tx);
                burn->y = y ? *y : fresh_burn_name(cand.template_tx);
            }
            if (config.count_auth(cand.target, cand.user, al) == 0) {
                pick = &cand;
                break;
            }
        }
        if (!pick) pick = &cands[0];

        ActionLabel al = pick->action_template;
        if (auto* burn = std::get_if<BurnLabel>(&al)) {
            auto y = txburn_lookup(maps, pick->template_tx);
            if (y) {
                burn->y = *y;
            } else {
                burn->y = fresh_burn_name(pick->template_tx);
                maps.txburn[burn->y] = pick->template_tx;
            }
        }
        Label label = authorization(pick->target, pick->user, al);
        Configuration post;
        try {
            post = step(config, label, Freshness{});
        } catch (const StepError& e) {
            throw ReconstructionError(i, std::string("authorization step failed: ") + e.what());
        }
        run.steps.push_back(SymbolicRun::Step{label, post});
        config = std::move(post);
    }

    CoherenceReport rep = check_coherence(run, rc, m0);
    if (!rep.verdict)
        throw ReconstructionError(rep.failed_at.value_or(rc.labels.size()),
                                  "reconstructed run is not coherent: " + rep.failure);
    return Reconstruction{std::move(run), rep.final_maps, std::move(rep)};
}

// ---------------------------------------------------------------------------
// Lemma and theorem checks

LemmaReport lemma_s_to_c_check(const SymbolicRun& rs, const ComputationalRun& rc,
                               const CoherenceMaps& maps) {
    Chain chain = derive_chain(rc);
    const Configuration& final = rs.last();
    std::set<Outpoint> seen;
    for (const Deposit& d : final.deposits) {
        auto it = maps.txout.find(d.name);
        if (it == maps.txout.end()) return {false, "deposit " + d.name + " has no txout image"};
        const Outpoint& o = it->second;
        if (!seen.insert(o).second)
            return {false, "txout image " + o.to_string() + " is not distinct"};
        if (!chain.contains_output(o) || chain.is_spent(o))
            return {false, "image of " + d.name + " is not an unspent output"};
        const TxOutput& out = chain.resolve(o);
        const UserKey* u = user_by_name(rc.users, d.owner);
        if (!u) return {false, "unknown user " + d.owner};
        if (d.token.is_btc()) {
            auto owner = btc_owner(out);
            if (!owner || *owner != u->public_key || out.val != d.amount)
                return {false, "image of " + d.name + " does not store " + d.amount.str() +
                                   " bitcoins for " + d.owner};
        } else {
            auto f = token_fields(out);
            auto tk = maps.tkid.find(d.token.id);
            if (!f || tk == maps.tkid.end())
                return {false, "image of " + d.name + " is not a token output"};
            if (f->owner != u->public_key || f->tkval != d.amount ||
                f->tkid != outpoint_digest(chain, tk->second).to_bytes())
                return {false, "image of " + d.name + " does not store " + d.amount.str() + ":" +
                                   d.token.id + " for " + d.owner};
        }
        if (!is_spendable(chain, o))
            return {false, "image of " + d.name + " is not spendable"};
    }
    return {true, ""};
}

LemmaReport lemma_c_to_s_check(const SymbolicRun& rs, const ComputationalRun& rc,
                               const CoherenceMaps& maps) {
    Chain chain = derive_chain(rc);
    const Configuration& final = rs.last();

    // Digests of every output on the chain, and of the minted tokens' images.
    std::set<Bytes> on_chain;
    for (std::size_t p = 0; p < chain.size(); ++p) {
        const Transaction& tx = chain.tx_at(p);
        for (std::uint64_t j = 1; j <= tx.outputs.size(); ++j)
            on_chain.insert(output_digest(tx, j).to_bytes());
    }
    std::map<Bytes, std::string> minted;  // tkid digest -> token
    for (const auto& [t, o] : maps.tkid)
        minted.emplace(outpoint_digest(chain, o).to_bytes(), t);

    std::set<Outpoint> mapped_outputs;
    std::map<Outpoint, Name> by_output;
    for (const auto& [x, o] : maps.txout) {
        mapped_outputs.insert(o);
        by_output.emplace(o, x);
    }

    for (const Outpoint& o : chain.utxo()) {
        auto f = token_fields(chain.resolve(o));
        if (!f) continue;
        bool spendable = is_spendable(chain, o);
        if (!on_chain.count(f->tkid)) {
            if (spendable)
                return {false, o.to_string() + " carries a dangling identifier yet is spendable"};
            continue;
        }
        auto mint = minted.find(f->tkid);
        if (mint == minted.end()) continue;  // identifier of an unminted output: no claim
        if (!mapped_outputs.count(o)) {
            if (spendable)
                return {false, o.to_string() + " is a forged unit of " + mint->second +
                                   " yet is spendable"};
            continue;
        }
        if (!spendable) return {false, "mapped output " + o.to_string() + " is unspendable"};
        const Name& y = by_output.at(o);
        const Deposit* d = final.find(y);
        if (!d) return {false, "mapped output " + o.to_string() + " has no deposit"};
        const UserKey* u = user_by_name(rc.users, d->owner);
        if (!u || f->owner != u->public_key)
            return {false, "deposit " + y + " owner does not match output " + o.to_string()};
        if (d->token.id != mint->second || d->amount != f->tkval)
            return {false, "deposit " + y + " does not match output " + o.to_string()};
    }
    return {true, ""};
}

LemmaReport theorem_balance_check(const SymbolicRun& rs, const ComputationalRun& rc,
                                  const CoherenceMaps& maps) {
    Chain chain = derive_chain(rc);
    for (const auto& [t, o] : maps.tkid) {
        BigInt symbolic = tokval_s(TokenId{t}, rs.last());
        BigInt computational = tokval_c(chain, o);
        if (symbolic != computational)
            return {false, "token " + t + ": symbolic balance " + symbolic.str() +
                               " != computational balance " + computational.str()};
    }
    return {true, ""};
}

}  // namespace covtok
