// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "covtok/harness.hpp"

#include <algorithm>
#include <random>

namespace covtok {

using nlohmann::json;

// ---------------------------------------------------------------------------
// JSON forms

namespace {

json atom_to_json(const Atom& a) {
    if (is_int(a)) return json{{"i", as_int(a).str()}};
    return json{{"b", to_hex(as_bytes(a))}};
}

Atom atom_from_json(const json& j) {
    if (j.contains("i")) return Atom(BigInt(j.at("i").get<std::string>()));
    return Atom(from_hex(j.at("b").get<std::string>()));
}

json atoms_to_json(const std::vector<Atom>& atoms) {
    json out = json::array();
    for (const Atom& a : atoms) out.push_back(atom_to_json(a));
    return out;
}

std::vector<Atom> atoms_from_json(const json& j) {
    std::vector<Atom> out;
    for (const json& a : j) out.push_back(atom_from_json(a));
    return out;
}

json outpoint_to_json(const Outpoint& o) {
    return json{{"txid", o.txid.hex()}, {"index", o.index}};
}

Outpoint outpoint_from_json(const json& j) {
    return Outpoint{Digest::from_hex(j.at("txid").get<std::string>()),
                    j.at("index").get<std::uint64_t>()};
}

}  // namespace

json tx_to_json(const Transaction& tx) {
    json in = json::array();
    for (const Outpoint& o : tx.inputs) in.push_back(outpoint_to_json(o));
    json wit = json::array();
    for (const auto& w : tx.witnesses) wit.push_back(atoms_to_json(w));
    json out = json::array();
    for (const TxOutput& o : tx.outputs)
        out.push_back(json{{"arg", atoms_to_json(o.arg)},
                           {"scr", print_script(o.scr)},
                           {"val", o.val.str()}});
    return json{{"in", in}, {"wit", wit}, {"out", out}};
}

Transaction tx_from_json(const json& j) {
    Transaction tx;
    for (const json& o : j.at("in")) tx.inputs.push_back(outpoint_from_json(o));
    for (const json& w : j.at("wit")) tx.witnesses.push_back(atoms_from_json(w));
    for (const json& o : j.at("out")) {
        TxOutput out;
        out.arg = atoms_from_json(o.at("arg"));
        out.scr = intern_script(parse_script(o.at("scr").get<std::string>()));
        out.val = BigInt(o.at("val").get<std::string>());
        tx.outputs.push_back(std::move(out));
    }
    return tx;
}

json chain_to_json(const Chain& chain) {
    json txs = json::array();
    for (std::size_t i = 0; i < chain.size(); ++i) txs.push_back(tx_to_json(chain.tx_at(i)));
    return json{{"txs", txs}};
}

Chain chain_from_json(const json& j) {
    const json& txs = j.at("txs");
    if (txs.empty()) throw std::invalid_argument("chain without a coinbase");
    Chain chain = Chain::genesis(tx_from_json(txs[0]));
    for (std::size_t i = 1; i < txs.size(); ++i)
        chain = validate_and_append(chain, tx_from_json(txs[i]));
    return chain;
}

namespace {

json action_to_json(const ActionLabel& a) {
    return std::visit(
        [](const auto& l) -> json {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, GenLabel>) {
                return json{{"kind", "gen"}, {"x", l.x}, {"v", l.v.str()}};
            } else if constexpr (std::is_same_v<T, BurnLabel>) {
                return json{{"kind", "burn"}, {"xs", l.xs}, {"y", l.y}};
            } else if constexpr (std::is_same_v<T, SplitLabel>) {
                return json{{"kind", "split"}, {"x", l.x}, {"v", l.v.str()}, {"to", l.recipient}};
            } else if constexpr (std::is_same_v<T, JoinLabel>) {
                return json{{"kind", "join"}, {"x", l.x}, {"y", l.y}, {"to", l.recipient}};
            } else if constexpr (std::is_same_v<T, XchgLabel>) {
                return json{{"kind", "xchg"}, {"x", l.x}, {"y", l.y}};
            } else {
                return json{{"kind", "give"}, {"x", l.x}, {"to", l.recipient}};
            }
        },
        a);
}

ActionLabel action_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "gen") return GenLabel{j.at("x"), BigInt(j.at("v").get<std::string>())};
    if (kind == "burn") return BurnLabel{j.at("xs").get<std::vector<Name>>(), j.at("y")};
    if (kind == "split")
        return SplitLabel{j.at("x"), BigInt(j.at("v").get<std::string>()), j.at("to")};
    if (kind == "join") return JoinLabel{j.at("x"), j.at("y"), j.at("to")};
    if (kind == "xchg") return XchgLabel{j.at("x"), j.at("y")};
    if (kind == "give") return GiveLabel{j.at("x"), j.at("to")};
    throw std::invalid_argument("unknown action kind " + kind);
}

}  // namespace

json label_to_json(const Label& l) {
    json j = action_to_json(l.action);
    if (l.is_auth()) j["auth"] = json{{"target", l.auth->first}, {"user", l.auth->second}};
    return j;
}

Label label_from_json(const json& j) {
    ActionLabel a = action_from_json(j);
    if (j.contains("auth"))
        return authorization(j.at("auth").at("target"), j.at("auth").at("user"), std::move(a));
    return action(std::move(a));
}

json config_to_json(const Configuration& g) {
    json deposits = json::array();
    for (const Deposit& d : g.deposits)
        deposits.push_back(json{{"name", d.name},
                                {"owner", d.owner},
                                {"amount", d.amount.str()},
                                {"token", d.token.id}});
    json auths = json::array();
    for (const Authorization& a : g.auths)
        auths.push_back(
            json{{"target", a.target}, {"user", a.user}, {"action", action_to_json(a.action)}});
    return json{{"deposits", deposits}, {"auths", auths}};
}

Configuration config_from_json(const json& j) {
    Configuration g;
    for (const json& d : j.at("deposits"))
        g.deposits.push_back(Deposit{d.at("name"), d.at("owner"),
                                     BigInt(d.at("amount").get<std::string>()),
                                     TokenId{d.at("token")}});
    for (const json& a : j.at("auths"))
        g.auths.push_back(Authorization{a.at("target"), a.at("user"),
                                        action_from_json(a.at("action"))});
    return g;
}

namespace {

json run_to_json(const SymbolicRun& run) {
    json steps = json::array();
    for (const auto& s : run.steps)
        steps.push_back(json{{"label", label_to_json(s.label)}, {"config", config_to_json(s.config)}});
    return json{{"initial", config_to_json(run.initial)}, {"steps", steps}};
}

SymbolicRun run_from_json(const json& j) {
    SymbolicRun run;
    run.initial = config_from_json(j.at("initial"));
    for (const json& s : j.at("steps"))
        run.steps.push_back(
            SymbolicRun::Step{label_from_json(s.at("label")), config_from_json(s.at("config"))});
    return run;
}

json comp_to_json(const ComputationalRun& rc) {
    json users = json::array();
    for (const UserKey& u : rc.users)
        users.push_back(json{{"name", u.name}, {"pk", to_hex(u.public_key)}});
    json labels = json::array();
    for (const CompLabel& l : rc.labels) {
        if (const auto* a = std::get_if<AppendTx>(&l))
            labels.push_back(json{{"type", "append"}, {"tx", tx_to_json(a->tx)}});
        else {
            const auto& b = std::get<Broadcast>(l);
            labels.push_back(
                json{{"type", "broadcast"}, {"from", b.from}, {"data", to_hex(b.data)}});
        }
    }
    return json{{"users", users}, {"labels", labels}};
}

ComputationalRun comp_from_json(const json& j) {
    ComputationalRun rc;
    for (const json& u : j.at("users"))
        rc.users.push_back(UserKey{u.at("name"), from_hex(u.at("pk").get<std::string>())});
    for (const json& l : j.at("labels")) {
        if (l.at("type") == "append")
            rc.labels.push_back(AppendTx{tx_from_json(l.at("tx"))});
        else
            rc.labels.push_back(Broadcast{l.at("from"), from_hex(l.at("data").get<std::string>())});
    }
    return rc;
}

json maps_to_json(const CoherenceMaps& m) {
    json txout = json::object(), tkid = json::object(), txburn = json::object(),
         hist = json::object();
    for (const auto& [x, o] : m.txout) txout[x] = outpoint_to_json(o);
    for (const auto& [t, o] : m.tkid) tkid[t] = outpoint_to_json(o);
    for (const auto& [y, t] : m.txburn) txburn[y] = tx_to_json(t);
    for (const auto& [x, o] : m.txout_history) hist[x] = outpoint_to_json(o);
    json cp = json::array();
    for (const Outpoint& o : m.counterparty_inputs) cp.push_back(outpoint_to_json(o));
    return json{{"txout", txout},
                {"tkid", tkid},
                {"txburn", txburn},
                {"txout_history", hist},
                {"counterparty_inputs", cp}};
}

CoherenceMaps maps_from_json(const json& j) {
    CoherenceMaps m;
    for (auto it = j.at("txout").begin(); it != j.at("txout").end(); ++it)
        m.txout[it.key()] = outpoint_from_json(it.value());
    for (auto it = j.at("tkid").begin(); it != j.at("tkid").end(); ++it)
        m.tkid[it.key()] = outpoint_from_json(it.value());
    for (auto it = j.at("txburn").begin(); it != j.at("txburn").end(); ++it)
        m.txburn[it.key()] = tx_from_json(it.value());
    for (auto it = j.at("txout_history").begin(); it != j.at("txout_history").end(); ++it)
        m.txout_history[it.key()] = outpoint_from_json(it.value());
    for (const json& o : j.at("counterparty_inputs")) m.counterparty_inputs.insert(outpoint_from_json(o));
    return m;
}

json lemma_to_json(const LemmaReport& r) { return json{{"ok", r.ok}, {"detail", r.detail}}; }

LemmaReport lemma_from_json(const json& j) {
    return LemmaReport{j.at("ok").get<bool>(), j.at("detail").get<std::string>()};
}

json coherence_to_json(const CoherenceReport& r) {
    json steps = json::array();
    for (const StepReport& s : r.steps) {
        json js{{"comp_index", s.comp_index}, {"matched", s.matched}};
        if (s.sym_index) js["sym_index"] = *s.sym_index;
        if (!s.minted.empty()) {
            json m = json::array();
            for (const auto& [t, o] : s.minted)
                m.push_back(json{{"token", t}, {"outpoint", outpoint_to_json(o)}});
            js["minted"] = m;
        }
        steps.push_back(std::move(js));
    }
    json j{{"verdict", r.verdict}, {"steps", steps}};
    if (!r.verdict) {
        j["failure"] = r.failure;
        if (r.failed_at) j["failed_at"] = *r.failed_at;
    }
    return j;
}

CoherenceReport coherence_from_json(const json& j) {
    CoherenceReport r;
    r.verdict = j.at("verdict").get<bool>();
    for (const json& s : j.at("steps")) {
        StepReport sr;
        sr.comp_index = s.at("comp_index").get<std::size_t>();
        sr.matched = s.at("matched").get<std::string>();
        if (s.contains("sym_index")) sr.sym_index = s.at("sym_index").get<std::size_t>();
        if (s.contains("minted"))
            for (const json& m : s.at("minted"))
                sr.minted.emplace_back(m.at("token").get<std::string>(),
                                       outpoint_from_json(m.at("outpoint")));
        r.steps.push_back(std::move(sr));
    }
    if (j.contains("failure")) r.failure = j.at("failure").get<std::string>();
    if (j.contains("failed_at")) r.failed_at = j.at("failed_at").get<std::size_t>();
    return r;
}

}  // namespace

json scenario_to_json(const Scenario& s) {
    json coinbase = json::array();
    for (const CoinbaseEntry& e : s.coinbase)
        coinbase.push_back(json{{"name", e.name}, {"user", e.user}, {"val", e.val.str()}});
    json moves = json::array();
    for (const Move& m : s.moves) {
        json jm{{"do", m.kind}};
        if (!m.actor.empty()) jm["actor"] = m.actor;
        if (m.deposits.size() == 1) jm["deposit"] = m.deposits[0];
        else if (!m.deposits.empty()) jm["deposits"] = m.deposits;
        if (m.amount != 0) jm["units"] = m.amount.str();
        if (!m.recipient.empty()) jm["to"] = m.recipient;
        if (!m.out_names.empty()) jm["names"] = m.out_names;
        if (!m.token_name.empty()) jm["token"] = m.token_name;
        if (!m.burn_name.empty()) jm["burn-name"] = m.burn_name;
        moves.push_back(std::move(jm));
    }
    return json{{"name", s.name}, {"users", s.users}, {"coinbase", coinbase}, {"moves", moves}};
}

Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.name = j.value("name", "scenario");
    s.users = j.at("users").get<std::vector<User>>();
    for (const json& e : j.at("coinbase"))
        s.coinbase.push_back(
            CoinbaseEntry{e.at("name"), e.at("user"), BigInt(e.at("val").get<std::string>())});
    for (const json& jm : j.at("moves")) {
        Move m;
        m.kind = jm.at("do").get<std::string>();
        m.actor = jm.value("actor", "");
        if (jm.contains("deposit")) m.deposits = {jm.at("deposit").get<Name>()};
        else if (jm.contains("deposits")) m.deposits = jm.at("deposits").get<std::vector<Name>>();
        if (jm.contains("units")) m.amount = BigInt(jm.at("units").get<std::string>());
        m.recipient = jm.value("to", "");
        if (jm.contains("names")) m.out_names = jm.at("names").get<std::vector<Name>>();
        m.token_name = jm.value("token", "");
        m.burn_name = jm.value("burn-name", "");
        s.moves.push_back(std::move(m));
    }
    return s;
}

json bundle_to_json(const RunBundle& b) {
    json rejected = json::array();
    for (const RejectedTx& r : b.rejected)
        rejected.push_back(json{{"reason", r.reason}, {"note", r.note}, {"tx", tx_to_json(r.tx)}});
    return json{{"format", "covtok-bundle-v1"},
                {"scenario", b.scenario_name},
                {"seed", b.seed},
                {"symbolic", run_to_json(b.symbolic)},
                {"computational", comp_to_json(b.computational)},
                {"maps0", maps_to_json(b.maps0)},
                {"final_maps", maps_to_json(b.final_maps)},
                {"rejected", rejected},
                {"reports",
                 json{{"coherence", coherence_to_json(b.coherence)},
                      {"lemma_s_to_c", lemma_to_json(b.s_to_c)},
                      {"lemma_c_to_s", lemma_to_json(b.c_to_s)},
                      {"balance", lemma_to_json(b.balance)}}}};
}

RunBundle bundle_from_json(const json& j) {
    if (j.value("format", "") != "covtok-bundle-v1")
        throw std::invalid_argument("not a covtok bundle");
    RunBundle b;
    b.scenario_name = j.at("scenario").get<std::string>();
    b.seed = j.at("seed").get<std::uint64_t>();
    b.symbolic = run_from_json(j.at("symbolic"));
    b.computational = comp_from_json(j.at("computational"));
    b.users = b.computational.users;
    b.maps0 = maps_from_json(j.at("maps0"));
    b.final_maps = maps_from_json(j.at("final_maps"));
    for (const json& r : j.at("rejected"))
        b.rejected.push_back(RejectedTx{r.at("reason"), r.at("note"), tx_from_json(r.at("tx"))});
    const json& reports = j.at("reports");
    b.coherence = coherence_from_json(reports.at("coherence"));
    b.s_to_c = lemma_from_json(reports.at("lemma_s_to_c"));
    b.c_to_s = lemma_from_json(reports.at("lemma_c_to_s"));
    b.balance = lemma_from_json(reports.at("balance"));
    return b;
}

// ---------------------------------------------------------------------------
// Scenario execution

namespace {

std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n) { return n ? rng() % n : 0; }

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
    Bytes out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(rng() & 0xff));
    return out;
}

struct HarnessError : std::runtime_error {
    explicit HarnessError(const std::string& what) : std::runtime_error(what) {}
};

// Detached adversary funds use a literal-key signature script: satisfiable
// by the adversary but outside the two standard deposit shapes, so such
// transactions never match an action item and stay symbolically invisible.
TxOutput junk_output(const Bytes& pk, const BigInt& val) {
    return TxOutput{{Atom(pk)}, sc_versig(sc_bytes(pk), sc_rtx_wit()), val};
}

struct Harness {
    std::vector<UserKey> users;
    std::map<User, KeyPair> keys;
    Chain chain;
    SymbolicRun run;
    Configuration config;
    std::vector<CompLabel> labels;
    std::vector<RejectedTx> rejected;
    std::map<Name, Outpoint> where;              // deposit name -> unspent output
    std::map<std::string, Outpoint> token_out;   // token id -> minting source output
    std::vector<std::pair<Outpoint, User>> junk_btc;    // unmapped plain outputs
    std::vector<std::pair<Outpoint, User>> junk_token;  // unmapped self-minted tokens
    std::mt19937_64 rng;
    std::size_t name_n = 0, token_n = 0, burn_n = 0;
    std::set<Name> used_names;
    std::set<std::string> used_tokens;

    void init(const std::vector<User>& user_names, const std::vector<CoinbaseEntry>& coinbase,
              std::uint64_t seed) {
        rng.seed(seed);
        for (const User& u : user_names) {
            KeyPair kp = KeyPair::from_name(u);
            users.push_back(UserKey{u, kp.public_key});
            keys.emplace(u, std::move(kp));
        }
        std::vector<std::pair<Bytes, BigInt>> alloc;
        for (const CoinbaseEntry& e : coinbase) {
            if (!keys.count(e.user)) throw HarnessError("unknown user " + e.user);
            alloc.emplace_back(keys.at(e.user).public_key, e.val);
        }
        Transaction cb = make_coinbase(alloc);
        chain = Chain::genesis(cb);
        labels.push_back(AppendTx{cb});
        Digest id = txid_of(cb);
        for (std::size_t i = 0; i < coinbase.size(); ++i) {
            const CoinbaseEntry& e = coinbase[i];
            if (used_names.count(e.name)) throw HarnessError("duplicate name " + e.name);
            used_names.insert(e.name);
            run.initial.deposits.push_back(Deposit{e.name, e.user, e.val, TokenId::btc()});
            where.emplace(e.name, Outpoint{id, i + 1});
        }
        config = run.initial;
    }

    const KeyPair& key(const User& u) {
        auto it = keys.find(u);
        if (it == keys.end()) throw HarnessError("unknown user " + u);
        return it->second;
    }

    Bytes pk(const User& u) { return key(u).public_key; }

    const Deposit& deposit(const Name& x) {
        const Deposit* d = config.find(x);
        if (!d) throw HarnessError("no deposit named " + x);
        return *d;
    }

    Name fresh_name(const std::vector<Name>& declared, std::size_t slot) {
        if (slot < declared.size()) {
            if (used_names.count(declared[slot]))
                throw HarnessError("declared name " + declared[slot] + " is not fresh");
            used_names.insert(declared[slot]);
            return declared[slot];
        }
        Name n;
        do n = "x" + std::to_string(++name_n);
        while (used_names.count(n));
        used_names.insert(n);
        return n;
    }

    std::string fresh_token(const std::string& declared) {
        if (!declared.empty()) {
            if (used_tokens.count(declared) || declared == "BTC")
                throw HarnessError("declared token " + declared + " is not fresh");
            used_tokens.insert(declared);
            return declared;
        }
        std::string t;
        do t = "t" + std::to_string(++token_n);
        while (used_tokens.count(t));
        used_tokens.insert(t);
        return t;
    }

    Name fresh_burn_name(const Name& declared) {
        if (!declared.empty()) {
            if (used_names.count(declared))
                throw HarnessError("declared burn name " + declared + " is not fresh");
            used_names.insert(declared);
            return declared;
        }
        Name n;
        do n = "y" + std::to_string(++burn_n);
        while (used_names.count(n));
        used_names.insert(n);
        return n;
    }

    void sym_step(const Label& l, const Freshness& fresh) {
        Configuration next = step(config, l, fresh);
        run.steps.push_back(SymbolicRun::Step{l, next});
        config = std::move(next);
    }

    void broadcast_auth(const User& signer, const Transaction& tx, const Name& target,
                        const ActionLabel& a) {
        labels.push_back(
            Broadcast{signer, encode_auth_message(make_auth_message(key(signer), tx))});
        sym_step(authorization(target, signer, a), Freshness{});
    }

    // A broadcast with no symbolic counterpart (witnesses of case-2
    // transactions, impersonation attempts, junk).
    void broadcast_plain(const User& signer, const Transaction& tx) {
        labels.push_back(
            Broadcast{signer, encode_auth_message(make_auth_message(key(signer), tx))});
    }

    void append(const Transaction& tx) {
        chain = validate_and_append(chain, tx);
        labels.push_back(AppendTx{tx});
    }

    Outpoint out_of(const Transaction& tx, std::uint64_t i) { return Outpoint{txid_of(tx), i}; }

    // ---- honest moves ----

    void do_gen(const Move& m) {
        const Name& x = m.deposits.at(0);
        const Deposit& d = deposit(x);
        Transaction tx = build_gen(chain, where.at(x), m.amount, key(d.owner));
        ActionLabel a = GenLabel{x, m.amount};
        broadcast_auth(d.owner, tx, x, a);
        append(tx);
        Name y = fresh_name(m.out_names, 0);
        std::string t = fresh_token(m.token_name);
        Outpoint src = where.at(x);
        sym_step(action(a), Freshness{{y}, {t}});
        where.erase(x);
        where.emplace(y, out_of(tx, 1));
        token_out.emplace(t, src);
    }

    void do_split(const Move& m) {
        const Name& x = m.deposits.at(0);
        const Deposit& d = deposit(x);
        Transaction tx = build_split(chain, where.at(x), m.amount, pk(m.recipient), key(d.owner));
        ActionLabel a = SplitLabel{x, m.amount, m.recipient};
        broadcast_auth(d.owner, tx, x, a);
        append(tx);
        Name y1 = fresh_name(m.out_names, 0);
        Name y2 = fresh_name(m.out_names, 1);
        sym_step(action(a), Freshness{{y1, y2}, {}});
        where.erase(x);
        where.emplace(y1, out_of(tx, 1));
        where.emplace(y2, out_of(tx, 2));
    }

    void do_give(const Move& m) {
        const Name& x = m.deposits.at(0);
        const Deposit& d = deposit(x);
        Transaction tx = build_give(chain, where.at(x), pk(m.recipient), key(d.owner));
        ActionLabel a = GiveLabel{x, m.recipient};
        broadcast_auth(d.owner, tx, x, a);
        append(tx);
        Name y = fresh_name(m.out_names, 0);
        sym_step(action(a), Freshness{{y}, {}});
        where.erase(x);
        where.emplace(y, out_of(tx, 1));
    }

    void do_join(const Move& m) {
        const Name& x = m.deposits.at(0);
        const Name& y = m.deposits.at(1);
        // Copies: the configuration is reassigned by every symbolic step,
        // invalidating deposit references.
        User ox = deposit(x).owner;
        User oy = deposit(y).owner;
        Transaction tx =
            build_join(chain, where.at(x), where.at(y), pk(m.recipient), key(ox), key(oy));
        ActionLabel a = JoinLabel{x, y, m.recipient};
        broadcast_auth(ox, tx, x, a);
        broadcast_auth(oy, tx, y, a);
        append(tx);
        Name z = fresh_name(m.out_names, 0);
        sym_step(action(a), Freshness{{z}, {}});
        where.erase(x);
        where.erase(y);
        where.emplace(z, out_of(tx, 1));
    }

    void do_xchg(const Move& m) {
        const Name& x = m.deposits.at(0);
        const Name& y = m.deposits.at(1);
        User ox = deposit(x).owner;
        User oy = deposit(y).owner;
        Transaction tx = build_xchg(chain, where.at(x), where.at(y), key(ox), key(oy));
        ActionLabel a = XchgLabel{x, y};
        broadcast_auth(ox, tx, x, a);
        broadcast_auth(oy, tx, y, a);
        append(tx);
        Name x2 = fresh_name(m.out_names, 0);
        Name y2 = fresh_name(m.out_names, 1);
        sym_step(action(a), Freshness{{x2, y2}, {}});
        where.erase(x);
        where.erase(y);
        where.emplace(x2, out_of(tx, 2));  // the counter-asset lands on output 2
        where.emplace(y2, out_of(tx, 1));
    }

    void do_burn(const Move& m) {
        std::vector<Outpoint> outs;
        std::vector<KeyPair> signer_keys;
        for (const Name& x : m.deposits) {
            outs.push_back(where.at(x));
            signer_keys.push_back(key(deposit(x).owner));
        }
        Transaction tx = build_burn(chain, outs, signer_keys);
        Name y = fresh_burn_name(m.burn_name);
        ActionLabel a = BurnLabel{m.deposits, y};
        for (const Name& x : m.deposits) broadcast_auth(deposit(x).owner, tx, x, a);
        append(tx);
        sym_step(action(a), Freshness{});
        for (const Name& x : m.deposits) where.erase(x);
    }

    // ---- adversary directives ----

    // Spends the adversary's own plain deposit into a token output claiming
    // an existing token's identifier (or a dangling one). Symbolically a
    // burn; the forged output is unmapped and unspendable.
    void do_forge(const Move& m) {
        const Name& x = m.deposits.at(0);
        const Deposit& d = deposit(x);
        if (d.owner != m.actor) throw HarnessError("forge-token must spend the actor's deposit");
        Bytes tkid;
        if (!m.token_name.empty() && token_out.count(m.token_name))
            tkid = outpoint_digest(chain, token_out.at(m.token_name)).to_bytes();
        else
            tkid = random_bytes(rng, 32);
        BigInt units = m.amount != 0 ? m.amount : BigInt(10);

        Transaction tx;
        tx.inputs = {where.at(x)};
        tx.outputs = {make_token_output(op::gen, pk(m.actor), units, tkid)};
        tx.witnesses = {{Atom(sign_tx(key(m.actor), tx))}};

        Name y = fresh_burn_name("");
        ActionLabel a = BurnLabel{{x}, y};
        broadcast_auth(m.actor, tx, x, a);
        append(tx);
        sym_step(action(a), Freshness{});
        where.erase(x);
    }

    // Spends the adversary's own funds into fresh unmapped outputs: their
    // mapped deposit (symbolically a burn) or previously detached junk
    // (no symbolic step at all).
    void do_arbitrary_spend(const Move& m) {
        for (std::size_t i = 0; i < junk_btc.size(); ++i) {
            if (junk_btc[i].second != m.actor) continue;
            Outpoint j = junk_btc[i].first;
            BigInt val = chain.resolve(j).val;
            Transaction tx;
            tx.inputs = {j};
            tx.outputs = {junk_output(pk(m.actor), val), junk_output(pk(m.actor), 0)};
            tx.witnesses = {{Atom(sign_tx(key(m.actor), tx))}};
            broadcast_plain(m.actor, tx);
            append(tx);
            junk_btc.erase(junk_btc.begin() + static_cast<std::ptrdiff_t>(i));
            junk_btc.emplace_back(out_of(tx, 1), m.actor);
            junk_btc.emplace_back(out_of(tx, 2), m.actor);
            return;
        }
        // No junk yet: detach a mapped deposit (burn).
        Name x = m.deposits.empty() ? Name{} : m.deposits[0];
        if (x.empty()) {
            for (const Deposit& d : config.deposits)
                if (d.owner == m.actor && d.token.is_btc()) {
                    x = d.name;
                    break;
                }
        }
        if (x.empty()) return;  // nothing to spend
        const Deposit& d = deposit(x);
        if (d.owner != m.actor || !d.token.is_btc())
            throw HarnessError("arbitrary-spend needs the actor's own plain deposit");
        Transaction tx;
        tx.inputs = {where.at(x)};
        tx.outputs = {junk_output(pk(m.actor), d.amount), junk_output(pk(m.actor), 0)};
        tx.witnesses = {{Atom(sign_tx(key(m.actor), tx))}};
        Name y = fresh_burn_name("");
        ActionLabel a = BurnLabel{{x}, y};
        broadcast_auth(m.actor, tx, x, a);
        append(tx);
        sym_step(action(a), Freshness{});
        where.erase(x);
        junk_btc.emplace_back(out_of(tx, 1), m.actor);
        junk_btc.emplace_back(out_of(tx, 2), m.actor);
    }

    // Mints a token from a detached zero-valued output; the whole
    // transaction is invisible symbolically, yet its output is spendable.
    bool do_self_mint(const Move& m) {
        for (std::size_t i = 0; i < junk_btc.size(); ++i) {
            if (junk_btc[i].second != m.actor) continue;
            Outpoint j = junk_btc[i].first;
            if (chain.resolve(j).val != 0) continue;
            BigInt units = m.amount != 0 ? m.amount : BigInt(1 + rand_below(rng, 9));
            Transaction tx;
            tx.inputs = {j};
            tx.outputs = {make_token_output(op::gen, pk(m.actor), units,
                                            outpoint_digest(chain, j).to_bytes())};
            tx.witnesses = {{Atom(sign_tx(key(m.actor), tx))}};
            broadcast_plain(m.actor, tx);
            append(tx);
            junk_btc.erase(junk_btc.begin() + static_cast<std::ptrdiff_t>(i));
            junk_token.emplace_back(out_of(tx, 1), m.actor);
            return true;
        }
        return false;
    }

    // An exchange-shaped transaction between an honest token deposit and an
    // unmapped adversary asset; symbolically a plain give.
    bool do_xchg_unmapped(const Move& m) {
        Name x = m.deposits.empty() ? Name{} : m.deposits[0];
        if (x.empty()) {
            for (const Deposit& d : config.deposits)
                if (!d.token.is_btc() && d.owner != m.actor) {
                    x = d.name;
                    break;
                }
        }
        if (x.empty()) return false;
        const Deposit& d = deposit(x);
        if (d.token.is_btc()) throw HarnessError("xchg-unmapped needs a token deposit");
        auto fx = token_fields(chain.resolve(where.at(x)));
        if (!fx) throw HarnessError("deposit " + x + " image is not a token output");

        for (std::size_t i = 0; i < junk_token.size(); ++i) {
            if (junk_token[i].second != m.actor) continue;
            // Token against self-minted token: the mapped deposit sits on
            // input 2 and lands on output 2.
            Outpoint mt = junk_token[i].first;
            auto fm = token_fields(chain.resolve(mt));
            if (!fm) continue;
            Transaction tx;
            tx.inputs = {mt, where.at(x)};
            tx.outputs = {make_token_output(op::xchg, pk(d.owner), fm->tkval, fm->tkid),
                          make_token_output(op::xchg, pk(m.actor), fx->tkval, fx->tkid)};
            tx.witnesses = {{Atom(sign_tx(key(m.actor), tx))},
                            {Atom(sign_tx(key(d.owner), tx))}};
            ActionLabel a = GiveLabel{x, m.actor};
            broadcast_auth(d.owner, tx, x, a);
            broadcast_plain(m.actor, tx);
            append(tx);
            Name y = fresh_name({}, 0);
            sym_step(action(a), Freshness{{y}, {}});
            where.erase(x);
            where.emplace(y, out_of(tx, 2));
            junk_token.erase(junk_token.begin() + static_cast<std::ptrdiff_t>(i));
            return true;
        }
        for (std::size_t i = 0; i < junk_btc.size(); ++i) {
            if (junk_btc[i].second != m.actor) continue;
            // Token against detached plain funds: the mapped deposit keeps
            // output 1, the counterparty gets a plain output.
            Outpoint j = junk_btc[i].first;
            BigInt jval = chain.resolve(j).val;
            Transaction tx;
            tx.inputs = {where.at(x), j};
            tx.outputs = {make_token_output(op::xchg, pk(m.actor), fx->tkval, fx->tkid),
                          make_btc_output(pk(d.owner), jval)};
            tx.witnesses = {{Atom(sign_tx(key(d.owner), tx))},
                            {Atom(sign_tx(key(m.actor), tx))}};
            ActionLabel a = GiveLabel{x, m.actor};
            broadcast_auth(d.owner, tx, x, a);
            broadcast_plain(m.actor, tx);
            append(tx);
            Name y = fresh_name({}, 0);
            sym_step(action(a), Freshness{{y}, {}});
            where.erase(x);
            where.emplace(y, out_of(tx, 1));
            junk_btc.erase(junk_btc.begin() + static_cast<std::ptrdiff_t>(i));
            return true;
        }
        return false;
    }

    // Builds a transaction spending a victim's deposit with the adversary's
    // signature; validation must reject it.
    void do_wrong_signature(const Move& m) {
        Name x = m.deposits.empty() ? Name{} : m.deposits[0];
        if (x.empty()) {
            for (const Deposit& d : config.deposits)
                if (d.owner != m.actor) {
                    x = d.name;
                    break;
                }
        }
        if (x.empty()) return;
        Transaction tx = build_give(chain, where.at(x), pk(m.actor), key(m.actor));
        broadcast_plain(m.actor, tx);
        try {
            validate_and_append(chain, tx);
            throw HarnessError("wrong-signature transaction was unexpectedly accepted");
        } catch (const ValidationError& e) {
            if (e.code != ValidationError::Code::ScriptFailed) throw;
            rejected.push_back(RejectedTx{std::string("ScriptFailed: ") + e.what(),
                                          "wrong-signature", tx});
        }
    }

    void do_junk_broadcast(const Move& m) {
        labels.push_back(Broadcast{m.actor, random_bytes(rng, 24)});
    }

    void run_move(const Move& m) {
        if (m.kind == "gen") do_gen(m);
        else if (m.kind == "split") do_split(m);
        else if (m.kind == "give") do_give(m);
        else if (m.kind == "join") do_join(m);
        else if (m.kind == "xchg") do_xchg(m);
        else if (m.kind == "burn") do_burn(m);
        else if (m.kind == "forge-token") do_forge(m);
        else if (m.kind == "arbitrary-spend") do_arbitrary_spend(m);
        else if (m.kind == "self-mint") do_self_mint(m);
        else if (m.kind == "xchg-unmapped") do_xchg_unmapped(m);
        else if (m.kind == "wrong-signature") do_wrong_signature(m);
        else if (m.kind == "junk-broadcast") do_junk_broadcast(m);
        else throw HarnessError("unknown move kind " + m.kind);
    }

    RunBundle finish(const std::string& scenario_name, std::uint64_t seed) {
        RunBundle b;
        b.scenario_name = scenario_name;
        b.seed = seed;
        b.users = users;
        b.symbolic = std::move(run);
        b.computational = ComputationalRun{users, std::move(labels)};
        b.maps0 = base_maps(b.symbolic.initial, std::get<AppendTx>(b.computational.labels[0]).tx);
        b.rejected = std::move(rejected);
        check_bundle(b);
        return b;
    }
};

}  // namespace

void check_bundle(RunBundle& b) {
    b.coherence = check_coherence(b.symbolic, b.computational, b.maps0);
    if (b.coherence.verdict) {
        b.final_maps = b.coherence.final_maps;
        b.s_to_c = lemma_s_to_c_check(b.symbolic, b.computational, b.final_maps);
        b.c_to_s = lemma_c_to_s_check(b.symbolic, b.computational, b.final_maps);
        b.balance = theorem_balance_check(b.symbolic, b.computational, b.final_maps);
    } else {
        b.s_to_c = LemmaReport{false, "skipped: incoherent run"};
        b.c_to_s = LemmaReport{false, "skipped: incoherent run"};
        b.balance = LemmaReport{false, "skipped: incoherent run"};
    }
}

RunBundle execute_scenario(const Scenario& s, std::uint64_t seed) {
    Harness h;
    std::vector<User> user_names = s.users;
    for (const Move& m : s.moves)
        if (!m.actor.empty() &&
            std::find(user_names.begin(), user_names.end(), m.actor) == user_names.end())
            user_names.push_back(m.actor);
    h.init(user_names, s.coinbase, seed);
    for (std::size_t i = 0; i < s.moves.size(); ++i) {
        try {
            h.run_move(s.moves[i]);
        } catch (const std::exception& e) {
            throw std::runtime_error("move " + std::to_string(i) + " (" + s.moves[i].kind +
                                     "): " + e.what());
        }
    }
    return h.finish(s.name, seed);
}

// ---------------------------------------------------------------------------
// Random runs

RunBundle random_run(std::uint64_t seed, std::size_t steps, const std::vector<User>& honest,
                     double adversary_mix) {
    std::vector<User> users = honest.empty() ? std::vector<User>{"A", "B"} : honest;
    User adversary = "M";
    std::vector<User> all = users;
    all.push_back(adversary);

    Harness h;
    std::vector<CoinbaseEntry> coinbase;
    std::size_t n = 0;
    for (const User& u : all) {
        coinbase.push_back(CoinbaseEntry{"c" + std::to_string(n++), u, 20});
        coinbase.push_back(CoinbaseEntry{"c" + std::to_string(n++), u, 0});
        coinbase.push_back(CoinbaseEntry{"c" + std::to_string(n++), u, 0});
    }
    h.init(all, coinbase, seed);

    auto pick_user = [&](std::mt19937_64& rng) { return users[rand_below(rng, users.size())]; };

    for (std::size_t i = 0; i < steps; ++i) {
        bool adversarial = (h.rng() % 1000) < static_cast<std::uint64_t>(adversary_mix * 1000);
        if (adversarial) {
            switch (rand_below(h.rng, 6)) {
                case 0: {
                    Move m{"forge-token", adversary, {}, 0, "", {}, "", ""};
                    for (const Deposit& d : h.config.deposits)
                        if (d.owner == adversary && d.token.is_btc()) {
                            m.deposits = {d.name};
                            break;
                        }
                    if (m.deposits.empty()) break;
                    if (!h.token_out.empty() && rand_below(h.rng, 2) == 0)
                        m.token_name = h.token_out.begin()->first;
                    m.amount = BigInt(1 + rand_below(h.rng, 20));
                    h.run_move(m);
                    break;
                }
                case 1: h.run_move(Move{"arbitrary-spend", adversary, {}, 0, "", {}, "", ""}); break;
                case 2: h.run_move(Move{"wrong-signature", adversary, {}, 0, "", {}, "", ""}); break;
                case 3: h.run_move(Move{"junk-broadcast", adversary, {}, 0, "", {}, "", ""}); break;
                case 4: h.do_self_mint(Move{"self-mint", adversary, {}, 0, "", {}, "", ""}); break;
                case 5: h.do_xchg_unmapped(Move{"xchg-unmapped", adversary, {}, 0, "", {}, "", ""}); break;
            }
            continue;
        }

        // Enabled honest actions, grouped by kind.
        std::vector<Move> candidates;
        std::vector<const Deposit*> own;
        for (const Deposit& d : h.config.deposits)
            if (d.owner != adversary) own.push_back(&d);
        for (const Deposit* d : own) {
            if (d->token.is_btc() && d->amount == 0)
                candidates.push_back(Move{"gen", d->owner, {d->name},
                                          BigInt(1 + rand_below(h.rng, 20)), "", {}, "", ""});
            BigInt v = d->amount == 0
                           ? BigInt(0)
                           : BigInt(rand_below(h.rng,
                                               1 + d->amount.convert_to<unsigned long long>()));
            candidates.push_back(Move{"split", d->owner, {d->name}, v, pick_user(h.rng), {}, "", ""});
            candidates.push_back(Move{"give", d->owner, {d->name}, 0, pick_user(h.rng), {}, "", ""});
            if (!d->token.is_btc())
                candidates.push_back(Move{"burn", d->owner, {d->name}, 0, "", {}, "", ""});
        }
        for (const Deposit* a : own)
            for (const Deposit* b : own) {
                if (a == b) continue;
                if (a->token == b->token)
                    candidates.push_back(
                        Move{"join", a->owner, {a->name, b->name}, 0, pick_user(h.rng), {}, "", ""});
                if (!a->token.is_btc())
                    candidates.push_back(Move{"xchg", a->owner, {a->name, b->name}, 0, "", {}, "", ""});
            }
        // Occasionally burn a pair of plain deposits together.
        std::vector<const Deposit*> plain;
        for (const Deposit* d : own)
            if (d->token.is_btc()) plain.push_back(d);
        if (plain.size() >= 2)
            candidates.push_back(Move{"burn", plain[0]->owner,
                                      {plain[0]->name, plain[1]->name}, 0, "", {}, "", ""});

        if (candidates.empty()) break;
        h.run_move(candidates[rand_below(h.rng, candidates.size())]);
    }
    return h.finish("random", seed);
}

// ---------------------------------------------------------------------------
// Attack demos

AttackDemoResult run_join_attack_demo() {
    Scenario s;
    s.name = "join-attack";
    s.users = {"A", "M"};
    s.coinbase = {{"a0", "A", 0}, {"m0", "M", 0}};
    s.moves = {
        Move{"gen", "A", {"a0"}, 10, "", {"x1"}, "t", ""},
        Move{"gen", "M", {"m0"}, 10, "", {"x2"}, "tM", ""},
        Move{"split", "A", {"x1"}, 8, "M", {"x3", "x4"}, "", ""},
        Move{"split", "M", {"x2"}, 7, "A", {"x5", "x6"}, "", ""},
    };
    RunBundle b = execute_scenario(s, 0);

    // The attack: join the 8 units of t with the 7 units of tM.
    Chain chain = derive_chain(b.computational);
    Outpoint x3 = b.final_maps.txout.at("x3");  // (A, 8:t)
    Outpoint x5 = b.final_maps.txout.at("x5");  // (M, 7:tM)
    Transaction t3 = build_join(chain, x3, x5, KeyPair::from_name("A").public_key,
                                KeyPair::from_name("A"), KeyPair::from_name("M"));
    AttackDemoResult r;
    try {
        validate_and_append(chain, t3);
        r.attack_rejected = false;
        r.detail = "join of distinct tokens was accepted";
    } catch (const ValidationError& e) {
        r.attack_rejected = e.code == ValidationError::Code::ScriptFailed;
        r.failed_input = e.input_index;
        r.detail = std::string(to_string(e.code)) + ": " + e.what();
    }
    return r;
}

AttackDemoResult run_forgery_demo() {
    Scenario s;
    s.name = "forgery";
    s.users = {"A", "M"};
    s.coinbase = {{"a0", "A", 0}, {"m0", "M", 0}};
    s.moves = {Move{"gen", "A", {"a0"}, 10, "", {"x1"}, "t", ""}};
    RunBundle b = execute_scenario(s, 0);

    Chain chain = derive_chain(b.computational);
    KeyPair mkey = KeyPair::from_name("M");

    // M forges 10 units of t by copying its identifier.
    Outpoint m0 = b.maps0.txout.at("m0");
    Bytes forged_tkid = outpoint_digest(chain, b.final_maps.tkid.at("t")).to_bytes();
    Transaction forge;
    forge.inputs = {m0};
    forge.outputs = {make_token_output(op::gen, mkey.public_key, 10, forged_tkid)};
    forge.witnesses = {{Atom(sign_tx(mkey, forge))}};
    chain = validate_and_append(chain, forge);  // forging itself cannot be prevented
    Outpoint forged{txid_of(forge), 1};

    AttackDemoResult r;
    // Spending the forged units must fail.
    Transaction t2 = build_split(chain, forged, 7, mkey.public_key, mkey);
    try {
        validate_and_append(chain, t2);
        r.attack_rejected = false;
        r.detail = "forged token spend was accepted";
    } catch (const ValidationError& e) {
        r.attack_rejected = e.code == ValidationError::Code::ScriptFailed;
        r.failed_input = e.input_index;
        r.detail = std::string(to_string(e.code)) + ": " + e.what();
    }
    r.forged_unspendable = !is_spendable(chain, forged);
    return r;
}

Scenario overview_scenario() {
    Scenario s;
    s.name = "overview";
    s.users = {"A", "B"};
    s.coinbase = {{"x0", "A", 0}, {"w0", "A", 0}, {"x9", "A", 1}};
    s.moves = {
        Move{"gen", "A", {"x0"}, 10, "", {"x1"}, "t", ""},
        Move{"split", "A", {"x1"}, 8, "B", {"x2", "x3"}, "", ""},
        Move{"give", "A", {"x2"}, 0, "B", {"x4"}, "", ""},
        Move{"join", "B", {"x4", "x3"}, 0, "A", {"x5"}, "", ""},
        Move{"gen", "A", {"w0"}, 2, "", {"x6"}, "tp", ""},
        Move{"split", "A", {"x5"}, 2, "B", {"x7", "x8"}, "", ""},
        Move{"xchg", "B", {"x8", "x6"}, 0, "", {"x10", "x11"}, "", ""},
        Move{"xchg", "B", {"x10", "x9"}, 0, "", {"x12", "x13"}, "", ""},
        Move{"burn", "A", {"x13"}, 0, "", {}, "", "yb"},
    };
    return s;
}

}  // namespace covtok
