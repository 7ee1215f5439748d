// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "covtok/script.hpp"

#include <cctype>
#include <sstream>

namespace covtok {

namespace {

Script mk(Expr::Node node) {
    auto e = std::make_shared<Expr>();
    e->node = std::move(node);
    return e;
}

}  // namespace

Script sc_int(const BigInt& v) { return mk(Expr::Const{Atom(v)}); }
Script sc_int(long long v) { return sc_int(BigInt(v)); }
Script sc_bytes(const Bytes& b) { return mk(Expr::Const{Atom(b)}); }
Script sc_bin(BinOp op, Script l, Script r) { return mk(Expr::Bin{op, std::move(l), std::move(r)}); }
Script sc_add(Script l, Script r) { return sc_bin(BinOp::Add, std::move(l), std::move(r)); }
Script sc_sub(Script l, Script r) { return sc_bin(BinOp::Sub, std::move(l), std::move(r)); }
Script sc_eq(Script l, Script r) { return sc_bin(BinOp::Eq, std::move(l), std::move(r)); }
Script sc_lt(Script l, Script r) { return sc_bin(BinOp::Lt, std::move(l), std::move(r)); }
Script sc_if(Script c, Script t, Script e) { return mk(Expr::If{std::move(c), std::move(t), std::move(e)}); }
Script sc_at(Script seq, std::uint64_t index) { return mk(Expr::SeqAt{std::move(seq), index}); }
Script sc_rtx_wit() { return mk(Expr::RtxWit{}); }
Script sc_size(Script e) { return mk(Expr::Size{std::move(e)}); }
Script sc_hash(Script e) { return mk(Expr::Hash{std::move(e)}); }
Script sc_versig(Script key, Script sig) { return mk(Expr::Versig{std::move(key), std::move(sig)}); }
Script sc_field(TxoSel txo, TxField f) { return mk(Expr::Field{std::move(txo), f}); }
Script sc_verscr(Script lit, TxoSel txo) { return mk(Expr::Verscr{std::move(lit), std::move(txo)}); }
Script sc_verrec(TxoSel txo) { return mk(Expr::Verrec{std::move(txo)}); }
Script sc_inidx() { return mk(Expr::InIdx{}); }
Script sc_outidx() { return mk(Expr::OutIdx{}); }
Script sc_inlen(TxoSel txo) { return mk(Expr::InLen{std::move(txo)}); }
Script sc_outlen(TxoSel txo) { return mk(Expr::OutLen{std::move(txo)}); }
Script sc_txid(TxoSel txo) { return mk(Expr::TxId{std::move(txo)}); }

TxoSel rtxo(Script index) { return TxoSel{TxoKind::Rtxo, std::move(index)}; }
TxoSel stxo(Script index) { return TxoSel{TxoKind::Stxo, std::move(index)}; }
TxoSel ptxo(Script index) { return TxoSel{TxoKind::Ptxo, std::move(index)}; }
TxoSel rtxo(std::uint64_t index) { return rtxo(sc_int(static_cast<long long>(index))); }
TxoSel stxo(std::uint64_t index) { return stxo(sc_int(static_cast<long long>(index))); }
TxoSel ptxo(std::uint64_t index) { return ptxo(sc_int(static_cast<long long>(index))); }
TxoSel ctxo() { return stxo(sc_inidx()); }

Script sc_false() { return sc_int(0); }
Script sc_true() { return sc_int(1); }
Script sc_and(Script a, Script b) { return sc_if(std::move(a), std::move(b), sc_false()); }
Script sc_or(Script a, Script b) { return sc_if(std::move(a), sc_true(), std::move(b)); }
Script sc_not(Script a) { return sc_if(std::move(a), sc_false(), sc_true()); }

Script sc_all(const std::vector<Script>& conjuncts) {
    if (conjuncts.empty()) return sc_true();
    Script out = conjuncts.back();
    for (std::size_t i = conjuncts.size() - 1; i-- > 0;) out = sc_and(conjuncts[i], out);
    return out;
}

Script sc_arg_at(TxoSel txo, std::uint64_t index) {
    return sc_at(sc_field(std::move(txo), TxField::Arg), index);
}

Script sc_val(TxoSel txo) { return sc_field(std::move(txo), TxField::Val); }

bool txo_eq(const TxoSel& a, const TxoSel& b) {
    return a.kind == b.kind && script_eq(a.index, b.index);
}

bool script_eq(const Script& a, const Script& b) {
    if (a == b) return true;  // shared-subtree fast path
    if (!a || !b) return false;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        [&b](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const T& nb = std::get<T>(b->node);
            if constexpr (std::is_same_v<T, Expr::Const>) {
                return atom_eq(na.v, nb.v);
            } else if constexpr (std::is_same_v<T, Expr::Bin>) {
                return na.op == nb.op && script_eq(na.lhs, nb.lhs) && script_eq(na.rhs, nb.rhs);
            } else if constexpr (std::is_same_v<T, Expr::If>) {
                return script_eq(na.cond, nb.cond) && script_eq(na.then_e, nb.then_e) &&
                       script_eq(na.else_e, nb.else_e);
            } else if constexpr (std::is_same_v<T, Expr::SeqAt>) {
                return na.index == nb.index && script_eq(na.seq, nb.seq);
            } else if constexpr (std::is_same_v<T, Expr::Size>) {
                return script_eq(na.e, nb.e);
            } else if constexpr (std::is_same_v<T, Expr::Hash>) {
                return script_eq(na.e, nb.e);
            } else if constexpr (std::is_same_v<T, Expr::Versig>) {
                return script_eq(na.key, nb.key) && script_eq(na.sig, nb.sig);
            } else if constexpr (std::is_same_v<T, Expr::Field>) {
                return na.field == nb.field && txo_eq(na.txo, nb.txo);
            } else if constexpr (std::is_same_v<T, Expr::Verscr>) {
                return script_eq(na.lit, nb.lit) && txo_eq(na.txo, nb.txo);
            } else if constexpr (std::is_same_v<T, Expr::Verrec>) {
                return txo_eq(na.txo, nb.txo);
            } else if constexpr (std::is_same_v<T, Expr::InLen>) {
                return txo_eq(na.txo, nb.txo);
            } else if constexpr (std::is_same_v<T, Expr::OutLen>) {
                return txo_eq(na.txo, nb.txo);
            } else if constexpr (std::is_same_v<T, Expr::TxId>) {
                return txo_eq(na.txo, nb.txo);
            } else {
                return true;  // RtxWit, InIdx, OutIdx carry no payload
            }
        },
        a->node);
}

// ---------------------------------------------------------------------------
// Canonical binary form

namespace {

enum : std::uint8_t {
    TAG_CONST = 1, TAG_BIN, TAG_IF, TAG_SEQAT, TAG_RTXWIT, TAG_SIZE, TAG_HASH,
    TAG_VERSIG, TAG_FIELD, TAG_VERSCR, TAG_VERREC, TAG_INIDX, TAG_OUTIDX,
    TAG_INLEN, TAG_OUTLEN, TAG_TXID,
};

void serialize_txo(Encoder& enc, const TxoSel& t) {
    enc.u8(static_cast<std::uint8_t>(t.kind));
    serialize_script(enc, t.index);
}

TxoSel decode_txo(Decoder& dec) {
    std::uint8_t kind = dec.u8();
    if (kind > 2) throw DecodeError("bad txo kind");
    Script index = decode_script(dec);
    return TxoSel{static_cast<TxoKind>(kind), std::move(index)};
}

}  // namespace

void serialize_script(Encoder& enc, const Script& s) {
    std::visit(
        [&enc](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Const>) {
                enc.u8(TAG_CONST);
                enc.atom(n.v);
            } else if constexpr (std::is_same_v<T, Expr::Bin>) {
                enc.u8(TAG_BIN);
                enc.u8(static_cast<std::uint8_t>(n.op));
                serialize_script(enc, n.lhs);
                serialize_script(enc, n.rhs);
            } else if constexpr (std::is_same_v<T, Expr::If>) {
                enc.u8(TAG_IF);
                serialize_script(enc, n.cond);
                serialize_script(enc, n.then_e);
                serialize_script(enc, n.else_e);
            } else if constexpr (std::is_same_v<T, Expr::SeqAt>) {
                enc.u8(TAG_SEQAT);
                serialize_script(enc, n.seq);
                enc.u64(n.index);
            } else if constexpr (std::is_same_v<T, Expr::RtxWit>) {
                enc.u8(TAG_RTXWIT);
            } else if constexpr (std::is_same_v<T, Expr::Size>) {
                enc.u8(TAG_SIZE);
                serialize_script(enc, n.e);
            } else if constexpr (std::is_same_v<T, Expr::Hash>) {
                enc.u8(TAG_HASH);
                serialize_script(enc, n.e);
            } else if constexpr (std::is_same_v<T, Expr::Versig>) {
                enc.u8(TAG_VERSIG);
                serialize_script(enc, n.key);
                serialize_script(enc, n.sig);
            } else if constexpr (std::is_same_v<T, Expr::Field>) {
                enc.u8(TAG_FIELD);
                serialize_txo(enc, n.txo);
                enc.u8(n.field == TxField::Arg ? 0 : 1);
            } else if constexpr (std::is_same_v<T, Expr::Verscr>) {
                enc.u8(TAG_VERSCR);
                serialize_script(enc, n.lit);
                serialize_txo(enc, n.txo);
            } else if constexpr (std::is_same_v<T, Expr::Verrec>) {
                enc.u8(TAG_VERREC);
                serialize_txo(enc, n.txo);
            } else if constexpr (std::is_same_v<T, Expr::InIdx>) {
                enc.u8(TAG_INIDX);
            } else if constexpr (std::is_same_v<T, Expr::OutIdx>) {
                enc.u8(TAG_OUTIDX);
            } else if constexpr (std::is_same_v<T, Expr::InLen>) {
                enc.u8(TAG_INLEN);
                serialize_txo(enc, n.txo);
            } else if constexpr (std::is_same_v<T, Expr::OutLen>) {
                enc.u8(TAG_OUTLEN);
                serialize_txo(enc, n.txo);
            } else if constexpr (std::is_same_v<T, Expr::TxId>) {
                enc.u8(TAG_TXID);
                serialize_txo(enc, n.txo);
            }
        },
        s->node);
}

Script decode_script(Decoder& dec) {
    std::uint8_t tag = dec.u8();
    switch (tag) {
        case TAG_CONST: return mk(Expr::Const{dec.atom()});
        case TAG_BIN: {
            std::uint8_t op = dec.u8();
            if (op > 3) throw DecodeError("bad binary op");
            Script l = decode_script(dec);
            Script r = decode_script(dec);
            return sc_bin(static_cast<BinOp>(op), std::move(l), std::move(r));
        }
        case TAG_IF: {
            Script c = decode_script(dec);
            Script t = decode_script(dec);
            Script e = decode_script(dec);
            return sc_if(std::move(c), std::move(t), std::move(e));
        }
        case TAG_SEQAT: {
            Script seq = decode_script(dec);
            return sc_at(std::move(seq), dec.u64());
        }
        case TAG_RTXWIT: return sc_rtx_wit();
        case TAG_SIZE: return sc_size(decode_script(dec));
        case TAG_HASH: return sc_hash(decode_script(dec));
        case TAG_VERSIG: {
            Script k = decode_script(dec);
            Script s = decode_script(dec);
            return sc_versig(std::move(k), std::move(s));
        }
        case TAG_FIELD: {
            TxoSel t = decode_txo(dec);
            std::uint8_t f = dec.u8();
            if (f > 1) throw DecodeError("bad field tag");
            return sc_field(std::move(t), f == 0 ? TxField::Arg : TxField::Val);
        }
        case TAG_VERSCR: {
            Script lit = decode_script(dec);
            return sc_verscr(std::move(lit), decode_txo(dec));
        }
        case TAG_VERREC: return sc_verrec(decode_txo(dec));
        case TAG_INIDX: return sc_inidx();
        case TAG_OUTIDX: return sc_outidx();
        case TAG_INLEN: return sc_inlen(decode_txo(dec));
        case TAG_OUTLEN: return sc_outlen(decode_txo(dec));
        case TAG_TXID: return sc_txid(decode_txo(dec));
        default: throw DecodeError("bad script tag");
    }
}

// ---------------------------------------------------------------------------
// Pretty-printer
//
// Precedence levels (higher binds tighter):
//   0 if/then/else   1 or   2 and   3 not   4 = <   5 + -   6 postfix .n
// The and/or/not forms are detected structurally from their if-expansions,
// so print/parse round-trips the exact AST.

namespace {

struct Printed {
    std::string text;
    int prec;
};

Printed print_node(const Script& s);

std::string print_at(const Script& s, int min_prec) {
    Printed p = print_node(s);
    if (p.prec < min_prec) return "(" + p.text + ")";
    return p.text;
}

std::string print_txo(const TxoSel& t) {
    if (t.kind == TxoKind::Stxo && std::holds_alternative<Expr::InIdx>(t.index->node))
        return "ctxo";
    const char* name = t.kind == TxoKind::Rtxo ? "rtxo" : t.kind == TxoKind::Stxo ? "stxo" : "ptxo";
    return std::string(name) + "(" + print_at(t.index, 0) + ")";
}

bool is_const_int(const Script& s, int v) {
    const auto* c = std::get_if<Expr::Const>(&s->node);
    return c && is_int(c->v) && as_int(c->v) == v;
}

Printed print_node(const Script& s) {
    return std::visit(
        [&s](const auto& n) -> Printed {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Const>) {
                return {atom_to_string(n.v), 7};
            } else if constexpr (std::is_same_v<T, Expr::Bin>) {
                if (n.op == BinOp::Add || n.op == BinOp::Sub)
                    return {print_at(n.lhs, 5) + (n.op == BinOp::Add ? " + " : " - ") +
                                print_at(n.rhs, 6),
                            5};
                return {print_at(n.lhs, 5) + (n.op == BinOp::Eq ? " = " : " < ") +
                            print_at(n.rhs, 5),
                        4};
            } else if constexpr (std::is_same_v<T, Expr::If>) {
                // Sugar detection; order matters (not before and).
                if (is_const_int(n.then_e, 0) && is_const_int(n.else_e, 1))
                    return {"not " + print_at(n.cond, 3), 3};
                if (is_const_int(n.else_e, 0))
                    return {print_at(n.cond, 3) + " and " + print_at(n.then_e, 2), 2};
                if (is_const_int(n.then_e, 1))
                    return {print_at(n.cond, 2) + " or " + print_at(n.else_e, 1), 1};
                return {"if " + print_at(n.cond, 1) + " then " + print_at(n.then_e, 0) +
                            " else " + print_at(n.else_e, 0),
                        0};
            } else if constexpr (std::is_same_v<T, Expr::SeqAt>) {
                return {print_at(n.seq, 6) + "." + std::to_string(n.index), 6};
            } else if constexpr (std::is_same_v<T, Expr::RtxWit>) {
                return {"rtx.wit", 6};
            } else if constexpr (std::is_same_v<T, Expr::Size>) {
                return {"size(" + print_at(n.e, 0) + ")", 7};
            } else if constexpr (std::is_same_v<T, Expr::Hash>) {
                return {"hash(" + print_at(n.e, 0) + ")", 7};
            } else if constexpr (std::is_same_v<T, Expr::Versig>) {
                return {"versig(" + print_at(n.key, 0) + ", " + print_at(n.sig, 0) + ")", 7};
            } else if constexpr (std::is_same_v<T, Expr::Field>) {
                return {print_txo(n.txo) + (n.field == TxField::Arg ? ".arg" : ".val"), 6};
            } else if constexpr (std::is_same_v<T, Expr::Verscr>) {
                return {"verscr(" + print_at(n.lit, 0) + ", " + print_txo(n.txo) + ")", 7};
            } else if constexpr (std::is_same_v<T, Expr::Verrec>) {
                return {"verrec(" + print_txo(n.txo) + ")", 7};
            } else if constexpr (std::is_same_v<T, Expr::InIdx>) {
                return {"inidx", 7};
            } else if constexpr (std::is_same_v<T, Expr::OutIdx>) {
                return {"outidx", 7};
            } else if constexpr (std::is_same_v<T, Expr::InLen>) {
                return {"inlen(" + print_txo(n.txo) + ")", 7};
            } else if constexpr (std::is_same_v<T, Expr::OutLen>) {
                return {"outlen(" + print_txo(n.txo) + ")", 7};
            } else {
                return {"txid(" + print_txo(n.txo) + ")", 7};
            }
        },
        s->node);
}

}  // namespace

std::string print_script(const Script& s) { return print_node(s).text; }

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { End, Int, Hex, Ident, LParen, RParen, Dot, Comma, Plus, Minus, Eq, Lt };

struct Lexer {
    const std::string& text;
    std::size_t pos = 0;
    Tok tok = Tok::End;
    std::string ident;
    BigInt number;
    Bytes bytes;
    std::size_t tok_pos = 0;

    explicit Lexer(const std::string& t) : text(t) { advance(); }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, tok_pos); }

    void advance() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        tok_pos = pos;
        if (pos >= text.size()) {
            tok = Tok::End;
            return;
        }
        char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            if (c == '0' && pos + 1 < text.size() && text[pos + 1] == 'x') {
                pos += 2;
                std::size_t start = pos;
                while (pos < text.size() &&
                       std::isxdigit(static_cast<unsigned char>(text[pos])))
                    ++pos;
                try {
                    bytes = from_hex(text.substr(start, pos - start));
                } catch (const std::invalid_argument& e) {
                    fail(e.what());
                }
                tok = Tok::Hex;
                return;
            }
            std::size_t start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            number = BigInt(text.substr(start, pos - start));
            tok = Tok::Int;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos;
            while (pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
                ++pos;
            ident = text.substr(start, pos - start);
            tok = Tok::Ident;
            return;
        }
        ++pos;
        switch (c) {
            case '(': tok = Tok::LParen; return;
            case ')': tok = Tok::RParen; return;
            case '.': tok = Tok::Dot; return;
            case ',': tok = Tok::Comma; return;
            case '+': tok = Tok::Plus; return;
            case '-': tok = Tok::Minus; return;
            case '=': tok = Tok::Eq; return;
            case '<': tok = Tok::Lt; return;
            default: fail(std::string("unexpected character '") + c + "'");
        }
    }

    bool accept(Tok t) {
        if (tok != t) return false;
        advance();
        return true;
    }

    void expect(Tok t, const char* what) {
        if (tok != t) fail(std::string("expected ") + what);
        advance();
    }

    bool accept_ident(const char* name) {
        if (tok != Tok::Ident || ident != name) return false;
        advance();
        return true;
    }
};

struct Parser {
    Lexer lex;
    explicit Parser(const std::string& t) : lex(t) {}

    Script parse() {
        Script e = expr();
        if (lex.tok != Tok::End) lex.fail("trailing input");
        return e;
    }

    Script expr() {
        if (lex.accept_ident("if")) {
            Script c = expr();
            if (!lex.accept_ident("then")) lex.fail("expected 'then'");
            Script t = expr();
            if (!lex.accept_ident("else")) lex.fail("expected 'else'");
            Script e = expr();
            return sc_if(std::move(c), std::move(t), std::move(e));
        }
        return or_expr();
    }

    Script or_expr() {
        Script l = and_expr();
        if (lex.accept_ident("or")) return sc_or(std::move(l), or_expr());
        return l;
    }

    Script and_expr() {
        Script l = not_expr();
        if (lex.accept_ident("and")) return sc_and(std::move(l), and_expr());
        return l;
    }

    Script not_expr() {
        if (lex.accept_ident("not")) return sc_not(not_expr());
        return cmp_expr();
    }

    Script cmp_expr() {
        Script l = add_expr();
        if (lex.accept(Tok::Eq)) return sc_eq(std::move(l), add_expr());
        if (lex.accept(Tok::Lt)) return sc_lt(std::move(l), add_expr());
        return l;
    }

    Script add_expr() {
        Script l = postfix_expr();
        for (;;) {
            if (lex.accept(Tok::Plus)) l = sc_add(std::move(l), postfix_expr());
            else if (lex.accept(Tok::Minus)) l = sc_sub(std::move(l), postfix_expr());
            else return l;
        }
    }

    // A primary is either a script expression or a bare txo selector; the
    // latter must be followed by a field (.arg/.val or a named sugar field).
    std::variant<Script, TxoSel> primary() {
        if (lex.accept(Tok::LParen)) {
            Script e = expr();
            lex.expect(Tok::RParen, "')'");
            return e;
        }
        if (lex.tok == Tok::Int) {
            BigInt v = lex.number;
            lex.advance();
            return sc_int(v);
        }
        if (lex.accept(Tok::Minus)) {
            if (lex.tok != Tok::Int) lex.fail("expected integer after '-'");
            BigInt v = lex.number;
            lex.advance();
            return sc_int(BigInt(-v));
        }
        if (lex.tok == Tok::Hex) {
            Bytes b = lex.bytes;
            lex.advance();
            return sc_bytes(b);
        }
        if (lex.tok != Tok::Ident) lex.fail("expected expression");
        std::string id = lex.ident;
        lex.advance();
        if (id == "true") return sc_true();
        if (id == "false") return sc_false();
        if (id == "inidx") return sc_inidx();
        if (id == "outidx") return sc_outidx();
        if (id == "rtx") {
            lex.expect(Tok::Dot, "'.' after rtx");
            if (!lex.accept_ident("wit")) lex.fail("expected 'wit' after 'rtx.'");
            return sc_rtx_wit();
        }
        if (id == "size" || id == "hash") {
            lex.expect(Tok::LParen, "'('");
            Script e = expr();
            lex.expect(Tok::RParen, "')'");
            return id == "size" ? sc_size(std::move(e)) : sc_hash(std::move(e));
        }
        if (id == "versig") {
            lex.expect(Tok::LParen, "'('");
            Script k = expr();
            lex.expect(Tok::Comma, "','");
            Script s = expr();
            lex.expect(Tok::RParen, "')'");
            return sc_versig(std::move(k), std::move(s));
        }
        if (id == "verscr") {
            lex.expect(Tok::LParen, "'('");
            Script lit = expr();
            lex.expect(Tok::Comma, "','");
            TxoSel t = txo();
            lex.expect(Tok::RParen, "')'");
            return sc_verscr(std::move(lit), std::move(t));
        }
        if (id == "verrec" || id == "inlen" || id == "outlen" || id == "txid") {
            lex.expect(Tok::LParen, "'('");
            TxoSel t = txo();
            lex.expect(Tok::RParen, "')'");
            if (id == "verrec") return sc_verrec(std::move(t));
            if (id == "inlen") return sc_inlen(std::move(t));
            if (id == "outlen") return sc_outlen(std::move(t));
            return sc_txid(std::move(t));
        }
        if (id == "ctxo") return ctxo();
        if (id == "rtxo" || id == "stxo" || id == "ptxo") {
            lex.expect(Tok::LParen, "'('");
            Script e = expr();
            lex.expect(Tok::RParen, "')'");
            if (id == "rtxo") return rtxo(std::move(e));
            if (id == "stxo") return stxo(std::move(e));
            return ptxo(std::move(e));
        }
        lex.fail("unknown identifier '" + id + "'");
    }

    TxoSel txo() {
        auto p = primary();
        if (auto* t = std::get_if<TxoSel>(&p)) return std::move(*t);
        lex.fail("expected a transaction-output selector (rtxo/stxo/ptxo/ctxo)");
    }

    Script postfix_expr() {
        auto p = primary();
        Script e;
        if (auto* t = std::get_if<TxoSel>(&p)) {
            lex.expect(Tok::Dot, "'.' after transaction-output selector");
            if (lex.tok != Tok::Ident) lex.fail("expected field name");
            std::string f = lex.ident;
            lex.advance();
            if (f == "arg") e = sc_field(std::move(*t), TxField::Arg);
            else if (f == "val") e = sc_field(std::move(*t), TxField::Val);
            else if (f == "op") e = sc_arg_at(std::move(*t), 1);
            else if (f == "owner") e = sc_arg_at(std::move(*t), 2);
            else if (f == "tkval") e = sc_arg_at(std::move(*t), 3);
            else if (f == "tkid") e = sc_arg_at(std::move(*t), 4);
            else lex.fail("unknown output field '" + f + "'");
        } else {
            e = std::move(std::get<Script>(p));
        }
        while (lex.tok == Tok::Dot) {
            lex.advance();
            if (lex.tok != Tok::Int) lex.fail("expected sequence index after '.'");
            if (lex.number < 0 || lex.number > std::numeric_limits<std::uint64_t>::max())
                lex.fail("sequence index out of range");
            e = sc_at(std::move(e), static_cast<std::uint64_t>(lex.number));
            lex.advance();
        }
        return e;
    }
};

}  // namespace

Script parse_script(const std::string& text) {
    Parser p(text);
    return p.parse();
}

}  // namespace covtok
