// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVTOK_SCRIPT_HPP
#define COVTOK_SCRIPT_HPP

#include "covtok/basics.hpp"

#include <memory>
#include <string>
#include <vector>

namespace covtok {

// Script expressions form immutable shared trees. Equality (script_eq) is
// purely syntactic; no normalization is ever applied, so the and/or/not
// sugar must expand identically everywhere (see the sc_* helpers below).
struct Expr;
using Script = std::shared_ptr<const Expr>;

enum class TxoKind { Rtxo, Stxo, Ptxo };

// A transaction-output selector. Selectors are a separate syntactic
// category: they appear only under field access, covenants, the length
// operators and txid, never as first-class values.
struct TxoSel {
    TxoKind kind;
    Script index;
};

enum class BinOp { Add, Sub, Eq, Lt };
enum class TxField { Arg, Val };

struct Expr {
    struct Const { Atom v; };
    struct Bin { BinOp op; Script lhs, rhs; };
    struct If { Script cond, then_e, else_e; };
    struct SeqAt { Script seq; std::uint64_t index; };  // 1-based literal index
    struct RtxWit {};
    struct Size { Script e; };
    struct Hash { Script e; };
    struct Versig { Script key, sig; };
    struct Field { TxoSel txo; TxField field; };
    struct Verscr { Script lit; TxoSel txo; };  // lit is not evaluated
    struct Verrec { TxoSel txo; };
    struct InIdx {};
    struct OutIdx {};
    struct InLen { TxoSel txo; };
    struct OutLen { TxoSel txo; };
    struct TxId { TxoSel txo; };

    using Node = std::variant<Const, Bin, If, SeqAt, RtxWit, Size, Hash, Versig,
                              Field, Verscr, Verrec, InIdx, OutIdx, InLen, OutLen, TxId>;
    Node node;
};

// Node constructors.
Script sc_int(const BigInt& v);
Script sc_int(long long v);
Script sc_bytes(const Bytes& b);
Script sc_bin(BinOp op, Script l, Script r);
Script sc_add(Script l, Script r);
Script sc_sub(Script l, Script r);
Script sc_eq(Script l, Script r);
Script sc_lt(Script l, Script r);
Script sc_if(Script c, Script t, Script e);
Script sc_at(Script seq, std::uint64_t index);
Script sc_rtx_wit();
Script sc_size(Script e);
Script sc_hash(Script e);
Script sc_versig(Script key, Script sig);
Script sc_field(TxoSel txo, TxField f);
Script sc_verscr(Script lit, TxoSel txo);
Script sc_verrec(TxoSel txo);
Script sc_inidx();
Script sc_outidx();
Script sc_inlen(TxoSel txo);
Script sc_outlen(TxoSel txo);
Script sc_txid(TxoSel txo);

TxoSel rtxo(Script index);
TxoSel stxo(Script index);
TxoSel ptxo(Script index);
TxoSel rtxo(std::uint64_t index);
TxoSel stxo(std::uint64_t index);
TxoSel ptxo(std::uint64_t index);
TxoSel ctxo();  // stxo(inidx)

// Sugar: false = 0, true = 1, e and e' = if e then e' else false,
// e or e' = if e then true else e', not e = if e then false else true.
Script sc_false();
Script sc_true();
Script sc_and(Script a, Script b);
Script sc_or(Script a, Script b);
Script sc_not(Script a);
Script sc_all(const std::vector<Script>& conjuncts);  // right-nested and-chain
Script sc_arg_at(TxoSel txo, std::uint64_t index);    // txo.arg.index
Script sc_val(TxoSel txo);                            // txo.val

bool script_eq(const Script& a, const Script& b);
bool txo_eq(const TxoSel& a, const TxoSel& b);

// Canonical binary form (used for hashing and transaction serialization).
void serialize_script(Encoder& enc, const Script& s);
Script decode_script(Decoder& dec);

// Human-readable form (used in scenario files, chain JSON and CLI output).
// parse_script(print_script(e)) reproduces e exactly.
std::string print_script(const Script& s);

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)),
          position(position) {}
    std::size_t position;
};

Script parse_script(const std::string& text);

}  // namespace covtok

#endif
