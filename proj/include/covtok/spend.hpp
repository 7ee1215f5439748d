// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVTOK_SPEND_HPP
#define COVTOK_SPEND_HPP

#include "covtok/token.hpp"

namespace covtok {

// Spendability is undecidable for arbitrary scripts; when the bounded
// template search is inconclusive we refuse to guess.
struct SpendabilityError : std::runtime_error {
    explicit SpendabilityError(const std::string& what) : std::runtime_error(what) {}
};

// Decision procedure for the script shapes this repository produces:
// the constant-false script is unspendable, a plain deposit is always
// spendable, and a token output is spendable iff some action branch's
// non-signature conditions hold for a candidate redeeming template.
// Any other script gets the bounded template search; if no template
// satisfies it, UnknownScriptShape is surfaced as SpendabilityError.
bool is_spendable(const Chain& chain, const Outpoint& o);

// Removes every signature check from a script (each versig node becomes the
// constant 1); used to probe spendability under cooperative signers.
Script strip_signatures(const Script& s);

}  // namespace covtok

#endif
