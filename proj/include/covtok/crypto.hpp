// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVTOK_CRYPTO_HPP
#define COVTOK_CRYPTO_HPP

#include "covtok/basics.hpp"

#include <array>
#include <compare>

namespace covtok {

struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Digest&) const = default;
    std::string hex() const;
    Bytes to_bytes() const { return Bytes(bytes.begin(), bytes.end()); }
    static Digest from_hex(const std::string& hex);
};

Digest sha256(const Bytes& data);

// Ed25519. Signatures are deterministic, so repeated signing of the same
// message yields byte-identical results.
struct KeyPair {
    Bytes public_key;  // 32 bytes
    Bytes secret_key;  // 64 bytes

    static KeyPair from_seed(const Bytes& seed32);
    // Derives a reproducible keypair from a user name (seed = H("covtok:user:"+name)).
    static KeyPair from_name(const std::string& name);
};

Bytes sign_bytes(const Bytes& secret_key, const Bytes& message);
bool verify_bytes(const Bytes& public_key, const Bytes& signature, const Bytes& message);

}  // namespace covtok

#endif
