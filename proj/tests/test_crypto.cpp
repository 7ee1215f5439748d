// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "covtok/token.hpp"

#include <set>

using namespace covtok;

namespace {

Transaction sample_tx(const Bytes& owner_pk) {
    Transaction tx;
    Outpoint in;
    in.txid = sha256({1, 2, 3});
    in.index = 1;
    tx.inputs = {in};
    tx.witnesses = {{}};
    tx.outputs = {make_btc_output(owner_pk, 7)};
    return tx;
}

}  // namespace

TEST_CASE("hashing is deterministic") {
    Bytes data = {0xde, 0xad, 0xbe, 0xef};
    CHECK(sha256(data) == sha256(data));
}

TEST_CASE("empty-input digest matches the published value") {
    CHECK(sha256({}).hex() ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("no collisions over a corpus of distinct inputs") {
    std::set<std::string> seen;
    for (int i = 0; i < 2000; ++i) {
        Bytes data;
        int v = i;
        while (v > 0) {
            data.push_back(static_cast<std::uint8_t>(v & 0xff));
            v >>= 8;
        }
        data.push_back(static_cast<std::uint8_t>(i & 1));
        CHECK(seen.insert(sha256(data).hex()).second);
    }
}

TEST_CASE("sign/verify round trip") {
    KeyPair kp = KeyPair::from_name("alice");
    Transaction tx = sample_tx(kp.public_key);
    Bytes sig = sign_tx(kp, tx);
    CHECK(verify_tx(kp.public_key, sig, tx));
}

TEST_CASE("signatures ignore witnesses") {
    KeyPair kp = KeyPair::from_name("alice");
    Transaction tx = sample_tx(kp.public_key);
    Bytes sig = sign_tx(kp, tx);

    Transaction with_wit = tx;
    with_wit.witnesses = {{Atom(Bytes{0x01, 0x02}), Atom(BigInt(42))}};
    CHECK(sign_tx(kp, with_wit) == sig);
    CHECK(verify_tx(kp.public_key, sig, with_wit));
}

TEST_CASE("cross-key verification fails") {
    KeyPair a = KeyPair::from_name("alice");
    KeyPair b = KeyPair::from_name("bob");
    Transaction tx = sample_tx(a.public_key);
    CHECK_FALSE(verify_tx(b.public_key, sign_tx(a, tx), tx));
}

TEST_CASE("verification fails after mutating an output value") {
    KeyPair kp = KeyPair::from_name("alice");
    Transaction tx = sample_tx(kp.public_key);
    Bytes sig = sign_tx(kp, tx);
    Transaction mutated = tx;
    mutated.outputs[0].val += 1;
    CHECK_FALSE(verify_tx(kp.public_key, sig, mutated));
}

TEST_CASE("signing is deterministic") {
    KeyPair kp = KeyPair::from_name("carol");
    Transaction tx = sample_tx(kp.public_key);
    CHECK(sign_tx(kp, tx) == sign_tx(kp, tx));
}

TEST_CASE("malformed inputs verify false, malformed keys throw on signing") {
    KeyPair kp = KeyPair::from_name("alice");
    Transaction tx = sample_tx(kp.public_key);
    CHECK_FALSE(verify_tx(Bytes{1, 2, 3}, sign_tx(kp, tx), tx));
    CHECK_FALSE(verify_tx(kp.public_key, Bytes{9, 9}, tx));
    CHECK_THROWS_AS(sign_bytes(Bytes{1}, Bytes{}), std::invalid_argument);
}

TEST_CASE("key derivation from names is reproducible and distinct") {
    CHECK(KeyPair::from_name("A").public_key == KeyPair::from_name("A").public_key);
    CHECK(KeyPair::from_name("A").public_key != KeyPair::from_name("B").public_key);
}
