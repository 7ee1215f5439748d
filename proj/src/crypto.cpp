// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "covtok/crypto.hpp"

#include <sodium.h>

#include <mutex>
#include <sstream>

namespace covtok {

namespace {

void ensure_sodium() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
    });
}

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string to_hex(const Bytes& b) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(b.size() * 2);
    for (std::uint8_t c : b) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

Bytes from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
        out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    return out;
}

std::string atom_to_string(const Atom& a) {
    if (is_int(a)) {
        std::ostringstream os;
        os << as_int(a);
        return os.str();
    }
    return "0x" + to_hex(as_bytes(a));
}

bool atom_eq(const Atom& a, const Atom& b) {
    if (a.index() != b.index()) return false;
    if (is_int(a)) return as_int(a) == as_int(b);
    return as_bytes(a) == as_bytes(b);
}

void Encoder::u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8)
        out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void Encoder::blob(const Bytes& b) {
    u64(b.size());
    raw(b);
}

void Encoder::bigint(const BigInt& v) {
    u8(v < 0 ? 1 : 0);
    Bytes mag;
    BigInt abs = v < 0 ? BigInt(-v) : v;
    export_bits(abs, std::back_inserter(mag), 8);
    // export_bits yields an empty sequence for zero; keep that (length prefix
    // still makes the encoding injective).
    blob(mag);
}

void Encoder::atom(const Atom& a) {
    if (is_int(a)) {
        u8(0);
        bigint(as_int(a));
    } else {
        u8(1);
        blob(as_bytes(a));
    }
}

void Encoder::atoms(const std::vector<Atom>& seq) {
    u64(seq.size());
    for (const Atom& a : seq) atom(a);
}

std::uint8_t Decoder::u8() {
    if (pos_ >= data_.size()) throw DecodeError("unexpected end of input");
    return data_[pos_++];
}

std::uint64_t Decoder::u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | u8();
    return v;
}

Bytes Decoder::blob() {
    std::uint64_t n = u64();
    if (n > data_.size() - pos_) throw DecodeError("blob length exceeds input");
    Bytes out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
              data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
}

BigInt Decoder::bigint() {
    std::uint8_t sign = u8();
    if (sign > 1) throw DecodeError("bad bigint sign byte");
    Bytes mag = blob();
    BigInt v = 0;
    if (!mag.empty()) import_bits(v, mag.begin(), mag.end(), 8);
    return sign ? BigInt(-v) : v;
}

Atom Decoder::atom() {
    std::uint8_t tag = u8();
    if (tag == 0) return Atom(bigint());
    if (tag == 1) return Atom(blob());
    throw DecodeError("bad atom tag");
}

std::vector<Atom> Decoder::atoms() {
    std::uint64_t n = u64();
    std::vector<Atom> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(atom());
    return out;
}

void Decoder::expect_done() const {
    if (!done()) throw DecodeError("trailing bytes after decoded value");
}

std::string Digest::hex() const { return to_hex(Bytes(bytes.begin(), bytes.end())); }

Digest Digest::from_hex(const std::string& hex) {
    Bytes raw = covtok::from_hex(hex);
    if (raw.size() != 32) throw std::invalid_argument("digest must be 32 bytes");
    Digest d;
    std::copy(raw.begin(), raw.end(), d.bytes.begin());
    return d;
}

Digest sha256(const Bytes& data) {
    ensure_sodium();
    Digest d;
    crypto_hash_sha256(d.bytes.data(), data.data(), data.size());
    return d;
}

KeyPair KeyPair::from_seed(const Bytes& seed32) {
    ensure_sodium();
    if (seed32.size() != crypto_sign_SEEDBYTES)
        throw std::invalid_argument("key seed must be 32 bytes");
    KeyPair kp;
    kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
    kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed32.data());
    return kp;
}

KeyPair KeyPair::from_name(const std::string& name) {
    std::string tagged = "covtok:user:" + name;
    Bytes seed = sha256(Bytes(tagged.begin(), tagged.end())).to_bytes();
    return from_seed(seed);
}

Bytes sign_bytes(const Bytes& secret_key, const Bytes& message) {
    ensure_sodium();
    if (secret_key.size() != crypto_sign_SECRETKEYBYTES)
        throw std::invalid_argument("malformed secret key");
    Bytes sig(crypto_sign_BYTES);
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(),
                         secret_key.data());
    return sig;
}

bool verify_bytes(const Bytes& public_key, const Bytes& signature, const Bytes& message) {
    ensure_sodium();
    if (public_key.size() != crypto_sign_PUBLICKEYBYTES) return false;
    if (signature.size() != crypto_sign_BYTES) return false;
    return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                       public_key.data()) == 0;
}

}  // namespace covtok
