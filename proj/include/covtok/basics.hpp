// Copyright (c) 2026 The covtok developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVTOK_BASICS_HPP
#define COVTOK_BASICS_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace covtok {

using BigInt = boost::multiprecision::cpp_int;
using Bytes = std::vector<std::uint8_t>;

// Atoms are the leaf values stored in output arg sequences, witnesses and
// script sequence values: unbounded integers or raw byte strings.
using Atom = std::variant<BigInt, Bytes>;

inline bool is_int(const Atom& a) { return std::holds_alternative<BigInt>(a); }
inline bool is_bytes(const Atom& a) { return std::holds_alternative<Bytes>(a); }
inline const BigInt& as_int(const Atom& a) { return std::get<BigInt>(a); }
inline const Bytes& as_bytes(const Atom& a) { return std::get<Bytes>(a); }

std::string to_hex(const Bytes& b);
Bytes from_hex(const std::string& hex);  // throws std::invalid_argument

std::string atom_to_string(const Atom& a);
bool atom_eq(const Atom& a, const Atom& b);

// Canonical byte encoder shared by transaction serialization, script
// serialization and value hashing. Every field is tagged or length-prefixed
// so that distinct structures never encode equal.
class Encoder {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u64(std::uint64_t v);
    void raw(const Bytes& b) { out_.insert(out_.end(), b.begin(), b.end()); }
    void blob(const Bytes& b);     // length-prefixed
    void bigint(const BigInt& v);  // sign byte + length-prefixed magnitude
    void atom(const Atom& a);
    void atoms(const std::vector<Atom>& seq);

    const Bytes& bytes() const { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

// Cursor over canonical bytes; throws DecodeError on malformed input.
struct DecodeError : std::runtime_error {
    explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

class Decoder {
public:
    explicit Decoder(const Bytes& data) : data_(data) {}

    std::uint8_t u8();
    std::uint64_t u64();
    Bytes blob();
    BigInt bigint();
    Atom atom();
    std::vector<Atom> atoms();
    bool done() const { return pos_ == data_.size(); }
    void expect_done() const;

private:
    const Bytes& data_;
    std::size_t pos_ = 0;
};

}  // namespace covtok

#endif
