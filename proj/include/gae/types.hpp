#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gae {

using Tick = std::int64_t;
using Bytes = std::vector<std::uint8_t>;

/// Opaque party identifier. Lexicographic order on the id string is the
/// tie-breaking rule for every deterministic traversal in the simulator.
struct PartyId {
    std::string value;
    auto operator<=>(const PartyId&) const = default;
};

/// An asset lives on exactly one of the two ledgers; (ledger, name) is unique
/// within an instance.
struct AssetId {
    int ledger = 1;  // 1 or 2
    std::string name;
    auto operator<=>(const AssetId&) const = default;
};

using PartySet = std::set<PartyId>;
using AssetSet = std::set<AssetId>;

/// 32-byte digest output of the designated hash function.
struct HashValue {
    std::array<std::uint8_t, 32> bytes{};
    auto operator<=>(const HashValue&) const = default;
};

struct Preimage {
    Bytes bytes;
    auto operator<=>(const Preimage&) const = default;
};

/// Exact fraction for payoff accounting (unit asset values, equal shares).
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    Rational& operator+=(const Rational& o) {
        *this = Rational(num * o.den + o.num * den, den * o.den);
        return *this;
    }
    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num * b.den < b.num * a.den;
    }
    friend bool operator<=(const Rational& a, const Rational& b) {
        return a == b || a < b;
    }
    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

std::string hex(const Bytes& data);
std::string hex(const HashValue& h);
Bytes from_hex(const std::string& text);

/// Renders "{A,B,C}" in lexicographic order; "{}" when empty.
std::string format_party_set(const PartySet& parties);

/// Set algebra helpers used all over the model derivations.
PartySet set_union(const PartySet& a, const PartySet& b);
PartySet set_intersect(const PartySet& a, const PartySet& b);
PartySet set_minus(const PartySet& a, const PartySet& b);

}  // namespace gae
