#include "gae/types.hpp"

#include <algorithm>

namespace gae {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";
}

std::string hex(const Bytes& data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

std::string hex(const HashValue& h) {
    return hex(Bytes(h.bytes.begin(), h.bytes.end()));
}

Bytes from_hex(const std::string& text) {
    if (text.size() % 2 != 0) throw std::invalid_argument("odd hex length");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::invalid_argument("bad hex digit");
    };
    Bytes out;
    out.reserve(text.size() / 2);
    for (std::size_t i = 0; i < text.size(); i += 2)
        out.push_back(static_cast<std::uint8_t>(nibble(text[i]) << 4 | nibble(text[i + 1])));
    return out;
}

std::string format_party_set(const PartySet& parties) {
    std::string out = "{";
    bool first = true;
    for (const auto& p : parties) {
        if (!first) out.push_back(',');
        out += p.value;
        first = false;
    }
    out.push_back('}');
    return out;
}

PartySet set_union(const PartySet& a, const PartySet& b) {
    PartySet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

PartySet set_intersect(const PartySet& a, const PartySet& b) {
    PartySet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(out, out.begin()));
    return out;
}

PartySet set_minus(const PartySet& a, const PartySet& b) {
    PartySet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.begin()));
    return out;
}

}  // namespace gae
