#include "gae/ledger.hpp"

#include "gae/digest.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace gae {

std::string Event::line() const {
    return std::to_string(tick) + "|" + ledger + "|" + kind + "|" + asset + "|" + details;
}

Event parse_event_line(const std::string& line) {
    Event e;
    std::size_t pos = 0;
    auto next = [&](bool last) {
        std::size_t cut = last ? std::string::npos : line.find('|', pos);
        if (!last && cut == std::string::npos)
            throw std::invalid_argument("malformed event line: " + line);
        std::string field = line.substr(pos, last ? std::string::npos : cut - pos);
        pos = last ? line.size() : cut + 1;
        return field;
    };
    e.tick = std::stoll(next(false));
    e.ledger = next(false);
    e.kind = next(false);
    e.asset = next(false);
    e.details = next(true);
    return e;
}

Bytes LockPayload::canonical_bytes() const {
    std::ostringstream os;
    os << "lock;asset=L" << asset.ledger << ":" << asset.name << ";guards=";
    for (std::size_t i = 0; i < guards.size(); ++i) os << (i ? "," : "") << hex(guards[i]);
    os << ";recipients=" << format_party_set(recipients) << ";expiry=" << expiryTick;
    const std::string s = os.str();
    return Bytes(s.begin(), s.end());
}

HashValue LockPayload::digest() const { return sha256(canonical_bytes()); }

ConsentRecord make_consent(const PartyId& party, const LockPayload& payload) {
    return {party, payload.digest()};
}

bool LockEntry::fully_satisfied() const {
    return std::all_of(satisfied.begin(), satisfied.end(), [](bool b) { return b; });
}

std::string to_string(LedgerErrorKind kind) {
    switch (kind) {
        case LedgerErrorKind::MissingConsent: return "MissingConsent";
        case LedgerErrorKind::AlreadyLocked: return "AlreadyLocked";
        case LedgerErrorKind::ExpiryInPast: return "ExpiryInPast";
        case LedgerErrorKind::HashMismatch: return "HashMismatch";
        case LedgerErrorKind::LockExpired: return "LockExpired";
        case LedgerErrorKind::NotLocked: return "NotLocked";
        case LedgerErrorKind::NotExpired: return "NotExpired";
    }
    return "?";
}

LedgerState::LedgerState(std::string name, OwnershipMap initialOwners)
    : name_(std::move(name)), owners_(std::move(initialOwners)) {}

const LockEntry* LedgerState::read_lock(const AssetId& asset) const {
    auto it = locks_.find(asset);
    return it == locks_.end() ? nullptr : &it->second;
}

void LedgerState::append_event(std::string kind, std::string asset, std::string details) {
    assert(events_.empty() || events_.back().tick <= clock_);
    events_.push_back({clock_, name_, std::move(kind), std::move(asset), std::move(details)});
}

std::optional<LedgerError> LedgerState::check_lock(const LockPayload& payload,
                                                   const std::vector<ConsentRecord>& consents) const {
    if (locks_.count(payload.asset))
        return LedgerError{LedgerErrorKind::AlreadyLocked, payload.asset, std::nullopt};
    if (payload.expiryTick <= clock_)
        return LedgerError{LedgerErrorKind::ExpiryInPast, payload.asset, std::nullopt};
    const HashValue want = payload.digest();
    for (const auto& owner : owners_.owners(payload.asset)) {
        const bool signed_ = std::any_of(consents.begin(), consents.end(), [&](const ConsentRecord& c) {
            return c.party == owner && c.payloadDigest == want;
        });
        if (!signed_)
            return LedgerError{LedgerErrorKind::MissingConsent, payload.asset, owner};
    }
    return std::nullopt;
}

void LedgerState::apply_lock(const LockPayload& payload, const std::vector<ConsentRecord>& consents) {
    LockEntry entry;
    entry.asset = payload.asset;
    entry.guards = payload.guards;
    entry.satisfied.assign(payload.guards.size(), false);
    entry.recipients = payload.recipients;
    entry.expiryTick = payload.expiryTick;
    entry.createdTick = clock_;
    const HashValue want = payload.digest();
    for (const auto& c : consents)
        if (c.payloadDigest == want) entry.consents.push_back(c);
    std::sort(entry.consents.begin(), entry.consents.end());
    locks_[payload.asset] = std::move(entry);
}

namespace {

std::string join_guards(const std::vector<HashValue>& guards) {
    std::string out;
    for (std::size_t i = 0; i < guards.size(); ++i) out += (i ? "," : "") + hex(guards[i]);
    return out;
}

std::string consent_parties(const std::vector<ConsentRecord>& consents, const LockPayload& payload) {
    PartySet parties;
    const HashValue want = payload.digest();
    for (const auto& c : consents)
        if (c.payloadDigest == want) parties.insert(c.party);
    return format_party_set(parties);
}

template <typename T, typename F>
std::string join_groups(const std::vector<T>& items, F&& render) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "+" : "") + render(items[i]);
    return out;
}

}  // namespace

LedgerOpResult LedgerState::lock_assets(const std::vector<LockPayload>& payloads,
                                        const std::vector<ConsentRecord>& consents,
                                        TxMode mode, const PartyId& submitter) {
    LedgerOpResult result;
    if (payloads.empty()) return result;

    // Duplicate assets within one call are a caller bug, not a modeled error.
    for (std::size_t i = 0; i < payloads.size(); ++i)
        for (std::size_t j = i + 1; j < payloads.size(); ++j)
            if (payloads[i].asset == payloads[j].asset)
                throw std::invalid_argument("duplicate asset in lock batch");

    if (mode == TxMode::SingleTx) {
        for (const auto& p : payloads)
            if (auto err = check_lock(p, consents)) result.errors.push_back(*err);
        if (!result.ok()) return result;
        for (const auto& p : payloads) apply_lock(p, consents);
        const std::string assetField =
            join_groups(payloads, [](const LockPayload& p) { return p.asset.name; });
        const std::string details =
            "hash=" + join_groups(payloads, [](const LockPayload& p) { return join_guards(p.guards); }) +
            ";recipients=" + join_groups(payloads, [](const LockPayload& p) { return format_party_set(p.recipients); }) +
            ";expiry=" + join_groups(payloads, [](const LockPayload& p) { return std::to_string(p.expiryTick); }) +
            ";consents=" + join_groups(payloads, [&](const LockPayload& p) { return consent_parties(consents, p); }) +
            ";by=" + submitter.value;
        append_event("lock", assetField, details);
        return result;
    }

    for (const auto& p : payloads) {
        if (auto err = check_lock(p, consents)) {
            result.errors.push_back(*err);
            continue;
        }
        apply_lock(p, consents);
        append_event("lock", p.asset.name,
                     "hash=" + join_guards(p.guards) +
                         ";recipients=" + format_party_set(p.recipients) +
                         ";expiry=" + std::to_string(p.expiryTick) +
                         ";consents=" + consent_parties(consents, p) +
                         ";by=" + submitter.value);
    }
    return result;
}

LedgerOpResult LedgerState::claim_assets(const std::vector<AssetId>& assets,
                                         const std::vector<Preimage>& preimages,
                                         const PartyId& submitter, TxMode mode) {
    LedgerOpResult result;
    if (assets.empty()) return result;

    struct Prepared {
        AssetId asset;
        std::vector<bool> satisfied;
        std::vector<Preimage> reveals;
        bool complete = false;
    };

    auto prepare = [&](const AssetId& asset) -> std::pair<std::optional<LedgerError>, Prepared> {
        auto it = locks_.find(asset);
        if (it == locks_.end())
            return {LedgerError{LedgerErrorKind::NotLocked, asset, std::nullopt}, {}};
        const LockEntry& entry = it->second;
        if (clock_ >= entry.expiryTick)
            return {LedgerError{LedgerErrorKind::LockExpired, asset, std::nullopt}, {}};
        Prepared prep{asset, entry.satisfied, entry.reveals, false};
        for (const auto& pre : preimages) {
            const HashValue d = sha256(pre);
            bool matched = false;
            for (std::size_t g = 0; g < entry.guards.size(); ++g) {
                if (entry.guards[g] != d) continue;
                matched = true;
                if (!prep.satisfied[g]) {
                    prep.satisfied[g] = true;
                    prep.reveals.push_back(pre);
                }
                break;
            }
            if (!matched)
                return {LedgerError{LedgerErrorKind::HashMismatch, asset, std::nullopt}, {}};
        }
        prep.complete = std::all_of(prep.satisfied.begin(), prep.satisfied.end(),
                                    [](bool b) { return b; });
        return {std::nullopt, prep};
    };

    const std::string preimageField =
        join_groups(preimages, [](const Preimage& p) { return hex(p.bytes); });

    auto reject = [&](const std::string& assetField, const LedgerError& err) {
        append_event("reject", assetField,
                     "op=claim;error=" + to_string(err.kind) + ";by=" + submitter.value);
        result.errors.push_back(err);
    };

    if (mode == TxMode::SingleTx) {
        std::vector<Prepared> preps;
        const std::string assetField =
            join_groups(assets, [](const AssetId& a) { return a.name; });
        for (const auto& asset : assets) {
            auto [err, prep] = prepare(asset);
            if (!err && !prep.complete)
                err = LedgerError{LedgerErrorKind::HashMismatch, asset, std::nullopt};
            if (err) {
                reject(assetField, *err);
                return result;
            }
            preps.push_back(std::move(prep));
        }
        std::string recipientsField;
        for (std::size_t i = 0; i < preps.size(); ++i)
            recipientsField += (i ? "+" : "") + format_party_set(locks_.at(preps[i].asset).recipients);
        for (const auto& prep : preps) {
            owners_.set_owners(prep.asset, locks_.at(prep.asset).recipients);
            locks_.erase(prep.asset);
        }
        append_event("claim", assetField,
                     "preimage=" + preimageField + ";recipients=" + recipientsField +
                         ";by=" + submitter.value);
        return result;
    }

    for (const auto& asset : assets) {
        auto [err, prep] = prepare(asset);
        if (err) {
            reject(asset.name, *err);
            continue;
        }
        LockEntry& entry = locks_.at(asset);
        if (prep.complete) {
            owners_.set_owners(asset, entry.recipients);
            append_event("claim", asset.name,
                         "preimage=" + preimageField +
                             ";recipients=" + format_party_set(entry.recipients) +
                             ";by=" + submitter.value);
            locks_.erase(asset);
        } else {
            entry.satisfied = prep.satisfied;
            entry.reveals = prep.reveals;
            append_event("reveal", asset.name,
                         "preimage=" + preimageField + ";by=" + submitter.value);
        }
    }
    return result;
}

LedgerOpResult LedgerState::unlock_assets(const std::vector<AssetId>& assets,
                                          const PartyId& submitter) {
    LedgerOpResult result;
    for (const auto& asset : assets) {
        auto it = locks_.find(asset);
        if (it == locks_.end()) {
            result.errors.push_back({LedgerErrorKind::NotLocked, asset, std::nullopt});
            continue;
        }
        if (clock_ < it->second.expiryTick) {
            result.errors.push_back({LedgerErrorKind::NotExpired, asset, std::nullopt});
            continue;
        }
        locks_.erase(it);
        append_event("unlock", asset.name, "by=" + submitter.value);
    }
    return result;
}

void LedgerState::advance_clock(Tick ticks) {
    if (ticks < 1) throw std::invalid_argument("clock advance must be >= 1 tick");
    clock_ += ticks;
}

namespace {

PartySet parse_party_set(const std::string& text) {
    if (text.size() < 2 || text.front() != '{' || text.back() != '}')
        throw std::invalid_argument("malformed party set: " + text);
    PartySet out;
    std::string inner = text.substr(1, text.size() - 2);
    std::size_t pos = 0;
    while (pos < inner.size()) {
        std::size_t cut = inner.find(',', pos);
        if (cut == std::string::npos) cut = inner.size();
        out.insert(PartyId{inner.substr(pos, cut - pos)});
        pos = cut + 1;
    }
    return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t cut = text.find(sep, pos);
        if (cut == std::string::npos) {
            out.push_back(text.substr(pos));
            return out;
        }
        out.push_back(text.substr(pos, cut - pos));
        pos = cut + 1;
    }
}

std::string detail_value(const std::string& details, const std::string& key) {
    for (const auto& pair : split(details, ';')) {
        const std::size_t eq = pair.find('=');
        if (eq != std::string::npos && pair.substr(0, eq) == key) return pair.substr(eq + 1);
    }
    throw std::invalid_argument("missing detail key " + key + " in: " + details);
}

}  // namespace

std::pair<OwnershipMap, OwnershipMap> replay_events(const OwnershipMap& initial1,
                                                    const OwnershipMap& initial2,
                                                    const std::vector<Event>& events) {
    OwnershipMap state1 = initial1;
    OwnershipMap state2 = initial2;
    for (const auto& e : events) {
        if (e.kind != "claim") continue;
        OwnershipMap& state = e.ledger == "L1" ? state1 : state2;
        const int ledger = e.ledger == "L1" ? 1 : 2;
        const std::vector<std::string> names = split(e.asset, '+');
        const std::vector<std::string> groups = split(detail_value(e.details, "recipients"), '+');
        if (names.size() != groups.size())
            throw std::invalid_argument("claim event group mismatch: " + e.line());
        for (std::size_t i = 0; i < names.size(); ++i)
            state.set_owners(AssetId{ledger, names[i]}, parse_party_set(groups[i]));
    }
    return {state1, state2};
}

}  // namespace gae
