#pragma once

#include "gae/model.hpp"
#include "gae/types.hpp"

#include <map>
#include <optional>
#include <string>

namespace gae {

enum class ProtocolKind { Htlc, HtlcMultiSig, HtlcMultiSecret, Mphtlc };
enum class LockMode { PerAsset, SingleTx };

std::string to_string(ProtocolKind protocol);
std::string to_string(LockMode mode);
std::optional<ProtocolKind> parse_protocol(const std::string& text);

/// How a party plays one protocol run. Everything other than Honest is a
/// deviation; collusion marks both parties and the engines derive the roles
/// (the owner of the targeted counter-ledger asset plays the accomplice).
struct Strategy {
    enum class Kind {
        Honest,
        AbortAt,         // stop participating from the given step on
        WithholdSecret,  // refuse the reveal phase (F2 / own on-chain reveal)
        ColludeRelock,   // divert the counter-asset to the colluding subset
        MpcDelay,        // delay the F2 release by delayTicks (clamped)
        MpcAbort,        // abort the joint hash computation
    };

    Kind kind = Kind::Honest;
    int step = 0;          // AbortAt
    PartySet partners;     // ColludeRelock
    Tick delayTicks = 0;   // MpcDelay

    bool deviates() const { return kind != Kind::Honest; }
    std::string str() const;

    static Strategy honest() { return {}; }
    static Strategy abort_at(int step) { return {Kind::AbortAt, step, {}, 0}; }
    static Strategy withhold_secret() { return {Kind::WithholdSecret, 0, {}, 0}; }
    static Strategy collude_relock(PartySet partners) {
        return {Kind::ColludeRelock, 0, std::move(partners), 0};
    }
    static Strategy mpc_delay(Tick ticks) { return {Kind::MpcDelay, 0, {}, ticks}; }
    static Strategy mpc_abort() { return {Kind::MpcAbort, 0, {}, 0}; }

    auto operator<=>(const Strategy&) const = default;
};

struct StrategyProfile {
    std::map<PartyId, Strategy> assignment;

    const Strategy& of(const PartyId& party) const;
    bool honest(const PartyId& party) const { return !of(party).deviates(); }
    int deviator_count() const;
    std::string str() const;

    /// All-honest profile over the instance's parties.
    static StrategyProfile all_honest(const GaeInstance& instance);
};

/// Checks parameters against the instance and protocol: the profile must be
/// total, abort steps must exist, and collusion partners must be other
/// parties of the instance. Returns human-readable problems; empty means ok.
std::vector<std::string> validate_profile(const GaeInstance& instance, ProtocolKind protocol,
                                          const StrategyProfile& profile);
int step_count(ProtocolKind protocol);

}  // namespace gae
