#include "gae/strategy.hpp"

#include <stdexcept>

namespace gae {

std::string to_string(ProtocolKind protocol) {
    switch (protocol) {
        case ProtocolKind::Htlc: return "HTLC";
        case ProtocolKind::HtlcMultiSig: return "HTLC_MS";
        case ProtocolKind::HtlcMultiSecret: return "HTLC_MK";
        case ProtocolKind::Mphtlc: return "MPHTLC";
    }
    return "?";
}

std::string to_string(LockMode mode) {
    return mode == LockMode::PerAsset ? "per-asset" : "single-tx";
}

std::optional<ProtocolKind> parse_protocol(const std::string& text) {
    if (text == "HTLC") return ProtocolKind::Htlc;
    if (text == "HTLC_MS") return ProtocolKind::HtlcMultiSig;
    if (text == "HTLC_MK") return ProtocolKind::HtlcMultiSecret;
    if (text == "MPHTLC") return ProtocolKind::Mphtlc;
    return std::nullopt;
}

std::string Strategy::str() const {
    switch (kind) {
        case Kind::Honest: return "honest";
        case Kind::AbortAt: return "abort_at(" + std::to_string(step) + ")";
        case Kind::WithholdSecret: return "withhold_secret";
        case Kind::ColludeRelock: {
            std::string inner;
            for (const auto& p : partners) inner += (inner.empty() ? "" : ",") + p.value;
            return "collude_relock(" + inner + ")";
        }
        case Kind::MpcDelay: return "mpc_delay(" + std::to_string(delayTicks) + ")";
        case Kind::MpcAbort: return "mpc_abort";
    }
    return "?";
}

const Strategy& StrategyProfile::of(const PartyId& party) const {
    auto it = assignment.find(party);
    if (it == assignment.end()) throw std::invalid_argument("no strategy for " + party.value);
    return it->second;
}

int StrategyProfile::deviator_count() const {
    int n = 0;
    for (const auto& [p, s] : assignment)
        if (s.deviates()) ++n;
    return n;
}

std::string StrategyProfile::str() const {
    std::string out;
    for (const auto& [p, s] : assignment)
        out += (out.empty() ? "" : ",") + p.value + "=" + s.str();
    return out;
}

StrategyProfile StrategyProfile::all_honest(const GaeInstance& instance) {
    StrategyProfile profile;
    for (const auto& p : instance.parties) profile.assignment[p] = Strategy::honest();
    return profile;
}

int step_count(ProtocolKind protocol) {
    switch (protocol) {
        case ProtocolKind::Htlc: return 5;
        case ProtocolKind::HtlcMultiSig: return 5;
        case ProtocolKind::HtlcMultiSecret: return 5;
        case ProtocolKind::Mphtlc: return 6;
    }
    return 0;
}

std::vector<std::string> validate_profile(const GaeInstance& instance, ProtocolKind protocol,
                                          const StrategyProfile& profile) {
    std::vector<std::string> problems;
    for (const auto& p : instance.parties)
        if (!profile.assignment.count(p))
            problems.push_back("no strategy assigned to " + p.value);
    for (const auto& [p, s] : profile.assignment) {
        if (!instance.parties.count(p)) {
            problems.push_back("strategy for unknown party " + p.value);
            continue;
        }
        switch (s.kind) {
            case Strategy::Kind::AbortAt:
                if (s.step < 1 || s.step > step_count(protocol))
                    problems.push_back("abort step out of range for " + p.value);
                break;
            case Strategy::Kind::ColludeRelock:
                if (s.partners.empty())
                    problems.push_back("collude_relock without partners for " + p.value);
                for (const auto& partner : s.partners) {
                    if (partner == p)
                        problems.push_back(p.value + " cannot collude with itself");
                    else if (!instance.parties.count(partner))
                        problems.push_back("unknown collusion partner " + partner.value);
                }
                break;
            case Strategy::Kind::MpcDelay:
                if (s.delayTicks < 1)
                    problems.push_back("mpc_delay needs a positive tick count for " + p.value);
                break;
            default:
                break;
        }
    }
    return problems;
}

}  // namespace gae
