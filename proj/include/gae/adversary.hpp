#pragma once

#include "gae/protocol.hpp"
#include "gae/strategy.hpp"

#include <string>
#include <vector>

namespace gae {

/// Unit asset values with equal fractional shares: a party's payoff is the
/// sum of 1/|owners(a)| over every asset it co-owns at run end.
struct PayoffVector {
    std::map<PartyId, Rational> perParty;
    const Rational& of(const PartyId& party) const;
};

PayoffVector compute_payoffs(const GaeInstance& instance, const OwnershipMap& final1,
                             const OwnershipMap& final2);

/// The closed deviation library for one party under one protocol. The
/// exhaustiveness guarantee of the enumeration is relative to this library.
std::vector<Strategy> strategy_library(const GaeInstance& instance, ProtocolKind protocol,
                                       const PartyId& party);

/// Every profile with at most `maxDeviators` non-honest parties, instantiated
/// from the library. Deterministic order: deviator count, then party
/// combination, then library order.
std::vector<StrategyProfile> enumerate_profiles(const GaeInstance& instance,
                                                ProtocolKind protocol, int maxDeviators);

struct NamedAttack {
    std::string name;  // e.g. "ms_collusion(W,Y)"
    StrategyProfile profile;
};

/// The documented collusion profiles that fit the instance shape: the
/// counterparty diverts (or lapses and relocks) the counter-asset toward one
/// co-owner. Under the multi-party protocol the same profiles must come out
/// harmless.
std::vector<NamedAttack> collusion_playbook(const GaeInstance& instance, ProtocolKind protocol);

struct DeviationComparison {
    PartyId deviator;
    Strategy deviation;
    Rational honestPayoff;     // deviator's payoff when everyone is honest
    Rational deviatingPayoff;  // deviator's payoff under the deviation
    bool strictly_improves() const { return honestPayoff < deviatingPayoff; }
};

/// Runs the multi-party protocol twice (all-honest, then with the single
/// deviation) and compares the deviator's payoffs. Requires an instance
/// whose classification contains swaps.
DeviationComparison evaluate_deviation(const GaeInstance& instance, const PartyId& deviator,
                                       const Strategy& deviation, const RunConfig& config);

}  // namespace gae
