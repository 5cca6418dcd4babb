#include "gae/adversary.hpp"

#include <algorithm>
#include <stdexcept>

namespace gae {

const Rational& PayoffVector::of(const PartyId& party) const {
    auto it = perParty.find(party);
    if (it == perParty.end()) throw std::invalid_argument("no payoff for " + party.value);
    return it->second;
}

PayoffVector compute_payoffs(const GaeInstance& instance, const OwnershipMap& final1,
                             const OwnershipMap& final2) {
    PayoffVector payoffs;
    for (const auto& p : instance.parties) payoffs.perParty[p] = Rational(0, 1);
    for (int ledger : {1, 2}) {
        const OwnershipMap& state = ledger == 1 ? final1 : final2;
        for (const auto& a : instance.assets(ledger)) {
            const PartySet& owners = state.owners(a);
            for (const auto& p : owners)
                payoffs.perParty[p] += Rational(1, static_cast<long long>(owners.size()));
        }
    }
    return payoffs;
}

std::vector<Strategy> strategy_library(const GaeInstance& instance, ProtocolKind protocol,
                                       const PartyId& party) {
    std::vector<Strategy> lib;
    auto add_partners = [&] {
        for (const auto& q : instance.parties)
            if (q != party) lib.push_back(Strategy::collude_relock({q}));
    };
    switch (protocol) {
        case ProtocolKind::Htlc:
            lib = {Strategy::abort_at(2), Strategy::abort_at(3), Strategy::abort_at(4),
                   Strategy::abort_at(5), Strategy::withhold_secret()};
            break;
        case ProtocolKind::HtlcMultiSig:
            lib = {Strategy::abort_at(2), Strategy::abort_at(3), Strategy::abort_at(4),
                   Strategy::abort_at(5)};
            add_partners();
            break;
        case ProtocolKind::HtlcMultiSecret:
            lib = {Strategy::abort_at(2), Strategy::abort_at(3), Strategy::withhold_secret()};
            add_partners();
            break;
        case ProtocolKind::Mphtlc:
            lib = {Strategy::abort_at(2), Strategy::abort_at(3), Strategy::abort_at(5),
                   Strategy::withhold_secret(), Strategy::mpc_abort(), Strategy::mpc_delay(2)};
            add_partners();
            break;
    }
    return lib;
}

std::vector<StrategyProfile> enumerate_profiles(const GaeInstance& instance,
                                                ProtocolKind protocol, int maxDeviators) {
    const std::vector<PartyId> parties(instance.parties.begin(), instance.parties.end());
    if (maxDeviators < 0 || maxDeviators > static_cast<int>(parties.size()))
        throw std::invalid_argument("deviator bound must be within the party count");

    std::vector<std::vector<Strategy>> libs;
    for (const auto& p : parties) libs.push_back(strategy_library(instance, protocol, p));

    std::vector<StrategyProfile> out;
    const StrategyProfile honest = StrategyProfile::all_honest(instance);

    // One combination of deviating parties at a time, then the cartesian
    // product of their library entries.
    std::vector<int> combo;
    auto emit_assignments = [&](auto&& self, std::size_t pos, StrategyProfile& profile) -> void {
        if (pos == combo.size()) {
            out.push_back(profile);
            return;
        }
        const int partyIdx = combo[pos];
        for (const auto& s : libs[partyIdx]) {
            profile.assignment[parties[partyIdx]] = s;
            self(self, pos + 1, profile);
        }
        profile.assignment[parties[partyIdx]] = Strategy::honest();
    };
    auto choose = [&](auto&& self, int start, int remaining) -> void {
        if (remaining == 0) {
            StrategyProfile profile = honest;
            emit_assignments(emit_assignments, 0, profile);
            return;
        }
        for (int i = start; i + remaining <= static_cast<int>(parties.size()); ++i) {
            combo.push_back(i);
            self(self, i + 1, remaining - 1);
            combo.pop_back();
        }
    };
    for (int d = 0; d <= maxDeviators; ++d) {
        combo.clear();
        choose(choose, 0, d);
    }
    return out;
}

std::vector<NamedAttack> collusion_playbook(const GaeInstance& instance, ProtocolKind protocol) {
    if (protocol == ProtocolKind::Htlc)
        throw std::invalid_argument("no collusion playbook for the classic swap");

    std::vector<NamedAttack> out;
    if (instance.exchangeSet2.size() != 1) return out;
    const AssetId n = *instance.exchangeSet2.begin();
    if (instance.io2.owners(n).size() != 1) return out;
    const PartyId counterparty = *instance.io2.owners(n).begin();
    const PartySet o1 = initial_owner_union(instance);
    if (o1.size() < 2) return out;

    for (const auto& w : o1) {
        if (w == counterparty) continue;
        if (!instance.fo2.owners(n).count(w)) continue;  // beneficiary must stand to gain
        StrategyProfile profile = StrategyProfile::all_honest(instance);
        profile.assignment[w] = Strategy::collude_relock({counterparty});
        profile.assignment[counterparty] = Strategy::collude_relock({w});
        const std::string pair = "(" + w.value + "," + counterparty.value + ")";
        if (protocol == ProtocolKind::HtlcMultiSig || protocol == ProtocolKind::Mphtlc)
            out.push_back({"ms_collusion" + pair, profile});
        if (protocol == ProtocolKind::HtlcMultiSecret || protocol == ProtocolKind::Mphtlc)
            out.push_back({"mk_withhold_relock" + pair, profile});
    }
    return out;
}

DeviationComparison evaluate_deviation(const GaeInstance& instance, const PartyId& deviator,
                                       const Strategy& deviation, const RunConfig& config) {
    if (classify(instance).kind != ExchangeKind::FullGclsMix)
        throw std::invalid_argument("deviation analysis applies to swap-bearing instances");
    if (!instance.parties.count(deviator)) throw std::invalid_argument("unknown deviator");

    const StrategyProfile honest = StrategyProfile::all_honest(instance);
    StrategyProfile deviating = honest;
    deviating.assignment[deviator] = deviation;

    const RunOutcome honestRun = run_mphtlc(instance, honest, config);
    const RunOutcome deviantRun = run_mphtlc(instance, deviating, config);

    const PayoffVector honestPay =
        compute_payoffs(instance, honestRun.finalState1, honestRun.finalState2);
    const PayoffVector deviantPay =
        compute_payoffs(instance, deviantRun.finalState1, deviantRun.finalState2);

    return {deviator, deviation, honestPay.of(deviator), deviantPay.of(deviator)};
}

}  // namespace gae
