#include "gae/model.hpp"

#include <stdexcept>

namespace gae {

const PartySet& OwnershipMap::owners(const AssetId& a) const {
    auto it = entries.find(a);
    if (it == entries.end()) throw std::out_of_range("no ownership entry for " + a.name);
    return it->second;
}

std::string Violation::describe() const {
    std::string what;
    switch (code) {
        case Code::EmptyPartyId: what = "empty party identifier"; break;
        case Code::DuplicateOrForeignLedgerAsset: what = "asset declared under the wrong ledger"; break;
        case Code::ExchangeSetNotSubset: what = "exchange set entry is not a declared asset"; break;
        case Code::MissingOwnership: what = "missing io/fo entry for asset"; break;
        case Code::StrayOwnership: what = "ownership entry for undeclared asset"; break;
        case Code::EmptyOwnerSet: what = "empty owner set"; break;
        case Code::UnknownParty: what = "owner is not in the party set"; break;
        case Code::FoEqualsIoForExchangedAsset: what = "FO equals IO for exchanged asset"; break;
        case Code::FoDiffersForUnexchangedAsset: what = "FO differs from IO for unexchanged asset"; break;
    }
    if (asset) what += " [" + (asset->ledger == 1 ? std::string("L1:") : std::string("L2:")) + asset->name + "]";
    if (party) what += " [" + party->value + "]";
    return what;
}

namespace {

void check_ownership_map(const GaeInstance& instance, const OwnershipMap& map,
                         const AssetSet& assets, std::vector<Violation>& out) {
    for (const auto& a : assets) {
        if (!map.contains(a)) {
            out.push_back({Violation::Code::MissingOwnership, a, std::nullopt});
            continue;
        }
        const PartySet& owners = map.entries.at(a);
        if (owners.empty())
            out.push_back({Violation::Code::EmptyOwnerSet, a, std::nullopt});
        for (const auto& p : owners)
            if (!instance.parties.count(p))
                out.push_back({Violation::Code::UnknownParty, a, p});
    }
    for (const auto& [a, owners] : map.entries)
        if (!assets.count(a))
            out.push_back({Violation::Code::StrayOwnership, a, std::nullopt});
}

}  // namespace

ValidationResult validate_instance(const GaeInstance& instance) {
    ValidationResult result;
    auto& out = result.violations;

    for (const auto& p : instance.parties)
        if (p.value.empty())
            out.push_back({Violation::Code::EmptyPartyId, std::nullopt, std::nullopt});

    for (int ledger : {1, 2}) {
        const AssetSet& assets = instance.assets(ledger);
        const AssetSet& exchanged = instance.exchange_set(ledger);

        for (const auto& a : assets)
            if (a.ledger != ledger)
                out.push_back({Violation::Code::DuplicateOrForeignLedgerAsset, a, std::nullopt});

        for (const auto& a : exchanged)
            if (!assets.count(a))
                out.push_back({Violation::Code::ExchangeSetNotSubset, a, std::nullopt});

        check_ownership_map(instance, instance.io(ledger), assets, out);
        check_ownership_map(instance, instance.fo(ledger), assets, out);

        for (const auto& a : assets) {
            if (!instance.io(ledger).contains(a) || !instance.fo(ledger).contains(a)) continue;
            const PartySet& io = instance.io(ledger).entries.at(a);
            const PartySet& fo = instance.fo(ledger).entries.at(a);
            if (io.empty() || fo.empty()) continue;
            if (exchanged.count(a)) {
                if (fo == io)
                    out.push_back({Violation::Code::FoEqualsIoForExchangedAsset, a, std::nullopt});
            } else if (fo != io) {
                out.push_back({Violation::Code::FoDiffersForUnexchangedAsset, a, std::nullopt});
            }
        }
    }
    return result;
}

GktPartition derive_gkt(const GaeInstance& instance, int ledger) {
    GktPartition gkt;
    for (const auto& a : instance.exchange_set(ledger)) {
        const PartySet& io = instance.io(ledger).owners(a);
        const PartySet& fo = instance.fo(ledger).owners(a);
        gkt.givers[a] = set_minus(io, fo);
        gkt.keepers[a] = set_intersect(io, fo);
        gkt.takers[a] = set_minus(fo, io);
    }
    return gkt;
}

ExchangeClassification classify(const GaeInstance& instance) {
    const GktPartition g1 = derive_gkt(instance, 1);
    const GktPartition g2 = derive_gkt(instance, 2);

    auto union_of = [](const std::map<AssetId, PartySet>& sets) {
        PartySet out;
        for (const auto& [a, s] : sets) out.insert(s.begin(), s.end());
        return out;
    };

    const PartySet holders1 = set_union(union_of(g1.givers), union_of(g1.keepers));
    const PartySet holders2 = set_union(union_of(g2.givers), union_of(g2.keepers));

    ExchangeClassification c;
    c.s12 = set_intersect(holders1, union_of(g2.takers));
    c.s21 = set_intersect(holders2, union_of(g1.takers));
    if (c.s12.empty() && c.s21.empty())
        c.kind = ExchangeKind::OnlyGult;
    else if (c.s12.empty() || c.s21.empty())
        c.kind = ExchangeKind::GclrAndGult;
    else
        c.kind = ExchangeKind::FullGclsMix;
    return c;
}

PartySet initial_owner_union(const GaeInstance& instance) {
    PartySet out;
    for (const auto& a : instance.exchangeSet1) {
        const PartySet& io = instance.io1.owners(a);
        out.insert(io.begin(), io.end());
    }
    return out;
}

AtomicityVerdict check_atomicity(const GaeInstance& instance,
                                 const OwnershipMap& finalState1,
                                 const OwnershipMap& finalState2,
                                 const PartyId& party) {
    if (!instance.parties.count(party))
        throw std::invalid_argument("unknown party: " + party.value);

    bool anyRelevant = false;
    bool allFinal = true;
    bool allInitial = true;
    for (int ledger : {1, 2}) {
        const OwnershipMap& state = ledger == 1 ? finalState1 : finalState2;
        for (const auto& a : instance.exchange_set(ledger)) {
            const PartySet& io = instance.io(ledger).owners(a);
            const PartySet& fo = instance.fo(ledger).owners(a);
            if (!io.count(party) && !fo.count(party)) continue;
            anyRelevant = true;
            const PartySet& now = state.owners(a);
            if (now != fo) allFinal = false;
            if (now != io) allInitial = false;
        }
    }
    if (!anyRelevant) return {party, Verdict::AllInitial};
    if (allFinal) return {party, Verdict::AllFinal};
    if (allInitial) return {party, Verdict::AllInitial};
    return {party, Verdict::Violated};
}

std::vector<AtomicityVerdict> check_atomicity_all(const GaeInstance& instance,
                                                  const OwnershipMap& finalState1,
                                                  const OwnershipMap& finalState2) {
    std::vector<AtomicityVerdict> out;
    for (const auto& p : instance.parties)
        out.push_back(check_atomicity(instance, finalState1, finalState2, p));
    return out;
}

std::string to_string(ExchangeKind kind) {
    switch (kind) {
        case ExchangeKind::OnlyGult: return "ONLY_GULT";
        case ExchangeKind::GclrAndGult: return "GCLR_AND_GULT";
        case ExchangeKind::FullGclsMix: return "FULL_GCLS_MIX";
    }
    return "?";
}

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::AllFinal: return "ALL_FINAL";
        case Verdict::AllInitial: return "ALL_INITIAL";
        case Verdict::Violated: return "VIOLATED";
    }
    return "?";
}

}  // namespace gae
