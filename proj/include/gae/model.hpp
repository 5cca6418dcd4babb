#pragma once

#include "gae/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gae {

/// Maps each asset to its (non-empty) set of co-owners.
struct OwnershipMap {
    std::map<AssetId, PartySet> entries;

    bool contains(const AssetId& a) const { return entries.count(a) != 0; }
    const PartySet& owners(const AssetId& a) const;
    void set_owners(const AssetId& a, PartySet owners) { entries[a] = std::move(owners); }

    auto operator<=>(const OwnershipMap&) const = default;
};

/// A two-ledger exchange: a common party set, the assets held on each ledger,
/// the subsets to be exchanged, and the initial/final ownership maps. Assets
/// outside the exchange sets keep their ownership; exchanged assets must end
/// with a different, non-empty owner set.
struct GaeInstance {
    PartySet parties;
    AssetSet assets1, assets2;
    AssetSet exchangeSet1, exchangeSet2;
    OwnershipMap io1, io2;
    OwnershipMap fo1, fo2;

    const AssetSet& assets(int ledger) const { return ledger == 1 ? assets1 : assets2; }
    const AssetSet& exchange_set(int ledger) const { return ledger == 1 ? exchangeSet1 : exchangeSet2; }
    const OwnershipMap& io(int ledger) const { return ledger == 1 ? io1 : io2; }
    const OwnershipMap& fo(int ledger) const { return ledger == 1 ? fo1 : fo2; }

    friend bool operator==(const GaeInstance&, const GaeInstance&) = default;
};

/// One broken model constraint, with the offending asset/party when there is one.
struct Violation {
    enum class Code {
        EmptyPartyId,
        DuplicateOrForeignLedgerAsset,   // asset listed under the wrong ledger
        ExchangeSetNotSubset,
        MissingOwnership,                // io/fo does not cover an asset
        StrayOwnership,                  // io/fo entry for an undeclared asset
        EmptyOwnerSet,
        UnknownParty,
        FoEqualsIoForExchangedAsset,
        FoDiffersForUnexchangedAsset,
    };
    Code code;
    std::optional<AssetId> asset;
    std::optional<PartyId> party;

    std::string describe() const;
};

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Per-asset partition of the parties touched by an exchanged asset:
///   givers  = IO - FO   (lose co-ownership)
///   keepers = IO & FO   (retain it)
///   takers  = FO - IO   (gain it)
/// Any of the three may be empty for a given asset.
struct GktPartition {
    std::map<AssetId, PartySet> givers, keepers, takers;
};

enum class ExchangeKind { OnlyGult, GclrAndGult, FullGclsMix };

/// S12 = (union of L1 givers+keepers) & (union of L2 takers), and the mirror
/// image S21. Both empty: the transfers are unconnected local ones. Exactly
/// one empty: replacements only. Neither empty: swaps are present.
struct ExchangeClassification {
    PartySet s12, s21;
    ExchangeKind kind;
};

enum class Verdict { AllFinal, AllInitial, Violated };

struct AtomicityVerdict {
    PartyId party;
    Verdict verdict;
};

std::string to_string(ExchangeKind kind);
std::string to_string(Verdict verdict);

ValidationResult validate_instance(const GaeInstance& instance);

/// Requires a valid instance. Partition covers the ledger's exchange set.
GktPartition derive_gkt(const GaeInstance& instance, int ledger);

ExchangeClassification classify(const GaeInstance& instance);

/// Union of initial co-owners over the L1 exchange set (the MPC participant
/// set; its members hold the secrets behind the joint hash).
PartySet initial_owner_union(const GaeInstance& instance);

/// Judges the end state from one party's perspective: every asset the party
/// appears in (via IO or FO, over the exchange sets) must sit at its final
/// owners (AllFinal) or all at its initial owners (AllInitial); anything else
/// is a violation. A party with no relevant assets reads AllInitial.
/// Throws std::invalid_argument for a party outside the instance.
AtomicityVerdict check_atomicity(const GaeInstance& instance,
                                 const OwnershipMap& finalState1,
                                 const OwnershipMap& finalState2,
                                 const PartyId& party);

/// check_atomicity for every party of the instance, in lexicographic order.
std::vector<AtomicityVerdict> check_atomicity_all(const GaeInstance& instance,
                                                  const OwnershipMap& finalState1,
                                                  const OwnershipMap& finalState2);

}  // namespace gae
