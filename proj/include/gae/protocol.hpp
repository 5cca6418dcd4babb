#pragma once

#include "gae/ledger.hpp"
#include "gae/model.hpp"
#include "gae/mpc.hpp"
#include "gae/strategy.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace gae {

/// Lock durations per exchanged asset, derived from the base duration T:
/// every L1 asset locks for T; in per-asset mode an L2 asset whose takers
/// overlap the L1 initial-owner union locks for T/4 and the rest for T/2
/// (the claimants who depend on someone else's reveal get the extra
/// tolerance); in single-tx mode every L2 asset locks for T/2.
struct TimeoutSchedule {
    Tick baseDuration = 0;
    std::map<AssetId, Tick> durations;

    Tick duration(const AssetId& asset) const;
};

/// Throws std::invalid_argument unless T >= 4 and divisible by 4.
TimeoutSchedule build_schedule(const GaeInstance& instance, Tick baseDuration, LockMode mode);

/// Durations the named engine actually applies: the multi-party protocol uses
/// build_schedule; the classic swap and the flawed variants predate the T/4
/// refinement and lock L1 for T, L2 for T/2.
TimeoutSchedule protocol_schedule(const GaeInstance& instance, ProtocolKind protocol,
                                  Tick baseDuration, LockMode mode);

enum class StepAction {
    PrepareHash,
    LockLedger1,
    LockLedger2,
    ReleasePreimage,
    ClaimLedger2,
    ClaimLedger1,
};

struct PlanStep {
    int number = 0;
    StepAction action;
    PartySet actors;
    std::vector<AssetId> assets;  // empty for hash/release steps
};

struct ProtocolPlan {
    ProtocolKind protocol;
    LockMode lockMode;
    TimeoutSchedule schedule;
    std::vector<PlanStep> steps;
};

ProtocolPlan make_plan(const GaeInstance& instance, ProtocolKind protocol, Tick baseDuration,
                       LockMode mode);

struct RunConfig {
    Tick baseDuration = 8;
    LockMode lockMode = LockMode::PerAsset;
    std::uint64_t seed = 0;
    /// L2 assets whose claimants never overlap the L1 owners are shared the
    /// preimage off-chain at release time unless listed here.
    AssetSet nonAtomicGults;
    /// The F2 release deadline sits this many ticks before the earliest
    /// planned L2 lock expiry.
    Tick mpcSafetyMargin = 1;
};

struct RunOutcome {
    OwnershipMap finalState1, finalState2;
    std::vector<Event> events;               // merged two-ledger + mpc log
    std::vector<AtomicityVerdict> verdicts;  // lexicographic by party
    std::vector<HashValue> lockGuards;       // guard(s) the locks were created under
    std::optional<Preimage> revealedPreimage;
    std::optional<Tick> firstL2ClaimTick;

    bool any_violated() const;
    const AtomicityVerdict& verdict_of(const PartyId& party) const;
};

enum class VerifyPhase { PostStep2, PostStep3 };

/// The honest verification gate: every exchanged asset of the phase's
/// ledger(s) must carry an active lock with exactly the expected guards,
/// recipients equal to the final owners, and a duration equal to the
/// schedule. Nothing else is checked.
bool verify_locks(const GaeInstance& instance, const LedgerState& l1, const LedgerState& l2,
                  VerifyPhase phase, std::span<const HashValue> expectedGuards,
                  const TimeoutSchedule& schedule);

/// The six-step multi-party protocol: joint hash via F1, L1 locks under it,
/// verified L2 locks, joint release via F2, then claims. All deviations are
/// outcomes, not errors.
RunOutcome run_mphtlc(const GaeInstance& instance, const StrategyProfile& strategies,
                      const RunConfig& config);

/// Classic single-asset, single-owner hash time lock swap. Claims on the
/// counter ledger are restricted to designated recipients.
RunOutcome run_htlc(const GaeInstance& instance, const StrategyProfile& strategies,
                    const RunConfig& config);

/// Flawed multi-owner variant (i): the co-owners share one secret off-chain,
/// so either of them can collude with the counterparty and divert the
/// counter-asset.
RunOutcome run_htlc_ms(const GaeInstance& instance, const StrategyProfile& strategies,
                       const RunConfig& config);

/// Flawed multi-owner variant (ii): independent secrets per co-owner; a
/// withholding co-owner plus a relocking counterparty strand the first
/// revealer.
RunOutcome run_htlc_mk(const GaeInstance& instance, const StrategyProfile& strategies,
                       const RunConfig& config);

RunOutcome run_protocol(const GaeInstance& instance, ProtocolKind protocol,
                        const StrategyProfile& strategies, const RunConfig& config);

}  // namespace gae
