#include "gae/protocol.hpp"

#include "gae/digest.hpp"

#include <algorithm>
#include <cassert>
#include <random>
#include <stdexcept>

namespace gae {

Tick TimeoutSchedule::duration(const AssetId& asset) const {
    auto it = durations.find(asset);
    if (it == durations.end()) throw std::out_of_range("no schedule entry for " + asset.name);
    return it->second;
}

TimeoutSchedule build_schedule(const GaeInstance& instance, Tick baseDuration, LockMode mode) {
    if (baseDuration < 4 || baseDuration % 4 != 0)
        throw std::invalid_argument("base duration must be >= 4 and divisible by 4");
    TimeoutSchedule schedule;
    schedule.baseDuration = baseDuration;
    for (const auto& a : instance.exchangeSet1) schedule.durations[a] = baseDuration;
    const PartySet o1 = initial_owner_union(instance);
    const GktPartition gkt2 = derive_gkt(instance, 2);
    for (const auto& a : instance.exchangeSet2) {
        if (mode == LockMode::SingleTx) {
            schedule.durations[a] = baseDuration / 2;
        } else {
            const bool claimantInO1 = !set_intersect(gkt2.takers.at(a), o1).empty();
            schedule.durations[a] = claimantInO1 ? baseDuration / 4 : baseDuration / 2;
        }
    }
    return schedule;
}

TimeoutSchedule protocol_schedule(const GaeInstance& instance, ProtocolKind protocol,
                                  Tick baseDuration, LockMode mode) {
    if (protocol == ProtocolKind::Mphtlc) return build_schedule(instance, baseDuration, mode);
    if (baseDuration < 4 || baseDuration % 4 != 0)
        throw std::invalid_argument("base duration must be >= 4 and divisible by 4");
    TimeoutSchedule schedule;
    schedule.baseDuration = baseDuration;
    for (const auto& a : instance.exchangeSet1) schedule.durations[a] = baseDuration;
    for (const auto& a : instance.exchangeSet2) schedule.durations[a] = baseDuration / 2;
    return schedule;
}

ProtocolPlan make_plan(const GaeInstance& instance, ProtocolKind protocol, Tick baseDuration,
                       LockMode mode) {
    ProtocolPlan plan{protocol, mode, protocol_schedule(instance, protocol, baseDuration, mode), {}};
    const std::vector<AssetId> ae1(instance.exchangeSet1.begin(), instance.exchangeSet1.end());
    const std::vector<AssetId> ae2(instance.exchangeSet2.begin(), instance.exchangeSet2.end());
    const PartySet o1 = initial_owner_union(instance);
    PartySet lockers2, claimants1, claimants2;
    for (const auto& a : ae2) {
        const PartySet& io = instance.io2.owners(a);
        const PartySet& fo = instance.fo2.owners(a);
        lockers2.insert(io.begin(), io.end());
        claimants2.insert(fo.begin(), fo.end());
    }
    for (const auto& a : ae1) {
        const PartySet& fo = instance.fo1.owners(a);
        claimants1.insert(fo.begin(), fo.end());
    }
    if (protocol == ProtocolKind::Mphtlc) {
        plan.steps = {{1, StepAction::PrepareHash, o1, {}},
                      {2, StepAction::LockLedger1, o1, ae1},
                      {3, StepAction::LockLedger2, lockers2, ae2},
                      {4, StepAction::ReleasePreimage, o1, {}},
                      {5, StepAction::ClaimLedger2, claimants2, ae2},
                      {6, StepAction::ClaimLedger1, claimants1, ae1}};
    } else {
        plan.steps = {{1, StepAction::PrepareHash, o1, {}},
                      {2, StepAction::LockLedger1, o1, ae1},
                      {3, StepAction::LockLedger2, lockers2, ae2},
                      {4, StepAction::ClaimLedger2, claimants2, ae2},
                      {5, StepAction::ClaimLedger1, claimants1, ae1}};
    }
    return plan;
}

bool verify_locks(const GaeInstance& instance, const LedgerState& l1, const LedgerState& l2,
                  VerifyPhase phase, std::span<const HashValue> expectedGuards,
                  const TimeoutSchedule& schedule) {
    auto ledger_ok = [&](const LedgerState& ledger, int idx) {
        for (const auto& a : instance.exchange_set(idx)) {
            const LockEntry* entry = ledger.read_lock(a);
            if (!entry) return false;
            if (entry->guards.size() != expectedGuards.size() ||
                !std::equal(entry->guards.begin(), entry->guards.end(), expectedGuards.begin()))
                return false;
            if (entry->recipients != instance.fo(idx).owners(a)) return false;
            if (entry->expiryTick - entry->createdTick != schedule.duration(a)) return false;
        }
        return true;
    };
    if (!ledger_ok(l1, 1)) return false;
    if (phase == VerifyPhase::PostStep3 && !ledger_ok(l2, 2)) return false;
    return true;
}

bool RunOutcome::any_violated() const {
    return std::any_of(verdicts.begin(), verdicts.end(),
                       [](const AtomicityVerdict& v) { return v.verdict == Verdict::Violated; });
}

const AtomicityVerdict& RunOutcome::verdict_of(const PartyId& party) const {
    for (const auto& v : verdicts)
        if (v.party == party) return v;
    throw std::invalid_argument("no verdict for " + party.value);
}

namespace {

struct World {
    LedgerState l1, l2;
    std::vector<Event> mpcEvents;

    explicit World(const GaeInstance& instance)
        : l1("L1", instance.io1), l2("L2", instance.io2) {}

    Tick clock() const { return l1.clock(); }
    void advance(Tick ticks) {
        l1.advance_clock(ticks);
        l2.advance_clock(ticks);
    }
    void advance_to(Tick target) {
        if (target > clock()) advance(target - clock());
    }
    LedgerState& ledger(int idx) { return idx == 1 ? l1 : l2; }
};

int source_rank(const std::string& ledger) {
    if (ledger == "mpc") return 0;
    if (ledger == "L1") return 1;
    return 2;
}

std::vector<Event> merge_events(const World& w) {
    struct Tagged {
        Event event;
        int rank;
        std::size_t index;
    };
    std::vector<Tagged> tagged;
    auto add = [&](const std::vector<Event>& events) {
        for (std::size_t i = 0; i < events.size(); ++i)
            tagged.push_back({events[i], source_rank(events[i].ledger), i});
    };
    add(w.mpcEvents);
    add(w.l1.events());
    add(w.l2.events());
    std::stable_sort(tagged.begin(), tagged.end(), [](const Tagged& a, const Tagged& b) {
        if (a.event.tick != b.event.tick) return a.event.tick < b.event.tick;
        if (a.rank != b.rank) return a.rank < b.rank;
        return a.index < b.index;
    });
    std::vector<Event> out;
    out.reserve(tagged.size());
    for (auto& t : tagged) out.push_back(std::move(t.event));
    return out;
}

void sync_mpc(World& w, const MpcSession& session, std::size_t& cursor) {
    for (; cursor < session.transcript().size(); ++cursor)
        w.mpcEvents.push_back(session.transcript()[cursor]);
}

/// Releases every remaining lock as it expires, reverting ownership.
void release_expired(World& w) {
    while (true) {
        std::optional<Tick> next;
        for (int idx : {1, 2})
            for (const auto& [asset, entry] : w.ledger(idx).locks())
                if (!next || entry.expiryTick < *next) next = entry.expiryTick;
        if (!next) return;
        w.advance_to(*next);
        for (int idx : {1, 2}) {
            std::vector<AssetId> due;
            for (const auto& [asset, entry] : w.ledger(idx).locks())
                if (entry.expiryTick <= w.clock()) due.push_back(asset);
            for (const auto& asset : due) {
                const PartyId reclaimer = *w.ledger(idx).owners().owners(asset).begin();
                w.ledger(idx).unlock_assets({asset}, reclaimer);
            }
        }
    }
}

RunOutcome finish(const GaeInstance& instance, const World& w, std::vector<HashValue> guards,
                  std::optional<Preimage> revealed) {
    RunOutcome out;
    out.finalState1 = w.l1.owners();
    out.finalState2 = w.l2.owners();
    out.events = merge_events(w);
    out.verdicts = check_atomicity_all(instance, out.finalState1, out.finalState2);
    out.lockGuards = std::move(guards);
    out.revealedPreimage = std::move(revealed);
    for (const auto& e : out.events) {
        if (e.kind == "claim" && e.ledger == "L2") {
            out.firstL2ClaimTick = e.tick;
            break;
        }
    }
    // Determinism check: the log alone must rebuild the final ownership maps.
    auto [r1, r2] = replay_events(instance.io1, instance.io2, out.events);
    if (!(r1 == out.finalState1) || !(r2 == out.finalState2))
        throw std::logic_error("event log replay does not reproduce the final state");
    return out;
}

void require_runnable(const GaeInstance& instance, ProtocolKind protocol,
                      const StrategyProfile& profile) {
    if (!validate_instance(instance).ok())
        throw std::invalid_argument("instance violates the exchange model");
    const auto problems = validate_profile(instance, protocol, profile);
    if (!problems.empty()) throw std::invalid_argument("bad strategy profile: " + problems.front());
}

struct StrategyView {
    const StrategyProfile& profile;

    const Strategy& of(const PartyId& p) const { return profile.of(p); }
    bool honest(const PartyId& p) const { return !of(p).deviates(); }
    /// Honest-but-slow counts: a release delayer still verifies, consents,
    /// shares and claims like an honest party.
    bool follows_protocol(const PartyId& p) const {
        const Strategy& s = of(p);
        return !s.deviates() || s.kind == Strategy::Kind::MpcDelay;
    }
    /// Whether the party still performs protocol actions at the given step.
    bool active_at(const PartyId& p, int step) const {
        const Strategy& s = of(p);
        return s.kind != Strategy::Kind::AbortAt || s.step > step;
    }
    bool withholds(const PartyId& p) const {
        return of(p).kind == Strategy::Kind::WithholdSecret;
    }
    bool colludes(const PartyId& p) const {
        return of(p).kind == Strategy::Kind::ColludeRelock;
    }
    std::optional<PartyId> first(const PartySet& candidates, auto&& pred) const {
        for (const auto& p : candidates)
            if (pred(p)) return p;
        return std::nullopt;
    }
};

bool same_payload(const LockPayload& a, const LockPayload& b) { return a.digest() == b.digest(); }

}  // namespace

RunOutcome run_mphtlc(const GaeInstance& instance, const StrategyProfile& strategies,
                      const RunConfig& config) {
    require_runnable(instance, ProtocolKind::Mphtlc, strategies);
    if (instance.exchangeSet1.empty())
        throw std::invalid_argument("mphtlc needs at least one exchanged asset on the first ledger");

    const TimeoutSchedule schedule =
        build_schedule(instance, config.baseDuration, config.lockMode);
    const StrategyView view{strategies};
    World w(instance);

    const PartySet o1 = initial_owner_union(instance);
    std::mt19937_64 rng(config.seed);
    std::vector<PartySecret> secrets;
    for (const auto& p : o1) secrets.push_back(sample_secret(p, rng));

    // L1 locks land at tick 1 and L2 locks at tick 2, so the release deadline
    // is known before anything hits a ledger.
    Tick minDuration = 0;
    Tick lockTickOfBound = 0;
    if (!instance.exchangeSet2.empty()) {
        lockTickOfBound = 2;
        minDuration = schedule.duration(*instance.exchangeSet2.begin());
        for (const auto& a : instance.exchangeSet2)
            minDuration = std::min(minDuration, schedule.duration(a));
    } else {
        lockTickOfBound = 1;
        minDuration = schedule.baseDuration;
    }
    MpcSession session(o1, lockTickOfBound + minDuration - config.mpcSafetyMargin);
    std::size_t mpcCursor = 0;

    // Step 1: joint hash over the co-owners' fresh secrets.
    std::map<PartyId, MpcBehavior> f1Behaviors;
    for (const auto& p : o1) {
        const Strategy& s = view.of(p);
        MpcBehavior b;
        if (s.kind == Strategy::Kind::MpcAbort ||
            (s.kind == Strategy::Kind::AbortAt && s.step <= 1))
            b.kind = MpcBehaviorKind::Abort;
        f1Behaviors[p] = b;
    }
    session.run_f1(secrets, f1Behaviors, w.clock());
    sync_mpc(w, session, mpcCursor);
    if (session.phase() == MpcPhase::Aborted) return finish(instance, w, {}, std::nullopt);

    const std::vector<HashValue> guards{*session.hash_output()};

    auto planned_payload = [&](int idx, const AssetId& a) {
        return LockPayload{a, guards, instance.fo(idx).owners(a),
                           w.clock() + schedule.duration(a)};
    };
    // A colluding L2 owner diverts the lock to the colluding subset of the
    // final owners (or refuses to lock when that subset is empty).
    auto intended_payload2 = [&](const PartyId& locker, const AssetId& a)
        -> std::optional<LockPayload> {
        const Strategy& s = view.of(locker);
        if (s.kind == Strategy::Kind::ColludeRelock) {
            PartySet circle = s.partners;
            circle.insert(locker);
            const PartySet favored = set_intersect(instance.fo2.owners(a), circle);
            if (favored.empty()) return std::nullopt;
            return LockPayload{a, guards, favored, w.clock() + schedule.duration(a)};
        }
        return planned_payload(2, a);
    };

    // Step 2: every exchanged L1 asset is locked under H for its final
    // owners, carrying consent from every initial co-owner.
    w.advance(1);
    {
        std::vector<LockPayload> payloads;
        std::vector<ConsentRecord> consents;
        std::vector<PartyId> submitters;
        bool complete = true;
        for (const auto& a : instance.exchangeSet1) {
            const LockPayload payload = planned_payload(1, a);
            std::optional<PartyId> submitter;
            bool all = true;
            for (const auto& owner : instance.io1.owners(a)) {
                if (view.active_at(owner, 2)) {
                    consents.push_back(make_consent(owner, payload));
                    if (!submitter) submitter = owner;
                } else {
                    all = false;
                }
            }
            if (all && submitter) {
                payloads.push_back(payload);
                submitters.push_back(*submitter);
            } else {
                complete = false;
            }
        }
        if (config.lockMode == LockMode::SingleTx) {
            if (complete && !payloads.empty())
                w.l1.lock_assets(payloads, consents, TxMode::SingleTx,
                                 *std::min_element(submitters.begin(), submitters.end()));
        } else {
            for (std::size_t i = 0; i < payloads.size(); ++i)
                w.l1.lock_assets({payloads[i]}, consents, TxMode::PerAsset, submitters[i]);
        }
    }

    // Step 3: L2 owners verify the L1 locks before committing their own.
    w.advance(1);
    const bool step2Ok = verify_locks(instance, w.l1, w.l2, VerifyPhase::PostStep2, guards, schedule);
    {
        std::vector<LockPayload> payloads;
        std::vector<ConsentRecord> consents;
        std::vector<PartyId> submitters;
        bool complete = true;
        for (const auto& a : instance.exchangeSet2) {
            const auto submitter =
                view.first(instance.io2.owners(a), [&](const PartyId& p) { return view.active_at(p, 3); });
            std::optional<LockPayload> intent;
            if (submitter) {
                if (view.follows_protocol(*submitter)) {
                    if (step2Ok) intent = planned_payload(2, a);
                } else {
                    intent = intended_payload2(*submitter, a);
                }
            }
            bool all = static_cast<bool>(intent);
            if (intent) {
                for (const auto& owner : instance.io2.owners(a)) {
                    bool agrees = false;
                    if (owner == *submitter) {
                        agrees = true;
                    } else if (view.active_at(owner, 3)) {
                        if (view.follows_protocol(owner)) {
                            agrees = step2Ok && same_payload(*intent, planned_payload(2, a));
                        } else {
                            const auto own = intended_payload2(owner, a);
                            agrees = own && same_payload(*intent, *own);
                        }
                    }
                    if (agrees)
                        consents.push_back(make_consent(owner, *intent));
                    else
                        all = false;
                }
            }
            if (intent && all) {
                payloads.push_back(*intent);
                submitters.push_back(*submitter);
            } else {
                complete = false;
            }
        }
        if (config.lockMode == LockMode::SingleTx) {
            if (complete && !payloads.empty())
                w.l2.lock_assets(payloads, consents, TxMode::SingleTx,
                                 *std::min_element(submitters.begin(), submitters.end()));
        } else {
            for (std::size_t i = 0; i < payloads.size(); ++i)
                w.l2.lock_assets({payloads[i]}, consents, TxMode::PerAsset, submitters[i]);
        }
    }

    // Step 4: the co-owners verify both ledgers and jointly release x.
    w.advance(1);
    const bool step3Ok = verify_locks(instance, w.l1, w.l2, VerifyPhase::PostStep3, guards, schedule);
    bool convened = true;
    for (const auto& p : o1)
        if (view.follows_protocol(p) && !step3Ok) convened = false;

    std::optional<Preimage> released;
    PartySet holders;
    if (convened) {
        std::map<PartyId, MpcBehavior> f2Behaviors;
        for (const auto& p : o1) {
            const Strategy& s = view.of(p);
            MpcBehavior b;
            if (s.kind == Strategy::Kind::WithholdSecret ||
                (s.kind == Strategy::Kind::AbortAt && s.step <= 4))
                b.kind = MpcBehaviorKind::Abort;
            else if (s.kind == Strategy::Kind::MpcDelay)
                b = {MpcBehaviorKind::Delay, s.delayTicks};
            f2Behaviors[p] = b;
        }
        const auto status = session.run_f2(secrets, f2Behaviors, w.clock());
        if (status == MpcSession::F2Status::Released) {
            released = session.preimage_output();
            w.advance_to(*session.delivery_tick());
            holders = o1;
        }
        sync_mpc(w, session, mpcCursor);
    }

    if (released) {
        // Off-chain share to claimants with no stake on the first ledger.
        // The sharer is an honest co-owner doing its protocol duty; it exists
        // only when some member of the owner union is honest (and then its
        // verification gate has already vouched for every lock).
        const bool honestSharer = std::any_of(
            o1.begin(), o1.end(), [&](const PartyId& p) { return view.follows_protocol(p); });
        for (const auto& a : instance.exchangeSet2) {
            if (!honestSharer) break;
            if (!set_intersect(instance.fo2.owners(a), o1).empty()) continue;
            if (config.nonAtomicGults.count(a)) continue;
            const PartySet to = set_minus(instance.fo2.owners(a), o1);
            w.mpcEvents.push_back({w.clock(), "mpc", "offchain-share", a.name,
                                   "to=" + format_party_set(to) +
                                       ";preimage=" + hex(released->bytes)});
            holders.insert(to.begin(), to.end());
        }

        bool revealed = false;  // x published on some ledger
        auto pick_claimer = [&](const PartySet& preferred) -> std::optional<PartyId> {
            auto eligible = [&](const PartyId& p) {
                return view.follows_protocol(p) && (revealed || holders.count(p));
            };
            if (auto p = view.first(preferred, eligible)) return p;
            return view.first(instance.parties, eligible);
        };

        // Step 5: claims on the second ledger before its locks expire.
        if (config.lockMode == LockMode::SingleTx) {
            std::vector<AssetId> locked;
            for (const auto& a : instance.exchangeSet2)
                if (w.l2.read_lock(a)) locked.push_back(a);
            PartySet allClaimants;
            for (const auto& a : locked) {
                const PartySet& fo = instance.fo2.owners(a);
                allClaimants.insert(fo.begin(), fo.end());
            }
            if (!locked.empty()) {
                if (auto claimer = pick_claimer(allClaimants)) {
                    w.l2.claim_assets(locked, {*released}, *claimer, TxMode::SingleTx);
                    revealed = true;
                }
            }
        } else {
            bool progress = true;
            while (progress) {
                progress = false;
                for (const auto& a : instance.exchangeSet2) {
                    if (!w.l2.read_lock(a)) continue;
                    const auto claimer = pick_claimer(instance.fo2.owners(a));
                    if (!claimer) continue;
                    w.l2.claim_assets({a}, {*released}, *claimer, TxMode::PerAsset);
                    revealed = true;
                    progress = true;
                }
            }
        }

        // Step 6: claims on the first ledger, one tick later.
        w.advance(1);
        if (config.lockMode == LockMode::SingleTx) {
            std::vector<AssetId> locked;
            for (const auto& a : instance.exchangeSet1)
                if (w.l1.read_lock(a)) locked.push_back(a);
            PartySet allClaimants;
            for (const auto& a : locked) {
                const PartySet& fo = instance.fo1.owners(a);
                allClaimants.insert(fo.begin(), fo.end());
            }
            if (!locked.empty()) {
                if (auto claimer = pick_claimer(allClaimants))
                    w.l1.claim_assets(locked, {*released}, *claimer, TxMode::SingleTx);
            }
        } else {
            bool progress = true;
            while (progress) {
                progress = false;
                for (const auto& a : instance.exchangeSet1) {
                    if (!w.l1.read_lock(a)) continue;
                    const auto claimer = pick_claimer(instance.fo1.owners(a));
                    if (!claimer) continue;
                    w.l1.claim_assets({a}, {*released}, *claimer, TxMode::PerAsset);
                    revealed = true;
                    progress = true;
                }
            }
        }
    }

    release_expired(w);
    return finish(instance, w, guards, released);
}

namespace {

/// Shape shared by the flawed multi-owner variants and the classic swap:
/// exactly one counter-asset on L2, held by a single owner.
void require_counter_asset_shape(const GaeInstance& instance, const char* what) {
    if (instance.exchangeSet2.size() != 1 || instance.exchangeSet1.empty())
        throw std::invalid_argument(std::string(what) + ": expected one counter-asset on L2");
    const AssetId n = *instance.exchangeSet2.begin();
    if (instance.io2.owners(n).size() != 1)
        throw std::invalid_argument(std::string(what) + ": the counter-asset needs a single owner");
}

}  // namespace

RunOutcome run_htlc(const GaeInstance& instance, const StrategyProfile& strategies,
                    const RunConfig& config) {
    require_runnable(instance, ProtocolKind::Htlc, strategies);
    if (instance.exchangeSet1.size() != 1 || instance.exchangeSet2.size() != 1)
        throw std::invalid_argument("classic swap handles exactly one asset per ledger");
    const AssetId m = *instance.exchangeSet1.begin();
    const AssetId n = *instance.exchangeSet2.begin();
    if (instance.io1.owners(m).size() != 1 || instance.io2.owners(n).size() != 1)
        throw std::invalid_argument("classic swap needs singly-owned assets");
    const Tick T = config.baseDuration;
    if (T < 4 || T % 4 != 0)
        throw std::invalid_argument("base duration must be >= 4 and divisible by 4");

    const StrategyView view{strategies};
    World w(instance);
    const PartyId locker1 = *instance.io1.owners(m).begin();
    const PartyId locker2 = *instance.io2.owners(n).begin();

    std::mt19937_64 rng(config.seed);
    const PartySecret secret = sample_secret(locker1, rng);
    const Preimage preimage{secret.value};
    const std::vector<HashValue> guards{sha256(preimage)};

    // First ledger lock for T.
    w.advance(1);
    if (view.active_at(locker1, 2)) {
        const LockPayload payload{m, guards, instance.fo1.owners(m), w.clock() + T};
        w.l1.lock_assets({payload}, {make_consent(locker1, payload)}, TxMode::PerAsset, locker1);
    }

    // Counter lock for T/2, after checking the first lock.
    w.advance(1);
    const LockEntry* lockM = w.l1.read_lock(m);
    const bool lockMOk = lockM && lockM->recipients == instance.fo1.owners(m) &&
                         lockM->expiryTick - lockM->createdTick == T;
    if (view.active_at(locker2, 3) && lockMOk) {
        const LockPayload payload{n, lockM->guards, instance.fo2.owners(n), w.clock() + T / 2};
        w.l2.lock_assets({payload}, {make_consent(locker2, payload)}, TxMode::PerAsset, locker2);
    }

    // Claim on the counter ledger: designated recipients only.
    w.advance(1);
    bool revealed = false;
    const LockEntry* lockN = w.l2.read_lock(n);
    const bool lockNOk = lockN && lockN->guards == guards &&
                         lockN->recipients == instance.fo2.owners(n) &&
                         lockN->expiryTick - lockN->createdTick == T / 2;
    if (lockNOk && instance.fo2.owners(n).count(locker1) && view.active_at(locker1, 4) &&
        !view.withholds(locker1)) {
        w.l2.claim_assets({n}, {preimage}, locker1, TxMode::PerAsset);
        revealed = true;
    }

    // Claim back on the first ledger with the now-public preimage.
    w.advance(1);
    if (revealed && w.l1.read_lock(m)) {
        const auto claimer = view.first(instance.fo1.owners(m), [&](const PartyId& p) {
            return view.active_at(p, 5) && !view.withholds(p);
        });
        if (claimer) w.l1.claim_assets({m}, {preimage}, *claimer, TxMode::PerAsset);
    }

    release_expired(w);
    return finish(instance, w, guards, revealed ? std::optional<Preimage>(preimage) : std::nullopt);
}

RunOutcome run_htlc_ms(const GaeInstance& instance, const StrategyProfile& strategies,
                       const RunConfig& config) {
    require_runnable(instance, ProtocolKind::HtlcMultiSig, strategies);
    require_counter_asset_shape(instance, "multi-signature variant");
    const AssetId n = *instance.exchangeSet2.begin();
    const PartySet o1 = initial_owner_union(instance);
    if (o1.size() < 2)
        throw std::invalid_argument("multi-signature variant needs at least two co-owners");
    const Tick T = config.baseDuration;
    if (T < 4 || T % 4 != 0)
        throw std::invalid_argument("base duration must be >= 4 and divisible by 4");

    const StrategyView view{strategies};
    World w(instance);
    const PartyId counterparty = *instance.io2.owners(n).begin();

    // One shared secret, agreed off-chain: every co-owner knows it.
    std::mt19937_64 rng(config.seed);
    const Preimage shared{sample_secret(*o1.begin(), rng).value};
    const std::vector<HashValue> guards{sha256(shared)};
    const PartySet& knowers = o1;

    // Lock the L1 side jointly under the shared hash.
    w.advance(1);
    for (const auto& a : instance.exchangeSet1) {
        const LockPayload payload{a, guards, instance.fo1.owners(a), w.clock() + T};
        std::vector<ConsentRecord> consents;
        std::optional<PartyId> submitter;
        bool all = true;
        for (const auto& owner : instance.io1.owners(a)) {
            if (view.active_at(owner, 2)) {
                consents.push_back(make_consent(owner, payload));
                if (!submitter) submitter = owner;
            } else {
                all = false;
            }
        }
        if (all && submitter)
            w.l1.lock_assets({payload}, consents, TxMode::PerAsset, *submitter);
    }

    // Counter lock. A colluding counterparty diverts it to the partner.
    w.advance(1);
    if (view.active_at(counterparty, 3)) {
        std::optional<LockPayload> payload;
        if (view.colludes(counterparty)) {
            PartySet circle = view.of(counterparty).partners;
            circle.insert(counterparty);
            const PartySet favored = set_intersect(instance.fo2.owners(n), circle);
            if (!favored.empty())
                payload = LockPayload{n, guards, favored, w.clock() + T / 2};
        } else {
            bool l1Ok = true;
            for (const auto& a : instance.exchangeSet1) {
                const LockEntry* e = w.l1.read_lock(a);
                if (!e || e->guards != guards || e->recipients != instance.fo1.owners(a) ||
                    e->expiryTick - e->createdTick != T)
                    l1Ok = false;
            }
            if (l1Ok) payload = LockPayload{n, guards, instance.fo2.owners(n), w.clock() + T / 2};
        }
        if (payload)
            w.l2.lock_assets({*payload}, {make_consent(counterparty, *payload)}, TxMode::PerAsset,
                             counterparty);
    }

    // Claim of the counter-asset by someone who knows the shared secret.
    w.advance(1);
    bool revealed = false;
    if (const LockEntry* lockN = w.l2.read_lock(n)) {
        std::optional<PartyId> claimer;
        if (lockN->recipients == instance.fo2.owners(n)) {
            claimer = view.first(instance.fo2.owners(n), [&](const PartyId& p) {
                return knowers.count(p) && view.follows_protocol(p);
            });
        } else {
            // Diverted lock: only the colluding beneficiary will touch it.
            claimer = view.first(lockN->recipients, [&](const PartyId& p) {
                return knowers.count(p) && view.colludes(p);
            });
        }
        if (claimer) {
            w.l2.claim_assets({n}, {shared}, *claimer, TxMode::PerAsset);
            revealed = true;
        }
    }

    // L1 claims with the now-public secret.
    w.advance(1);
    if (revealed) {
        for (const auto& a : instance.exchangeSet1) {
            if (!w.l1.read_lock(a)) continue;
            const auto claimer = view.first(instance.fo1.owners(a), [&](const PartyId& p) {
                return view.active_at(p, 5) && !view.withholds(p);
            });
            if (claimer) w.l1.claim_assets({a}, {shared}, *claimer, TxMode::PerAsset);
        }
    }

    release_expired(w);
    return finish(instance, w, guards, revealed ? std::optional<Preimage>(shared) : std::nullopt);
}

RunOutcome run_htlc_mk(const GaeInstance& instance, const StrategyProfile& strategies,
                       const RunConfig& config) {
    require_runnable(instance, ProtocolKind::HtlcMultiSecret, strategies);
    require_counter_asset_shape(instance, "multi-secret variant");
    const AssetId n = *instance.exchangeSet2.begin();
    const PartySet o1 = initial_owner_union(instance);
    if (o1.size() < 2)
        throw std::invalid_argument("multi-secret variant needs at least two co-owners");
    const Tick T = config.baseDuration;
    if (T < 4 || T % 4 != 0)
        throw std::invalid_argument("base duration must be >= 4 and divisible by 4");

    const StrategyView view{strategies};
    World w(instance);
    const PartyId counterparty = *instance.io2.owners(n).begin();

    // Independent secret per co-owner; hashes exchanged off-chain.
    std::mt19937_64 rng(config.seed);
    std::map<PartyId, Preimage> secretOf;
    std::map<PartyId, HashValue> hashOf;
    for (const auto& p : o1) {
        secretOf[p] = Preimage{sample_secret(p, rng).value};
        hashOf[p] = sha256(secretOf[p]);
    }
    auto guards_for = [&](const PartySet& owners) {
        std::vector<HashValue> out;
        for (const auto& p : owners) out.push_back(hashOf.at(p));
        return out;
    };
    const std::vector<HashValue> guardsN = guards_for(o1);

    // Lock the L1 assets, each under its own co-owners' hashes.
    w.advance(1);
    for (const auto& a : instance.exchangeSet1) {
        const LockPayload payload{a, guards_for(instance.io1.owners(a)),
                                  instance.fo1.owners(a), w.clock() + T};
        std::vector<ConsentRecord> consents;
        std::optional<PartyId> submitter;
        bool all = true;
        for (const auto& owner : instance.io1.owners(a)) {
            if (view.active_at(owner, 2)) {
                consents.push_back(make_consent(owner, payload));
                if (!submitter) submitter = owner;
            } else {
                all = false;
            }
        }
        if (all && submitter)
            w.l1.lock_assets({payload}, consents, TxMode::PerAsset, *submitter);
    }

    // Counter lock under every co-owner's hash. A later colluder still locks
    // honestly here; the betrayal happens at relock time.
    w.advance(1);
    if (view.active_at(counterparty, 3)) {
        bool l1Ok = true;
        for (const auto& a : instance.exchangeSet1) {
            const LockEntry* e = w.l1.read_lock(a);
            if (!e || e->guards != guards_for(instance.io1.owners(a)) ||
                e->recipients != instance.fo1.owners(a) || e->expiryTick - e->createdTick != T)
                l1Ok = false;
        }
        if (l1Ok || view.colludes(counterparty)) {
            const LockPayload payload{n, guardsN, instance.fo2.owners(n), w.clock() + T / 2};
            w.l2.lock_assets({payload}, {make_consent(counterparty, payload)}, TxMode::PerAsset,
                             counterparty);
        }
    }

    // Reveal phase: each honest co-owner submits its own secret against the
    // counter lock; the asset transfers once the last guard is satisfied.
    w.advance(1);
    PartySet revealedParties;
    if (const LockEntry* lockN = w.l2.read_lock(n);
        lockN && lockN->recipients == instance.fo2.owners(n) && lockN->guards == guardsN) {
        for (const auto& p : o1) {
            if (!view.follows_protocol(p)) continue;
            w.l2.claim_assets({n}, {secretOf.at(p)}, p, TxMode::PerAsset);
            revealedParties.insert(p);
        }
    }
    const bool counterClaimed = !w.l2.read_lock(n) && !revealedParties.empty();

    PartySet publicSecrets = revealedParties;  // whose preimages are on-chain

    if (!counterClaimed && view.colludes(counterparty)) {
        // Withhold-and-relock: let the counter lock lapse, relock it for the
        // withholding partner alone under that partner's hash.
        PartySet circle = view.of(counterparty).partners;
        circle.insert(counterparty);
        const PartySet favored = set_intersect(
            set_minus(set_intersect(instance.fo2.owners(n), circle), revealedParties), o1);
        if (const LockEntry* lockN = w.l2.read_lock(n); lockN && !favored.empty()) {
            const PartyId beneficiary = *favored.begin();
            w.advance_to(lockN->expiryTick);
            w.l2.unlock_assets({n}, counterparty);
            const LockPayload relock{n, {hashOf.at(beneficiary)}, {beneficiary},
                                     w.clock() + T / 2};
            w.l2.lock_assets({relock}, {make_consent(counterparty, relock)}, TxMode::PerAsset,
                             counterparty);
            w.advance(1);
            w.l2.claim_assets({n}, {secretOf.at(beneficiary)}, beneficiary, TxMode::PerAsset);
            publicSecrets.insert(beneficiary);
        }
    }

    // L1 claims: possible for any asset whose guards are all public.
    w.advance(1);
    for (const auto& a : instance.exchangeSet1) {
        if (!w.l1.read_lock(a)) continue;
        const PartySet& owners = instance.io1.owners(a);
        const bool allPublic = std::all_of(owners.begin(), owners.end(), [&](const PartyId& p) {
            return publicSecrets.count(p) != 0;
        });
        if (!allPublic) continue;
        const auto claimer = view.first(instance.fo1.owners(a), [&](const PartyId& p) {
            return view.active_at(p, 5) && !view.withholds(p);
        });
        if (!claimer) continue;
        std::vector<Preimage> preimages;
        for (const auto& p : owners) preimages.push_back(secretOf.at(p));
        w.l1.claim_assets({a}, preimages, *claimer, TxMode::PerAsset);
    }

    release_expired(w);
    return finish(instance, w, guardsN, std::nullopt);
}

RunOutcome run_protocol(const GaeInstance& instance, ProtocolKind protocol,
                        const StrategyProfile& strategies, const RunConfig& config) {
    switch (protocol) {
        case ProtocolKind::Htlc: return run_htlc(instance, strategies, config);
        case ProtocolKind::HtlcMultiSig: return run_htlc_ms(instance, strategies, config);
        case ProtocolKind::HtlcMultiSecret: return run_htlc_mk(instance, strategies, config);
        case ProtocolKind::Mphtlc: return run_mphtlc(instance, strategies, config);
    }
    throw std::invalid_argument("unknown protocol");
}

}  // namespace gae
