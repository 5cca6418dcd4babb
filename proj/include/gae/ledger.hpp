#pragma once

#include "gae/model.hpp"
#include "gae/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gae {

/// One line of the run log. Serialized as `tick|ledger|kind|asset|details`
/// and compared byte-for-byte by the golden tests.
struct Event {
    Tick tick = 0;
    std::string ledger;   // "L1", "L2", or "mpc"
    std::string kind;     // lock, claim, reveal, unlock, reject, f1-*, f2-*, offchain-share
    std::string asset;    // asset name, "+"-joined batch, or "-" for mpc events
    std::string details;  // ";"-joined key=value pairs

    std::string line() const;
};

/// Consent stands in for a digital signature: the party authorizes exactly
/// the lock payload whose digest it signs.
struct ConsentRecord {
    PartyId party;
    HashValue payloadDigest;
    auto operator<=>(const ConsentRecord&) const = default;
};

/// Everything a lock transaction commits to. The digest of the canonical
/// encoding is what consent records sign.
struct LockPayload {
    AssetId asset;
    std::vector<HashValue> guards;  // all must be matched by revealed preimages
    PartySet recipients;
    Tick expiryTick = 0;

    Bytes canonical_bytes() const;
    HashValue digest() const;
};

ConsentRecord make_consent(const PartyId& party, const LockPayload& payload);

/// An active hash-time lock. Multi-guard entries (used by the multi-secret
/// protocol variant) transfer only once every guard has a matching reveal.
struct LockEntry {
    AssetId asset;
    std::vector<HashValue> guards;
    std::vector<bool> satisfied;      // aligned with guards
    std::vector<Preimage> reveals;    // preimages accepted so far
    PartySet recipients;
    Tick expiryTick = 0;
    Tick createdTick = 0;
    std::vector<ConsentRecord> consents;

    bool fully_satisfied() const;
};

enum class LedgerErrorKind {
    MissingConsent,
    AlreadyLocked,
    ExpiryInPast,
    HashMismatch,
    LockExpired,
    NotLocked,
    NotExpired,
};

struct LedgerError {
    LedgerErrorKind kind;
    AssetId asset;
    std::optional<PartyId> party;
};

std::string to_string(LedgerErrorKind kind);

enum class TxMode { PerAsset, SingleTx };

struct LedgerOpResult {
    std::vector<LedgerError> errors;
    bool ok() const { return errors.empty(); }
};

/// One append-only ledger: co-owned assets, active locks, a logical clock and
/// the event log. Operations mutate the state in place; a run owns its states
/// and copies freely when it needs snapshots.
class LedgerState {
public:
    LedgerState() = default;
    LedgerState(std::string name, OwnershipMap initialOwners);

    const std::string& name() const { return name_; }
    Tick clock() const { return clock_; }
    const OwnershipMap& owners() const { return owners_; }
    const std::vector<Event>& events() const { return events_; }
    const std::map<AssetId, LockEntry>& locks() const { return locks_; }

    /// Active lock on the asset, if any. Both ledgers are readable by every
    /// party, so there is no caller restriction here or on any other read.
    const LockEntry* read_lock(const AssetId& asset) const;

    /// Locks the given payloads, checking consent from every current co-owner
    /// of each asset. SingleTx commits all payloads atomically (one event) or
    /// nothing; PerAsset commits each independently (one event each).
    LedgerOpResult lock_assets(const std::vector<LockPayload>& payloads,
                               const std::vector<ConsentRecord>& consents,
                               TxMode mode, const PartyId& submitter);

    /// Presents preimages against the locks on `assets`. Every presented
    /// preimage must match an unsatisfied guard; an asset transfers to its
    /// recorded recipients once all its guards are satisfied (a partial match
    /// logs a `reveal` and keeps the lock in place). Failed claims are logged
    /// as `reject` events and leave owners and locks untouched.
    LedgerOpResult claim_assets(const std::vector<AssetId>& assets,
                                const std::vector<Preimage>& preimages,
                                const PartyId& submitter, TxMode mode);

    /// Releases expired locks; ownership stays with the pre-lock owner set.
    LedgerOpResult unlock_assets(const std::vector<AssetId>& assets, const PartyId& submitter);

    /// Moves the logical clock forward. Throws on ticks < 1.
    void advance_clock(Tick ticks);

private:
    void append_event(std::string kind, std::string asset, std::string details);
    std::optional<LedgerError> check_lock(const LockPayload& payload,
                                          const std::vector<ConsentRecord>& consents) const;
    void apply_lock(const LockPayload& payload, const std::vector<ConsentRecord>& consents);

    std::string name_ = "L1";
    OwnershipMap owners_;
    std::map<AssetId, LockEntry> locks_;
    Tick clock_ = 0;
    std::vector<Event> events_;
};

/// Re-derives final ownership by applying the claim events of a merged log to
/// the initial maps. Used as the determinism check after every run.
std::pair<OwnershipMap, OwnershipMap> replay_events(const OwnershipMap& initial1,
                                                    const OwnershipMap& initial2,
                                                    const std::vector<Event>& events);

/// Parses one serialized event line (the inverse of Event::line()).
Event parse_event_line(const std::string& line);

}  // namespace gae
