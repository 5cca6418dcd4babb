#pragma once

#include "gae/ledger.hpp"
#include "gae/types.hpp"

#include <map>
#include <optional>
#include <random>
#include <vector>

namespace gae {

struct PartySecret {
    PartyId party;
    Bytes value;
};

/// Fresh 16-byte secret drawn from the run's seeded engine.
PartySecret sample_secret(const PartyId& party, std::mt19937_64& rng);

/// The combiner g, made injective: secrets are sorted by party id and
/// concatenated with a 4-byte big-endian length prefix each. Throws on a
/// duplicate party or an empty secret value.
Preimage combine(std::vector<PartySecret> secrets);

enum class MpcPhase { Collecting, CompleteF1, ReleasedF2, Aborted };

enum class MpcBehaviorKind { Honest, Abort, Delay };

struct MpcBehavior {
    MpcBehaviorKind kind = MpcBehaviorKind::Honest;
    Tick delayTicks = 0;  // Delay only
};

/// One joint computation over the participants' secrets, run by a trusted
/// in-process coordinator that enforces fairness (all participants get the
/// output or none do) and timeliness (never delivered past the deadline).
class MpcSession {
public:
    MpcSession(PartySet participants, Tick releaseDeadline);

    const PartySet& participants() const { return participants_; }
    MpcPhase phase() const { return phase_; }
    Tick release_deadline() const { return releaseDeadline_; }

    const std::optional<HashValue>& hash_output() const { return hashOutput_; }
    const std::optional<Preimage>& preimage_output() const { return preimageOutput_; }
    std::optional<Tick> delivery_tick() const { return deliveryTick_; }

    /// Parties holding the phase's output; all participants or nobody.
    const PartySet& holders() const { return holders_; }

    /// Transcript events (ledger field "mpc") visible to every participant.
    const std::vector<Event>& transcript() const { return transcript_; }

    /// F1: jointly hash the combined secrets. Any Abort behavior aborts the
    /// session and nobody learns anything. Secrets never appear in the
    /// transcript, only the resulting hash.
    MpcPhase run_f1(const std::vector<PartySecret>& secrets,
                    const std::map<PartyId, MpcBehavior>& behaviors, Tick currentTick);

    enum class F2Status { Released, Aborted, DeadlinePassed };

    /// F2: release the combined preimage. Delay behaviors may push delivery
    /// up to the deadline but never beyond; any Abort delivers to nobody.
    F2Status run_f2(const std::vector<PartySecret>& secrets,
                    const std::map<PartyId, MpcBehavior>& behaviors, Tick currentTick);

private:
    void emit(Tick tick, std::string kind, std::string details);

    PartySet participants_;
    Tick releaseDeadline_;
    MpcPhase phase_ = MpcPhase::Collecting;
    std::optional<HashValue> hashOutput_;
    std::optional<Preimage> preimageOutput_;
    std::optional<Tick> deliveryTick_;
    PartySet holders_;
    std::vector<Event> transcript_;
};

/// Desk-scale stand-in for the entropy property: rebuilds the combined
/// preimage with the n-1 known secrets plus each dictionary candidate in the
/// missing slot, and reports the candidate whose digest matches, if any.
std::optional<Bytes> preimage_dictionary_attack(const HashValue& target,
                                                const std::vector<PartySecret>& knownSecrets,
                                                const PartyId& missingParty,
                                                const std::vector<Bytes>& dictionary);

}  // namespace gae
