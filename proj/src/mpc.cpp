#include "gae/mpc.hpp"

#include "gae/digest.hpp"

#include <algorithm>
#include <stdexcept>

namespace gae {

PartySecret sample_secret(const PartyId& party, std::mt19937_64& rng) {
    Bytes value(16);
    for (std::size_t i = 0; i < value.size(); i += 8) {
        std::uint64_t word = rng();
        for (std::size_t b = 0; b < 8 && i + b < value.size(); ++b)
            value[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
    }
    return {party, std::move(value)};
}

Preimage combine(std::vector<PartySecret> secrets) {
    if (secrets.empty()) throw std::invalid_argument("combine over no secrets");
    std::sort(secrets.begin(), secrets.end(),
              [](const PartySecret& a, const PartySecret& b) { return a.party < b.party; });
    Bytes out;
    for (std::size_t i = 0; i < secrets.size(); ++i) {
        if (i > 0 && secrets[i].party == secrets[i - 1].party)
            throw std::invalid_argument("duplicate party in combine: " + secrets[i].party.value);
        const Bytes& v = secrets[i].value;
        if (v.empty()) throw std::invalid_argument("empty secret for " + secrets[i].party.value);
        const auto len = static_cast<std::uint32_t>(v.size());
        out.push_back(static_cast<std::uint8_t>(len >> 24));
        out.push_back(static_cast<std::uint8_t>(len >> 16));
        out.push_back(static_cast<std::uint8_t>(len >> 8));
        out.push_back(static_cast<std::uint8_t>(len));
        out.insert(out.end(), v.begin(), v.end());
    }
    return Preimage{std::move(out)};
}

MpcSession::MpcSession(PartySet participants, Tick releaseDeadline)
    : participants_(std::move(participants)), releaseDeadline_(releaseDeadline) {
    if (participants_.empty()) throw std::invalid_argument("mpc session needs participants");
}

void MpcSession::emit(Tick tick, std::string kind, std::string details) {
    transcript_.push_back({tick, "mpc", std::move(kind), "-", std::move(details)});
}

namespace {

std::optional<PartyId> first_aborter(const PartySet& participants,
                                     const std::map<PartyId, MpcBehavior>& behaviors) {
    for (const auto& p : participants) {
        auto it = behaviors.find(p);
        if (it != behaviors.end() && it->second.kind == MpcBehaviorKind::Abort) return p;
    }
    return std::nullopt;
}

void require_secret_cover(const PartySet& participants, const std::vector<PartySecret>& secrets) {
    if (secrets.size() != participants.size())
        throw std::invalid_argument("secret count does not match participants");
    for (const auto& s : secrets)
        if (!participants.count(s.party))
            throw std::invalid_argument("secret from non-participant " + s.party.value);
}

}  // namespace

MpcPhase MpcSession::run_f1(const std::vector<PartySecret>& secrets,
                            const std::map<PartyId, MpcBehavior>& behaviors, Tick currentTick) {
    if (phase_ != MpcPhase::Collecting) throw std::logic_error("f1 run twice");

    if (auto aborter = first_aborter(participants_, behaviors)) {
        phase_ = MpcPhase::Aborted;
        emit(currentTick, "f1-abort",
             "participants=" + format_party_set(participants_) + ";by=" + aborter->value);
        return phase_;
    }
    require_secret_cover(participants_, secrets);
    hashOutput_ = sha256(combine(secrets));
    holders_ = participants_;
    phase_ = MpcPhase::CompleteF1;
    emit(currentTick, "f1-complete",
         "participants=" + format_party_set(participants_) + ";hash=" + hex(*hashOutput_));
    return phase_;
}

MpcSession::F2Status MpcSession::run_f2(const std::vector<PartySecret>& secrets,
                                        const std::map<PartyId, MpcBehavior>& behaviors,
                                        Tick currentTick) {
    if (phase_ != MpcPhase::CompleteF1) throw std::logic_error("f2 before f1 completion");
    if (currentTick > releaseDeadline_) return F2Status::DeadlinePassed;

    if (auto aborter = first_aborter(participants_, behaviors)) {
        phase_ = MpcPhase::Aborted;
        holders_.clear();
        emit(currentTick, "f2-abort",
             "participants=" + format_party_set(participants_) + ";by=" + aborter->value);
        return F2Status::Aborted;
    }
    require_secret_cover(participants_, secrets);

    Tick delivery = currentTick;
    for (const auto& p : participants_) {
        auto it = behaviors.find(p);
        if (it != behaviors.end() && it->second.kind == MpcBehaviorKind::Delay)
            delivery = std::max(delivery, currentTick + it->second.delayTicks);
    }
    delivery = std::min(delivery, releaseDeadline_);

    preimageOutput_ = combine(secrets);
    if (sha256(*preimageOutput_) != *hashOutput_)
        throw std::logic_error("f2 output does not match f1 hash");
    deliveryTick_ = delivery;
    holders_ = participants_;
    phase_ = MpcPhase::ReleasedF2;
    emit(delivery, "f2-release",
         "participants=" + format_party_set(participants_) + ";preimage=" + hex(preimageOutput_->bytes));
    return F2Status::Released;
}

std::optional<Bytes> preimage_dictionary_attack(const HashValue& target,
                                                const std::vector<PartySecret>& knownSecrets,
                                                const PartyId& missingParty,
                                                const std::vector<Bytes>& dictionary) {
    for (const auto& candidate : dictionary) {
        if (candidate.empty()) continue;
        std::vector<PartySecret> attempt = knownSecrets;
        attempt.push_back({missingParty, candidate});
        if (sha256(combine(attempt)) == target) return candidate;
    }
    return std::nullopt;
}

}  // namespace gae
