#pragma once

#include "gae/model.hpp"

#include <random>
#include <string>
#include <vector>

namespace gae::testing {

inline PartyId P(const std::string& id) { return PartyId{id}; }
inline AssetId L1(const std::string& name) { return AssetId{1, name}; }
inline AssetId L2(const std::string& name) { return AssetId{2, name}; }

struct TransferSpec {
    AssetId asset;
    PartySet io;
    PartySet fo;       // equal to io for held assets
    bool exchanged = true;
};

inline GaeInstance make_instance(const PartySet& parties,
                                 const std::vector<TransferSpec>& transfers) {
    GaeInstance instance;
    instance.parties = parties;
    for (const auto& t : transfers) {
        const int ledger = t.asset.ledger;
        (ledger == 1 ? instance.assets1 : instance.assets2).insert(t.asset);
        if (t.exchanged)
            (ledger == 1 ? instance.exchangeSet1 : instance.exchangeSet2).insert(t.asset);
        (ledger == 1 ? instance.io1 : instance.io2).set_owners(t.asset, t.io);
        (ledger == 1 ? instance.fo1 : instance.fo2).set_owners(t.asset, t.fo);
    }
    return instance;
}

/// Two co-owners swap their jointly held asset for a counter-asset they will
/// co-own: M: {X,W} -> {Y} against N: {Y} -> {X,W}.
inline GaeInstance joint_sale_instance() {
    return make_instance({P("X"), P("W"), P("Y")},
                         {{L1("M"), {P("X"), P("W")}, {P("Y")}},
                          {L2("N"), {P("Y")}, {P("X"), P("W")}}});
}

/// Two sellers each contribute an asset against one jointly received
/// counter-asset: M: {X} -> {Y}, R: {W} -> {Y}, N: {Y} -> {X,W}.
inline GaeInstance bundle_sale_instance() {
    return make_instance({P("X"), P("W"), P("Y")},
                         {{L1("M"), {P("X")}, {P("Y")}},
                          {L1("R"), {P("W")}, {P("Y")}},
                          {L2("N"), {P("Y")}, {P("X"), P("W")}}});
}

/// Unconnected pair: M: {X} -> {Y}, N: {Z} -> {W}.
inline GaeInstance ult_pair_instance() {
    return make_instance({P("X"), P("Y"), P("Z"), P("W")},
                         {{L1("M"), {P("X")}, {P("Y")}},
                          {L2("N"), {P("Z")}, {P("W")}}});
}

/// Replacement: M: {X} -> {Y}, N: {Z} -> {X}.
inline GaeInstance clr_instance() {
    return make_instance({P("X"), P("Y"), P("Z")},
                         {{L1("M"), {P("X")}, {P("Y")}},
                          {L2("N"), {P("Z")}, {P("X")}}});
}

/// Swap: M: {X} -> {Y}, N: {Y} -> {X}.
inline GaeInstance cls_instance() {
    return make_instance({P("X"), P("Y")},
                         {{L1("M"), {P("X")}, {P("Y")}},
                          {L2("N"), {P("Y")}, {P("X")}}});
}

/// The five-transfer mixed exchange: currency, security and a diamond move on
/// one ledger against a car and a house on the other.
inline GaeInstance complex_mix_instance() {
    return make_instance(
        {P("T"), P("U"), P("V"), P("W"), P("X"), P("Y"), P("Z")},
        {{L1("Currency"), {P("X"), P("Y")}, {P("W"), P("Y"), P("Z")}},
         {L1("Security"), {P("T"), P("U")}, {P("V")}},
         {L1("Diamond"), {P("Z")}, {P("V")}},
         {L2("Car"), {P("T")}, {P("T"), P("U"), P("W")}},
         {L2("House"), {P("Z")}, {P("T"), P("X"), P("Y")}}});
}

/// Uniform integer in [0, n) from the raw engine, bias-free enough for tests
/// and stable across platforms (std distributions are not).
inline std::size_t pick(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

inline PartySet random_subset(std::mt19937_64& rng, const std::vector<PartyId>& pool) {
    PartySet out;
    while (out.empty())
        for (const auto& p : pool)
            if (rng() % 2 == 0) out.insert(p);
    return out;
}

/// Valid random instance: 2..maxParties parties, 1..maxAssets exchanged
/// assets per ledger, random non-empty owner sets with FO != IO.
inline GaeInstance random_instance(std::mt19937_64& rng, int maxParties = 4, int maxAssets = 3) {
    const int nParties = 2 + static_cast<int>(pick(rng, maxParties - 1));
    std::vector<PartyId> pool;
    for (int i = 0; i < nParties; ++i) pool.push_back(PartyId{std::string(1, char('A' + i))});

    GaeInstance instance;
    instance.parties = PartySet(pool.begin(), pool.end());
    for (int ledger : {1, 2}) {
        const int nAssets = 1 + static_cast<int>(pick(rng, maxAssets));
        for (int i = 0; i < nAssets; ++i) {
            const AssetId asset{ledger, (ledger == 1 ? "M" : "N") + std::to_string(i)};
            const PartySet io = random_subset(rng, pool);
            PartySet fo = random_subset(rng, pool);
            while (fo == io) fo = random_subset(rng, pool);
            (ledger == 1 ? instance.assets1 : instance.assets2).insert(asset);
            (ledger == 1 ? instance.exchangeSet1 : instance.exchangeSet2).insert(asset);
            (ledger == 1 ? instance.io1 : instance.io2).set_owners(asset, io);
            (ledger == 1 ? instance.fo1 : instance.fo2).set_owners(asset, fo);
        }
    }
    return instance;
}

}  // namespace gae::testing
