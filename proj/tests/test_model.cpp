#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gae/model.hpp"
#include "support/fixtures.hpp"

#include <random>

using namespace gae;
using namespace gae::testing;

namespace {

bool only_violation(const ValidationResult& r, Violation::Code code) {
    if (r.violations.empty()) return false;
    for (const auto& v : r.violations)
        if (v.code != code) return false;
    return true;
}

}  // namespace

TEST_CASE("validation accepts the fixture exchanges") {
    CHECK(validate_instance(complex_mix_instance()).ok());
    CHECK(validate_instance(joint_sale_instance()).ok());
    CHECK(validate_instance(bundle_sale_instance()).ok());
    CHECK(validate_instance(ult_pair_instance()).ok());
    CHECK(validate_instance(clr_instance()).ok());
    CHECK(validate_instance(cls_instance()).ok());
}

TEST_CASE("validation rejects a self-transfer in the exchange set") {
    GaeInstance instance = make_instance({P("X"), P("Y")},
                                         {{L1("M"), {P("X")}, {P("X")}},
                                          {L2("N"), {P("Y")}, {P("X")}}});
    const auto result = validate_instance(instance);
    CHECK_FALSE(result.ok());
    CHECK(only_violation(result, Violation::Code::FoEqualsIoForExchangedAsset));
}

TEST_CASE("validation rejects an empty owner set") {
    GaeInstance instance = cls_instance();
    instance.fo1.set_owners(L1("M"), {});
    const auto result = validate_instance(instance);
    CHECK(only_violation(result, Violation::Code::EmptyOwnerSet));
}

TEST_CASE("validation rejects owners outside the party set") {
    GaeInstance instance = cls_instance();
    instance.fo1.set_owners(L1("M"), {P("Y"), P("Q")});
    const auto result = validate_instance(instance);
    CHECK(only_violation(result, Violation::Code::UnknownParty));
}

TEST_CASE("validation rejects ownership changes outside the exchange sets") {
    GaeInstance instance = cls_instance();
    instance.assets1.insert(L1("C"));
    instance.io1.set_owners(L1("C"), {P("X")});
    instance.fo1.set_owners(L1("C"), {P("Y")});
    const auto result = validate_instance(instance);
    CHECK(only_violation(result, Violation::Code::FoDiffersForUnexchangedAsset));
}

TEST_CASE("validation rejects exchange entries that are not declared assets") {
    GaeInstance instance = cls_instance();
    instance.exchangeSet1.insert(L1("Ghost"));
    const auto result = validate_instance(instance);
    CHECK(only_violation(result, Violation::Code::ExchangeSetNotSubset));
}

TEST_CASE("giver/keeper/taker rows for the mixed exchange") {
    const GaeInstance instance = complex_mix_instance();
    const GktPartition g1 = derive_gkt(instance, 1);
    const GktPartition g2 = derive_gkt(instance, 2);

    CHECK(g1.givers.at(L1("Currency")) == PartySet{P("X")});
    CHECK(g1.keepers.at(L1("Currency")) == PartySet{P("Y")});
    CHECK(g1.takers.at(L1("Currency")) == PartySet{P("W"), P("Z")});

    CHECK(g1.givers.at(L1("Security")) == PartySet{P("T"), P("U")});
    CHECK(g1.keepers.at(L1("Security")).empty());
    CHECK(g1.takers.at(L1("Security")) == PartySet{P("V")});

    CHECK(g1.givers.at(L1("Diamond")) == PartySet{P("Z")});
    CHECK(g1.keepers.at(L1("Diamond")).empty());
    CHECK(g1.takers.at(L1("Diamond")) == PartySet{P("V")});

    CHECK(g2.givers.at(L2("Car")).empty());
    CHECK(g2.keepers.at(L2("Car")) == PartySet{P("T")});
    CHECK(g2.takers.at(L2("Car")) == PartySet{P("U"), P("W")});

    CHECK(g2.givers.at(L2("House")) == PartySet{P("Z")});
    CHECK(g2.keepers.at(L2("House")).empty());
    CHECK(g2.takers.at(L2("House")) == PartySet{P("T"), P("X"), P("Y")});
}

TEST_CASE("classification of the basic transfer pairs") {
    const auto ult = classify(ult_pair_instance());
    CHECK(ult.kind == ExchangeKind::OnlyGult);
    CHECK(ult.s12.empty());
    CHECK(ult.s21.empty());

    const auto clr = classify(clr_instance());
    CHECK(clr.kind == ExchangeKind::GclrAndGult);
    CHECK(clr.s12 == PartySet{P("X")});
    CHECK(clr.s21.empty());

    const auto cls = classify(cls_instance());
    CHECK(cls.kind == ExchangeKind::FullGclsMix);
    CHECK(cls.s12 == PartySet{P("X")});
    CHECK(cls.s21 == PartySet{P("Y")});
}

TEST_CASE("classification of the mixed exchange contains swaps") {
    const auto c = classify(complex_mix_instance());
    CHECK(c.kind == ExchangeKind::FullGclsMix);
    CHECK(c.s12.count(P("X")));
    CHECK(c.s12.count(P("Y")));
    CHECK(c.s21 == PartySet{P("Z")});
}

TEST_CASE("initial owner union over the first ledger") {
    CHECK(initial_owner_union(joint_sale_instance()) == PartySet{P("X"), P("W")});
    // hand enumeration over the mixed-exchange rows: {X,Y} u {T,U} u {Z}
    CHECK(initial_owner_union(complex_mix_instance()) ==
          PartySet{P("T"), P("U"), P("X"), P("Y"), P("Z")});
    CHECK(initial_owner_union(cls_instance()) == PartySet{P("X")});
}

TEST_CASE("atomicity verdicts at the two fixed points") {
    const GaeInstance instance = complex_mix_instance();
    for (const auto& p : instance.parties) {
        CHECK(check_atomicity(instance, instance.fo1, instance.fo2, p).verdict ==
              Verdict::AllFinal);
        CHECK(check_atomicity(instance, instance.io1, instance.io2, p).verdict ==
              Verdict::AllInitial);
    }
}

TEST_CASE("a diverted counter-asset violates the betrayed co-owner") {
    // M went to its buyer but N ended with W alone instead of {X,W}.
    const GaeInstance instance = joint_sale_instance();
    OwnershipMap final1 = instance.fo1;
    OwnershipMap final2;
    final2.set_owners(L2("N"), {P("W")});
    CHECK(check_atomicity(instance, final1, final2, P("X")).verdict == Verdict::Violated);
    CHECK(check_atomicity(instance, final1, final2, P("Y")).verdict == Verdict::Violated);
}

TEST_CASE("atomicity faults on an unknown party") {
    const GaeInstance instance = cls_instance();
    CHECK_THROWS_AS(check_atomicity(instance, instance.io1, instance.io2, P("Q")),
                    std::invalid_argument);
}

TEST_CASE("a party with no stake reads all-initial") {
    GaeInstance instance = cls_instance();
    instance.parties.insert(P("Q"));
    CHECK(check_atomicity(instance, instance.fo1, instance.fo2, P("Q")).verdict ==
          Verdict::AllInitial);
}

TEST_CASE("gkt partition laws over random instances") {
    std::mt19937_64 rng(1001);
    for (int i = 0; i < 300; ++i) {
        const GaeInstance instance = random_instance(rng, 5, 4);
        REQUIRE(validate_instance(instance).ok());
        for (int ledger : {1, 2}) {
            const GktPartition gkt = derive_gkt(instance, ledger);
            for (const auto& a : instance.exchange_set(ledger)) {
                const PartySet& g = gkt.givers.at(a);
                const PartySet& k = gkt.keepers.at(a);
                const PartySet& t = gkt.takers.at(a);
                CHECK(set_intersect(g, k).empty());
                CHECK(set_intersect(g, t).empty());
                CHECK(set_intersect(k, t).empty());
                const PartySet all = set_union(set_union(g, k), t);
                const PartySet expected = set_union(instance.io(ledger).owners(a),
                                                    instance.fo(ledger).owners(a));
                CHECK(all == expected);
            }
        }
    }
}

TEST_CASE("classification is invariant under relabeling") {
    std::mt19937_64 rng(1002);
    for (int i = 0; i < 200; ++i) {
        const GaeInstance instance = random_instance(rng, 5, 4);

        // random bijective renaming of parties and assets
        std::vector<PartyId> parties(instance.parties.begin(), instance.parties.end());
        std::vector<std::string> fresh;
        for (std::size_t k = 0; k < parties.size(); ++k)
            fresh.push_back("p" + std::to_string(k));
        for (std::size_t k = fresh.size(); k > 1; --k)
            std::swap(fresh[k - 1], fresh[pick(rng, k)]);
        std::map<PartyId, PartyId> rename;
        for (std::size_t k = 0; k < parties.size(); ++k) rename[parties[k]] = PartyId{fresh[k]};

        auto renameSet = [&](const PartySet& in) {
            PartySet out;
            for (const auto& p : in) out.insert(rename.at(p));
            return out;
        };
        GaeInstance relabeled;
        for (const auto& p : instance.parties) relabeled.parties.insert(rename.at(p));
        for (int ledger : {1, 2}) {
            for (const auto& a : instance.assets(ledger)) {
                const AssetId b{ledger, a.name + "_r"};
                (ledger == 1 ? relabeled.assets1 : relabeled.assets2).insert(b);
                if (instance.exchange_set(ledger).count(a))
                    (ledger == 1 ? relabeled.exchangeSet1 : relabeled.exchangeSet2).insert(b);
                (ledger == 1 ? relabeled.io1 : relabeled.io2)
                    .set_owners(b, renameSet(instance.io(ledger).owners(a)));
                (ledger == 1 ? relabeled.fo1 : relabeled.fo2)
                    .set_owners(b, renameSet(instance.fo(ledger).owners(a)));
            }
        }
        CHECK(classify(relabeled).kind == classify(instance).kind);
    }
}

TEST_CASE("verdicts at the fixed points over random instances") {
    std::mt19937_64 rng(1003);
    for (int i = 0; i < 200; ++i) {
        const GaeInstance instance = random_instance(rng, 5, 4);
        auto has_stake = [&](const PartyId& p) {
            for (int ledger : {1, 2})
                for (const auto& a : instance.exchange_set(ledger))
                    if (instance.io(ledger).owners(a).count(p) ||
                        instance.fo(ledger).owners(a).count(p))
                        return true;
            return false;
        };
        for (const auto& v : check_atomicity_all(instance, instance.fo1, instance.fo2))
            CHECK(v.verdict == (has_stake(v.party) ? Verdict::AllFinal : Verdict::AllInitial));
        for (const auto& v : check_atomicity_all(instance, instance.io1, instance.io2))
            CHECK(v.verdict == Verdict::AllInitial);
    }
}

TEST_CASE("single-clause mutations are rejected with exactly that clause") {
    std::mt19937_64 rng(1004);
    for (int i = 0; i < 100; ++i) {
        GaeInstance instance = random_instance(rng, 4, 3);
        const AssetId target = *instance.exchangeSet1.begin();
        switch (pick(rng, 4)) {
            case 0:
                instance.fo1.set_owners(target, instance.io1.owners(target));
                CHECK(only_violation(validate_instance(instance),
                                     Violation::Code::FoEqualsIoForExchangedAsset));
                break;
            case 1:
                instance.fo1.set_owners(target, {});
                CHECK(only_violation(validate_instance(instance),
                                     Violation::Code::EmptyOwnerSet));
                break;
            case 2: {
                PartySet owners = instance.fo1.owners(target);
                owners.insert(P("ZZ_outsider"));
                instance.fo1.set_owners(target, owners);
                CHECK(only_violation(validate_instance(instance),
                                     Violation::Code::UnknownParty));
                break;
            }
            case 3:
                instance.exchangeSet2.insert(AssetId{2, "Ghost"});
                CHECK(only_violation(validate_instance(instance),
                                     Violation::Code::ExchangeSetNotSubset));
                break;
        }
    }
}
