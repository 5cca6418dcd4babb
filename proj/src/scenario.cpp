#include "gae/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace gae {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_ident(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t cut = text.find(sep, pos);
        if (cut == std::string::npos) cut = text.size();
        out.push_back(trim(text.substr(pos, cut - pos)));
        pos = cut + 1;
    }
    if (!out.empty() && out.back().empty() && text.empty()) out.pop_back();
    return out;
}

PartySet parse_set(int line, const std::string& raw) {
    const std::string text = trim(raw);
    if (text.size() < 2 || text.front() != '{' || text.back() != '}')
        throw ScenarioError(line, "expected a {...} party set, got '" + raw + "'");
    PartySet out;
    const std::string inner = trim(text.substr(1, text.size() - 2));
    if (inner.empty()) return out;
    for (const auto& id : split_list(inner, ',')) {
        if (!valid_ident(id)) throw ScenarioError(line, "bad party id '" + id + "'");
        if (!out.insert(PartyId{id}).second)
            throw ScenarioError(line, "party '" + id + "' listed twice");
    }
    return out;
}

Strategy parse_strategy_spec(int line, const std::string& raw) {
    const std::string text = trim(raw);
    const std::size_t open = text.find('(');
    std::string head = text, args;
    if (open != std::string::npos) {
        if (text.back() != ')') throw ScenarioError(line, "unbalanced '(' in strategy");
        head = trim(text.substr(0, open));
        args = trim(text.substr(open + 1, text.size() - open - 2));
    }
    auto int_arg = [&]() {
        try {
            return std::stoll(args);
        } catch (const std::exception&) {
            throw ScenarioError(line, "expected an integer argument in '" + text + "'");
        }
    };
    if (head == "honest") return Strategy::honest();
    if (head == "abort_at") return Strategy::abort_at(static_cast<int>(int_arg()));
    if (head == "withhold_secret") return Strategy::withhold_secret();
    if (head == "mpc_abort") return Strategy::mpc_abort();
    if (head == "mpc_delay") return Strategy::mpc_delay(int_arg());
    if (head == "collude_relock") {
        PartySet partners;
        for (const auto& id : split_list(args, ',')) {
            if (!valid_ident(id)) throw ScenarioError(line, "bad partner id '" + id + "'");
            partners.insert(PartyId{id});
        }
        return Strategy::collude_relock(partners);
    }
    throw ScenarioError(line, "unknown strategy '" + head + "'");
}

struct TransferLine {
    int line;
    AssetId asset;
    PartySet io;
    std::optional<PartySet> fo;  // absent for held (unexchanged) assets
};

}  // namespace

RunConfig ScenarioFile::run_config() const {
    RunConfig config;
    config.baseDuration = baseDuration;
    config.lockMode = lockMode;
    config.seed = seed;
    config.nonAtomicGults = nonAtomicGults;
    return config;
}

ScenarioFile parse_scenario(const std::string& text) {
    ScenarioFile sc;
    std::vector<TransferLine> transfers;
    std::map<std::string, int> seenKeys;
    std::map<PartyId, std::pair<int, Strategy>> strategyLines;
    std::map<AssetId, int> assetLines;
    std::vector<std::pair<int, std::string>> gultLines;
    std::optional<std::pair<int, std::string>> attackLine;
    std::optional<std::pair<int, int>> enumerateLine;
    bool partiesSeen = false;
    bool protocolSeen = false;

    std::istringstream in(text);
    std::string rawLine;
    int lineNo = 0;
    auto once = [&](const std::string& key, int line) {
        if (!seenKeys.emplace(key, line).second)
            throw ScenarioError(line, "duplicate '" + key + "' line");
    };

    while (std::getline(in, rawLine)) {
        ++lineNo;
        const std::string line = trim(rawLine);
        if (line.empty() || line[0] == '#') continue;
        const std::size_t colon = line.find(':');
        if (colon == std::string::npos)
            throw ScenarioError(lineNo, "expected 'key: value'");
        const std::string key = trim(line.substr(0, colon));
        const std::string value = trim(line.substr(colon + 1));

        if (key == "name") {
            once(key, lineNo);
            sc.name = value;
        } else if (key == "parties") {
            once(key, lineNo);
            partiesSeen = true;
            for (const auto& id : split_list(value, ',')) {
                if (!valid_ident(id)) throw ScenarioError(lineNo, "bad party id '" + id + "'");
                if (!sc.instance.parties.insert(PartyId{id}).second)
                    throw ScenarioError(lineNo, "party '" + id + "' declared twice");
            }
            if (sc.instance.parties.empty()) throw ScenarioError(lineNo, "empty party list");
        } else if (key == "protocol") {
            once(key, lineNo);
            const auto p = parse_protocol(value);
            if (!p) throw ScenarioError(lineNo, "unknown protocol '" + value + "'");
            sc.protocol = *p;
            protocolSeen = true;
        } else if (key == "T") {
            once(key, lineNo);
            try {
                sc.baseDuration = std::stoll(value);
            } catch (const std::exception&) {
                throw ScenarioError(lineNo, "bad duration '" + value + "'");
            }
        } else if (key == "lockmode") {
            once(key, lineNo);
            if (value == "per-asset")
                sc.lockMode = LockMode::PerAsset;
            else if (value == "single-tx")
                sc.lockMode = LockMode::SingleTx;
            else
                throw ScenarioError(lineNo, "lockmode must be per-asset or single-tx");
        } else if (key == "seed") {
            once(key, lineNo);
            try {
                sc.seed = std::stoull(value);
            } catch (const std::exception&) {
                throw ScenarioError(lineNo, "bad seed '" + value + "'");
            }
        } else if (key == "L1" || key == "L2") {
            const int ledger = key == "L1" ? 1 : 2;
            const std::size_t nameCut = value.find(':');
            if (nameCut == std::string::npos)
                throw ScenarioError(lineNo, "expected '<asset>: {owners} [-> {owners}]'");
            const std::string assetName = trim(value.substr(0, nameCut));
            if (!valid_ident(assetName))
                throw ScenarioError(lineNo, "bad asset name '" + assetName + "'");
            std::string rest = trim(value.substr(nameCut + 1));
            TransferLine t;
            t.line = lineNo;
            t.asset = AssetId{ledger, assetName};
            const std::size_t arrow = rest.find("->");
            if (arrow == std::string::npos) {
                t.io = parse_set(lineNo, rest);
            } else {
                t.io = parse_set(lineNo, trim(rest.substr(0, arrow)));
                t.fo = parse_set(lineNo, trim(rest.substr(arrow + 2)));
            }
            if (!assetLines.emplace(t.asset, lineNo).second)
                throw ScenarioError(lineNo, "asset '" + assetName + "' declared twice on " + key);
            transfers.push_back(std::move(t));
        } else if (key == "strategy") {
            const std::size_t eq = value.find('=');
            if (eq == std::string::npos)
                throw ScenarioError(lineNo, "expected 'strategy: <party> = <behavior>'");
            const std::string id = trim(value.substr(0, eq));
            if (!valid_ident(id)) throw ScenarioError(lineNo, "bad party id '" + id + "'");
            const Strategy s = parse_strategy_spec(lineNo, value.substr(eq + 1));
            if (!strategyLines.emplace(PartyId{id}, std::make_pair(lineNo, s)).second)
                throw ScenarioError(lineNo, "second strategy for '" + id + "'");
        } else if (key == "attack") {
            once(key, lineNo);
            attackLine = {lineNo, value};
        } else if (key == "enumerate") {
            once(key, lineNo);
            const std::size_t eq = value.find('=');
            if (eq == std::string::npos || trim(value.substr(0, eq)) != "bound")
                throw ScenarioError(lineNo, "expected 'enumerate: bound=<k>'");
            try {
                enumerateLine = {lineNo, std::stoi(value.substr(eq + 1))};
            } catch (const std::exception&) {
                throw ScenarioError(lineNo, "bad bound");
            }
        } else if (key == "atomic-gult") {
            const std::size_t eq = value.find('=');
            if (eq == std::string::npos)
                throw ScenarioError(lineNo, "expected 'atomic-gult: <asset> = on|off'");
            gultLines.push_back({lineNo, value});
        } else {
            throw ScenarioError(lineNo, "unknown key '" + key + "'");
        }
    }

    if (!partiesSeen) throw ScenarioError(0, "missing 'parties:' line");
    if (!protocolSeen)
        sc.warnings.push_back("no protocol selected, defaulting to MPHTLC");

    // Assemble the instance from the transfer lines.
    for (const auto& t : transfers) {
        AssetSet& assets = t.asset.ledger == 1 ? sc.instance.assets1 : sc.instance.assets2;
        AssetSet& exchanged =
            t.asset.ledger == 1 ? sc.instance.exchangeSet1 : sc.instance.exchangeSet2;
        OwnershipMap& io = t.asset.ledger == 1 ? sc.instance.io1 : sc.instance.io2;
        OwnershipMap& fo = t.asset.ledger == 1 ? sc.instance.fo1 : sc.instance.fo2;
        assets.insert(t.asset);
        io.set_owners(t.asset, t.io);
        if (t.fo) {
            exchanged.insert(t.asset);
            fo.set_owners(t.asset, *t.fo);
        } else {
            fo.set_owners(t.asset, t.io);
        }
    }

    const ValidationResult validation = validate_instance(sc.instance);
    if (!validation.ok()) {
        const Violation& v = validation.violations.front();
        const int line = v.asset && assetLines.count(*v.asset) ? assetLines.at(*v.asset) : 0;
        throw ScenarioError(line, v.describe());
    }

    sc.profile = StrategyProfile::all_honest(sc.instance);
    for (const auto& [party, entry] : strategyLines) {
        if (!sc.instance.parties.count(party))
            throw ScenarioError(entry.first, "strategy for undeclared party '" + party.value + "'");
        sc.profile.assignment[party] = entry.second;
    }

    if (attackLine) {
        const auto& [line, value] = *attackLine;
        const auto attacks = collusion_playbook(sc.instance, sc.protocol);
        std::string canonical = value;
        canonical.erase(std::remove_if(canonical.begin(), canonical.end(),
                                       [](unsigned char c) { return std::isspace(c); }),
                        canonical.end());
        const auto found =
            std::find_if(attacks.begin(), attacks.end(),
                         [&](const NamedAttack& a) { return a.name == canonical; });
        if (found == attacks.end())
            throw ScenarioError(line, "attack '" + value + "' does not apply to this scenario");
        sc.attackName = found->name;
        for (const auto& [party, strategy] : found->profile.assignment)
            if (strategy.deviates()) sc.profile.assignment[party] = strategy;
    }

    const auto problems = validate_profile(sc.instance, sc.protocol, sc.profile);
    if (!problems.empty()) throw ScenarioError(0, problems.front());

    for (const auto& [line, value] : gultLines) {
        const std::size_t eq = value.find('=');
        const std::string assetName = trim(value.substr(0, eq));
        const std::string flag = trim(value.substr(eq + 1));
        const AssetId asset{2, assetName};
        if (!sc.instance.assets2.count(asset))
            throw ScenarioError(line, "atomic-gult names unknown L2 asset '" + assetName + "'");
        if (flag == "off")
            sc.nonAtomicGults.insert(asset);
        else if (flag != "on")
            throw ScenarioError(line, "atomic-gult flag must be on or off");
    }

    if (enumerateLine) {
        sc.enumerateBound = enumerateLine->second;
        if (*sc.enumerateBound < 0 ||
            *sc.enumerateBound > static_cast<int>(sc.instance.parties.size()))
            throw ScenarioError(enumerateLine->first, "bound must be within the party count");
    }
    return sc;
}

std::string render_scenario(const ScenarioFile& sc) {
    std::ostringstream os;
    if (!sc.name.empty()) os << "name: " << sc.name << "\n";
    os << "parties: ";
    bool first = true;
    for (const auto& p : sc.instance.parties) {
        os << (first ? "" : ", ") << p.value;
        first = false;
    }
    os << "\n";
    os << "protocol: " << to_string(sc.protocol) << "\n";
    os << "T: " << sc.baseDuration << "\n";
    os << "lockmode: " << to_string(sc.lockMode) << "\n";
    os << "seed: " << sc.seed << "\n";
    for (int ledger : {1, 2}) {
        for (const auto& a : sc.instance.assets(ledger)) {
            os << "L" << ledger << ": " << a.name << ": "
               << format_party_set(sc.instance.io(ledger).owners(a));
            if (sc.instance.exchange_set(ledger).count(a))
                os << " -> " << format_party_set(sc.instance.fo(ledger).owners(a));
            os << "\n";
        }
    }
    for (const auto& [party, strategy] : sc.profile.assignment)
        if (strategy.deviates())
            os << "strategy: " << party.value << " = " << strategy.str() << "\n";
    for (const auto& a : sc.nonAtomicGults) os << "atomic-gult: " << a.name << " = off\n";
    if (sc.enumerateBound) os << "enumerate: bound=" << *sc.enumerateBound << "\n";
    return os.str();
}

bool Report::any_violated() const {
    for (const auto& block : results)
        for (const auto& v : block.verdicts)
            if (v.verdict == Verdict::Violated) return true;
    return false;
}

namespace {

Report base_report(const ScenarioFile& sc) {
    Report r;
    r.scenarioName = sc.name.empty() ? std::string("scenario") : sc.name;
    r.warnings = sc.warnings;
    r.protocol = sc.protocol;
    r.lockMode = sc.lockMode;
    r.baseDuration = sc.baseDuration;
    r.seed = sc.seed;
    r.classification = classify(sc.instance);
    r.gkt1 = derive_gkt(sc.instance, 1);
    r.gkt2 = derive_gkt(sc.instance, 2);
    return r;
}

void emit_gkt(std::ostringstream& os, const GktPartition& gkt, int ledger, ReportFormat format) {
    for (const auto& [asset, givers] : gkt.givers) {
        if (format == ReportFormat::Text) {
            os << "gkt: L" << ledger << "|" << asset.name << "|G=" << format_party_set(givers)
               << "|K=" << format_party_set(gkt.keepers.at(asset))
               << "|T=" << format_party_set(gkt.takers.at(asset)) << "\n";
        } else {
            os << "gkt|L" << ledger << "|" << asset.name << "|" << format_party_set(givers) << "|"
               << format_party_set(gkt.keepers.at(asset)) << "|"
               << format_party_set(gkt.takers.at(asset)) << "\n";
        }
    }
}

}  // namespace

Report classify_scenario(const ScenarioFile& sc) {
    Report r = base_report(sc);
    r.classifyOnly = true;
    return r;
}

Report run_scenario(const ScenarioFile& sc) {
    Report r = base_report(sc);
    r.schedule = protocol_schedule(sc.instance, sc.protocol, sc.baseDuration, sc.lockMode);
    const RunOutcome outcome = run_protocol(sc.instance, sc.protocol, sc.profile, sc.run_config());
    r.events = outcome.events;
    r.results.push_back({sc.profile.str(), outcome.verdicts});
    r.payoffs = compute_payoffs(sc.instance, outcome.finalState1, outcome.finalState2);
    return r;
}

Report enumerate_scenario(const ScenarioFile& sc, int bound) {
    Report r = base_report(sc);
    r.schedule = protocol_schedule(sc.instance, sc.protocol, sc.baseDuration, sc.lockMode);
    for (const auto& profile : enumerate_profiles(sc.instance, sc.protocol, bound)) {
        const RunOutcome outcome = run_protocol(sc.instance, sc.protocol, profile, sc.run_config());
        r.results.push_back({profile.str(), outcome.verdicts});
    }
    return r;
}

std::string emit_report(const Report& r, ReportFormat format) {
    std::ostringstream os;
    const bool text = format == ReportFormat::Text;
    if (text) {
        os << "scenario: " << r.scenarioName << "\n";
        for (const auto& w : r.warnings) os << "warning: " << w << "\n";
        if (!r.classifyOnly) {
            os << "protocol: " << to_string(r.protocol) << "\n";
            os << "lockmode: " << to_string(r.lockMode) << "\n";
            os << "T: " << r.baseDuration << "\n";
            os << "seed: " << r.seed << "\n";
        }
        os << "classification: " << to_string(r.classification.kind) << "\n";
        os << "s12: " << format_party_set(r.classification.s12) << "\n";
        os << "s21: " << format_party_set(r.classification.s21) << "\n";
    } else {
        os << "classification|" << to_string(r.classification.kind) << "\n";
        os << "s12|" << format_party_set(r.classification.s12) << "\n";
        os << "s21|" << format_party_set(r.classification.s21) << "\n";
    }
    emit_gkt(os, r.gkt1, 1, format);
    emit_gkt(os, r.gkt2, 2, format);
    if (r.classifyOnly) return os.str();

    if (r.schedule) {
        for (const auto& [asset, duration] : r.schedule->durations) {
            if (text)
                os << "schedule: L" << asset.ledger << "|" << asset.name << "|" << duration << "\n";
            else
                os << "schedule|L" << asset.ledger << "|" << asset.name << "|" << duration << "\n";
        }
    }

    const bool enumerated = r.results.size() > 1;
    if (!enumerated && !r.events.empty()) {
        if (text) os << "events:\n";
        for (const auto& e : r.events) os << e.line() << "\n";
    }
    int index = 0;
    for (const auto& block : r.results) {
        if (enumerated) {
            if (text)
                os << "profile: " << block.label << "\n";
            else
                os << "profile|" << index << "|" << block.label << "\n";
        }
        if (text && !enumerated) os << "verdicts:\n";
        for (const auto& v : block.verdicts) {
            if (text)
                os << v.party.value << "|" << to_string(v.verdict) << "\n";
            else
                os << "verdict|" << v.party.value << "|" << to_string(v.verdict) << "\n";
        }
        ++index;
    }
    if (text && r.payoffs) {
        os << "payoffs:\n";
        for (const auto& [party, value] : r.payoffs->perParty)
            os << party.value << "|" << value.str() << "\n";
    }
    return os.str();
}

}  // namespace gae
