#pragma once

#include "gae/adversary.hpp"
#include "gae/protocol.hpp"
#include "gae/strategy.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gae {

/// Parse or semantic failure in a scenario file, carrying the line number.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// A parsed scenario: the exchange instance plus a complete run
/// configuration. Transfer lines use the set-arrow notation, e.g.
/// `L1: Currency: {X,Y} -> {W,Y,Z}`; a line without an arrow declares a held
/// asset that is not part of the exchange.
struct ScenarioFile {
    std::string name;
    GaeInstance instance;
    ProtocolKind protocol = ProtocolKind::Mphtlc;
    Tick baseDuration = 8;
    LockMode lockMode = LockMode::PerAsset;
    std::uint64_t seed = 0;
    StrategyProfile profile;  // total; honest unless overridden
    std::optional<std::string> attackName;
    std::optional<int> enumerateBound;
    AssetSet nonAtomicGults;
    std::vector<std::string> warnings;

    RunConfig run_config() const;
};

ScenarioFile parse_scenario(const std::string& text);

/// Canonical re-rendering; parsing it back yields an equivalent scenario.
std::string render_scenario(const ScenarioFile& scenario);

enum class ReportFormat { Text, Lines };

struct ProfileResult {
    std::string label;
    std::vector<AtomicityVerdict> verdicts;
};

struct Report {
    std::string scenarioName;
    std::vector<std::string> warnings;
    ProtocolKind protocol;
    LockMode lockMode;
    Tick baseDuration = 0;
    std::uint64_t seed = 0;
    ExchangeClassification classification;
    GktPartition gkt1, gkt2;
    bool classifyOnly = false;
    std::optional<TimeoutSchedule> schedule;
    std::vector<Event> events;           // single-run mode only
    std::vector<ProfileResult> results;  // one block per executed profile
    std::optional<PayoffVector> payoffs;

    bool any_violated() const;
};

/// Classification-only report (no protocol execution).
Report classify_scenario(const ScenarioFile& scenario);

/// Executes the scenario's single strategy profile.
Report run_scenario(const ScenarioFile& scenario);

/// Executes every profile from the library with at most `bound` deviators;
/// one verdict block per profile.
Report enumerate_scenario(const ScenarioFile& scenario, int bound);

std::string emit_report(const Report& report, ReportFormat format);

}  // namespace gae
