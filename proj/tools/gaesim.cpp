#include "gae/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

gae::ScenarioFile load(const std::string& path, const std::optional<std::uint64_t>& seed) {
    gae::ScenarioFile sc = gae::parse_scenario(read_file(path));
    if (sc.name.empty()) {
        const std::size_t slash = path.find_last_of('/');
        sc.name = slash == std::string::npos ? path : path.substr(slash + 1);
    }
    if (seed) sc.seed = *seed;
    return sc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-ledger asset exchange simulator"};
    app.require_subcommand(1);

    std::string file;
    std::string format = "text";
    std::optional<std::uint64_t> seed;
    int bound = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("file", file, "scenario file")->required();
        cmd->add_option("--format", format, "text|lines")
            ->check(CLI::IsMember({"text", "lines"}));
        cmd->add_option("--seed", seed, "override the scenario seed");
    };
    CLI::App* runCmd = app.add_subcommand("run", "execute the scenario's strategy profile");
    add_common(runCmd);
    CLI::App* classifyCmd = app.add_subcommand("classify", "derive the transaction classification");
    add_common(classifyCmd);
    CLI::App* enumCmd = app.add_subcommand("enumerate", "run every profile up to a deviator bound");
    add_common(enumCmd);
    enumCmd->add_option("--bound", bound, "maximum number of deviators");

    CLI11_PARSE(app, argc, argv);

    try {
        const gae::ScenarioFile sc = load(file, seed);
        const gae::ReportFormat fmt =
            format == "lines" ? gae::ReportFormat::Lines : gae::ReportFormat::Text;
        gae::Report report;
        if (classifyCmd->parsed()) {
            report = gae::classify_scenario(sc);
        } else if (runCmd->parsed()) {
            report = gae::run_scenario(sc);
        } else {
            int effective = bound >= 0 ? bound : sc.enumerateBound.value_or(1);
            report = gae::enumerate_scenario(sc, effective);
        }
        std::cout << gae::emit_report(report, fmt);
        return report.any_violated() ? 2 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
