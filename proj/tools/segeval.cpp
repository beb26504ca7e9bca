#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "segeval/error.hpp"
#include "segeval/report.hpp"
#include "segeval/selftest.hpp"

namespace {

int run_command(const std::string& config_path) {
    segeval::RunConfig config;
    try {
        config = segeval::load_config(config_path);
        segeval::apply_environment(config);
    } catch (const segeval::Error& e) {
        std::fprintf(stderr, "segeval: %s\n", e.what());
        return segeval::kExitConfigError;
    }
    segeval::RunSummary summary;
    try {
        summary = segeval::run(config);
    } catch (const segeval::Error& e) {
        std::fprintf(stderr, "segeval: %s\n", e.what());
        return segeval::kExitConfigError;
    }
    std::printf("%zu case(s) evaluated, %zu failed\n", summary.succeeded, summary.failed);
    if (summary.selected_threshold) std::printf("summary threshold: %g\n", *summary.selected_threshold);
    if (summary.failed > 0) {
        std::fprintf(stderr, "see %s for failures\n", (config.output_dir / "errors.csv").string().c_str());
    }
    return summary.exit_code;
}

int validate_command(const std::string& config_path) {
    segeval::RunConfig config;
    try {
        config = segeval::load_config(config_path);
    } catch (const segeval::Error& e) {
        std::fprintf(stderr, "segeval: %s\n", e.what());
        return segeval::kExitConfigError;
    }
    const segeval::ValidationReport report = segeval::validate(config);
    for (const auto& d : report.diagnostics) {
        std::printf("%s\t%s\n", d.patient_id.empty() ? "-" : d.patient_id.c_str(), d.message.c_str());
    }
    if (report.config_error) return segeval::kExitConfigError;
    if (!report.diagnostics.empty()) return 2;
    std::printf("ok\n");
    return 0;
}

int selftest_command(const std::vector<std::string>& suites, bool all) {
    segeval::SelftestOptions options;
    if (!all) {
        options.suites.clear();
        try {
            for (const auto& s : suites) {
                if (!s.empty()) options.suites.insert(segeval::parse_selftest_suite(s));
            }
        } catch (const segeval::Error& e) {
            std::fprintf(stderr, "segeval: %s\n", e.what());
            return segeval::kExitConfigError;
        }
    }
    const segeval::SelftestReport report = segeval::oracle_selftest(options);
    std::fputs(report.summary().c_str(), stdout);
    return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Segmentation evaluation over patient cohorts"};
    app.require_subcommand(1);

    std::string run_config;
    auto* run = app.add_subcommand("run", "Evaluate every case of a manifest and write CSV reports");
    run->add_option("--config", run_config, "Config file (key = value lines)")->required()->check(CLI::ExistingFile);

    std::string validate_config;
    auto* validate = app.add_subcommand("validate", "Check headers and geometry without computing metrics");
    validate->add_option("--config", validate_config, "Config file")->required();

    std::vector<std::string> suites;
    auto* selftest = app.add_subcommand("selftest", "Compare metric kernels against brute-force references");
    auto* suites_opt = selftest->add_option("--suites", suites, "confusion, surface, components (comma separated)")
                           ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : segeval::kExitConfigError;
    }

    if (*run) return run_command(run_config);
    if (*validate) return validate_command(validate_config);
    return selftest_command(suites, suites_opt->count() == 0);
}
