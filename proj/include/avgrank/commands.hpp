#pragma once

// Subcommand drivers behind the avgrank executable. Each writes a CSV of
// rows and a JSON summary next to it (<out>.csv, <out>.json).
//
// average-rank  r,s,logN_term,U1_term,U2_term,bound
// density       R,census,markov_bound,reference_decay
// twists        D,root_number,k,delta,e,weight,logN_term,logND2_term,U1_term,U2_term,bound

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "avgrank/twists.hpp"

namespace avgrank {

enum ExitCode : int {
    exit_ok = 0,
    exit_invalid_config = 1,
    exit_empty_family = 2,
    exit_verify_failed = 3,
    exit_cache_error = 4,
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    double T = 1e4;
    std::optional<double> X;  // per-command default when unset
    double C0 = 0.0;
    int R_max = 12;
    std::string weight = "bump";        // w1 = w2: "bump" or "c3"
    std::string twist_weight = "bump";  // "bump" or "c3"
    int delta = 1;                      // side of the twist weight
    int sign = 0;                       // twists: +1, -1, or 0 for both
    std::optional<ClassTriple> class_filter;
    std::string base = "37a";  // "37a", "11a", or a row of curve_file
    std::filesystem::path curve_file;
    int curve_row = 1;  // 1-based row among the data rows of curve_file
    std::filesystem::path out = "avgrank";
    unsigned threads = 1;
    std::filesystem::path cache;
    std::optional<i64> prime_limit;  // cache build; defaults to floor(X)
};

/// Applies the keys of a JSON object to cfg. Unknown keys and ill-typed
/// values raise ConfigError.
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

/// Checks the numeric parameters a command depends on; ConfigError on failure.
void validate(const ExperimentConfig& cfg, const std::string& command);

BaseCurve resolve_base(const ExperimentConfig& cfg);

/// Subcommands return an ExitCode. Diagnostics go to `log`.
int cmd_average_rank(const ExperimentConfig& cfg, std::ostream& log);
int cmd_density(const ExperimentConfig& cfg, std::ostream& log);
int cmd_twists(const ExperimentConfig& cfg, std::ostream& log);
int cmd_cache_build(const ExperimentConfig& cfg, std::ostream& log);
int cmd_cache_check(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_verify(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log);

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs every identity and oracle suite at desk scale.
std::vector<SuiteResult> run_verify_suites(unsigned threads);

}  // namespace avgrank
