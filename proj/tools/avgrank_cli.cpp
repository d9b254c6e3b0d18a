#include <iostream>

#include "CLI11.hpp"
#include "avgrank/apcache.hpp"
#include "avgrank/commands.hpp"

using namespace avgrank;

namespace {

// Raw flag values; only the ones given on the command line override the config.
struct Flags {
    std::string config;
    double T = 0, X = 0, C0 = 0;
    int R_max = 0, delta = 1, sign = 0, curve_row = 1;
    std::vector<int> cls;
    std::string weight, twist_weight, base, curve_file, out, cache;
    unsigned threads = 1;
    i64 prime_limit = 0;
};

struct Options {
    CLI::Option *T, *X, *C0, *R_max, *weight, *twist_weight, *delta, *sign, *cls, *base, *curve_file, *curve_row, *out,
        *threads, *cache, *prime_limit, *config;
};

void add_common(CLI::App* sub, Flags& f, Options& o) {
    o.config = sub->add_option("--config", f.config, "JSON config file; flags override its keys");
    o.threads = sub->add_option("--threads", f.threads, "worker threads (outputs do not depend on it)");
    o.out = sub->add_option("--out", f.out, "output prefix: writes <out>.csv and <out>.json");
    o.T = sub->add_option("-T,--T", f.T, "family scale T");
    o.X = sub->add_option("-X,--X", f.X, "explicit-formula cutoff X");
    o.C0 = sub->add_option("--C0", f.C0, "bounded constant added as C0 / log X");
    o.R_max = sub->add_option("--R-max", f.R_max, "largest R in the density ladder");
    o.weight = sub->add_option("--weight", f.weight, "family weight w1 = w2: bump or c3");
    o.twist_weight = sub->add_option("--twist-weight", f.twist_weight, "twist weight: bump or c3");
    o.delta = sub->add_option("--delta", f.delta, "twist weight side: 1 or -1");
    o.sign = sub->add_option("--sign", f.sign, "root number filter: 1, -1 or 0 for both");
    o.cls = sub->add_option("--class", f.cls, "class filter k delta e")->expected(3);
    o.base = sub->add_option("--base", f.base, "base curve: 37a or 11a");
    o.curve_file = sub->add_option("--curve-file", f.curve_file, "rows 'r s N w' for the base curve");
    o.curve_row = sub->add_option("--curve-row", f.curve_row, "1-based row of --curve-file");
    o.cache = sub->add_option("--cache", f.cache, "a_p cache file");
    o.prime_limit = sub->add_option("--prime-limit", f.prime_limit, "cache build: largest prime");
}

ExperimentConfig resolve(const Flags& f, const Options& o) {
    ExperimentConfig cfg;
    if (o.config->count()) apply_config_file(cfg, f.config);
    if (o.T->count()) cfg.T = f.T;
    if (o.X->count()) cfg.X = f.X;
    if (o.C0->count()) cfg.C0 = f.C0;
    if (o.R_max->count()) cfg.R_max = f.R_max;
    if (o.weight->count()) cfg.weight = f.weight;
    if (o.twist_weight->count()) cfg.twist_weight = f.twist_weight;
    if (o.delta->count()) cfg.delta = f.delta;
    if (o.sign->count()) cfg.sign = f.sign;
    if (o.cls->count()) cfg.class_filter = ClassTriple{f.cls[0], f.cls[1], f.cls[2]};
    if (o.base->count()) cfg.base = f.base;
    if (o.curve_file->count()) cfg.curve_file = f.curve_file;
    if (o.curve_row->count()) cfg.curve_row = f.curve_row;
    if (o.out->count()) cfg.out = f.out;
    if (o.threads->count()) cfg.threads = f.threads;
    if (o.cache->count()) cfg.cache = f.cache;
    if (o.prime_limit->count()) cfg.prime_limit = f.prime_limit;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explicit-formula rank bounds over elliptic curve families"};
    app.require_subcommand(1);

    std::string cache_action;

    auto* avg = app.add_subcommand("average-rank", "weighted average of the rank bound over the box family");
    auto* dens = app.add_subcommand("density", "census of large rank bounds and the moment bound ladder");
    auto* tw = app.add_subcommand("twists", "rank bounds over quadratic twists, split by root number");
    auto* ver = app.add_subcommand("verify", "run every identity and oracle suite");
    auto* cache = app.add_subcommand("cache", "build or check an a_p cache file");
    cache->add_option("action", cache_action, "build or check")->required()->check(CLI::IsMember({"build", "check"}));

    // every subcommand takes the full option set so a config file can be shared
    Flags per[5];
    Options per_opts[5];
    CLI::App* subs[5] = {avg, dens, tw, ver, cache};
    for (int i = 0; i < 5; ++i) add_common(subs[i], per[i], per_opts[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_invalid_config;
    }

    try {
        for (int i = 0; i < 5; ++i) {
            if (!subs[i]->parsed()) continue;
            const auto cfg = resolve(per[i], per_opts[i]);
            if (subs[i] == avg) return cmd_average_rank(cfg, std::cerr);
            if (subs[i] == dens) return cmd_density(cfg, std::cerr);
            if (subs[i] == tw) return cmd_twists(cfg, std::cerr);
            if (subs[i] == ver) return cmd_verify(cfg, std::cout, std::cerr);
            if (cache_action == "build") return cmd_cache_build(cfg, std::cerr);
            return cmd_cache_check(cfg, std::cout, std::cerr);
        }
    } catch (const ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return exit_invalid_config;
    } catch (const ApCacheError& e) {
        std::cerr << e.what() << '\n';
        return exit_cache_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return exit_invalid_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_invalid_config;
    }
    return exit_invalid_config;
}
