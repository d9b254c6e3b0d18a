#include "avgrank/commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "avgrank/apcache.hpp"
#include "avgrank/families.hpp"
#include "avgrank/moments.hpp"
#include "json.hpp"

namespace avgrank {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

template <class T>
T get_as(const json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

}  // namespace

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, v] : doc.items()) {
        if (key == "T")
            cfg.T = get_as<double>(v, key);
        else if (key == "X")
            cfg.X = get_as<double>(v, key);
        else if (key == "C0")
            cfg.C0 = get_as<double>(v, key);
        else if (key == "R_max")
            cfg.R_max = get_as<int>(v, key);
        else if (key == "weight")
            cfg.weight = get_as<std::string>(v, key);
        else if (key == "twist_weight")
            cfg.twist_weight = get_as<std::string>(v, key);
        else if (key == "delta")
            cfg.delta = get_as<int>(v, key);
        else if (key == "sign")
            cfg.sign = get_as<int>(v, key);
        else if (key == "class") {
            const auto t = get_as<std::vector<int>>(v, key);
            if (t.size() != 3) throw ConfigError("config key 'class' needs three integers [k, delta, e]");
            cfg.class_filter = ClassTriple{t[0], t[1], t[2]};
        } else if (key == "base")
            cfg.base = get_as<std::string>(v, key);
        else if (key == "curve_file")
            cfg.curve_file = get_as<std::string>(v, key);
        else if (key == "curve_row")
            cfg.curve_row = get_as<int>(v, key);
        else if (key == "out")
            cfg.out = get_as<std::string>(v, key);
        else if (key == "threads")
            cfg.threads = get_as<unsigned>(v, key);
        else if (key == "cache")
            cfg.cache = get_as<std::string>(v, key);
        else if (key == "prime_limit")
            cfg.prime_limit = get_as<i64>(v, key);
        else
            throw ConfigError("unknown config key '" + key + "'");
    }
}

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

double resolved_X(const ExperimentConfig& cfg, const std::string& command) {
    if (cfg.X) return *cfg.X;
    return command == "twists" ? cfg.T : default_X(cfg.T);
}

SmoothWeight family_weight(const std::string& name) {
    if (name == "bump") return even_bump();
    if (name == "c3") {
        const auto half = c3_bump(0.5, 1.0);
        return SmoothWeight("even_c3_bump[0.5,1]", -1.0, 1.0, Smoothness::c3,
                            [half](double x) { return half(std::abs(x)); }, {-0.5, 0.5});
    }
    throw ConfigError("unknown weight '" + name + "' (expected bump or c3)");
}

SmoothWeight twist_side_weight(const std::string& name, int delta) {
    if (name == "bump") return twist_weight(delta);
    if (name == "c3") {
        if (delta == 1) return c3_bump(1.0, 2.0);
        const auto w = c3_bump(1.0, 2.0);
        return SmoothWeight("c3_bump[-2,-1]", -2.0, -1.0, Smoothness::c3, [w](double x) { return w(-x); });
    }
    throw ConfigError("unknown twist weight '" + name + "' (expected bump or c3)");
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::filesystem::path with_suffix(const std::filesystem::path& out, const char* ext) {
    return std::filesystem::path(out.string() + ext);
}

void write_json(const std::filesystem::path& path, const ordered_json& doc) {
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
}

std::optional<ApCache> load_cache_if_set(const ExperimentConfig& cfg) {
    if (cfg.cache.empty()) return std::nullopt;
    return ApCache::load(cfg.cache);
}

}  // namespace

void validate(const ExperimentConfig& cfg, const std::string& command) {
    require(cfg.threads >= 1 && cfg.threads <= 1024, "threads must be between 1 and 1024");
    require(std::isfinite(cfg.T) && cfg.T >= 16, "T must be a finite number >= 16");
    require(std::isfinite(cfg.C0), "C0 must be finite");
    if (cfg.X) require(std::isfinite(*cfg.X), "X must be finite");
    const double X = resolved_X(cfg, command);

    if (command == "average-rank") {
        (void)family_weight(cfg.weight);
        require(X >= 25, "X must be >= 25");
        require(X <= std::pow(cfg.T, 5.0 / 6.0), "X must not exceed T^(5/6)");
        require(cfg.T <= 1e12, "T must be <= 1e12");
    } else if (command == "density") {
        require(X >= 25, "X must be >= 25");
        require(cfg.R_max >= 0 && cfg.R_max <= 200, "R_max must be in [0, 200]");
        require(cfg.T <= 1e12, "T must be <= 1e12");
    } else if (command == "twists") {
        require(cfg.delta == 1 || cfg.delta == -1, "delta must be +1 or -1");
        require(cfg.sign >= -1 && cfg.sign <= 1, "sign must be -1, 0 or +1");
        (void)twist_side_weight(cfg.twist_weight, cfg.delta);
        require(X >= 25 && X <= cfg.T * cfg.T, "X must satisfy 25 <= X <= T^2");
        require(cfg.T <= 1e7, "T must be <= 1e7 for twists");
        if (cfg.class_filter) {
            const auto& c = *cfg.class_filter;
            require(c.k == 1 || c.k == 3 || c.k == 5 || c.k == 7, "class k must be odd and below 8");
            require(c.delta == cfg.delta, "class delta must match the weight side");
            require(c.e == 0 || c.e == 2 || c.e == 3, "class e must be 0, 2 or 3");
        }
        if (!cfg.curve_file.empty()) require(cfg.curve_row >= 1, "curve_row must be >= 1");
    } else if (command == "cache-build") {
        require(!cfg.cache.empty(), "cache path is required");
        const double limit = cfg.prime_limit ? static_cast<double>(*cfg.prime_limit) : X;
        require(limit >= 5 && limit <= 1e6, "prime limit must be in [5, 1e6]");
        require(cfg.T <= 1e12, "T must be <= 1e12");
    } else if (command == "cache-check") {
        require(!cfg.cache.empty(), "cache path is required");
    } else if (command != "verify") {
        throw ConfigError("unknown command '" + command + "'");
    }
}

BaseCurve resolve_base(const ExperimentConfig& cfg) {
    if (!cfg.curve_file.empty()) {
        std::vector<BaseCurve> rows;
        try {
            rows = load_curve_data(cfg.curve_file);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        if (cfg.curve_row < 1 || static_cast<std::size_t>(cfg.curve_row) > rows.size())
            throw ConfigError("curve_row " + std::to_string(cfg.curve_row) + " out of range (file has " +
                              std::to_string(rows.size()) + " rows)");
        return rows[static_cast<std::size_t>(cfg.curve_row - 1)];
    }
    if (cfg.base == "37a") return curve_37a();
    if (cfg.base == "11a") return curve_11a();
    throw ConfigError("unknown base curve '" + cfg.base + "' (expected 37a, 11a, or a curve file)");
}

int cmd_average_rank(const ExperimentConfig& cfg, std::ostream& log) {
    validate(cfg, "average-rank");
    const double X = resolved_X(cfg, "average-rank");
    FamilyParams params;
    params.T = cfg.T;
    params.weight_r = family_weight(cfg.weight);
    params.weight_s = family_weight(cfg.weight);
    const auto cache = load_cache_if_set(cfg);

    const auto csv_path = with_suffix(cfg.out, ".csv");
    auto csv = open_output(csv_path);
    csv << "r,s,logN_term,U1_term,U2_term,bound\n";
    const RecordSink sink = [&](const RankBoundRecord& rec) {
        csv << rec.r << ',' << rec.s << ',' << num(rec.logN_term) << ',' << num(rec.U1_term) << ','
            << num(rec.U2_term) << ',' << num(rec.bound) << '\n';
    };

    RankBoundSummary sum;
    try {
        sum = average_rank_experiment(params, X, cfg.C0, cfg.threads, sink, cache ? &*cache : nullptr);
    } catch (const EmptyFamilyError& e) {
        log << "empty family: " << e.what() << '\n';
        return exit_empty_family;
    }
    csv.close();

    ordered_json doc;
    doc["command"] = "average-rank";
    doc["T"] = sum.T;
    doc["X"] = sum.X;
    doc["log_X"] = std::log(sum.X);
    doc["C0"] = sum.C0;
    doc["weight"] = params.weight_r.name();
    doc["S_T"] = sum.S_T;
    doc["S_D"] = sum.S_D;
    doc["curves"] = sum.curves;
    doc["averages"] = {{"logN_term", sum.avg_logN_term}, {"U1_term", sum.avg_U1_term},
                       {"U2_term", sum.avg_U2_term},     {"bound", sum.avg_bound},
                       {"U1_over_logX", sum.avg_U1_over_logX}, {"U2_over_logX", sum.avg_U2_over_logX}};
    doc["rows_csv"] = csv_path.filename().string();
    doc["caveats"] = {
        "averages are weighted by w_T over minimal nonsingular curves with nonzero weight",
        "C0 is a user-supplied stand-in for the unspecified bounded constant; bound includes C0 / log X",
        "logN_term uses a conductor upper bound: exponent 8 at 2, 5 at 3 when 3 divides the discriminant, "
        "1 or 2 at larger primes",
        "finite T and X: the asymptotic statement is not tested by this output"};
    write_json(with_suffix(cfg.out, ".json"), doc);
    log << "average-rank: " << sum.curves << " curves, avg bound " << num(sum.avg_bound) << '\n';
    return exit_ok;
}

int cmd_density(const ExperimentConfig& cfg, std::ostream& log) {
    validate(cfg, "density");
    const double X = resolved_X(cfg, "density");
    const auto rep = high_rank_census(cfg.T, X, cfg.C0, cfg.R_max, cfg.threads);
    if (rep.count_C == 0) {
        log << "empty family: no minimal curves at T = " << num(cfg.T) << '\n';
        return exit_empty_family;
    }

    const auto csv_path = with_suffix(cfg.out, ".csv");
    auto csv = open_output(csv_path);
    csv << "R,census,markov_bound,reference_decay\n";
    ordered_json rows = ordered_json::array();
    for (const auto& row : rep.rows) {
        csv << row.R << ',' << row.census << ',' << (row.markov_bound ? num(*row.markov_bound) : std::string())
            << ',' << num(row.reference_decay) << '\n';
        ordered_json r;
        r["R"] = row.R;
        r["census"] = row.census;
        r["census_fraction"] = static_cast<double>(row.census) / static_cast<double>(rep.count_C);
        r["k"] = row.k;
        if (row.markov_bound)
            r["markov_bound"] = *row.markov_bound;
        else
            r["markov_bound"] = nullptr;
        r["reference_decay"] = row.reference_decay;
        rows.push_back(r);
    }
    csv.close();

    ordered_json doc;
    doc["command"] = "density";
    doc["T"] = rep.T;
    doc["X"] = rep.X;
    doc["C0"] = rep.C0;
    doc["count_D"] = rep.count_D;
    doc["count_C"] = rep.count_C;
    doc["threshold"] = rep.threshold;
    doc["census_cutoff"] = rep.cutoff;
    doc["type1_S"] = rep.type1_S;
    doc["rows"] = rows;
    doc["rows_csv"] = csv_path.filename().string();
    doc["caveats"] = {"census counts minimal curves whose explicit-formula rank bound is >= R",
                      "markov_bound is empty where R is below the threshold 3 + 2 log T / log X",
                      "reference_decay is (3R/2)^(-R/12) without its implied constant"};
    write_json(with_suffix(cfg.out, ".json"), doc);
    log << "density: " << rep.count_C << " minimal curves, threshold " << num(rep.threshold) << '\n';
    return exit_ok;
}

int cmd_twists(const ExperimentConfig& cfg, std::ostream& log) {
    validate(cfg, "twists");
    const double X = resolved_X(cfg, "twists");
    const BaseCurve base = resolve_base(cfg);

    auto family_for = [&](int sign) {
        TwistFamily f{base, twist_side_weight(cfg.twist_weight, cfg.delta), sign, cfg.class_filter};
        return f;
    };
    const std::vector<int> signs = cfg.sign == 0 ? std::vector<int>{1, -1} : std::vector<int>{cfg.sign};
    std::vector<TwistReport> reports;
    for (const int sg : signs) reports.push_back(twist_average_experiment(family_for(sg), cfg.T, X, cfg.C0, cfg.threads));
    bool any = false;
    for (const auto& r : reports) any = any || !r.empty;
    if (!any) {
        log << "empty family: no fundamental discriminants carry weight\n";
        return exit_empty_family;
    }

    const auto csv_path = with_suffix(cfg.out, ".csv");
    auto csv = open_output(csv_path);
    csv << "D,root_number,k,delta,e,weight,logN_term,logND2_term,U1_term,U2_term,bound\n";
    for (const auto& rep : reports)
        for (const auto& row : rep.rows)
            csv << row.D << ',' << row.root_number << ',' << row.cls.k << ',' << row.cls.delta << ',' << row.cls.e
                << ',' << num(row.weight) << ',' << num(row.logN_term) << ',' << num(row.logND2_term) << ','
                << num(row.U1_term) << ',' << num(row.U2_term) << ',' << num(row.bound) << '\n';
    csv.close();

    ordered_json doc;
    doc["command"] = "twists";
    doc["base"] = {{"label", base.label},
                   {"r", base.curve.r},
                   {"s", base.curve.s},
                   {"N", base.N},
                   {"w", base.w}};
    doc["T"] = cfg.T;
    doc["X"] = X;
    doc["log_X"] = std::log(X);
    doc["C0"] = cfg.C0;
    doc["delta"] = cfg.delta;
    doc["weight"] = twist_side_weight(cfg.twist_weight, cfg.delta).name();
    if (cfg.class_filter) doc["class_filter"] = to_string(*cfg.class_filter);

    ordered_json by_sign = ordered_json::array();
    for (const auto& rep : reports) {
        ordered_json s;
        s["sign"] = rep.sign;
        s["members"] = rep.members;
        s["total_weight"] = rep.total_weight;
        if (rep.empty) {
            s["empty"] = true;
        } else {
            s["empty"] = false;
            s["averages"] = {{"logN_term", rep.avg_logN_term}, {"logND2_term", rep.avg_logND2_term},
                             {"U1_term", rep.avg_U1_term},     {"U2_term", rep.avg_U2_term},
                             {"bound", rep.avg_bound},         {"U1_over_logX", rep.avg_U1_over_logX},
                             {"U2_over_logX", rep.avg_U2_over_logX}};
            s["max_U2_deviation"] = rep.max_U2_deviation;
        }
        by_sign.push_back(s);
    }
    doc["by_sign"] = by_sign;

    // W+ and W- against the unsigned enumeration
    if (cfg.sign == 0) {
        const auto all = enumerate_T_pm(family_for(0), cfg.T);
        const double total = weighted_total(all);
        const double split = reports[0].total_weight + reports[1].total_weight;
        doc["partition_check"] = {{"W_plus", reports[0].total_weight},
                                  {"W_minus", reports[1].total_weight},
                                  {"W_sum", split},
                                  {"W_all", total},
                                  {"members_plus", reports[0].members},
                                  {"members_minus", reports[1].members},
                                  {"members_all", all.size()},
                                  {"abs_difference", std::abs(split - total)}};
        if (!reports[0].empty && !reports[1].empty) {
            const auto [p_rank0, p_rank1] = theorem4_proportions(std::max(reports[0].avg_bound, 0.0),
                                                                 std::max(reports[1].avg_bound, 0.0));
            doc["proportions_measured"] = {{"avg_plus", reports[0].avg_bound},
                                           {"avg_minus", reports[1].avg_bound},
                                           {"rank0_lower", p_rank0},
                                           {"rank1_lower", p_rank1}};
        }
    }
    const auto [ref0, ref1] = theorem4_proportions(1.5, 1.5);
    doc["proportions_reference"] = {{"avg_plus", 1.5}, {"avg_minus", 1.5}, {"rank0_lower", ref0}, {"rank1_lower", ref1}};

    // sign pattern per (k, delta, e) over the same |D| range as the family
    const auto D_max = static_cast<i64>(std::floor(2.0 * cfg.T));
    ordered_json classes = ordered_json::array();
    for (const auto& [cls, signs_of] : class_sign_table(base, D_max)) {
        if (cls.delta != cfg.delta) continue;
        ordered_json c;
        c["class"] = to_string(cls);
        c["plus"] = signs_of.plus;
        c["minus"] = signs_of.minus;
        c["root_number"] = signs_of.constant() ? (signs_of.plus ? "+1" : "-1") : "mixed";
        c["twisted_plus"] = signs_of.twisted_plus;
        c["twisted_minus"] = signs_of.twisted_minus;
        c["root_number_times_jacobi_N_nhat"] =
            signs_of.twisted_constant() ? (signs_of.twisted_plus ? "+1" : "-1") : "mixed";
        classes.push_back(c);
    }
    doc["class_sign_map"] = {{"D_max", D_max}, {"classes", classes}};
    doc["rows_csv"] = csv_path.filename().string();
    doc["caveats"] = {
        "w_D = w sign(D) chi_D(N) from the supplied base root number and conductor",
        "logN_term uses a conductor upper bound of the minimal twist; logND2_term uses log(N D^2)",
        "C0 is a user-supplied stand-in for the unspecified bounded constant"};
    write_json(with_suffix(cfg.out, ".json"), doc);
    for (const auto& rep : reports)
        log << "twists: sign " << rep.sign << ": " << rep.members << " discriminants\n";
    return exit_ok;
}

int cmd_cache_build(const ExperimentConfig& cfg, std::ostream& log) {
    validate(cfg, "cache-build");
    const i64 limit = cfg.prime_limit ? *cfg.prime_limit : static_cast<i64>(std::floor(resolved_X(cfg, "average-rank")));
    const auto box = CoefficientBox::for_scale(cfg.T);
    try {
        const auto cache = ApCache::build(box, limit, cfg.threads);
        cache.save(cfg.cache);
        log << "cache: " << cache.curve_count() << " curves, " << cache.primes().size() << " primes, "
            << cache.record_count() << " records\n";
    } catch (const ApCacheError& e) {
        log << e.what() << '\n';
        return exit_cache_error;
    }
    return exit_ok;
}

int cmd_cache_check(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log) {
    validate(cfg, "cache-check");
    try {
        const auto cache = ApCache::load(cfg.cache);
        const auto primes = cache.primes();
        out << "curves " << cache.curve_count() << '\n'
            << "primes " << primes.size() << '\n'
            << "records " << cache.record_count() << '\n';
        if (!primes.empty()) out << "prime_range " << primes.front() << ' ' << primes.back() << '\n';
    } catch (const ApCacheError& e) {
        log << e.what() << '\n';
        return exit_cache_error;
    }
    return exit_ok;
}

int cmd_verify(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log) {
    validate(cfg, "verify");
    const auto results = run_verify_suites(cfg.threads);
    bool ok = true;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) out << ": " << r.detail;
        out << '\n';
        if (!r.passed) {
            log << "failed suite: " << r.name << '\n';
            ok = false;
        }
    }
    return ok ? exit_ok : exit_verify_failed;
}

}  // namespace avgrank
