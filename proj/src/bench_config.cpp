#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "outlier_bandit/bench.hpp"

namespace outlier_bandit {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view value) {
    std::vector<std::string_view> items;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto comma = value.find(',', start);
        const auto end = comma == std::string_view::npos ? value.size() : comma;
        const auto item = trim(value.substr(start, end - start));
        if (!item.empty()) items.push_back(item);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return items;
}

double to_real(const std::string& key, std::string_view text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ConfigError(key, "'" + std::string(text) + "' is not a real number");
    }
    return v;
}

std::uint64_t to_count(const std::string& key, std::string_view text) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(key, "'" + std::string(text) + "' is not a non-negative integer");
    }
    return v;
}

std::uint64_t to_positive(const std::string& key, std::string_view text) {
    const auto v = to_count(key, text);
    if (v == 0) throw ConfigError(key, "must be >= 1");
    return v;
}

std::optional<DminRange> to_dmin(const std::string& key, std::string_view text) {
    if (text == "none") return std::nullopt;
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw ConfigError(key, "expected lo:hi or none, got '" + std::string(text) + "'");
    DminRange r{to_real(key, trim(text.substr(0, colon))), to_real(key, trim(text.substr(colon + 1)))};
    if (!(r.lo > 0.0 && r.lo <= r.hi && r.hi < 1.0)) throw ConfigError(key, "range must satisfy 0 < lo <= hi < 1");
    return r;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "algos", "n", "k", "dmin", "delta", "seeds", "base_seed", "ade_batch", "baseline_batch",
        "weight", "max_pulls", "means_file", "a", "b", "model", "jobs"};
    return keys;
}

}  // namespace

BenchPlan parse_bench_config(std::istream& in) {
    std::map<std::string, std::string> values;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(line), "line " + std::to_string(line_no) + " is not 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (!known_keys().contains(key)) throw ConfigError(key, "unknown key");
        if (value.empty()) throw ConfigError(key, "empty value");
        if (!values.emplace(key, value).second) throw ConfigError(key, "given more than once");
    }

    auto get = [&](const std::string& key) -> const std::string* {
        const auto it = values.find(key);
        return it == values.end() ? nullptr : &it->second;
    };

    ExperimentConfig base;
    std::uint64_t ade_batch = 1;
    std::uint64_t baseline_batch = 1000;
    unsigned jobs = 1;

    if (const auto* v = get("delta")) {
        base.delta = to_real("delta", *v);
        if (!(base.delta > 0.0 && base.delta < 1.0)) throw ConfigError("delta", "must lie in (0, 1)");
    }
    if (const auto* v = get("seeds")) base.seeds = to_positive("seeds", *v);
    if (const auto* v = get("base_seed")) base.base_seed = to_count("base_seed", *v);
    if (const auto* v = get("ade_batch")) ade_batch = to_positive("ade_batch", *v);
    if (const auto* v = get("baseline_batch")) baseline_batch = to_positive("baseline_batch", *v);
    if (const auto* v = get("weight")) base.weight = to_positive("weight", *v);
    if (const auto* v = get("max_pulls")) base.max_pulls = to_positive("max_pulls", *v);
    if (const auto* v = get("jobs")) jobs = static_cast<unsigned>(std::min<std::uint64_t>(to_positive("jobs", *v), 1024));
    if (const auto* v = get("model")) {
        try {
            base.model = parse_reward_model(*v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("model", e.what());
        }
    }
    {
        const double a = get("a") ? to_real("a", *get("a")) : 0.0;
        const double b = get("b") ? to_real("b", *get("b")) : 1.0;
        try {
            base.bounds = Bounds(a, b);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(get("a") ? "a" : "b", e.what());
        }
    }

    std::vector<Algorithm> algos;
    const auto* algo_text = get("algos");
    if (!algo_text) throw ConfigError("algos", "required");
    for (auto item : split_list(*algo_text)) {
        try {
            algos.push_back(parse_algorithm(item));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("algos", e.what());
        }
    }
    if (algos.empty()) throw ConfigError("algos", "empty list");

    std::vector<double> ks;
    const auto* k_text = get("k");
    if (!k_text) throw ConfigError("k", "required");
    for (auto item : split_list(*k_text)) {
        const double k = to_real("k", item);
        if (k < 0.0) throw ConfigError("k", "must be >= 0");
        ks.push_back(k);
    }
    if (ks.empty()) throw ConfigError("k", "empty list");

    std::vector<std::optional<DminRange>> dmins{std::nullopt};
    if (const auto* v = get("dmin")) {
        dmins.clear();
        for (auto item : split_list(*v)) dmins.push_back(to_dmin("dmin", item));
        if (dmins.empty()) throw ConfigError("dmin", "empty list");
    }

    std::vector<std::size_t> ns;
    const auto* means_file = get("means_file");
    const auto* n_text = get("n");
    if (means_file && n_text) throw ConfigError("n", "conflicts with means_file");
    if (means_file && get("dmin")) throw ConfigError("dmin", "conflicts with means_file");
    if (means_file) {
        base.source = MeansSource::file;
        base.means_path = *means_file;
        ns.push_back(0);
    } else {
        if (!n_text) throw ConfigError("n", "required unless means_file is given");
        for (auto item : split_list(*n_text)) ns.push_back(static_cast<std::size_t>(to_positive("n", item)));
        if (ns.empty()) throw ConfigError("n", "empty list");
    }

    BenchPlan plan;
    plan.jobs = jobs;
    for (double k : ks) {
        for (const auto& dmin : dmins) {
            for (std::size_t n : ns) {
                for (Algorithm algo : algos) {
                    ExperimentConfig c = base;
                    c.algo = algo;
                    c.k = k;
                    c.dmin_range = dmin;
                    c.n = n;
                    c.batch = algo == Algorithm::ade ? ade_batch : baseline_batch;
                    plan.configs.push_back(std::move(c));
                }
            }
        }
    }
    return plan;
}

}  // namespace outlier_bandit
