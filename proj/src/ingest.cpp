#include "outlier_bandit/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>

namespace outlier_bandit {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool parse_real(std::string_view text, double& out) {
    text = trim(text);
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

bool is_header(std::string_view line) {
    return line == "mean" || line == "arm_id,mean";
}

}  // namespace

LoadedMeans parse_means_csv(std::istream& in, const Bounds& bounds) {
    LoadedMeans loaded{{}, bounds};
    std::string raw;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (!seen_content) {
            seen_content = true;
            if (is_header(line)) continue;
        }

        std::string_view field = line;
        if (const auto comma = line.find(','); comma != std::string_view::npos) {
            if (line.find(',', comma + 1) != std::string_view::npos) {
                throw DatasetError("expected at most two columns", line_no);
            }
            field = line.substr(comma + 1);
        }
        double value = 0.0;
        if (!parse_real(field, value)) {
            throw DatasetError("cannot parse '" + std::string(trim(field)) + "' as a real number", line_no);
        }
        if (!bounds.contains(value)) {
            std::ostringstream msg;
            msg << "mean " << value << " outside bounds [" << bounds.a() << ", " << bounds.b() << "]";
            throw DatasetError(msg.str(), line_no);
        }
        loaded.means.push_back(value);
    }
    if (loaded.means.empty()) throw DatasetError("file contains no means", 0);
    return loaded;
}

LoadedMeans load_means_csv(const std::filesystem::path& path, const Bounds& bounds) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open " + path.string(), 0);
    return parse_means_csv(in, bounds);
}

void write_means_csv(std::ostream& out, std::span<const double> means) {
    out << "arm_id,mean\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < means.size(); ++i) out << (i + 1) << ',' << means[i] << '\n';
}

void write_means_csv(const std::filesystem::path& path, std::span<const double> means) {
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot write " + path.string(), 0);
    write_means_csv(out, means);
    if (!out) throw DatasetError("write failed for " + path.string(), 0);
}

std::vector<double> crowd_error_rates_standin(std::uint64_t seed, std::size_t workers) {
    Rng rng(seed);
    std::vector<double> rates;
    rates.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) {
        const double u = rng.uniform01();
        double rate = 0.0;
        if (u < 0.04) {
            rate = 0.45 + 0.35 * rng.uniform01();
        } else {
            // Product of uniforms skews the bulk toward low error rates.
            rate = 0.02 + 0.3 * rng.uniform01() * rng.uniform01();
        }
        rates.push_back(rate);
    }
    return rates;
}

}  // namespace outlier_bandit
