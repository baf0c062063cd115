#include "gof/calibrate.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "gof/error.hpp"

namespace gof {

std::string_view tail_name(Tail tail) {
    switch (tail) {
        case Tail::upper:
            return "upper";
        case Tail::lower:
            return "lower";
        case Tail::two_sided:
            return "two_sided";
    }
    return "upper";
}

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::size_t failed_index = count;
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

NullDistribution build_null(std::string statistic_name, std::string digest,
                            const StatisticFn& statistic, const SampleFn& sampler, std::size_t n,
                            std::size_t replicas, std::uint64_t seed, std::size_t jobs) {
    if (replicas == 0) {
        throw ResolutionError("null distribution needs at least one replica");
    }
    NullDistribution dist;
    dist.statistic_name = std::move(statistic_name);
    dist.config_digest = std::move(digest);
    dist.replicas = replicas;
    dist.seed = seed;
    dist.values.resize(replicas);
    parallel_for(replicas, jobs, [&](std::size_t r) {
        try {
            RandomStream rng(seed, r);
            const Sample s = sampler(rng, n);
            dist.values[r] = statistic(s, rng);
        } catch (const std::exception& e) {
            throw Error("replica " + std::to_string(r) + ": " + e.what());
        }
    });
    std::sort(dist.values.begin(), dist.values.end());
    return dist;
}

double p_value(const NullDistribution& dist, double observed, Tail tail) {
    if (dist.values.empty()) {
        throw PreconditionError("p-value needs a non-empty null distribution");
    }
    const auto& v = dist.values;
    const double denom = static_cast<double>(v.size()) + 1.0;
    const auto at_least =
        static_cast<double>(v.end() - std::lower_bound(v.begin(), v.end(), observed));
    const auto at_most =
        static_cast<double>(std::upper_bound(v.begin(), v.end(), observed) - v.begin());
    const double upper = (1.0 + at_least) / denom;
    const double lower = (1.0 + at_most) / denom;
    switch (tail) {
        case Tail::upper:
            return upper;
        case Tail::lower:
            return lower;
        case Tail::two_sided:
            return std::min(1.0, 2.0 * std::min(upper, lower));
    }
    return upper;
}

double critical_value(const NullDistribution& dist, double alpha, bool enforce_resolution) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw PreconditionError("alpha must lie in (0, 1)");
    }
    if (dist.values.empty()) {
        throw PreconditionError("critical value needs a non-empty null distribution");
    }
    const auto r = static_cast<double>(dist.values.size());
    if (enforce_resolution && r * alpha < 5.0) {
        std::ostringstream msg;
        msg << "resolution guard: " << dist.values.size() << " replicas too few for alpha "
            << alpha << " (need replicas * alpha >= 5)";
        throw ResolutionError(msg.str());
    }
    const double allowed = alpha * r;
    const auto& v = dist.values;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto above =
            static_cast<double>(v.end() - std::upper_bound(v.begin(), v.end(), v[i]));
        if (above <= allowed) return v[i];
    }
    return v.back();
}

std::size_t minimum_replicas(double alpha) {
    const auto resolution = static_cast<std::size_t>(std::ceil(5.0 / alpha));
    return alpha <= 0.05 ? std::max<std::size_t>(100, resolution) : resolution;
}

std::string config_digest(std::string_view canonical) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

void write_null(std::ostream& os, const NullDistribution& dist) {
    if (dist.statistic_name.find_first_of(" \t\n") != std::string::npos) {
        throw PreconditionError("statistic name must not contain whitespace");
    }
    os << "# gof-null v1 statistic=" << dist.statistic_name << " replicas=" << dist.replicas
       << " seed=" << dist.seed << " config_digest=" << dist.config_digest << '\n';
    char buf[64];
    for (double v : dist.values) {
        std::snprintf(buf, sizeof buf, "%a\n", v);
        os << buf;
    }
}

NullDistribution read_null(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) {
        throw ParseError("null distribution file is empty");
    }
    std::istringstream hs(header);
    std::string hash, magic, version;
    hs >> hash >> magic >> version;
    if (hash != "#" || magic != "gof-null" || version != "v1") {
        throw ParseError("not a gof-null v1 file");
    }
    NullDistribution dist;
    bool have_name = false, have_replicas = false, have_seed = false, have_digest = false;
    std::string field;
    while (hs >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw ParseError("malformed header field: " + field);
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "statistic") {
            dist.statistic_name = value;
            have_name = true;
        } else if (key == "replicas") {
            dist.replicas = std::stoull(value);
            have_replicas = true;
        } else if (key == "seed") {
            dist.seed = std::stoull(value);
            have_seed = true;
        } else if (key == "config_digest") {
            dist.config_digest = value;
            have_digest = true;
        }
    }
    if (!(have_name && have_replicas && have_seed && have_digest)) {
        throw ParseError("null distribution header is incomplete");
    }
    dist.values.reserve(dist.replicas);
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || *end != '\0') {
            throw ParseError("bad value on line " + std::to_string(lineno));
        }
        dist.values.push_back(v);
    }
    if (dist.values.size() != dist.replicas) {
        throw ParseError("null distribution has " + std::to_string(dist.values.size()) +
                         " values, header says " + std::to_string(dist.replicas));
    }
    if (!std::is_sorted(dist.values.begin(), dist.values.end())) {
        throw ParseError("null distribution values are not sorted");
    }
    return dist;
}

NullCache::NullCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path NullCache::path_for(std::string_view digest, std::size_t replicas,
                                          std::uint64_t seed) const {
    std::ostringstream name;
    name << digest << "-r" << replicas << "-s" << seed << ".null";
    return dir_ / name.str();
}

std::optional<NullDistribution> NullCache::load(std::string_view digest, std::size_t replicas,
                                                std::uint64_t seed) const {
    const auto path = path_for(digest, replicas, seed);
    std::ifstream in(path);
    if (!in) return std::nullopt;
    NullDistribution dist = read_null(in);
    if (dist.config_digest != digest || dist.replicas != replicas || dist.seed != seed) {
        return std::nullopt;
    }
    return dist;
}

std::filesystem::path NullCache::store(const NullDistribution& dist) const {
    std::filesystem::create_directories(dir_);
    const auto path = path_for(dist.config_digest, dist.replicas, dist.seed);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write cache file " + tmp.string());
        write_null(out, dist);
        if (!out) throw Error("failed writing cache file " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
    return path;
}

}  // namespace gof
