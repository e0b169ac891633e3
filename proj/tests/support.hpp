#pragma once

// Shared helpers for the test suites: analytic CDFs, KS statistics, exact
// binomial acceptance intervals, total variation, scratch directories, and a
// tiny subprocess runner for exercising the command-line tool.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

namespace testsup {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Kolmogorov-Smirnov statistic of a continuous sample against an analytic CDF.
inline double ks_continuous(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// KS statistic for a discrete (integer-valued) sample: sup over atoms of the
// gap between the empirical and analytic CDF, checked on both sides of each
// atom.
inline double ks_discrete(const std::vector<double>& xs,
                          const std::function<double(double)>& cdf,
                          const std::function<double(double)>& pmf) {
    std::map<double, std::size_t> counts;
    for (double x : xs) ++counts[x];
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    double below = 0.0; // empirical mass strictly below the current atom
    for (const auto& [v, c] : counts) {
        const double emp_at = below + static_cast<double>(c) / n;
        const double f_at = cdf(v);
        d = std::max(d, std::abs(emp_at - f_at));
        d = std::max(d, std::abs(below - (f_at - pmf(v))));
        below = emp_at;
    }
    return d;
}

inline double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

// Central 99% acceptance interval [lo, hi] (inclusive, in counts) of
// Binomial(n, p), computed by exact log-space pmf summation.
inline std::pair<std::int64_t, std::int64_t> binom99(std::int64_t n, double p) {
    if (p <= 0.0) return {0, 0};
    if (p >= 1.0) return {n, n};
    const double logp = std::log(p), log1p_ = std::log1p(-p);
    const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
    double cum = 0.0;
    std::int64_t lo = -1, hi = n;
    for (std::int64_t k = 0; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double lp = lgn - std::lgamma(kk + 1.0) - std::lgamma(static_cast<double>(n - k) + 1.0) +
                          kk * logp + static_cast<double>(n - k) * log1p_;
        cum += std::exp(lp);
        if (lo < 0 && cum >= 0.005) lo = k;
        if (cum >= 0.995) {
            hi = k;
            break;
        }
    }
    return {std::max<std::int64_t>(lo, 0), hi};
}

inline double poisson_cdf(double k, double lambda) {
    if (k < 0) return 0.0;
    double term = std::exp(-lambda), cum = term;
    for (double i = 1; i <= std::floor(k); ++i) {
        term *= lambda / i;
        cum += term;
    }
    return cum;
}

inline double poisson_pmf(double k, double lambda) {
    return std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
}

// Fresh scratch directory under the system temp dir; removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("parcs_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
}

inline std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s)
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    return out + "'";
}

// Runs the parcs binary (env PARCS_BIN) with the given arguments; returns the
// process exit code. stdout/stderr go to a file when `capture` is given, and
// `env` may hold extra KEY=VALUE assignments prefixed to the command.
inline int run_cli(const std::vector<std::string>& args, const std::string& capture = "",
                   const std::string& env = "") {
    const char* bin = std::getenv("PARCS_BIN");
    if (!bin) return -1;
    std::string cmd = env.empty() ? shell_quote(bin) : env + " " + shell_quote(bin);
    for (const std::string& a : args) cmd += " " + shell_quote(a);
    cmd += capture.empty() ? " >/dev/null 2>&1" : " >" + shell_quote(capture) + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

} // namespace testsup
