#include "hflow/parallel.hpp"

#include <cstdlib>
#include <thread>
#include <vector>

namespace hflow {

int thread_count() {
    static int n = [] {
        if (const char* env = std::getenv("HFLOW_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return v;
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw ? static_cast<int>(hw) : 1;
    }();
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    int nt = thread_count();
    if (nt <= 1 || n < 4096) {
        body(0, n);
        return;
    }
    std::size_t chunk = (n + nt - 1) / nt;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

namespace {
constexpr std::size_t kLeaf = 256;

double pairwise_span(const double* v, std::size_t n) {
    if (n <= kLeaf) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_span(v, half) + pairwise_span(v + half, n - half);
}

double pairwise_fn(std::size_t base, std::size_t n, const std::function<double(std::size_t)>& f) {
    if (n <= kLeaf) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += f(base + i);
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_fn(base, half, f) + pairwise_fn(base + half, n - half, f);
}
}  // namespace

double deterministic_sum(std::span<const double> v) { return pairwise_span(v.data(), v.size()); }

double deterministic_sum(std::size_t n, const std::function<double(std::size_t)>& f) {
    return pairwise_fn(0, n, f);
}

}  // namespace hflow
