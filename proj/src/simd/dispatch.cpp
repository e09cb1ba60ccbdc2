#include "windcast/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace windcast::simd {

namespace {

Backend detect() {
    if (const char* env = std::getenv("WINDCAST_SIMD")) {
        if (std::string(env) == "scalar") return Backend::scalar;
    }
    return avx2_available() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
    static std::atomic<Backend> b{detect()};
    return b;
}

}  // namespace

bool avx2_available() {
#if defined(WINDCAST_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok;
#else
    return false;
#endif
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_available()) {
        throw std::runtime_error("AVX2 backend requested but not available on this CPU");
    }
    current().store(b, std::memory_order_relaxed);
}

std::string_view backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

const KernelTable& table(Backend b) {
#if defined(WINDCAST_HAVE_AVX2)
    if (b == Backend::avx2) return detail::avx2_table();
#endif
    (void)b;
    return detail::scalar_table();
}

}  // namespace windcast::simd
