#include "blowlab/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace blowlab::kernels {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& active() {
    static const KernelTable& table = [] () -> const KernelTable& {
        if (const char* env = std::getenv("BLOWLAB_KERNELS"); env && std::string_view(env) == "scalar") {
            return scalar_table();
        }
        if (const KernelTable* simd = avx2_table(); simd && cpu_has_avx2()) return *simd;
        return scalar_table();
    }();
    return table;
}

}  // namespace blowlab::kernels
