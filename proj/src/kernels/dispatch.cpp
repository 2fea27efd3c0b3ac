#include <cstdlib>
#include <cstring>

#include "ofdmisac/kernels.hpp"

namespace ofdmisac::kernels {

#if defined(OFDMISAC_HAVE_AVX2)
const KernelTable* avx2_table();
#endif

const KernelTable* avx2() {
#if defined(OFDMISAC_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const KernelTable& table = [] () -> const KernelTable& {
        const char* force = std::getenv("OFDMISAC_FORCE_SCALAR");
        if (force != nullptr && std::strcmp(force, "0") != 0) return scalar();
        if (const KernelTable* t = avx2()) return *t;
        return scalar();
    }();
    return table;
}

}  // namespace ofdmisac::kernels
