#include "dualflow/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace dualflow::simd {

namespace {

const KernelTable* initial_choice() {
    const char* env = std::getenv("DUALFLOW_SIMD");
    if (env && std::string(env) == "scalar") return &scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return t;
    return &scalar_kernels();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_choice()};
    return table;
}

}  // namespace

const KernelTable& active_kernels() { return *current().load(std::memory_order_acquire); }

bool select_kernels(std::string_view name) {
    if (name == "scalar") {
        current().store(&scalar_kernels(), std::memory_order_release);
        return true;
    }
    if (name == "avx2") {
        if (const KernelTable* t = avx2_kernels()) {
            current().store(t, std::memory_order_release);
            return true;
        }
    }
    return false;
}

}  // namespace dualflow::simd
