#include <atomic>
#include <cstdlib>
#include <string>

#include "gof/error.hpp"
#include "gof/simd/kernels.hpp"

namespace gof::simd {

#if defined(GOF_HAVE_AVX2_KERNELS)
const KernelTable& avx2_kernels();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(GOF_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa best_available() {
    Isa best = Isa::scalar;
    for (Isa isa : available_isas()) best = isa;
    return best;
}

Isa initial_isa() {
    if (const char* env = std::getenv("GOF_SIMD")) {
        const std::string want = env;
        for (Isa isa : available_isas()) {
            if (isa_name(isa) == want) return isa;
        }
    }
    return best_available();
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{kernels_for(initial_isa())};
    return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return "scalar";
        case Isa::avx2:
            return "avx2";
    }
    return "unknown";
}

SoaPoints::SoaPoints(std::span<const double> row_major, std::size_t dim_)
    : data(row_major.size()), dim(dim_), count(dim_ == 0 ? 0 : row_major.size() / dim_) {
    for (std::size_t j = 0; j < count; ++j) {
        for (std::size_t k = 0; k < dim; ++k) {
            data[k * count + j] = row_major[j * dim + k];
        }
    }
}

const KernelTable* kernels_for(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return &scalar_kernels();
        case Isa::avx2:
#if defined(GOF_HAVE_AVX2_KERNELS)
            if (cpu_has_avx2()) return &avx2_kernels();
#endif
            return nullptr;
    }
    return nullptr;
}

std::vector<Isa> available_isas() {
    std::vector<Isa> out{Isa::scalar};
    if (kernels_for(Isa::avx2) != nullptr) out.push_back(Isa::avx2);
    return out;
}

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

Isa active_isa() { return active_kernels().isa; }

void set_active_isa(Isa isa) {
    const KernelTable* table = kernels_for(isa);
    if (table == nullptr) {
        throw PreconditionError("SIMD variant " + std::string(isa_name(isa)) +
                                " is not available on this machine");
    }
    active_slot().store(table, std::memory_order_release);
}

}  // namespace gof::simd
