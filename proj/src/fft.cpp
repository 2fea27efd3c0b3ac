#include "ofdmisac/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace ofdmisac::fft {
namespace {

// Plans are created once per shape under a lock and executed through the
// new-array interface, which FFTW documents as thread-safe.
// FFTW_ESTIMATE keeps the chosen algorithm (and thus every output bit) stable
// from run to run.
struct PlanKey {
    std::size_t n, stride, count;
    int sign;
    bool in_place;
    auto operator<=>(const PlanKey&) const = default;
};

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(const PlanKey& key) {
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        const std::size_t span = key.stride == 1 ? key.n * key.count : key.n * key.stride;
        auto* a = fftw_alloc_complex(span);
        auto* b = key.in_place ? a : fftw_alloc_complex(span);
        const int n = static_cast<int>(key.n);
        const int stride = static_cast<int>(key.stride);
        const int dist = key.stride == 1 ? n : 1;
        fftw_plan plan = fftw_plan_many_dft(1, &n, static_cast<int>(key.count), a, nullptr, stride,
                                            dist, b, nullptr, stride, dist, key.sign,
                                            FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (b != a) fftw_free(b);
        fftw_free(a);
        if (plan == nullptr) throw IsacError("fftw: could not create plan");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

void run(const cplx* in, cplx* out, std::size_t n, std::size_t stride, std::size_t count, int sign) {
    if (n == 0 || count == 0) return;
    const PlanKey key{n, stride, count, sign, in == out};
    fftw_plan plan = cache().get(key);
    // FFTW never writes to the input of an out-of-place complex DFT.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in));
    fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out));
}

void check(std::span<const cplx> in, std::span<cplx> out) {
    if (in.size() != out.size()) throw DimensionMismatch("fft: input/output length mismatch");
}

}  // namespace

void forward(std::span<const cplx> in, std::span<cplx> out) {
    check(in, out);
    run(in.data(), out.data(), in.size(), 1, 1, FFTW_FORWARD);
}

void inverse(std::span<const cplx> in, std::span<cplx> out) {
    check(in, out);
    run(in.data(), out.data(), in.size(), 1, 1, FFTW_BACKWARD);
}

void inverse_scaled(std::span<const cplx> in, std::span<cplx> out) {
    check(in, out);
    inverse_scaled_batch(in.data(), out.data(), in.size(), 1);
}

void forward_batch(const cplx* in, cplx* out, std::size_t n, std::size_t count) {
    run(in, out, n, 1, count, FFTW_FORWARD);
}

void inverse_batch(const cplx* in, cplx* out, std::size_t n, std::size_t count) {
    run(in, out, n, 1, count, FFTW_BACKWARD);
}

void inverse_scaled_batch(const cplx* in, cplx* out, std::size_t n, std::size_t count) {
    run(in, out, n, 1, count, FFTW_BACKWARD);
    const double s = 1.0 / static_cast<double>(n);
    auto* p = reinterpret_cast<double*>(out);
    for (std::size_t i = 0; i < 2 * n * count; ++i) p[i] *= s;
}

void forward_strided(const cplx* in, cplx* out, std::size_t n, std::size_t stride, std::size_t count) {
    run(in, out, n, stride, count, FFTW_FORWARD);
}

}  // namespace ofdmisac::fft
