#include "memlag/kernels.hpp"

#include <cmath>

#if defined(MEMLAG_HAVE_AVX2_KERNELS)
#include <immintrin.h>
#define MEMLAG_AVX2_TARGET __attribute__((target("avx2,fma")))
#endif

namespace memlag::kernels::avx2 {

#if defined(MEMLAG_HAVE_AVX2_KERNELS)

bool available() noexcept {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

MEMLAG_AVX2_TARGET inline __m256d abs_pd(__m256d v) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    return _mm256_andnot_pd(sign, v);
}

MEMLAG_AVX2_TARGET inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

MEMLAG_AVX2_TARGET inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

} // namespace

MEMLAG_AVX2_TARGET
void horner(std::span<const double> coeffs, std::span<const double> xs, std::span<double> out) {
    const std::size_t n = xs.size();
    if (coeffs.empty()) {
        for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
        return;
    }
    const std::size_t top = coeffs.size() - 1;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(xs.data() + i);
        __m256d acc = _mm256_set1_pd(coeffs[top]);
        for (std::size_t k = top; k-- > 0;) acc = _mm256_fmadd_pd(acc, x, _mm256_set1_pd(coeffs[k]));
        _mm256_storeu_pd(out.data() + i, acc);
    }
    for (; i < n; ++i) {
        double acc = coeffs[top];
        for (std::size_t k = top; k-- > 0;) acc = std::fma(acc, xs[i], coeffs[k]);
        out[i] = acc;
    }
}

MEMLAG_AVX2_TARGET
void horner_deriv(std::span<const double> coeffs, std::span<const double> xs, std::span<double> out) {
    const std::size_t n = xs.size();
    if (coeffs.size() < 2) {
        for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
        return;
    }
    const std::size_t top = coeffs.size() - 1;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(xs.data() + i);
        __m256d acc = _mm256_set1_pd(static_cast<double>(top) * coeffs[top]);
        for (std::size_t k = top - 1; k >= 1; --k)
            acc = _mm256_fmadd_pd(acc, x, _mm256_set1_pd(static_cast<double>(k) * coeffs[k]));
        _mm256_storeu_pd(out.data() + i, acc);
    }
    for (; i < n; ++i) {
        double acc = static_cast<double>(top) * coeffs[top];
        for (std::size_t k = top - 1; k >= 1; --k) acc = std::fma(acc, xs[i], static_cast<double>(k) * coeffs[k]);
        out[i] = acc;
    }
}

MEMLAG_AVX2_TARGET
double max_abs(std::span<const double> ys) {
    const std::size_t n = ys.size();
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, abs_pd(_mm256_loadu_pd(ys.data() + i)));
    double r = hmax(m);
    for (; i < n; ++i) r = std::fmax(r, std::fabs(ys[i]));
    return r;
}

MEMLAG_AVX2_TARGET
HalfPlaneAreas shoelace_half_planes(std::span<const double> u, std::span<const double> y) {
    const std::size_t n = u.size() < y.size() ? u.size() : y.size();
    const __m256d zero = _mm256_setzero_pd();
    __m256d pos = zero;
    __m256d neg = zero;
    std::size_t k = 0;
    for (; k + 5 <= n; k += 4) {
        const __m256d u0 = _mm256_loadu_pd(u.data() + k);
        const __m256d u1 = _mm256_loadu_pd(u.data() + k + 1);
        const __m256d y0 = _mm256_loadu_pd(y.data() + k);
        const __m256d y1 = _mm256_loadu_pd(y.data() + k + 1);
        const __m256d p0 = _mm256_cmp_pd(u0, zero, _CMP_GE_OQ);
        const __m256d p1 = _mm256_cmp_pd(u1, zero, _CMP_GE_OQ);
        const __m256d crosses = _mm256_xor_pd(p0, p1);

        const __m256d cross = _mm256_fmsub_pd(u0, y1, _mm256_mul_pd(u1, y0));

        // crossing lanes: split at u = 0; other lanes may produce inf/nan, discarded by the blends
        const __m256d frac = _mm256_div_pd(_mm256_sub_pd(zero, u0), _mm256_sub_pd(u1, u0));
        const __m256d ys = _mm256_fmadd_pd(_mm256_sub_pd(y1, y0), frac, y0);
        const __m256d first = _mm256_mul_pd(u0, ys);
        const __m256d second = _mm256_sub_pd(zero, _mm256_mul_pd(u1, ys));

        // first piece goes to the class of u0, second to the class of u1
        const __m256d to_p0 = _mm256_blendv_pd(cross, first, crosses);
        const __m256d to_p1 = _mm256_blendv_pd(zero, second, crosses);

        pos = _mm256_add_pd(pos, _mm256_blendv_pd(zero, to_p0, p0));
        neg = _mm256_add_pd(neg, _mm256_blendv_pd(to_p0, zero, p0));
        pos = _mm256_add_pd(pos, _mm256_blendv_pd(zero, to_p1, p1));
        neg = _mm256_add_pd(neg, _mm256_blendv_pd(to_p1, zero, p1));
    }
    double ps = hsum(pos);
    double ns = hsum(neg);
    for (; k + 1 < n; ++k) {
        const double a0 = u[k], a1 = u[k + 1];
        const double b0 = y[k], b1 = y[k + 1];
        const bool q0 = a0 >= 0.0;
        const bool q1 = a1 >= 0.0;
        if (q0 == q1) {
            (q0 ? ps : ns) += a0 * b1 - a1 * b0;
        } else {
            const double s = b0 + (b1 - b0) * (-a0 / (a1 - a0));
            (q0 ? ps : ns) += a0 * s;
            (q1 ? ps : ns) += -a1 * s;
        }
    }
    return {0.5 * ps, 0.5 * ns};
}

MEMLAG_AVX2_TARGET
GatedMax gated_max_abs(std::span<const double> u, std::span<const double> y, double eps) {
    const std::size_t n = u.size() < y.size() ? u.size() : y.size();
    const __m256d e = _mm256_set1_pd(eps);
    __m256d m = _mm256_setzero_pd();
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d gate = _mm256_cmp_pd(abs_pd(_mm256_loadu_pd(u.data() + i)), e, _CMP_LE_OQ);
        const __m256d a = abs_pd(_mm256_loadu_pd(y.data() + i));
        m = _mm256_max_pd(m, _mm256_and_pd(gate, a));
        count += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(gate)));
    }
    GatedMax r{hmax(m), count};
    for (; i < n; ++i) {
        if (std::fabs(u[i]) <= eps) {
            ++r.count;
            r.max_abs = std::fmax(r.max_abs, std::fabs(y[i]));
        }
    }
    return r;
}

#else

bool available() noexcept { return false; }

void horner(std::span<const double> c, std::span<const double> x, std::span<double> o) { scalar::horner(c, x, o); }
void horner_deriv(std::span<const double> c, std::span<const double> x, std::span<double> o) {
    scalar::horner_deriv(c, x, o);
}
double max_abs(std::span<const double> ys) { return scalar::max_abs(ys); }
HalfPlaneAreas shoelace_half_planes(std::span<const double> u, std::span<const double> y) {
    return scalar::shoelace_half_planes(u, y);
}
GatedMax gated_max_abs(std::span<const double> u, std::span<const double> y, double eps) {
    return scalar::gated_max_abs(u, y, eps);
}

#endif

} // namespace memlag::kernels::avx2
