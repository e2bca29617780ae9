// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and must only be entered after the runtime CPU check.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "mvsne/kernels.hpp"

namespace mvsne::kern {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sqdist_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; k < n; ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

double pair_row2_avx2(double xi, double yi, const double* xs, const double* ys,
                      std::size_t n, std::size_t self, double* w) {
    const __m256d vxi = _mm256_set1_pd(xi);
    const __m256d vyi = _mm256_set1_pd(yi);
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d dx = _mm256_sub_pd(vxi, _mm256_loadu_pd(xs + j));
        const __m256d dy = _mm256_sub_pd(vyi, _mm256_loadu_pd(ys + j));
        __m256d d2 = _mm256_fmadd_pd(dx, dx, one);
        d2 = _mm256_fmadd_pd(dy, dy, d2);
        const __m256d v = _mm256_div_pd(one, d2);
        _mm256_storeu_pd(w + j, v);
        acc = _mm256_add_pd(acc, v);
    }
    double sum = hsum(acc);
    for (; j < n; ++j) {
        const double dx = xi - xs[j];
        const double dy = yi - ys[j];
        const double v = 1.0 / (1.0 + dx * dx + dy * dy);
        w[j] = v;
        sum += v;
    }
    if (self < n) {
        sum -= w[self];
        w[self] = 0.0;
    }
    return sum;
}

void grad_row2_avx2(double xi, double yi, const double* xs, const double* ys,
                    const double* a, const double* w, double z, std::size_t n,
                    double* gx, double* gy) {
    const __m256d vxi = _mm256_set1_pd(xi);
    const __m256d vyi = _mm256_set1_pd(yi);
    const __m256d vzinv = _mm256_set1_pd(1.0 / z);
    __m256d accx = _mm256_setzero_pd();
    __m256d accy = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d vw = _mm256_loadu_pd(w + j);
        const __m256d va = _mm256_loadu_pd(a + j);
        const __m256d mult =
            _mm256_mul_pd(_mm256_fnmadd_pd(vw, vzinv, va), vw);  // (a - w/z) * w
        const __m256d dx = _mm256_sub_pd(vxi, _mm256_loadu_pd(xs + j));
        const __m256d dy = _mm256_sub_pd(vyi, _mm256_loadu_pd(ys + j));
        accx = _mm256_fmadd_pd(mult, dx, accx);
        accy = _mm256_fmadd_pd(mult, dy, accy);
    }
    double ax = hsum(accx), ay = hsum(accy);
    for (; j < n; ++j) {
        const double mult = (a[j] - w[j] / z) * w[j];
        ax += mult * (xi - xs[j]);
        ay += mult * (yi - ys[j]);
    }
    *gx = ax;
    *gy = ay;
}

const Ops kAvx2{"avx2", sqdist_avx2, pair_row2_avx2, grad_row2_avx2};

}  // namespace

const Ops& avx2_ops() { return kAvx2; }

}  // namespace mvsne::kern

#endif  // x86_64
