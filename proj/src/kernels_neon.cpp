// NEON kernel variants (AArch64 baseline, 2-wide f64).

#if defined(__aarch64__)

#include <arm_neon.h>

#include "mvsne/kernels.hpp"

namespace mvsne::kern {

namespace {

double sqdist_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(a + k), vld1q_f64(b + k));
        acc = vfmaq_f64(acc, d, d);
    }
    double s = vaddvq_f64(acc);
    for (; k < n; ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

double pair_row2_neon(double xi, double yi, const double* xs, const double* ys,
                      std::size_t n, std::size_t self, double* w) {
    const float64x2_t vxi = vdupq_n_f64(xi);
    const float64x2_t vyi = vdupq_n_f64(yi);
    const float64x2_t one = vdupq_n_f64(1.0);
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        const float64x2_t dx = vsubq_f64(vxi, vld1q_f64(xs + j));
        const float64x2_t dy = vsubq_f64(vyi, vld1q_f64(ys + j));
        float64x2_t d2 = vfmaq_f64(one, dx, dx);
        d2 = vfmaq_f64(d2, dy, dy);
        const float64x2_t v = vdivq_f64(one, d2);
        vst1q_f64(w + j, v);
        acc = vaddq_f64(acc, v);
    }
    double sum = vaddvq_f64(acc);
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

void grad_row2_neon(double xi, double yi, const double* xs, const double* ys,
                    const double* a, const double* w, double z, std::size_t n,
                    double* gx, double* gy) {
    const float64x2_t vxi = vdupq_n_f64(xi);
    const float64x2_t vyi = vdupq_n_f64(yi);
    const float64x2_t vzinv = vdupq_n_f64(1.0 / z);
    float64x2_t accx = vdupq_n_f64(0.0);
    float64x2_t accy = vdupq_n_f64(0.0);
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        const float64x2_t vw = vld1q_f64(w + j);
        const float64x2_t va = vld1q_f64(a + j);
        const float64x2_t mult = vmulq_f64(vfmsq_f64(va, vw, vzinv), vw);
        const float64x2_t dx = vsubq_f64(vxi, vld1q_f64(xs + j));
        const float64x2_t dy = vsubq_f64(vyi, vld1q_f64(ys + j));
        accx = vfmaq_f64(accx, mult, dx);
        accy = vfmaq_f64(accy, mult, dy);
    }
    double ax = vaddvq_f64(accx), ay = vaddvq_f64(accy);
    for (; j < n; ++j) {
        const double mult = (a[j] - w[j] / z) * w[j];
        ax += mult * (xi - xs[j]);
        ay += mult * (yi - ys[j]);
    }
    *gx = ax;
    *gy = ay;
}

const Ops kNeon{"neon", sqdist_neon, pair_row2_neon, grad_row2_neon};

}  // namespace

const Ops& neon_ops() { return kNeon; }

}  // namespace mvsne::kern

#endif  // __aarch64__
