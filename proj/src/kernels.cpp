#include "mvsne/kernels.hpp"

#include <cstdlib>

#include "mvsne/core.hpp"

namespace mvsne::kern {

namespace {

double sqdist_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
    }
    return acc;
}

double pair_row2_scalar(double xi, double yi, const double* xs, const double* ys,
                        std::size_t n, std::size_t self, double* w) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == self) {
            w[j] = 0.0;
            continue;
        }
        const double dx = xi - xs[j];
        const double dy = yi - ys[j];
        const double v = 1.0 / (1.0 + dx * dx + dy * dy);
        w[j] = v;
        sum += v;
    }
    return sum;
}

void grad_row2_scalar(double xi, double yi, const double* xs, const double* ys,
                      const double* a, const double* w, double z, std::size_t n,
                      double* gx, double* gy) {
    double ax = 0.0, ay = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double mult = (a[j] - w[j] / z) * w[j];
        ax += mult * (xi - xs[j]);
        ay += mult * (yi - ys[j]);
    }
    *gx = ax;
    *gy = ay;
}

const Ops kScalar{"scalar", sqdist_scalar, pair_row2_scalar, grad_row2_scalar};

}  // namespace

const Ops& scalar_ops() { return kScalar; }

#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();  // defined in kernels_avx2.cpp (compiled with -mavx2 -mfma)
#endif
#if defined(__aarch64__)
const Ops& neon_ops();  // defined in kernels_neon.cpp
#endif

bool supported(Mode m) {
    switch (m) {
        case Mode::Auto:
        case Mode::Scalar:
            return true;
        case Mode::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Mode::Neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Mode detect() {
    if (supported(Mode::Avx2)) return Mode::Avx2;
    if (supported(Mode::Neon)) return Mode::Neon;
    return Mode::Scalar;
}

const Ops& ops_for(Mode m) {
    if (m == Mode::Auto) {
        if (const char* env = std::getenv("MVSNE_KERNELS")) {
            m = parse_mode(env);
            if (m != Mode::Auto) return ops_for(m);
        }
        m = detect();
    }
    if (!supported(m))
        throw ConfigError(std::string("kernel mode not supported on this CPU: ") + mode_name(m));
    switch (m) {
#if defined(__x86_64__) || defined(_M_X64)
        case Mode::Avx2:
            return avx2_ops();
#endif
#if defined(__aarch64__)
        case Mode::Neon:
            return neon_ops();
#endif
        default:
            return kScalar;
    }
}

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Auto: return "auto";
        case Mode::Scalar: return "scalar";
        case Mode::Avx2: return "avx2";
        case Mode::Neon: return "neon";
    }
    return "?";
}

Mode parse_mode(const std::string& s) {
    if (s == "auto") return Mode::Auto;
    if (s == "scalar") return Mode::Scalar;
    if (s == "avx2") return Mode::Avx2;
    if (s == "neon") return Mode::Neon;
    throw ConfigError("unknown kernel mode: " + s + " (expected auto|scalar|avx2|neon)");
}

}  // namespace mvsne::kern
