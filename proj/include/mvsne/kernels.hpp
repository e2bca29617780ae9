#pragma once

#include <cstddef>
#include <string>

namespace mvsne::kern {

enum class Mode { Auto, Scalar, Avx2, Neon };

/// Inner-loop kernel table. One scalar reference implementation plus SIMD
/// variants selected at runtime; all variants compute the same quantities and
/// are equivalence-tested against the scalar reference.
struct Ops {
    const char* name;

    /// sum_k (a[k]-b[k])^2
    double (*sqdist)(const double* a, const double* b, std::size_t n);

    /// Student-t pair kernel for one embedding row (d=2, planar coords):
    /// w[j] = 1 / (1 + (xi-xs[j])^2 + (yi-ys[j])^2). Returns sum_j w[j].
    /// The self entry (j == self) is set to 0 and excluded from the sum;
    /// pass self >= n when the row has no self entry.
    double (*pair_row2)(double xi, double yi, const double* xs, const double* ys,
                        std::size_t n, std::size_t self, double* w);

    /// Gradient accumulation for one embedding row (d=2, planar coords):
    ///   gx = sum_j (a[j] - w[j]/z) * w[j] * (xi - xs[j])
    ///   gy = sum_j (a[j] - w[j]/z) * w[j] * (yi - ys[j])
    /// The self entry must already carry w[self] == 0 and a[self] == 0.
    void (*grad_row2)(double xi, double yi, const double* xs, const double* ys,
                      const double* a, const double* w, double z, std::size_t n,
                      double* gx, double* gy);
};

/// Scalar reference table; always available.
const Ops& scalar_ops();

/// True when the given mode can run on this machine.
bool supported(Mode m);

/// Best mode supported by the running CPU (never Auto).
Mode detect();

/// Resolves Auto (honouring the MVSNE_KERNELS environment override) and
/// returns the kernel table. Throws ConfigError for an unsupported request.
const Ops& ops_for(Mode m);

const char* mode_name(Mode m);
Mode parse_mode(const std::string& s);

}  // namespace mvsne::kern
