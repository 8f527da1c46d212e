#include "vmdiff/kernels.hpp"

#include <algorithm>
#include <cstring>

namespace vmdiff::kernels {

// ---------------------------------------------------------------- conv3x3

template <typename S>
void conv3x3_forward(const S* in, int rows, int cols, int c_in, const S* w,
                     const S* bias, int c_out, S* out) {
#pragma omp parallel for
    for (int y = 0; y < rows; ++y) {
        S* orow = out + static_cast<size_t>(y) * cols * c_out;
        for (int x = 0; x < cols; ++x)
            std::memcpy(orow + static_cast<size_t>(x) * c_out, bias,
                        sizeof(S) * c_out);
        for (int ky = 0; ky < 3; ++ky) {
            const int yy = y + ky - 1;
            if (yy < 0 || yy >= rows) continue;
            const S* irow = in + static_cast<size_t>(yy) * cols * c_in;
            for (int x = 0; x < cols; ++x) {
                S* opx = orow + static_cast<size_t>(x) * c_out;
                for (int kx = 0; kx < 3; ++kx) {
                    const int xx = x + kx - 1;
                    if (xx < 0 || xx >= cols) continue;
                    const S* ipx = irow + static_cast<size_t>(xx) * c_in;
                    const S* wtap =
                        w + static_cast<size_t>(ky * 3 + kx) * c_in * c_out;
                    for (int ci = 0; ci < c_in; ++ci) {
                        const S a = ipx[ci];
                        const S* wrow = wtap + static_cast<size_t>(ci) * c_out;
                        for (int co = 0; co < c_out; ++co)
                            opx[co] += a * wrow[co];
                    }
                }
            }
        }
    }
}

template <typename S>
void conv3x3_grad_input(const S* gout, int rows, int cols, int c_out,
                        const S* w, int c_in, S* gin) {
    // Iterate over the *input* position so writes stay disjoint per row.
#pragma omp parallel for
    for (int yy = 0; yy < rows; ++yy) {
        S* grow = gin + static_cast<size_t>(yy) * cols * c_in;
        std::memset(grow, 0, sizeof(S) * cols * c_in);
        for (int ky = 0; ky < 3; ++ky) {
            const int y = yy - ky + 1;  // output row that read row yy via ky
            if (y < 0 || y >= rows) continue;
            for (int xx = 0; xx < cols; ++xx) {
                S* gpx = grow + static_cast<size_t>(xx) * c_in;
                for (int kx = 0; kx < 3; ++kx) {
                    const int x = xx - kx + 1;
                    if (x < 0 || x >= cols) continue;
                    const S* gopx =
                        gout + (static_cast<size_t>(y) * cols + x) * c_out;
                    const S* wtap =
                        w + static_cast<size_t>(ky * 3 + kx) * c_in * c_out;
                    for (int ci = 0; ci < c_in; ++ci) {
                        const S* wrow = wtap + static_cast<size_t>(ci) * c_out;
                        S acc = 0;
                        for (int co = 0; co < c_out; ++co)
                            acc += gopx[co] * wrow[co];
                        gpx[ci] += acc;
                    }
                }
            }
        }
    }
}

template <typename S>
void conv3x3_grad_weights(const S* in, const S* gout, int rows, int cols,
                          int c_in, int c_out, S* gw, S* gbias) {
    // One thread owns one kernel tap, so each gw slice accumulates in a fixed
    // pixel order no matter how many threads run.
#pragma omp parallel for
    for (int tap = 0; tap < 9; ++tap) {
        const int ky = tap / 3, kx = tap % 3;
        S* gwtap = gw + static_cast<size_t>(tap) * c_in * c_out;
        std::memset(gwtap, 0, sizeof(S) * c_in * c_out);
        for (int y = 0; y < rows; ++y) {
            const int yy = y + ky - 1;
            if (yy < 0 || yy >= rows) continue;
            for (int x = 0; x < cols; ++x) {
                const int xx = x + kx - 1;
                if (xx < 0 || xx >= cols) continue;
                const S* ipx =
                    in + (static_cast<size_t>(yy) * cols + xx) * c_in;
                const S* gopx =
                    gout + (static_cast<size_t>(y) * cols + x) * c_out;
                for (int ci = 0; ci < c_in; ++ci) {
                    const S a = ipx[ci];
                    S* gwrow = gwtap + static_cast<size_t>(ci) * c_out;
                    for (int co = 0; co < c_out; ++co)
                        gwrow[co] += a * gopx[co];
                }
            }
        }
    }
    // Bias gradient: per-row partials combined serially in row order.
    std::vector<S> part(static_cast<size_t>(rows) * c_out, S(0));
#pragma omp parallel for
    for (int y = 0; y < rows; ++y) {
        S* p = part.data() + static_cast<size_t>(y) * c_out;
        const S* grow = gout + static_cast<size_t>(y) * cols * c_out;
        for (int x = 0; x < cols; ++x)
            for (int co = 0; co < c_out; ++co)
                p[co] += grow[static_cast<size_t>(x) * c_out + co];
    }
    std::memset(gbias, 0, sizeof(S) * c_out);
    for (int y = 0; y < rows; ++y)
        for (int co = 0; co < c_out; ++co)
            gbias[co] += part[static_cast<size_t>(y) * c_out + co];
}

// ----------------------------------------------------------------- hankel

void hankel_lift(const double* patch, int rows, int cols, int ch, int k,
                 double* out) {
    const int wr = rows - k + 1, wc = cols - k + 1;
    const int ncol = ch * k * k;
#pragma omp parallel for
    for (int r = 0; r < wr; ++r) {
        for (int c = 0; c < wc; ++c) {
            double* row = out + (static_cast<size_t>(r) * wc + c) * ncol;
            for (int chan = 0; chan < ch; ++chan)
                for (int wy = 0; wy < k; ++wy)
                    for (int wx = 0; wx < k; ++wx)
                        row[(chan * k + wy) * k + wx] =
                            patch[(static_cast<size_t>(r + wy) * cols +
                                   (c + wx)) *
                                      ch +
                                  chan];
        }
    }
}

void hankel_unlift(const double* mat, int rows, int cols, int ch, int k,
                   double* patch) {
    const int wc = cols - k + 1;
    const int ncol = ch * k * k;
#pragma omp parallel for
    for (int r = 0; r < rows; ++r) {
        const int i0 = std::max(0, r - k + 1), i1 = std::min(r, rows - k);
        for (int c = 0; c < cols; ++c) {
            const int j0 = std::max(0, c - k + 1), j1 = std::min(c, cols - k);
            const double mult =
                static_cast<double>(i1 - i0 + 1) * (j1 - j0 + 1);
            for (int chan = 0; chan < ch; ++chan) {
                double acc = 0.0;
                for (int i = i0; i <= i1; ++i)
                    for (int j = j0; j <= j1; ++j)
                        acc += mat[(static_cast<size_t>(i) * wc + j) * ncol +
                                   (chan * k + (r - i)) * k + (c - j)];
                patch[(static_cast<size_t>(r) * cols + c) * ch + chan] =
                    acc / mult;
            }
        }
    }
}

// ------------------------------------------------------------------- ssim

double ssim_windows(const double* x, const double* y, int rows, int cols,
                    int ch, const double* win, int k, double c1, double c2) {
    const int wr = rows - k + 1, wc = cols - k + 1;
    std::vector<double> part(wr, 0.0);
#pragma omp parallel for
    for (int r = 0; r < wr; ++r) {
        double acc = 0.0;
        for (int c = 0; c < wc; ++c) {
            for (int chan = 0; chan < ch; ++chan) {
                double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
                for (int wy = 0; wy < k; ++wy) {
                    const double* px =
                        x + (static_cast<size_t>(r + wy) * cols + c) * ch +
                        chan;
                    const double* py =
                        y + (static_cast<size_t>(r + wy) * cols + c) * ch +
                        chan;
                    const double* wv = win + wy * k;
                    for (int wx = 0; wx < k; ++wx) {
                        const double a = px[static_cast<size_t>(wx) * ch];
                        const double b = py[static_cast<size_t>(wx) * ch];
                        const double t = wv[wx];
                        sx += t * a;
                        sy += t * b;
                        sxx += t * a * a;
                        syy += t * b * b;
                        sxy += t * a * b;
                    }
                }
                const double vx = sxx - sx * sx, vy = syy - sy * sy;
                const double cov = sxy - sx * sy;
                acc += (2 * sx * sy + c1) * (2 * cov + c2) /
                       ((sx * sx + sy * sy + c1) * (vx + vy + c2));
            }
        }
        part[r] = acc;
    }
    double total = 0.0;
    for (double p : part) total += p;
    return total / (static_cast<double>(wr) * wc * ch);
}

// ------------------------------------------------------------- reductions

namespace {
constexpr size_t kChunk = 8192;  // fixed so results ignore the thread count

template <typename F>
double chunked(size_t n, F&& partial) {
    const size_t nchunk = (n + kChunk - 1) / kChunk;
    std::vector<double> part(nchunk, 0.0);
#pragma omp parallel for
    for (long long ci = 0; ci < static_cast<long long>(nchunk); ++ci) {
        const size_t lo = static_cast<size_t>(ci) * kChunk;
        part[ci] = partial(lo, std::min(lo + kChunk, n));
    }
    double total = 0.0;
    for (double p : part) total += p;
    return total;
}
}  // namespace

double sum(const double* v, size_t n) {
    return chunked(n, [&](size_t lo, size_t hi) {
        double a = 0.0;
        for (size_t i = lo; i < hi; ++i) a += v[i];
        return a;
    });
}

double sum_squares(const double* v, size_t n) {
    return chunked(n, [&](size_t lo, size_t hi) {
        double a = 0.0;
        for (size_t i = lo; i < hi; ++i) a += v[i] * v[i];
        return a;
    });
}

double dot(const double* a, const double* b, size_t n) {
    return chunked(n, [&](size_t lo, size_t hi) {
        double s = 0.0;
        for (size_t i = lo; i < hi; ++i) s += a[i] * b[i];
        return s;
    });
}

template void conv3x3_forward<float>(const float*, int, int, int, const float*,
                                     const float*, int, float*);
template void conv3x3_forward<double>(const double*, int, int, int,
                                      const double*, const double*, int,
                                      double*);
template void conv3x3_grad_input<float>(const float*, int, int, int,
                                        const float*, int, float*);
template void conv3x3_grad_input<double>(const double*, int, int, int,
                                         const double*, int, double*);
template void conv3x3_grad_weights<float>(const float*, const float*, int, int,
                                          int, int, float*, float*);
template void conv3x3_grad_weights<double>(const double*, const double*, int,
                                           int, int, int, double*, double*);

// ================================================================== serial
// Reference implementations: written straight from the definitions, no loop
// reordering, no parallelism. Used by the tests as ground truth and by
// tools/bench as the baseline.

namespace serial {

template <typename S>
void conv3x3_forward(const S* in, int rows, int cols, int c_in, const S* w,
                     const S* bias, int c_out, S* out) {
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x)
            for (int co = 0; co < c_out; ++co) {
                S acc = bias[co];
                for (int ky = 0; ky < 3; ++ky)
                    for (int kx = 0; kx < 3; ++kx) {
                        const int yy = y + ky - 1, xx = x + kx - 1;
                        if (yy < 0 || yy >= rows || xx < 0 || xx >= cols)
                            continue;
                        for (int ci = 0; ci < c_in; ++ci)
                            acc +=
                                in[(static_cast<size_t>(yy) * cols + xx) *
                                       c_in +
                                   ci] *
                                w[(static_cast<size_t>(ky * 3 + kx) * c_in +
                                   ci) *
                                      c_out +
                                  co];
                    }
                out[(static_cast<size_t>(y) * cols + x) * c_out + co] = acc;
            }
}

template <typename S>
void conv3x3_grad_input(const S* gout, int rows, int cols, int c_out,
                        const S* w, int c_in, S* gin) {
    std::memset(gin, 0, sizeof(S) * rows * cols * c_in);
    // Scatter form: each output element distributes into the inputs it read.
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x)
            for (int ky = 0; ky < 3; ++ky)
                for (int kx = 0; kx < 3; ++kx) {
                    const int yy = y + ky - 1, xx = x + kx - 1;
                    if (yy < 0 || yy >= rows || xx < 0 || xx >= cols) continue;
                    for (int ci = 0; ci < c_in; ++ci)
                        for (int co = 0; co < c_out; ++co)
                            gin[(static_cast<size_t>(yy) * cols + xx) * c_in +
                                ci] +=
                                gout[(static_cast<size_t>(y) * cols + x) *
                                         c_out +
                                     co] *
                                w[(static_cast<size_t>(ky * 3 + kx) * c_in +
                                   ci) *
                                      c_out +
                                  co];
                }
}

template <typename S>
void conv3x3_grad_weights(const S* in, const S* gout, int rows, int cols,
                          int c_in, int c_out, S* gw, S* gbias) {
    std::memset(gw, 0, sizeof(S) * 9 * c_in * c_out);
    std::memset(gbias, 0, sizeof(S) * c_out);
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x)
            for (int co = 0; co < c_out; ++co) {
                const S g =
                    gout[(static_cast<size_t>(y) * cols + x) * c_out + co];
                gbias[co] += g;
                for (int ky = 0; ky < 3; ++ky)
                    for (int kx = 0; kx < 3; ++kx) {
                        const int yy = y + ky - 1, xx = x + kx - 1;
                        if (yy < 0 || yy >= rows || xx < 0 || xx >= cols)
                            continue;
                        for (int ci = 0; ci < c_in; ++ci)
                            gw[(static_cast<size_t>(ky * 3 + kx) * c_in + ci) *
                                   c_out +
                               co] +=
                                g * in[(static_cast<size_t>(yy) * cols + xx) *
                                           c_in +
                                       ci];
                    }
            }
}

void hankel_lift(const double* patch, int rows, int cols, int ch, int k,
                 double* out) {
    const int wc = cols - k + 1;
    const int ncol = ch * k * k;
    for (int r = 0; r <= rows - k; ++r)
        for (int c = 0; c <= cols - k; ++c)
            for (int chan = 0; chan < ch; ++chan)
                for (int wy = 0; wy < k; ++wy)
                    for (int wx = 0; wx < k; ++wx)
                        out[(static_cast<size_t>(r) * wc + c) * ncol +
                            (chan * k + wy) * k + wx] =
                            patch[(static_cast<size_t>(r + wy) * cols +
                                   (c + wx)) *
                                      ch +
                                  chan];
}

void hankel_unlift(const double* mat, int rows, int cols, int ch, int k,
                   double* patch) {
    const int wr = rows - k + 1, wc = cols - k + 1;
    const int ncol = ch * k * k;
    std::vector<double> acc(static_cast<size_t>(rows) * cols * ch, 0.0);
    std::vector<double> cnt(static_cast<size_t>(rows) * cols * ch, 0.0);
    for (int r = 0; r < wr; ++r)
        for (int c = 0; c < wc; ++c)
            for (int chan = 0; chan < ch; ++chan)
                for (int wy = 0; wy < k; ++wy)
                    for (int wx = 0; wx < k; ++wx) {
                        const size_t px =
                            (static_cast<size_t>(r + wy) * cols + (c + wx)) *
                                ch +
                            chan;
                        acc[px] += mat[(static_cast<size_t>(r) * wc + c) *
                                           ncol +
                                       (chan * k + wy) * k + wx];
                        cnt[px] += 1.0;
                    }
    for (size_t i = 0; i < acc.size(); ++i) patch[i] = acc[i] / cnt[i];
}

double ssim_windows(const double* x, const double* y, int rows, int cols,
                    int ch, const double* win, int k, double c1, double c2) {
    // Two-pass per window: weighted means first, then central moments.
    const int wr = rows - k + 1, wc = cols - k + 1;
    double total = 0.0;
    for (int r = 0; r < wr; ++r)
        for (int c = 0; c < wc; ++c)
            for (int chan = 0; chan < ch; ++chan) {
                double mx = 0, my = 0;
                for (int wy = 0; wy < k; ++wy)
                    for (int wx = 0; wx < k; ++wx) {
                        const double t = win[wy * k + wx];
                        mx += t * x[(static_cast<size_t>(r + wy) * cols +
                                     (c + wx)) *
                                        ch +
                                    chan];
                        my += t * y[(static_cast<size_t>(r + wy) * cols +
                                     (c + wx)) *
                                        ch +
                                    chan];
                    }
                double vx = 0, vy = 0, cov = 0;
                for (int wy = 0; wy < k; ++wy)
                    for (int wx = 0; wx < k; ++wx) {
                        const double t = win[wy * k + wx];
                        const double dx =
                            x[(static_cast<size_t>(r + wy) * cols + (c + wx)) *
                                  ch +
                              chan] -
                            mx;
                        const double dy =
                            y[(static_cast<size_t>(r + wy) * cols + (c + wx)) *
                                  ch +
                              chan] -
                            my;
                        vx += t * dx * dx;
                        vy += t * dy * dy;
                        cov += t * dx * dy;
                    }
                total += (2 * mx * my + c1) * (2 * cov + c2) /
                         ((mx * mx + my * my + c1) * (vx + vy + c2));
            }
    return total / (static_cast<double>(wr) * wc * ch);
}

double sum(const double* v, size_t n) {
    double a = 0.0;
    for (size_t i = 0; i < n; ++i) a += v[i];
    return a;
}
double sum_squares(const double* v, size_t n) {
    double a = 0.0;
    for (size_t i = 0; i < n; ++i) a += v[i] * v[i];
    return a;
}
double dot(const double* a, const double* b, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

template void conv3x3_forward<float>(const float*, int, int, int, const float*,
                                     const float*, int, float*);
template void conv3x3_forward<double>(const double*, int, int, int,
                                      const double*, const double*, int,
                                      double*);
template void conv3x3_grad_input<float>(const float*, int, int, int,
                                        const float*, int, float*);
template void conv3x3_grad_input<double>(const double*, int, int, int,
                                         const double*, int, double*);
template void conv3x3_grad_weights<float>(const float*, const float*, int, int,
                                          int, int, float*, float*);
template void conv3x3_grad_weights<double>(const double*, const double*, int,
                                           int, int, int, double*, double*);

}  // namespace serial

}  // namespace vmdiff::kernels
