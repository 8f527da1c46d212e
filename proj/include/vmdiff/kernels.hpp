#ifndef VMDIFF_KERNELS_HPP
#define VMDIFF_KERNELS_HPP

#include <cstddef>
#include <vector>

// Hot inner loops, OpenMP-parallel. Every kernel has a plain serial twin in
// kernels::serial with the same contract; the test suite checks the pair
// agrees and tools/bench compares their throughput. Kernels called from an
// enclosing parallel region (e.g. the per-patch loop) degrade to serial
// automatically since nested parallelism stays disabled.
//
// Convolution weight layout: w[((ky*3 + kx)*c_in + ci)*c_out + co], i.e. the
// output channel is the fastest index so the inner loops stream contiguously.
// Spatial padding is implicit zero padding of one pixel ("same" output size).

namespace vmdiff::kernels {

template <typename S>
void conv3x3_forward(const S* in, int rows, int cols, int c_in, const S* w,
                     const S* bias, int c_out, S* out);

// Gradient w.r.t. the convolution input. `gout` has c_out channels, result
// `gin` has c_in channels. Writes are disjoint per output row.
template <typename S>
void conv3x3_grad_input(const S* gout, int rows, int cols, int c_out,
                        const S* w, int c_in, S* gin);

// Gradient w.r.t. weights and bias. Accumulation order is fixed (per-tap
// slices, then per-row partials summed serially) so the result is identical
// for any thread count.
template <typename S>
void conv3x3_grad_weights(const S* in, const S* gout, int rows, int cols,
                          int c_in, int c_out, S* gw, S* gbias);

// Block lift of a rows x cols x ch patch into the (rows-k+1)(cols-k+1) x
// k*k*ch window matrix. Row r*(cols-k+1)+c is the k x k window at origin
// (r,c); column (chan*k + wy)*k + wx indexes channel-major window entries.
void hankel_lift(const double* patch, int rows, int cols, int ch, int k,
                 double* out);

// Adjoint of hankel_lift followed by division by per-pixel multiplicity;
// exact left inverse of the lift.
void hankel_unlift(const double* mat, int rows, int cols, int ch, int k,
                   double* patch);

// Mean local structural similarity over valid kxk windows with the given
// normalized window weights (length k*k). One value per channel pair.
double ssim_windows(const double* x, const double* y, int rows, int cols,
                    int ch, const double* win, int k, double c1, double c2);

// Deterministic sum: fixed-size chunk partials accumulated in index order,
// independent of the thread count.
double sum(const double* v, size_t n);
double sum_squares(const double* v, size_t n);
double dot(const double* a, const double* b, size_t n);

namespace serial {

template <typename S>
void conv3x3_forward(const S* in, int rows, int cols, int c_in, const S* w,
                     const S* bias, int c_out, S* out);
template <typename S>
void conv3x3_grad_input(const S* gout, int rows, int cols, int c_out,
                        const S* w, int c_in, S* gin);
template <typename S>
void conv3x3_grad_weights(const S* in, const S* gout, int rows, int cols,
                          int c_in, int c_out, S* gw, S* gbias);
void hankel_lift(const double* patch, int rows, int cols, int ch, int k,
                 double* out);
void hankel_unlift(const double* mat, int rows, int cols, int ch, int k,
                   double* patch);
double ssim_windows(const double* x, const double* y, int rows, int cols,
                    int ch, const double* win, int k, double c1, double c2);
double sum(const double* v, size_t n);
double sum_squares(const double* v, size_t n);
double dot(const double* a, const double* b, size_t n);

}  // namespace serial

}  // namespace vmdiff::kernels

#endif
