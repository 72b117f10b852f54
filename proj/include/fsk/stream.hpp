#pragma once

#include <cstdint>

#include "fsk/core.hpp"
#include "fsk/ledger.hpp"

namespace fsk::stream {

// Per-row-block online-LSE state carried across column tiles.
struct RowStats {
    Vec running_max;      // m_I
    Vec running_sumexp;   // s_I, >= 0
};

// Streaming f-hat half-step: fhat_i = -eps * LSE_j[(2*s*x_i.y_j + ghat_j +
// delta_j - lam2*W[l_i,l_j]) / eps], computed tile by tile with the online
// max/sumexp recurrence. Never materializes an n x m buffer; output is
// independent of the tile configuration.
Vec update_f_hat(const DiscreteMeasure& src, const DiscreteMeasure& tgt, const Vec& g_hat,
                 const CostSpec& spec, double eps, const TileConfig& tiles, IoLedger& ledger);

// Mirror of update_f_hat with the roles of the two clouds swapped.
Vec update_g_hat(const DiscreteMeasure& src, const DiscreteMeasure& tgt, const Vec& f_hat,
                 const CostSpec& spec, double eps, const TileConfig& tiles, IoLedger& ledger);

// One symmetric (Jacobi) step: both half-steps are reduced from the same old
// potentials, then averaged; neither output is written before both reductions
// finish.
ShiftedPotentials symmetric_update(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                                   const ShiftedPotentials& p, const CostSpec& spec,
                                   const TileConfig& tiles, IoLedger& ledger);

// out = P(fhat, ghat) V streamed with a running-max/weighted-accumulator
// recurrence; the row-normalizing sum cancels algebraically and is never
// formed.
Mat apply_plan(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
               const ShiftedPotentials& p, const CostSpec& spec, const Mat& V,
               const TileConfig& tiles, IoLedger& ledger);

// out = P^T U, the adjoint transport.
Mat apply_plan_adjoint(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                       const ShiftedPotentials& p, const CostSpec& spec, const Mat& U,
                       const TileConfig& tiles, IoLedger& ledger);

// out = (P (.) (A B^T)) V with the rank-r weight tile formed on chip.
Mat apply_hadamard_plan(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                        const ShiftedPotentials& p, const CostSpec& spec, const Mat& A,
                        const Mat& B, const Mat& V, const TileConfig& tiles, IoLedger& ledger);

// Induced marginals r = P 1, c = P^T 1 from one f-style and one g-style
// reduction and the closed form r = a (.) exp((fhat - fhat+)/eps).
std::pair<Vec, Vec> induced_marginals(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                                      const ShiftedPotentials& p, const CostSpec& spec,
                                      const TileConfig& tiles, IoLedger& ledger);

// --- single-precision benchmark path (squared-Euclidean only) ---------------

struct FloatCloud {
    std::vector<float> points;   // row-major n x d
    std::vector<float> weights;  // n
    std::size_t n = 0, d = 0;
};

FloatCloud to_float_cloud(const DiscreteMeasure& m);

std::vector<float> update_f_hat_f32(const FloatCloud& src, const FloatCloud& tgt,
                                    const std::vector<float>& g_hat, float eps,
                                    const TileConfig& tiles, IoLedger& ledger);
std::vector<float> update_g_hat_f32(const FloatCloud& src, const FloatCloud& tgt,
                                    const std::vector<float>& f_hat, float eps,
                                    const TileConfig& tiles, IoLedger& ledger);

// --- closed-form scalar-transfer schedules (squared-Euclidean, unlabeled) ---
// Each formula is exact for every tile shape, ragged edges included, because
// per-tile loads are linear in the actual block sizes.

uint64_t io_count_f_update(std::size_t n, std::size_t m, std::size_t d, const TileConfig& tiles);
uint64_t io_count_g_update(std::size_t n, std::size_t m, std::size_t d, const TileConfig& tiles);
uint64_t io_count_symmetric_update(std::size_t n, std::size_t m, std::size_t d,
                                   const TileConfig& tiles);
uint64_t io_count_apply_plan(std::size_t n, std::size_t m, std::size_t d, std::size_t p,
                             const TileConfig& tiles);
uint64_t io_count_apply_plan_adjoint(std::size_t n, std::size_t m, std::size_t d, std::size_t p,
                                     const TileConfig& tiles);
uint64_t io_count_apply_hadamard(std::size_t n, std::size_t m, std::size_t d, std::size_t r,
                                 std::size_t p, const TileConfig& tiles);
uint64_t io_count_induced_marginals(std::size_t n, std::size_t m, std::size_t d,
                                    const TileConfig& tiles);

// Fit report for the two-level memory model: B_M d + B_N d + (B_M + 2 B_N)
// <= sram_scalars. Advisory only; nothing is enforced.
bool tiles_fit_sram(const TileConfig& tiles, std::size_t d, std::size_t sram_scalars);

// Fault injection for the parity suite's negative control: flips the sign of
// the online-LSE rescale exponent so multi-tile streams disagree with the
// single-tile reference. Never set outside `parity --break-lse`.
void debug_break_lse(bool broken);

}  // namespace fsk::stream
