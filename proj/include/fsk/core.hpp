#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsk {

using Vec = std::vector<double>;

// Validation failures (bad shapes, weights, labels, malformed files).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failures (overflow, non-finite intermediates, eigensolver trouble).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense row-major matrix. Deliberately minimal: the streaming kernels index
// raw rows, and allocation stays visible to the peak-memory accounting hook.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), d_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return d_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

    double* row(std::size_t i) { return d_.data() + i * cols_; }
    const double* row(std::size_t i) const { return d_.data() + i * cols_; }
    std::span<const double> row_span(std::size_t i) const { return {row(i), cols_}; }

    double* data() { return d_.data(); }
    const double* data() const { return d_.data(); }

    bool operator==(const Mat& o) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    Vec d_;
};

// A weighted point cloud, one side of an OT problem. Weights live on the
// simplex and must be strictly positive; labels, when present, are small
// class indices used by the label-augmented cost.
struct DiscreteMeasure {
    Mat points;                                     // n x d
    Vec weights;                                    // n, strictly positive, sums to 1
    std::optional<std::vector<int32_t>> labels;     // n class indices

    std::size_t size() const { return points.rows(); }
    std::size_t dim() const { return points.cols(); }
    bool labeled() const { return labels.has_value(); }
};

// Builds a measure with uniform weights.
DiscreteMeasure make_uniform_measure(Mat points,
                                     std::optional<std::vector<int32_t>> labels = std::nullopt);

// Stabilized dual state: f_hat = f - scale*alpha, g_hat = g - scale*beta,
// where alpha/beta are squared norms and scale is the feature weight of the
// cost (1 for plain squared Euclidean).
struct ShiftedPotentials {
    Vec f_hat;
    Vec g_hat;
    double eps = 0.0;
};

enum class CostKind { SquaredEuclidean, LabelAugmented };

// Ground-cost description. Never materialized on the streaming path.
struct CostSpec {
    CostKind kind = CostKind::SquaredEuclidean;
    double lambda1 = 1.0;   // feature weight  (LabelAugmented)
    double lambda2 = 0.0;   // label weight    (LabelAugmented)
    Mat label_cost;         // V x V           (LabelAugmented)

    // multiplier on the squared-Euclidean part, and hence on the potential shift
    double feature_scale() const { return kind == CostKind::LabelAugmented ? lambda1 : 1.0; }

    static CostSpec squared_euclidean() { return {}; }
    static CostSpec label_augmented(double l1, double l2, Mat label_cost_) {
        CostSpec s;
        s.kind = CostKind::LabelAugmented;
        s.lambda1 = l1;
        s.lambda2 = l2;
        s.label_cost = std::move(label_cost_);
        return s;
    }
};

// Row/column block sizes for the streaming traversal. Blocks larger than the
// problem are clamped at use sites.
struct TileConfig {
    std::size_t block_rows = 64;   // B_N
    std::size_t block_cols = 64;   // B_M
};

enum class Schedule { Alternating, Symmetric };
enum class Precision { Single, Double };

struct SinkhornConfig {
    double eps = 0.1;
    Schedule schedule = Schedule::Alternating;
    int max_iters = 100;
    double marginal_tol = 0.0;          // 0 disables early stopping
    double eps_scaling_factor = 1.0;    // 1 disables annealing
    int extra_iters_at_final_eps = 0;
    Precision precision = Precision::Double;
};

// --- validation ------------------------------------------------------------

void validate_measure(const DiscreteMeasure& m);

// Checks measures against each other and the spec (dims match, labels present
// and in range when the cost needs them).
void validate_problem(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                      const CostSpec& spec);

void validate_sinkhorn_config(const SinkhornConfig& cfg);
void validate_tiles(const TileConfig& tiles);

// --- shared numeric utilities ----------------------------------------------

// out[i] = sum_t points(i,t)^2
Vec squared_norms(const Mat& points);

// f = f_hat + alpha, g = g_hat + beta
std::pair<Vec, Vec> unshift_potentials(const ShiftedPotentials& p, const Vec& alpha,
                                       const Vec& beta);

// f_hat = f - alpha, g_hat = g - beta
ShiftedPotentials shift_potentials(const Vec& f, const Vec& g, const Vec& alpha,
                                   const Vec& beta, double eps);

// The shift vector for a measure under a given cost: feature_scale * squared_norms.
Vec potential_shift(const Mat& points, const CostSpec& spec);

}  // namespace fsk
