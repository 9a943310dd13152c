#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lobsim/core/rng.hpp"

namespace lobsim {

/// Box constraints; a dimension with lower == upper is held fixed.
struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dim() const noexcept { return lower.size(); }
    std::size_t free_dims() const noexcept;
    void validate() const;
};

/// n points in [0,1]^dim, one per stratum in every dimension.
std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t dim, RandomStream& rng);

/// Gaussian-process regression with a squared-exponential kernel on
/// standardized targets. Length scale and noise are picked from a grid by
/// log marginal likelihood.
class GaussianProcess {
public:
    void fit(const std::vector<Eigen::VectorXd>& x, std::span<const double> y);
    /// Posterior mean and standard deviation in the original target units.
    std::pair<double, double> predict(const Eigen::VectorXd& x) const;

    double length_scale() const noexcept { return length_; }
    double noise() const noexcept { return noise_; }

private:
    double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const noexcept;

    std::vector<Eigen::VectorXd> x_;
    Eigen::VectorXd alpha_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    double length_ = 0.3;
    double noise_ = 1e-6;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
};

struct SurrogateOptions {
    std::size_t budget = 0;       // total evaluations
    std::size_t design_size = 0;  // 0: ten per free dimension
    double exploration = 2.0;     // lower-confidence-bound multiplier
    std::size_t random_candidates = 2000;
    std::uint64_t seed = 1;
    unsigned threads = 1;         // design points are evaluated in parallel
};

struct Evaluation {
    std::vector<double> x;
    double value = 0.0;
};

struct SurrogateResult {
    std::vector<double> best_x;
    double best_value = 0.0;
    std::size_t best_index = 0;
    std::size_t design_size = 0;
    std::vector<Evaluation> log;  // in evaluation order
};

using Objective = std::function<double(std::span<const double>)>;

/// Latin-hypercube design, then one surrogate-proposed point per iteration
/// until the budget is spent. Throws ConfigError when the budget is below
/// the design size.
SurrogateResult surrogate_minimize(const Objective& objective, const Bounds& bounds, const SurrogateOptions& options);

}  // namespace lobsim
