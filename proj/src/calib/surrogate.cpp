#include "lobsim/calib/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "lobsim/core/parallel.hpp"
#include "lobsim/core/types.hpp"

namespace lobsim {

std::size_t Bounds::free_dims() const noexcept {
    std::size_t n = 0;
    for (std::size_t i = 0; i < dim(); ++i) n += upper[i] > lower[i];
    return n;
}

void Bounds::validate() const {
    if (lower.size() != upper.size() || lower.empty()) throw ConfigError("bounds need matching, non-empty lower and upper");
    for (std::size_t i = 0; i < dim(); ++i) {
        if (!(lower[i] <= upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i])) {
            throw ConfigError(fmt::format("bad bounds in dimension {}", i));
        }
    }
}

std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t dim, RandomStream& rng) {
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
    std::vector<std::size_t> perm(n);
    for (std::size_t d = 0; d < dim; ++d) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
        for (std::size_t i = 0; i < n; ++i) {
            pts[i][d] = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(n);
        }
    }
    return pts;
}

double GaussianProcess::kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const noexcept {
    return std::exp(-0.5 * (a - b).squaredNorm() / (length_ * length_));
}

void GaussianProcess::fit(const std::vector<Eigen::VectorXd>& x, std::span<const double> y) {
    if (x.empty() || x.size() != y.size()) throw DomainError("surrogate fit needs matching, non-empty data");
    x_ = x;
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::VectorXd ys(n);
    y_mean_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double v : y) var += (v - y_mean_) * (v - y_mean_);
    y_scale_ = var > 0.0 ? std::sqrt(var / static_cast<double>(n)) : 1.0;
    for (Eigen::Index i = 0; i < n; ++i) ys[i] = (y[static_cast<std::size_t>(i)] - y_mean_) / y_scale_;

    const double dim_scale = std::sqrt(static_cast<double>(x.front().size()));
    const double lengths[] = {0.05, 0.1, 0.15, 0.2, 0.3, 0.45, 0.7, 1.0, 1.5};
    const double noises[] = {1e-6, 1e-4, 1e-3, 1e-2, 0.05, 0.2, 0.5};
    double best = -std::numeric_limits<double>::infinity();
    double best_l = 0.3 * dim_scale, best_s = 1e-3;
    Eigen::MatrixXd k(n, n);
    for (double l : lengths) {
        length_ = l * dim_scale;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j <= i; ++j) k(i, j) = k(j, i) = kernel(x_[static_cast<std::size_t>(i)], x_[static_cast<std::size_t>(j)]);
        }
        for (double s : noises) {
            Eigen::MatrixXd ks = k;
            ks.diagonal().array() += s;
            Eigen::LLT<Eigen::MatrixXd> llt(ks);
            if (llt.info() != Eigen::Success) continue;
            Eigen::VectorXd a = llt.solve(ys);
            double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
            double lml = -0.5 * ys.dot(a) - 0.5 * logdet;
            if (lml > best) {
                best = lml;
                best_l = length_;
                best_s = s;
            }
        }
    }
    length_ = best_l;
    noise_ = best_s;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) k(i, j) = k(j, i) = kernel(x_[static_cast<std::size_t>(i)], x_[static_cast<std::size_t>(j)]);
    }
    k.diagonal().array() += noise_;
    chol_.compute(k);
    if (chol_.info() != Eigen::Success) throw DomainError("surrogate covariance is not positive definite");
    alpha_ = chol_.solve(ys);
}

std::pair<double, double> GaussianProcess::predict(const Eigen::VectorXd& x) const {
    const auto n = static_cast<Eigen::Index>(x_.size());
    Eigen::VectorXd ks(n);
    for (Eigen::Index i = 0; i < n; ++i) ks[i] = kernel(x, x_[static_cast<std::size_t>(i)]);
    double mean = ks.dot(alpha_);
    Eigen::VectorXd v = chol_.matrixL().solve(ks);
    double var = std::max(0.0, 1.0 - v.squaredNorm());
    return {y_mean_ + y_scale_ * mean, y_scale_ * std::sqrt(var)};
}

namespace {

struct Space {
    const Bounds& b;
    std::vector<std::size_t> free;

    explicit Space(const Bounds& bounds) : b(bounds) {
        for (std::size_t i = 0; i < b.dim(); ++i) {
            if (b.upper[i] > b.lower[i]) free.push_back(i);
        }
    }
    std::vector<double> to_params(const Eigen::VectorXd& u) const {
        std::vector<double> x = b.lower;
        for (std::size_t k = 0; k < free.size(); ++k) {
            auto i = free[k];
            x[i] = b.lower[i] + std::clamp(u[static_cast<Eigen::Index>(k)], 0.0, 1.0) * (b.upper[i] - b.lower[i]);
        }
        return x;
    }
};

}  // namespace

SurrogateResult surrogate_minimize(const Objective& objective, const Bounds& bounds, const SurrogateOptions& opt) {
    bounds.validate();
    Space space(bounds);
    const std::size_t d = space.free.size();
    const std::size_t design = opt.design_size > 0 ? opt.design_size : 10 * std::max<std::size_t>(1, d);
    if (opt.budget < design) {
        throw ConfigError(fmt::format("surrogate budget {} is below the design size {}", opt.budget, design));
    }

    RandomStream rng(derive_seed(opt.seed, 0x5u));
    SurrogateResult res;
    res.design_size = design;

    std::vector<Eigen::VectorXd> unit;
    std::vector<double> values;

    // Design points: evaluated in parallel, logged in design order.
    auto lhs = latin_hypercube(design, d, rng);
    std::vector<double> design_values(design);
    std::vector<std::vector<double>> design_params(design);
    for (std::size_t i = 0; i < design; ++i) {
        Eigen::VectorXd u(static_cast<Eigen::Index>(d));
        for (std::size_t k = 0; k < d; ++k) u[static_cast<Eigen::Index>(k)] = lhs[i][k];
        unit.push_back(u);
        design_params[i] = space.to_params(u);
    }
    parallel_for(design, opt.threads, [&](std::size_t i) { design_values[i] = objective(design_params[i]); });
    for (std::size_t i = 0; i < design; ++i) {
        values.push_back(design_values[i]);
        res.log.push_back({design_params[i], design_values[i]});
    }

    GaussianProcess gp;
    auto lcb = [&](const Eigen::VectorXd& u) {
        auto [m, s] = gp.predict(u);
        return m - opt.exploration * s;
    };
    auto clamp_unit = [](Eigen::VectorXd u) {
        for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = std::clamp(u[k], 0.0, 1.0);
        return u;
    };
    auto too_close = [&](const Eigen::VectorXd& u) {
        for (const auto& p : unit) {
            if ((p - u).squaredNorm() < 1e-10) return true;
        }
        return false;
    };

    while (res.log.size() < opt.budget && d > 0) {
        gp.fit(unit, values);

        // Random candidates plus local perturbations of the best points so far.
        std::vector<std::size_t> order(values.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
        Eigen::VectorXd best_u;
        double best_score = std::numeric_limits<double>::infinity();
        auto consider = [&](const Eigen::VectorXd& u) {
            if (too_close(u)) return;
            double s = lcb(u);
            if (s < best_score) {
                best_score = s;
                best_u = u;
            }
        };
        for (std::size_t c = 0; c < opt.random_candidates; ++c) {
            Eigen::VectorXd u(static_cast<Eigen::Index>(d));
            for (std::size_t k = 0; k < d; ++k) u[static_cast<Eigen::Index>(k)] = rng.uniform();
            consider(u);
        }
        const std::size_t top = std::min<std::size_t>(5, order.size());
        for (std::size_t t = 0; t < top; ++t) {
            for (std::size_t c = 0; c < opt.random_candidates / 10; ++c) {
                Eigen::VectorXd u = unit[order[t]];
                for (std::size_t k = 0; k < d; ++k) u[static_cast<Eigen::Index>(k)] += 0.05 * rng.normal();
                consider(clamp_unit(u));
            }
        }
        if (best_u.size() == 0) break;

        // Compass search on the acquisition from the best candidate.
        for (double step = 0.05; step > 1e-3; step *= 0.5) {
            bool improved = true;
            while (improved) {
                improved = false;
                for (std::size_t k = 0; k < d; ++k) {
                    for (double dir : {-1.0, 1.0}) {
                        Eigen::VectorXd u = best_u;
                        u[static_cast<Eigen::Index>(k)] += dir * step;
                        u = clamp_unit(u);
                        if (too_close(u)) continue;
                        double s = lcb(u);
                        if (s < best_score - 1e-12) {
                            best_score = s;
                            best_u = u;
                            improved = true;
                        }
                    }
                }
            }
        }

        auto params = space.to_params(best_u);
        double v = objective(params);
        unit.push_back(best_u);
        values.push_back(v);
        res.log.push_back({params, v});
    }

    // Degenerate case: every dimension fixed.
    if (d == 0 && res.log.empty()) res.log.push_back({bounds.lower, objective(bounds.lower)});

    res.best_index = 0;
    for (std::size_t i = 1; i < res.log.size(); ++i) {
        if (res.log[i].value < res.log[res.best_index].value) res.best_index = i;
    }
    res.best_x = res.log[res.best_index].x;
    res.best_value = res.log[res.best_index].value;
    return res;
}

}  // namespace lobsim
