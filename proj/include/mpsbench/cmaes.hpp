// Copyright 2026 The mpsbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include "mpsbench/rng.hpp"

namespace mpsbench {

enum class DimKind { Ordinal, Boolean, Categorical, Continuous };

/// One search coordinate. Discrete kinds are encoded by their index
/// 0..k-1 in latent space, index i owning the cell [i - 0.5, i + 0.5) with
/// the two outer cells unbounded; continuous coordinates are used as is.
struct Dimension {
    std::string name;
    DimKind kind = DimKind::Ordinal;
    std::vector<double> values; ///< admissible values; {0, 1} for booleans, unused when continuous

    static Dimension ordinal(std::string name, std::vector<double> grid) {
        return {std::move(name), DimKind::Ordinal, std::move(grid)};
    }
    static Dimension boolean(std::string name) { return {std::move(name), DimKind::Boolean, {0.0, 1.0}}; }
    static Dimension categorical(std::string name, std::size_t k) {
        std::vector<double> v(k);
        std::iota(v.begin(), v.end(), 0.0);
        return {std::move(name), DimKind::Categorical, std::move(v)};
    }
    static Dimension continuous(std::string name) { return {std::move(name), DimKind::Continuous, {}}; }

    bool discrete() const { return kind != DimKind::Continuous; }
    std::size_t size() const { return values.size(); }
};

struct ParamSpace {
    std::vector<Dimension> dims;

    std::size_t dimension() const { return dims.size(); }

    std::size_t discrete_count() const {
        return static_cast<std::size_t>(
            std::count_if(dims.begin(), dims.end(), [](const Dimension &d) { return d.discrete(); }));
    }

    /// Number of discrete configurations; 0 when any coordinate is continuous.
    std::size_t cardinality() const {
        std::size_t total = 1;
        for (const Dimension &d : dims) {
            if (!d.discrete()) {
                return 0;
            }
            total *= d.size();
        }
        return total;
    }

    void validate() const {
        if (dims.empty()) {
            throw std::invalid_argument("param space: no dimensions");
        }
        for (const Dimension &d : dims) {
            if (!d.discrete()) {
                continue;
            }
            if (d.values.size() < 2) {
                throw std::invalid_argument("param space: dimension '" + d.name + "' needs >= 2 values");
            }
            if (d.kind == DimKind::Ordinal && !std::is_sorted(d.values.begin(), d.values.end())) {
                throw std::invalid_argument("param space: grid of '" + d.name + "' is not sorted");
            }
        }
    }

    /// Grid value of coordinate j of a discretized point.
    double value(const std::vector<double> &point, std::size_t j) const {
        const Dimension &d = dims.at(j);
        return d.discrete() ? d.values.at(static_cast<std::size_t>(point.at(j))) : point.at(j);
    }
};

/// Index of the cell containing x on a k-value grid (half-up rounding, clamped).
inline std::size_t cell_index(double x, std::size_t k) {
    const double r = std::floor(x + 0.5);
    if (!(r > 0.0)) {
        return 0;
    }
    return std::min(static_cast<std::size_t>(std::min(r, 1e18)), k - 1);
}

/// Nearest valid configuration, in encoded coordinates.
inline std::vector<double> discretize(const std::vector<double> &latent, const ParamSpace &space) {
    if (latent.size() != space.dimension()) {
        throw std::invalid_argument("discretize: dimension mismatch");
    }
    std::vector<double> out(latent.size());
    for (std::size_t j = 0; j < latent.size(); ++j) {
        const Dimension &d = space.dims[j];
        out[j] = d.discrete() ? static_cast<double>(cell_index(latent[j], d.size())) : latent[j];
    }
    return out;
}

/// Encoded coordinates of a configuration given by grid values.
inline std::vector<double> encode(const std::vector<double> &values, const ParamSpace &space) {
    if (values.size() != space.dimension()) {
        throw std::invalid_argument("encode: dimension mismatch");
    }
    std::vector<double> out(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) {
        const Dimension &d = space.dims[j];
        if (!d.discrete()) {
            out[j] = values[j];
            continue;
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < d.size(); ++i) {
            if (std::abs(d.values[i] - values[j]) < std::abs(d.values[best] - values[j])) {
                best = i;
            }
        }
        out[j] = static_cast<double>(best);
    }
    return out;
}

struct CmaesConfig {
    std::size_t population = 10;      ///< lambda
    std::size_t max_generations = 10;
    std::size_t max_evaluations = 0;  ///< 0 = bounded by generations only
    double sigma0 = 1.0;
    std::uint64_t seed = 0;
    double margin = -1.0;             ///< alpha; negative selects 1 / (2 d lambda)
    bool use_margin = true;
    bool cache = true;                ///< reuse costs of already evaluated discrete points
    double target = -std::numeric_limits<double>::infinity(); ///< stop once best <= target

    void validate() const {
        if (population < 4) {
            throw std::invalid_argument("cmaes: population must be >= 4");
        }
        if (!(sigma0 > 0.0)) {
            throw std::invalid_argument("cmaes: sigma0 must be > 0");
        }
        if (margin >= 0.0 && !(margin > 0.0 && margin < 0.5)) {
            throw std::invalid_argument("cmaes: margin must lie in (0, 0.5)");
        }
    }

    double alpha(const ParamSpace &space) const {
        if (margin > 0.0) {
            return margin;
        }
        const std::size_t d = std::max<std::size_t>(1, space.discrete_count());
        return 1.0 / (2.0 * static_cast<double>(d) * static_cast<double>(population));
    }
};

/// Search distribution N(mean, sigma^2 A C A) with A diagonal.
struct CmaesDistribution {
    Eigen::VectorXd mean;
    double sigma = 1.0;
    Eigen::MatrixXd cov;
    Eigen::VectorXd scale; ///< diagonal of A, >= 1

    double marginal_sd(std::size_t j) const {
        const auto i = static_cast<Eigen::Index>(j);
        return sigma * scale(i) * std::sqrt(cov(i, i));
    }

    /// Smallest eigenvalue of A C A.
    double min_eigenvalue() const {
        const Eigen::MatrixXd acA = scale.asDiagonal() * cov * scale.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(acA, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
};

namespace detail {

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double norm_quantile(double p) { return boost::math::quantile(boost::math::normal_distribution<double>(), p); }

inline void cell_bounds(double m, std::size_t k, double &lo, double &hi) {
    const std::size_t i = cell_index(m, k);
    const double inf = std::numeric_limits<double>::infinity();
    lo = i == 0 ? -inf : static_cast<double>(i) - 0.5;
    hi = i + 1 == k ? inf : static_cast<double>(i) + 0.5;
}

inline double outside_probability(double m, double s, double lo, double hi) {
    double p = 0.0;
    if (std::isfinite(lo)) {
        p += norm_cdf((lo - m) / s);
    }
    if (std::isfinite(hi)) {
        p += norm_cdf((m - hi) / s);
    }
    return p;
}

} // namespace detail

/// Probability that coordinate j of a sample leaves the cell of the mean.
inline double crossing_probability(const CmaesDistribution &dist, const ParamSpace &space, std::size_t j) {
    const Dimension &d = space.dims.at(j);
    if (!d.discrete()) {
        return 0.0;
    }
    double lo = 0.0;
    double hi = 0.0;
    const double m = dist.mean(static_cast<Eigen::Index>(j));
    detail::cell_bounds(m, d.size(), lo, hi);
    return detail::outside_probability(m, dist.marginal_sd(j), lo, hi);
}

/// Keeps every discrete coordinate at least `alpha` likely to sample a
/// neighbouring cell.
///
/// Coordinates already above alpha are left alone. Otherwise the marginal
/// scale grows until the probability is exactly alpha; the growth is capped
/// at the scale that gives alpha from the middle of a unit cell, and a mean
/// lying deep in an unbounded outer cell is instead pulled toward the cell
/// boundary to the distance that yields alpha at that capped scale.
/// Continuous coordinates are untouched.
inline CmaesDistribution margin_correct(CmaesDistribution dist, const ParamSpace &space, double alpha) {
    const double s_cap = 0.5 / detail::norm_quantile(1.0 - alpha / 2.0);
    for (std::size_t j = 0; j < space.dimension(); ++j) {
        const Dimension &d = space.dims[j];
        if (!d.discrete()) {
            continue;
        }
        const auto i = static_cast<Eigen::Index>(j);
        double &m = dist.mean(i);
        double lo = 0.0;
        double hi = 0.0;
        detail::cell_bounds(m, d.size(), lo, hi);
        const double s = dist.marginal_sd(j);
        if (detail::outside_probability(m, s, lo, hi) >= alpha) {
            continue;
        }
        const double s_hi = std::max(s, s_cap);
        double s_new = s_hi;
        if (detail::outside_probability(m, s_hi, lo, hi) >= alpha) {
            double a = s;
            double b = s_hi;
            for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
                const double mid = 0.5 * (a + b);
                (detail::outside_probability(m, mid, lo, hi) < alpha ? a : b) = mid;
            }
            s_new = b;
        } else if (!std::isfinite(lo) || !std::isfinite(hi)) {
            // Outer cell: only one boundary exists.
            const double reach = s_hi * detail::norm_quantile(1.0 - alpha);
            m = std::isfinite(lo) ? lo + reach : hi - reach;
        }
        const double base = dist.sigma * std::sqrt(dist.cov(i, i));
        dist.scale(i) = std::max(dist.scale(i), s_new / base);
    }
    return dist;
}

struct GenerationLog {
    std::size_t generation = 0;
    std::size_t evaluations = 0;
    double best_cost = 0.0;       ///< best so far
    double generation_best = 0.0; ///< best of this generation
    double sigma = 0.0;
    double min_eigenvalue = 0.0;  ///< of A C A after the margin step
};

struct CmaesResult {
    std::vector<double> best_point; ///< discretized, encoded coordinates
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
    std::vector<GenerationLog> trace;
};

using Objective = std::function<double(const std::vector<double> &point)>;

/// (mu/mu_w, lambda)-CMA-ES with cumulative step-size adaptation.
///
/// The objective sees discretized points only. `x0` is the initial mean in
/// latent coordinates (centre of the space when empty).
inline CmaesResult cmaes_minimize(const Objective &objective, const ParamSpace &space, const CmaesConfig &cfg,
                                  std::vector<double> x0 = {}) {
    space.validate();
    cfg.validate();
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    const auto n = static_cast<Eigen::Index>(space.dimension());
    const double nd = static_cast<double>(n);
    const std::size_t lambda = cfg.population;
    const std::size_t mu = lambda / 2;

    VectorXd w(static_cast<Eigen::Index>(mu));
    for (std::size_t i = 0; i < mu; ++i) {
        w(static_cast<Eigen::Index>(i)) = std::log(static_cast<double>(mu) + 0.5) - std::log(static_cast<double>(i + 1));
    }
    w /= w.sum();
    const double mueff = 1.0 / w.squaredNorm();
    const double cc = (4.0 + mueff / nd) / (nd + 4.0 + 2.0 * mueff / nd);
    const double cs = (mueff + 2.0) / (nd + mueff + 5.0);
    const double c1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mueff);
    const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nd + 2.0) * (nd + 2.0) + mueff));
    const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (nd + 1.0)) - 1.0) + cs;
    const double chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));
    const double alpha = cfg.alpha(space);

    CmaesDistribution dist;
    dist.mean = VectorXd::Zero(n);
    if (x0.empty()) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const Dimension &d = space.dims[static_cast<std::size_t>(j)];
            dist.mean(j) = d.discrete() ? 0.5 * static_cast<double>(d.size() - 1) : 0.0;
        }
    } else {
        if (x0.size() != space.dimension()) {
            throw std::invalid_argument("cmaes: x0 dimension mismatch");
        }
        dist.mean = Eigen::Map<const VectorXd>(x0.data(), n);
    }
    dist.sigma = cfg.sigma0;
    dist.cov = MatrixXd::Identity(n, n);
    dist.scale = VectorXd::Ones(n);
    if (cfg.use_margin) {
        dist = margin_correct(dist, space, alpha);
    }

    VectorXd ps = VectorXd::Zero(n);
    VectorXd pc = VectorXd::Zero(n);
    MatrixXd B = MatrixXd::Identity(n, n);
    VectorXd D = VectorXd::Ones(n);

    Rng rng(cfg.seed);
    CmaesResult res;
    std::map<std::vector<double>, double> cache;
    auto evaluate = [&](const std::vector<double> &p) {
        if (cfg.cache) {
            if (auto it = cache.find(p); it != cache.end()) {
                return it->second;
            }
        }
        const double f = objective(p);
        ++res.evaluations;
        if (cfg.cache) {
            cache.emplace(p, f);
        }
        return f;
    };
    auto out_of_budget = [&] {
        return (cfg.max_evaluations > 0 && res.evaluations >= cfg.max_evaluations) || res.best_cost <= cfg.target;
    };

    std::vector<VectorXd> ys(lambda, VectorXd(n));
    std::vector<double> costs(lambda);
    for (std::size_t gen = 0; gen < cfg.max_generations && !out_of_budget(); ++gen) {
        double gen_best = std::numeric_limits<double>::infinity();
        std::size_t sampled = 0;
        for (std::size_t k = 0; k < lambda; ++k) {
            VectorXd z(n);
            for (Eigen::Index j = 0; j < n; ++j) {
                z(j) = rng.normal();
            }
            ys[k] = B * D.asDiagonal() * z;
            const VectorXd x = dist.mean + dist.sigma * dist.scale.cwiseProduct(ys[k]);
            const std::vector<double> point = discretize(std::vector<double>(x.data(), x.data() + n), space);
            costs[k] = evaluate(point);
            ++sampled;
            gen_best = std::min(gen_best, costs[k]);
            if (costs[k] < res.best_cost) {
                res.best_cost = costs[k];
                res.best_point = point;
            }
            if (out_of_budget()) {
                break;
            }
        }
        if (sampled < lambda) {
            res.trace.push_back({gen, res.evaluations, res.best_cost, gen_best, dist.sigma, dist.min_eigenvalue()});
            break;
        }

        std::vector<std::size_t> order(lambda);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });

        VectorXd yw = VectorXd::Zero(n);
        for (std::size_t i = 0; i < mu; ++i) {
            yw += w(static_cast<Eigen::Index>(i)) * ys[order[i]];
        }
        dist.mean += dist.sigma * dist.scale.cwiseProduct(yw);

        const VectorXd c_inv_half_yw = B * D.cwiseInverse().asDiagonal() * B.transpose() * yw;
        ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * c_inv_half_yw;
        const double gen_count = static_cast<double>(gen + 1);
        const bool hsig = ps.norm() / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * gen_count)) / chi_n < 1.4 + 2.0 / (nd + 1.0);
        pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * yw;

        MatrixXd rank_mu = MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < mu; ++i) {
            const VectorXd &y = ys[order[i]];
            rank_mu += w(static_cast<Eigen::Index>(i)) * y * y.transpose();
        }
        dist.cov = (1.0 - c1 - cmu) * dist.cov + c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * dist.cov) +
                   cmu * rank_mu;
        dist.cov = 0.5 * (dist.cov + dist.cov.transpose());
        dist.sigma *= std::exp((cs / damps) * (ps.norm() / chi_n - 1.0));

        Eigen::SelfAdjointEigenSolver<MatrixXd> es(dist.cov);
        B = es.eigenvectors();
        VectorXd ev = es.eigenvalues();
        const double floor = std::max(ev.maxCoeff(), 1e-300) * 1e-14;
        ev = ev.cwiseMax(floor);
        D = ev.cwiseSqrt();
        dist.cov = B * ev.asDiagonal() * B.transpose();

        if (cfg.use_margin) {
            dist = margin_correct(dist, space, alpha);
        }
        res.trace.push_back({gen, res.evaluations, res.best_cost, gen_best, dist.sigma, dist.min_eigenvalue()});
    }
    return res;
}

} // namespace mpsbench
