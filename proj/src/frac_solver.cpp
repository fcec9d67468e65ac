#include "fracdose/frac_solver.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fracdose::frac {

namespace {

constexpr int kChunk = 8192;  // fixed chunk size keeps the OpenMP reduction order stable

void check_order(double mu) {
    if (!(mu > 0.0 && mu <= 1.0)) {
        throw std::invalid_argument("fractional order mu must lie in (0,1], got " +
                                    std::to_string(mu));
    }
}

// P0(s) = int_{s-1}^{s} sigma^(mu-1) dsigma = (s^mu - (s-1)^mu)/mu
double p0(double mu, double s) {
    if (mu == 1.0) return 1.0;
    return (std::pow(s, mu) - std::pow(s - 1.0, mu)) / mu;
}

// P1(s) = int over the interval of the rising linear hat times the kernel:
// (s P0(s) - (s-1)^mu) / (mu + 1)
double p1(double mu, double s) {
    if (mu == 1.0) return 0.5;
    return (s * p0(mu, s) - std::pow(s - 1.0, mu)) / (mu + 1.0);
}

}  // namespace

void FracGrid::validate() const {
    if (!(h > 0.0)) throw std::invalid_argument("grid step h must be > 0");
    if (steps < 0) throw std::invalid_argument("grid step count must be >= 0");
    check_order(mu);
}

std::vector<double> predictor_weights(double mu, int n) {
    check_order(mu);
    if (n < 0) throw std::invalid_argument("predictor_weights: n must be >= 0");
    std::vector<double> w(n + 1);
    for (int j = 0; j <= n; ++j) {
        w[j] = std::pow(double(n + 1 - j), mu) - std::pow(double(n - j), mu);
    }
    return w;
}

std::vector<double> corrector_weights(double mu, int n) {
    check_order(mu);
    if (n < 0) throw std::invalid_argument("corrector_weights: n must be >= 0");
    std::vector<double> w(n + 2);
    w[0] = std::pow(double(n), mu + 1.0) - (n - mu) * std::pow(double(n + 1), mu);
    for (int j = 1; j <= n; ++j) {
        const double s = double(n - j);
        w[j] = std::pow(s + 2.0, mu + 1.0) + std::pow(s, mu + 1.0) -
               2.0 * std::pow(s + 1.0, mu + 1.0);
    }
    w[n + 1] = 1.0;
    return w;
}

void RhsHistory::append(std::span<const double> f_left, std::span<const double> f_right) {
    data_.insert(data_.end(), f_left.begin(), f_left.end());
    data_.insert(data_.end(), f_right.begin(), f_right.end());
}

void RhsHistory::assign_raw(std::vector<double> raw) {
    if (raw.size() % (2 * dim_) != 0) {
        throw std::invalid_argument("history payload not a whole number of records");
    }
    data_ = std::move(raw);
}

FdeSolver::FdeSolver(double h, double mu, int dim, Rhs rhs, HistoryKernel kernel)
    : h_(h),
      mu_(mu),
      dim_(dim),
      rhs_(std::move(rhs)),
      kernel_(kernel),
      memoryless_(mu == 1.0),
      x_(dim, 0.0),
      history_(dim),
      f_left_(dim),
      f_pred_(dim),
      f_right_(dim),
      x_pred_(dim),
      acc_(2 * dim) {
    if (!(h > 0.0)) throw std::invalid_argument("step size h must be > 0");
    check_order(mu);
    if (dim < 1) throw std::invalid_argument("state dimension must be >= 1");
    scale_ = std::pow(h_, mu_) / std::tgamma(mu_);
    w_left1_ = p0(mu_, 1.0) - p1(mu_, 1.0);
    w_right1_ = p1(mu_, 1.0);
}

void FdeSolver::reset(std::span<const double> x0) {
    if (static_cast<int>(x0.size()) != dim_) {
        throw std::invalid_argument("initial state dimension mismatch");
    }
    x_.assign(x0.begin(), x0.end());
    history_.clear();
}

void FdeSolver::ensure_weights(int n) {
    // Lag-s increment weights, s = 1..n; index 0 is padding.
    if (static_cast<int>(d_pred_.size()) > n) return;
    int old = static_cast<int>(d_pred_.size());
    if (old == 0) old = 1;
    int target = std::max(n + 1, 2 * static_cast<int>(d_pred_.size()));
    d_pred_.resize(target);
    d_left_.resize(target);
    d_right_.resize(target);
    d_pred_[0] = d_left_[0] = d_right_[0] = 0.0;
    for (int s = old; s < target; ++s) {
        const double ss = double(s);
        d_pred_[s] = p0(mu_, ss + 1.0) - p0(mu_, ss);
        const double p1s = p1(mu_, ss);
        const double p1s1 = p1(mu_, ss + 1.0);
        d_left_[s] = (p0(mu_, ss + 1.0) - p1s1) - (p0(mu_, ss) - p1s);
        d_right_[s] = p1s1 - p1s;
    }
}

void FdeSolver::convolve_chunk(int lo, int hi, int n, double* acc_pred,
                               double* acc_corr) const {
    const int dim = dim_;
    for (int j = lo; j < hi; ++j) {
        const int s = n - j;
        const double wp = d_pred_[s];
        const double wl = d_left_[s];
        const double wr = d_right_[s];
        const double* rec = history_.record(j);
        for (int d = 0; d < dim; ++d) {
            acc_pred[d] += wp * rec[d];
            acc_corr[d] += wl * rec[d] + wr * rec[dim + d];
        }
    }
}

void FdeSolver::convolve(int n, double* acc_pred, double* acc_corr) const {
    for (int d = 0; d < dim_; ++d) acc_pred[d] = acc_corr[d] = 0.0;
    if (n == 0) return;
    if (kernel_ == HistoryKernel::Serial || n <= kChunk) {
        convolve_chunk(0, n, n, acc_pred, acc_corr);
        return;
    }
    // Fixed-size chunks with an ordered final reduction: the summation order
    // does not depend on the number of threads.
    const int nchunks = (n + kChunk - 1) / kChunk;
    std::vector<double> partial(static_cast<size_t>(nchunks) * 2 * dim_, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int c = 0; c < nchunks; ++c) {
        double* p = partial.data() + static_cast<size_t>(c) * 2 * dim_;
        convolve_chunk(c * kChunk, std::min(n, (c + 1) * kChunk), n, p, p + dim_);
    }
    for (int c = 0; c < nchunks; ++c) {
        const double* p = partial.data() + static_cast<size_t>(c) * 2 * dim_;
        for (int d = 0; d < dim_; ++d) {
            acc_pred[d] += p[d];
            acc_corr[d] += p[dim_ + d];
        }
    }
}

void FdeSolver::step(double u) {
    const int n = history_.size();
    double* acc_pred = acc_.data();
    double* acc_corr = acc_.data() + dim_;

    rhs_(x_, u, f_left_);

    if (memoryless_) {
        // Classical one-step ABM: Euler predictor, trapezoid corrector.
        for (int d = 0; d < dim_; ++d) x_pred_[d] = x_[d] + h_ * f_left_[d];
        rhs_(x_pred_, u, f_pred_);
        for (int d = 0; d < dim_; ++d) x_[d] += 0.5 * h_ * (f_left_[d] + f_pred_[d]);
    } else {
        ensure_weights(n);
        convolve(n, acc_pred, acc_corr);
        const double c_pred = scale_ * p0(mu_, 1.0);
        for (int d = 0; d < dim_; ++d) {
            x_pred_[d] = x_[d] + scale_ * acc_pred[d] + c_pred * f_left_[d];
        }
        rhs_(x_pred_, u, f_pred_);
        for (int d = 0; d < dim_; ++d) {
            x_[d] += scale_ * (acc_corr[d] + w_left1_ * f_left_[d] + w_right1_ * f_pred_[d]);
        }
    }

    for (int d = 0; d < dim_; ++d) {
        if (!std::isfinite(x_[d])) {
            throw std::runtime_error("fde step " + std::to_string(n) +
                                     ": non-finite state component " + std::to_string(d));
        }
    }
    rhs_(x_, u, f_right_);
    history_.append(f_left_, f_right_);
}

FdeSolver::Snapshot FdeSolver::snapshot() const {
    return Snapshot{x_, history_.raw()};
}

void FdeSolver::restore(const Snapshot& snap) {
    if (static_cast<int>(snap.x.size()) != dim_) {
        throw std::invalid_argument("snapshot dimension mismatch");
    }
    x_ = snap.x;
    history_.assign_raw(snap.history);
}

Rhs population_rhs(const model::ModelParams& params) {
    return [params](std::span<const double> x, double u, std::span<double> dxdt) {
        const auto a = model::transition_matrix(params, u);
        dxdt[0] = a[0] * x[0] + a[1] * x[1];
        dxdt[1] = a[2] * x[0] + a[3] * x[1];
    };
}

Trajectory integrate_piecewise(const model::ModelParams& params,
                               std::span<const double> schedule,
                               const model::PopulationState& x0, const FracGrid& grid,
                               HistoryKernel kernel) {
    grid.validate();
    params.validate();
    x0.validate();
    if (static_cast<int>(schedule.size()) != grid.steps) {
        throw std::invalid_argument("schedule length must equal grid step count");
    }
    for (double u : schedule) {
        if (!(u >= 0.0 && u <= 1.0)) {
            throw std::invalid_argument("schedule doses must lie in [0,1]");
        }
    }
    if (grid.mu != params.mu) {
        throw std::invalid_argument("grid order and model mu disagree");
    }

    FdeSolver solver(grid.h, grid.mu, 2, population_rhs(params), kernel);
    const double init[2] = {x0.susceptible, x0.resistant};
    solver.reset(init);

    Trajectory traj;
    const int n = grid.steps;
    traj.time.reserve(n + 1);
    traj.susceptible.reserve(n + 1);
    traj.resistant.reserve(n + 1);
    traj.phi.reserve(n + 1);
    traj.growth.reserve(n + 1);
    traj.control.assign(schedule.begin(), schedule.end());

    auto record = [&](double t, double growth_rate) {
        const auto x = solver.state();
        const double total = x[0] + x[1];
        traj.time.push_back(t);
        traj.susceptible.push_back(x[0]);
        traj.resistant.push_back(x[1]);
        traj.phi.push_back(total > 0.0 ? x[1] / total : 0.0);
        traj.growth.push_back(growth_rate);
    };

    record(0.0, 0.0);
    double prev_total = x0.total();
    for (int i = 0; i < n; ++i) {
        solver.step(schedule[i]);
        const auto x = solver.state();
        const double total = x[0] + x[1];
        const double c = std::log(total / prev_total) / grid.h;
        record(grid.h * (i + 1), c);
        prev_total = total;
    }
    return traj;
}

}  // namespace fracdose::frac
