#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fracdose/dose_model.hpp"
#include "fracdose/trajectory.hpp"

namespace fracdose::frac {

// Fixed integration grid for the Caputo problem D_0^mu x = f(x, u).
struct FracGrid {
    double h = 0.01;  // hours per step
    int steps = 0;
    double mu = 1.0;  // order, in (0,1]; mu = 1 is the memoryless case

    void validate() const;  // throws std::invalid_argument
};

// Adams-Bashforth (rectangle product-integration) weights b_{j,n+1} =
// (n+1-j)^mu - (n-j)^mu for the quadrature
//   int_0^{t_{n+1}} (t_{n+1}-tau)^{mu-1} f dtau ~ (h^mu/mu) sum_j b_j f_j.
// Returns n+1 weights, all strictly positive for mu in (0,1].
std::vector<double> predictor_weights(double mu, int n);

// Adams-Moulton (piecewise-linear product-integration) weights a_{j,n+1}
// for the same kernel, normalized so that
//   (1/Gamma(mu)) int_0^{t_{n+1}} (t_{n+1}-tau)^{mu-1} f dtau
//     ~ (h^mu/Gamma(mu+2)) sum_j a_j f_j.
// Returns n+2 weights; at mu=1 they are 2*[1/2, 1, ..., 1, 1/2].
std::vector<double> corrector_weights(double mu, int n);

// Stored right-hand-side evaluations, one record per completed step.
// Each record holds the two endpoint evaluations of that step's interval,
// f(x_j, u_j) and f(x_{j+1}, u_j), so the piecewise-linear quadrature stays
// consistent when the control jumps at grid points.
class RhsHistory {
  public:
    explicit RhsHistory(int dim) : dim_(dim) {}

    int size() const { return static_cast<int>(data_.size()) / (2 * dim_); }
    int dim() const { return dim_; }
    void append(std::span<const double> f_left, std::span<const double> f_right);
    void clear() { data_.clear(); }
    const double* record(int j) const { return data_.data() + 2 * dim_ * j; }
    const std::vector<double>& raw() const { return data_; }
    void assign_raw(std::vector<double> raw);

  private:
    int dim_;
    std::vector<double> data_;  // per record: f_left[dim], f_right[dim]
};

enum class HistoryKernel {
    Serial,  // reference implementation, plain loop
    OpenMP,  // chunked parallel reduction; bit-reproducible for any thread count
};

using Rhs = std::function<void(std::span<const double> x, double u, std::span<double> dxdt)>;

// One-step PECE integrator for D_0^mu x = f(x, u) with the control held
// constant over each step. Keeps the full evaluation history: step n costs
// O(n), a whole trajectory O(n^2). At mu = 1 every history weight vanishes
// and a step is exactly the classical one-step Adams-Bashforth-Moulton
// method (Euler predictor, trapezoid corrector).
class FdeSolver {
  public:
    FdeSolver(double h, double mu, int dim, Rhs rhs,
              HistoryKernel kernel = HistoryKernel::Serial);

    void reset(std::span<const double> x0);
    void step(double u);  // throws std::runtime_error on non-finite state

    std::span<const double> state() const { return x_; }
    int completed_steps() const { return history_.size(); }
    double time() const { return h_ * completed_steps(); }
    double order() const { return mu_; }
    const RhsHistory& history() const { return history_; }

    // The history plus the current state is the complete solver state:
    // restoring a snapshot and continuing reproduces an uninterrupted run
    // bit for bit.
    struct Snapshot {
        std::vector<double> x;
        std::vector<double> history;
    };
    Snapshot snapshot() const;
    void restore(const Snapshot& snap);

  private:
    void ensure_weights(int n);
    void convolve(int n, double* acc_pred, double* acc_corr) const;
    void convolve_chunk(int lo, int hi, int n, double* acc_pred, double* acc_corr) const;

    double h_;
    double mu_;
    int dim_;
    Rhs rhs_;
    HistoryKernel kernel_;
    bool memoryless_;  // mu == 1: all history increments are exactly zero

    double scale_;      // h^mu / Gamma(mu)
    double w_left1_;    // current-interval weight of f(x_n, u)
    double w_right1_;   // current-interval weight of the predictor evaluation
    // Increment weights by lag s = n - j (index 0 unused):
    std::vector<double> d_pred_;   // rectangle increments
    std::vector<double> d_left_;   // trapezoid increments, left endpoint
    std::vector<double> d_right_;  // trapezoid increments, right endpoint

    std::vector<double> x_;
    RhsHistory history_;
    // scratch buffers
    std::vector<double> f_left_, f_pred_, f_right_, x_pred_, acc_;
};

// Integrates the two-phenotype model under a per-step dose schedule
// (values in [0,1]). Deterministic; step n costs O(n) because of the
// memory convolution, a full trajectory O(n^2).
Trajectory integrate_piecewise(const model::ModelParams& params,
                               std::span<const double> schedule,
                               const model::PopulationState& x0, const FracGrid& grid,
                               HistoryKernel kernel = HistoryKernel::Serial);

// Right-hand side A(u) x of the switching model, usable with FdeSolver.
Rhs population_rhs(const model::ModelParams& params);

}  // namespace fracdose::frac
