#pragma once

// Max-product sampling operator with Kantorovich-type coefficients.
//
// Over a box R = [a_1,b_1] x ... x [a_s,b_s] and a density kernel Psi, the
// operator evaluates
//
//   K_n(f, x) = max_k { c_k * Psi(n*x - k) } / max_k { Psi(n*x - k) }
//
// where k runs over the lattice J_n with ceil(n*a_i) <= k_i <= floor(n*b_i)-1
// and c_k is the normalized mean of f over the cell [k/n, (k+1)/n]^s (or an
// injected data value). Coefficients must be non-negative; inputs with
// negatives are shifted up by a recorded constant that evaluation subtracts
// again, so negative data round-trips transparently.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "maxprod/errors.hpp"
#include "maxprod/kernels.hpp"

namespace maxprod {

class BoxDomain {
public:
    BoxDomain(std::vector<double> lower, std::vector<double> upper);

    static BoxDomain interval(double a, double b);
    static BoxDomain unit_square();

    int dimension() const { return static_cast<int>(lower_.size()); }
    double lower(int axis) const { return lower_[axis]; }
    double upper(int axis) const { return upper_[axis]; }
    double volume() const;
    bool contains(std::span<const double> x) const;

    bool operator==(const BoxDomain&) const = default;

private:
    std::vector<double> lower_, upper_;
};

// Valid index lattice for a given n and box. Per axis the inclusive range is
// [ceil(n*a_i), floor(n*b_i) - 1]; n*a_i and n*b_i are snapped to the nearest
// integer within 1e-9 first, so 0.1 * 3 style artifacts cannot shift a bound.
class IndexSet {
public:
    // Throws EmptyIndexSetError when some axis range is empty. With
    // extend_upper the upper bound becomes floor(n*b_i), adding one index per
    // axis; used by the series path to place a datum on the final node.
    static IndexSet build(int n, const BoxDomain& domain, bool extend_upper = false);

    int n() const { return n_; }
    int dimension() const { return static_cast<int>(lower_.size()); }
    long long lower(int axis) const { return lower_[axis]; }
    long long upper(int axis) const { return upper_[axis]; }
    long long axis_count(int axis) const { return upper_[axis] - lower_[axis] + 1; }
    long long size() const;

    // Flat storage order: axis 0 varies fastest.
    long long flatten(std::span<const long long> k) const;
    std::vector<long long> unflatten(long long flat) const;

    bool operator==(const IndexSet&) const = default;

private:
    IndexSet(int n, std::vector<long long> lower, std::vector<long long> upper)
        : n_(n), lower_(std::move(lower)), upper_(std::move(upper)) {}

    int n_ = 0;
    std::vector<long long> lower_, upper_;
};

struct EvalConfig {
    enum class WindowMode { Exact, Windowed };

    WindowMode window = WindowMode::Exact;
    double epsilon = 1e-9;      // Windowed-mode deviation bound vs Exact
    int quadrature_points = 8;  // midpoint nodes per axis for cell means

    static EvalConfig exact() { return {}; }
    static EvalConfig windowed(double eps = 1e-9) {
        EvalConfig cfg;
        cfg.window = WindowMode::Windowed;
        cfg.epsilon = eps;
        return cfg;
    }
};

class CoefficientGrid {
public:
    // Kantorovich means: per cell, the composite-midpoint average of f with
    // quadrature_points nodes per axis. If any sampled value (quadrature
    // nodes or cell-corner lattice) is negative, all coefficients are built
    // from f + shift with shift = -min sampled value.
    static CoefficientGrid from_function(
        const std::function<double(std::span<const double>)>& f, int n,
        const BoxDomain& domain, int quadrature_points);
    static CoefficientGrid from_function(const std::function<double(double)>& f,
                                         int n, const BoxDomain& domain,
                                         int quadrature_points);

    // Direct injection of data as coefficients; values laid out in the index
    // set's flat order. A negative minimum is shifted to zero and recorded.
    static CoefficientGrid from_values(std::vector<double> values, int n,
                                       const BoxDomain& domain,
                                       bool extend_upper = false);

    const IndexSet& indices() const { return indices_; }
    const BoxDomain& domain() const { return domain_; }
    const std::vector<double>& values() const { return values_; }  // shifted, >= 0
    double shift() const { return shift_; }
    double max_value() const { return max_value_; }
    double value_at(std::span<const long long> k) const;

private:
    CoefficientGrid(IndexSet indices, BoxDomain domain, std::vector<double> values,
                    double shift);

    IndexSet indices_;
    BoxDomain domain_;
    std::vector<double> values_;
    double shift_ = 0.0;
    double max_value_ = 0.0;
};

// Function samples on a uniform grid over the box, endpoints included.
// Storage order matches IndexSet: axis 0 varies fastest, so a 2D field with
// resolution {W, H} is laid out row by row like an image.
struct ScalarField {
    BoxDomain domain;
    std::vector<int> resolution;  // per axis, each >= 2
    std::vector<double> values;

    ScalarField(BoxDomain dom, std::vector<int> res);

    long long point_count() const;
    double coordinate(int axis, int i) const;
    std::vector<double> point_at(long long flat) const;
};

ScalarField sample_function(const std::function<double(std::span<const double>)>& f,
                            const BoxDomain& domain,
                            const std::vector<int>& resolution);
ScalarField sample_function(const std::function<double(double)>& f,
                            const BoxDomain& domain, int resolution);

// Largest Psi(n*x - k) over the index set: the evaluation denominator. For
// any x in the box it is at least phi(2)^s.
double max_psi_over_index_set(const IndexSet& indices, const ProductKernel& kernel,
                              std::span<const double> x);

// Evaluates the operator at one point of the box (points outside are
// rejected, not extrapolated). In Windowed mode, lattice terms too small to
// move the ratio by more than epsilon are skipped; the truncation is
// correctness-preserving, not heuristic.
double evaluate_point(const CoefficientGrid& coeffs, const ProductKernel& kernel,
                      std::span<const double> x, const EvalConfig& cfg = {});

// Batch of evaluate_point over a uniform grid, endpoints included. Points
// are independent; evaluation may run on several threads (MAXPROD_THREADS
// overrides the count) with bit-identical results.
ScalarField evaluate_grid(const CoefficientGrid& coeffs, const ProductKernel& kernel,
                          const std::vector<int>& resolution,
                          const EvalConfig& cfg = {});

}  // namespace maxprod
