#include "maxprod/operator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

namespace maxprod {

namespace {

constexpr double kBoundarySnapTol = 1e-9;

long long snapped_ceil(double v) {
    const double r = std::round(v);
    if (std::abs(v - r) <= kBoundarySnapTol) return static_cast<long long>(r);
    return static_cast<long long>(std::ceil(v));
}

long long snapped_floor(double v) {
    const double r = std::round(v);
    if (std::abs(v - r) <= kBoundarySnapTol) return static_cast<long long>(r);
    return static_cast<long long>(std::floor(v));
}

int resolve_thread_count() {
    if (const char* env = std::getenv("MAXPROD_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 1024)
            return static_cast<int>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs fn(i) for i in [0, count). Chunks are contiguous and every slot is
// written by exactly one thread, so results cannot depend on the thread count.
void parallel_for(long long count, const std::function<void(long long)>& fn) {
    const int threads = std::min<long long>(resolve_thread_count(), count);
    if (threads <= 1 || count < 2048) {
        for (long long i = 0; i < count; ++i) fn(i);
        return;
    }
    const long long chunk = (count + threads - 1) / threads;
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&](long long begin, long long end) {
        try {
            for (long long i = begin; i < end; ++i) fn(i);
        } catch (...) {
            std::scoped_lock lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };
    for (int t = 1; t < threads; ++t) {
        const long long begin = t * chunk;
        const long long end = std::min(count, begin + chunk);
        if (begin < end) pool.emplace_back(work, begin, end);
    }
    work(0, std::min(count, chunk));
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Deterministic tree reduction; sums of 2^k identical values stay exact, so
// constant data yields bit-exact constant cell means.
double pairwise_sum(const double* data, size_t count) {
    if (count == 0) return 0.0;
    if (count <= 2) return count == 1 ? data[0] : data[0] + data[1];
    const size_t half = count / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

std::string format_index(std::span<const long long> k) {
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
    os << ')';
    return os.str();
}

}  // namespace

BoxDomain::BoxDomain(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty() || lower_.size() != upper_.size())
        throw ContractError("box domain: bound vectors must be non-empty and equal-sized");
    for (size_t i = 0; i < lower_.size(); ++i) {
        if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) ||
            !(lower_[i] < upper_[i]))
            throw ContractError("box domain: need finite lower < upper on every axis");
    }
}

BoxDomain BoxDomain::interval(double a, double b) { return BoxDomain({a}, {b}); }

BoxDomain BoxDomain::unit_square() { return BoxDomain({0.0, 0.0}, {1.0, 1.0}); }

double BoxDomain::volume() const {
    double v = 1.0;
    for (size_t i = 0; i < lower_.size(); ++i) v *= upper_[i] - lower_[i];
    return v;
}

bool BoxDomain::contains(std::span<const double> x) const {
    if (x.size() != lower_.size()) return false;
    for (size_t i = 0; i < lower_.size(); ++i) {
        if (!(x[i] >= lower_[i]) || !(x[i] <= upper_[i])) return false;
    }
    return true;
}

IndexSet IndexSet::build(int n, const BoxDomain& domain, bool extend_upper) {
    if (n < 1) throw ContractError("index set: n must be a positive integer");
    const int s = domain.dimension();
    std::vector<long long> lo(s), hi(s);
    for (int i = 0; i < s; ++i) {
        lo[i] = snapped_ceil(static_cast<double>(n) * domain.lower(i));
        hi[i] = snapped_floor(static_cast<double>(n) * domain.upper(i)) - 1;
        if (extend_upper) ++hi[i];
        if (lo[i] > hi[i]) {
            std::ostringstream os;
            os << "empty index set on axis " << i << ": ceil(n*a)=" << lo[i]
               << " exceeds floor(n*b)-1=" << hi[i] << " for n=" << n;
            throw EmptyIndexSetError(os.str());
        }
    }
    return IndexSet(n, std::move(lo), std::move(hi));
}

long long IndexSet::size() const {
    long long total = 1;
    for (int i = 0; i < dimension(); ++i) total *= axis_count(i);
    return total;
}

long long IndexSet::flatten(std::span<const long long> k) const {
    long long flat = 0;
    long long stride = 1;
    for (int i = 0; i < dimension(); ++i) {
        flat += (k[i] - lower_[i]) * stride;
        stride *= axis_count(i);
    }
    return flat;
}

std::vector<long long> IndexSet::unflatten(long long flat) const {
    std::vector<long long> k(dimension());
    for (int i = 0; i < dimension(); ++i) {
        k[i] = lower_[i] + flat % axis_count(i);
        flat /= axis_count(i);
    }
    return k;
}

CoefficientGrid::CoefficientGrid(IndexSet indices, BoxDomain domain,
                                 std::vector<double> values, double shift)
    : indices_(std::move(indices)),
      domain_(std::move(domain)),
      values_(std::move(values)),
      shift_(shift) {
    max_value_ = 0.0;
    for (double v : values_) max_value_ = std::max(max_value_, v);
}

CoefficientGrid CoefficientGrid::from_function(
    const std::function<double(std::span<const double>)>& f, int n,
    const BoxDomain& domain, int quadrature_points) {
    if (quadrature_points < 1)
        throw ContractError("cell means: quadrature points per axis must be >= 1");
    IndexSet indices = IndexSet::build(n, domain);
    const int s = indices.dimension();
    const int m = quadrature_points;

    long long nodes_per_cell = 1;
    for (int i = 0; i < s; ++i) nodes_per_cell *= m;

    double min_sample = std::numeric_limits<double>::infinity();
    std::vector<double> means(indices.size());
    std::vector<double> u(s);
    std::vector<double> node_values(nodes_per_cell);
    for (long long flat = 0; flat < indices.size(); ++flat) {
        const std::vector<long long> k = indices.unflatten(flat);
        for (long long node = 0; node < nodes_per_cell; ++node) {
            long long rem = node;
            for (int i = 0; i < s; ++i) {
                const long long j = rem % m;
                rem /= m;
                u[i] = (static_cast<double>(k[i]) +
                        (static_cast<double>(j) + 0.5) / static_cast<double>(m)) /
                       static_cast<double>(n);
            }
            const double fv = f(u);
            if (!std::isfinite(fv))
                throw DataError("cell means: non-finite sample in cell k=" +
                                format_index(k));
            node_values[node] = fv;
            min_sample = std::min(min_sample, fv);
        }
        means[flat] = pairwise_sum(node_values.data(), node_values.size()) /
                      static_cast<double>(nodes_per_cell);
    }

    // Corner lattice scan sharpens the infimum estimate used by the shift;
    // for monotone data it recovers the exact minimum.
    {
        std::vector<long long> corner_counts(s);
        long long corners = 1;
        for (int i = 0; i < s; ++i) {
            corner_counts[i] = indices.axis_count(i) + 1;
            corners *= corner_counts[i];
        }
        for (long long c = 0; c < corners; ++c) {
            long long rem = c;
            for (int i = 0; i < s; ++i) {
                const long long j = rem % corner_counts[i];
                rem /= corner_counts[i];
                u[i] = static_cast<double>(indices.lower(i) + j) / static_cast<double>(n);
            }
            const double fv = f(u);
            if (!std::isfinite(fv))
                throw DataError("cell means: non-finite sample at a cell corner");
            min_sample = std::min(min_sample, fv);
        }
    }

    double shift = 0.0;
    if (min_sample < 0.0) {
        shift = -min_sample;
        for (double& v : means) v += shift;
    }
    return CoefficientGrid(std::move(indices), domain, std::move(means), shift);
}

CoefficientGrid CoefficientGrid::from_function(
    const std::function<double(double)>& f, int n, const BoxDomain& domain,
    int quadrature_points) {
    if (domain.dimension() != 1)
        throw ContractError("cell means: scalar function requires a 1D domain");
    return from_function(
        [&f](std::span<const double> u) { return f(u[0]); }, n, domain,
        quadrature_points);
}

CoefficientGrid CoefficientGrid::from_values(std::vector<double> values, int n,
                                             const BoxDomain& domain,
                                             bool extend_upper) {
    IndexSet indices = IndexSet::build(n, domain, extend_upper);
    if (static_cast<long long>(values.size()) != indices.size()) {
        std::ostringstream os;
        os << "coefficient injection: got " << values.size() << " values, index set has "
           << indices.size();
        throw ContractError(os.str());
    }
    double min_value = std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (!std::isfinite(v)) throw DataError("coefficient injection: non-finite value");
        min_value = std::min(min_value, v);
    }
    double shift = 0.0;
    if (min_value < 0.0) {
        shift = -min_value;
        for (double& v : values) v += shift;
    }
    return CoefficientGrid(std::move(indices), domain, std::move(values), shift);
}

double CoefficientGrid::value_at(std::span<const long long> k) const {
    return values_[indices_.flatten(k)];
}

ScalarField::ScalarField(BoxDomain dom, std::vector<int> res)
    : domain(std::move(dom)), resolution(std::move(res)) {
    if (static_cast<int>(resolution.size()) != domain.dimension())
        throw ContractError("scalar field: resolution rank does not match domain");
    long long count = 1;
    for (int r : resolution) {
        if (r < 2) throw ContractError("scalar field: resolution must be >= 2 per axis");
        count *= r;
    }
    values.assign(count, 0.0);
}

long long ScalarField::point_count() const {
    return static_cast<long long>(values.size());
}

double ScalarField::coordinate(int axis, int i) const {
    const double a = domain.lower(axis);
    const double b = domain.upper(axis);
    const int r = resolution[axis];
    if (i == r - 1) return b;
    return a + (b - a) * static_cast<double>(i) / static_cast<double>(r - 1);
}

std::vector<double> ScalarField::point_at(long long flat) const {
    std::vector<double> x(resolution.size());
    for (size_t i = 0; i < resolution.size(); ++i) {
        x[i] = coordinate(static_cast<int>(i), static_cast<int>(flat % resolution[i]));
        flat /= resolution[i];
    }
    return x;
}

ScalarField sample_function(const std::function<double(std::span<const double>)>& f,
                            const BoxDomain& domain,
                            const std::vector<int>& resolution) {
    ScalarField field(domain, resolution);
    for (long long flat = 0; flat < field.point_count(); ++flat) {
        const std::vector<double> x = field.point_at(flat);
        field.values[flat] = f(x);
    }
    return field;
}

ScalarField sample_function(const std::function<double(double)>& f,
                            const BoxDomain& domain, int resolution) {
    if (domain.dimension() != 1)
        throw ContractError("sample_function: scalar overload requires a 1D domain");
    return sample_function([&f](std::span<const double> x) { return f(x[0]); }, domain,
                           {resolution});
}

namespace {

// One evaluation pass: per-axis phi tables over the (possibly windowed) index
// ranges, then a max scan of the products.
struct Evaluator {
    const CoefficientGrid& grid;
    const ProductKernel& kernel;
    std::optional<double> window_radius;  // nullopt = exact

    double ratio(std::span<const double> x) const {
        const IndexSet& idx = grid.indices();
        const int s = idx.dimension();
        const double n = static_cast<double>(idx.n());

        std::vector<long long> klo(s), khi(s);
        for (int i = 0; i < s; ++i) {
            klo[i] = idx.lower(i);
            khi[i] = idx.upper(i);
            if (window_radius) {
                const long long wlo =
                    static_cast<long long>(std::ceil(n * x[i] - *window_radius));
                const long long whi =
                    static_cast<long long>(std::floor(n * x[i] + *window_radius));
                klo[i] = std::max(klo[i], wlo);
                khi[i] = std::min(khi[i], whi);
                if (klo[i] > khi[i]) {  // cannot happen for radius >= 2; stay safe
                    klo[i] = idx.lower(i);
                    khi[i] = idx.upper(i);
                }
            }
        }

        std::vector<std::vector<double>> phi_table(s);
        for (int i = 0; i < s; ++i) {
            phi_table[i].resize(khi[i] - klo[i] + 1);
            for (long long t = 0; t < static_cast<long long>(phi_table[i].size()); ++t)
                phi_table[i][t] =
                    kernel.base().phi(n * x[i] - static_cast<double>(klo[i] + t));
        }

        long long window_points = 1;
        for (int i = 0; i < s; ++i) window_points *= khi[i] - klo[i] + 1;

        std::vector<long long> strides(s);
        long long stride = 1;
        for (int i = 0; i < s; ++i) {
            strides[i] = stride;
            stride *= idx.axis_count(i);
        }

        const std::vector<double>& coeff = grid.values();
        double numerator = 0.0;
        double denominator = 0.0;
        std::vector<long long> t(s, 0);
        for (long long p = 0; p < window_points; ++p) {
            double psi = 1.0;
            long long flat = 0;
            for (int i = 0; i < s; ++i) {
                psi *= phi_table[i][t[i]];
                flat += (klo[i] + t[i] - idx.lower(i)) * strides[i];
            }
            denominator = std::max(denominator, psi);
            numerator = std::max(numerator, coeff[flat] * psi);
            for (int i = 0; i < s; ++i) {
                if (++t[i] <= khi[i] - klo[i]) break;
                t[i] = 0;
            }
        }

        if (!(denominator > 0.0) || !std::isfinite(denominator))
            throw DegenerateDenominatorError(
                "max-product denominator vanished; kernel violates the "
                "admissibility conditions");
        return numerator / denominator;
    }
};

std::optional<double> resolve_window_radius(const CoefficientGrid& grid,
                                            const ProductKernel& kernel,
                                            const EvalConfig& cfg) {
    if (cfg.window == EvalConfig::WindowMode::Exact) return std::nullopt;
    if (!(cfg.epsilon > 0.0))
        throw ContractError("windowed evaluation: epsilon must be positive");
    const SigmoidalKernel& base = kernel.base();
    if (base.support_radius()) return *base.support_radius();

    // Terms with Psi below eps * phi(2)^s / (1 + max coefficient) cannot move
    // the ratio by more than eps. Psi(y) <= phi(||y||_inf), so it is enough to
    // window at the radius where phi crosses that threshold.
    const double threshold =
        cfg.epsilon * kernel.phi2_pow_s() / (1.0 + grid.max_value());
    double lo = 2.0;
    double hi = 4.0;
    while (base.phi(hi) > threshold && hi < 1e9) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (base.phi(mid) > threshold ? lo : hi) = mid;
    }
    return std::max(hi, 2.5);
}

void check_eval_arguments(const CoefficientGrid& coeffs, const ProductKernel& kernel,
                          std::span<const double> x) {
    if (kernel.dimension() != coeffs.indices().dimension())
        throw ContractError("evaluate: kernel dimension does not match coefficients");
    if (static_cast<int>(x.size()) != coeffs.indices().dimension())
        throw ContractError("evaluate: point dimension does not match coefficients");
    if (!coeffs.domain().contains(x))
        throw ContractError("evaluate: point lies outside the operator's box");
}

}  // namespace

double max_psi_over_index_set(const IndexSet& indices, const ProductKernel& kernel,
                              std::span<const double> x) {
    if (kernel.dimension() != indices.dimension() ||
        static_cast<int>(x.size()) != indices.dimension())
        throw ContractError("max_psi_over_index_set: dimension mismatch");
    const double n = static_cast<double>(indices.n());
    double best = 0.0;
    std::vector<double> y(x.size());
    for (long long flat = 0; flat < indices.size(); ++flat) {
        const std::vector<long long> k = indices.unflatten(flat);
        for (size_t i = 0; i < y.size(); ++i)
            y[i] = n * x[i] - static_cast<double>(k[i]);
        best = std::max(best, kernel.psi(y));
    }
    return best;
}

double evaluate_point(const CoefficientGrid& coeffs, const ProductKernel& kernel,
                      std::span<const double> x, const EvalConfig& cfg) {
    check_eval_arguments(coeffs, kernel, x);
    Evaluator ev{coeffs, kernel, resolve_window_radius(coeffs, kernel, cfg)};
    return ev.ratio(x) - coeffs.shift();
}

ScalarField evaluate_grid(const CoefficientGrid& coeffs, const ProductKernel& kernel,
                          const std::vector<int>& resolution, const EvalConfig& cfg) {
    if (static_cast<int>(resolution.size()) != coeffs.indices().dimension())
        throw ContractError("evaluate_grid: resolution rank does not match coefficients");
    ScalarField field(coeffs.domain(), resolution);
    Evaluator ev{coeffs, kernel, resolve_window_radius(coeffs, kernel, cfg)};
    const double shift = coeffs.shift();
    parallel_for(field.point_count(), [&](long long flat) {
        const std::vector<double> x = field.point_at(flat);
        check_eval_arguments(coeffs, kernel, x);
        field.values[flat] = ev.ratio(x) - shift;
    });
    return field;
}

}  // namespace maxprod
