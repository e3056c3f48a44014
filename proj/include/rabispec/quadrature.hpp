// quadrature.hpp: Gauss-Kronrod (7/15) panels with adaptive bisection
//
// The embedded 7-point Gauss rule supplies the local error estimate
// |K15 - G7|; sums over panels use Neumaier compensation.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <vector>

namespace rabispec::quad {

/// Kronrod abscissae on [-1, 1]; odd indices (1, 3, ..., 13) are the Gauss nodes.
inline constexpr std::array<double, 15> kKronrodNodes{
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144845693013,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

inline constexpr std::array<double, 15> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

/// Gauss weights aligned with kKronrodNodes (zero at non-Gauss nodes).
inline constexpr std::array<double, 15> kGaussWeights{
    0.0, 0.129484966168869693270611432679082, 0.0, 0.279705391489276667901467771423780,
    0.0, 0.381830050505118944950369775488975, 0.0, 0.417959183673469387755102040816327,
    0.0, 0.381830050505118944950369775488975, 0.0, 0.279705391489276667901467771423780,
    0.0, 0.129484966168869693270611432679082, 0.0};

template <typename T>
struct Result {
    T value{};
    double error{0.0};
};

/// Neumaier-compensated accumulator for double or std::complex<double>.
template <typename T>
class CompensatedSum {
public:
    void add(T x) {
        if constexpr (std::is_same_v<T, double>) {
            add_real(sum_, comp_, x);
        } else {
            double sr = sum_.real(), cr = comp_.real();
            double si = sum_.imag(), ci = comp_.imag();
            add_real(sr, cr, x.real());
            add_real(si, ci, x.imag());
            sum_ = T(sr, si);
            comp_ = T(cr, ci);
        }
    }
    T value() const { return sum_ + comp_; }

private:
    static void add_real(double& s, double& c, double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x)) {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    T sum_{};
    T comp_{};
};

/// One K15/G7 panel on [a, b].
template <typename F>
auto gk15(F&& f, double a, double b) {
    using T = std::decay_t<decltype(f(a))>;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    T k{};
    T g{};
    for (std::size_t i = 0; i < kKronrodNodes.size(); ++i) {
        const T v = f(mid + half * kKronrodNodes[i]);
        k += kKronrodWeights[i] * v;
        g += kGaussWeights[i] * v;
    }
    return Result<T>{k * half, std::abs((k - g) * half)};
}

namespace detail {

template <typename F, typename T>
void bisect(F& f, double a, double b, Result<T> whole, double tol, int depth,
            CompensatedSum<T>& sum, double& err) {
    if (whole.error <= tol || depth <= 0 || b - a < 1e-14 * (1.0 + std::abs(a))) {
        sum.add(whole.value);
        err += whole.error;
        return;
    }
    const double m = 0.5 * (a + b);
    const auto left = gk15(f, a, m);
    const auto right = gk15(f, m, b);
    bisect(f, a, m, left, 0.5 * tol, depth - 1, sum, err);
    bisect(f, m, b, right, 0.5 * tol, depth - 1, sum, err);
}

} // namespace detail

/// Adaptive integral over [a, b] split into `panels` equal panels, each
/// bisected until its error estimate is below its share of `abs_tol`.
template <typename F>
auto integrate(F&& f, double a, double b, double abs_tol, std::size_t panels = 1,
               int max_depth = 30) {
    using T = std::decay_t<decltype(f(a))>;
    CompensatedSum<T> sum;
    double err = 0.0;
    if (panels == 0) {
        panels = 1;
    }
    const double width = (b - a) / static_cast<double>(panels);
    const double panel_tol = abs_tol / static_cast<double>(panels);
    for (std::size_t i = 0; i < panels; ++i) {
        const double lo = a + width * static_cast<double>(i);
        const double hi = (i + 1 == panels) ? b : lo + width;
        detail::bisect(f, lo, hi, gk15(f, lo, hi), panel_tol, max_depth, sum, err);
    }
    return Result<T>{sum.value(), err};
}

/// Breakpoint-aware variant with a global error budget. Each interval between
/// consecutive `breaks` is cut into panels no wider than `max_panel_width`;
/// then the panel with the largest error estimate is bisected until the
/// summed estimate is below `abs_tol`. A panel is not split more than
/// `max_depth` times, nor once its error is at the rounding level of its value.
template <typename F>
auto integrate_breaks(F&& f, const std::vector<double>& breaks, double abs_tol,
                      double max_panel_width, int max_depth = 30) {
    using T = std::decay_t<decltype(f(0.0))>;
    struct Panel {
        double a;
        double b;
        Result<T> r;
        int depth;
    };
    auto by_error = [](const Panel& x, const Panel& y) { return x.r.error < y.r.error; };
    std::vector<Panel> heap;
    std::vector<Panel> done;
    double err = 0.0;
    auto place = [&](Panel p) {
        err += p.r.error;
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(p.r.value);
        if (p.depth >= max_depth || p.r.error <= floor || p.b - p.a < 1e-14 * (1.0 + std::abs(p.a))) {
            done.push_back(p);
        } else {
            heap.push_back(p);
            std::push_heap(heap.begin(), heap.end(), by_error);
        }
    };
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double lo = breaks[i];
        const double hi = breaks[i + 1];
        if (!(hi > lo)) {
            continue;
        }
        const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / max_panel_width)));
        const double width = (hi - lo) / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double a = lo + width * static_cast<double>(k);
            const double b = k + 1 == n ? hi : a + width;
            place({a, b, gk15(f, a, b), 0});
        }
    }
    while (err > abs_tol && !heap.empty()) {
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const Panel p = heap.back();
        heap.pop_back();
        err -= p.r.error;
        const double m = 0.5 * (p.a + p.b);
        place({p.a, m, gk15(f, p.a, m), p.depth + 1});
        place({m, p.b, gk15(f, m, p.b), p.depth + 1});
    }
    // Re-add the error from scratch: the running total drifts under subtraction.
    CompensatedSum<T> sum;
    Result<T> total{};
    for (const auto* list : {&heap, &done}) {
        for (const auto& p : *list) {
            sum.add(p.r.value);
            total.error += p.r.error;
        }
    }
    total.value = sum.value();
    return total;
}

} // namespace rabispec::quad
