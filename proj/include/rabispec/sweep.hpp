// sweep.hpp: Transmission, calibration and deterministic parallel parameter grids

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "rabispec/bath.hpp"
#include "rabispec/niba.hpp"
#include "rabispec/params.hpp"

namespace rabispec::sweep {

using cdouble = std::complex<double>;

/// |1 + i N w chi|^2.
double transmission_point(double omega_p, cdouble chi, double calibration);

struct Calibration {
    double normalization{0.0};
    double min_t2{0.0};
};

/// N = 1 / max |w Im chi| over all finite points; also reports the resulting
/// minimum of |T|^2. Throws NumericalError for a flat response (max < 1e-12).
Calibration calibrate_normalization(const std::vector<double>& omega_p,
                                    const std::vector<cdouble>& chi);

/// Uniformly spaced named axis. A single point sits at `min`.
struct Axis {
    std::string name;
    double min{0.0};
    double max{0.0};
    std::size_t points{1};

    double value(std::size_t i) const;
    void validate() const;
};

/// Value of one grid point as produced by an evaluator.
struct PointValue {
    cdouble chi{};
    double omega_p{0.0};
};

/// Evaluates the points of one axis1 row; may throw per point.
using RowEvaluator = std::function<PointValue(std::size_t i2)>;
/// Builds the evaluator for row i1; may throw, which fails the whole row.
using RowFactory = std::function<RowEvaluator(std::size_t i1)>;

struct SpectrumGrid {
    Axis axis1;
    Axis axis2;
    std::vector<cdouble> chi;     // row-major, axis2 fastest
    std::vector<double> omega_p;
    std::vector<double> t2;
    double calibration{0.0};
    double min_t2{0.0};
    std::size_t failures{0};
    std::vector<std::string> failure_log;

    std::size_t index(std::size_t i1, std::size_t i2) const { return i1 * axis2.points + i2; }
};

/// Evaluates every grid point with `workers` threads handing out rows in
/// order. Output is written by index, so it does not depend on the worker
/// count. Failed points become NaN and are logged. Calibration is applied
/// when `calibrate` is set; otherwise t2 uses `fixed_calibration`.
/// Throws NumericalError when every point fails.
SpectrumGrid run_grid(const Axis& axis1, const Axis& axis2, const RowFactory& factory,
                      unsigned workers, bool calibrate = true, double fixed_calibration = 1.0);

/// Numerical settings shared by spectrum runs.
struct SpectrumNumerics {
    niba::Mode mode{niba::Mode::full};
    niba::SusceptibilityEngine::KernelPath kernel{niba::SusceptibilityEngine::KernelPath::driven};
    bath::TableOptions table{};
};

/// Parameter names an axis may sweep.
bool is_sweepable(const std::string& name);

/// Builds row evaluators for chi over two named parameter axes. Correlation
/// tables are cached by bath parameters, susceptibility engines by kernel
/// parameters, so rows that share them reuse the work. Thread-safe.
class SpectrumEvaluator {
public:
    SpectrumEvaluator(const ModelParams& base, const BathSpec& baths, const Axis& axis1,
                      const Axis& axis2, const SpectrumNumerics& numerics);

    RowEvaluator row(std::size_t i1) const;
    RowFactory factory() const;

    /// Highest integrand frequency over the grid; fixes the quadrature panels.
    double omega_max() const { return omega_max_; }

private:
    struct Cache;

    ModelParams point_params(std::size_t i1, std::size_t i2) const;
    std::shared_ptr<const niba::SusceptibilityEngine> engine_for(const ModelParams& p) const;

    ModelParams base_;
    BathSpec baths_;
    Axis axis1_;
    Axis axis2_;
    SpectrumNumerics numerics_;
    double omega_max_{0.0};
    bool row_shares_kernel_{true};
    std::shared_ptr<Cache> cache_;
};

/// Writes '#' header lines (version, config JSON, calibration, min |T|^2,
/// failure count, column names) followed by one row per grid point.
void write_spectrum_csv(std::ostream& out, const SpectrumGrid& grid, const std::string& config_json,
                        const std::string& version);

/// %.17g, or "nan" for non-finite values.
std::string format_number(double v);

} // namespace rabispec::sweep
