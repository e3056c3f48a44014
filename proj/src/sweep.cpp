#include "rabispec/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "rabispec/errors.hpp"

namespace rabispec::sweep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string>& sweepable_names() {
    static const std::vector<std::string> names{"eps0", "omega_p", "g", "eps_d", "omega_d", "delta", "omega_r"};
    return names;
}

bool affects_kernel(const std::string& name) {
    return name == "g" || name == "eps_d" || name == "omega_d" || name == "delta" || name == "omega_r";
}

double& field(ModelParams& p, const std::string& name) {
    if (name == "eps0") return p.eps0;
    if (name == "omega_p") return p.omega_p;
    if (name == "g") return p.g;
    if (name == "eps_d") return p.eps_d;
    if (name == "omega_d") return p.omega_d;
    if (name == "delta") return p.delta;
    if (name == "omega_r") return p.omega_r;
    throw DomainError("unknown sweep parameter '" + name + "'");
}

// Largest |value| a parameter takes over the grid.
double max_abs(const ModelParams& base, const Axis& a1, const Axis& a2, const std::string& name) {
    ModelParams p = base;
    double m = std::abs(field(p, name));
    for (const Axis* a : {&a1, &a2}) {
        if (a->name == name) {
            m = std::max(std::abs(a->min), std::abs(a->value(a->points - 1)));
        }
    }
    return m;
}

} // namespace

double transmission_point(double omega_p, cdouble chi, double calibration) {
    if (!(calibration > 0.0)) {
        throw DomainError("transmission_point: calibration > 0 required");
    }
    return std::norm(1.0 + cdouble(0.0, 1.0) * calibration * omega_p * chi);
}

Calibration calibrate_normalization(const std::vector<double>& omega_p, const std::vector<cdouble>& chi) {
    if (omega_p.size() != chi.size()) {
        throw DomainError("calibrate_normalization: omega_p and chi sizes differ");
    }
    double peak = 0.0;
    for (std::size_t i = 0; i < chi.size(); ++i) {
        const double v = omega_p[i] * chi[i].imag();
        if (std::isfinite(v)) {
            peak = std::max(peak, std::abs(v));
        }
    }
    if (!(peak >= 1e-12)) {
        throw NumericalError("calibrate_normalization: flat response, max |omega_p Im chi| < 1e-12");
    }
    Calibration c;
    c.normalization = 1.0 / peak;
    c.min_t2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < chi.size(); ++i) {
        if (std::isfinite(chi[i].real()) && std::isfinite(chi[i].imag()) && std::isfinite(omega_p[i])) {
            c.min_t2 = std::min(c.min_t2, transmission_point(omega_p[i], chi[i], c.normalization));
        }
    }
    return c;
}

double Axis::value(std::size_t i) const {
    if (points <= 1) {
        return min;
    }
    if (i + 1 == points) {
        return max;
    }
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(points - 1);
}

void Axis::validate() const {
    if (points == 0) {
        throw ConfigError("axis '" + name + "' is empty (points = 0)");
    }
    if (!std::isfinite(min) || !std::isfinite(max)) {
        throw ConfigError("axis '" + name + "' has non-finite bounds");
    }
    if (points > 1 && !(max > min)) {
        throw ConfigError("axis '" + name + "' must satisfy max > min");
    }
}

SpectrumGrid run_grid(const Axis& axis1, const Axis& axis2, const RowFactory& factory,
                      unsigned workers, bool calibrate, double fixed_calibration) {
    axis1.validate();
    axis2.validate();
    SpectrumGrid grid;
    grid.axis1 = axis1;
    grid.axis2 = axis2;
    const std::size_t n1 = axis1.points;
    const std::size_t n2 = axis2.points;
    grid.chi.assign(n1 * n2, cdouble(kNaN, kNaN));
    grid.omega_p.assign(n1 * n2, kNaN);
    std::vector<std::vector<std::string>> logs(n1);

    auto describe = [&](std::size_t i1, std::size_t i2, const char* what) {
        std::ostringstream os;
        os << axis1.name << "=" << axis1.value(i1) << " " << axis2.name << "=" << axis2.value(i2)
           << ": " << what;
        return os.str();
    };

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t i1 = next++; i1 < n1; i1 = next++) {
            RowEvaluator eval;
            try {
                eval = factory(i1);
            } catch (const std::exception& e) {
                for (std::size_t i2 = 0; i2 < n2; ++i2) {
                    logs[i1].push_back(describe(i1, i2, e.what()));
                }
                continue;
            }
            for (std::size_t i2 = 0; i2 < n2; ++i2) {
                try {
                    const PointValue v = eval(i2);
                    if (!std::isfinite(v.chi.real()) || !std::isfinite(v.chi.imag())) {
                        throw NumericalError("non-finite susceptibility");
                    }
                    grid.chi[grid.index(i1, i2)] = v.chi;
                    grid.omega_p[grid.index(i1, i2)] = v.omega_p;
                } catch (const std::exception& e) {
                    logs[i1].push_back(describe(i1, i2, e.what()));
                }
            }
        }
    };

    const unsigned n_workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n1)));
    if (n_workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back(work);
        }
    }

    for (auto& row : logs) {
        grid.failures += row.size();
        for (auto& line : row) {
            grid.failure_log.push_back(std::move(line));
        }
    }
    if (grid.failures == n1 * n2) {
        throw NumericalError("run_grid: all " + std::to_string(grid.failures) +
                             " points failed; first error: " + grid.failure_log.front());
    }

    if (calibrate) {
        const Calibration c = calibrate_normalization(grid.omega_p, grid.chi);
        grid.calibration = c.normalization;
    } else {
        grid.calibration = fixed_calibration;
    }
    grid.t2.assign(n1 * n2, kNaN);
    grid.min_t2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.chi.size(); ++i) {
        if (std::isfinite(grid.omega_p[i])) {
            grid.t2[i] = transmission_point(grid.omega_p[i], grid.chi[i], grid.calibration);
            grid.min_t2 = std::min(grid.min_t2, grid.t2[i]);
        }
    }
    return grid;
}

// ---------------------------------------------------------------------------
// Spectrum evaluator

bool is_sweepable(const std::string& name) {
    const auto& n = sweepable_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

struct SpectrumEvaluator::Cache {
    std::mutex mutex;
    std::map<std::vector<double>, std::shared_ptr<const bath::CorrelationTable>> tables;
    std::map<std::vector<double>, std::shared_ptr<const niba::SusceptibilityEngine>> engines;
};

SpectrumEvaluator::SpectrumEvaluator(const ModelParams& base, const BathSpec& baths,
                                     const Axis& axis1, const Axis& axis2,
                                     const SpectrumNumerics& numerics)
    : base_(base)
    , baths_(baths)
    , axis1_(axis1)
    , axis2_(axis2)
    , numerics_(numerics)
    , cache_(std::make_shared<Cache>()) {
    axis1_.validate();
    axis2_.validate();
    for (const Axis* a : {&axis1_, &axis2_}) {
        if (!is_sweepable(a->name)) {
            throw ConfigError("axis name '" + a->name + "' is not a sweepable parameter");
        }
    }
    if (axis1_.name == axis2_.name) {
        throw ConfigError("both axes sweep '" + axis1_.name + "'");
    }
    baths_.validate();
    row_shares_kernel_ = !affects_kernel(axis2_.name);

    niba::KernelParams widest = niba::kernel_params(base_);
    widest.eps_d = max_abs(base_, axis1_, axis2_, "eps_d");
    widest.omega_d = max_abs(base_, axis1_, axis2_, "omega_d");
    widest.omega_r = max_abs(base_, axis1_, axis2_, "omega_r");
    omega_max_ = niba::grid_omega_max(max_abs(base_, axis1_, axis2_, "eps0"),
                                      max_abs(base_, axis1_, axis2_, "omega_p"), widest);
}

ModelParams SpectrumEvaluator::point_params(std::size_t i1, std::size_t i2) const {
    ModelParams p = base_;
    field(p, axis1_.name) = axis1_.value(i1);
    field(p, axis2_.name) = axis2_.value(i2);
    return p;
}

std::shared_ptr<const niba::SusceptibilityEngine> SpectrumEvaluator::engine_for(const ModelParams& p) const {
    p.validate();
    const std::vector<double> table_key{p.g, p.omega_r};
    const std::vector<double> engine_key{p.g, p.omega_r, p.eps_d, p.omega_d, p.delta};
    std::shared_ptr<const bath::CorrelationTable> table;
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        if (auto it = cache_->engines.find(engine_key); it != cache_->engines.end()) {
            return it->second;
        }
        if (auto it = cache_->tables.find(table_key); it != cache_->tables.end()) {
            table = it->second;
        }
    }
    // Build without holding the lock; if two workers race, the first insert
    // wins and both continue with identical objects.
    if (!table) {
        auto built = std::make_shared<const bath::CorrelationTable>(
            bath::tabulate_q_total(p.g, p.omega_r, baths_, numerics_.table));
        std::lock_guard<std::mutex> lock(cache_->mutex);
        table = cache_->tables.emplace(table_key, std::move(built)).first->second;
    }
    auto engine = std::make_shared<const niba::SusceptibilityEngine>(niba::kernel_params(p), *table,
                                                                     omega_max_, numerics_.kernel);
    std::lock_guard<std::mutex> lock(cache_->mutex);
    return cache_->engines.emplace(engine_key, std::move(engine)).first->second;
}

RowEvaluator SpectrumEvaluator::row(std::size_t i1) const {
    std::shared_ptr<const niba::SusceptibilityEngine> shared;
    if (row_shares_kernel_) {
        shared = engine_for(point_params(i1, 0));
    }
    struct State {
        std::shared_ptr<const niba::SusceptibilityEngine> engine;
        std::unique_ptr<niba::SusceptibilityEngine::Row> row;
    };
    auto state = std::make_shared<State>();
    return [this, i1, shared, state](std::size_t i2) -> PointValue {
        const ModelParams p = point_params(i1, i2);
        p.validate();
        auto engine = shared ? shared : engine_for(p);
        if (!state->row || state->engine != engine || state->row->eps0() != p.eps0) {
            state->engine = engine;
            state->row = std::make_unique<niba::SusceptibilityEngine::Row>(engine->row(p.eps0));
        }
        return {(*state->row)(p.omega_p, numerics_.mode).chi, p.omega_p};
    };
}

RowFactory SpectrumEvaluator::factory() const {
    return [this](std::size_t i1) { return row(i1); };
}

// ---------------------------------------------------------------------------
// CSV

std::string format_number(double v) {
    if (!std::isfinite(v)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_spectrum_csv(std::ostream& out, const SpectrumGrid& grid, const std::string& config_json,
                        const std::string& version) {
    out << "# " << version << "\n";
    out << "# config: " << config_json << "\n";
    out << "# calibration: " << format_number(grid.calibration) << "\n";
    out << "# min_T2: " << format_number(grid.min_t2) << "\n";
    out << "# failures: " << grid.failures << "\n";
    out << "# columns: " << grid.axis1.name << "," << grid.axis2.name << ",re_chi,im_chi,T2\n";
    for (std::size_t i1 = 0; i1 < grid.axis1.points; ++i1) {
        for (std::size_t i2 = 0; i2 < grid.axis2.points; ++i2) {
            const std::size_t k = grid.index(i1, i2);
            out << format_number(grid.axis1.value(i1)) << ',' << format_number(grid.axis2.value(i2)) << ','
                << format_number(grid.chi[k].real()) << ',' << format_number(grid.chi[k].imag()) << ','
                << format_number(grid.t2[k]) << '\n';
        }
    }
}

} // namespace rabispec::sweep
