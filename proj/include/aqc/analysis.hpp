#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace aqc::analysis {

enum class FitModel { PowerLaw, Linear, Quadratic, Exponential };

inline const char* fit_model_name(FitModel m) {
    switch (m) {
        case FitModel::PowerLaw: return "power_law";
        case FitModel::Linear: return "linear";
        case FitModel::Quadratic: return "quadratic";
        case FitModel::Exponential: return "exponential";
    }
    return "?";
}

struct FitResult {
    FitModel model = FitModel::Linear;
    std::vector<double> params; // PowerLaw/Exponential: {a, b}; polynomials: coefficients low->high
    double adjusted_r2 = 0.0;
    std::vector<double> residuals;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

namespace detail {

inline double adjusted_r2(const std::vector<double>& y, const std::vector<double>& residuals,
                          int n_params) {
    const double n = static_cast<double>(y.size());
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_tot += (y[i] - mean) * (y[i] - mean);
        ss_res += residuals[i] * residuals[i];
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
    const double r2 = 1.0 - ss_res / ss_tot;
    return 1.0 - (1.0 - r2) * (n - 1.0) / (n - n_params - 1.0);
}

/// OLS for y ~ sum_k beta_k * basis_k(x).
inline Eigen::VectorXd least_squares(const std::vector<Point>& pts,
                                     const std::vector<std::function<double(double)>>& basis) {
    Eigen::MatrixXd design(pts.size(), basis.size());
    Eigen::VectorXd rhs(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t k = 0; k < basis.size(); ++k) design(i, k) = basis[k](pts[i].x);
        rhs(i) = pts[i].y;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < static_cast<Eigen::Index>(basis.size())) {
        throw std::invalid_argument("fit: degenerate design matrix");
    }
    return qr.solve(rhs);
}

} // namespace detail

/// y = a x^b fitted as ordinary least squares on (ln x, ln y). Residuals and
/// the quality measure live in log space, matching a log-log plot.
inline FitResult fit_power_law(const std::vector<Point>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
    std::vector<Point> logs;
    for (const auto& p : points) {
        if (p.x <= 0.0 || p.y <= 0.0) {
            throw std::invalid_argument("fit_power_law: data must be positive");
        }
        logs.push_back({std::log(p.x), std::log(p.y)});
    }
    const Eigen::VectorXd beta = detail::least_squares(
        logs, {[](double) { return 1.0; }, [](double x) { return x; }});
    FitResult out;
    out.model = FitModel::PowerLaw;
    out.params = {std::exp(beta(0)), beta(1)};
    std::vector<double> ly;
    for (const auto& p : logs) {
        ly.push_back(p.y);
        out.residuals.push_back(p.y - (beta(0) + beta(1) * p.x));
    }
    out.adjusted_r2 = detail::adjusted_r2(ly, out.residuals, 2);
    return out;
}

/// Linear / quadratic OLS in the original space; exponential y = a e^{bx}
/// estimated on ln y, with residuals reported back in the original space so
/// the adjusted R^2 of all three models is comparable.
inline FitResult fit_model(const std::vector<Point>& points, FitModel model) {
    const int n_params = model == FitModel::Quadratic ? 3 : 2;
    if (static_cast<int>(points.size()) < n_params + 2) {
        throw std::invalid_argument("fit_model: too few points");
    }
    FitResult out;
    out.model = model;
    std::vector<double> y;
    for (const auto& p : points) y.push_back(p.y);

    if (model == FitModel::Exponential) {
        std::vector<Point> logs;
        for (const auto& p : points) {
            if (p.y <= 0.0) throw std::invalid_argument("fit_model: exponential needs y > 0");
            logs.push_back({p.x, std::log(p.y)});
        }
        const Eigen::VectorXd beta = detail::least_squares(
            logs, {[](double) { return 1.0; }, [](double x) { return x; }});
        const double a = std::exp(beta(0)), b = beta(1);
        out.params = {a, b};
        for (const auto& p : points) out.residuals.push_back(p.y - a * std::exp(b * p.x));
    } else {
        std::vector<std::function<double(double)>> basis = {[](double) { return 1.0; },
                                                            [](double x) { return x; }};
        if (model == FitModel::Quadratic) basis.push_back([](double x) { return x * x; });
        const Eigen::VectorXd beta = detail::least_squares(points, basis);
        for (int k = 0; k < n_params; ++k) out.params.push_back(beta(k));
        for (const auto& p : points) {
            double fit = 0.0;
            for (int k = 0; k < n_params; ++k) fit += beta(k) * std::pow(p.x, k);
            out.residuals.push_back(p.y - fit);
        }
    }
    out.adjusted_r2 = detail::adjusted_r2(y, out.residuals, n_params);
    return out;
}

inline double evaluate_fit(const FitResult& fit, double x) {
    switch (fit.model) {
        case FitModel::PowerLaw: return fit.params[0] * std::pow(x, fit.params[1]);
        case FitModel::Exponential: return fit.params[0] * std::exp(fit.params[1] * x);
        default: {
            double y = 0.0;
            for (std::size_t k = 0; k < fit.params.size(); ++k) y += fit.params[k] * std::pow(x, k);
            return y;
        }
    }
}

// ---------------------------------------------------------------------------

struct EnsembleStats {
    double mean_t = 0.0;
    double std_t = 0.0; // population standard deviation
    std::vector<double> best_offsets;  // smallest times, as T - mean
    std::vector<double> worst_offsets; // largest times, as T - mean
};

inline EnsembleStats ensemble_stats(std::vector<double> times, int deciles = 10) {
    if (times.empty()) throw std::invalid_argument("ensemble_stats: empty input");
    EnsembleStats out;
    for (double t : times) out.mean_t += t;
    out.mean_t /= static_cast<double>(times.size());
    double ss = 0.0;
    for (double t : times) ss += (t - out.mean_t) * (t - out.mean_t);
    out.std_t = std::sqrt(ss / static_cast<double>(times.size()));
    std::sort(times.begin(), times.end());
    const int k = std::min<int>(deciles, static_cast<int>(times.size()));
    for (int i = 0; i < k; ++i) out.best_offsets.push_back(times[i] - out.mean_t);
    for (int i = 0; i < k; ++i) out.worst_offsets.push_back(times[times.size() - k + i] - out.mean_t);
    return out;
}

// ---------------------------------------------------------------------------

/// One per-trajectory summary for the error-budget consistency check: the
/// measured final infidelity is compared with eps/(4 dt^2), where eps is the
/// mean accepted per-step error of a QFI-measure run.
struct Eq4Input {
    double dt = 0.0;
    double eps_max = 0.0;
    double mean_accepted_eps = 0.0;
    double measured_infidelity = 0.0;
};

struct Eq4Row {
    double dt = 0.0;
    double eps_max = 0.0;
    double measured_infidelity = 0.0;
    double predicted_infidelity = 0.0;
    double ratio = 0.0;
    bool exact = false;      // measured infidelity is zero; ratio undefined
    bool flagged = false;    // ratio outside [1/3, 3]
};

inline std::vector<Eq4Row> eq4_consistency(const std::vector<Eq4Input>& inputs) {
    std::vector<Eq4Row> rows;
    for (const auto& in : inputs) {
        Eq4Row row;
        row.dt = in.dt;
        row.eps_max = in.eps_max;
        row.measured_infidelity = in.measured_infidelity;
        row.predicted_infidelity = in.mean_accepted_eps / (4.0 * in.dt * in.dt);
        if (in.measured_infidelity == 0.0) {
            row.exact = true;
        } else {
            row.ratio = row.predicted_infidelity / in.measured_infidelity;
            row.flagged = row.ratio < 1.0 / 3.0 || row.ratio > 3.0;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace aqc::analysis
