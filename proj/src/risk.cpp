#include "ida/risk.hpp"

#include "ida/accounting.hpp"
#include "ida/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ida {

CorrelationMatrix CorrelationMatrix::identity(std::vector<std::string> syms) {
    CorrelationMatrix m;
    m.symbols = std::move(syms);
    const size_t n = m.symbols.size();
    m.entries.assign(n * n, 0.0);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

CorrelationMatrix CorrelationMatrix::from_returns(
    std::vector<std::string> syms, const std::vector<std::vector<double>>& returns) {
    const size_t n = syms.size();
    CorrelationMatrix m = identity(std::move(syms));
    const size_t rows = returns.size();
    if (rows < 2) return m;

    std::vector<double> mean(n, 0.0), sd(n, 0.0);
    for (const auto& row : returns)
        for (size_t i = 0; i < n; ++i) mean[i] += row[i];
    for (size_t i = 0; i < n; ++i) mean[i] /= static_cast<double>(rows);
    for (const auto& row : returns)
        for (size_t i = 0; i < n; ++i) sd[i] += (row[i] - mean[i]) * (row[i] - mean[i]);
    for (size_t i = 0; i < n; ++i) sd[i] = std::sqrt(sd[i]);

    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            double cov = 0.0;
            for (const auto& row : returns) cov += (row[i] - mean[i]) * (row[j] - mean[j]);
            const double denom = sd[i] * sd[j];
            const double rho = denom > 0.0 ? std::clamp(cov / denom, -1.0, 1.0) : 0.0;
            m.at(i, j) = rho;
            m.at(j, i) = rho;
        }
    }
    return m;
}

CorrelationMatrix CorrelationMatrix::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrCode::config_error, "cannot open correlation file: " + path);
    CorrelationMatrix m;
    std::string line;
    if (!std::getline(in, line))
        raise(ErrCode::config_error, "correlation file is empty: " + path);
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t\r"));
        cell.erase(cell.find_last_not_of(" \t\r") + 1);
        if (!cell.empty()) m.symbols.push_back(cell);
    }
    const size_t n = m.symbols.size();
    if (n == 0) raise(ErrCode::config_error, "correlation file has no symbols: " + path);

    size_t row = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (row >= n) raise(ErrCode::config_error, "correlation file has too many rows: " + path);
        std::stringstream ss(line);
        size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col >= n)
                raise(ErrCode::config_error, "correlation file row too long: " + path);
            try {
                m.entries.push_back(std::stod(cell));
            } catch (const std::exception&) {
                raise(ErrCode::config_error, "correlation file has a non-numeric cell: " + cell);
            }
            ++col;
        }
        if (col != n) raise(ErrCode::config_error, "correlation file row too short: " + path);
        ++row;
    }
    if (row != n) raise(ErrCode::config_error, "correlation file is not square: " + path);
    m.validate();
    return m;
}

double CorrelationMatrix::min_eigenvalue() const {
    const size_t n = size();
    if (n == 0) return 0.0;
    std::vector<double> a = entries;
    auto at2 = [&](size_t i, size_t j) -> double& { return a[i * n + j]; };

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) off += at2(i, j) * at2(i, j);
        if (off < 1e-24) break;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                const double apq = at2(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (at2(q, q) - at2(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (size_t k = 0; k < n; ++k) {
                    const double akp = at2(k, p), akq = at2(k, q);
                    at2(k, p) = c * akp - s * akq;
                    at2(k, q) = s * akp + c * akq;
                }
                for (size_t k = 0; k < n; ++k) {
                    const double apk = at2(p, k), aqk = at2(q, k);
                    at2(p, k) = c * apk - s * aqk;
                    at2(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    double lo = at2(0, 0);
    for (size_t i = 1; i < n; ++i) lo = std::min(lo, at2(i, i));
    return lo;
}

void CorrelationMatrix::validate(double eps) const {
    const size_t n = size();
    if (entries.size() != n * n)
        raise(ErrCode::config_error, "correlation matrix shape mismatch");
    for (size_t i = 0; i < n; ++i) {
        if (std::abs(at(i, i) - 1.0) > 1e-12)
            raise(ErrCode::config_error, "correlation diagonal must be 1");
        for (size_t j = 0; j < n; ++j) {
            if (std::abs(at(i, j) - at(j, i)) > 1e-12)
                raise(ErrCode::config_error, "correlation matrix must be symmetric");
            if (at(i, j) < -1.0 - 1e-12 || at(i, j) > 1.0 + 1e-12)
                raise(ErrCode::config_error, "correlation entries must lie in [-1, 1]");
        }
    }
    if (min_eigenvalue() < -eps)
        raise(ErrCode::config_error, "correlation matrix is not positive semidefinite");
}

void CorrAdjustParams::validate() const {
    if (!(corr_gamma > 0.0)) raise(ErrCode::config_error, "corr_gamma must be positive");
    if (!(corr_phi > 0.0)) raise(ErrCode::config_error, "corr_phi must be positive");
    if (!(tan_guard > 0.0 && tan_guard < 1.0))
        raise(ErrCode::config_error, "tan_guard must be in (0, 1)");
}

void ESParams::validate() const {
    if (!(alpha_conf > 0.0 && alpha_conf < 1.0))
        raise(ErrCode::config_error, "alpha_conf must be in (0, 1)");
    if (sample_count < 100)
        raise(ErrCode::config_error, "sample_count must be >= 100 for Monte Carlo mode");
    if (horizon < 1) raise(ErrCode::config_error, "es horizon must be >= 1");
    if (!(scale_max >= 1.0)) raise(ErrCode::config_error, "scale_max must be >= 1");
    if (!(scale_es_lo >= 0.0 && scale_es_hi > scale_es_lo))
        raise(ErrCode::config_error, "regime knees must satisfy 0 <= lo < hi");
}

std::vector<double> asset_weights(const SystemState& system) {
    std::vector<double> a(system.pools.size(), 0.0);
    double total = 0.0;
    for (size_t i = 0; i < system.pools.size(); ++i) {
        const auto& p = system.pools[i];
        const double ai =
            p.density.nominal(open_inventory(p)) + p.density.nominal(p.collateral_long);
        if (ai > 0.0) {
            a[i] = ai;
            total += ai;
        }
    }
    if (!(total > 0.0)) raise(ErrCode::zero_assets, "no pool has positive attributable value");
    for (double& w : a) w /= total;
    return a;
}

double weighted_correlation(size_t asset_index, const CorrelationMatrix& corr,
                            std::span<const double> collaterals) {
    if (collaterals.size() != corr.size())
        raise(ErrCode::dimension_mismatch, "collateral vector does not match matrix");
    double num = 0.0, den = 0.0;
    for (size_t z = 0; z < collaterals.size(); ++z) {
        if (z == asset_index) continue;
        num += corr.at(asset_index, z) * collaterals[z];
        den += collaterals[z];
    }
    if (!(den > 0.0))
        raise(ErrCode::no_counterparts, "no counterpart pool has positive collateral");
    return num / den;
}

namespace {

double sign_pow(double x, double e) {
    if (x == 0.0) return 0.0;
    return (x < 0.0 ? -1.0 : 1.0) * std::pow(std::abs(x), e);
}

} // namespace

double utilization_adjustment(double rho_i, double weight, const CorrAdjustParams& p) {
    if (rho_i == 0.0) return 0.0;
    const double alpha = rho_i < 0.0 ? p.alpha_neg_g0 + p.alpha_neg_g1 * weight
                                     : p.alpha_pos_g0 + p.alpha_pos_g1 * weight;
    double arg = p.corr_beta * sign_pow(rho_i, p.corr_gamma);
    const double guard = p.tan_guard * M_PI / 2.0;
    arg = std::clamp(arg, -guard, guard);
    return alpha * sign_pow(std::tan(arg), p.corr_phi);
}

PerPoolTarget per_pool_target(double base_target, double du) {
    PerPoolTarget t;
    t.value = base_target - du;
    const double lo = 1e-6, hi = 1.0 - 1e-6;
    if (t.value < lo || t.value > hi) {
        t.value = std::clamp(t.value, lo, hi);
        t.clamped = true;
    }
    return t;
}

ESEstimate expected_shortfall(std::span<const double> losses, double alpha_conf) {
    if (losses.size() < 2) raise(ErrCode::empty_sample, "expected shortfall needs >= 2 losses");
    std::vector<double> sorted(losses.begin(), losses.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    const size_t n = sorted.size();
    size_t m = static_cast<size_t>(
        std::ceil((1.0 - alpha_conf) * static_cast<double>(n)));
    m = std::clamp<size_t>(m, 1, n);
    double sum = 0.0;
    for (size_t i = 0; i < m; ++i) sum += sorted[i];
    return ESEstimate{sum / static_cast<double>(m), sorted[m - 1]};
}

double portfolio_variance(std::span<const double> weights, std::span<const double> vols,
                          const CorrelationMatrix& corr) {
    const size_t n = weights.size();
    if (vols.size() != n || corr.size() != n)
        raise(ErrCode::dimension_mismatch, "weights, vols, and matrix sizes differ");
    double var = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            var += weights[i] * weights[j] * vols[i] * vols[j] * corr.at(i, j);
    return var;
}

double regime_scaling(double current_es_norm, const ESParams& p) {
    if (current_es_norm <= p.scale_es_lo) return 1.0;
    if (current_es_norm >= p.scale_es_hi) return p.scale_max;
    const double t = (current_es_norm - p.scale_es_lo) / (p.scale_es_hi - p.scale_es_lo);
    return 1.0 + t * (p.scale_max - 1.0);
}

} // namespace ida
