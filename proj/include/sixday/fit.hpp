#pragma once

// Small dense Levenberg-Marquardt engine for the 2-3 parameter curve fits
// used by the descriptive module. Jacobians are central differences; the
// damped normal equations use Marquardt diagonal scaling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sixday/errors.hpp"

namespace sixday::fit {

class NoConvergence : public Error {
  public:
    NoConvergence(int iterations, double last_sse)
        : Error(describe(iterations, last_sse)), iterations_(iterations), last_sse_(last_sse) {}

    [[nodiscard]] int iterations() const { return iterations_; }
    [[nodiscard]] double last_sse() const { return last_sse_; }

  private:
    static std::string describe(int iterations, double last_sse) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "no convergence after %d iterations, sse=%.6g",
                      iterations, last_sse);
        return buf;
    }

    int iterations_;
    double last_sse_;
};

struct LmOptions {
    double lambda0 = 1e-3;
    double lambda_factor = 10.0;  // multiply on reject, divide on accept
    double lambda_max = 1e13;     // past this the step is numerically gradient descent at zero length
    double rel_sse_tol = 1e-10;
    int max_iterations = 200;
};

struct FitResult {
    std::vector<double> params;
    std::vector<double> stderrs;  // from s^2 * (J^T J)^-1 at the optimum
    double sse = 0.0;
    int iterations = 0;
};

namespace detail {

// Gaussian elimination with partial pivoting; a and b are consumed.
inline bool solve_dense(std::vector<double> a, std::vector<double> b, std::size_t n,
                        std::vector<double>& out) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t row = col + 1; row < n; ++row) {
            if (std::fabs(a[row * n + col]) > std::fabs(a[piv * n + col])) piv = row;
        }
        if (std::fabs(a[piv * n + col]) < 1e-300) return false;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (std::size_t row = col + 1; row < n; ++row) {
            const double f = a[row * n + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[row * n + c] -= f * a[col * n + c];
            b[row] -= f * b[col];
        }
    }
    out.assign(n, 0.0);
    for (std::size_t row = n; row-- > 0;) {
        double s = b[row];
        for (std::size_t c = row + 1; c < n; ++c) s -= a[row * n + c] * out[c];
        out[row] = s / a[row * n + row];
    }
    return true;
}

// Gauss-Jordan inverse; returns false on a singular matrix.
inline bool invert_dense(std::vector<double> a, std::size_t n, std::vector<double>& inv) {
    inv.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t row = col + 1; row < n; ++row) {
            if (std::fabs(a[row * n + col]) > std::fabs(a[piv * n + col])) piv = row;
        }
        if (std::fabs(a[piv * n + col]) < 1e-300) return false;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a[col * n + c], a[piv * n + c]);
                std::swap(inv[col * n + c], inv[piv * n + c]);
            }
        }
        const double scale = 1.0 / a[col * n + col];
        for (std::size_t c = 0; c < n; ++c) {
            a[col * n + c] *= scale;
            inv[col * n + c] *= scale;
        }
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col) continue;
            const double f = a[row * n + col];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a[row * n + c] -= f * a[col * n + c];
                inv[row * n + c] -= f * inv[col * n + c];
            }
        }
    }
    return true;
}

}  // namespace detail

// Minimizes sum_i (ys[i] - model(params, xs[i]))^2. model must be callable as
// model(std::span<const double> params, double x) -> double.
template <typename Model>
FitResult levenberg_marquardt(Model&& model, std::span<const double> xs,
                              std::span<const double> ys, std::vector<double> params,
                              const LmOptions& opt = {}) {
    const std::size_t m = xs.size();
    const std::size_t p = params.size();
    if (m != ys.size()) throw Error("fit data size mismatch");
    if (m == 0 || p == 0) throw Error("empty fit problem");

    auto sse_of = [&](const std::vector<double>& q) {
        double s = 0.0;
        const std::span<const double> qs(q);
        for (std::size_t i = 0; i < m; ++i) {
            const double r = ys[i] - model(qs, xs[i]);
            s += r * r;
        }
        return s;
    };

    std::vector<double> jac(m * p);
    std::vector<double> qp(p);
    auto fill_jacobian = [&](const std::vector<double>& q) {
        qp = q;
        for (std::size_t j = 0; j < p; ++j) {
            const double h = 1e-6 * std::max(std::fabs(q[j]), 1e-6);
            qp[j] = q[j] + h;
            for (std::size_t i = 0; i < m; ++i) {
                jac[i * p + j] = model(std::span<const double>(qp), xs[i]);
            }
            qp[j] = q[j] - h;
            for (std::size_t i = 0; i < m; ++i) {
                jac[i * p + j] = (jac[i * p + j] - model(std::span<const double>(qp), xs[i])) /
                                 (2.0 * h);
            }
            qp[j] = q[j];
        }
    };

    std::vector<double> jtj(p * p), jtr(p), damped(p * p), step, trial;
    double lambda = opt.lambda0;
    double sse = sse_of(params);
    int iter = 0;
    bool converged = false;
    while (iter < opt.max_iterations) {
        ++iter;
        fill_jacobian(params);
        std::fill(jtj.begin(), jtj.end(), 0.0);
        std::fill(jtr.begin(), jtr.end(), 0.0);
        const std::span<const double> qs(params);
        for (std::size_t i = 0; i < m; ++i) {
            const double r = ys[i] - model(qs, xs[i]);
            for (std::size_t j = 0; j < p; ++j) {
                jtr[j] += jac[i * p + j] * r;
                for (std::size_t k = j; k < p; ++k) {
                    jtj[j * p + k] += jac[i * p + j] * jac[i * p + k];
                }
            }
        }
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t k = 0; k < j; ++k) jtj[j * p + k] = jtj[k * p + j];
        }

        damped = jtj;
        for (std::size_t j = 0; j < p; ++j) {
            const double d = std::max(jtj[j * p + j], 1e-12);
            damped[j * p + j] += lambda * d;
        }
        if (!detail::solve_dense(damped, jtr, p, step)) {
            lambda *= opt.lambda_factor;
            if (lambda > opt.lambda_max) {
                converged = true;
                break;
            }
            continue;
        }
        trial = params;
        for (std::size_t j = 0; j < p; ++j) trial[j] += step[j];
        const double trial_sse = sse_of(trial);
        if (std::isfinite(trial_sse) && trial_sse <= sse) {
            const double rel = (sse - trial_sse) / std::max(sse, 1e-300);
            params = std::move(trial);
            sse = trial_sse;
            lambda /= opt.lambda_factor;
            if (rel < opt.rel_sse_tol) {
                converged = true;
                break;
            }
        } else {
            lambda *= opt.lambda_factor;
            if (lambda > opt.lambda_max) {
                converged = true;
                break;
            }
        }
    }
    if (!converged) throw NoConvergence(iter, sse);

    FitResult out;
    out.sse = sse;
    out.iterations = iter;
    out.stderrs.assign(p, 0.0);
    fill_jacobian(params);
    std::fill(jtj.begin(), jtj.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t k = j; k < p; ++k) {
                jtj[j * p + k] += jac[i * p + j] * jac[i * p + k];
            }
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < j; ++k) jtj[j * p + k] = jtj[k * p + j];
    }
    std::vector<double> cov;
    if (detail::invert_dense(jtj, p, cov)) {
        const double s2 = m > p ? sse / static_cast<double>(m - p) : 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            out.stderrs[j] = std::sqrt(std::max(0.0, s2 * cov[j * p + j]));
        }
    } else {
        throw NoConvergence(iter, sse);
    }
    out.params = std::move(params);
    return out;
}

}  // namespace sixday::fit
