#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace aprep::theory {

/// n qubits, CX error probability p, physical CX per logical CX.
struct TheoryParams {
    std::size_t n = 2;
    double p = 0.01;
    double lph = 1.0;

    /// Throws std::domain_error unless n >= 2, 0 < p < 1, lph >= 1.
    void validate() const;
};

/// Throw std::domain_error for n < 2.
double coeff_A(std::size_t n);
double coeff_B(std::size_t n);

/// Expected noiseless distance to the target for the best circuit with l
/// physical CX: exp(-(A/2) l/lph - B/2).
double epsilon_bound(std::size_t n, double l, double lph);

/// (1-p)^l (1 - exp(-A l/lph - B)).
double total_fidelity(const TheoryParams& t, double l);

struct OptimalLength {
    std::size_t l_star = 0;
    double f_max = 0.0;
    double l_continuous = 0.0;  // stationary point of the continuous curve
    double l_closed_form = 0.0;  // (lph/A)[ln(1 - A/ln(1-p)) - B], lph missing from the log
    bool noise_too_high = false;
};

/// Integer maximizer of total_fidelity: the better neighbor of the continuous
/// maximizer, or 0 with noise_too_high when that is not positive.
OptimalLength optimal_length(const TheoryParams& t);

/// pi^d / d!
double volume_cp(std::size_t d);
/// pi^{d/2} R^d / Gamma(d/2 + 1)
double volume_ball(std::size_t d, double radius);
double log_volume_ball(std::size_t d, double radius);

/// ln eta_{n,l}(eps) with the exact factorial ratio
/// (2^n - 1)! / (2^n - n - 2l - 1)!. Throws std::domain_error unless
/// n + 2l + 1 <= 2^n and 0 < eps <= 1.
double log_volume_fraction_eta(std::size_t n, std::size_t l, double eps);
/// Same with the ratio replaced by 2^{n(n+2l)}.
double log_volume_fraction_eta_approx(std::size_t n, std::size_t l, double eps);
double volume_fraction_eta(std::size_t n, std::size_t l, double eps);
/// eps solving eta_{n,l}(eps) = 1, clamped to 1. Requires n + 2l + 1 < 2^n.
double eta_unit_radius(std::size_t n, std::size_t l);
double log_eta_unit_radius(std::size_t n, std::size_t l);

/// lph (1/ln(1/(1-p)) - n/2)
double asymptotic_optimal_length(std::size_t n, double p, double lph);
/// 1 - e^{-2/n}
double threshold_error_rate(std::size_t n);
double asymptotic_max_fidelity(std::size_t n, double p, double lph);
/// ln2 (1/f2 - 1) n / 2^n; requires 0 < f2 < 1.
double required_error_rate(std::size_t n, double f2);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Points closer to F = 1 than this are dropped before taking ln(1 - F).
inline constexpr double kExactFidelity = 1e-8;

/// Ordinary least squares of ln(1 - F) on l. Throws std::invalid_argument
/// with fewer than 3 usable points or a single distinct l.
LinearFit fit_log_infidelity(const std::vector<std::pair<double, double>>& points);

/// Slope-only fit of ln(1 - F) = -A l/lph - B over lph. Same errors as
/// fit_log_infidelity, and a non-negative fitted slope is degenerate.
double fit_lph(const std::vector<std::pair<double, double>>& points, std::size_t n);

}  // namespace aprep::theory
