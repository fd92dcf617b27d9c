#include "aprep/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace aprep::theory {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void require_n(std::size_t n, const char* who) {
    if (n < 2) {
        throw std::domain_error(std::string(who) + ": n must be >= 2");
    }
    if (n > 1000) {
        throw std::domain_error(std::string(who) + ": n too large");
    }
}

double denominator(std::size_t n) {
    const double nd = static_cast<double>(n);
    return std::exp2(nd) - nd - 1.0;
}

double log_pairs(std::size_t n) {
    const double nd = static_cast<double>(n);
    return std::log(nd * (nd - 1.0) / 2.0);
}

// Exponent 2(2^n - n - 2l - 1) of eps in eta; throws if negative.
double eps_exponent(std::size_t n, std::size_t l, const char* who) {
    require_n(n, who);
    if (n > 60) {
        throw std::domain_error(std::string(who) + ": n too large");
    }
    const double free = std::exp2(static_cast<double>(n)) - static_cast<double>(n) - 2.0 * static_cast<double>(l) - 1.0;
    if (free < 0.0) {
        throw std::domain_error(std::string(who) + ": n + 2l + 1 exceeds 2^n");
    }
    return 2.0 * free;
}

void require_eps(double eps, const char* who) {
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw std::domain_error(std::string(who) + ": eps must be in (0, 1]");
    }
}

}  // namespace

void TheoryParams::validate() const {
    if (n < 2) {
        throw std::domain_error("TheoryParams: n must be >= 2");
    }
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("TheoryParams: p must be in (0, 1)");
    }
    if (!(lph >= 1.0) || !std::isfinite(lph)) {
        throw std::domain_error("TheoryParams: lph must be >= 1");
    }
}

double coeff_A(std::size_t n) {
    require_n(n, "coeff_A");
    return (2.0 * kLn2 * static_cast<double>(n) + log_pairs(n)) / denominator(n);
}

double coeff_B(std::size_t n) {
    require_n(n, "coeff_B");
    const double nd = static_cast<double>(n);
    return kLn2 * nd * nd / denominator(n);
}

double epsilon_bound(std::size_t n, double l, double lph) {
    return std::exp(-0.5 * coeff_A(n) * l / lph - 0.5 * coeff_B(n));
}

double total_fidelity(const TheoryParams& t, double l) {
    t.validate();
    const double noiseless = -std::expm1(-coeff_A(t.n) * l / t.lph - coeff_B(t.n));
    return std::exp(l * std::log1p(-t.p)) * noiseless;
}

OptimalLength optimal_length(const TheoryParams& t) {
    t.validate();
    const double a = coeff_A(t.n);
    const double b = coeff_B(t.n);
    const double log_keep = std::log1p(-t.p);

    OptimalLength out;
    out.l_continuous = t.lph / a * (std::log1p(-a / (t.lph * log_keep)) - b);
    out.l_closed_form = t.lph / a * (std::log1p(-a / log_keep) - b);
    if (!(out.l_continuous > 0.0)) {
        out.noise_too_high = true;
        out.l_star = 0;
        out.f_max = total_fidelity(t, 0.0);
        return out;
    }
    const double lo = std::floor(out.l_continuous);
    const double f_lo = total_fidelity(t, lo);
    const double f_hi = total_fidelity(t, lo + 1.0);
    out.l_star = static_cast<std::size_t>(f_hi > f_lo ? lo + 1.0 : lo);
    out.f_max = std::max(f_lo, f_hi);
    return out;
}

double volume_cp(std::size_t d) {
    const double dd = static_cast<double>(d);
    return std::exp(dd * std::log(std::numbers::pi) - std::lgamma(dd + 1.0));
}

double log_volume_ball(std::size_t d, double radius) {
    if (!(radius >= 0.0)) {
        throw std::domain_error("volume_ball: radius must be non-negative");
    }
    const double dd = static_cast<double>(d);
    if (d == 0) {
        return 0.0;
    }
    return 0.5 * dd * std::log(std::numbers::pi) + dd * std::log(radius) - std::lgamma(0.5 * dd + 1.0);
}

double volume_ball(std::size_t d, double radius) { return std::exp(log_volume_ball(d, radius)); }

double log_volume_fraction_eta(std::size_t n, std::size_t l, double eps) {
    const double k = eps_exponent(n, l, "volume_fraction_eta");
    require_eps(eps, "volume_fraction_eta");
    const double dim = std::exp2(static_cast<double>(n));
    const double ratio = std::lgamma(dim) - std::lgamma(0.5 * k + 1.0);
    return ratio + k * std::log(eps) + static_cast<double>(l) * log_pairs(n);
}

double log_volume_fraction_eta_approx(std::size_t n, std::size_t l, double eps) {
    const double k = eps_exponent(n, l, "volume_fraction_eta");
    require_eps(eps, "volume_fraction_eta");
    const double nd = static_cast<double>(n);
    return nd * (nd + 2.0 * static_cast<double>(l)) * kLn2 + k * std::log(eps) + static_cast<double>(l) * log_pairs(n);
}

double volume_fraction_eta(std::size_t n, std::size_t l, double eps) {
    return std::exp(log_volume_fraction_eta(n, l, eps));
}

double log_eta_unit_radius(std::size_t n, std::size_t l) {
    const double k = eps_exponent(n, l, "eta_unit_radius");
    if (k == 0.0) {
        throw std::domain_error("eta_unit_radius: eta does not depend on eps");
    }
    // ln eta is linear in ln eps, so the root is explicit.
    return std::min(0.0, -log_volume_fraction_eta(n, l, 1.0) / k);
}

double eta_unit_radius(std::size_t n, std::size_t l) { return std::exp(log_eta_unit_radius(n, l)); }

double asymptotic_optimal_length(std::size_t n, double p, double lph) {
    TheoryParams{n, p, lph}.validate();
    return lph * (-1.0 / std::log1p(-p) - 0.5 * static_cast<double>(n));
}

double threshold_error_rate(std::size_t n) {
    require_n(n, "threshold_error_rate");
    return -std::expm1(-2.0 / static_cast<double>(n));
}

double asymptotic_max_fidelity(std::size_t n, double p, double lph) {
    TheoryParams{n, p, lph}.validate();
    const double nd = static_cast<double>(n);
    const double noise = std::exp((1.0 / p - 0.5 * nd) * lph * std::log1p(-p));
    return noise / (1.0 - std::exp2(nd) * std::log1p(-p) / (2.0 * kLn2 * nd));
}

double required_error_rate(std::size_t n, double f2) {
    require_n(n, "required_error_rate");
    if (!(f2 > 0.0 && f2 < 1.0)) {
        throw std::domain_error("required_error_rate: f2 must be in (0, 1)");
    }
    const double nd = static_cast<double>(n);
    return kLn2 * (1.0 / f2 - 1.0) * nd / std::exp2(nd);
}

namespace {

std::vector<std::pair<double, double>> usable(const std::vector<std::pair<double, double>>& points, const char* who) {
    std::vector<std::pair<double, double>> out;
    for (const auto& [l, f] : points) {
        if (!std::isfinite(l) || !std::isfinite(f) || f < 0.0) {
            throw std::invalid_argument(std::string(who) + ": non-finite or negative point");
        }
        if (f < 1.0 - kExactFidelity) {
            out.emplace_back(l, std::log1p(-f));
        }
    }
    if (out.size() < 3) {
        throw std::invalid_argument(std::string(who) + ": fewer than 3 points with F < 1");
    }
    for (const auto& pt : out) {
        if (pt.first != out.front().first) {
            return out;
        }
    }
    throw std::invalid_argument(std::string(who) + ": all points share one length");
}

}  // namespace

LinearFit fit_log_infidelity(const std::vector<std::pair<double, double>>& points) {
    const auto pts = usable(points, "fit_log_infidelity");
    const double count = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= count;
    my /= count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    LinearFit fit;
    fit.points = pts.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return fit;
}

double fit_lph(const std::vector<std::pair<double, double>>& points, std::size_t n) {
    const auto pts = usable(points, "fit_lph");
    const double a = coeff_A(n);
    const double b = coeff_B(n);
    double num = 0.0, den = 0.0;
    for (const auto& [l, y] : pts) {
        num += l * (y + b);
        den += l * l;
    }
    // Model y + B = -(A / lph) l; minimize over s = 1 / lph.
    const double s = -num / (a * den);
    if (!(s > 0.0)) {
        throw std::invalid_argument("fit_lph: infidelity does not decrease with length");
    }
    return 1.0 / s;
}

}  // namespace aprep::theory
