#include "qotto/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

namespace qotto::algebra {

namespace {

struct NuFunctions {
    cplx sinhc;  // sinh(nu)/nu
    cplx cosh;
};

// Both entries are even functions of nu, hence functions of nu^2 alone;
// the series branch avoids 0/0 at the removable singularity.
NuFunctions nu_functions(cplx nu2, int branch) {
    if (std::abs(nu2) < 1e-12) {
        const cplx nu4 = nu2 * nu2;
        return {1.0 + nu2 / 6.0 + nu4 / 120.0, 1.0 + nu2 / 2.0 + nu4 / 24.0};
    }
    const cplx nu = static_cast<double>(branch) * std::sqrt(nu2);
    return {std::sinh(nu) / nu, std::cosh(nu)};
}

void warn_magnitude(const ComposedParams& p, bool& warned) {
    if (warned) return;
    const double m = std::max({std::abs(p.alpha), std::abs(p.beta), std::abs(p.gamma)});
    if (m > kMagnitudeWarnThreshold) {
        std::fprintf(stderr,
                     "qotto: warning: composed exponent magnitude %.3e exceeds %.1e; "
                     "results may lose precision\n",
                     m, kMagnitudeWarnThreshold);
        warned = true;
    }
}

}  // namespace

AlgebraKind AlgebraKind::from_name(const std::string& name) {
    if (name == "su2") return su2();
    if (name == "su11" || name == "su(1,1)") return su11();
    if (name == "so21" || name == "so(2,1)") return so21();
    throw ConfigError("unknown algebra '" + name + "' (expected su2, su11 or so21)");
}

namespace detail {

cplx pow_delta(cplx z, const AlgebraKind& alg) {
    if (alg.real_delta()) return z;
    return std::exp(alg.delta() * std::log(z));
}

cplx pow_two_over_delta(cplx z, const AlgebraKind& alg) {
    if (alg.real_delta()) return z * z;
    return std::exp((2.0 / alg.delta()) * std::log(z));
}

FactoredParams factorize_branch(const ExponentParams& lam, const AlgebraKind& alg,
                                int branch, double tol) {
    const cplx d = alg.delta();
    const cplx half_dc = d * lam.c / 2.0;
    const cplx nu2 = half_dc * half_dc - d * alg.epsilon() * lam.plus * lam.minus;
    const auto [sinhc, cosh] = nu_functions(nu2, branch);

    const cplx base = cosh - half_dc * sinhc;
    const double scale =
        std::max({1.0, std::abs(cosh), std::abs(half_dc * sinhc)});
    if (std::abs(base) < tol * scale) {
        throw DegenerateFactorization(
            "factorize: Gauss-decomposition singularity (|cosh(nu) - "
            "(delta*lambda_c/2) sinh(nu)/nu| below tolerance)");
    }

    FactoredParams out;
    out.plus = lam.plus * sinhc / base;
    out.minus = lam.minus * sinhc / base;
    if (alg.real_delta()) {
        out.c = 1.0 / (base * base);
    } else {
        out.c = std::exp((-2.0 / d) * std::log(base));
    }
    return out;
}

}  // namespace detail

FactoredParams factorize(const ExponentParams& lam, const AlgebraKind& alg,
                         double tol) {
    return detail::factorize_branch(lam, alg, +1, tol);
}

ComposedParams compose_apply(const ComposedParams& acc, const FactoredParams& next,
                             const AlgebraKind& alg, double tol) {
    const cplx ed = alg.epsilon() * alg.delta();
    const cplx cross = ed * acc.alpha * next.minus;
    const cplx den = 1.0 - cross;
    if (std::abs(den) < tol * std::max(1.0, std::abs(cross))) {
        throw CompositionSingularity(
            "compose: vanishing denominator 1 - eps*delta*alpha*Lambda_-");
    }
    ComposedParams out;
    out.alpha = next.plus + acc.alpha * detail::pow_delta(next.c, alg) / den;
    out.beta = acc.beta * next.c / detail::pow_two_over_delta(den, alg);
    out.gamma = acc.gamma + next.minus * detail::pow_delta(acc.beta, alg) / den;
    return out;
}

ComposedParams compose_pair(const FactoredParams& second, const FactoredParams& first,
                            const AlgebraKind& alg, double tol) {
    return compose_apply(as_composed(first), second, alg, tol);
}

ComposedParams compose_chain(std::span<const FactoredParams> elems,
                             const AlgebraKind& alg, double tol) {
    if (elems.empty())
        throw ConfigError("compose_chain: empty element list");
    ComposedParams acc = as_composed(elems[0]);
    bool warned = false;
    for (std::size_t k = 1; k < elems.size(); ++k) {
        try {
            acc = compose_apply(acc, elems[k], alg, tol);
        } catch (const CompositionSingularity& e) {
            throw CompositionSingularity(
                std::string(e.what()) + " at element " + std::to_string(k),
                static_cast<std::ptrdiff_t>(k));
        }
        warn_magnitude(acc, warned);
    }
    return acc;
}

cplx alpha_continued_fraction(std::span<const FactoredParams> elems,
                              const AlgebraKind& alg, double tol) {
    if (elems.empty())
        throw ConfigError("alpha_continued_fraction: empty element list");
    const std::size_t n = elems.size();
    if (n == 1) return elems[0].plus;

    const cplx ed = alg.epsilon() * alg.delta();

    // Euler-Wallis convergents h_k/k_k of the continued fraction
    //   b0 + a1/(b1 + a2/(b2 + ...)),
    // whose partial terms alternate between the per-element pair
    //   (-(Lambda_c)^delta, eps*delta*Lambda_-) and the linking (-1, Lambda_+).
    cplx h_prev = 1.0, h = elems[n - 1].plus;
    cplx k_prev = 0.0, k = 1.0;
    auto advance = [&](cplx a, cplx b) {
        const cplx h_next = b * h + a * h_prev;
        const cplx k_next = b * k + a * k_prev;
        h_prev = h;
        k_prev = k;
        h = h_next;
        k = k_next;
        const double m = std::max(std::abs(h), std::abs(k));
        if (m > 1e140 || (m > 0.0 && m < 1e-140)) {
            h_prev /= m;
            k_prev /= m;
            h /= m;
            k /= m;
        }
    };
    for (std::size_t j = n - 1; j >= 1; --j) {
        advance(-detail::pow_delta(elems[j].c, alg), ed * elems[j].minus);
        advance(-1.0, elems[j - 1].plus);
    }
    if (std::abs(k) < tol * std::max(1.0, std::abs(h))) {
        throw CompositionSingularity(
            "alpha_continued_fraction: vanishing final denominator");
    }
    return h / k;
}

namespace {

ComposedParams assemble_impl(std::span<const EtaSample> etas, double step,
                             const AlgebraKind& alg,
                             std::optional<ComposedParams> acc, double tol) {
    if (etas.empty())
        throw ConfigError("assemble_stepwise: empty sample list");
    if (!(step > 0.0))
        throw ConfigError("assemble_stepwise: step must be positive");

    const cplx mi(0.0, -1.0);
    bool warned = false;

    auto push = [&](const ExponentParams& lam) {
        const FactoredParams f = factorize(lam, alg, tol);
        acc = acc ? compose_apply(*acc, f, alg, tol) : as_composed(f);
    };

    for (std::size_t j = 0; j < etas.size(); ++j) {
        const ExponentParams lam{mi * step * etas[j].plus, mi * step * etas[j].c,
                                 mi * step * etas[j].minus};
        const auto snapshot = acc;
        try {
            push(lam);
        } catch (const NumericalError&) {
            // singularities are step-local: one bisection of the offending
            // step moves the sample off the singular surface
            acc = snapshot;
            const ExponentParams half{lam.plus / 2.0, lam.c / 2.0, lam.minus / 2.0};
            try {
                push(half);
                push(half);
            } catch (const DegenerateFactorization& e) {
                throw DegenerateFactorization(std::string(e.what()) + " at step " +
                                              std::to_string(j));
            } catch (const CompositionSingularity& e) {
                throw CompositionSingularity(
                    std::string(e.what()) + " at step " + std::to_string(j),
                    static_cast<std::ptrdiff_t>(j));
            }
        }
        warn_magnitude(*acc, warned);
    }
    return *acc;
}

}  // namespace

ComposedParams assemble_stepwise(std::span<const EtaSample> etas, double step,
                                 const AlgebraKind& alg, double tol) {
    return assemble_impl(etas, step, alg, std::nullopt, tol);
}

ComposedParams assemble_stepwise(std::span<const EtaSample> etas, double step,
                                 const AlgebraKind& alg, const FactoredParams& seed,
                                 double tol) {
    return assemble_impl(etas, step, alg, as_composed(seed), tol);
}

}  // namespace qotto::algebra
