#include "model.hpp"

#include "error.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace bm {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::kBaseline: return "baseline";
        case Variant::kLinearValue: return "linear_value";
        case Variant::kExAnte: return "ex_ante";
        case Variant::kMultiAgent: return "multi_agent";
    }
    return "baseline";
}

Variant parse_variant(const std::string& name) {
    if (name == "baseline") return Variant::kBaseline;
    if (name == "linear_value" || name == "linear-value") return Variant::kLinearValue;
    if (name == "ex_ante" || name == "ex-ante") return Variant::kExAnte;
    if (name == "multi_agent" || name == "multi-agent") return Variant::kMultiAgent;
    fail(ErrorCode::kConfig, "unknown variant '" + name + "'");
}

void validate_problem(const ProblemSpec& spec) {
    if (!(spec.budget > 0.0) || !std::isfinite(spec.budget))
        fail(ErrorCode::kInvalidArgument, "budget must be positive and finite");
    if (!(spec.resource_value >= 0.0)) fail(ErrorCode::kInvalidArgument, "resource value k must be >= 0");
    if (spec.agents < 1) fail(ErrorCode::kInvalidArgument, "number of agents must be >= 1");
    if (!spec.cost.psi) fail(ErrorCode::kInvalidArgument, "cost model is empty");
    if (!(spec.dist.lo < spec.dist.hi)) fail(ErrorCode::kInvalidArgument, "type support must have positive length");
}

// ---------------------------------------------------------------------------
// Cost families

namespace {

double ipow(double x, double p) {
    if (p == 0.0) return 1.0;
    if (x == 0.0) return p > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::pow(x, p);
}

CostModel from_gamma(std::string family, CostModel::Separable sep) {
    CostModel c;
    c.family = std::move(family);
    auto g = sep.gamma;
    auto g1 = sep.gamma_prime;
    auto g2 = sep.gamma_second;
    c.psi = [g](double x, double th) { return th * g(x); };
    c.psi_x = [g1](double x, double th) { return th * g1(x); };
    c.psi_theta = [g](double x, double) { return g(x); };
    c.psi_x_theta = [g1](double x, double) { return g1(x); };
    c.psi_xx = [g2](double x, double th) { return th * g2(x); };
    c.separable = std::move(sep);
    return c;
}

}  // namespace

CostModel power_cost(double scale, double exponent) {
    if (!(scale > 0.0)) fail(ErrorCode::kConfig, "power cost: scale must be positive");
    if (!(exponent >= 1.0)) fail(ErrorCode::kConfig, "power cost: exponent must be >= 1");
    const double c = scale;
    const double p = exponent;
    CostModel::Separable sep;
    sep.gamma = [c, p](double x) { return c * ipow(x, p); };
    sep.gamma_prime = [c, p](double x) { return c * p * ipow(x, p - 1.0); };
    sep.gamma_second = [c, p](double x) { return p == 1.0 ? 0.0 : c * p * (p - 1.0) * ipow(x, p - 2.0); };
    sep.gamma_prime_inverse = [c, p](double y) {
        if (p == 1.0) return 0.0;
        if (y <= 0.0) return 0.0;
        return std::pow(y / (c * p), 1.0 / (p - 1.0));
    };
    sep.strictly_convex = p > 1.0;
    return from_gamma("power", std::move(sep));
}

CostModel quadratic_plus_linear_cost(double a, double b) {
    if (!(a > 0.0) || !(b >= 0.0))
        fail(ErrorCode::kConfig, "quadratic_plus_linear cost: need a > 0 and b >= 0");
    CostModel::Separable sep;
    sep.gamma = [a, b](double x) { return a * x * x + b * x; };
    sep.gamma_prime = [a, b](double x) { return 2.0 * a * x + b; };
    sep.gamma_second = [a](double) { return 2.0 * a; };
    sep.gamma_prime_inverse = [a, b](double y) { return std::max(0.0, (y - b) / (2.0 * a)); };
    return from_gamma("quadratic_plus_linear", std::move(sep));
}

CostModel table_cost(std::vector<double> knots, std::vector<double> marginal) {
    if (knots.size() < 2 || knots.size() != marginal.size())
        fail(ErrorCode::kConfig, "custom-table cost: need >= 2 knots with matching marginal values");
    if (knots.front() != 0.0) fail(ErrorCode::kConfig, "custom-table cost: first knot must be x = 0");
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i] > knots[i - 1])) fail(ErrorCode::kConfig, "custom-table cost: knots must increase");
        if (!(marginal[i] > marginal[i - 1]))
            fail(ErrorCode::kConfig, "custom-table cost: marginal cost must strictly increase");
    }
    if (!(marginal.front() >= 0.0)) fail(ErrorCode::kConfig, "custom-table cost: marginal cost must be >= 0");

    // Cumulative integral of the piecewise-linear marginal cost at each knot.
    std::vector<double> area(knots.size(), 0.0);
    for (std::size_t i = 1; i < knots.size(); ++i)
        area[i] = area[i - 1] + 0.5 * (marginal[i] + marginal[i - 1]) * (knots[i] - knots[i - 1]);

    struct Table {
        std::vector<double> xs, ms, area;
        std::size_t segment(double x) const {
            auto it = std::upper_bound(xs.begin(), xs.end(), x);
            std::size_t j = static_cast<std::size_t>(it - xs.begin());
            if (j == 0) j = 1;
            if (j >= xs.size()) j = xs.size() - 1;
            return j - 1;
        }
        double slope(std::size_t s) const { return (ms[s + 1] - ms[s]) / (xs[s + 1] - xs[s]); }
        double marginal(double x) const {
            const std::size_t s = segment(x);
            return ms[s] + slope(s) * (x - xs[s]);
        }
        double value(double x) const {
            const std::size_t s = segment(x);
            const double dx = x - xs[s];
            return area[s] + ms[s] * dx + 0.5 * slope(s) * dx * dx;
        }
        double curvature(double x) const { return slope(segment(x)); }
        double inverse(double y) const {
            if (y <= ms.front()) return 0.0;
            auto it = std::upper_bound(ms.begin(), ms.end(), y);
            std::size_t j = static_cast<std::size_t>(it - ms.begin());
            if (j >= ms.size()) j = ms.size() - 1;
            const std::size_t s = j - 1;
            return xs[s] + (y - ms[s]) / slope(s);
        }
    };
    auto table = std::make_shared<Table>(Table{std::move(knots), std::move(marginal), std::move(area)});

    CostModel::Separable sep;
    sep.gamma = [table](double x) { return table->value(x); };
    sep.gamma_prime = [table](double x) { return table->marginal(x); };
    sep.gamma_second = [table](double x) { return table->curvature(x); };
    sep.gamma_prime_inverse = [table](double y) { return table->inverse(y); };
    return from_gamma("custom-table", std::move(sep));
}

CostModel power_sum_cost(double a, double p, double b, double q) {
    if (!(a >= 0.0 && b >= 0.0 && a + b > 0.0)) fail(ErrorCode::kConfig, "power_sum cost: need a, b >= 0, a + b > 0");
    if (!(p >= 1.0 && q >= 1.0)) fail(ErrorCode::kConfig, "power_sum cost: exponents must be >= 1");
    CostModel c;
    c.family = "power_sum";
    c.psi = [=](double x, double th) { return a * th * ipow(x, p) + b * th * th * ipow(x, q); };
    c.psi_x = [=](double x, double th) {
        return a * th * p * ipow(x, p - 1.0) + b * th * th * q * ipow(x, q - 1.0);
    };
    c.psi_theta = [=](double x, double th) { return a * ipow(x, p) + 2.0 * b * th * ipow(x, q); };
    c.psi_x_theta = [=](double x, double th) { return a * p * ipow(x, p - 1.0) + 2.0 * b * th * q * ipow(x, q - 1.0); };
    c.psi_xx = [=](double x, double th) {
        const double ta = p == 1.0 ? 0.0 : a * th * p * (p - 1.0) * ipow(x, p - 2.0);
        const double tb = q == 1.0 ? 0.0 : b * th * th * q * (q - 1.0) * ipow(x, q - 2.0);
        return ta + tb;
    };
    if (b == 0.0) {
        CostModel sep = power_cost(a, p);
        c.separable = sep.separable;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Distributions

TypeDistribution uniform_distribution(double a, double b) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        fail(ErrorCode::kConfig, "uniform distribution: need finite a < b");
    TypeDistribution d;
    d.kind = "uniform";
    d.lo = a;
    d.hi = b;
    const double w = b - a;
    d.pdf = [a, b, w](double t) { return (t < a || t > b) ? 0.0 : 1.0 / w; };
    d.cdf = [a, b, w](double t) { return t <= a ? 0.0 : (t >= b ? 1.0 : (t - a) / w); };
    return d;
}

TypeDistribution linear_density_distribution(double a, double b, double slope) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        fail(ErrorCode::kConfig, "linear-density distribution: need finite a < b");
    const double w = b - a;
    const double mid = 0.5 * (a + b);
    const double base = 1.0 / w;
    // A density may touch zero at an endpoint but must stay positive inside.
    const double f_lo = base + slope * (a - mid);
    const double f_hi = base + slope * (b - mid);
    const double tol = 1e-12 * base;
    if (f_lo < -tol || f_hi < -tol || (f_lo <= tol && f_hi <= tol))
        fail(ErrorCode::kConfig, "linear-density distribution: density must be nonnegative on the support");
    TypeDistribution d;
    d.kind = "linear-density";
    d.lo = a;
    d.hi = b;
    d.pdf = [=](double t) { return (t < a || t > b) ? 0.0 : std::max(0.0, base + slope * (t - mid)); };
    d.cdf = [=](double t) {
        if (t <= a) return 0.0;
        if (t >= b) return 1.0;
        const double v = (t - a) * base + 0.5 * slope * ((t - mid) * (t - mid) - (a - mid) * (a - mid));
        return std::clamp(v, 0.0, 1.0);
    };
    return d;
}

TypeDistribution truncated_power_distribution(double a, double b, double alpha) {
    if (!(a < b) || !(a >= 0.0) || !std::isfinite(b))
        fail(ErrorCode::kConfig, "truncated-power distribution: need 0 <= a < b");
    if (a == 0.0 && alpha <= -1.0)
        fail(ErrorCode::kConfig, "truncated-power distribution: density not integrable at 0");
    TypeDistribution d;
    d.kind = "truncated-power";
    d.lo = a;
    d.hi = b;
    const bool log_case = std::abs(alpha + 1.0) < 1e-14;
    auto prim = [alpha, log_case](double t) {
        return log_case ? std::log(t) : std::pow(t, alpha + 1.0) / (alpha + 1.0);
    };
    const double z = prim(b) - prim(a);
    if (!(z > 0.0) || !std::isfinite(z)) fail(ErrorCode::kConfig, "truncated-power distribution: bad normalizer");
    d.pdf = [=](double t) { return (t < a || t > b) ? 0.0 : std::pow(t, alpha) / z; };
    d.cdf = [=](double t) {
        if (t <= a) return 0.0;
        if (t >= b) return 1.0;
        return std::clamp((prim(t) - prim(a)) / z, 0.0, 1.0);
    };
    return d;
}

TypeDistribution discrete_distribution(std::vector<double> types, std::vector<double> probs) {
    if (types.empty() || types.size() != probs.size())
        fail(ErrorCode::kConfig, "discrete distribution: types and probs must be nonempty and equal length");
    double total = 0.0;
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (i > 0 && !(types[i] > types[i - 1])) fail(ErrorCode::kConfig, "discrete distribution: types must increase");
        if (!(probs[i] > 0.0)) fail(ErrorCode::kConfig, "discrete distribution: probabilities must be positive");
        total += probs[i];
    }
    if (std::abs(total - 1.0) > 1e-9) fail(ErrorCode::kConfig, "discrete distribution: probabilities must sum to 1");
    TypeDistribution d;
    d.kind = "discrete";
    d.lo = types.front();
    d.hi = types.back();
    auto ts = types;
    auto ps = probs;
    d.pdf = [](double) { return 0.0; };
    d.cdf = [ts, ps](double t) {
        double s = 0.0;
        for (std::size_t i = 0; i < ts.size() && ts[i] <= t; ++i) s += ps[i];
        return std::min(1.0, s);
    };
    d.atoms = DiscreteTypes{std::move(types), std::move(probs)};
    return d;
}

TypeDistribution order_statistic_distribution(const TypeDistribution& dist, int agents) {
    if (agents < 1) fail(ErrorCode::kInvalidArgument, "order statistic: number of agents must be >= 1");
    if (agents == 1) return dist;
    if (dist.is_discrete()) fail(ErrorCode::kInvalidArgument, "order statistic: continuous distribution required");
    TypeDistribution d = dist;
    d.kind = dist.kind + "-min-of-" + std::to_string(agents);
    const auto F = dist.cdf;
    const auto f = dist.pdf;
    const double n = agents;
    d.cdf = [F, n](double t) { return 1.0 - std::pow(1.0 - F(t), n); };
    d.pdf = [F, f, n](double t) { return n * std::pow(1.0 - F(t), n - 1.0) * f(t); };
    return d;
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::ok() const {
    return std::all_of(clauses.begin(), clauses.end(),
                       [](const ClauseResult& c) { return c.passed || !c.enforced; });
}

const ClauseResult* ValidationReport::find(const std::string& name) const {
    for (const auto& c : clauses)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

struct Tracker {
    ClauseResult r;
    bool first = true;

    Tracker(std::string name, bool enforced) {
        r.name = std::move(name);
        r.enforced = enforced;
    }
    // Keeps the sample with the smallest value; fails when it drops below `floor`.
    void keep_min(double v, double x, double th, double floor, bool strict) {
        if (first || v < r.worst_value) {
            r.worst_value = v;
            r.worst_x = x;
            r.worst_theta = th;
            first = false;
        }
        if (strict ? !(v > floor) : !(v >= floor)) r.passed = false;
    }
    void keep_max(double v, double x, double th, double ceiling) {
        if (first || v > r.worst_value) {
            r.worst_value = v;
            r.worst_x = x;
            r.worst_theta = th;
            first = false;
        }
        if (!(v <= ceiling)) r.passed = false;
    }
};

// Smallest relative mismatch between `analytic` and central/forward/backward
// differences of g at z. The one-sided forms tolerate kinks at table knots.
double fd_mismatch(const std::function<double(double)>& g, double z, double analytic) {
    const double h = 1e-5 * std::max(1.0, std::abs(z));
    const double g0 = g(z);
    const double gp = g(z + h);
    const double gm = g(z - h);
    const double central = (gp - gm) / (2.0 * h);
    const double forward = (gp - g0) / h;
    const double backward = (g0 - gm) / h;
    const double denom = std::max({std::abs(analytic), std::abs(central), 1e-6});
    const double e = std::min({std::abs(central - analytic), std::abs(forward - analytic),
                               std::abs(backward - analytic)});
    return e / denom;
}

}  // namespace

ValidationReport validate_cost_model(const CostModel& cost, const TypeDistribution& dist, int samples,
                                     double x_max) {
    if (samples < 16) fail(ErrorCode::kInvalidArgument, "validate_cost_model: need at least 16 samples");
    if (!(x_max > 0.0)) fail(ErrorCode::kInvalidArgument, "validate_cost_model: action range must be positive");
    const double lo = dist.lo;
    const double hi = dist.hi;

    for (int j = 0; j < samples; ++j) {
        const double th = lo + (hi - lo) * j / (samples - 1);
        const double v = cost.psi(0.0, th);
        if (std::abs(v) > 1e-12) {
            std::ostringstream os;
            os << "cost normalization violated: psi(0, " << th << ") = " << v;
            fail(ErrorCode::kInvalidArgument, os.str());
        }
    }

    Tracker inc_x("increasing_in_action", true);
    Tracker inc_th("increasing_in_type", true);
    Tracker supermod("supermodular", true);
    Tracker convex("convex_in_action", true);
    Tracker strict("strictly_convex", false);
    Tracker conv_up("convexity_increasing_in_type", true);
    Tracker rent_convex("type_marginal_convex_in_action", true);
    Tracker deriv("derivatives_consistent", true);
    Tracker cross3("psi_theta_theta_x", false);

    const double dx = x_max / samples;
    for (int i = 1; i <= samples; ++i) {
        const double x = dx * i;
        for (int j = 0; j < samples; ++j) {
            const double th = lo + (hi - lo) * j / (samples - 1);
            const double scale = std::max(1.0, std::abs(cost.psi(x, th)));
            const double tol = 1e-10 * scale;
            inc_x.keep_min(cost.psi_x(x, th), x, th, 0.0, true);
            inc_th.keep_min(cost.psi_theta(x, th), x, th, 0.0, true);
            supermod.keep_min(cost.psi_x_theta(x, th), x, th, 0.0, true);
            const double cxx = cost.psi_xx(x, th);
            convex.keep_min(cxx, x, th, -tol, false);
            strict.keep_min(cxx, x, th, 0.0, true);
            if (j + 1 < samples) {
                const double th2 = lo + (hi - lo) * (j + 1) / (samples - 1);
                conv_up.keep_min(cost.psi_xx(x, th2) - cxx, x, th, -tol, false);
            }
            if (i < samples) {
                const double second = cost.psi_theta(x + dx, th) - 2.0 * cost.psi_theta(x, th) +
                                      cost.psi_theta(x - dx, th);
                rent_convex.keep_min(second, x, th, -tol, false);
            }

            double err = fd_mismatch([&](double z) { return cost.psi(z, th); }, x, cost.psi_x(x, th));
            err = std::max(err, fd_mismatch([&](double z) { return cost.psi(x, z); }, th, cost.psi_theta(x, th)));
            err = std::max(err, fd_mismatch([&](double z) { return cost.psi_x(x, z); }, th,
                                            cost.psi_x_theta(x, th)));
            err = std::max(err, fd_mismatch([&](double z) { return cost.psi_x(z, th); }, x, cxx));
            deriv.keep_max(err, x, th, 1e-5);

            const double h = 1e-5 * std::max(1.0, std::abs(th));
            const double c3 = (cost.psi_x_theta(x, th + h) - cost.psi_x_theta(x, th - h)) / (2.0 * h);
            cross3.keep_min(c3, x, th, 0.0, false);
        }
    }

    ValidationReport rep;
    for (auto* t : {&inc_x, &inc_th, &supermod, &convex, &strict, &conv_up, &rent_convex, &deriv, &cross3})
        rep.clauses.push_back(t->r);
    return rep;
}

DistributionReport validate_distribution(const TypeDistribution& dist, int samples) {
    DistributionReport rep;
    if (dist.is_discrete()) {
        rep.total_mass = 0.0;
        for (double p : dist.atoms->probs) rep.total_mass += p;
        rep.cdf_lo = 0.0;
        rep.cdf_hi = dist.cdf(dist.hi);
        rep.ok = std::abs(rep.total_mass - 1.0) <= 1e-9;
        return rep;
    }
    rep.total_mass = numeric::integrate(dist.pdf, dist.lo, dist.hi);
    rep.cdf_lo = dist.cdf(dist.lo);
    rep.cdf_hi = dist.cdf(dist.hi);
    double prev = rep.cdf_lo;
    const double w = dist.hi - dist.lo;
    for (int j = 1; j < samples; ++j) {
        const double th = dist.lo + w * j / (samples - 1);
        const double v = dist.cdf(th);
        if (v < prev - 1e-15) rep.monotone = false;
        prev = v;
        if (j + 1 < samples) {
            const double h = 1e-6 * w;
            const double fd = (dist.cdf(th + h) - dist.cdf(th - h)) / (2.0 * h);
            rep.max_density_mismatch = std::max(rep.max_density_mismatch, std::abs(fd - dist.pdf(th)));
        }
    }
    rep.ok = std::abs(rep.total_mass - 1.0) <= 1e-8 && std::abs(rep.cdf_lo) <= 1e-9 &&
             std::abs(rep.cdf_hi - 1.0) <= 1e-9 && rep.monotone && rep.max_density_mismatch <= 1e-4;
    return rep;
}

}  // namespace bm
