#include "nodalcert/regularity.hpp"

#include "nodalcert/errors.hpp"
#include "nodalcert/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nodalcert {

namespace {

constexpr double kScaledFloor = 1e-14;

struct TaskResult {
    double margin = std::numeric_limits<double>::infinity();
    std::int64_t boxes = 0;
    CertStatus status = CertStatus::proved;
    Box failing;
};

// log of the box side in rescaled units; X and y are measured against
// sqrt(eta), z against 1/lambda
double log_scaled_width(const FamilyParams& p, const Box& box, std::size_t i)
{
    const double w = box[i].width();
    if (w <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    const std::size_t z_slot = box.size() - 1;
    if (i == z_slot) {
        return std::log(w) + std::log(p.lambda);
    }
    return std::log(w) - 0.5 * p.log_eta;
}

TaskResult run_task(const FamilyParams& p, const Box& root, std::int64_t budget, FieldKind kind)
{
    const double log_floor = std::log(kScaledFloor);
    TaskResult res;
    std::vector<Box> stack{root};
    while (!stack.empty()) {
        Box box = std::move(stack.back());
        stack.pop_back();
        if (res.boxes >= budget) {
            res.status = CertStatus::budget_exhausted;
            return res;
        }
        ++res.boxes;
        const BoxEnclosure enc = enclose_u(p, box, kind);
        bool decided = !enc.value.contains_zero();
        double grad_mig_sq = 0.0;
        for (const auto& g : enc.gradient) {
            decided = decided || !g.contains_zero();
            grad_mig_sq += g.mig() * g.mig();
        }
        if (decided) {
            res.margin = std::min(res.margin, enc.value.mig() + std::sqrt(grad_mig_sq));
            continue;
        }
        std::size_t widest = 0;
        double widest_log = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < box.size(); ++i) {
            const double lw = log_scaled_width(p, box, i);
            if (lw > widest_log) {
                widest_log = lw;
                widest = i;
            }
        }
        if (widest_log < log_floor) {
            res.status = CertStatus::failed;
            res.failing = box;
            return res;
        }
        const double mid = box[widest].mid();
        Box left = box;
        left[widest].hi = mid;
        box[widest].lo = mid;
        // right half is pushed first so the lower half is explored first
        stack.push_back(std::move(box));
        stack.push_back(std::move(left));
    }
    return res;
}

} // namespace

const char* to_string(CertStatus s)
{
    switch (s) {
    case CertStatus::proved:
        return "proved";
    case CertStatus::failed:
        return "failed";
    case CertStatus::budget_exhausted:
        return "budget_exhausted";
    }
    return "unknown";
}

CriticalSystemReport critical_system_check(const FamilyParams& params)
{
    CriticalSystemReport r;
    r.x1_star = 2.0 / params.lambda;
    r.lhs = 4.0 / (params.lambda * params.lambda);
    r.rhs_log = params.log_eta + 2.0;
    const double log_lhs = std::log(4.0) - 2.0 * std::log(params.lambda);
    r.log_margin = std::abs(log_lhs - r.rhs_log);
    r.consistent = r.log_margin <= 1e-12 * (1.0 + std::abs(log_lhs));
    r.plus_branch_impossible = true;
    return r;
}

BoxEnclosure enclose_u(const FamilyParams& p, const Box& box, FieldKind kind)
{
    const auto ell = static_cast<std::size_t>(p.ell);
    if (box.size() != ell + 2) {
        throw ParameterError("box must have ell + 2 coordinates");
    }
    const Interval& y = box[ell];
    const Interval& z = box[ell + 1];
    const Interval lam(p.lambda);

    BoxEnclosure out;
    out.gradient.resize(ell + 2);
    Interval sum_sq(0.0);
    for (std::size_t i = 0; i < ell; ++i) {
        sum_sq = sum_sq + sqr(box[i]);
        out.gradient[i] = Interval(2.0) * box[i];
    }
    const Interval q = sum_sq - Interval(static_cast<double>(p.ell)) * sqr(y);
    out.gradient[ell] = Interval(-2.0 * p.ell) * y;
    if (kind == FieldKind::cone) {
        out.value = q;
        out.gradient[ell + 1] = Interval(0.0);
        return out;
    }
    const double le = p.log_eta;
    const double le_slack = 1e-12 * std::abs(le);
    const Interval log_eta(le - le_slack, le + le_slack);
    const Interval e = exp(lam * box[0] + log_eta);
    const Interval phase = lam * z;
    const Interval c = cos(phase);
    const Interval s = sin(phase);
    out.value = q + e * c;
    out.gradient[0] = out.gradient[0] + lam * e * c;
    out.gradient[ell + 1] = -(lam * e * s);
    return out;
}

Certificate certify_no_singular_zeros(const FamilyParams& params, double radius,
                                      std::int64_t budget, FieldKind kind)
{
    if (!(radius > 0.0 && radius < 1.0)) {
        throw ParameterError("certification radius must satisfy 0 < radius < 1");
    }
    if (budget < 1) {
        throw ParameterError("certification budget must be positive");
    }
    const std::size_t dim = static_cast<std::size_t>(params.ell) + 2;
    Certificate cert;
    {
        std::ostringstream os;
        os << "[-" << radius << ", " << radius << "]^" << dim << " in (X, y, z)";
        cert.region = os.str();
    }

    // the 2^dim orthants are independent tasks with equal budget shares
    const std::size_t tasks = std::size_t{1} << dim;
    const std::int64_t share = std::max<std::int64_t>(1, budget / static_cast<std::int64_t>(tasks));
    std::vector<TaskResult> results(tasks);
    parallel_for(tasks, 1, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            Box root(dim);
            for (std::size_t i = 0; i < dim; ++i) {
                root[i] = ((t >> i) & 1U) ? Interval(0.0, radius) : Interval(-radius, 0.0);
            }
            results[t] = run_task(params, root, share, kind);
        }
    });

    cert.status = CertStatus::proved;
    cert.margin = std::numeric_limits<double>::infinity();
    for (const auto& r : results) {
        cert.boxes_processed += r.boxes;
        cert.margin = std::min(cert.margin, r.margin);
        if (r.status == CertStatus::failed && cert.status != CertStatus::failed) {
            cert.status = CertStatus::failed;
            cert.failing_box = r.failing;
        } else if (r.status == CertStatus::budget_exhausted && cert.status == CertStatus::proved) {
            cert.status = CertStatus::budget_exhausted;
        }
    }
    if (cert.status != CertStatus::proved) {
        cert.margin = 0.0;
    }
    return cert;
}

PerturbationBounds verify_perturbation_bounds(const FamilyParams& params, int grid_side)
{
    if (grid_side < 2 || grid_side % 2 != 0) {
        throw ParameterError("grid_side must be an even integer >= 2");
    }
    PerturbationBounds b;
    const double lam = params.lambda;
    b.sup_value = std::exp(params.log_eta + lam);
    b.sup_grad = lam * b.sup_value;
    b.sup_dz = b.sup_grad;

    // |grad pert| = lambda eta e^(lambda x1) does not depend on z or on the
    // other coordinates; on the (x1, z) disk the grid contains (1, 0)
    const auto side = static_cast<std::size_t>(grid_side) + 1;
    std::vector<double> row_value(side, 0.0);
    std::vector<double> row_grad(side, 0.0);
    std::vector<std::int64_t> row_count(side, 0);
    parallel_for(side, 16, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double x1 = -1.0 + 2.0 * static_cast<double>(i) / grid_side;
            for (std::size_t j = 0; j < side; ++j) {
                const double z = -1.0 + 2.0 * static_cast<double>(j) / grid_side;
                if (x1 * x1 + z * z > 1.0) {
                    continue;
                }
                const double e = std::exp(lam * x1 + params.log_eta);
                row_value[i] = std::max(row_value[i], std::abs(e * std::cos(lam * z)));
                row_grad[i] = std::max(row_grad[i], lam * e);
                ++row_count[i];
            }
        }
    });
    for (std::size_t i = 0; i < side; ++i) {
        b.grid_sup_value = std::max(b.grid_sup_value, row_value[i]);
        b.grid_sup_grad = std::max(b.grid_sup_grad, row_grad[i]);
        b.grid_points += row_count[i];
    }
    return b;
}

} // namespace nodalcert
