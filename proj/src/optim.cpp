#include "rmwg/optim.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>
#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_roots.h>

#include <cmath>
#include <exception>
#include <memory>

#include "rmwg/error.hpp"

namespace rmwg::optim {

namespace {

// GSL's default handler aborts the process; errors are reported through
// return codes instead.
struct DisableGslAbort {
    DisableGslAbort() { gsl_set_error_handler_off(); }
};
const DisableGslAbort disable_gsl_abort;

// Exceptions must not unwind through GSL's C frames: callbacks park them
// here and the wrapper rethrows once GSL has returned.
struct MultiCtx {
    const std::function<double(const std::vector<double>&)>* f;
    std::vector<double> buf;
    std::exception_ptr error;
};

double multi_trampoline(const gsl_vector* v, void* params) {
    auto* ctx = static_cast<MultiCtx*>(params);
    if (ctx->error) return GSL_POSINF;
    for (std::size_t i = 0; i < ctx->buf.size(); ++i) ctx->buf[i] = gsl_vector_get(v, i);
    try {
        const double y = (*ctx->f)(ctx->buf);
        return std::isfinite(y) ? y : GSL_POSINF;
    } catch (...) {
        ctx->error = std::current_exception();
        return GSL_POSINF;
    }
}

struct ScalarCtx {
    const std::function<double(double)>* f;
    std::exception_ptr error;
};

double scalar_trampoline(double x, void* params) {
    auto* ctx = static_cast<ScalarCtx*>(params);
    if (ctx->error) return GSL_NAN;
    try {
        return (*ctx->f)(x);
    } catch (...) {
        ctx->error = std::current_exception();
        return GSL_NAN;
    }
}

struct LsqCtx {
    const ResidualFn* residuals;
    const JacobianFn* jacobian;
    std::vector<double> x, r, J;
    std::size_t m = 0;
    std::exception_ptr error;
};

void load_x(LsqCtx& c, const gsl_vector* x) {
    for (std::size_t i = 0; i < c.x.size(); ++i) c.x[i] = gsl_vector_get(x, i);
}

int lsq_f(const gsl_vector* x, void* params, gsl_vector* f) {
    auto& c = *static_cast<LsqCtx*>(params);
    if (c.error) return GSL_EBADFUNC;
    try {
        load_x(c, x);
        (*c.residuals)(c.x, c.r);
        for (std::size_t i = 0; i < c.m; ++i) gsl_vector_set(f, i, c.r[i]);
        return GSL_SUCCESS;
    } catch (...) {
        c.error = std::current_exception();
        return GSL_EBADFUNC;
    }
}

int lsq_df(const gsl_vector* x, void* params, gsl_matrix* J) {
    auto& c = *static_cast<LsqCtx*>(params);
    if (c.error) return GSL_EBADFUNC;
    try {
        load_x(c, x);
        (*c.jacobian)(c.x, c.J);
        const std::size_t n = c.x.size();
        for (std::size_t i = 0; i < c.m; ++i)
            for (std::size_t j = 0; j < n; ++j) gsl_matrix_set(J, i, j, c.J[i * n + j]);
        return GSL_SUCCESS;
    } catch (...) {
        c.error = std::current_exception();
        return GSL_EBADFUNC;
    }
}

template <class T, void (*Free)(T*)>
struct GslDeleter {
    void operator()(T* p) const { Free(p); }
};

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          const std::vector<double>& step, double size_tol, int max_iterations) {
    const std::size_t n = x0.size();
    require(n > 0 && step.size() == n, ErrorCode::invalid_input, "simplex dimension mismatch");
    MultiCtx ctx{&f, std::vector<double>(n), nullptr};
    gsl_multimin_function fn{&multi_trampoline, n, &ctx};

    std::unique_ptr<gsl_vector, GslDeleter<gsl_vector, gsl_vector_free>> x(gsl_vector_alloc(n));
    std::unique_ptr<gsl_vector, GslDeleter<gsl_vector, gsl_vector_free>> ss(gsl_vector_alloc(n));
    for (std::size_t i = 0; i < n; ++i) {
        gsl_vector_set(x.get(), i, x0[i]);
        gsl_vector_set(ss.get(), i, step[i]);
    }
    std::unique_ptr<gsl_multimin_fminimizer, GslDeleter<gsl_multimin_fminimizer, gsl_multimin_fminimizer_free>> s(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
    gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), ss.get());

    SimplexResult res;
    int status = GSL_CONTINUE;
    for (res.iterations = 0; res.iterations < max_iterations && status == GSL_CONTINUE; ++res.iterations) {
        if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), size_tol);
    }
    if (ctx.error) std::rethrow_exception(ctx.error);
    res.converged = status == GSL_SUCCESS;
    res.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.x[i] = gsl_vector_get(s->x, i);
    res.value = s->fval;
    return res;
}

double brent_root(const std::function<double(double)>& f, double lo, double hi, double rel_tol, int max_iterations) {
    ScalarCtx ctx{&f, nullptr};
    gsl_function fn{&scalar_trampoline, &ctx};
    std::unique_ptr<gsl_root_fsolver, GslDeleter<gsl_root_fsolver, gsl_root_fsolver_free>> s(
        gsl_root_fsolver_alloc(gsl_root_fsolver_brent));
    const int set = gsl_root_fsolver_set(s.get(), &fn, lo, hi);
    if (ctx.error) std::rethrow_exception(ctx.error);
    if (set != GSL_SUCCESS) fail(ErrorCode::numerical, "root is not bracketed by the supplied interval");
    int status = GSL_CONTINUE;
    for (int it = 0; it < max_iterations && status == GSL_CONTINUE; ++it) {
        const int step = gsl_root_fsolver_iterate(s.get());
        if (ctx.error) std::rethrow_exception(ctx.error);
        if (step != GSL_SUCCESS) fail(ErrorCode::numerical, "root iteration failed");
        status = gsl_root_test_interval(gsl_root_fsolver_x_lower(s.get()), gsl_root_fsolver_x_upper(s.get()), 0.0,
                                        rel_tol);
    }
    if (status != GSL_SUCCESS) fail(ErrorCode::numerical, "root solve did not converge");
    return gsl_root_fsolver_root(s.get());
}

double brent_minimize(const std::function<double(double)>& f, double lo, double guess, double hi, double abs_tol,
                      int max_iterations) {
    ScalarCtx ctx{&f, nullptr};
    gsl_function fn{&scalar_trampoline, &ctx};
    std::unique_ptr<gsl_min_fminimizer, GslDeleter<gsl_min_fminimizer, gsl_min_fminimizer_free>> s(
        gsl_min_fminimizer_alloc(gsl_min_fminimizer_brent));
    const int set = gsl_min_fminimizer_set(s.get(), &fn, guess, lo, hi);
    if (ctx.error) std::rethrow_exception(ctx.error);
    if (set != GSL_SUCCESS) fail(ErrorCode::numerical, "minimum is not bracketed by the supplied interval");
    int status = GSL_CONTINUE;
    for (int it = 0; it < max_iterations && status == GSL_CONTINUE; ++it) {
        const int step = gsl_min_fminimizer_iterate(s.get());
        if (ctx.error) std::rethrow_exception(ctx.error);
        if (step != GSL_SUCCESS) break;
        status = gsl_min_test_interval(gsl_min_fminimizer_x_lower(s.get()), gsl_min_fminimizer_x_upper(s.get()),
                                       abs_tol, 0.0);
    }
    return gsl_min_fminimizer_x_minimum(s.get());
}

LeastSquaresResult levenberg_marquardt(const ResidualFn& residuals, const JacobianFn& jacobian, std::vector<double> x0,
                                       std::size_t m, double xtol, int max_iterations) {
    const std::size_t n = x0.size();
    require(n > 0 && m >= 1, ErrorCode::invalid_input, "least squares needs parameters and residuals");
    LsqCtx ctx{&residuals, &jacobian, std::vector<double>(n), std::vector<double>(m), std::vector<double>(m * n), m,
               nullptr};
    gsl_multifit_nlinear_fdf fdf{};
    fdf.f = &lsq_f;
    fdf.df = &lsq_df;
    fdf.fvv = nullptr;
    fdf.n = m;
    fdf.p = n;
    fdf.params = &ctx;
    gsl_multifit_nlinear_parameters params = gsl_multifit_nlinear_default_parameters();
    params.trs = gsl_multifit_nlinear_trs_lm;
    std::unique_ptr<gsl_multifit_nlinear_workspace,
                    GslDeleter<gsl_multifit_nlinear_workspace, gsl_multifit_nlinear_free>>
        w(gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &params, m, n));
    gsl_vector_view xv = gsl_vector_view_array(x0.data(), n);
    const int init = gsl_multifit_nlinear_init(&xv.vector, &fdf, w.get());
    if (ctx.error) std::rethrow_exception(ctx.error);
    if (init != GSL_SUCCESS) fail(ErrorCode::numerical, "least-squares initialization failed");
    int info = 0;
    const int status = gsl_multifit_nlinear_driver(static_cast<std::size_t>(max_iterations), xtol, 1e-12, 0.0,
                                                   nullptr, nullptr, &info, w.get());
    if (ctx.error) std::rethrow_exception(ctx.error);
    LeastSquaresResult res;
    res.x.resize(n);
    const gsl_vector* x = gsl_multifit_nlinear_position(w.get());
    for (std::size_t i = 0; i < n; ++i) res.x[i] = gsl_vector_get(x, i);
    const gsl_vector* f = gsl_multifit_nlinear_residual(w.get());
    double cost = 0.0;
    for (std::size_t i = 0; i < m; ++i) cost += gsl_vector_get(f, i) * gsl_vector_get(f, i);
    res.cost = cost;
    res.iterations = static_cast<int>(gsl_multifit_nlinear_niter(w.get()));
    res.converged = status == GSL_SUCCESS;
    return res;
}

}  // namespace rmwg::optim
