// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0

#include "srlasso/srlasso.h"

#include "srlasso/experiments.hpp"
#include "srlasso/metrics.hpp"
#include "srlasso/operators.hpp"
#include "srlasso/sr_lasso.hpp"

#include <exception>
#include <new>
#include <string>

struct srl_operator {
  srlasso::OperatorPtr op;
};

struct srl_design {
  srlasso::SrDesign design;
};

struct srl_solution {
  const srl_design* owner;
  srlasso::SolveResult result;
};

namespace {

thread_local std::string last_error;

srl_status fail(srl_status code, const std::string& what) {
  last_error = what;
  return code;
}

template <typename Fn>
srl_status guarded(Fn fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const srlasso::Error& e) {
    return fail(static_cast<srl_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SRL_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SRL_INTERNAL, e.what());
  } catch (...) {
    return fail(SRL_INTERNAL, "unknown failure");
  }
}

srl_status null_argument() { return fail(SRL_INVALID_PARAM, "null argument"); }

std::vector<double> copy(const double* p, size_t n) { return std::vector<double>(p, p + n); }

srlasso::DiscreteMeasure measure_from(int dims, const double* pos, const double* amp, size_t n) {
  std::vector<srlasso::Atom> atoms;
  for (size_t i = 0; i < n; ++i) {
    srlasso::Vec x(dims);
    for (int k = 0; k < dims; ++k) x[k] = pos[i * dims + k];
    atoms.push_back({x, amp[i]});
  }
  return srlasso::DiscreteMeasure(dims, atoms);
}

srl_status wrap_operator(srlasso::OperatorPtr op, srl_operator** out) {
  *out = new srl_operator{std::move(op)};
  return SRL_OK;
}

}  // namespace

extern "C" {

const char* srl_version(void) { return SRLASSO_VERSION; }

const char* srl_last_error(void) { return last_error.c_str(); }

const char* srl_status_name(srl_status status) {
  if (status == SRL_OK) return "ok";
  if (status == SRL_INTERNAL) return "internal";
  return srlasso::error_code_name(static_cast<srlasso::ErrorCode>(static_cast<int>(status)));
}

srl_status srl_operator_fourier(int fc, srl_operator** out) {
  if (!out) return null_argument();
  return guarded([&] { return wrap_operator(srlasso::fourier_lowpass_1d(fc), out); });
}

srl_status srl_operator_gaussian(double sigma, const double* samples, size_t n_samples,
                                 int point_spread, srl_operator** out) {
  if (!out || !samples) return null_argument();
  return guarded([&] {
    const auto width = point_spread ? srlasso::GaussianWidth::kPointSpread
                                    : srlasso::GaussianWidth::kFeature;
    return wrap_operator(srlasso::gaussian_sampling_1d(sigma, copy(samples, n_samples), width), out);
  });
}

srl_status srl_operator_gauss_laplace(double sigma, const double* lateral, size_t n_lateral,
                                      const double* depth, size_t n_depth, srl_operator** out) {
  if (!out || !lateral || !depth) return null_argument();
  return guarded([&] {
    return wrap_operator(
        srlasso::gauss_laplace_separable(sigma, copy(lateral, n_lateral), copy(depth, n_depth)), out);
  });
}

void srl_operator_free(srl_operator* op) { delete op; }

int srl_operator_dims(const srl_operator* op) { return op ? op->op->dims() : 0; }

int srl_operator_measurement_dim(const srl_operator* op) {
  return op ? op->op->measurement_dim() : 0;
}

srl_status srl_operator_feature(const srl_operator* op, const double* x, double* out) {
  if (!op || !x || !out) return null_argument();
  return guarded([&] {
    const int d = op->op->dims();
    const srlasso::Vec f = op->op->feature(srlasso::Vec(Eigen::Map<const srlasso::Vec>(x, d)));
    std::copy(f.data(), f.data() + f.size(), out);
    return SRL_OK;
  });
}

srl_status srl_operator_forward(const srl_operator* op, const double* positions,
                                const double* amplitudes, size_t n, double* out) {
  if (!op || !out || (n > 0 && (!positions || !amplitudes))) return null_argument();
  return guarded([&] {
    const srlasso::Vec y =
        srlasso::forward(*op->op, measure_from(op->op->dims(), positions, amplitudes, n));
    std::copy(y.data(), y.data() + y.size(), out);
    return SRL_OK;
  });
}

srl_status srl_design_build(const srl_operator* op, const int* points, const double* origin,
                            const double* extent, const double* tau, srl_design** out) {
  if (!op || !points || !origin || !extent || !tau || !out) return null_argument();
  return guarded([&] {
    const int d = op->op->dims();
    const srlasso::Grid grid(std::vector<int>(points, points + d), copy(origin, d), copy(extent, d));
    *out = new srl_design{srlasso::build_sr_design(op->op, grid, copy(tau, d))};
    return SRL_OK;
  });
}

void srl_design_free(srl_design* design) { delete design; }

int srl_design_num_groups(const srl_design* design) {
  return design ? design->design.matrix.n_groups() : 0;
}

int srl_design_group_size(const srl_design* design) {
  return design ? design->design.matrix.group_size() : 0;
}

srl_status srl_design_solve(const srl_design* design, const double* y, double lambda,
                            int max_iters, double gap_tol, srl_solution** out) {
  if (!design || !y || !out) return null_argument();
  *out = nullptr;
  return guarded([&] {
    srlasso::SolverConfig cfg;
    cfg.lambda = lambda;
    cfg.max_iters = max_iters;
    cfg.gap_tol = gap_tol;
    cfg.validate();
    const srlasso::Vec data =
        Eigen::Map<const srlasso::Vec>(y, design->design.matrix.rows());
    try {
      *out = new srl_solution{design, srlasso::solve_sr_lasso(design->design, data, cfg)};
      return SRL_OK;
    } catch (const srlasso::NotConverged& e) {
      *out = new srl_solution{design, e.best()};
      return fail(SRL_NOT_CONVERGED, e.what());
    }
  });
}

void srl_solution_free(srl_solution* sol) { delete sol; }

int srl_solution_iterations(const srl_solution* sol) { return sol ? sol->result.iterations : 0; }

double srl_solution_gap(const srl_solution* sol) { return sol ? sol->result.final_gap : 0.0; }

srl_status srl_solution_coefficients(const srl_solution* sol, double* out, size_t n) {
  if (!sol || !out) return null_argument();
  const srlasso::Vec& z = sol->result.z.data();
  if (n != static_cast<size_t>(z.size())) return fail(SRL_DIM_MISMATCH, "buffer size mismatch");
  std::copy(z.data(), z.data() + z.size(), out);
  return SRL_OK;
}

srl_status srl_solution_measure(const srl_solution* sol, double support_tol, double* positions,
                                double* amplitudes, size_t* count) {
  if (!sol || !count) return null_argument();
  return guarded([&] {
    const srlasso::DiscreteMeasure mu =
        srlasso::recover_measure(sol->owner->design, sol->result.z, support_tol).measure;
    if (!positions && !amplitudes) {
      *count = mu.size();
      return SRL_OK;
    }
    if (!positions || !amplitudes) return null_argument();
    if (*count < mu.size()) return fail(SRL_DIM_MISMATCH, "buffer too small");
    const int d = mu.dims();
    for (size_t i = 0; i < mu.size(); ++i) {
      for (int k = 0; k < d; ++k) positions[i * d + k] = mu.atom(i).position[k];
      amplitudes[i] = mu.atom(i).amplitude;
    }
    *count = mu.size();
    return SRL_OK;
  });
}

srl_status srl_mmd(int dims, const double* pos_a, const double* amp_a, size_t n_a,
                   const double* pos_b, const double* amp_b, size_t n_b, double* out) {
  if (!out || (n_a > 0 && (!pos_a || !amp_a)) || (n_b > 0 && (!pos_b || !amp_b))) {
    return null_argument();
  }
  return guarded([&] {
    *out = srlasso::mmd_distance(measure_from(dims, pos_a, amp_a, n_a),
                                 measure_from(dims, pos_b, amp_b, n_b));
    return SRL_OK;
  });
}

srl_status srl_experiment_run(const char* spec_path, const char* out_dir, int threads,
                              int use_seed, uint64_t seed, int* exit_code) {
  if (!spec_path || !out_dir || !exit_code) return null_argument();
  return guarded([&] {
    const srlasso::ExperimentSpec spec = srlasso::load_experiment_spec(spec_path);
    srlasso::RunOptions opts;
    opts.threads = threads;
    if (use_seed) opts.seed = seed;
    *exit_code = srlasso::run_experiment_to_dir(spec, out_dir, opts);
    return SRL_OK;
  });
}

srl_status srl_certificate_run(const char* spec_path, const char* out_dir) {
  if (!spec_path || !out_dir) return null_argument();
  return guarded([&] {
    const srlasso::ExperimentSpec spec = srlasso::load_experiment_spec(spec_path);
    srlasso::run_certificate_to_dir(spec, out_dir);
    return SRL_OK;
  });
}

}  // extern "C"
