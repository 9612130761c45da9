// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0
//
// Declarative experiments: noisy draws, regularization and tau sweeps scored
// by kernel distance, certificate scans, and their CSV/JSON artifacts.

#pragma once

#include "srlasso/operators.hpp"
#include "srlasso/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace srlasso {

struct OperatorSpec {
  std::string kind = "fourier";  // fourier | gaussian | gaussian_psf | gauss_laplace
  int fc = 3;
  double sigma = 0.07;
  int samples = 50;  // lateral samples (gaussian kinds, gauss_laplace omega)
  double sample_min = 0.0;
  double sample_max = 1.0;
  int depth_samples = 3;  // gauss_laplace depth samples
  double depth_min = 0.0;
  double depth_max = 1.0;
};

struct GridSpec {
  std::vector<int> points{10};
  std::vector<double> origin{0.0};
  std::vector<double> extent{1.0};
};

struct TruthSpec {
  std::vector<std::vector<double>> positions;  // snapped to the nearest node
  std::vector<double> amplitudes;
  std::vector<double> offset;                     // per-axis fraction of the spacing
  std::vector<std::vector<double>> offset_signs;  // per atom and axis, default +1
};

struct NoiseSpec {
  double rho_rel = 0.1;
  int draws = 10;
};

struct SweepSpec {
  int lambda_count = 20;
  std::vector<int> tau_count{20};  // per axis
  double tau_max = 1.0;
  std::vector<std::string> methods{"lasso", "srlasso"};
  std::uint64_t seed = 1;
  double gap_tol = 1e-9;
  int max_iters = 200000;
  double support_tol = 1e-6;
};

struct CertificateSpec {
  bool present = false;
  std::vector<double> taus;
  std::vector<int> grid_sizes;
  double grid_tau = 1.0;  // tau used along the grid-size sweep
};

struct ExperimentSpec {
  OperatorSpec op;
  GridSpec grid;
  TruthSpec truth;
  NoiseSpec noise;
  SweepSpec sweep;
  CertificateSpec certificate;
  std::string source;  // text the spec was parsed from

  bool has_method(const std::string& m) const;
  int dims() const { return static_cast<int>(grid.points.size()); }
};

// Parses `key = value` lines grouped in [operator] [grid] [truth] [noise]
// [sweep] [certificate] sections. Throws Error(kSpecParse) naming the line and
// field on any problem.
ExperimentSpec parse_experiment_spec(const std::string& text);
ExperimentSpec load_experiment_spec(const std::string& path);

OperatorPtr make_operator(const OperatorSpec& spec, int dims);
Grid make_grid(const GridSpec& spec);
Grid make_grid(const GridSpec& spec, int points_first_axis);
DiscreteMeasure make_truth(const TruthSpec& spec, const Grid& grid);

std::vector<double> lambda_grid(double lambda_max, int count);
// Cartesian product of per-axis uniform grids on [0, tau_max], first axis slowest.
std::vector<std::vector<double>> tau_grid(const std::vector<int>& counts, double tau_max);

struct CellRecord {
  std::string method;
  double lambda = 0.0;
  std::vector<double> tau;  // empty for methods without tau
  int draw = 0;
  double mmd = 0.0;
  int support_size = 0;
  bool converged = true;
  double seconds = 0.0;
};

struct CellSummary {
  std::string method;
  double lambda = 0.0;
  std::vector<double> tau;
  double mean = 0.0;
  double stddev = 0.0;
  double mean_support = 0.0;
  int draws = 0;
  int failed = 0;
  bool argmin = false;
};

struct CertificateRecord {
  std::string sweep;   // "tau", "grid" or "run"
  std::string method;  // "srlasso" or "cbp"
  std::vector<double> tau;
  int grid_size = 0;
  double max_offsupport = 0.0;
  bool degenerate = false;
};

struct SweepResult {
  std::vector<CellRecord> cells;  // sorted by method, lambda, tau, draw
  std::vector<CellSummary> summary;
  std::vector<CertificateRecord> certificates;
  double lambda_max = 0.0;
  std::optional<double> lambda_star;
  std::optional<std::vector<double>> tau_star;
  std::optional<double> cbp_lambda_star;
  int failed_cells = 0;

  // Mean error of the cell, if present.
  std::optional<double> mean_error(const std::string& method, double lambda,
                                   const std::vector<double>& tau = {}) const;
};

struct RunOptions {
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

SweepResult run_sweeps(const ExperimentSpec& spec, const RunOptions& opts = {});

// SR-Lasso node maxima along the tau list and, per grid size, the SR-Lasso
// maximum and the C-BP margin.
std::vector<CertificateRecord> certificate_experiment(const ExperimentSpec& spec);

// CSV renderings with 17 significant digits and LF line endings.
std::string curves_csv(const SweepResult& res, int dims);
std::string summary_csv(const SweepResult& res, int dims);
std::string certificates_csv(const std::vector<CertificateRecord>& recs, int dims);
std::string manifest_json(const ExperimentSpec& spec, const SweepResult& res,
                          const RunOptions& opts);

// Runs the sweeps and writes curves.csv, summary.csv, certificates.csv and
// manifest.json into out_dir. Returns 0, or 2 when a cell did not converge.
int run_experiment_to_dir(const ExperimentSpec& spec, const std::string& out_dir,
                          const RunOptions& opts);
int run_certificate_to_dir(const ExperimentSpec& spec, const std::string& out_dir);

std::string format_number(double v);

}  // namespace srlasso
