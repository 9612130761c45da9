// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0

#include "srlasso/experiments.hpp"

#include "srlasso/cbp.hpp"
#include "srlasso/certificates.hpp"
#include "srlasso/metrics.hpp"
#include "srlasso/noise.hpp"
#include "srlasso/sr_lasso.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace srlasso {

namespace {

// Runs fn(0..n-1) on up to `threads` workers. The exception of the lowest
// failing index is rethrown so failures do not depend on scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int extra = std::max(0, std::min(threads, n) - 1);
  std::vector<std::thread> pool;
  pool.reserve(extra);
  for (int t = 0; t < extra; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SolverConfig solver_config(const SweepSpec& s, double lambda) {
  SolverConfig cfg;
  cfg.lambda = lambda;
  cfg.max_iters = s.max_iters;
  cfg.gap_tol = s.gap_tol;
  cfg.support_tol = s.support_tol;
  cfg.validate();
  return cfg;
}

// Fills the record from a solve that may not have converged.
template <typename Solve, typename ToMeasure>
void score_cell(CellRecord& rec, const DiscreteMeasure& mu0, Solve solve, ToMeasure to_measure) {
  const auto start = std::chrono::steady_clock::now();
  try {
    const DiscreteMeasure mu = to_measure(solve());
    rec.mmd = mmd_distance(mu, mu0);
    rec.support_size = static_cast<int>(mu.size());
  } catch (const NotConverged&) {
    rec.converged = false;
    rec.mmd = std::nan("");
    rec.support_size = 0;
  }
  rec.seconds = seconds_since(start);
}

std::vector<CellSummary> summarize(const std::vector<CellRecord>& cells, int draws) {
  std::vector<CellSummary> out;
  for (std::size_t i = 0; i < cells.size(); i += draws) {
    CellSummary s;
    s.method = cells[i].method;
    s.lambda = cells[i].lambda;
    s.tau = cells[i].tau;
    std::vector<double> errs;
    double support = 0.0;
    for (int k = 0; k < draws; ++k) {
      const CellRecord& c = cells[i + k];
      if (!c.converged) {
        ++s.failed;
        continue;
      }
      errs.push_back(c.mmd);
      support += c.support_size;
    }
    s.draws = draws;
    if (!errs.empty()) {
      double sum = 0.0;
      for (double e : errs) sum += e;
      s.mean = sum / errs.size();
      s.mean_support = support / errs.size();
      if (errs.size() > 1) {
        double ss = 0.0;
        for (double e : errs) ss += (e - s.mean) * (e - s.mean);
        s.stddev = std::sqrt(ss / (errs.size() - 1));
      }
    } else {
      s.mean = s.stddev = s.mean_support = std::nan("");
    }
    out.push_back(s);
  }
  return out;
}

// Index of the smallest mean among cells without failures; first wins ties.
std::optional<std::size_t> argmin(const std::vector<CellSummary>& cells) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].failed > 0) continue;
    if (!best || cells[i].mean < cells[*best].mean) best = i;
  }
  return best;
}

std::vector<CertificateRecord> sr_tau_records(const OperatorPtr& op, const Grid& grid,
                                              const DiscreteMeasure& mu0,
                                              const std::vector<std::vector<double>>& taus,
                                              const std::string& sweep) {
  std::vector<CertificateRecord> out;
  for (const std::vector<double>& tau : taus) {
    CertificateRecord rec;
    rec.sweep = sweep;
    rec.method = "srlasso";
    rec.tau = tau;
    rec.grid_size = grid.points(0);
    const SrDesign design = build_sr_design(op, grid, tau);
    const DualCertificate cert = sr_precertificate(design, mu0);
    rec.max_offsupport = max_offsupport_node_f0(design, cert);
    rec.degenerate = rec.max_offsupport >= 1.0;
    out.push_back(rec);
  }
  return out;
}

CertificateRecord cbp_record(const OperatorPtr& op, const Grid& grid, const DiscreteMeasure& mu0,
                             const std::string& sweep) {
  std::set<int> nodes;
  for (const Atom& a : mu0.atoms()) nodes.insert(grid.nearest_node(a.position));
  std::vector<double> support;
  for (int j : nodes) support.push_back(grid.node(0, j));
  const IchReport rep = CbpCertificate(op, support).ic_h(grid);
  CertificateRecord rec;
  rec.sweep = sweep;
  rec.method = "cbp";
  rec.grid_size = grid.points(0);
  rec.max_offsupport = rep.max_margin;
  rec.degenerate = !rep.holds;
  return rec;
}

std::string tau_header(int dims) {
  std::string out;
  for (int k = 1; k <= dims; ++k) out += ",tau_" + std::to_string(k);
  return out;
}

std::string tau_fields(const std::vector<double>& tau, int dims) {
  std::string out;
  for (int k = 0; k < dims; ++k) {
    out += ',';
    if (k < static_cast<int>(tau.size())) out += format_number(tau[k]);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path.string() + "'");
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> lambda_grid(double lambda_max, int count) {
  if (!(lambda_max > 0.0)) throw Error(ErrorCode::kInvalidParam, "lambda_max must be positive");
  if (count < 2) throw Error(ErrorCode::kInvalidParam, "lambda grid needs at least 2 points");
  std::vector<double> out;
  for (int k = 1; k <= count; ++k) out.push_back(lambda_max * k / count);
  return out;
}

std::vector<std::vector<double>> tau_grid(const std::vector<int>& counts, double tau_max) {
  std::vector<std::vector<double>> axes;
  for (int n : counts) {
    if (n < 1) throw Error(ErrorCode::kInvalidParam, "tau count must be positive");
    std::vector<double> axis;
    if (n == 1) axis.push_back(tau_max);
    for (int i = 0; n > 1 && i < n; ++i) axis.push_back(tau_max * i / (n - 1));
    axes.push_back(axis);
  }
  std::vector<std::vector<double>> out{{}};
  for (const std::vector<double>& axis : axes) {
    std::vector<std::vector<double>> next;
    for (const std::vector<double>& prefix : out) {
      for (double t : axis) {
        next.push_back(prefix);
        next.back().push_back(t);
      }
    }
    out = std::move(next);
  }
  return out;
}

std::optional<double> SweepResult::mean_error(const std::string& method, double lambda,
                                              const std::vector<double>& tau) const {
  for (const CellSummary& s : summary) {
    if (s.method == method && s.lambda == lambda && s.tau == tau) return s.mean;
  }
  return std::nullopt;
}

SweepResult run_sweeps(const ExperimentSpec& spec, const RunOptions& opts) {
  const int d = spec.dims();
  const int draws = spec.noise.draws;
  const std::uint64_t seed = opts.seed.value_or(spec.sweep.seed);
  const int threads = std::max(1, opts.threads);
  const OperatorPtr op = make_operator(spec.op, d);
  const Grid grid = make_grid(spec.grid);
  const DiscreteMeasure mu0 = make_truth(spec.truth, grid);

  SweepResult res;
  const Vec y0 = forward(*op, mu0);
  res.lambda_max = lasso_lambda_max(*op, grid, y0);
  std::vector<Vec> ys(draws);
  for (int k = 0; k < draws; ++k) {
    ys[k] = generate_noisy_data(*op, mu0, spec.noise.rho_rel, seed, static_cast<std::uint64_t>(k));
  }

  if (spec.has_method("lasso")) {
    const std::vector<double> lambdas = lambda_grid(res.lambda_max, spec.sweep.lambda_count);
    const DesignMatrix design = lasso_design(*op, grid);
    std::vector<CellRecord> cells(lambdas.size() * draws);
    parallel_for(static_cast<int>(cells.size()), threads, [&](int i) {
      CellRecord& rec = cells[i];
      rec.method = "lasso";
      rec.lambda = lambdas[i / draws];
      rec.draw = i % draws;
      const SolverConfig cfg = solver_config(spec.sweep, rec.lambda);
      score_cell(
          rec, mu0, [&] { return solve_group_lasso(design, ys[rec.draw], cfg); },
          [&](const SolveResult& s) {
            std::vector<Atom> atoms;
            for (int j : group_support(s.z, cfg.support_tol)) {
              atoms.push_back({grid.position(j), s.z.data()[j]});
            }
            return DiscreteMeasure(d, atoms);
          });
    });
    std::vector<CellSummary> summary = summarize(cells, draws);
    if (const auto best = argmin(summary)) {
      summary[*best].argmin = true;
      res.lambda_star = summary[*best].lambda;
    }
    res.cells.insert(res.cells.end(), cells.begin(), cells.end());
    res.summary.insert(res.summary.end(), summary.begin(), summary.end());
  }

  const std::vector<std::vector<double>> taus = tau_grid(spec.sweep.tau_count, spec.sweep.tau_max);
  if (spec.has_method("srlasso") && res.lambda_star) {
    const double lambda = *res.lambda_star;
    const SolverConfig cfg = solver_config(spec.sweep, lambda);
    std::vector<CellRecord> cells(taus.size() * draws);
    parallel_for(static_cast<int>(taus.size()), threads, [&](int t) {
      const SrDesign design = build_sr_design(op, grid, taus[t]);
      for (int k = 0; k < draws; ++k) {
        CellRecord& rec = cells[t * draws + k];
        rec.method = "srlasso";
        rec.lambda = lambda;
        rec.tau = taus[t];
        rec.draw = k;
        score_cell(
            rec, mu0, [&] { return solve_sr_lasso(design, ys[k], cfg); },
            [&](const SolveResult& s) { return recover_measure(design, s.z, cfg.support_tol).measure; });
      }
    });
    std::vector<CellSummary> summary = summarize(cells, draws);
    if (const auto best = argmin(summary)) {
      summary[*best].argmin = true;
      res.tau_star = summary[*best].tau;
    }
    res.cells.insert(res.cells.end(), cells.begin(), cells.end());
    res.summary.insert(res.summary.end(), summary.begin(), summary.end());
  }

  if (spec.has_method("cbp")) {
    const CbpDesign design = build_cbp_design(op, grid);
    const double cbp_max = std::max((design.matrix.matrix().transpose() * y0).maxCoeff(),
                                    res.lambda_max);
    const std::vector<double> lambdas = lambda_grid(cbp_max, spec.sweep.lambda_count);
    std::vector<CellRecord> cells(lambdas.size() * draws);
    parallel_for(static_cast<int>(cells.size()), threads, [&](int i) {
      CellRecord& rec = cells[i];
      rec.method = "cbp";
      rec.lambda = lambdas[i / draws];
      rec.draw = i % draws;
      const SolverConfig cfg = solver_config(spec.sweep, rec.lambda);
      score_cell(
          rec, mu0, [&] { return solve_cbp(design, ys[rec.draw], cfg); },
          [](const CbpResult& r) { return r.measure; });
    });
    std::vector<CellSummary> summary = summarize(cells, draws);
    if (const auto best = argmin(summary)) {
      summary[*best].argmin = true;
      res.cbp_lambda_star = summary[*best].lambda;
    }
    res.cells.insert(res.cells.end(), cells.begin(), cells.end());
    res.summary.insert(res.summary.end(), summary.begin(), summary.end());
  }

  for (const CellRecord& c : res.cells) res.failed_cells += c.converged ? 0 : 1;

  if (spec.has_method("srlasso")) {
    auto recs = sr_tau_records(op, grid, mu0, taus, "run");
    res.certificates.insert(res.certificates.end(), recs.begin(), recs.end());
  }
  if (spec.has_method("cbp")) res.certificates.push_back(cbp_record(op, grid, mu0, "run"));
  if (spec.certificate.present) {
    auto recs = certificate_experiment(spec);
    res.certificates.insert(res.certificates.end(), recs.begin(), recs.end());
  }
  return res;
}

std::vector<CertificateRecord> certificate_experiment(const ExperimentSpec& spec) {
  if (spec.dims() != 1) throw Error(ErrorCode::kDimUnsupported, "certificate scans are 1-D");
  const OperatorPtr op = make_operator(spec.op, 1);
  const Grid grid = make_grid(spec.grid);
  const DiscreteMeasure mu0 = make_truth(spec.truth, grid);
  std::vector<std::vector<double>> taus;
  if (spec.certificate.present) {
    for (double t : spec.certificate.taus) taus.push_back({t});
  } else {
    taus = tau_grid(spec.sweep.tau_count, spec.sweep.tau_max);
  }
  std::vector<CertificateRecord> out = sr_tau_records(op, grid, mu0, taus, "tau");
  for (int n : spec.certificate.grid_sizes) {
    const Grid sized = make_grid(spec.grid, n);
    auto recs = sr_tau_records(op, sized, mu0, {{spec.certificate.grid_tau}}, "grid");
    out.insert(out.end(), recs.begin(), recs.end());
    out.push_back(cbp_record(op, sized, mu0, "grid"));
  }
  return out;
}

std::string curves_csv(const SweepResult& res, int dims) {
  std::ostringstream out;
  out << "method,lambda" << tau_header(dims) << ",draw,mmd,support_size,status\n";
  for (const CellRecord& c : res.cells) {
    out << c.method << ',' << format_number(c.lambda) << tau_fields(c.tau, dims) << ',' << c.draw
        << ',' << format_number(c.mmd) << ',' << c.support_size << ','
        << (c.converged ? "ok" : "not_converged") << '\n';
  }
  return out.str();
}

std::string summary_csv(const SweepResult& res, int dims) {
  std::ostringstream out;
  out << "method,lambda" << tau_header(dims)
      << ",mean_mmd,std_mmd,mean_support,draws,failed,argmin\n";
  for (const CellSummary& s : res.summary) {
    out << s.method << ',' << format_number(s.lambda) << tau_fields(s.tau, dims) << ','
        << format_number(s.mean) << ',' << format_number(s.stddev) << ','
        << format_number(s.mean_support) << ',' << s.draws << ',' << s.failed << ','
        << (s.argmin ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string certificates_csv(const std::vector<CertificateRecord>& recs, int dims) {
  std::ostringstream out;
  out << "sweep,method" << tau_header(dims) << ",grid_size,max_offsupport,degenerate\n";
  for (const CertificateRecord& r : recs) {
    out << r.sweep << ',' << r.method << tau_fields(r.tau, dims) << ',' << r.grid_size << ','
        << format_number(r.max_offsupport) << ',' << (r.degenerate ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string manifest_json(const ExperimentSpec& spec, const SweepResult& res,
                          const RunOptions& opts) {
  nlohmann::ordered_json j;
  j["tool"] = "srlasso";
  j["version"] = SRLASSO_VERSION;
  j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                       "." + std::to_string(EIGEN_MINOR_VERSION);
  j["seed"] = opts.seed.value_or(spec.sweep.seed);
  j["lambda_max"] = res.lambda_max;
  j["lambda_star"] = res.lambda_star ? nlohmann::ordered_json(*res.lambda_star) : nullptr;
  j["tau_star"] = res.tau_star ? nlohmann::ordered_json(*res.tau_star) : nullptr;
  j["cbp_lambda_star"] = res.cbp_lambda_star ? nlohmann::ordered_json(*res.cbp_lambda_star) : nullptr;
  j["failed_cells"] = res.failed_cells;
  j["spec"] = spec.source;
  return j.dump(2) + "\n";
}

int run_experiment_to_dir(const ExperimentSpec& spec, const std::string& out_dir,
                          const RunOptions& opts) {
  const SweepResult res = run_sweeps(spec, opts);
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "curves.csv", curves_csv(res, spec.dims()));
  write_file(dir / "summary.csv", summary_csv(res, spec.dims()));
  write_file(dir / "certificates.csv", certificates_csv(res.certificates, spec.dims()));
  write_file(dir / "manifest.json", manifest_json(spec, res, opts));
  return res.failed_cells > 0 ? 2 : 0;
}

int run_certificate_to_dir(const ExperimentSpec& spec, const std::string& out_dir) {
  const std::vector<CertificateRecord> recs = certificate_experiment(spec);
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "certificates.csv", certificates_csv(recs, spec.dims()));
  return 0;
}

}  // namespace srlasso
