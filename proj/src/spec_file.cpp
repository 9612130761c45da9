// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment spec text format and the objects it describes.

#include "srlasso/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace srlasso {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

class FieldParser {
 public:
  FieldParser(int line, std::string field) : line_(line), field_(std::move(field)) {}

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::kSpecParse,
                "line " + std::to_string(line_) + ", field '" + field_ + "': " + why);
  }

  double real(const std::string& s) const {
    const std::string t = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
      fail("expected a number, got '" + t + "'");
    }
    return v;
  }

  long long integer(const std::string& s) const {
    const std::string t = trim(s);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
      fail("expected an integer, got '" + t + "'");
    }
    return v;
  }

  int positive_int(const std::string& s) const {
    const long long v = integer(s);
    if (v < 1 || v > 100000000) fail("expected a positive integer");
    return static_cast<int>(v);
  }

  std::uint64_t seed(const std::string& s) const {
    const std::string t = trim(s);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
      fail("expected an unsigned 64-bit integer");
    }
    return v;
  }

  std::vector<double> reals(const std::string& s) const {
    std::vector<double> out;
    for (const std::string& part : split(s, ',')) out.push_back(real(part));
    if (out.empty()) fail("expected at least one number");
    return out;
  }

  std::vector<int> positive_ints(const std::string& s) const {
    std::vector<int> out;
    for (const std::string& part : split(s, ',')) out.push_back(positive_int(part));
    if (out.empty()) fail("expected at least one integer");
    return out;
  }

  // Rows separated by ';', entries by ','.
  std::vector<std::vector<double>> rows(const std::string& s) const {
    std::vector<std::vector<double>> out;
    for (const std::string& row : split(s, ';')) out.push_back(reals(row));
    return out;
  }

 private:
  int line_;
  std::string field_;
};

[[noreturn]] void spec_error(const std::string& what) { throw Error(ErrorCode::kSpecParse, what); }

void check_methods(const std::vector<std::string>& methods, int line) {
  FieldParser fp(line, "methods");
  if (methods.empty()) fp.fail("at least one method is required");
  for (const std::string& m : methods) {
    if (m != "lasso" && m != "srlasso" && m != "cbp") fp.fail("unknown method '" + m + "'");
    if (std::count(methods.begin(), methods.end(), m) > 1) fp.fail("duplicate method '" + m + "'");
  }
}

void validate(ExperimentSpec& spec) {
  const int d = spec.dims();
  if (d < 1 || d > 3) spec_error("field 'points': grid must have 1 to 3 axes");
  for (int n : spec.grid.points) {
    if (n < 2) spec_error("field 'points': every axis needs at least 2 nodes");
  }
  if (spec.grid.origin.size() == 1 && d > 1) spec.grid.origin.assign(d, spec.grid.origin[0]);
  if (spec.grid.extent.size() == 1 && d > 1) spec.grid.extent.assign(d, spec.grid.extent[0]);
  if (static_cast<int>(spec.grid.origin.size()) != d) spec_error("field 'origin': one value per axis");
  if (static_cast<int>(spec.grid.extent.size()) != d) spec_error("field 'extent': one value per axis");
  for (double e : spec.grid.extent) {
    if (!(e > 0.0)) spec_error("field 'extent': must be positive");
  }

  const std::string& kind = spec.op.kind;
  if (kind == "fourier") {
    if (d != 1) spec_error("field 'kind': fourier needs a 1-D grid");
    if (spec.op.fc < 1) spec_error("field 'fc': must be >= 1");
  } else if (kind == "gaussian" || kind == "gaussian_psf") {
    if (d != 1) spec_error("field 'kind': " + kind + " needs a 1-D grid");
  } else if (kind == "gauss_laplace") {
    if (d != 2 && d != 3) spec_error("field 'kind': gauss_laplace needs a 2-D or 3-D grid");
  } else {
    spec_error("field 'kind': unknown operator '" + kind + "'");
  }
  if (kind != "fourier") {
    if (!(spec.op.sigma > 0.0)) spec_error("field 'sigma': must be positive");
    if (spec.op.samples < 2) spec_error("field 'samples': need at least 2");
    if (!(spec.op.sample_max > spec.op.sample_min)) spec_error("field 'sample_max': must exceed sample_min");
  }
  if (kind == "gauss_laplace") {
    if (spec.op.depth_samples < 1) spec_error("field 'depth_samples': must be >= 1");
    if (!(spec.op.depth_max >= spec.op.depth_min)) spec_error("field 'depth_max': must be >= depth_min");
  }

  TruthSpec& t = spec.truth;
  if (t.positions.empty()) spec_error("field 'positions': the truth needs at least one atom");
  // a single 1-D row "0.3, 0.7" lists several atoms
  if (d == 1 && t.positions.size() == 1 && t.positions[0].size() > 1) {
    std::vector<std::vector<double>> atoms;
    for (double x : t.positions[0]) atoms.push_back({x});
    t.positions = atoms;
  }
  for (const auto& p : t.positions) {
    if (static_cast<int>(p.size()) != d) spec_error("field 'positions': each atom needs one coordinate per axis");
  }
  if (t.amplitudes.empty()) t.amplitudes.assign(t.positions.size(), 1.0);
  if (t.amplitudes.size() != t.positions.size()) spec_error("field 'amplitudes': one value per atom");
  for (double a : t.amplitudes) {
    if (a == 0.0) spec_error("field 'amplitudes': zero amplitude");
  }
  if (t.offset.empty()) t.offset.assign(d, 0.0);
  if (t.offset.size() == 1 && d > 1) t.offset.assign(d, t.offset[0]);
  if (static_cast<int>(t.offset.size()) != d) spec_error("field 'offset': one value per axis");
  for (double o : t.offset) {
    if (!(std::abs(o) <= 0.5)) spec_error("field 'offset': must lie in [-0.5, 0.5]");
  }
  if (t.offset_signs.empty()) t.offset_signs.assign(t.positions.size(), std::vector<double>(d, 1.0));
  if (d == 1 && t.offset_signs.size() == 1 && t.offset_signs[0].size() == t.positions.size() &&
      t.positions.size() > 1) {
    std::vector<std::vector<double>> rows;
    for (double s : t.offset_signs[0]) rows.push_back({s});
    t.offset_signs = rows;
  }
  if (t.offset_signs.size() != t.positions.size()) spec_error("field 'offset_signs': one row per atom");
  for (auto& row : t.offset_signs) {
    if (row.size() == 1 && d > 1) row.assign(d, row[0]);
    if (static_cast<int>(row.size()) != d) spec_error("field 'offset_signs': one sign per axis");
    for (double s : row) {
      if (s != 1.0 && s != -1.0) spec_error("field 'offset_signs': signs must be 1 or -1");
    }
  }

  if (spec.noise.rho_rel < 0.0) spec_error("field 'rho_rel': must be >= 0");
  if (spec.noise.draws < 1) spec_error("field 'draws': must be >= 1");

  SweepSpec& s = spec.sweep;
  if (s.lambda_count < 2) spec_error("field 'lambda_count': must be >= 2");
  if (s.tau_count.size() == 1 && d > 1) s.tau_count.assign(d, s.tau_count[0]);
  if (static_cast<int>(s.tau_count.size()) != d) spec_error("field 'tau_count': one value per axis");
  if (!(s.tau_max > 0.0 && s.tau_max <= 2.0)) spec_error("field 'tau_max': must lie in (0, 2]");
  if (!(s.gap_tol > 0.0)) spec_error("field 'gap_tol': must be positive");
  if (s.max_iters < 1) spec_error("field 'max_iters': must be positive");
  if (!(s.support_tol >= 0.0)) spec_error("field 'support_tol': must be >= 0");
  if (spec.has_method("srlasso") && !spec.has_method("lasso")) {
    spec_error("field 'methods': srlasso needs lasso to select the regularization");
  }
  if (spec.has_method("cbp") && d != 1) spec_error("field 'methods': cbp needs a 1-D grid");

  if (spec.certificate.present) {
    if (d != 1) spec_error("section 'certificate': needs a 1-D grid");
    for (double tau : spec.certificate.taus) {
      if (!(tau >= 0.0 && tau <= 2.0)) spec_error("field 'taus': values must lie in [0, 2]");
    }
    for (int n : spec.certificate.grid_sizes) {
      if (n < 2) spec_error("field 'grid_sizes': values must be >= 2");
    }
    if (!(spec.certificate.grid_tau >= 0.0 && spec.certificate.grid_tau <= 2.0)) {
      spec_error("field 'grid_tau': must lie in [0, 2]");
    }
  }
}

}  // namespace

bool ExperimentSpec::has_method(const std::string& m) const {
  return std::find(sweep.methods.begin(), sweep.methods.end(), m) != sweep.methods.end();
}

ExperimentSpec parse_experiment_spec(const std::string& text) {
  ExperimentSpec spec;
  spec.source = text;
  spec.sweep.tau_count.clear();
  bool tau_count_set = false;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::vector<std::pair<std::string, std::string>> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') spec_error("line " + std::to_string(line_no) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::vector<std::string> known{"operator", "grid", "truth", "noise", "sweep", "certificate"};
      if (std::find(known.begin(), known.end(), section) == known.end()) {
        spec_error("line " + std::to_string(line_no) + ", section '" + section + "': unknown section");
      }
      if (section == "certificate") spec.certificate.present = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      spec_error("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const FieldParser fp(line_no, key);
    if (section.empty()) fp.fail("key outside of any section");
    if (std::find(seen.begin(), seen.end(), std::make_pair(section, key)) != seen.end()) {
      fp.fail("duplicate key");
    }
    seen.emplace_back(section, key);

    if (section == "operator") {
      OperatorSpec& o = spec.op;
      if (key == "kind") o.kind = value;
      else if (key == "fc") o.fc = fp.positive_int(value);
      else if (key == "sigma") o.sigma = fp.real(value);
      else if (key == "samples") o.samples = fp.positive_int(value);
      else if (key == "sample_min") o.sample_min = fp.real(value);
      else if (key == "sample_max") o.sample_max = fp.real(value);
      else if (key == "depth_samples") o.depth_samples = fp.positive_int(value);
      else if (key == "depth_min") o.depth_min = fp.real(value);
      else if (key == "depth_max") o.depth_max = fp.real(value);
      else fp.fail("unknown key");
    } else if (section == "grid") {
      if (key == "points") spec.grid.points = fp.positive_ints(value);
      else if (key == "origin") spec.grid.origin = fp.reals(value);
      else if (key == "extent") spec.grid.extent = fp.reals(value);
      else fp.fail("unknown key");
    } else if (section == "truth") {
      if (key == "positions") spec.truth.positions = fp.rows(value);
      else if (key == "amplitudes") spec.truth.amplitudes = fp.reals(value);
      else if (key == "offset") spec.truth.offset = fp.reals(value);
      else if (key == "offset_signs") spec.truth.offset_signs = fp.rows(value);
      else fp.fail("unknown key");
    } else if (section == "noise") {
      if (key == "rho_rel") spec.noise.rho_rel = fp.real(value);
      else if (key == "draws") spec.noise.draws = fp.positive_int(value);
      else fp.fail("unknown key");
    } else if (section == "sweep") {
      SweepSpec& s = spec.sweep;
      if (key == "lambda_count") {
        s.lambda_count = fp.positive_int(value);
      } else if (key == "tau_count") {
        s.tau_count = fp.positive_ints(value);
        tau_count_set = true;
      } else if (key == "tau_max") {
        s.tau_max = fp.real(value);
      } else if (key == "methods") {
        s.methods = split(value, ',');
        check_methods(s.methods, line_no);
      } else if (key == "seed") {
        s.seed = fp.seed(value);
      } else if (key == "gap_tol") {
        s.gap_tol = fp.real(value);
      } else if (key == "max_iters") {
        s.max_iters = fp.positive_int(value);
      } else if (key == "support_tol") {
        s.support_tol = fp.real(value);
      } else {
        fp.fail("unknown key");
      }
    } else {
      CertificateSpec& c = spec.certificate;
      if (key == "taus") c.taus = fp.reals(value);
      else if (key == "grid_sizes") c.grid_sizes = fp.positive_ints(value);
      else if (key == "grid_tau") c.grid_tau = fp.real(value);
      else fp.fail("unknown key");
    }
  }
  if (!tau_count_set) spec.sweep.tau_count.assign(spec.grid.points.size(), 20);
  validate(spec);
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open spec file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_spec(buf.str());
}

OperatorPtr make_operator(const OperatorSpec& spec, int dims) {
  if (spec.kind == "fourier") return fourier_lowpass_1d(spec.fc);
  const std::vector<double> lateral = uniform_samples(spec.samples, spec.sample_min, spec.sample_max);
  if (spec.kind == "gaussian") return gaussian_sampling_1d(spec.sigma, lateral, GaussianWidth::kFeature);
  if (spec.kind == "gaussian_psf") {
    return gaussian_sampling_1d(spec.sigma, lateral, GaussianWidth::kPointSpread);
  }
  if (spec.kind == "gauss_laplace") {
    const std::vector<double> depth = uniform_samples(spec.depth_samples, spec.depth_min, spec.depth_max);
    if (dims == 2) return gauss_laplace_separable(spec.sigma, lateral, depth);
    if (dims == 3) return gauss_laplace_3d(spec.sigma, lateral, lateral, depth);
  }
  throw Error(ErrorCode::kInvalidParam, "unsupported operator '" + spec.kind + "' in " +
                                            std::to_string(dims) + " dimensions");
}

Grid make_grid(const GridSpec& spec) { return Grid(spec.points, spec.origin, spec.extent); }

Grid make_grid(const GridSpec& spec, int points_first_axis) {
  std::vector<int> points = spec.points;
  points[0] = points_first_axis;
  return Grid(points, spec.origin, spec.extent);
}

DiscreteMeasure make_truth(const TruthSpec& spec, const Grid& grid) {
  const int d = grid.dims();
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < spec.positions.size(); ++i) {
    Vec x(d);
    for (int k = 0; k < d; ++k) x[k] = spec.positions[i][k];
    Vec p = grid.position(grid.nearest_node(x));
    for (int k = 0; k < d; ++k) p[k] += spec.offset_signs[i][k] * spec.offset[k] * grid.spacing(k);
    atoms.push_back({p, spec.amplitudes[i]});
  }
  return DiscreteMeasure(d, atoms);
}

}  // namespace srlasso
