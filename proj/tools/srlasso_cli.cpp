// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0
//
// srlasso run <spec> [--out DIR] [--threads K] [--seed S]
// srlasso certificate <spec> [--out DIR]

#include "srlasso/srlasso.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Grid-based super-resolution experiments"};
  app.set_version_flag("--version", std::string(srl_version()));
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_dir = "out";
  int threads = 1;
  std::uint64_t seed = 0;

  CLI::App* run = app.add_subcommand("run", "Run the sweeps of an experiment spec");
  run->add_option("spec", spec_path, "Experiment spec file")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  CLI::Option* seed_opt = run->add_option("--seed", seed, "Override the spec seed");

  CLI::App* cert = app.add_subcommand("certificate", "Run the certificate scans of a spec");
  cert->add_option("spec", spec_path, "Experiment spec file")->required();
  cert->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (run->parsed()) {
    int exit_code = 0;
    const srl_status st = srl_experiment_run(spec_path.c_str(), out_dir.c_str(), threads,
                                             seed_opt->count() > 0, seed, &exit_code);
    if (st != SRL_OK) {
      std::fprintf(stderr, "error (%s): %s\n", srl_status_name(st), srl_last_error());
      return 1;
    }
    if (exit_code == 2) std::fprintf(stderr, "warning: some solves did not converge\n");
    return exit_code;
  }
  const srl_status st = srl_certificate_run(spec_path.c_str(), out_dir.c_str());
  if (st != SRL_OK) {
    std::fprintf(stderr, "error (%s): %s\n", srl_status_name(st), srl_last_error());
    return 1;
  }
  return 0;
}
