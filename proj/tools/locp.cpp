// Command line front end: generate instances, run map checks, dilate,
// compute Radon-Nikodym certificates, verify triples, and batch-report.
//
// Exit codes: 0 all checks pass, 1 a mathematical check fails (a witness is
// part of the emitted report), 2 malformed input or I/O trouble. All output
// is deterministic for identical invocations.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "locp/json_io.hpp"

namespace {

using namespace locp;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void print_check(std::ostream& os, const std::string& name,
                 const std::string& verdict, double residual) {
  os << "CHECK " << name << ' ' << verdict << ' ' << fmt(residual) << '\n';
}

MapCheckReport gram_psd_report(const MultilinearMap& f, double tol) {
  MapCheckReport r;
  r.property = "gram-psd";
  r.params = Json{{"tol", tol}};
  GramOptions go;
  go.check_preconditions = false;
  go.tol = tol;
  const GramData g = gram_matrix(f, go);
  r.residual = std::max(0.0, -g.min_eig());
  if (!g.is_psd(tol)) {
    r.verdict = Verdict::Fail;
    r.witness = Json{{"min_eig", g.min_eig()}, {"max_eig", g.max_eig()}};
  }
  return r;
}

std::vector<MapCheckReport> run_check_suite(const MultilinearMap& f,
                                            const SamplingOptions& opts) {
  std::vector<MapCheckReport> out;
  out.push_back(is_symmetric(f, opts.tol));
  out.push_back(is_invariant(f, opts.tol));
  out.push_back(gram_psd_report(f, opts.tol));
  out.push_back(check_local_positivity(f, opts));
  out.push_back(check_local_contractivity(f, opts));
  return out;
}

Json checks_json(const std::vector<MapCheckReport>& reports) {
  Json checks = Json::array();
  for (const auto& r : reports) checks.push_back(report_to_json(r));
  return checks;
}

bool any_failed(const std::vector<MapCheckReport>& reports) {
  return std::any_of(reports.begin(), reports.end(),
                     [](const MapCheckReport& r) { return r.failed(); });
}

bool map_is_unital(const MultilinearMap& f, double tol) {
  const std::vector<AlgebraElement> units(f.k, unit_element(f.domain));
  const FlagOperator u = evaluate(f, units);
  const Matrix id = Matrix::Identity(f.codomain.dim, f.codomain.dim);
  return (u.matrix - id).norm() <= tol * f.codomain.dim;
}

struct GenArgs {
  InstanceSpec spec;
  std::string out;
  std::string psi_out;
};

int cmd_gen(const GenArgs& a) {
  switch (a.spec.kind) {
    case InstanceSpec::Kind::Dilated: {
      const DilatedInstance inst = random_dilated_map(a.spec);
      save_json_file(a.out, instance_to_json(a.spec, inst.map));
      break;
    }
    case InstanceSpec::Kind::PlantedPair: {
      const PlantedPairInstance pair = planted_pair(a.spec);
      save_json_file(a.out, instance_to_json(a.spec, pair.phi));
      if (!a.psi_out.empty())
        save_json_file(a.psi_out, instance_to_json(a.spec, pair.psi));
      break;
    }
    case InstanceSpec::Kind::Adversarial: {
      const AdversarialInstance inst = adversarial_map(a.spec);
      save_json_file(a.out, instance_to_json(a.spec, inst.map));
      break;
    }
  }
  return 0;
}

int cmd_check(const std::string& path, const SamplingOptions& opts,
              const std::string& out) {
  const MultilinearMap f = map_from_any_json(load_json_file(path));
  const std::vector<MapCheckReport> reports = run_check_suite(f, opts);
  const Json bundle{{"checks", checks_json(reports)}};
  if (!out.empty()) save_json_file(out, bundle);
  std::cout << canonical_dump(bundle) << '\n';
  return any_failed(reports) ? 1 : 0;
}

int cmd_dilate(const std::string& path, const DilateOptions& opts,
               const std::string& out, double tol) {
  const MultilinearMap f = map_from_any_json(load_json_file(path));
  const StinespringTriple t = dilate(f, opts);
  save_json_file(out, triple_to_json(t));

  const auto& res = t.residuals;
  const double recon_tol =
      std::max(tol, 1e-8 * std::max(max_value_norm(f), 1.0));
  bool ok = true;
  const auto line = [&](const std::string& name, double value, double bound) {
    const bool pass = value <= bound;
    ok = ok && pass;
    print_check(std::cout, name, pass ? "pass" : "fail", value);
  };
  std::cout << "DILATE r " << t.dim << '\n';
  line("reconstruction", res.reconstruction, recon_tol);
  line("well_definedness", res.well_definedness, opts.tol_well_defined);
  line("representation", res.representation, tol);
  line("commutation", res.commutation, tol);
  line("flag_leak", res.flag_leak, tol);
  line("contractivity", res.contractivity, tol);
  line("v_norm", res.v_norm, 1e-12);
  return ok ? 0 : 1;
}

int cmd_rn(const std::string& phi_path, const std::string& psi_path,
           const RNOptions& opts, const std::string& out) {
  const MultilinearMap phi = map_from_any_json(load_json_file(phi_path));
  const MultilinearMap psi = map_from_any_json(load_json_file(psi_path));
  RNCertificate cert;
  try {
    cert = rn_derivative(phi, psi, opts);
  } catch (const OrderError& e) {
    std::cerr << "domination fails: " << e.what() << '\n';
    return 1;
  } catch (const InconsistencyError& e) {
    std::cerr << "inconsistency: " << e.what() << '\n';
    return 2;
  }
  if (!out.empty()) save_json_file(out, certificate_to_json(cert));
  print_check(std::cout, "rn.reconstruction",
              cert.reconstruction <= opts.tol * 10 ? "pass" : "fail",
              cert.reconstruction);
  print_check(std::cout, "rn.commutant",
              cert.commutant <= opts.tol ? "pass" : "fail", cert.commutant);
  print_check(std::cout, "rn.contraction",
              cert.contraction <= opts.tol ? "pass" : "fail", cert.contraction);
  const bool ok = cert.reconstruction <= opts.tol * 10 &&
                  cert.commutant <= opts.tol && cert.contraction <= opts.tol;
  return ok ? 0 : 1;
}

int cmd_verify(const std::string& phi_path, const std::string& triple_path,
               double tol) {
  const MultilinearMap f = map_from_any_json(load_json_file(phi_path));
  const StinespringTriple t = triple_from_json(load_json_file(triple_path));
  const double recon = verify_dilation(f, t);
  const TripleChecks checks = validate_triple(t);
  const double recon_tol =
      std::max(tol, 1e-8 * std::max(max_value_norm(f), 1.0));

  bool ok = true;
  const auto line = [&](const std::string& name, double value, double bound) {
    const bool pass = value <= bound;
    ok = ok && pass;
    print_check(std::cout, name, pass ? "pass" : "fail", value);
  };
  line("reconstruction", recon, recon_tol);
  line("representation", checks.representation, tol);
  line("commutation", checks.commutation, tol);
  line("flag_leak", std::max(checks.flag_leak, checks.v_leak), tol);
  line("contractivity", checks.contractivity, tol);
  line("v_norm", checks.v_norm, 1e-12);
  if (map_is_unital(f, tol)) line("v_isometry", checks.unit_defect, tol);
  return ok ? 0 : 1;
}

int cmd_report(const std::string& dir, const std::string& format,
               const SamplingOptions& opts) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("'" + dir + "' is not a directory");

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      names.push_back(entry.path().string());
  std::sort(names.begin(), names.end());

  struct Row {
    std::string name;
    std::vector<MapCheckReport> reports;
  };
  std::vector<Row> rows;
  for (const std::string& path : names) {
    const Json j = load_json_file(path);
    MultilinearMap f;
    try {
      f = map_from_any_json(j);
    } catch (const IoError&) {
      continue;  // other artifacts (triples, certificates) live here too
    }
    rows.push_back({fs::path(path).stem().string(), run_check_suite(f, opts)});
  }

  bool ok = true;
  if (format == "json") {
    Json instances = Json::array();
    for (const Row& row : rows) {
      instances.push_back(
          Json{{"name", row.name}, {"checks", checks_json(row.reports)}});
      ok = ok && !any_failed(row.reports);
    }
    std::cout << canonical_dump(Json{{"instances", std::move(instances)}})
              << '\n';
  } else if (format == "text") {
    for (const Row& row : rows) {
      for (const MapCheckReport& r : row.reports)
        print_check(std::cout, row.name + "." + r.property,
                    verdict_name(r.verdict), r.residual);
      ok = ok && !any_failed(row.reports);
    }
  } else {
    throw IoError("unknown report format '" + format + "'");
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local operator workbench"};
  app.require_subcommand(1);

  GenArgs gen;
  std::string gen_kind = "dilated";
  auto* cgen = app.add_subcommand("gen", "generate a seeded instance");
  cgen->add_option("--seed", gen.spec.seed, "RNG seed");
  cgen->add_option("--k", gen.spec.k, "number of slots");
  cgen->add_option("--blocks", gen.spec.block_dims, "algebra block dims")
      ->delimiter(',');
  cgen->add_option("--dim", gen.spec.codomain_dim, "codomain dimension");
  cgen->add_option("--flag", gen.spec.flag, "codomain flag cuts")
      ->delimiter(',');
  cgen->add_option("--kind", gen_kind, "dilated | planted-pair | adversarial");
  cgen->add_option("--alpha", gen.spec.alpha_of, "levels seen per flag cut")
      ->delimiter(',');
  cgen->add_option("--leg-budget", gen.spec.leg_budget, "max leg dimension");
  cgen->add_flag("--non-unital{false}", gen.spec.unital,
                 "scale V to a strict contraction");
  cgen->add_option("--defect", gen.spec.defect,
                   "adversarial defect: symmetry | invariance | transpose");
  cgen->add_option("--out", gen.out, "output instance path")->required();
  cgen->add_option("--psi-out", gen.psi_out,
                   "second output for planted pairs (the dominated map)");

  std::string check_path, check_out;
  SamplingOptions check_opts;
  auto* ccheck = app.add_subcommand("check", "run the map check suite");
  ccheck->add_option("input", check_path, "instance or map JSON")->required();
  ccheck->add_option("--nmax", check_opts.n_max, "max amplification size");
  ccheck->add_option("--trials", check_opts.trials, "random trials per level");
  ccheck->add_option("--tol", check_opts.tol, "numerical tolerance");
  ccheck->add_option("--seed", check_opts.seed, "sampling seed");
  ccheck->add_option("--out", check_out, "also write the bundle here");

  std::string dil_path, dil_out;
  DilateOptions dil_opts;
  double dil_tol = 1e-9;
  auto* cdil = app.add_subcommand("dilate", "construct a minimal triple");
  cdil->add_option("input", dil_path, "instance or map JSON")->required();
  cdil->add_option("--out", dil_out, "output triple path")->required();
  cdil->add_option("--tol-rank", dil_opts.tol_rank, "spectral rank cutoff");
  cdil->add_option("--tol", dil_tol, "report tolerance");
  cdil->add_option("--permute-seed", dil_opts.tensor_permutation_seed,
                   "randomize the tensor enumeration (0 = natural)");

  std::string rn_phi, rn_psi, rn_out;
  RNOptions rn_opts;
  auto* crn = app.add_subcommand("rn", "Radon-Nikodym derivative of psi by phi");
  crn->add_option("--phi", rn_phi, "dominating map JSON")->required();
  crn->add_option("--psi", rn_psi, "dominated map JSON")->required();
  crn->add_option("--out", rn_out, "output certificate path");
  crn->add_option("--tol", rn_opts.tol, "numerical tolerance");
  crn->add_option("--tol-rank", rn_opts.dilate.tol_rank, "spectral rank cutoff");

  std::string ver_phi, ver_triple;
  double ver_tol = 1e-9;
  auto* cver = app.add_subcommand("verify", "check a triple against a map");
  cver->add_option("--phi", ver_phi, "instance or map JSON")->required();
  cver->add_option("--triple", ver_triple, "triple JSON")->required();
  cver->add_option("--tol", ver_tol, "numerical tolerance");

  std::string rep_dir, rep_format = "text";
  SamplingOptions rep_opts;
  auto* crep = app.add_subcommand("report", "check every instance in a directory");
  crep->add_option("--dir", rep_dir, "directory of instance JSON files")
      ->required();
  crep->add_option("--format", rep_format, "json | text");
  crep->add_option("--nmax", rep_opts.n_max, "max amplification size");
  crep->add_option("--trials", rep_opts.trials, "random trials per level");
  crep->add_option("--tol", rep_opts.tol, "numerical tolerance");
  crep->add_option("--seed", rep_opts.seed, "sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cgen->parsed()) {
      gen.spec.kind = kind_from_name(gen_kind);
      return cmd_gen(gen);
    }
    if (ccheck->parsed()) return cmd_check(check_path, check_opts, check_out);
    if (cdil->parsed()) return cmd_dilate(dil_path, dil_opts, dil_out, dil_tol);
    if (crn->parsed()) return cmd_rn(rn_phi, rn_psi, rn_opts, rn_out);
    if (cver->parsed()) return cmd_verify(ver_phi, ver_triple, ver_tol);
    if (crep->parsed()) return cmd_report(rep_dir, rep_format, rep_opts);
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const MathError& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
