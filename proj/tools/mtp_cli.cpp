#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "mtp/commands.hpp"
#include "mtp/error.hpp"

namespace {

struct Global {
  unsigned k = 1;
  std::string tau = "2";
  std::string f_exponent = "2/3";
  std::string eta = "0";
  unsigned depth = 3;
  std::string mode = "demo";
  std::uint64_t seed = 1;
  std::uint64_t index_budget = std::uint64_t{1} << 50;
  std::string out;
  std::string format = "json";
};

mtp::Inputs inputs_of(const Global& g) {
  mtp::Inputs in;
  in.k = g.k;
  in.tau = mtp::parse_rational(g.tau);
  in.f_exponent = mtp::parse_rational(g.f_exponent);
  return in;
}

int emit(const Global& g, const mtp::CommandResult& result) {
  std::string text = g.format == "csv" && !result.csv.empty() ? result.csv : result.document.dump(2) + "\n";
  if (g.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream file(g.out, std::ios::binary);
    if (!file) throw mtp::InvalidArgument("cannot write " + g.out);
    file << text;
  }
  return result.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mass transference constructions, certificates and dimension estimates"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--k", g.k, "ambient dimension")->check(CLI::Range(1u, 2u));
  app.add_option("--tau", g.tau, "exponent of psi(q) = q^-tau");
  app.add_option("--f-exponent", g.f_exponent, "s in f(r) = r^s");
  app.add_option("--eta", g.eta, "eta for the construction; 0 picks one");
  app.add_option("--depth", g.depth, "number of levels")->check(CLI::Range(2u, 8u));
  app.add_option("--mode", g.mode, "faithful or demo constants")->check(CLI::IsMember({"faithful", "demo"}));
  app.add_option("--seed", g.seed, "seed for the sampled ball bound");
  app.add_option("--index-budget", g.index_budget, "largest family index any search may reach");
  app.add_option("--out", g.out, "write here instead of stdout");
  app.add_option("--format", g.format, "json, or csv where a table exists")->check(CLI::IsMember({"json", "csv"}));

  auto* generate = app.add_subcommand("generate", "list the family balls up to a denominator");
  std::int64_t gen_max_q = 32;
  generate->add_option("--max-q", gen_max_q, "largest denominator");

  auto* criteria = app.add_subcommand("criteria", "partial sums of the divergence criteria");
  std::uint64_t n_max = 64;
  criteria->add_option("--N", n_max, "last partial sum");

  auto* construct = app.add_subcommand("construct", "build a Cantor tree and its certificate");
  std::uint64_t trials = 10000;
  std::string demo_kappa, demo_c3, demo_epsilon, root_radius = "1/64";
  unsigned cap = 2;
  construct->add_option("--trials", trials, "random balls for the sampled bound");
  construct->add_option("--demo-kappa", demo_kappa, "demo kappa");
  construct->add_option("--demo-c3", demo_c3, "demo c3");
  construct->add_option("--demo-epsilon", demo_epsilon, "demo epsilon constant");
  construct->add_option("--sub-level-cap", cap, "demo cap on l_B")->check(CLI::Range(2u, 64u));
  construct->add_option("--root-radius", root_radius, "radius of the root ball");

  auto* verify = app.add_subcommand("verify", "re-check a construct document");
  std::string in_path;
  verify->add_option("input", in_path, "construct JSON")->required()->check(CLI::ExistingFile);

  auto* dimension = app.add_subcommand("dimension", "box dimension and pre-measure reports");
  std::vector<std::int64_t> scales = mtp::default_scales();
  mtp::PremeasureRequest pre;
  std::string rho;
  dimension->add_option("--scales", scales, "box-counting scales Q");
  dimension->add_option("--tail-q", pre.tail_q, "first denominator of the tail cover");
  dimension->add_option("--max-q", pre.max_q, "last denominator of the tail cover");
  dimension->add_option("--rho", rho, "cover radius bound");

  auto* jb = app.add_subcommand("jb-check", "box-counting slopes against 2/(1+tau)");
  std::vector<std::string> taus{"2", "3"};
  double tolerance = 0.1;
  jb->add_option("--taus", taus, "values of tau");
  jb->add_option("--scales", scales, "box-counting scales Q");
  jb->add_option("--tolerance", tolerance, "allowed slope error");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return emit(g, mtp::run_generate(inputs_of(g), gen_max_q));
    if (*criteria) return emit(g, mtp::run_criteria(inputs_of(g), n_max));
    if (*construct) {
      auto params = mtp::ConstructionParams::defaults(g.k, mtp::parse_mode(g.mode));
      params.eta = mtp::parse_rational(g.eta);
      params.depth = g.depth;
      params.seed = g.seed;
      params.index_budget = g.index_budget;
      params.trials = trials;
      params.sub_level_cap = cap;
      if (!demo_kappa.empty()) params.demo_kappa = mtp::parse_rational(demo_kappa);
      if (!demo_c3.empty()) params.demo_c3 = mtp::parse_rational(demo_c3);
      if (!demo_epsilon.empty()) params.demo_epsilon = mtp::parse_rational(demo_epsilon);
      mtp::Ball root = mtp::default_root(g.k);
      root = mtp::Ball(root.center(), mtp::parse_rational(root_radius));
      return emit(g, mtp::run_construct(inputs_of(g), params, root));
    }
    if (*verify) {
      std::ifstream file(in_path, std::ios::binary);
      return emit(g, mtp::run_verify(mtp::Json::parse(file)));
    }
    if (*dimension) {
      if (!rho.empty()) pre.rho = mtp::parse_rational(rho);
      return emit(g, mtp::run_dimension(inputs_of(g), scales, pre));
    }
    if (*jb) {
      std::vector<mtp::Rational> values;
      for (const auto& t : taus) values.push_back(mtp::parse_rational(t));
      return emit(g, mtp::run_jb_check(values, scales, tolerance));
    }
  } catch (const mtp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mtp::Json::exception& e) {
    std::cerr << "error: malformed document: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
