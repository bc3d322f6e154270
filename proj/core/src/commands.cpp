#include "mtp/commands.hpp"

#include <cmath>
#include <sstream>

#include "mtp/criteria.hpp"
#include "mtp/dimension.hpp"
#include "mtp/error.hpp"

namespace mtp {

BallFamily Inputs::family() const {
  return BallFamily(ApproximatingFunction::power(tau), k, coprimality);
}

namespace {

Json header(const std::string& command) { return {{"version", kFormatVersion}, {"command", command}}; }

Json inputs_json(const Inputs& in) {
  return {{"k", in.k},
          {"tau", to_json(in.tau)},
          {"f_exponent", to_json(in.f_exponent)},
          {"coprimality", to_string(in.coprimality)}};
}

Inputs inputs_from_json(const Json& j) {
  Inputs in;
  in.k = j.at("k").get<unsigned>();
  in.tau = rational_from_json(j.at("tau"));
  in.f_exponent = rational_from_json(j.at("f_exponent"));
  in.coprimality = parse_coprimality(j.at("coprimality").get<std::string>());
  return in;
}

// Everything a construct document states about the tree, recomputed.
void certificate_section(Json& doc, const CantorTree& tree, const Inputs& in, const ConstructionParams& params,
                         bool& ok) {
  BallFamily family = in.family();
  Certificate cert = certify(tree, family, in.f(), in.g(), params);
  ok = cert.exact_checks_pass();
  doc["certificate"] = to_json(cert);
  doc["mdp_lower_bound"] = nullptr;
  doc["leaf_premeasure_upper"] = nullptr;
  doc["sandwich"] = nullptr;
  if (!tree.constructed() || !ok || !cert.ball_bound) return;
  MdpBound mdp = mdp_lower_bound(cert);
  std::vector<Ball> leaves;
  Rational rho(0);
  for (auto id : tree.leaves()) {
    leaves.push_back(tree.node(id).ball);
    rho = max(rho, leaves.back().radius());
  }
  Enclosure upper = premeasure_upper(leaves, in.f(), rho);
  bool sandwich = mdp.bound <= upper.lo;
  ok = ok && sandwich;
  doc["mdp_lower_bound"] = to_json(mdp);
  doc["leaf_premeasure_upper"] = to_json(upper);
  doc["sandwich"] = sandwich;
}

}  // namespace

std::vector<std::int64_t> default_scales() {
  std::vector<std::int64_t> out;
  for (int e = 4; e <= 12; ++e) out.push_back(std::int64_t{1} << e);
  return out;
}

CommandResult run_generate(const Inputs& in, std::int64_t max_q) {
  if (max_q < 1) throw InvalidArgument("max_q must be >= 1");
  BallFamily family = in.family();
  CommandResult out;
  out.document = header("generate");
  out.document["inputs"] = inputs_json(in);
  out.document["max_q"] = max_q;
  Json members = Json::array();
  std::ostringstream csv;
  csv << "index,q";
  for (unsigned i = 0; i < in.k; ++i) csv << ",p" << i + 1;
  csv << ",radius\n";
  for (const auto& m : family.members_up_to(max_q)) {
    members.push_back({{"index", m.index}, {"point", to_json(m.point)}, {"radius", to_json(m.ball.radius())}});
    csv << m.index << "," << m.point.q;
    for (auto p : m.point.p) csv << "," << p;
    csv << "," << to_string(m.ball.radius()) << "\n";
  }
  out.document["members"] = std::move(members);
  out.csv = csv.str();
  return out;
}

CommandResult run_criteria(const Inputs& in, std::uint64_t n_max) {
  if (n_max < 1) throw InvalidArgument("N must be >= 1");
  std::vector<std::uint64_t> checkpoints;
  for (std::uint64_t n = 1; n < n_max; n *= 2) checkpoints.push_back(n);
  checkpoints.push_back(n_max);
  auto psi = ApproximatingFunction::power(in.tau);
  auto rows = criteria_table(psi, in.f(), in.k, checkpoints);
  CommandResult out;
  out.document = header("criteria");
  out.document["inputs"] = inputs_json(in);
  Json jrows = Json::array();
  for (const auto& r : rows) {
    jrows.push_back({{"N", r.n},
                     {"sum_conjecture1", to_json(r.conjecture1)},
                     {"sum_conjecture2", to_json(r.conjecture2)},
                     {"sum_gallagher", to_json(r.gallagher)},
                     {"sum_theorem3", to_json(r.theorem3)}});
  }
  out.document["rows"] = std::move(jrows);
  std::ostringstream csv;
  write_criteria_csv(csv, rows, nullptr);
  out.csv = csv.str();
  return out;
}

CommandResult run_construct(const Inputs& in, const ConstructionParams& params, const Ball& root) {
  if (params.k != in.k) throw InvalidArgument("construction k differs from the family k");
  BallFamily family = in.family();
  CantorTree tree = build_cantor(family, root, in.f(), in.g(), params);
  CommandResult out;
  out.document = header("construct");
  Json inputs = inputs_json(in);
  inputs["root"] = to_json(root);
  out.document["inputs"] = std::move(inputs);
  certificate_section(out.document, tree, in, params, out.ok);
  out.document["tree"] = to_json(tree);
  return out;
}

CommandResult run_verify(const Json& document) {
  check_version(document);
  if (document.value("command", "") != "construct") throw InvalidArgument("verify expects a construct document");
  Inputs in = inputs_from_json(document.at("inputs"));
  ConstructionParams params = params_from_json(document.at("certificate").at("params"));
  CantorTree tree = tree_from_json(document.at("tree"));
  CommandResult out;
  out.document = header("verify");
  out.document["inputs"] = document.at("inputs");
  Json recomputed = document;
  certificate_section(recomputed, tree, in, params, out.ok);
  out.document["certificate"] = recomputed["certificate"];
  out.document["mdp_lower_bound"] = recomputed["mdp_lower_bound"];
  out.document["sandwich"] = recomputed["sandwich"];
  out.document["matches_recorded"] = recomputed["certificate"] == document.at("certificate");
  return out;
}

CommandResult run_dimension(const Inputs& in, const std::vector<std::int64_t>& scales,
                            const PremeasureRequest& premeasure) {
  CommandResult out;
  out.document = header("dimension");
  out.document["inputs"] = inputs_json(in);
  BoxDimension box = box_dim_estimate(ApproximatingFunction::power(in.tau), in.k, scales);
  out.document["box_dimension"] = to_json(box, jarnik_besicovitch_dimension(in.tau));
  std::ostringstream csv;
  write_box_csv(csv, box);
  out.csv = csv.str();

  if (premeasure.tail_q < 1 || premeasure.max_q < premeasure.tail_q) {
    throw InvalidArgument("premeasure needs 1 <= tail_q <= max_q");
  }
  BallFamily family = in.family();
  std::uint64_t tail_g = family.first_index(premeasure.tail_q);
  Rational rho = premeasure.rho ? *premeasure.rho : family.envelope(premeasure.tail_q);
  Enclosure upper = premeasure_upper(family, in.f(), rho, tail_g, premeasure.max_q);
  out.document["premeasure_upper"] = {{"tail_q", premeasure.tail_q},
                                      {"tail_index", tail_g},
                                      {"max_q", premeasure.max_q},
                                      {"rho", to_json(rho)},
                                      {"sum", to_json(upper)},
                                      {"sum_approx", to_double(upper.hi)}};
  return out;
}

CommandResult run_jb_check(const std::vector<Rational>& taus, const std::vector<std::int64_t>& scales,
                           double tolerance) {
  CommandResult out;
  out.document = header("jb-check");
  out.document["tolerance"] = tolerance;
  Json rows = Json::array();
  for (const auto& tau : taus) {
    BoxDimension box = box_dim_estimate(ApproximatingFunction::power(tau), 1, scales);
    Rational d = jarnik_besicovitch_dimension(tau);
    bool within = std::abs(box.slope - to_double(d)) <= tolerance;
    out.ok = out.ok && within;
    rows.push_back({{"tau", to_json(tau)},
                    {"target", to_json(d)},
                    {"slope", box.slope},
                    {"rms", box.rms},
                    {"within_tolerance", within}});
  }
  out.document["rows"] = std::move(rows);
  out.document["pass"] = out.ok;
  return out;
}

}  // namespace mtp
