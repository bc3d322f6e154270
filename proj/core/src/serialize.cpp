#include "mtp/serialize.hpp"

#include "mtp/error.hpp"

namespace mtp {

namespace {

template <typename T>
Json optional_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_arithmetic_v<T>) {
    return *v;
  } else {
    return to_json(*v);
  }
}

Json rationals(const std::vector<Rational>& values) {
  Json out = Json::array();
  for (const auto& v : values) out.push_back(to_json(v));
  return out;
}

std::vector<Rational> rationals_from(const Json& j) {
  std::vector<Rational> out;
  for (const auto& v : j) out.push_back(rational_from_json(v));
  return out;
}

}  // namespace

Json to_json(const Rational& value) { return to_string(value); }

Rational rational_from_json(const Json& j) {
  if (!j.is_string()) throw InvalidArgument("expected a rational string, got " + j.dump());
  return parse_rational(j.get<std::string>());
}

Json to_json(const Enclosure& e) { return {{"lo", to_json(e.lo)}, {"hi", to_json(e.hi)}}; }

Enclosure enclosure_from_json(const Json& j) {
  return {rational_from_json(j.at("lo")), rational_from_json(j.at("hi"))};
}

Json to_json(const Magnitude& m) {
  return {{"coeff", to_json(m.coeff())},
          {"base", to_json(m.base())},
          {"exponent", to_json(m.exponent())},
          {"log_exponent", to_json(m.log_exponent())}};
}

Magnitude magnitude_from_json(const Json& j) {
  return Magnitude(rational_from_json(j.at("coeff")), rational_from_json(j.at("base")),
                   rational_from_json(j.at("exponent")), rational_from_json(j.at("log_exponent")));
}

Json to_json(const Ball& b) { return {{"center", rationals(b.center())}, {"radius", to_json(b.radius())}}; }

Ball ball_from_json(const Json& j) { return Ball(rationals_from(j.at("center")), rational_from_json(j.at("radius"))); }

Json to_json(const RationalPoint& p) { return {{"p", p.p}, {"q", p.q}}; }

RationalPoint point_from_json(const Json& j) {
  return {j.at("p").get<std::vector<std::int64_t>>(), j.at("q").get<std::int64_t>()};
}

Json to_json(const ConstructionParams& p) {
  return {{"k", p.k},
          {"eta", to_json(p.eta)},
          {"c1", to_json(p.c1)},
          {"c2", to_json(p.c2)},
          {"mode", to_string(p.mode)},
          {"demo_kappa", to_json(p.demo_kappa)},
          {"demo_c3", to_json(p.demo_c3)},
          {"demo_epsilon", to_json(p.demo_epsilon)},
          {"kappa", to_json(p.kappa())},
          {"c3", to_json(p.c3())},
          {"epsilon_constant", to_json(p.epsilon_constant())},
          {"sub_level_cap", p.sub_level_cap},
          {"depth", p.depth},
          {"index_budget", p.index_budget},
          {"scan_budget", p.scan_budget},
          {"packing_budget", p.packing_budget},
          {"seed", p.seed},
          {"trials", p.trials}};
}

ConstructionParams params_from_json(const Json& j) {
  ConstructionParams p;
  p.k = j.at("k").get<unsigned>();
  p.eta = rational_from_json(j.at("eta"));
  p.c1 = rational_from_json(j.at("c1"));
  p.c2 = rational_from_json(j.at("c2"));
  p.mode = parse_mode(j.at("mode").get<std::string>());
  p.demo_kappa = rational_from_json(j.at("demo_kappa"));
  p.demo_c3 = rational_from_json(j.at("demo_c3"));
  p.demo_epsilon = rational_from_json(j.at("demo_epsilon"));
  p.sub_level_cap = j.at("sub_level_cap").get<unsigned>();
  p.depth = j.at("depth").get<unsigned>();
  p.index_budget = j.at("index_budget").get<std::uint64_t>();
  p.scan_budget = j.at("scan_budget").get<std::uint64_t>();
  p.packing_budget = j.at("packing_budget").get<std::uint64_t>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.trials = j.at("trials").get<std::uint64_t>();
  return p;
}

namespace {

Json sub_level_json(const SubLevel& s) {
  return {{"index", s.index},
          {"g_index", s.g_index},
          {"members", s.members},
          {"free_measure", to_json(s.free_measure)},
          {"free_required", to_json(s.free_required)},
          {"packing_measure", to_json(s.packing_measure)},
          {"packing_required", to_json(s.packing_required)},
          {"d_min", to_json(s.d_min)},
          {"packed_available", s.packed_available},
          {"packed_used", s.packed_used},
          {"packed_skipped", s.packed_skipped}};
}

SubLevel sub_level_from_json(const Json& j) {
  SubLevel s;
  s.index = j.at("index").get<unsigned>();
  s.g_index = j.at("g_index").get<std::uint64_t>();
  s.members = j.at("members").get<std::vector<std::size_t>>();
  s.free_measure = rational_from_json(j.at("free_measure"));
  s.free_required = rational_from_json(j.at("free_required"));
  s.packing_measure = rational_from_json(j.at("packing_measure"));
  s.packing_required = rational_from_json(j.at("packing_required"));
  s.d_min = rational_from_json(j.at("d_min"));
  s.packed_available = j.at("packed_available").get<std::size_t>();
  s.packed_used = j.at("packed_used").get<std::size_t>();
  s.packed_skipped = j.at("packed_skipped").get<std::size_t>();
  return s;
}

Json local_json(const LocalLevel& l) {
  Json subs = Json::array();
  for (const auto& s : l.sub_levels) subs.push_back(sub_level_json(s));
  return {{"built", l.built},
          {"l_b", {{"formula", l.l_b.formula.get_str()}, {"used", l.l_b.used}, {"capped", l.l_b.capped}}},
          {"epsilon", optional_json(l.epsilon)},
          {"g_index", l.g_index},
          {"g_q", l.g_q},
          {"sub_levels", subs}};
}

LocalLevel local_from_json(const Json& j) {
  LocalLevel l;
  l.built = j.at("built").get<bool>();
  const auto& lb = j.at("l_b");
  l.l_b = {Integer(lb.at("formula").get<std::string>()), lb.at("used").get<unsigned>(),
           lb.at("capped").get<bool>()};
  if (!j.at("epsilon").is_null()) l.epsilon = magnitude_from_json(j.at("epsilon"));
  l.g_index = j.at("g_index").get<std::uint64_t>();
  l.g_q = j.at("g_q").get<std::int64_t>();
  for (const auto& s : j.at("sub_levels")) l.sub_levels.push_back(sub_level_from_json(s));
  return l;
}

}  // namespace

Json to_json(const CantorTree& tree) {
  Json nodes = Json::array();
  for (const auto& n : tree.nodes) {
    Json node = {{"id", n.id},
                 {"level", n.level},
                 {"parent", optional_json(n.parent)},
                 {"sub_level", n.sub_level},
                 {"ball", to_json(n.ball)},
                 {"family_index", optional_json(n.family_index)},
                 {"point", optional_json(n.point)},
                 {"mu", to_json(n.mu)},
                 {"children", n.children}};
    if (n.local.built) node["local"] = local_json(n.local);
    nodes.push_back(std::move(node));
  }
  return {{"status", tree.status},
          {"root", to_json(tree.root)},
          {"eta", to_json(tree.eta)},
          {"levels", tree.levels},
          {"nodes", nodes}};
}

CantorTree tree_from_json(const Json& j) {
  CantorTree tree{.status = j.at("status").get<std::string>(), .root = ball_from_json(j.at("root"))};
  tree.eta = rational_from_json(j.at("eta"));
  tree.levels = j.at("levels").get<std::vector<std::vector<std::size_t>>>();
  for (const auto& jn : j.at("nodes")) {
    CantorNode n{.id = jn.at("id").get<std::size_t>(),
                 .level = jn.at("level").get<unsigned>(),
                 .sub_level = jn.at("sub_level").get<unsigned>(),
                 .ball = ball_from_json(jn.at("ball"))};
    if (!jn.at("parent").is_null()) n.parent = jn.at("parent").get<std::size_t>();
    if (!jn.at("family_index").is_null()) n.family_index = jn.at("family_index").get<std::uint64_t>();
    if (!jn.at("point").is_null()) n.point = point_from_json(jn.at("point"));
    n.mu = enclosure_from_json(jn.at("mu"));
    n.children = jn.at("children").get<std::vector<std::size_t>>();
    if (jn.contains("local")) n.local = local_from_json(jn.at("local"));
    if (n.id != tree.nodes.size()) throw InvalidArgument("node ids must be 0, 1, 2, ... in order");
    tree.nodes.push_back(std::move(n));
  }
  for (const auto& level : tree.levels) {
    for (auto id : level) {
      if (id >= tree.nodes.size()) throw InvalidArgument("level lists an unknown node " + std::to_string(id));
    }
  }
  for (const auto& n : tree.nodes) {
    if (n.parent && *n.parent >= tree.nodes.size()) throw InvalidArgument("node with an unknown parent");
    for (auto c : n.children) {
      if (c >= tree.nodes.size()) throw InvalidArgument("node with an unknown child");
    }
  }
  return tree;
}

Json to_json(const Verification& v) {
  Json failing = Json::array();
  for (const auto& n : v.nodes) {
    bool ok = n.p1 && n.p2 && n.p3 && n.p4 && n.nested && n.conservation && n.volume_sum && n.p5 && n.membership &&
              n.conditions && n.node_bound;
    if (ok) continue;
    failing.push_back({{"id", n.id},
                       {"p1", n.p1},
                       {"p2", n.p2},
                       {"p3", n.p3},
                       {"p4", n.p4},
                       {"p5", n.p5},
                       {"nested", n.nested},
                       {"conservation", n.conservation},
                       {"volume_sum", n.volume_sum},
                       {"membership", n.membership},
                       {"conditions", n.conditions},
                       {"node_bound", n.node_bound}});
  }
  return {{"p0", v.p0},
          {"p1", v.p1},
          {"p2", v.p2},
          {"p3", v.p3},
          {"p4", v.p4},
          {"p5", v.p5},
          {"nested", v.nested},
          {"membership", v.membership},
          {"conditions", v.conditions},
          {"conservation", v.conservation},
          {"leaf_total_exact", v.leaf_total_exact},
          {"leaf_total", to_json(v.leaf_total)},
          {"node_bound", v.node_bound},
          {"node_bound_expected", v.node_bound_expected},
          {"node_bound_consistent", v.node_bound_consistent},
          {"node_bound_failures", v.node_bound_failures},
          {"level2_chain", v.level2_chain},
          {"all_exact_pass", v.all_exact_pass()},
          {"failing_nodes", failing},
          {"failures", v.failures}};
}

Json to_json(const BallBoundReport& r) {
  return {{"label", r.label},
          {"r_o", to_json(r.r_o)},
          {"c_target", to_json(r.c_target)},
          {"random_trials", r.random_trials},
          {"leaf_trials", r.leaf_trials},
          {"c_emp", to_json(r.c_emp)},
          {"within_target", r.within_target},
          {"seed", r.seed},
          {"single_chain", r.single_chain},
          {"reduced", r.reduced},
          {"split", r.split},
          {"level_above_two", r.level_above_two},
          {"case_i_sublevels", r.case_i_sublevels},
          {"case_ii_sublevels", r.case_ii_sublevels},
          {"case_i_bound", r.case_i_bound},
          {"case_ii_bound", r.case_ii_bound},
          {"lemma_conclusions", r.lemma_conclusions},
          {"structure_ok", r.structure_ok()}};
}

Json to_json(const Certificate& c) {
  Json out = {{"status", c.status},
              {"mode", to_string(c.mode)},
              {"claim", c.mode == Mode::Demo ? "demo constants: the node bound is not promised where l_B was capped"
                                             : "faithful constants"},
              {"params", to_json(c.params)},
              {"node_count", c.node_count},
              {"level_sizes", c.level_sizes},
              {"exact_checks_pass", c.exact_checks_pass()}};
  if (c.status == "constructed") out["verification"] = to_json(c.verification);
  out["ball_bound"] = c.ball_bound ? to_json(*c.ball_bound) : Json(nullptr);
  return out;
}

Json to_json(const MdpBound& m) {
  return {{"eta", to_json(m.eta)},
          {"c_emp", to_json(m.c_emp)},
          {"lower_bound", to_json(m.bound)},
          {"lower_bound_approx", to_double(m.bound)},
          {"constants", m.constants},
          {"caveat", m.caveat}};
}

Json to_json(const BoxDimension& b, const Rational& target) {
  Json counts = Json::array();
  for (const auto& c : b.counts) counts.push_back({{"Q", c.q}, {"delta", to_json(c.delta)}, {"N", c.boxes}});
  return {{"slope", b.slope},
          {"residuals", b.residuals},
          {"rms", b.rms},
          {"target", to_json(target)},
          {"target_approx", to_double(target)},
          {"counts", counts}};
}

void check_version(const Json& j) {
  if (!j.is_object() || !j.contains("version")) throw InvalidArgument("document has no version field");
  if (j.at("version") != kFormatVersion) {
    throw InvalidArgument("unsupported document version " + j.at("version").dump());
  }
}

}  // namespace mtp
