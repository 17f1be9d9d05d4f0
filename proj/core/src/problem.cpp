#include "nlea/problem.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nlea/expr.hpp"

namespace nlea {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& msg) {
  throw DimensionError("problem field '" + field + "': " + msg);
}

std::vector<std::string> names(const json& j, const std::string& field) {
  if (!j.is_array()) bad(field, "expected an array of names");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(e.get<std::string>());
  return out;
}

PolyVec parse_vec(const json& j, const std::vector<std::string>& vars,
                  const std::string& field) {
  if (!j.is_array() || j.empty()) bad(field, "expected a nonempty array of expressions");
  std::vector<Polynomial> entries;
  for (const auto& e : j) entries.push_back(parse_poly(e.get<std::string>(), vars));
  return PolyVec(std::move(entries));
}

PolyMatrix parse_matrix(const json& j, const std::vector<std::string>& vars,
                        const std::string& field) {
  if (!j.is_array() || j.empty()) bad(field, "expected a nonempty array of rows");
  std::vector<std::vector<Polynomial>> rows;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty()) bad(field, "each row must be a nonempty array");
    std::vector<Polynomial> r;
    for (const auto& e : row) r.push_back(parse_poly(e.get<std::string>(), vars));
    rows.push_back(std::move(r));
  }
  return PolyMatrix::from_rows(rows);
}

EigenPair parse_pair(const json& j, const std::vector<std::string>& vars,
                     const std::string& field) {
  EigenPair p;
  const std::string side = j.value("side", "right");
  if (side == "right")
    p.side = EigenSide::Right;
  else if (side == "left")
    p.side = EigenSide::Left;
  else
    bad(field, "side must be \"right\" or \"left\"");
  if (!j.contains("lambda") || !j.contains("vector")) bad(field, "needs lambda and vector");
  p.value = parse_poly(j.at("lambda").get<std::string>(), vars);
  p.vector = parse_vec(j.at("vector"), vars, field + ".vector");
  p.domain_note = j.value("domain_note", "");
  return p;
}

std::vector<std::vector<double>> parse_real_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) bad(field, "expected a matrix");
  std::vector<std::vector<double>> rows;
  for (const auto& row : j) {
    std::vector<double> r;
    for (const auto& e : row) r.push_back(e.get<double>());
    if (!rows.empty() && rows.front().size() != r.size()) bad(field, "ragged matrix");
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::LinearPartialAssign: return "linear_partial_assign";
    case ProblemKind::RightAssign: return "right_assign";
    case ProblemKind::LeftAssign: return "left_assign";
    case ProblemKind::VerifyOnly: return "verify_only";
    case ProblemKind::Simulate: return "simulate";
  }
  return "?";
}

std::vector<std::string> ProblemSpec::z_names() const {
  std::vector<std::string> z = x_names;
  z.insert(z.end(), e_names.begin(), e_names.end());
  return z;
}

ProblemSpec load_problem(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(static_cast<std::size_t>(e.byte > 0 ? e.byte - 1 : 0), "valid JSON",
                     e.what());
  }

  ProblemSpec spec;
  const std::string kind = j.value("kind", "");
  if (kind == "linear_partial_assign")
    spec.kind = ProblemKind::LinearPartialAssign;
  else if (kind == "right_assign")
    spec.kind = ProblemKind::RightAssign;
  else if (kind == "left_assign")
    spec.kind = ProblemKind::LeftAssign;
  else if (kind == "verify_only")
    spec.kind = ProblemKind::VerifyOnly;
  else if (kind == "simulate")
    spec.kind = ProblemKind::Simulate;
  else
    bad("kind", "unknown problem kind '" + kind + "'");

  if (j.contains("variables")) {
    const json& v = j.at("variables");
    if (v.contains("x")) spec.x_names = names(v.at("x"), "variables.x");
    if (v.contains("w")) spec.w_names = names(v.at("w"), "variables.w");
    if (v.contains("y")) spec.y_names = names(v.at("y"), "variables.y");
    if (v.contains("e")) spec.e_names = names(v.at("e"), "variables.e");
  }

  if (spec.kind == ProblemKind::LinearPartialAssign) {
    if (!j.contains("linear")) bad("linear", "required for linear_partial_assign");
    const json& lin = j.at("linear");
    ProblemSpec::LinearData d;
    d.A = parse_real_matrix(lin.at("A"), "linear.A");
    d.B = parse_real_matrix(lin.at("B"), "linear.B");
    d.S = parse_real_matrix(lin.at("S"), "linear.S");
    d.L = parse_real_matrix(lin.at("L"), "linear.L");
    const std::size_t n = d.A.size(), m = d.B.front().size(), nu = d.S.size();
    if (d.A.front().size() != n) bad("linear.A", "must be square");
    if (d.B.size() != n) bad("linear.B", "row count must match A");
    if (d.S.front().size() != nu) bad("linear.S", "must be square");
    if (d.L.size() != m || d.L.front().size() != nu)
      bad("linear.L", "must be m x nu");
    spec.linear = std::move(d);
  }

  if (j.contains("plant")) {
    if (spec.x_names.empty()) bad("variables.x", "required when a plant is given");
    const json& plant = j.at("plant");
    spec.f = parse_vec(plant.at("f"), spec.x_names, "plant.f");
    if (spec.f->dim() != static_cast<int>(spec.x_names.size()))
      bad("plant.f", "must have one entry per state variable");
    if (plant.contains("g")) {
      spec.g = parse_matrix(plant.at("g"), spec.x_names, "plant.g");
      if (spec.g->rows() != spec.f->dim()) bad("plant.g", "row count must match f");
    }
  }

  if (j.contains("observer")) {
    if (spec.x_names.empty()) bad("variables.x", "required when an observer block is given");
    const json& obs = j.at("observer");
    spec.f = parse_vec(obs.at("f"), spec.x_names, "observer.f");
    if (spec.f->dim() != static_cast<int>(spec.x_names.size()))
      bad("observer.f", "must have one entry per state variable");
    spec.obs_h = parse_vec(obs.at("h"), spec.x_names, "observer.h");
    if (spec.y_names.empty()) bad("variables.y", "required when an observer block is given");
    if (spec.obs_h->dim() != static_cast<int>(spec.y_names.size()))
      bad("observer.h", "must have one entry per output variable");
    if (spec.e_names.size() != spec.x_names.size())
      bad("variables.e", "need one error name per state variable");
    const json& p = obs.at("p");
    std::vector<std::string> p_vars = names(p.at("vars"), "observer.p.vars");
    if (p_vars.size() != spec.x_names.size() + spec.y_names.size())
      bad("observer.p.vars", "need n + m variable names (xi, y)");
    spec.obs_p = parse_vec(p.at("exprs"), p_vars, "observer.p.exprs");
    if (spec.obs_p->dim() != spec.f->dim())
      bad("observer.p.exprs", "must have one entry per state variable");
  }

  if (j.contains("exo")) {
    if (spec.w_names.empty()) bad("variables.w", "required when an exo block is given");
    const json& exo = j.at("exo");
    spec.s = parse_vec(exo.at("s"), spec.w_names, "exo.s");
    if (spec.s->dim() != static_cast<int>(spec.w_names.size()))
      bad("exo.s", "must have one entry per exo variable");
    if (exo.contains("targets"))
      for (const auto& t : exo.at("targets"))
        spec.targets.push_back(parse_pair(t, spec.w_names, "exo.targets[]"));
  }

  if (j.contains("design")) {
    const json& design = j.at("design");
    if (design.contains("l")) {
      spec.l = parse_vec(design.at("l"), spec.w_names, "design.l");
      if (spec.g && spec.l->dim() != spec.g->cols())
        bad("design.l", "must have one entry per input column of g");
    }
    if (design.contains("k")) {
      spec.k = parse_vec(design.at("k"), spec.x_names, "design.k");
      if (spec.g && spec.k->dim() != spec.g->cols())
        bad("design.k", "must have one entry per input column of g");
    }
    if (design.contains("rho")) {
      spec.rho = parse_vec(design.at("rho"), spec.z_names(), "design.rho");
      if (spec.s && spec.rho->dim() != spec.s->dim())
        bad("design.rho", "must have one entry per exo variable");
    }
    if (design.contains("r")) {
      const json& r = design.at("r");
      std::vector<std::string> r_vars = names(r.at("vars"), "design.r.vars");
      spec.r = parse_vec(r.at("exprs"), r_vars, "design.r.exprs");
      if (spec.s && spec.r->dim() != spec.s->dim())
        bad("design.r.exprs", "must have one entry per exo variable");
    }
  }

  const std::vector<std::string> cand_vars =
      spec.kind == ProblemKind::LeftAssign ? spec.z_names() : spec.x_names;
  if (j.contains("candidates"))
    for (const auto& c : j.at("candidates"))
      spec.candidates.push_back(parse_pair(c, cand_vars, "candidates[]"));
  if (j.contains("preserve"))
    for (const auto& c : j.at("preserve"))
      spec.preserve.push_back(parse_pair(c, cand_vars, "preserve[]"));

  if (j.contains("checks")) {
    const std::vector<std::string> check_vars =
        spec.obs_p ? spec.z_names() : spec.x_names;
    for (const auto& c : j.at("checks")) {
      ProblemSpec::Check chk;
      chk.system = c.value("system", "open");
      if (chk.system != "open" && chk.system != "closed")
        bad("checks[].system", "must be \"open\" or \"closed\"");
      if (c.contains("u")) {
        chk.input = c.at("u").get<double>();
        chk.has_input = true;
      }
      chk.pair = parse_pair(c.at("pair"), check_vars, "checks[].pair");
      spec.checks.push_back(std::move(chk));
    }
  }

  if (j.contains("simulate")) {
    const json& sim = j.at("simulate");
    ProblemSpec::SimBlock blk;
    if (sim.contains("x0"))
      for (const auto& e : sim.at("x0")) blk.x0.push_back(e.get<double>());
    if (sim.contains("sweep"))
      for (const auto& e : sim.at("sweep")) blk.sweep_values.push_back(e.get<double>());
    spec.sim = std::move(blk);
  }

  if (j.contains("options")) {
    const json& o = j.at("options");
    spec.degree = o.value("degree", spec.degree);
    spec.tol_rel = o.value("tol", spec.tol_rel);
    spec.grid = o.value("grid", spec.grid);
    spec.horizon = o.value("horizon", spec.horizon);
    spec.step = o.value("step", spec.step);
    spec.band = o.value("band", spec.band);
    spec.conv_tol = o.value("conv_tol", spec.conv_tol);
    if (o.contains("anchor")) spec.anchor = parse_real_matrix(o.at("anchor"), "options.anchor");
    if (o.contains("box")) {
      const json& b = o.at("box");
      SamplingBox box;
      for (const auto& e : b.at("lo")) box.lo.push_back(e.get<double>());
      for (const auto& e : b.at("hi")) box.hi.push_back(e.get<double>());
      if (box.lo.size() != box.hi.size()) bad("options.box", "lo/hi lengths differ");
      if (b.contains("constraints")) {
        const std::vector<std::string> box_vars =
            spec.obs_p ? spec.z_names()
                       : (!spec.x_names.empty() ? spec.x_names : spec.w_names);
        if (box.lo.size() != box_vars.size())
          bad("options.box", "dimension does not match the sampled space");
        for (const auto& e : b.at("constraints"))
          box.constraints.push_back(parse_poly(e.get<std::string>(), box_vars));
      }
      spec.box = std::move(box);
    }
  }

  // Kind-level requirements.
  switch (spec.kind) {
    case ProblemKind::RightAssign:
      if (!spec.f || !spec.g) bad("plant", "right_assign needs f and g");
      if (!spec.s) bad("exo", "right_assign needs an exo system");
      if (!spec.l || !spec.k) bad("design", "right_assign needs l and k");
      break;
    case ProblemKind::LeftAssign:
      if (!spec.obs_p) bad("observer", "left_assign needs an observer block");
      if (!spec.s) bad("exo", "left_assign needs an exo system");
      break;
    case ProblemKind::Simulate:
      if (!spec.f) bad("plant", "simulate needs a plant");
      if (!spec.sim || spec.sim->x0.empty()) bad("simulate.x0", "required");
      break;
    default:
      break;
  }
  return spec;
}

ProblemSpec load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open problem file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_problem(ss.str());
}

}  // namespace nlea
