// Batch front end: one subcommand per operation, deterministic output.
// Exit status: 0 success, 1 failed verification, 2 usage or input error.

#include "presburger/presburger.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace presburger;

namespace {

struct Options {
  bool json = false;
  std::uint64_t seed = 0;
  std::uint64_t trials = 1000;
  std::vector<std::string> boxes;
  std::vector<std::string> params;
  std::vector<std::string> symbolic;
  std::string vars;
};

class UsageError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string read_source(const std::string& arg) {
  if (arg.empty() || arg[0] != '@') return arg;
  std::ifstream in(arg.substr(1));
  if (!in) throw UsageError("cannot read " + arg.substr(1));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Formula read_formula(const std::string& arg) { return parse(read_source(arg)); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::pair<std::string, std::string> key_value(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("expected name=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

// Parameters with integer values, substituted into the formula.
Formula substitute_params(Formula f, const Options& opt) {
  for (const auto& p : opt.params) {
    auto [name, value] = key_value(p);
    if (value.find(';') != std::string::npos) throw UsageError("parameter " + name + " needs an integer value here");
    f = substitute(f, name, LinearTerm(parse_int(value)));
  }
  return f;
}

// Parameters as elements of one model M_s; integers are standard elements.
Assignment<NonstdInt> model_params(const Options& opt) {
  std::size_t levels = 0;
  for (const auto& p : opt.params) {
    auto value = key_value(p).second;
    auto semi = value.find(';');
    if (semi != std::string::npos) levels = split(value.substr(0, semi), ',').size();
  }
  Assignment<NonstdInt> out;
  for (const auto& p : opt.params) {
    auto [name, value] = key_value(p);
    out[name] = NonstdInt::parse(value, levels);
  }
  return out;
}

std::vector<std::string> param_names(const Options& opt) {
  std::vector<std::string> out = opt.symbolic;
  for (const auto& p : opt.params) out.push_back(key_value(p).first);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// --vars if given, else the free variables that are not parameters.
std::vector<std::string> coordinates(const Formula& f, const Options& opt, const std::vector<std::string>& params) {
  if (!opt.vars.empty()) return split(opt.vars, ',');
  std::vector<std::string> out;
  for (const auto& v : free_vars(f))
    if (std::find(params.begin(), params.end(), v) == params.end()) out.push_back(v);
  return out;
}

Box parse_boxes(const Options& opt) {
  Box box;
  for (const auto& b : opt.boxes) {
    auto [name, range] = key_value(b);
    auto dots = range.find("..");
    if (dots == std::string::npos) throw UsageError("box needs var=lo..hi, got '" + b + "'");
    box.push_back({name, std::stoll(range.substr(0, dots)), std::stoll(range.substr(dots + 2))});
  }
  return box;
}

void emit(const Options& opt, const Json& j, const std::string& text) {
  if (opt.json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

std::string assignment_text(const Assignment<NonstdInt>& at) {
  std::string out;
  for (const auto& [k, v] : at) out += (out.empty() ? "" : " ") + k + "=" + v.literal();
  return out;
}

// ---------------------------------------------------------------------------

int cmd_qe(const Options& opt, const std::string& src) {
  Formula out = eliminate(substitute_params(read_formula(src), opt));
  emit(opt, Json{{"result", to_string(out)}}, to_string(out) + "\n");
  return 0;
}

int cmd_normalize(const Options& opt, const std::string& src) {
  Formula out = normalize(read_formula(src));
  emit(opt, Json{{"result", to_string(out)}}, to_string(out) + "\n");
  return 0;
}

int cmd_dnf(const Options& opt, const std::string& src) {
  Json arr = Json::array();
  std::string text;
  for (const auto& c : dnf(eliminate(read_formula(src)))) {
    std::string line = to_string(to_formula(c));
    arr.push_back(line);
    text += line + "\n";
  }
  emit(opt, Json{{"disjuncts", arr}}, text);
  return 0;
}

int cmd_decide(const Options& opt, const std::string& src) {
  Formula f = eliminate(read_formula(src));
  Assignment<NonstdInt> at = model_params(opt);
  for (const auto& v : free_vars(f))
    if (!at.count(v)) throw UsageError("free variable '" + v + "' needs --param");
  bool result = at.empty() ? decide(f) : eval(f, at);
  emit(opt, Json{{"result", result}}, std::string(result ? "true" : "false") + "\n");
  return 0;
}

int cmd_enum(const Options& opt, const std::string& src) {
  Formula f = eliminate(substitute_params(read_formula(src), opt));
  Box box = parse_boxes(opt);
  auto points = enumerate(f, box);
  Json vars = Json::array(), pts = Json::array();
  for (const auto& r : box) vars.push_back(r.var);
  std::string text;
  for (const auto& p : points) {
    pts.push_back(p);
    for (std::size_t i = 0; i < p.size(); ++i) text += (i ? "," : "") + std::to_string(p[i]);
    text += "\n";
  }
  emit(opt, Json{{"vars", vars}, {"points", pts}}, text);
  return 0;
}

int cmd_cells(const Options& opt, const std::string& src, const std::vector<std::string>& refine_src,
              const std::vector<std::string>& fn_src, bool certify_it) {
  Formula B = substitute_params(read_formula(src), opt);
  std::vector<std::string> params = opt.symbolic;
  std::vector<std::string> vars = coordinates(B, opt, params);
  std::vector<Formula> refine;
  for (const auto& r : refine_src) refine.push_back(read_formula(r));
  std::vector<FunctionSpec> funcs;
  for (const auto& f : fn_src) {
    auto colon = f.find(':');
    if (colon == std::string::npos) throw UsageError("function needs outs:graph, got '" + f + "'");
    funcs.push_back({read_formula(f.substr(colon + 1)), split(f.substr(0, colon), ',')});
  }
  Decomposition d = decompose(B, refine, funcs, vars, params);
  Json j = to_json(d);
  std::string text;
  for (std::size_t i = 0; i < d.pieces.size(); ++i) {
    const auto& p = d.pieces[i];
    text += "cell " + std::to_string(i);
    if (!refine.empty()) text += " [part " + std::to_string(p.part) + "]";
    text += ": " + to_string(cell_to_formula(p.cell)) + "\n";
    for (std::size_t f = 0; f < p.rules.size(); ++f)
      for (std::size_t o = 0; o < p.rules[f].size(); ++o)
        text += "  " + funcs[f].outputs[o] + " = " + p.rules[f][o].to_string() + "\n";
  }
  int status = 0;
  if (certify_it) {
    CellReport rep = certify(d, B, refine, funcs);
    j["certificate"] = Json{{"pass", rep.pass}, {"checks", rep.checks}, {"failures", rep.failures}};
    text += std::string("certificate: ") + (rep.pass ? "PASS" : "FAIL") + " (" + std::to_string(rep.checks) + " checks)\n";
    for (const auto& f : rep.failures) text += "  " + f + "\n";
    status = rep.pass ? 0 : 1;
  }
  emit(opt, j, text);
  return status;
}

int cmd_normal_form(const Options& opt, const std::string& src, bool certify_it) {
  Formula X = read_formula(src);
  std::vector<std::string> params = param_names(opt);
  NormalForm nf = normal_form(X, coordinates(X, opt, params), params);
  Json j = to_json(nf);
  std::string text = "r=" + std::to_string(nf.r) + " s=" + std::to_string(nf.s) + "\n" + j.dump(2) + "\n";
  if (!opt.params.empty()) {
    Assignment<NonstdInt> at = model_params(opt);
    std::size_t n = ubd_at(nf, at);
    j["ubd_at"] = Json{{"params", assignment_text(at)}, {"ubd", n}};
    text += "ubd at " + assignment_text(at) + " = " + std::to_string(n) + "\n";
  }
  int status = 0;
  if (certify_it) {
    NormalFormReport rep = certify(nf, X);
    j["certificate"] = Json{{"pass", rep.pass}, {"checks", rep.checks}, {"failures", rep.failures}};
    text += std::string("certificate: ") + (rep.pass ? "PASS" : "FAIL") + " (" + std::to_string(rep.checks) + " checks)\n";
    for (const auto& f : rep.failures) text += "  " + f + "\n";
    status = rep.pass ? 0 : 1;
  }
  emit(opt, j, text);
  return status;
}

int cmd_bounded(const Options& opt, const std::string& src) {
  Formula X = read_formula(src);
  std::vector<std::string> params = param_names(opt);
  std::vector<std::string> vars = coordinates(X, opt, params);
  Formula cond = bounded_condition(X, vars);
  Json j{{"condition", to_string(cond)}};
  std::string text = "condition: " + to_string(cond) + "\n";
  if (params.empty()) {
    bool b = decide(cond);
    j["bounded"] = b;
    text = b ? "bounded\n" : "unbounded\n";
  } else if (!opt.params.empty()) {
    Assignment<NonstdInt> at = model_params(opt);
    bool b = eval(cond, at);
    j["bounded"] = b;
    text += assignment_text(at) + ": " + (b ? "bounded" : "unbounded") + "\n";
  }
  emit(opt, j, text);
  return 0;
}

int cmd_laws(const Options& opt, const std::string& xsrc, const std::string& ysrc) {
  Formula X = read_formula(xsrc), Y = read_formula(ysrc);
  auto xs = coordinates(X, Options{}, {}), ys = coordinates(Y, Options{}, {});
  LawsReport rep = product_union_laws(X, xs, Y, ys);
  Json j{{"ubd_x", rep.ubd_x},         {"ubd_y", rep.ubd_y},         {"ubd_union", rep.ubd_union},
         {"ubd_product", rep.ubd_product}, {"union_law", rep.union_law}, {"product_law", rep.product_law}};
  std::string text = "ubd(X)=" + std::to_string(rep.ubd_x) + " ubd(Y)=" + std::to_string(rep.ubd_y) +
                     " ubd(X|Y)=" + std::to_string(rep.ubd_union) + " ubd(XxY)=" + std::to_string(rep.ubd_product) +
                     "\nunion law: " + (rep.union_law ? "PASS" : "FAIL") +
                     "\nproduct law: " + (rep.product_law ? "PASS" : "FAIL") + "\n";
  emit(opt, j, text);
  return rep.pass() ? 0 : 1;
}

int cmd_axioms(const Options& opt, std::size_t levels) {
  AxiomReport rep = check_zgroup_axioms(levels, opt.trials, opt.seed);
  Json j{{"levels", levels}, {"trials", opt.trials}, {"seed", opt.seed}, {"pass", rep.pass}, {"checks", rep.checks}};
  if (!rep.pass) j["counterexample"] = rep.counterexample;
  std::string text = std::string(rep.pass ? "PASS" : "FAIL") + " levels=" + std::to_string(levels) +
                     " trials=" + std::to_string(opt.trials) + " checks=" + std::to_string(rep.checks) + "\n";
  if (!rep.pass) text += "counterexample: " + rep.counterexample + "\n";
  emit(opt, j, text);
  return rep.pass ? 0 : 1;
}

ExtGroupSpec read_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
  return ext_spec_from_json(j);
}

int cmd_group(const Options& opt, const std::string& op, const std::string& path, const std::vector<std::string>& args) {
  ExtGroupSpec spec = read_spec(path);
  auto need = [&](std::size_t n) {
    if (args.size() != n) throw UsageError("group " + op + " takes " + std::to_string(n) + " element(s)");
  };
  if (op == "add" || op == "neg") {
    need(op == "add" ? 2 : 1);
    ExtElement g = parse_ext_element(args[0], spec);
    ExtElement out = op == "add" ? ext_add(g, parse_ext_element(args[1], spec), spec) : ext_neg(g, spec);
    emit(opt, to_json(out), out.to_string() + "\n");
    return 0;
  }
  if (op == "cocycle") {
    need(2);
    ModelTuple x = parse_model_tuple(args[0], spec.s(), spec.levels());
    ModelTuple y = parse_model_tuple(args[1], spec.s(), spec.levels());
    ModelTuple g = cocycle(x, y, spec);
    emit(opt, Json{{"cocycle", to_json(g)}}, "(" + tuple_string(g) + ")\n");
    return 0;
  }
  need(0);
  ExtensionReport rep = verify_extension(spec, opt.trials, opt.seed);
  Json checks = Json::object();
  std::string text = std::string(rep.pass ? "PASS" : "FAIL") + " r=" + std::to_string(spec.r) +
                     " s=" + std::to_string(spec.s()) + " trials=" + std::to_string(opt.trials) +
                     " seed=" + std::to_string(opt.seed) + "\n";
  for (const auto& [law, n] : rep.checks) {
    checks[law] = n;
    text += "  " + law + ": " + std::to_string(n) + "\n";
  }
  text += "  ubd(G) = " + std::to_string(rep.ubd_kernel) + " + " + std::to_string(rep.ubd_quotient) + "\n";
  for (const auto& f : rep.failures) text += "failure: " + f + "\n";
  Json j{{"pass", rep.pass},
         {"checks", checks},
         {"ubd_kernel", rep.ubd_kernel},
         {"ubd_quotient", rep.ubd_quotient},
         {"failures", rep.failures}};
  emit(opt, j, text);
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Presburger arithmetic toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_flag("--json", opt.json, "machine-readable JSON output");
  app.add_option("--seed", opt.seed, "random seed")->capture_default_str();
  app.add_option("--trials", opt.trials, "number of samples")->capture_default_str();
  app.add_option("--box", opt.boxes, "enumeration range var=lo..hi (repeatable)")->allow_extra_args(false);
  app.add_option("--param", opt.params, "parameter value name=v, v an integer or q1,...,qs;m (repeatable)")->allow_extra_args(false);
  app.add_option("--symbolic", opt.symbolic, "parameter kept symbolic (repeatable)")->allow_extra_args(false);
  app.add_option("--vars", opt.vars, "coordinates in order, comma separated");

  std::string formula, second, spec_path, op;
  std::vector<std::string> refine, functions, elements;
  bool certify_it = false;
  std::size_t levels = 1;
  std::function<int()> run;

  auto formula_cmd = [&](const char* name, const char* help, std::function<int()> fn) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("formula", formula, "formula text, or @file")->required();
    sub->callback([&run, fn] { run = fn; });
    return sub;
  };
  formula_cmd("qe", "eliminate quantifiers", [&] { return cmd_qe(opt, formula); });
  formula_cmd("normalize", "canonical quantifier-free normal form", [&] { return cmd_normalize(opt, formula); });
  formula_cmd("dnf", "disjunctive normal form after elimination", [&] { return cmd_dnf(opt, formula); });
  formula_cmd("decide", "truth of a sentence, or of a formula at --param values in M_s",
              [&] { return cmd_decide(opt, formula); });
  formula_cmd("enum", "points of a formula in the --box ranges", [&] { return cmd_enum(opt, formula); });
  auto* cells = formula_cmd("cells", "cell decomposition",
                            [&] { return cmd_cells(opt, formula, refine, functions, certify_it); });
  cells->add_option("--refine", refine, "refinement part (repeatable)")->allow_extra_args(false);
  cells->add_option("--function", functions, "definable function outs:graph (repeatable)")->allow_extra_args(false);
  cells->add_flag("--certify", certify_it, "check the decomposition with decide");
  formula_cmd("ubd", "degree of unboundedness and the normal-form map",
              [&] { return cmd_normal_form(opt, formula, false); });
  formula_cmd("normal-form", "normal-form bijection with its certificate",
              [&] { return cmd_normal_form(opt, formula, true); });
  formula_cmd("bounded", "boundedness, or the parameter condition for it", [&] { return cmd_bounded(opt, formula); });
  auto* laws = app.add_subcommand("laws", "union and product laws for ubd");
  laws->add_option("X", formula)->required();
  laws->add_option("Y", second)->required();
  laws->callback([&] { run = [&] { return cmd_laws(opt, formula, second); }; });
  auto* axioms = app.add_subcommand("axioms", "sample the Z-group axioms in M_s");
  axioms->add_option("--levels", levels, "infinite levels s")->capture_default_str();
  axioms->callback([&] { run = [&] { return cmd_axioms(opt, levels); }; });
  auto* group = app.add_subcommand("group", "extension groups Z^r x O(a) / sum Z(v_i, b_i)");
  group->add_option("op", op, "add | neg | cocycle | verify")
      ->required()
      ->check(CLI::IsMember({"add", "neg", "cocycle", "verify"}));
  group->add_option("spec", spec_path, "spec file {s, r, a?, b, v}")->required();
  group->add_option("elements", elements, "elements (u | x), or x-parts for cocycle");
  group->callback([&] { run = [&] { return cmd_group(opt, op, spec_path, elements); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return run();
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
  } catch (const BoxTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const EvalError& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 2;
}
