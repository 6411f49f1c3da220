// SPDX-License-Identifier: MIT
//
// Command-line front end. One subcommand per library operation, text or
// JSON output, deterministic byte-for-byte for identical inputs and seeds.
//
// Exit codes: 0 success / property holds, 1 property fails or a
// counterexample was found, 2 usage or input error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "flowlat/flowlat.hpp"

namespace {

using namespace flowlat;
using json = nlohmann::ordered_json;

struct Opts {
  std::string input;       // first positional: program or environment file
  std::string fixed_input; // second positional of test-equiv
  std::string lattice = "two-point";
  std::string env_inline;
  std::string env_file;
  std::string post_inline;
  std::string post_file;
  std::string pc;
  std::string vars;
  std::string domain = "0,1";
  std::uint64_t fuel = 64;
  std::string mode = "exhaustive";
  std::uint64_t seed = 0;
  std::uint64_t trials = 100;
  std::string format = "text";
  std::string emit_env;
  bool trace = false;
  bool independence = false;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CommandPtr load_program(const std::string& path, bool allow_fixed) {
  try {
    return parse_program(slurp(path), ParseOptions{allow_fixed});
  } catch (const ParseError& e) {
    throw Error(path + ":" + e.what());
  }
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      std::string tok(detail::trim(std::string_view(s).substr(start, i - start)));
      if (!tok.empty()) out.push_back(std::move(tok));
      start = i + 1;
    }
  }
  return out;
}

/// Collect the variable names an environment mentions on the left of ':'
/// without committing to a lattice yet.
void scan_env_names(std::string_view text, bool inline_form,
                    std::set<std::string>& out) {
  auto take = [&](std::string_view item) {
    auto colon = item.find(':');
    if (colon == std::string_view::npos) return;
    std::string var(detail::trim(item.substr(0, colon)));
    if (detail::valid_ident(var)) out.insert(std::move(var));
  };
  if (inline_form) {
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
      if (i < text.size() && text[i] == '{') ++depth;
      if (i < text.size() && text[i] == '}') --depth;
      if (i == text.size() || (text[i] == ',' && depth == 0)) {
        take(text.substr(start, i - start));
        start = i + 1;
      }
    }
  } else {
    for (const auto& [line_no, line] : detail::data_lines(text)) take(line);
  }
}

struct Loaded {
  CommandPtr program;
  CommandPtr fixed_program;
  LatticePtr lat;
  std::optional<TypeEnv> env;
  std::optional<TypeEnv> post;
  Elem pc;
};

LatticePtr resolve_lattice(const std::string& spec,
                           std::vector<std::string> universe) {
  if (spec == "two-point") return Lattice::two_point();
  if (spec == "diamond") return Lattice::diamond();
  if (spec == "powerset") {
    if (universe.empty())
      throw Error("the powerset lattice needs at least one variable; "
                  "name some with --vars");
    return Lattice::powerset(std::move(universe));
  }
  try {
    return Lattice::parse_file(slurp(spec));
  } catch (const ParseError& e) {
    throw Error(spec + ":" + e.what());
  } catch (const LatticeError& e) {
    throw Error(spec + ": " + e.what());
  }
}

std::optional<TypeEnv> load_env(const LatticePtr& lat,
                                const std::string& inline_str,
                                const std::string& file_text,
                                const std::string& file_name,
                                const char* flag) {
  std::optional<TypeEnv> out;
  if (!file_name.empty()) {
    try {
      out = TypeEnv::parse(lat, file_text);
    } catch (const ParseError& e) {
      throw Error(file_name + ":" + e.what());
    }
  }
  if (!inline_str.empty()) {
    TypeEnv given = TypeEnv::parse_inline(lat, inline_str);
    if (!out) out.emplace(lat);
    for (const auto& [var, level] : given) {
      if (!file_name.empty() && out->contains(var) &&
          !(out->get(var) == level))
        std::cerr << "warning: " << flag << " overrides " << var << " from "
                  << file_name << "\n";
      out->set(var, level);
    }
  }
  return out;
}

const TypeEnv& need(const std::optional<TypeEnv>& env, const char* what) {
  if (!env) throw Error(std::string("missing required ") + what);
  return *env;
}

/// Load everything a typical subcommand wants. The lattice is resolved
/// first; environments are parsed against it afterwards. The powerset
/// universe is the program's variables plus every environment's variables
/// plus --vars.
Loaded load_common(const Opts& o, bool fixed_main) {
  Loaded l;
  if (!o.input.empty()) l.program = load_program(o.input, fixed_main);
  if (!o.fixed_input.empty()) l.fixed_program = load_program(o.fixed_input, true);

  const std::string env_text = o.env_file.empty() ? "" : slurp(o.env_file);
  const std::string post_text = o.post_file.empty() ? "" : slurp(o.post_file);

  std::set<std::string> names;
  for (const Command* c : {l.program.get(), l.fixed_program.get()}) {
    if (!c) continue;
    VarSets vs = free_vars(*c);
    names.insert(vs.floating.begin(), vs.floating.end());
    for (const auto& ref : vs.fixed) names.insert(ref.base);
  }
  if (!o.env_file.empty()) scan_env_names(env_text, false, names);
  if (!o.env_inline.empty()) scan_env_names(o.env_inline, true, names);
  if (!o.post_file.empty()) scan_env_names(post_text, false, names);
  if (!o.post_inline.empty()) scan_env_names(o.post_inline, true, names);
  for (auto& v : split_commas(o.vars)) {
    if (!detail::valid_ident(v)) throw Error("invalid variable name '" + v + "'");
    names.insert(std::move(v));
  }

  l.lat = resolve_lattice(o.lattice, {names.begin(), names.end()});
  l.env = load_env(l.lat, o.env_inline, env_text, o.env_file, "--env");
  l.post = load_env(l.lat, o.post_inline, post_text, o.post_file, "--post");
  l.pc = o.pc.empty() ? l.lat->bottom() : l.lat->parse_elem(o.pc);
  return l;
}

std::vector<Value> parse_domain(const std::string& s) {
  std::vector<Value> out;
  for (const auto& tok : split_commas(s)) {
    if (!detail::valid_integer(tok))
      throw Error("invalid domain value '" + tok + "'");
    out.emplace_back(tok);
  }
  if (out.empty()) throw Error("value domain is empty");
  return out;
}

TestMode make_mode(const Opts& o) {
  if (o.mode == "exhaustive") return {};
  return TestMode::random(o.seed, o.trials);
}

// ---- output ---------------------------------------------------------------

json elem_to_json(const Lattice& lat, const Elem& e) {
  if (lat.is_powerset()) return json(lat.members(e));
  return json(lat.elem_name(e));
}

json env_to_json(const TypeEnv& env) {
  json out = json::object();
  for (const auto& [var, level] : env)
    out[var] = elem_to_json(*env.lattice(), level);
  return out;
}

json store_to_json(const Store& s) {
  json out = json::object();
  for (const auto& [ref, value] : s) out[ref.str()] = value.str();
  return out;
}

json witness_to_json(const Lattice& lat, const Witness& w) {
  json out = json::object();
  out["level"] = w.level ? elem_to_json(lat, *w.level) : json(nullptr);
  out["variable"] = w.variable;
  out["sigma"] = store_to_json(w.sigma);
  out["rho"] = store_to_json(w.rho);
  return out;
}

void emit_json(const json& j) { std::cout << j.dump(2) << "\n"; }

void print_trace_comments(const std::vector<std::string>& lines) {
  for (const auto& l : lines) std::cout << "# " << l << "\n";
}

void print_store_indented(const Store& s) {
  for (const auto& [ref, value] : s)
    std::cout << "  " << ref.str() << " = " << value.str() << "\n";
}

int print_verdict(const Opts& o, const char* subcommand, bool ok,
                  const char* yes, const char* no) {
  if (o.format == "json") {
    json j;
    j["subcommand"] = subcommand;
    j["verdict"] = ok;
    emit_json(j);
  } else {
    std::cout << "verdict: " << (ok ? yes : no) << "\n";
  }
  return ok ? 0 : 1;
}

int print_check_result(const Opts& o, const char* subcommand,
                       const Lattice& lat, const CheckResult& r) {
  if (o.format == "json") {
    json j;
    j["subcommand"] = subcommand;
    j["verdict"] = outcome_name(r.outcome);
    j["witness"] = r.witness ? witness_to_json(lat, *r.witness) : json(nullptr);
    json stats = json::object();
    stats["pairs_tested"] = r.pairs_tested;
    stats["skipped_nontermination"] = r.skipped_nontermination;
    stats["termination_mismatches"] = r.termination_mismatches;
    j["stats"] = stats;
    emit_json(j);
  } else {
    std::cout << "verdict: " << outcome_name(r.outcome) << "\n";
    if (r.witness) {
      const Witness& w = *r.witness;
      if (w.level) std::cout << "level: " << lat.elem_name(*w.level) << "\n";
      std::cout << "variable: " << w.variable << "\n";
      std::cout << "sigma:\n";
      print_store_indented(w.sigma);
      std::cout << "rho:\n";
      print_store_indented(w.rho);
    }
    std::cout << "stats: pairs_tested=" << r.pairs_tested
              << " skipped_nontermination=" << r.skipped_nontermination
              << " termination_mismatches=" << r.termination_mismatches
              << "\n";
  }
  return r.outcome == Outcome::Counterexample ? 1 : 0;
}

int print_environment(const Opts& o, const char* subcommand,
                      const TypeEnv& env,
                      const std::vector<std::string>& trace_lines,
                      bool independence) {
  if (o.format == "json") {
    json j;
    j["subcommand"] = subcommand;
    if (independence) j["independence"] = true;
    j["environment"] = env_to_json(env);
    if (!trace_lines.empty()) j["trace"] = trace_lines;
    emit_json(j);
  } else {
    print_trace_comments(trace_lines);
    if (independence) std::cout << "# independence\n";
    std::cout << env.render();
  }
  return 0;
}

// ---- subcommands ----------------------------------------------------------

int run_infer(const Opts& o) {
  Loaded l = load_common(o, false);
  Trace trace;
  TypeEnv out = spc(l.pc, need(l.env, "--env or --env-file"), *l.program,
                    o.trace ? &trace : nullptr);
  std::vector<std::string> lines;
  if (o.trace) lines = render_trace(*l.lat, trace);
  return print_environment(o, "infer", out, lines, false);
}

int run_check(const Opts& o) {
  Loaded l = load_common(o, false);
  bool ok = check_judgement(l.pc, need(l.env, "--env or --env-file"),
                            *l.program, need(l.post, "--post or --post-file"));
  return print_verdict(o, "check", ok, "holds", "does not hold");
}

int run_principal(const Opts& o) {
  CommandPtr c = load_program(o.input, false);
  std::set<std::string> names;
  VarSets vs = free_vars(*c);
  names.insert(vs.floating.begin(), vs.floating.end());
  for (auto& v : split_commas(o.vars)) {
    if (!detail::valid_ident(v)) throw Error("invalid variable name '" + v + "'");
    names.insert(std::move(v));
  }
  if (names.empty())
    throw Error("the program has no variables; name a universe with --vars");
  PrincipalTyping pt = principal(*c, {names.begin(), names.end()});
  std::vector<std::string> lines;
  if (o.trace) {
    Trace trace;
    spc(pt.lat->bottom(), pt.delta0, *c, &trace);
    lines = render_trace(*pt.lat, trace);
  }
  TypeEnv shown = o.independence ? to_independence(pt.delta).map : pt.delta;
  return print_environment(o, "principal", shown, lines, o.independence);
}

int run_derive(const Opts& o) {
  Loaded l = load_common(o, false);
  const TypeEnv& env = need(l.env, "--env or --env-file");
  PrincipalTyping pt = principal(*l.program, env.domain());
  return print_environment(o, "derive", derive_smallest(pt, env), {}, false);
}

int run_reverse(const Opts& o) {
  Loaded l = load_common(o, false);
  const TypeEnv& post = need(l.post, "--post or --post-file");
  PrincipalTyping pt = principal(*l.program, post.domain());
  return print_environment(o, "reverse", derive_greatest(pt, post), {}, false);
}

int run_subsume(const Opts& o) {
  Loaded l = load_common(o, false);
  const TypeEnv& pre = need(l.env, "--env or --env-file");
  const TypeEnv& post = need(l.post, "--post or --post-file");
  PrincipalTyping pt = principal(*l.program, pre.domain());
  bool ok = subsumes(Typing{pt.delta0, pt.delta}, Typing{pre, post});
  return print_verdict(o, "subsume", ok, "subsumes", "does not subsume");
}

int run_dual(const Opts& o) {
  const std::string text = slurp(o.input);
  const bool indep_in = has_independence_marker(text);
  std::set<std::string> names;
  scan_env_names(text, false, names);
  for (auto& v : split_commas(o.vars)) {
    if (!detail::valid_ident(v)) throw Error("invalid variable name '" + v + "'");
    names.insert(std::move(v));
  }
  if (names.empty()) throw Error("the environment file names no variables");
  LatticePtr lat = Lattice::powerset({names.begin(), names.end()});
  TypeEnv env(lat);
  try {
    env = TypeEnv::parse(lat, text);
  } catch (const ParseError& e) {
    throw Error(o.input + ":" + e.what());
  }
  TypeEnv out = indep_in ? from_independence(IndependenceEnv{env})
                         : to_independence(env).map;
  return print_environment(o, "dual", out, {}, !indep_in);
}

int run_transform(const Opts& o) {
  Loaded l = load_common(o, false);
  Trace trace;
  Translation tr = translate(l.pc, need(l.env, "--env or --env-file"),
                             *l.program, o.trace ? &trace : nullptr);
  std::vector<std::string> lines;
  if (o.trace) lines = render_trace(*l.lat, trace);
  const std::string program_line = to_string(*tr.program);
  if (!o.emit_env.empty()) {
    std::ofstream out(o.emit_env);
    if (!out) throw Error("cannot write '" + o.emit_env + "'");
    out << tr.post.render();
  }
  if (o.format == "json") {
    json j;
    j["subcommand"] = "transform";
    j["program"] = program_line;
    j["environment"] = env_to_json(tr.post);
    if (!lines.empty()) j["trace"] = lines;
    emit_json(j);
  } else {
    print_trace_comments(lines);
    std::cout << program_line << "\n";
  }
  return 0;
}

int run_check_fixed(const Opts& o) {
  Loaded l = load_common(o, true);
  bool ok = check_fixed(*l.lat, l.pc, *l.program);
  return print_verdict(o, "check-fixed", ok, "well-typed", "ill-typed");
}

int run_test_ni(const Opts& o) {
  Loaded l = load_common(o, false);
  CheckResult r = ni_check(*l.program, need(l.env, "--env or --env-file"),
                           need(l.post, "--post or --post-file"),
                           parse_domain(o.domain), make_mode(o), o.fuel);
  return print_check_result(o, "test-ni", *l.lat, r);
}

int run_test_safety(const Opts& o) {
  Loaded l = load_common(o, false);
  CheckResult r = safety_check(*l.program, l.pc,
                               need(l.post, "--post or --post-file"),
                               parse_domain(o.domain), o.fuel, make_mode(o));
  return print_check_result(o, "test-safety", *l.lat, r);
}

int run_test_equiv(const Opts& o) {
  Loaded l = load_common(o, false);
  CheckResult r = equiv_check(*l.program, *l.fixed_program,
                              need(l.env, "--env or --env-file"),
                              need(l.post, "--post or --post-file"),
                              parse_domain(o.domain), o.fuel, make_mode(o));
  return print_check_result(o, "test-equiv", *l.lat, r);
}

int run_lattice_validate(const Opts& o) {
  const std::string text = slurp(o.input);
  LatticePtr lat;
  try {
    lat = Lattice::parse_file(text);
  } catch (const Error& e) {
    if (o.format == "json") {
      json j;
      j["subcommand"] = "lattice-validate";
      j["verdict"] = false;
      j["error"] = e.what();
      emit_json(j);
    } else {
      std::cerr << "invalid: " << e.what() << "\n";
    }
    return 1;
  }
  if (o.format == "json") {
    json j;
    j["subcommand"] = "lattice-validate";
    j["verdict"] = true;
    j["name"] = lat->name();
    j["elements"] = lat->size();
    j["height"] = lat->height();
    j["bottom"] = lat->elem_name(lat->bottom());
    j["top"] = lat->elem_name(lat->top());
    emit_json(j);
  } else {
    std::cout << "lattice: " << lat->name() << "\n"
              << "elements: " << lat->size() << "\n"
              << "height: " << lat->height() << "\n"
              << "bottom: " << lat->elem_name(lat->bottom()) << "\n"
              << "top: " << lat->elem_name(lat->top()) << "\n";
  }
  return 0;
}

// ---- wiring -----------------------------------------------------------------

void add_format(CLI::App* sub, Opts& o) {
  sub->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
}

void add_lattice(CLI::App* sub, Opts& o) {
  sub->add_option("--lattice", o.lattice,
                  "two-point, diamond, powerset, or a lattice file")
      ->capture_default_str();
  sub->add_option("--vars", o.vars,
                  "extra variables for the powerset universe (comma separated)");
}

void add_env(CLI::App* sub, Opts& o) {
  sub->add_option("--env", o.env_inline, "pre environment, e.g. \"l:L,h:H\"");
  sub->add_option("--env-file", o.env_file, "pre environment file");
}

void add_post(CLI::App* sub, Opts& o) {
  sub->add_option("--post", o.post_inline, "post environment, inline form");
  sub->add_option("--post-file", o.post_file, "post environment file");
}

void add_pc(CLI::App* sub, Opts& o) {
  sub->add_option("--pc", o.pc, "context level (default: lattice bottom)");
}

void add_harness(CLI::App* sub, Opts& o) {
  sub->add_option("--domain", o.domain, "comma separated test values")
      ->capture_default_str();
  sub->add_option("--fuel", o.fuel, "loop iteration budget per run")
      ->capture_default_str();
  sub->add_option("--mode", o.mode, "store enumeration strategy")
      ->check(CLI::IsMember({"exhaustive", "random"}))
      ->capture_default_str();
  sub->add_option("--seed", o.seed, "seed for random mode")
      ->capture_default_str();
  sub->add_option("--trials", o.trials, "store pairs tried in random mode")
      ->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"flow-sensitive security type analysis for a small while "
               "language"};
  app.require_subcommand(1);
  Opts o;
  int code = 0;

  auto* infer = app.add_subcommand(
      "infer", "run the analysis and print the final environment");
  infer->add_option("program", o.input, "program file")->required();
  add_lattice(infer, o);
  add_env(infer, o);
  add_pc(infer, o);
  infer->add_flag("--trace", o.trace, "print per-statement environment changes");
  add_format(infer, o);
  infer->callback([&] { code = run_infer(o); });

  auto* check = app.add_subcommand(
      "check", "decide whether pc |- pre {program} post is derivable");
  check->add_option("program", o.input, "program file")->required();
  add_lattice(check, o);
  add_env(check, o);
  add_post(check, o);
  add_pc(check, o);
  add_format(check, o);
  check->callback([&] { code = run_check(o); });

  auto* principal_cmd = app.add_subcommand(
      "principal", "print the dependency environment over the powerset "
                   "lattice of the program's variables");
  principal_cmd->add_option("program", o.input, "program file")->required();
  principal_cmd->add_option("--vars", o.vars,
                            "extra universe variables (comma separated)");
  principal_cmd->add_flag("--independence", o.independence,
                          "print the complemented (independence) view");
  principal_cmd->add_flag("--trace", o.trace,
                          "print per-statement environment changes");
  add_format(principal_cmd, o);
  principal_cmd->callback([&] { code = run_principal(o); });

  auto* derive = app.add_subcommand(
      "derive", "least post environment for a given pre environment");
  derive->add_option("program", o.input, "program file")->required();
  add_lattice(derive, o);
  add_env(derive, o);
  add_format(derive, o);
  derive->callback([&] { code = run_derive(o); });

  auto* reverse = app.add_subcommand(
      "reverse", "greatest pre environment for a given post environment");
  reverse->add_option("program", o.input, "program file")->required();
  add_lattice(reverse, o);
  add_post(reverse, o);
  add_format(reverse, o);
  reverse->callback([&] { code = run_reverse(o); });

  auto* subsume = app.add_subcommand(
      "subsume", "does the program's dependency typing subsume the given "
                 "pre/post pair?");
  subsume->add_option("program", o.input, "program file")->required();
  add_lattice(subsume, o);
  add_env(subsume, o);
  add_post(subsume, o);
  add_format(subsume, o);
  subsume->callback([&] { code = run_subsume(o); });

  auto* dual = app.add_subcommand(
      "dual", "convert between the dependency and independence views of a "
              "powerset environment file");
  dual->add_option("env-file", o.input, "environment file")->required();
  dual->add_option("--vars", o.vars, "extra universe variables");
  add_format(dual, o);
  dual->callback([&] { code = run_dual(o); });

  auto* transform = app.add_subcommand(
      "transform", "translate to a program over fixed-type variables");
  transform->add_option("program", o.input, "program file")->required();
  add_lattice(transform, o);
  add_env(transform, o);
  add_pc(transform, o);
  transform->add_flag("--trace", o.trace,
                      "print per-statement environment changes as comments");
  transform->add_option("--emit-env", o.emit_env,
                        "write the final environment to this file");
  add_format(transform, o);
  transform->callback([&] { code = run_transform(o); });

  auto* check_fixed_cmd = app.add_subcommand(
      "check-fixed", "type-check a program over fixed-type variables");
  check_fixed_cmd->add_option("program", o.input, "fixed program file")
      ->required();
  add_lattice(check_fixed_cmd, o);
  add_pc(check_fixed_cmd, o);
  add_format(check_fixed_cmd, o);
  check_fixed_cmd->callback([&] { code = run_check_fixed(o); });

  auto* test_ni = app.add_subcommand(
      "test-ni", "test the noninterference statement of a judgement against "
                 "the semantics");
  test_ni->add_option("program", o.input, "program file")->required();
  add_lattice(test_ni, o);
  add_env(test_ni, o);
  add_post(test_ni, o);
  add_harness(test_ni, o);
  add_format(test_ni, o);
  test_ni->callback([&] { code = run_test_ni(o); });

  auto* test_safety = app.add_subcommand(
      "test-safety", "test that variables below the context level are never "
                     "modified");
  test_safety->add_option("program", o.input, "program file")->required();
  add_lattice(test_safety, o);
  add_post(test_safety, o);
  add_pc(test_safety, o);
  add_harness(test_safety, o);
  add_format(test_safety, o);
  test_safety->callback([&] { code = run_test_safety(o); });

  auto* test_equiv = app.add_subcommand(
      "test-equiv", "test that a fixed program simulates a floating one");
  test_equiv->add_option("program", o.input, "floating program file")
      ->required();
  test_equiv->add_option("fixed-program", o.fixed_input,
                         "fixed program file")
      ->required();
  add_lattice(test_equiv, o);
  add_env(test_equiv, o);
  add_post(test_equiv, o);
  add_harness(test_equiv, o);
  add_format(test_equiv, o);
  test_equiv->callback([&] { code = run_test_equiv(o); });

  auto* lattice_validate = app.add_subcommand(
      "lattice-validate", "check that a lattice file defines a finite "
                          "lattice and print its shape");
  lattice_validate->add_option("lattice-file", o.input, "lattice file")
      ->required();
  add_format(lattice_validate, o);
  lattice_validate->callback([&] { code = run_lattice_validate(o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int cli_code = app.exit(e);
    return cli_code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return code;
}
