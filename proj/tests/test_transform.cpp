// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include "flowlat/flowlat.hpp"
#include "support/helpers.hpp"

using namespace flowlat;
using flowlat::testing::floating_vars;
using flowlat::testing::make_env;

namespace {

const ParseOptions kFixed{.allow_fixed = true};

TEST(FassignTest, EmitsOneCopyPerChangedVariable) {
  auto two = Lattice::two_point();
  TypeEnv same = make_env(two, {{"l", "L"}, {"h", "H"}});
  EXPECT_TRUE(fassign(same, same).empty());
  EXPECT_EQ(block_command(*two, fassign(same, same)), nullptr);

  TypeEnv target = make_env(two, {{"l", "L"}, {"h", "H"}});
  TypeEnv source = make_env(two, {{"l", "H"}, {"h", "H"}});
  FixedAssignBlock block = fassign(target, source);
  ASSERT_EQ(block.size(), 1u);
  EXPECT_EQ(block[0].base, "l");
  EXPECT_EQ(to_string(*block_command(*two, block)), "l@L := l@H");
}

TEST(FassignTest, BlocksAreSortedByVariable) {
  auto dia = Lattice::diamond();
  TypeEnv target =
      make_env(dia, {{"w", "H"}, {"x", "M"}, {"y", "H"}, {"z", "H"}});
  TypeEnv source =
      make_env(dia, {{"w", "L"}, {"x", "M"}, {"y", "N"}, {"z", "H"}});
  EXPECT_EQ(to_string(*block_command(*dia, fassign(target, source))),
            "w@H := w@L ; y@H := y@N");
}

TEST(FassignTest, BlockOrderIsIrrelevantSemantically) {
  auto two = Lattice::two_point();
  TypeEnv target = make_env(two, {{"a", "H"}, {"b", "H"}});
  TypeEnv source = make_env(two, {{"a", "L"}, {"b", "L"}});
  FixedAssignBlock block = fassign(target, source);
  ASSERT_EQ(block.size(), 2u);
  FixedAssignBlock reversed = {block[1], block[0]};
  Store s;
  s.declare(VarRef{"a", "L"}, 1);
  s.declare(VarRef{"b", "L"}, 2);
  s.declare(VarRef{"a", "H"}, 0);
  s.declare(VarRef{"b", "H"}, 0);
  auto fwd = exec(*block_command(*two, block), s, 1);
  auto rev = exec(*block_command(*two, reversed), s, 1);
  ASSERT_TRUE(fwd && rev);
  EXPECT_EQ(*fwd, *rev);
}

TEST(FixExprTest, AnnotatesVariables) {
  auto two = Lattice::two_point();
  TypeEnv env = make_env(two, {{"h", "H"}});
  EXPECT_EQ(to_string(*fix_expr(env, *parse_expression("h == 0"))),
            "h@H == 0");
  EXPECT_EQ(to_string(*fix_expr(env, *parse_expression("42"))), "42");
  auto dia = Lattice::diamond();
  TypeEnv denv = make_env(dia, {{"x", "M"}});
  EXPECT_EQ(to_string(*fix_expr(denv, *parse_expression("0 < x"))),
            "0 < x@M");
  EXPECT_THROW(fix_expr(env, *parse_expression("h@H", kFixed)), TypingError);
  EXPECT_THROW(fix_expr(env, *parse_expression("q")), TypingError);
}

TEST(TranslateTest, StraightLineLaundering) {
  auto two = Lattice::two_point();
  TypeEnv env = make_env(two, {{"l", "L"}, {"h", "H"}});
  auto c = parse_program("l := h ; l := 0 ; h := 0 ; l := h");
  Translation tr = translate(two->bottom(), env, *c);
  EXPECT_EQ(to_string(*tr.program),
            "l@H := h@H ; l@L := 0 ; h@L := 0 ; l@L := h@L");
  EXPECT_EQ(tr.post, make_env(two, {{"l", "L"}, {"h", "L"}}));
  EXPECT_TRUE(check_fixed(*two, two->bottom(), *tr.program));
}

TEST(TranslateTest, ConditionalAndLoopWithReconciliation) {
  auto dia = Lattice::diamond();
  TypeEnv env =
      make_env(dia, {{"w", "L"}, {"x", "M"}, {"y", "N"}, {"z", "H"}});
  auto c = parse_program(
      "if x == 0 then y := y + 1 ; w := z end ; "
      "while 0 < x do z := z + w ; x := x - 1 ; z := x end");
  Trace trace;
  Translation tr = translate(dia->bottom(), env, *c, &trace);
  auto expected = parse_program(
      "if x@M == 0 then y@H := y@N + 1 ; w@H := z@H "
      "else w@H := w@L ; y@H := y@N end ; "
      "while 0 < x@M do z@H := z@H + w@H ; x@M := x@M - 1 ; "
      "z@M := x@M ; z@H := z@M end",
      kFixed);
  EXPECT_TRUE(equal(*tr.program, *expected))
      << to_string(*tr.program);
  EXPECT_EQ(tr.post,
            make_env(dia, {{"w", "H"}, {"x", "M"}, {"y", "H"}, {"z", "H"}}));
  std::vector<std::string> lines = render_trace(*dia, trace);
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[0], "if x == 0 : [w:H, y:H]");
  EXPECT_EQ(lines[6], "  z := x : [z:M]");
}

TEST(TranslateTest, LoopEntryReconciliation) {
  auto two = Lattice::two_point();
  TypeEnv env = make_env(two, {{"l", "L"}, {"h", "H"}});
  Translation tr =
      translate(two->bottom(), env, *parse_program("while h do l := 0 end"));
  EXPECT_EQ(to_string(*tr.program),
            "l@H := l@L ; while h@H do l@H := 0 end");
  EXPECT_EQ(tr.post, make_env(two, {{"l", "H"}, {"h", "H"}}));
}

TEST(TranslateTest, ContextRaisesTargets) {
  auto two = Lattice::two_point();
  TypeEnv env = make_env(two, {{"l", "L"}, {"h", "H"}});
  Translation tr =
      translate(two->parse_elem("H"), env, *parse_program("l := 0"));
  EXPECT_EQ(to_string(*tr.program), "l@H := 0");
  EXPECT_EQ(tr.post, make_env(two, {{"l", "H"}, {"h", "H"}}));
  EXPECT_TRUE(check_fixed(*two, two->parse_elem("H"), *tr.program));
  EXPECT_FALSE(check_fixed(*two, two->parse_elem("H"),
                           *parse_program("l@L := 0", kFixed)));
}

TEST(TranslateTest, SkipAndErrors) {
  auto two = Lattice::two_point();
  TypeEnv env = make_env(two, {{"l", "L"}});
  Translation tr = translate(two->bottom(), env, *parse_program("skip"));
  EXPECT_TRUE(std::holds_alternative<Command::Skip>(tr.program->node));
  EXPECT_THROW(
      translate(two->bottom(), env, *parse_program("l@L := 0", kFixed)),
      TypingError);
  EXPECT_THROW(translate(two->bottom(), env, *parse_program("q := 0")),
               TypingError);
}

TEST(TranslateTest, PowersetLevelsStayParseable) {
  auto c = parse_program("x := y ; if y then z := x end");
  PrincipalTyping pt = principal(*c, {"x", "y", "z"});
  Translation tr = translate(pt.lat->bottom(), pt.delta0, *c);
  auto reparsed = parse_program(pretty(*tr.program), kFixed);
  EXPECT_TRUE(equal(*reparsed, *tr.program)) << pretty(*tr.program);
  EXPECT_TRUE(check_fixed(*pt.lat, pt.lat->bottom(), *tr.program));
}

TEST(TranslatePropertyTest, PostEnvironmentMatchesAnalysis) {
  for (const auto& lat : {Lattice::two_point(), Lattice::diamond()}) {
    for (const auto& c : flowlat::testing::corpus()) {
      std::vector<std::string> vars = floating_vars(*c);
      if (vars.empty()) vars.push_back("x");
      for (std::size_t phase = 0; phase < 4; ++phase) {
        TypeEnv env = flowlat::testing::cycled_env(lat, vars, phase);
        for (const auto& pc : lat->elements()) {
          Translation tr = translate(pc, env, *c);
          EXPECT_EQ(tr.post, spc(pc, env, *c)) << to_string(*c);
          EXPECT_TRUE(check_fixed(*lat, pc, *tr.program)) << to_string(*c);
          auto reparsed = parse_program(pretty(*tr.program), kFixed);
          EXPECT_TRUE(equal(*reparsed, *tr.program));
        }
      }
    }
  }
}

TEST(TranslatePropertyTest, ExpressionLevelsArePreserved) {
  auto dia = Lattice::diamond();
  TypeEnv env =
      make_env(dia, {{"w", "L"}, {"x", "M"}, {"y", "N"}, {"z", "H"}});
  TypeEnv no_floats(dia);
  for (const char* src : {"x", "x + y", "(w - z) * x", "y == z", "7",
                          "w <= x + 1"}) {
    ExprPtr e = parse_expression(src);
    EXPECT_EQ(expr_type(no_floats, *fix_expr(env, *e)), expr_type(env, *e))
        << src;
  }
}

TEST(CheckFixedTest, SpecimenPrograms) {
  auto two = Lattice::two_point();
  Elem l = two->parse_elem("L"), h = two->parse_elem("H");
  EXPECT_TRUE(check_fixed(
      *two, l,
      *parse_program("l@H := h@H ; l@L := 0 ; h@L := 0 ; l@L := h@L",
                     kFixed)));
  EXPECT_FALSE(check_fixed(*two, l, *parse_program("l@L := h@H", kFixed)));
  EXPECT_FALSE(check_fixed(*two, h, *parse_program("l@L := 0", kFixed)));
  EXPECT_TRUE(check_fixed(
      *two, l, *parse_program("if h@H then l@H := 1 end", kFixed)));
  EXPECT_FALSE(check_fixed(
      *two, l, *parse_program("if h@H then l@L := 1 end", kFixed)));
  EXPECT_TRUE(check_fixed(
      *two, l, *parse_program("while h@H do l@H := l@H + 1 end", kFixed)));
  EXPECT_FALSE(check_fixed(
      *two, l, *parse_program("while h@H do l@L := 0 end", kFixed)));
}

TEST(CheckFixedTest, InputValidation) {
  auto two = Lattice::two_point();
  EXPECT_THROW(check_fixed(*two, two->bottom(), *parse_program("l := 0")),
               TypingError);
  EXPECT_THROW(check_fixed(*two, two->bottom(),
                           *parse_program("l@Q := 0", kFixed)),
               LatticeError);
}

TEST(CheckFixedTest, WeakeningTheContext) {
  auto dia = Lattice::diamond();
  TypeEnv env =
      make_env(dia, {{"w", "L"}, {"x", "M"}, {"y", "N"}, {"z", "H"}});
  for (const auto& c : flowlat::testing::corpus()) {
    std::vector<std::string> vars = floating_vars(*c);
    TypeEnv sub(dia);
    for (const auto& v : vars) sub.set(v, env.contains(v) ? env.get(v)
                                                          : dia->bottom());
    for (const auto& pc : dia->elements()) {
      Translation tr = translate(pc, sub, *c);
      for (const auto& weaker : dia->elements())
        if (dia->leq(weaker, pc))
          EXPECT_TRUE(check_fixed(*dia, weaker, *tr.program))
              << to_string(*c);
    }
  }
}

TEST(BlowupTest, FamilyShapeAndQuadraticCopies) {
  auto n1 = blowup_family(1);
  EXPECT_TRUE(
      equal(*n1, *parse_program("if y1 then if h then x1 := 0 end end")));
  EXPECT_THROW(blowup_family(0), Error);

  auto two = Lattice::two_point();
  for (int n = 1; n <= 5; ++n) {
    auto fam = blowup_family(n);
    TypeEnv env(two);
    env.set("h", two->parse_elem("H"));
    for (int i = 1; i <= n; ++i) {
      env.set("x" + std::to_string(i), two->parse_elem("L"));
      env.set("y" + std::to_string(i), two->parse_elem("L"));
    }
    EXPECT_EQ(count_copy_assignments(*fam), 0u);
    Translation tr = translate(two->bottom(), env, *fam);
    EXPECT_EQ(count_copy_assignments(*tr.program),
              static_cast<std::size_t>(n) * (n + 1));
    EXPECT_TRUE(check_fixed(*two, two->bottom(), *tr.program));
  }
}

TEST(TranslatePropertyTest, TranslationSimulatesSource) {
  const std::vector<Value> domain = {Value(0), Value(1)};
  for (const auto& lat : {Lattice::two_point(), Lattice::diamond()}) {
    for (const auto& c : flowlat::testing::corpus()) {
      std::vector<std::string> vars = floating_vars(*c);
      if (vars.empty() || vars.size() > 4) continue;
      TypeEnv env = flowlat::testing::cycled_env(lat, vars, 1);
      Translation tr = translate(lat->bottom(), env, *c);
      CheckResult r =
          equiv_check(*c, *tr.program, env, tr.post, domain, 64);
      EXPECT_NE(r.outcome, Outcome::Counterexample) << to_string(*c);
    }
  }
}

} // namespace
