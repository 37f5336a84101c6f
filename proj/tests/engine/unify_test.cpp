#include "ccx/engine/unify.hpp"
#include "print.hpp"

#include <gtest/gtest.h>

#include "ccx/engine/printer.hpp"

namespace ccx::engine {
namespace {

Term v(const char* name, std::uint32_t id) { return Term::var(name, id); }

TEST(Unify, BindsBothSides) {
  Substitution s;
  ASSERT_TRUE(unify(Term::compound("f", {v("X", 0), Term::atom("b")}), Term::compound("f", {Term::atom("a"), v("Y", 1)}), s));
  EXPECT_EQ(to_string(substitute(s, v("X", 0))), "a");
  EXPECT_EQ(to_string(substitute(s, v("Y", 1))), "b");
}

TEST(Unify, DistinctAtomsFail) {
  Substitution s;
  EXPECT_FALSE(unify(Term::atom("a"), Term::atom("b"), s));
  EXPECT_TRUE(s.empty());
}

TEST(Unify, VariableAgainstAtom) {
  Substitution s;
  ASSERT_TRUE(unify(v("HospitalizationReason", 0), Term::atom("skydiving"), s));
  EXPECT_EQ(to_string(substitute(s, v("HospitalizationReason", 0))), "skydiving");
}

TEST(Unify, ExtendsExistingSubstitution) {
  Substitution s{{0, Term::atom("a")}};
  EXPECT_FALSE(unify(v("X", 0), Term::atom("b"), s));
  EXPECT_EQ(s.size(), 1U);
  EXPECT_TRUE(unify(v("X", 0), Term::atom("a"), s));
}

TEST(Unify, NoOccursCheck) {
  Substitution s;
  EXPECT_TRUE(unify(v("X", 0), Term::compound("f", {v("X", 0)}), s));
}

TEST(Unify, NumbersCompareByValue) {
  Substitution s;
  EXPECT_TRUE(unify(Term::number(*Number::from_literal("2.0")), Term::number(Number(2)), s));
}

}  // namespace
}  // namespace ccx::engine
