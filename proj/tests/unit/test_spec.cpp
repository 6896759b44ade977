#include <doctest.h>

#include "modalx/error.hpp"
#include "modalx/hierarchical.hpp"

using namespace modalx;

TEST_CASE("directing measures") {
  auto b = DirectingMeasure::bernoulli({0.2, 0.7});
  CHECK(b.probability(0) == doctest::Approx(0.8 * 0.3));
  CHECK(b.probability(3) == doctest::Approx(0.2 * 0.7));
  CHECK(b.atom_probability(1) == 0.7);
  auto f = DirectingMeasure::full({0.1, 0.2, 0.3, 0.4});
  CHECK(f.atoms() == 2);
  CHECK(f.atom_probability(0) == doctest::Approx(0.6));
  CHECK(f.atom_probability(1) == doctest::Approx(0.7));
  CHECK_THROWS_AS(DirectingMeasure::full({0.5, 0.6}), Error);
  CHECK_THROWS_AS(DirectingMeasure::full({0.5, 0.25, 0.25}), Error);
  CHECK_THROWS_AS(DirectingMeasure::bernoulli({1.2}), Error);
  CHECK_THROWS_AS(OrbitPrior::beta({0}, {1}), Error);
  CHECK_THROWS_AS(OrbitPrior::dirichlet({1, -1}), Error);
  CHECK_THROWS_AS(OrbitPrior::mixture({{0.3, b}, {0.3, b}}), Error);
}

TEST_CASE("parse a full spec document") {
  auto s = parse_spec(R"(# two orbits
atoms = p, q
orbit 0: prior = mixture(0.5: bern(0.2, 0.3), 0.5: full(0.1, 0.2, 0.3, 0.4))
orbit 1: prior = beta(1, 2; 3, 4)
orbit *: prior = dirichlet(0.5)
coupling = independent
designated = point(bern(0.5, 0.5))
)");
  CHECK(s.atoms.names() == std::vector<std::string>{"p", "q"});
  REQUIRE(s.orbit_priors.size() == 2);
  CHECK(s.orbit_priors.at(0).kind == OrbitPrior::Kind::Mixture);
  CHECK(s.orbit_priors.at(0).draw_form() == DirectingMeasure::Form::Full);
  CHECK(s.orbit_priors.at(1).beta_b == std::vector<double>{2, 4});
  CHECK(s.default_prior->dirichlet_alpha == std::vector<double>(4, 0.5));
  CHECK(&s.prior_for(7) == &*s.default_prior);
  CHECK_NOTHROW(s.validate(3));
  CHECK_THROWS_AS(s.validate(1), Error);
  CHECK(parse_spec(serialize_spec(s)) == s);
}

TEST_CASE("single-atom shorthand, shared and joint couplings") {
  auto s = parse_spec("atoms = p\norbit *: prior = mixture(0.5: 0.2, 0.5: 0.8)\ncoupling = shared\n"
                      "designated = bern(0.5)\n");
  CHECK(s.coupling == Coupling::Shared);
  CHECK(s.default_prior->atoms[1].measure.parameters() == std::vector<double>{0.8});
  CHECK_NOTHROW(s.validate(4));
  s.orbit_priors.emplace(1, OrbitPrior::beta({1}, {1}));
  CHECK_THROWS_AS(s.validate(2), Error);

  auto j = parse_spec("atoms = p\ncoupling = joint\njoint 0.5: 0.2; 0.8\njoint 0.5: bern(0.8); 0.2\n"
                      "designated = point(0.5)\n");
  REQUIRE(j.joint.size() == 2);
  CHECK(j.joint[1].per_orbit[0].parameters()[0] == 0.8);
  CHECK_NOTHROW(j.validate(2));
  CHECK_THROWS_AS(j.validate(3), Error);
  CHECK(parse_spec(serialize_spec(j)) == j);
  CHECK(j.latent_form(1) == DirectingMeasure::Form::BernoulliProduct);
}

TEST_CASE("spec errors carry line numbers") {
  auto line_of = [](const char* text) {
    try {
      parse_spec(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("orbit 0: prior = beta(1,1)\n") == 1);
  CHECK(line_of("atoms = p\n\norbit 0: prior = beta(1)\n") == 3);
  CHECK(line_of("atoms = p\norbit 0: prior = gamma(1, 1)\n") == 2);
  CHECK(line_of("atoms = p q\norbit 0: prior = point(bern(0.5))\n") == 2);
  CHECK(line_of("atoms = p\ncoupling = loose\n") == 2);
  CHECK(line_of("atoms = p\ndesignated = bern(0.5) extra\n") == 2);
  CHECK(line_of("atoms = p p\n") == 1);
  CHECK(line_of("atoms = p\norbit x: prior = beta(1, 1)\n") == 2);
  CHECK_THROWS_AS(parse_spec("atoms = p\norbit 0: prior = beta(1, 1)\n"), ParseError);
  CHECK(line_of("atoms = p\nfoo = 1\n") == 2);
}
