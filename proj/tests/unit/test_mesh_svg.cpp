#include <doctest.h>

#include <cstring>
#include <regex>

#include "slipform/error.hpp"
#include "slipform/mesh_io.hpp"
#include "slipform/recovery_engine.hpp"
#include "slipform/strip_builder.hpp"
#include "slipform/svg.hpp"

using namespace slipform;

namespace {

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void check_bit_equal(const PiecewiseAffineMap &a, const PiecewiseAffineMap &b) {
  CHECK(a.slip.s() == b.slip.s());
  CHECK(bit_equal(a.window.x_lo, b.window.x_lo));
  CHECK(bit_equal(a.window.x_hi, b.window.x_hi));
  CHECK(bit_equal(a.window.half_height, b.window.half_height));
  CHECK(bit_equal(a.core_lo, b.core_lo));
  CHECK(bit_equal(a.core_hi, b.core_hi));
  CHECK(a.left_state == b.left_state);
  CHECK(a.right_state == b.right_state);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    const Cell &p = a.cells[i];
    const Cell &q = b.cells[i];
    CHECK(p.gradient == q.gradient);
    CHECK(p.offset == q.offset);
    REQUIRE(p.vertices.size() == q.vertices.size());
    for (std::size_t k = 0; k < p.vertices.size(); ++k) CHECK(p.vertices[k] == q.vertices[k]);
  }
  CHECK(a.provenance.builder == b.provenance.builder);
  CHECK(a.provenance.parameters == b.provenance.parameters);
}

std::vector<PiecewiseAffineMap> builder_outputs() {
  const SlipSystem diag = SlipSystem::from_direction({1, 2});
  return {kink_axis(SlipSystem::e1(), 0.03, 0.1), kink_axis(SlipSystem::e2(), -0.7, 1.0 / 3),
          kink_any(diag, 0.05, 0.07), transition(diag, {{0.1, 0.3}, {2.0, -1.1}, 0.01, 0}).map,
          build_recovery(SlipSystem::e2(), LimitProfile({0, 1, 2}, {{1, 0}, {0, 1}}), 0.03).map};
}

}  // namespace

TEST_CASE("mesh documents round-trip bit for bit") {
  for (const PiecewiseAffineMap &m : builder_outputs()) {
    const std::string text = mesh_to_json(m);
    CHECK(text.find(kMeshSchema) != std::string::npos);
    check_bit_equal(m, mesh_from_json(text));
    CHECK(mesh_to_json(mesh_from_json(text)) == text);
  }
}

TEST_CASE("malformed mesh documents are parse errors") {
  const std::string text = mesh_to_json(builder_outputs()[0]);
  const auto code_of = [](const std::string &t) {
    try {
      mesh_from_json(t);
    } catch (const Error &e) {
      return e.code();
    }
    return Errc::InvalidMap;
  };
  CHECK(code_of(text.substr(0, text.size() / 2)) == Errc::ParseError);
  CHECK(code_of(std::regex_replace(text, std::regex("slipform-mesh/1"), "slipform-mesh/9")) == Errc::ParseError);
  CHECK(code_of("{}") == Errc::ParseError);
}

TEST_CASE("svg has one polygon per cell in each panel") {
  for (const PiecewiseAffineMap &m : builder_outputs()) {
    const std::string svg = render_svg(m);
    const auto count = [&](const std::string &needle) {
      std::size_t n = 0;
      for (std::size_t p = svg.find(needle); p != std::string::npos; p = svg.find(needle, p + 1)) ++n;
      return n;
    };
    CHECK(count("<polygon ") == 2 * m.cells.size());
    CHECK(count("<g id=\"reference\">") == 1);
    CHECK(count("<g id=\"deformed\">") == 1);
    CHECK(count("url(#slip)") == 1);
    CHECK(svg.find("nan") == std::string::npos);
  }
}
