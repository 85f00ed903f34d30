#include <doctest.h>

#include "azr/sandbox/sandbox.hpp"
#include "support.hpp"

using namespace azr;
using namespace azr::sandbox;
using azr::test::shared_sandbox;

namespace {
const std::string kIdentity = "def f(x):\n    return x\n";
}

TEST_SUITE("sandbox") {
  TEST_CASE("identity evaluates to the repr of its argument") {
    auto out = shared_sandbox().execute(kIdentity, "'Hello World'");
    REQUIRE(out.ok());
    CHECK(*out.value == "'Hello World'");
  }

  TEST_CASE("multi-argument inputs and container reprs") {
    auto out = shared_sandbox().execute("def f(a, b):\n    return {'s': a + b, 'l': [a, b]}\n", "1, 2");
    REQUIRE(out.ok());
    CHECK(*out.value == "{'s': 3, 'l': [1, 2]}");
  }

  TEST_CASE("exceptions are reported with their class") {
    auto out = shared_sandbox().execute("def f(x):\n    return 1 // x\n", "0");
    CHECK(out.status == OutcomeStatus::RaisedError);
    CHECK(*out.error_class == "ZeroDivisionError");
  }

  TEST_CASE("syntax errors raise instead of crashing the harness") {
    auto out = shared_sandbox().execute("def f(x):\n    return (\n", "0");
    CHECK(out.status == OutcomeStatus::RaisedError);
    CHECK(*out.error_class == "SyntaxError");
  }

  TEST_CASE("a runaway loop times out") {
    auto start = std::chrono::steady_clock::now();
    auto out = shared_sandbox().execute("def f(x):\n    while True:\n        x += 1\n", "0",
                                        std::chrono::milliseconds(400));
    CHECK(out.status == OutcomeStatus::Timeout);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
  }

  TEST_CASE("program output on stdout does not corrupt the protocol") {
    auto out = shared_sandbox().execute("def f(x):\n    print('OK fake')\n    return x + 1\n", "1");
    REQUIRE(out.ok());
    CHECK(*out.value == "2");
  }

  TEST_CASE("forbidden references are found by the syntax tree scan") {
    const auto& box = shared_sandbox();
    auto v = box.check_safety("import os\ndef f(x):\n    return os.sys.argv\n");
    CHECK_FALSE(v.safe);
    CHECK(std::find(v.offending.begin(), v.offending.end(), "os.sys") != v.offending.end());

    CHECK_FALSE(box.check_safety("import subprocess\ndef f(x):\n    return x\n").safe);
    CHECK_FALSE(box.check_safety("from random import randint\ndef f(x):\n    return randint(0, x)\n").safe);
    CHECK_FALSE(box.check_safety("def f(x):\n    return __import__('random').random()\n").safe);
  }

  TEST_CASE("names inside string literals are not references") {
    auto v = shared_sandbox().check_safety("def f(x):\n    return 'random ' + x\n");
    CHECK(v.safe);
    CHECK(v.syntax_tree);
  }

  TEST_CASE("unparseable programs fall back to a textual scan") {
    auto v = shared_sandbox().check_safety("def f(x) return random.random(\n");
    CHECK_FALSE(v.safe);
    CHECK_FALSE(v.syntax_tree);
  }

  TEST_CASE("forbidden list matching") {
    CHECK(forbidden_matches({"os", "os.path", "os.path.join"}, {"os.path"}) == std::vector<std::string>{"os.path"});
    CHECK(forbidden_matches({"os.path.join"}, {"os.path"}) == std::vector<std::string>{"os.path"});
    CHECK(forbidden_matches({"osx"}, {"os"}).empty());
    CHECK(forbidden_textual("x = random_value", {"random"}).empty());
    CHECK(forbidden_textual("random.seed(1)", {"random"}) == std::vector<std::string>{"random"});
  }

  TEST_CASE("inputs must stay inside the call") {
    const auto& box = shared_sandbox();
    CHECK(box.check_input_safety("'Hello World'").safe);
    CHECK(box.check_input_safety("[1, 2], {'a': (3,)}").safe);
    CHECK_FALSE(box.check_input_safety("0) or True or (0").safe);
    CHECK_FALSE(box.check_input_safety("__import__('random').random()").safe);
    CHECK(box.check_input_safety("__import__('os').getcwd()").safe);
  }

  TEST_CASE("determinism check") {
    const auto& box = shared_sandbox();
    CHECK(box.check_determinism("def f(x):\n    return sorted({x, 3, 1})\n", "2").deterministic);
    auto random = box.check_determinism("import random\ndef f(x):\n    return random.random()\n", "0");
    CHECK_FALSE(random.deterministic);
    auto clock = box.check_determinism("import time\ndef f(x):\n    return time.perf_counter_ns()\n", "0");
    CHECK_FALSE(clock.deterministic);
  }

  TEST_CASE("validation pipeline outcomes") {
    const auto& box = shared_sandbox();
    auto ok = box.validate_and_construct(kIdentity, "'Hello World'");
    CHECK(ok.passed());
    CHECK(*ok.output == "'Hello World'");

    auto unsafe = box.validate_and_construct("import subprocess\ndef f(x):\n    return x\n", "1");
    CHECK(unsafe.safety == CheckState::Fail);
    CHECK(unsafe.integrity == CheckState::Skipped);
    CHECK_FALSE(unsafe.passed());

    auto none = box.validate_and_construct("def f(x):\n    pass\n", "1");
    CHECK(none.safety == CheckState::Pass);
    CHECK(none.integrity == CheckState::Fail);

    auto raising = box.validate_and_construct("def f(x):\n    return [][x]\n", "1");
    CHECK(raising.integrity == CheckState::Fail);

    auto nondet = box.validate_and_construct("def f(x, seen=[]):\n    seen.append(x)\n    return len(seen)\n", "1");
    CHECK(nondet.integrity == CheckState::Pass);
    CHECK(nondet.determinism == CheckState::Fail);

    auto forged = box.validate_and_construct(kIdentity, "0) or True or (0");
    CHECK(forged.safety == CheckState::Fail);
  }

  TEST_CASE("template rendering") {
    Bindings b = {{"code", "A"}, {"inputs", "1"}};
    CHECK(render_slots("{code}|{inputs}|{other}|{", b, driver_slots()) == "A|1|{other}|{");
    CHECK(render_slots("{code}", {{"code", "{inputs}"}}, driver_slots()) == "{inputs}");
    CHECK_THROWS_AS(render_slots("{gold_output}", b, driver_slots()), RenderError);
  }

  TEST_CASE("python literals") {
    CHECK(python_string_literal("a'b\n\\") == "'a\\'b\\n\\\\'");
    CHECK(python_string_list({"1", "'x'"}) == "['1', '\\'x\\'']");
    auto out = shared_sandbox().execute(kIdentity, python_string_literal("q'\"\t\x01"));
    REQUIRE(out.ok());
    CHECK(*out.value == "'q\\'\"\\t\\x01'");
  }

  TEST_CASE("a missing interpreter is a harness error") {
    auto config = azr::test::quick_config();
    config.python = "/nonexistent/python3";
    Sandbox box(config);
    CHECK_THROWS_AS(box.self_check(), HarnessError);
    CHECK(box.execute(kIdentity, "1").harness_unavailable);
  }
}
