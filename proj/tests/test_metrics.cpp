#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "azr/metrics/metrics.hpp"
#include "azr/metrics/tree_edit.hpp"
#include "support.hpp"

using namespace azr;
using namespace azr::metrics;
using azr::test::shared_sandbox;

namespace {

using Forest = std::vector<TreeNode>;

std::string serialize(const Forest& forest) {
  std::string out;
  for (const auto& t : forest) out += t.label + "(" + serialize(t.children) + ")";
  return out;
}

std::size_t forest_size(const Forest& f) {
  std::size_t n = 0;
  for (const auto& t : f) n += tree_size(t);
  return n;
}

// Textbook recursive forest distance on the rightmost roots, memoized.
std::size_t forest_distance(const Forest& f, const Forest& g, std::map<std::string, std::size_t>& memo) {
  if (f.empty()) return forest_size(g);
  if (g.empty()) return forest_size(f);
  auto key = serialize(f) + "|" + serialize(g);
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  const TreeNode& v = f.back();
  const TreeNode& w = g.back();
  Forest f_minus_v(f.begin(), f.end() - 1), g_minus_w(g.begin(), g.end() - 1);
  Forest f_open = f_minus_v, g_open = g_minus_w;
  f_open.insert(f_open.end(), v.children.begin(), v.children.end());
  g_open.insert(g_open.end(), w.children.begin(), w.children.end());

  std::size_t best = forest_distance(f_open, g, memo) + 1;
  best = std::min(best, forest_distance(f, g_open, memo) + 1);
  best = std::min(best, forest_distance(f_minus_v, g_minus_w, memo) + forest_distance(v.children, w.children, memo) +
                            (v.label == w.label ? 0 : 1));
  memo[key] = best;
  return best;
}

std::size_t oracle(const TreeNode& a, const TreeNode& b) {
  std::map<std::string, std::size_t> memo;
  return forest_distance({a}, {b}, memo);
}

TreeNode random_tree(std::mt19937_64& rng, int budget) {
  static const char* labels[] = {"a", "b", "c"};
  TreeNode node{labels[rng() % 3], {}};
  int remaining = budget - 1;
  while (remaining > 0 && rng() % 3 != 0) {
    int share = 1 + static_cast<int>(rng() % remaining);
    node.children.push_back(random_tree(rng, share));
    remaining -= share;
  }
  return node;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("halstead volume of the identity by hand count") {
    // Operators def ( ) : return (5 distinct, 5 total); operands f x x (2, 3).
    auto h = halstead(shared_sandbox(), "def f(x):\n    return x\n");
    REQUIRE(h);
    CHECK(h->distinct_operators == 5);
    CHECK(h->distinct_operands == 2);
    CHECK(h->total_operators == 5);
    CHECK(h->total_operands == 3);
    CHECK(h->volume == doctest::Approx(8.0 * std::log2(7.0)).epsilon(1e-12));
    CHECK(h->branches == 1);
  }

  TEST_CASE("halstead grows with the program") {
    auto small = halstead(shared_sandbox(), "def f(x):\n    return x\n");
    auto big = halstead(shared_sandbox(),
                        "def f(x):\n    if x > 0:\n        return [i * x for i in range(x) if i % 2]\n    return -x\n");
    REQUIRE(small);
    REQUIRE(big);
    CHECK(big->volume > small->volume);
    CHECK(big->branches == 4);
  }

  TEST_CASE("empty and unparseable programs have no complexity") {
    std::string error;
    CHECK_FALSE(halstead(shared_sandbox(), "", &error));
    CHECK_FALSE(error.empty());
    CHECK_FALSE(halstead(shared_sandbox(), "def f(:", &error));
    CHECK(halstead_from_tokens({}, {}, 1).volume == 0.0);
  }

  TEST_CASE("tree edit distance basics") {
    TreeNode a{"f", {{"x", {}}, {"y", {}}}};
    TreeNode renamed{"f", {{"x", {}}, {"z", {}}}};
    CHECK(tree_edit_distance(a, a) == 0);
    CHECK(tree_edit_distance(a, renamed) == 1);
    CHECK(tree_edit_distance(a, TreeNode{"f", {}}) == 2);
    CHECK(tree_from_json(nlohmann::json::parse(R"(["m", [["a", []], ["b", [["c", []]]]]])")).children[1].children[0].label == "c");
  }

  TEST_CASE("tree edit distance matches the recursive oracle") {
    std::mt19937_64 rng(17);
    std::vector<TreeNode> trees;
    for (int i = 0; i < 14; ++i) trees.push_back(random_tree(rng, 1 + static_cast<int>(rng() % 7)));
    for (std::size_t i = 0; i < trees.size(); ++i) {
      for (std::size_t j = 0; j < trees.size(); ++j) {
        auto d = tree_edit_distance(trees[i], trees[j]);
        CHECK(d == oracle(trees[i], trees[j]));
        CHECK(d == tree_edit_distance(trees[j], trees[i]));
      }
    }
    for (std::size_t i = 0; i + 2 < trees.size(); ++i) {
      CHECK(tree_edit_distance(trees[i], trees[i + 2]) <=
            tree_edit_distance(trees[i], trees[i + 1]) + tree_edit_distance(trees[i + 1], trees[i + 2]));
    }
  }

  TEST_CASE("token edit distance") {
    CHECK(token_edit_distance({"a", "b", "c"}, {"a", "c"}) == 1);
    CHECK(token_edit_distance({}, {"a", "b"}) == 2);
    CHECK(token_edit_distance({"k", "i", "t"}, {"s", "i", "t"}) == 1);
    CHECK(lex_tokens("x = foo(1.5, 'a b')  # c\n") ==
          std::vector<std::string>{"x", "=", "foo", "(", "1.5", ",", "'a b'", ")"});
  }

  TEST_CASE("syntax tree distance between programs") {
    const auto& box = shared_sandbox();
    const std::string p = "def f(x):\n    return x + 1\n";
    auto self = ast_edit_distance(box, p, p);
    REQUIRE(self);
    CHECK(self->value == 0.0);
    auto renamed = ast_edit_distance(box, p, "def f(y):\n    return y + 1\n");
    REQUIRE(renamed);
    CHECK(renamed->value > 0.0);
    auto fallback = ast_edit_distance(box, p, "def f(x):\n    return x - 1\n", 3);
    REQUIRE(fallback);
    CHECK(fallback->token_fallback);
    CHECK(fallback->value == 1.0);
    CHECK_FALSE(ast_edit_distance(box, p, "def f(:"));
  }

  TEST_CASE("answer diversity tracker") {
    AnswerDiversityTracker tracker;
    CHECK(tracker.observe("a") == 1.0);
    CHECK(tracker.observe("a") == 0.0);
    CHECK(tracker.observe("b") == 1.0);
    AnswerDiversityTracker restored;
    restored.from_json(tracker.to_json());
    CHECK(restored.total() == 3);
    CHECK(restored.observe("c") == 1.0);
    CHECK(restored.observe("b") == doctest::Approx(0.75));
  }
}
