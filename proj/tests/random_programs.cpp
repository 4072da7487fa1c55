#include "random_programs.hpp"

#include <sstream>
#include <vector>

namespace futmc::testutil {

namespace {

struct Gen {
  std::mt19937& rng;
  int next_label = 1;
  int thread = 1;

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  std::string var() { return pick(0, 1) ? "x" : "y"; }
  std::string reg(int k) { return "r" + std::to_string(thread) + std::to_string(k); }
  std::string any_reg() { return reg(pick(1, 2)); }

  std::string expr() {
    switch (pick(0, 2)) {
      case 0: return std::to_string(pick(0, 2));
      case 1: return any_reg();
      default: return any_reg() + " + " + std::to_string(pick(0, 1));
    }
  }

  std::string label() { return std::to_string(next_label++) + ": "; }

  std::string stmt(int& budget) {
    --budget;
    switch (pick(0, 9)) {
      case 0:
      case 1:
      case 2:
        return label() + any_reg() + " := [" + var() + "]";
      case 3:
      case 4:
      case 5:
        return label() + "[" + var() + "] := " + expr();
      case 6:
        return label() + any_reg() + " := " + expr();
      case 7:
        return label() + "upd^RA([" + var() + "], " + std::to_string(pick(0, 1)) + ", " +
               std::to_string(pick(0, 2)) + ")";
      default: {
        std::string body = label() + "[" + var() + "] := " + expr();
        if (budget > 0 && pick(0, 1)) {
          --budget;
          body += ";\n    " + label() + any_reg() + " := [" + var() + "]";
        }
        return "if " + any_reg() + " " + (pick(0, 1) ? "=" : "!=") + " " +
               std::to_string(pick(0, 1)) + " then {\n    " + body + "\n  }";
      }
    }
  }
};

}  // namespace

std::string random_program(std::mt19937& rng) {
  Gen g{rng};
  int threads = g.pick(1, 3);
  int budget = g.pick(2, 6);
  std::ostringstream os;
  os << "init: x = 0, y = 0\n";
  for (int t = 1; t <= threads && budget > 0; ++t) {
    g.thread = t;
    if (t > 1) os << "|||\n";
    int mine = t == threads ? budget : g.pick(1, std::max(1, budget - (threads - t)));
    bool first = true;
    while (mine > 0 && budget > 0) {
      if (!first) os << ";\n";
      os << "  " << g.stmt(budget);
      --mine;
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace futmc::testutil
