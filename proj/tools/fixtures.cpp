#include "fixtures.hpp"

#include "ahmc/mdp_io.hpp"

#include <deque>
#include <fstream>
#include <map>
#include <stdexcept>
#include <tuple>

namespace ahmc {

namespace {

const char* kPrefix =
    "exists sched sg . forall state s1(sg) . forall state s2(sg) . "
    "exists stutter t1(s1) . exists stutter t2(s2) . ";

std::string premise(const std::string& lo, const std::string& hi) {
  return "((init(t1) & init(t2)) & ((" + lo + "(t1) & " + hi + "(t2)) | (" + hi + "(t1) & " + lo + "(t2))))";
}

std::string sameProbability(const std::string& path1, const std::string& path2) {
  return "(P(" + path1 + ") = P(" + path2 + "))";
}

std::string conjunction(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : " & ") + p;
  return parts.size() > 1 ? "(" + out + ")" : out;
}

void step(Mdp& mdp, const std::string& from, const std::string& action, const std::string& to) {
  mdp.addChoice(mdp.stateIndex(from), mdp.addAction(action), {{mdp.stateIndex(to), Rational(1)}});
}

}  // namespace

CaseStudyFixture buildCE(std::size_t h1, std::size_t h2) {
  if (h1 == h2) throw std::invalid_argument("CE needs two different secrets");
  CaseStudyFixture f;
  f.name = "CE";
  f.params = {h1, h2};
  const std::size_t top = std::max(h1, h2);
  Mdp& mdp = f.mdp;
  for (const char* ap : {"init", "l1", "l2"}) mdp.declareAp(ap);
  mdp.declareAp("h" + std::to_string(h1));
  mdp.declareAp("h" + std::to_string(h2));

  // S<v>: both threads running, h = v. B<v>: second thread finished (l = 1).
  // A: first thread finished (l = 2). T1/T2: final value of l.
  for (std::size_t v = 0; v <= top; ++v) {
    std::vector<std::string> labels;
    if (v == h1 || v == h2) labels = {"init", "h" + std::to_string(v)};
    mdp.addState("S" + std::to_string(v), labels);
  }
  for (std::size_t v = 0; v <= top; ++v) mdp.addState("B" + std::to_string(v));
  mdp.addState("A");
  mdp.addState("T1", {"l1"});
  mdp.addState("T2", {"l2"});

  for (std::size_t v = 0; v <= top; ++v) {
    const std::string s = "S" + std::to_string(v);
    step(mdp, s, "th", v > 0 ? "S" + std::to_string(v - 1) : "A");
    step(mdp, s, "th2", "B" + std::to_string(v));
  }
  for (std::size_t v = 0; v <= top; ++v)
    step(mdp, "B" + std::to_string(v), "th", v > 0 ? "B" + std::to_string(v - 1) : "T2");
  step(mdp, "A", "th2", "T1");
  step(mdp, "T1", "idle", "T1");
  step(mdp, "T2", "idle", "T2");

  const std::string lo = "h" + std::to_string(std::min(h1, h2));
  const std::string hi = "h" + std::to_string(top);
  f.formula = std::string(kPrefix) + premise(lo, hi) + " -> (" + sameProbability("F l1(t1)", "F l1(t2)") + " & " +
              sameProbability("F l2(t1)", "F l2(t2)") + ")";
  if (std::min(h1, h2) == 0 && top == 1) {
    f.targetStates = 7;
    f.targetTransitions = 9;
  } else if (std::min(h1, h2) == 0 && top == 2) {
    f.targetStates = 9;
    f.targetTransitions = 12;
  }
  return f;
}

CaseStudyFixture buildTL(std::size_t k, bool onlyFirst) {
  if (k == 0) throw std::invalid_argument("TL needs a key length of at least 1");
  CaseStudyFixture f;
  f.name = "TL";
  f.params = {k};
  Mdp& mdp = f.mdp;
  const std::size_t limit = 2 * k;
  for (const char* ap : {"init", "h0", "h1"}) mdp.declareAp(ap);
  for (std::size_t l = 0; l <= limit; ++l) mdp.declareAp("j" + std::to_string(l));

  // Running states h<h>_r<r>_j<j>: r exponentiation steps left, counter at j.
  // Done states h<h>_done_j<j>: the counter loop has observed the thread stop.
  auto running = [](std::size_t h, std::size_t r, std::size_t j) {
    return "h" + std::to_string(h) + "_r" + std::to_string(r) + "_j" + std::to_string(j);
  };
  auto done = [](std::size_t h, std::size_t j) { return "h" + std::to_string(h) + "_done_j" + std::to_string(j); };

  for (std::size_t h = 0; h <= 1; ++h) {
    const std::size_t steps = h == 0 ? k : 2 * k;
    for (std::size_t r = steps; r >= 1; --r)
      for (std::size_t j = 0; j <= limit; ++j) {
        std::vector<std::string> labels;
        if (r == steps && j == 0) labels = {"init", "h" + std::to_string(h)};
        mdp.addState(running(h, r, j), labels);
      }
    for (std::size_t j = 0; j <= limit; ++j) mdp.addState(done(h, j), {"j" + std::to_string(j)});
  }
  for (std::size_t h = 0; h <= 1; ++h) {
    const std::size_t steps = h == 0 ? k : 2 * k;
    for (std::size_t r = steps; r >= 1; --r)
      for (std::size_t j = 0; j <= limit; ++j) {
        const std::string s = running(h, r, j);
        step(mdp, s, "mexp", r > 1 ? running(h, r - 1, j) : done(h, j));
        if (j < limit) step(mdp, s, "count", running(h, r, j + 1));
      }
    for (std::size_t j = 0; j <= limit; ++j) step(mdp, done(h, j), "idle", done(h, j));
  }

  std::vector<std::string> parts;
  for (std::size_t l = 0; l <= (onlyFirst ? 0 : limit); ++l) {
    const std::string ap = "j" + std::to_string(l);
    parts.push_back(sameProbability("F " + ap + "(t1)", "F " + ap + "(t2)"));
  }
  f.formula = std::string(kPrefix) + premise("h0", "h1") + " -> " + conjunction(parts);
  if (k == 1) {
    f.targetStates = 15;
    f.targetTransitions = 23;
  }
  return f;
}

CaseStudyFixture buildACDB() {
  CaseStudyFixture f;
  f.name = "ACDB";
  Mdp& mdp = f.mdp;
  for (const char* ap : {"init", "h0", "h1", "a", "b", "c", "d"}) mdp.declareAp(ap);

  // pc1: 0 before the critical region, 1 inside it (semaphore held), 2 done.
  // pc2: 0 before print(c), 1 before the branch, 2 before print(d), 3 done.
  // out: last printed character, or '-' when nothing was printed by the
  // latest step.
  struct Config {
    std::size_t h, pc1, pc2;
    char out;
    auto operator<=>(const Config&) const = default;
  };
  auto name = [](const Config& c) {
    return "h" + std::to_string(c.h) + "_" + std::to_string(c.pc1) + "_" + std::to_string(c.pc2) + "_" + c.out;
  };
  auto successors = [](const Config& c) {
    std::vector<std::pair<std::string, Config>> out;
    if (c.pc1 == 0) out.push_back({"t1", {c.h, 1, c.pc2, 'a'}});
    if (c.pc1 == 1) out.push_back({"t1", {c.h, 2, c.pc2, 'b'}});
    if (c.pc2 == 0) out.push_back({"t2", {c.h, c.pc1, 1, 'c'}});
    if (c.pc2 == 1 && c.h == 0) out.push_back({"t2", {c.h, c.pc1, 3, 'd'}});
    if (c.pc2 == 1 && c.h == 1 && c.pc1 != 1) out.push_back({"t2", {c.h, c.pc1, 2, '-'}});
    if (c.pc2 == 2) out.push_back({"t2", {c.h, c.pc1, 3, 'd'}});
    if (out.empty()) out.push_back({"idle", c});
    return out;
  };

  std::map<Config, bool> seen;
  std::vector<Config> order;
  std::deque<Config> frontier;
  for (std::size_t h = 0; h <= 1; ++h) {
    Config start{h, 0, 0, '-'};
    seen[start] = true;
    order.push_back(start);
    frontier.push_back(start);
  }
  while (!frontier.empty()) {
    const Config c = frontier.front();
    frontier.pop_front();
    for (const auto& [action, next] : successors(c))
      if (!seen.count(next)) {
        seen[next] = true;
        order.push_back(next);
        frontier.push_back(next);
      }
  }
  for (const Config& c : order) {
    std::vector<std::string> labels;
    if (c.out != '-') labels.push_back(std::string(1, c.out));
    if (c.pc1 == 0 && c.pc2 == 0) labels.insert(labels.end(), {"init", "h" + std::to_string(c.h)});
    mdp.addState(name(c), labels);
  }
  for (const Config& c : order)
    for (const auto& [action, next] : successors(c)) step(mdp, name(c), action, name(next));

  std::vector<std::string> parts;
  for (const char* x : {"a", "b", "c", "d"})
    parts.push_back(sameProbability(std::string("X ") + x + "(t1)", std::string("X ") + x + "(t2)"));
  f.formula = std::string(kPrefix) + premise("h0", "h1") + " -> (P(G " + conjunction(parts) + ") = 1)";
  f.targetStates = 24;
  f.targetTransitions = 36;
  return f;
}

void writeFixture(const CaseStudyFixture& fixture, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "model.mdp");
    out << writeMdp(fixture.mdp);
    if (!out) throw std::runtime_error("cannot write " + (dir / "model.mdp").string());
  }
  std::ofstream out(dir / "formula.txt");
  out << fixture.formula << '\n';
  if (!out) throw std::runtime_error("cannot write " + (dir / "formula.txt").string());
}

}  // namespace ahmc
