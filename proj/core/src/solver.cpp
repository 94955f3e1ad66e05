#include "ahmc/solver.hpp"

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace ahmc {

std::string toString(Verdict verdict) {
  switch (verdict) {
    case Verdict::Sat: return "sat";
    case Verdict::Unsat: return "unsat";
    case Verdict::Unknown: return "unknown";
    case Verdict::Timeout: return "timeout";
  }
  return "unknown";
}

std::string toString(Outcome outcome) {
  switch (outcome) {
    case Outcome::Holds: return "holds";
    case Outcome::Fails: return "fails";
    case Outcome::Unknown: return "unknown";
  }
  return "unknown";
}

int exitCode(Outcome outcome) {
  switch (outcome) {
    case Outcome::Holds: return 0;
    case Outcome::Fails: return 1;
    case Outcome::Unknown: return 2;
  }
  return 2;
}

MemorylessScheduler Witness::scheduler() const {
  std::map<ActionSet, std::map<ActionIndex, Rational>> dists;
  for (const auto& [key, p] : schedulerProbs) {
    auto& dist = dists[key.first];
    if (p != 0) dist[key.second] = p;
  }
  MemorylessScheduler sched;
  for (auto& [set, dist] : dists) sched.set(set, std::move(dist));
  return sched;
}

std::vector<CountingStutterScheduler> Witness::stutterers(std::size_t experiments) const {
  std::vector<CountingStutterScheduler> out(experiments, CountingStutterScheduler(memory));
  for (const auto& [key, d] : stutterDurations) {
    const auto& [i, s, a] = key;
    if (i >= 1 && i <= experiments) out[i - 1].set(s, a, d);
  }
  return out;
}

std::string defaultSolverCommand() {
  if (const char* env = std::getenv("AHMC_SOLVER"); env && *env) return env;
  return "z3";
}

namespace {

struct SExpr {
  bool list = false;
  std::string atom;
  std::vector<SExpr> items;
};

class SExprReader {
public:
  explicit SExprReader(const std::string& text) : text_(text) {}

  bool next(SExpr& out) {
    skip();
    if (pos_ >= text_.size()) return false;
    out = read();
    return true;
  }

private:
  void skip() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip();
    if (pos_ >= text_.size()) throw SolverError("unexpected end of solver output");
    SExpr e;
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      e.list = true;
      while (true) {
        skip();
        if (pos_ >= text_.size()) throw SolverError("unbalanced parentheses in solver output");
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    if (c == ')') throw SolverError("unbalanced parentheses in solver output");
    if (c == '"') {
      std::size_t end = pos_ + 1;
      while (end < text_.size()) {
        if (text_[end] == '"') {
          if (end + 1 < text_.size() && text_[end + 1] == '"') {
            end += 2;
            continue;
          }
          break;
        }
        ++end;
      }
      e.atom = text_.substr(pos_, end + 1 - pos_);
      pos_ = std::min(end + 1, text_.size());
      return e;
    }
    std::size_t end = pos_;
    while (end < text_.size() && !std::isspace(static_cast<unsigned char>(text_[end])) && text_[end] != '(' &&
           text_[end] != ')')
      ++end;
    e.atom = text_.substr(pos_, end - pos_);
    pos_ = end;
    return e;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

// Exact value of a numeral term; nullopt for algebraic numbers and the like.
std::optional<Rational> exactValue(const SExpr& e, bool& approximate) {
  if (!e.list) {
    if (e.atom == "true") return Rational(1);
    if (e.atom == "false") return Rational(0);
    std::string text = e.atom;
    if (!text.empty() && text.back() == '?') {
      text.pop_back();
      approximate = true;
    }
    try {
      return parseRational(text);
    } catch (const ParseError&) {
      return std::nullopt;
    }
  }
  if (e.items.empty() || e.items[0].list) return std::nullopt;
  const std::string& head = e.items[0].atom;
  if (head == "-" && e.items.size() == 2) {
    auto v = exactValue(e.items[1], approximate);
    if (v) return Rational(-*v);
    return std::nullopt;
  }
  if (head == "-" && e.items.size() == 3) {
    auto a = exactValue(e.items[1], approximate);
    auto b = exactValue(e.items[2], approximate);
    if (a && b) return Rational(*a - *b);
    return std::nullopt;
  }
  if (head == "/" && e.items.size() == 3) {
    auto a = exactValue(e.items[1], approximate);
    auto b = exactValue(e.items[2], approximate);
    if (a && b && *b != 0) return Rational(*a / *b);
    return std::nullopt;
  }
  return std::nullopt;
}

bool isValueList(const SExpr& e) {
  if (!e.list || e.items.empty()) return false;
  for (const auto& pair : e.items)
    if (!pair.list || pair.items.size() != 2 || pair.items[0].list) return false;
  return true;
}

std::vector<std::string> witnessQueries(const ConstraintSystem& system, const std::vector<std::string>& queries) {
  std::vector<std::string> names;
  for (const auto& v : system.sigmaVars) names.push_back(v.name);
  for (const auto& v : system.tauVars) names.push_back(v.name);
  names.insert(names.end(), queries.begin(), queries.end());
  return names;
}

std::vector<std::string> splitCommand(const std::string& command) {
  std::istringstream in(command);
  std::vector<std::string> argv;
  for (std::string word; in >> word;) argv.push_back(word);
  return argv;
}

struct ProcessResult {
  std::string output;
  bool timedOut = false;
  int status = 0;
};

ProcessResult runProcess(const std::vector<std::string>& argv, double timeoutSeconds) {
  if (argv.empty()) throw SolverError("empty solver command");
  int out[2];
  int failure[2];
  if (pipe(out) != 0) throw SolverError(std::string("pipe: ") + std::strerror(errno));
  if (pipe2(failure, O_CLOEXEC) != 0) {
    close(out[0]);
    close(out[1]);
    throw SolverError(std::string("pipe: ") + std::strerror(errno));
  }

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  const pid_t pid = fork();
  if (pid < 0) throw SolverError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    // Own process group so a timeout can take down anything it spawned.
    setpgid(0, 0);
    dup2(out[1], STDOUT_FILENO);
    dup2(out[1], STDERR_FILENO);
    close(out[0]);
    close(out[1]);
    close(failure[0]);
    execvp(args[0], args.data());
    const int err = errno;
    [[maybe_unused]] ssize_t ignored = write(failure[1], &err, sizeof err);
    _exit(127);
  }
  setpgid(pid, pid);
  close(out[1]);
  close(failure[1]);

  int execErrno = 0;
  const ssize_t got = read(failure[0], &execErrno, sizeof execErrno);
  close(failure[0]);
  if (got == sizeof execErrno) {
    close(out[0]);
    waitpid(pid, nullptr, 0);
    throw SolverError("cannot start solver '" + argv[0] + "': " + std::strerror(execErrno));
  }

  ProcessResult result;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeoutSeconds);
  char buffer[65536];
  while (true) {
    int waitMs = -1;
    if (timeoutSeconds > 0) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) {
        result.timedOut = true;
        break;
      }
      waitMs = static_cast<int>(std::min<long long>(left.count(), 1000));
    }
    pollfd pfd{out[0], POLLIN, 0};
    const int ready = poll(&pfd, 1, waitMs);
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (ready == 0) continue;
    const ssize_t n = read(out[0], buffer, sizeof buffer);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    result.output.append(buffer, static_cast<std::size_t>(n));
  }
  close(out[0]);
  if (result.timedOut) kill(-pid, SIGKILL);
  while (waitpid(pid, &result.status, 0) < 0 && errno == EINTR) {
  }
  // Reap stragglers left in the group after a normal exit as well.
  kill(-pid, SIGKILL);
  return result;
}

class TempDir {
public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "ahmc-XXXXXX").string();
    if (!mkdtemp(pattern.data())) throw SolverError(std::string("mkdtemp: ") + std::strerror(errno));
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

}  // namespace

std::string solverScript(const ConstraintSystem& system, const std::vector<std::string>& queries) {
  std::string script = "(set-option :produce-models true)\n";
  script += system.toSmtLib(false);
  script += "(check-sat)\n";
  const auto names = witnessQueries(system, queries);
  if (names.empty()) return script;
  std::string list = "(get-value (";
  for (std::size_t i = 0; i < names.size(); ++i) list += (i ? " " : "") + names[i];
  list += "))\n";
  // Exact values first, then decimal renderings of the same terms for
  // solvers that print algebraic numbers.
  script += list;
  script += "(set-option :pp.decimal true)\n(set-option :pp.decimal_precision 40)\n";
  script += list;
  return script;
}

SolverResult parseSolverOutput(const ConstraintSystem& system, const std::vector<std::string>& queries,
                               const std::string& output) {
  SolverResult result;
  result.output = output;
  result.stats.variables = system.variables.size();
  result.stats.assertions = system.assertions.size();

  SExprReader reader(output);
  SExpr e;
  bool haveVerdict = false;
  std::vector<SExpr> valueLists;
  while (reader.next(e)) {
    if (!haveVerdict) {
      if (e.list) {
        if (!e.items.empty() && !e.items[0].list && e.items[0].atom == "error")
          throw SolverError("solver error: " + (e.items.size() > 1 ? e.items[1].atom : std::string()));
        throw SolverError("malformed solver output: expected a verdict");
      }
      if (e.atom == "sat") {
        result.verdict = Verdict::Sat;
      } else if (e.atom == "unsat") {
        result.verdict = Verdict::Unsat;
      } else if (e.atom == "unknown") {
        result.verdict = Verdict::Unknown;
      } else if (e.atom == "timeout") {
        result.verdict = Verdict::Timeout;
      } else {
        throw SolverError("malformed solver output: unexpected '" + e.atom + "'");
      }
      haveVerdict = true;
      continue;
    }
    if (isValueList(e)) valueLists.push_back(e);
  }
  if (!haveVerdict) throw SolverError("solver produced no verdict");
  if (result.verdict != Verdict::Sat) return result;

  const auto names = witnessQueries(system, queries);
  if (names.empty()) return result;
  if (valueLists.empty()) throw SolverError("solver reported sat but returned no model values");

  auto lookup = [](const SExpr& list) {
    std::map<std::string, const SExpr*> out;
    for (const auto& pair : list.items) out[pair.items[0].atom] = &pair.items[1];
    return out;
  };
  const auto exact = lookup(valueLists[0]);
  const auto decimal = valueLists.size() > 1 ? lookup(valueLists[1]) : std::map<std::string, const SExpr*>{};

  std::map<std::string, Rational> values;
  std::set<std::string> approximateNames;
  for (const auto& name : names) {
    auto it = exact.find(name);
    if (it == exact.end()) throw SolverError("solver did not return a value for '" + name + "'");
    bool approximate = false;
    std::optional<Rational> v = exactValue(*it->second, approximate);
    if (!v) {
      auto d = decimal.find(name);
      if (d != decimal.end()) v = exactValue(*d->second, approximate);
      approximate = true;
    }
    if (!v) throw SolverError("cannot read the value of '" + name + "'");
    if (approximate) approximateNames.insert(name);
    values[name] = *v;
  }

  Witness w;
  w.memory = system.memory;
  for (const auto& v : system.sigmaVars) {
    w.schedulerProbs[{system.actionSets.at(v.actionSet), v.action}] = values.at(v.name);
    if (approximateNames.count(v.name)) w.approximate = true;
  }
  for (const auto& v : system.tauVars) {
    const Rational& d = values.at(v.name);
    if (d.get_den() != 1 || d < 0 || d >= Rational(static_cast<long>(system.memory)))
      throw SolverError("stutter duration '" + v.name + "' = " + toString(d) + " is not in [m]");
    w.stutterDurations[{v.experiment, v.state, v.action}] = d.get_num().get_ui();
  }
  if (auto problems = validateWitness(w); !problems.empty()) throw SolverError("invalid witness: " + problems.front());
  if (w.approximate) {
    std::map<ActionSet, Rational> sums;
    for (const auto& [key, p] : w.schedulerProbs) sums[key.first] += p;
    for (auto& [key, p] : w.schedulerProbs) p /= sums.at(key.first);
  }
  result.witness = std::move(w);
  for (const auto& q : queries) result.values[q] = values.at(q);
  return result;
}

std::vector<std::string> validateWitness(const Witness& witness) {
  std::vector<std::string> problems;
  std::map<ActionSet, Rational> sums;
  for (const auto& [key, p] : witness.schedulerProbs) {
    if (p < Rational(-1, 1000000000) || p > Rational(1000000001, 1000000000))
      problems.push_back("scheduler probability " + toString(p) + " outside [0,1]");
    sums[key.first] += p;
  }
  for (const auto& [set, sum] : sums)
    if (abs(sum - 1) > Rational(1, 1000000000))
      problems.push_back("scheduler distribution sums to " + toString(sum) + " instead of 1");
  for (const auto& [key, d] : witness.stutterDurations)
    if (d >= witness.memory) problems.push_back("stutter duration " + std::to_string(d) + " not below memory bound");
  return problems;
}

ScriptRun runSolverScript(const std::string& script, const SolverConfig& config) {
  const std::string command = config.command.empty() ? defaultSolverCommand() : config.command;
  std::vector<std::string> argv = splitCommand(command);
  TempDir dir;
  const auto file = dir.path() / "system.smt2";
  {
    std::ofstream out(file);
    out << script;
    if (!out) throw SolverError("cannot write " + file.string());
  }
  argv.push_back(file.string());

  const auto started = std::chrono::steady_clock::now();
  const ProcessResult run = runProcess(argv, config.timeoutSeconds);
  ScriptRun result;
  result.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  result.output = run.output;
  result.timedOut = run.timedOut;
  return result;
}

SolverResult runSolver(const ConstraintSystem& system, const SolverConfig& config) {
  const ScriptRun run = runSolverScript(solverScript(system, config.queries), config);
  SolverResult result;
  if (run.timedOut) {
    result.verdict = Verdict::Timeout;
    result.output = run.output;
    result.stats = {run.wallSeconds, system.variables.size(), system.assertions.size()};
    return result;
  }
  result = parseSolverOutput(system, config.queries, run.output);
  result.stats.wallSeconds = run.wallSeconds;
  return result;
}

CheckOutcome reportVerdict(const HyperFormula& formula, const SolverResult& result, bool dualized) {
  (void)formula;
  CheckOutcome out;
  out.verdict = result.verdict;
  out.dualized = dualized;
  switch (result.verdict) {
    case Verdict::Sat:
      out.outcome = dualized ? Outcome::Fails : Outcome::Holds;
      out.witness = result.witness;
      out.counterexample = dualized;
      break;
    case Verdict::Unsat:
      out.outcome = dualized ? Outcome::Holds : Outcome::Fails;
      break;
    case Verdict::Unknown:
    case Verdict::Timeout:
      out.outcome = Outcome::Unknown;
      break;
  }
  return out;
}

}  // namespace ahmc
