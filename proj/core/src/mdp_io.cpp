#include "ahmc/mdp_io.hpp"

#include <fstream>
#include <sstream>

namespace ahmc {

namespace {

struct PendingChoice {
  int line;
  std::string state;
  std::string action;
  std::vector<std::pair<std::string, Rational>> successors;
};

std::vector<std::string> splitWords(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) words.push_back(word);
  return words;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

PendingChoice parseActionLine(std::string_view rest, int line) {
  const auto colon = rest.find(':');
  if (colon == std::string_view::npos) throw ParseError("expected ':' in action declaration", line, 1);
  const auto head = splitWords(rest.substr(0, colon));
  if (head.size() != 2) throw ParseError("expected 'action <state> <action> : ...'", line, 1);

  PendingChoice choice{line, head[0], head[1], {}};
  std::string_view tail = rest.substr(colon + 1);
  while (true) {
    const auto comma = tail.find(',');
    const auto item = splitWords(tail.substr(0, comma));
    if (item.size() != 2) throw ParseError("expected '<successor> <probability>'", line, 1);
    Rational p;
    try {
      p = parseRational(item[1]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line, 1);
    }
    choice.successors.emplace_back(item[0], p);
    if (comma == std::string_view::npos) break;
    tail = tail.substr(comma + 1);
  }
  return choice;
}

}  // namespace

Mdp parseMdp(std::string_view text) {
  Mdp mdp;
  std::vector<PendingChoice> pending;
  bool sawHeader = false;
  int lineNo = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineNo;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (!sawHeader) {
      if (line != "mdp") throw ParseError("expected header 'mdp'", lineNo, 1);
      sawHeader = true;
      continue;
    }
    const auto space = line.find_first_of(" \t");
    const std::string_view keyword = line.substr(0, space);
    const std::string_view rest = space == std::string_view::npos ? std::string_view{} : line.substr(space + 1);
    if (keyword == "state") {
      auto words = splitWords(rest);
      if (words.empty()) throw ParseError("state declaration without id", lineNo, 1);
      const std::string id = words.front();
      words.erase(words.begin());
      if (mdp.hasState(id)) throw ParseError("duplicate state '" + id + "'", lineNo, 1);
      mdp.addState(id, words);
    } else if (keyword == "action") {
      pending.push_back(parseActionLine(rest, lineNo));
    } else {
      throw ParseError("unknown declaration '" + std::string(keyword) + "'", lineNo, 1);
    }
  }
  if (!sawHeader) throw ParseError("empty model: missing header 'mdp'");

  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& choice : pending) {
    if (!mdp.hasState(choice.state)) throw ParseError("unknown state '" + choice.state + "'", choice.line, 1);
    if (!seen.insert({choice.state, choice.action}).second)
      throw ParseError("duplicate action '" + choice.action + "' for state '" + choice.state + "'", choice.line, 1);
    std::vector<Edge> edges;
    for (const auto& [succ, p] : choice.successors) {
      if (!mdp.hasState(succ)) throw ParseError("unknown successor '" + succ + "'", choice.line, 1);
      edges.push_back({mdp.stateIndex(succ), p});
    }
    const ActionIndex a = mdp.addAction(choice.action);
    mdp.addChoice(mdp.stateIndex(choice.state), a, std::move(edges));
  }
  return mdp;
}

Mdp parseValidMdp(std::string_view text) {
  Mdp mdp = parseMdp(text);
  const auto violations = validateMdp(mdp);
  if (!violations.empty()) {
    std::string message = "invalid model:";
    for (const auto& v : violations) message += "\n  " + describe(v);
    throw ModelError(message);
  }
  return mdp;
}

std::string readTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Mdp loadMdp(const std::filesystem::path& path, bool validate) {
  const std::string text = readTextFile(path);
  return validate ? parseValidMdp(text) : parseMdp(text);
}

std::string writeMdp(const Mdp& mdp) {
  std::ostringstream out;
  out << "mdp\n";
  for (StateIndex s = 0; s < mdp.numStates(); ++s) {
    out << "state " << mdp.stateId(s);
    for (const auto& ap : mdp.labels(s)) out << ' ' << ap;
    out << '\n';
  }
  for (StateIndex s = 0; s < mdp.numStates(); ++s) {
    for (const auto& [action, edges] : mdp.choices(s)) {
      out << "action " << mdp.stateId(s) << ' ' << mdp.actionId(action) << " :";
      for (std::size_t i = 0; i < edges.size(); ++i)
        out << (i ? ", " : " ") << mdp.stateId(edges[i].target) << ' ' << toString(edges[i].probability);
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace ahmc
