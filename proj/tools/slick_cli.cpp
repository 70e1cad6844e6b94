// Command-line surface: evaluate and check policy files, run scenarios,
// audit traces, and browse a trace in a two-pane terminal inspector.
#include <sys/ioctl.h>
#include <termios.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "mas/scenario.hpp"
#include "slick/parse.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUserError = 1;
constexpr int kExitViolation = 2;  // replay divergence or strict prohibition

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int cmd_eval(const std::string& file, std::size_t bound,
             const std::string& query) {
  slick::ParseResult parse = slick::parse_policy(read_file(file));
  for (const slick::Diag& d : parse.diags)
    std::cerr << file << ":" << d.render() << "\n";
  if (!parse.ok()) return kExitUserError;

  slick::Denotation d = slick::eval(parse.policy, bound);
  if (!query.empty()) {
    slick::FactParse q = slick::parse_fact(query);
    if (!q.ok()) {
      std::cerr << "bad query fact: " << query << "\n";
      return kExitUserError;
    }
    switch (slick::truth(parse.policy, q.fact, bound)) {
      case slick::Truth::True: std::cout << "true\n"; break;
      case slick::Truth::Undecided: std::cout << "undecided\n"; break;
      case slick::Truth::NotTrue: std::cout << "not-true\n"; break;
    }
  } else {
    std::cout << "trues:\n";
    for (const slick::Fact& f : d.trues) std::cout << "  " << f.render() << "\n";
    std::cout << "unknowns:\n";
    for (const slick::Fact& f : d.unknowns)
      std::cout << "  " << f.render() << "\n";
  }
  std::cout << "validity=" << (d.valid() ? "true" : "false");
  if (d.bound_exceeded) std::cout << " (bound exceeded)";
  std::cout << "\n";
  return kExitOk;
}

int cmd_check(const std::string& file) {
  slick::ParseResult parse = slick::parse_policy(read_file(file));
  for (const slick::Diag& d : parse.diags)
    std::cout << file << ":" << d.render() << "\n";
  if (!parse.ok()) return kExitUserError;
  std::cout << file << ": " << parse.policy.rules.size() << " rules, ok\n";
  return kExitOk;
}

int cmd_run(const std::string& scenario, const std::string& out,
            std::size_t bound, bool strict) {
  mas::ScenarioSpec spec =
      mas::load_scenario(mas::resolve_scenario_dir(scenario));
  mas::EngineOptions options;
  options.bound = bound;
  options.strict = strict;
  mas::RunResult r = mas::run_scenario(spec, options);

  int statements = 0, enactments = 0, permitted = 0, grants = 0,
      prohibited = 0;
  for (const mas::TraceRecord& rec : r.trace.records) {
    if (const auto* a = std::get_if<mas::AccessEvent>(&rec)) {
      if (a->granted) ++grants;
      continue;
    }
    const auto& e = std::get<mas::TraceEvent>(rec);
    if (e.reject == mas::Reject::Prohibited) ++prohibited;
    if (!e.applied) continue;
    if (std::holds_alternative<mas::StateUpdate>(e.update)) ++statements;
    if (std::holds_alternative<mas::EnactUpdate>(e.update)) {
      ++enactments;
      if (e.permission->permitted()) ++permitted;
    }
  }
  if (!out.empty()) mas::save_trace(r.trace, out);
  std::cout << spec.name << ": " << statements << " statements, "
            << enactments << " enactments (" << permitted << " permitted), "
            << grants << " granted accesses, " << r.rounds << " rounds\n";
  return strict && prohibited > 0 ? kExitViolation : kExitOk;
}

int cmd_audit(const std::string& file, std::optional<std::size_t> index) {
  mas::Trace trace = mas::load_trace(file);
  try {
    mas::replay(trace);
  } catch (const mas::ReplayDivergence& d) {
    std::cerr << "replay diverged at record " << d.index << ": " << d.what()
              << "\n";
    return kExitViolation;
  }
  if (index.has_value()) {
    std::cout << mas::audit(trace, *index).render();
    return kExitOk;
  }
  for (const mas::AuditReport& report : mas::audit_all(trace))
    std::cout << report.render() << "\n";
  return kExitOk;
}

// ---- inspect: a read-only two-pane trace browser ----

std::string summary_line(const mas::TraceRecord& rec) {
  if (const auto* a = std::get_if<mas::AccessEvent>(&rec)) {
    std::string s = a->request.agent.render() + " " +
                    mas::verb_name(a->request.verb) + " " +
                    a->request.variable.render();
    return (a->granted ? "access + " : "access - ") + s;
  }
  const auto& e = std::get<mas::TraceEvent>(rec);
  std::string mark = e.applied ? "+ " : "- ";
  if (const auto* u = std::get_if<mas::StateUpdate>(&e.update))
    return "state  " + mark + u->message.id.render();
  if (const auto* u = std::get_if<mas::EnactUpdate>(&e.update))
    return "enact  " + mark + u->action.actor.render();
  if (const auto* u = std::get_if<mas::AgreeUpdate>(&e.update))
    return "agree  " + mark + std::to_string(u->agreed.size()) + " message(s)";
  if (const auto* u = std::get_if<mas::GossipUpdate>(&e.update))
    return "gossip " + mark + u->message.id.render() + " to " +
           u->to.render();
  const auto& u = std::get<mas::ForgetUpdate>(e.update);
  return "forget " + mark + u.message.id.render() + " by " + u.agent.render();
}

std::vector<std::string> detail_lines(const mas::Trace& trace,
                                      std::size_t index) {
  const mas::TraceRecord& rec = trace.records[index];
  std::vector<std::string> out;
  auto add = [&](const std::string& line) {
    std::istringstream split(line);
    std::string piece;
    while (std::getline(split, piece)) out.push_back(piece);
  };
  if (const auto* a = std::get_if<mas::AccessEvent>(&rec)) {
    add("data-plane access request");
    add("  agent:    " + a->request.agent.render());
    add("  verb:     " + mas::verb_name(a->request.verb));
    add("  variable: " + a->request.variable.render());
    add("  action:   record " + std::to_string(a->request.action_ref));
    add(a->granted ? "  outcome:  granted"
                   : "  outcome:  denied (" + mas::deny_name(*a->reason) + ")");
    if (a->granted) add("  content:  " + a->content);
    return out;
  }
  const auto& e = std::get<mas::TraceEvent>(rec);
  if (std::holds_alternative<mas::EnactUpdate>(e.update)) {
    try {
      add(mas::audit(trace, index).render());
      return out;
    } catch (const mas::NotAnEnactment&) {
    }
  }
  add(summary_line(rec));
  if (e.reject.has_value()) add("rejected: " + mas::reject_name(*e.reject));
  if (const auto* u = std::get_if<mas::StateUpdate>(&e.update)) {
    add("policy:");
    add(u->message.source);
  }
  if (const auto* u = std::get_if<mas::AgreeUpdate>(&e.update)) {
    add("agreed list:");
    for (const mas::Message& m : u->agreed) add("  " + m.id.render());
  }
  return out;
}

int cmd_inspect(const std::string& file) {
  mas::Trace trace = mas::load_trace(file);
  if (trace.records.empty()) {
    std::cout << "trace is empty\n";
    return kExitOk;
  }

  if (isatty(STDIN_FILENO) == 0 || isatty(STDOUT_FILENO) == 0) {
    // Static fallback: the same two panes, flattened.
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
      std::printf("%4zu  %s\n", i, summary_line(trace.records[i]).c_str());
      for (const std::string& line : detail_lines(trace, i))
        std::printf("      | %s\n", line.c_str());
    }
    return kExitOk;
  }

  termios saved{};
  tcgetattr(STDIN_FILENO, &saved);
  termios raw = saved;
  raw.c_lflag &= ~static_cast<tcflag_t>(ICANON | ECHO);
  tcsetattr(STDIN_FILENO, TCSANOW, &raw);
  std::fputs("\x1b[?1049h\x1b[?25l", stdout);  // alternate screen, hide cursor

  std::size_t selected = 0;
  std::size_t top = 0;
  bool running = true;
  while (running) {
    winsize ws{};
    ioctl(STDOUT_FILENO, TIOCGWINSZ, &ws);
    int rows = ws.ws_row > 4 ? ws.ws_row : 24;
    int cols = ws.ws_col > 20 ? ws.ws_col : 80;
    int left = cols / 3 > 28 ? cols / 3 : 28;
    int body = rows - 2;

    if (selected < top) top = selected;
    if (selected >= top + static_cast<std::size_t>(body))
      top = selected - body + 1;

    std::string screen = "\x1b[H\x1b[2J";
    screen += "\x1b[7m " + std::string(file) + " - " +
              std::to_string(trace.records.size()) +
              " records (j/k move, g/G jump, q quit)";
    if (static_cast<int>(screen.size()) < cols) screen.append(cols, ' ');
    screen += "\x1b[0m\r\n";

    std::vector<std::string> detail = detail_lines(trace, selected);
    for (int row = 0; row < body; ++row) {
      std::size_t i = top + static_cast<std::size_t>(row);
      std::string lhs;
      if (i < trace.records.size()) {
        char head[16];
        std::snprintf(head, sizeof head, "%4zu ", i);
        lhs = std::string(head) + summary_line(trace.records[i]);
      }
      if (static_cast<int>(lhs.size()) > left)
        lhs = lhs.substr(0, static_cast<std::size_t>(left));
      lhs.append(static_cast<std::size_t>(left) - lhs.size(), ' ');
      if (i == selected) lhs = "\x1b[7m" + lhs + "\x1b[0m";
      std::string rhs = static_cast<std::size_t>(row) < detail.size()
                            ? detail[static_cast<std::size_t>(row)]
                            : "";
      int rhs_room = cols - left - 3;
      if (rhs_room > 0 && static_cast<int>(rhs.size()) > rhs_room)
        rhs = rhs.substr(0, static_cast<std::size_t>(rhs_room));
      screen += lhs + " | " + rhs + "\r\n";
    }
    std::fputs(screen.c_str(), stdout);
    std::fflush(stdout);

    char c = 0;
    if (read(STDIN_FILENO, &c, 1) != 1) break;
    if (c == '\x1b') {
      char seq[2] = {0, 0};
      if (read(STDIN_FILENO, &seq[0], 1) == 1 && seq[0] == '[' &&
          read(STDIN_FILENO, &seq[1], 1) == 1) {
        if (seq[1] == 'A') c = 'k';
        if (seq[1] == 'B') c = 'j';
      }
    }
    switch (c) {
      case 'q': running = false; break;
      case 'j':
        if (selected + 1 < trace.records.size()) ++selected;
        break;
      case 'k':
        if (selected > 0) --selected;
        break;
      case 'g': selected = 0; break;
      case 'G': selected = trace.records.size() - 1; break;
      default: break;
    }
  }

  std::fputs("\x1b[?25h\x1b[?1049l", stdout);
  tcsetattr(STDIN_FILENO, TCSANOW, &saved);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slick policy toolkit"};
  app.require_subcommand(1);

  std::string file, scenario, out, query;
  std::size_t bound = slick::kDefaultBound;
  bool strict = false;
  std::optional<std::size_t> index;

  CLI::App* eval = app.add_subcommand("eval", "evaluate a policy file");
  eval->add_option("file", file)->required();
  eval->add_option("--bound", bound, "derivation step bound");
  eval->add_option("--query", query, "print the truth of one fact");

  CLI::App* check = app.add_subcommand("check", "parse and lint a policy file");
  check->add_option("file", file)->required();

  CLI::App* run = app.add_subcommand("run", "run a bundled scenario");
  run->add_option("scenario", scenario)->required();
  run->add_option("--out", out, "write the trace to this path");
  run->add_option("--bound", bound, "derivation step bound");
  run->add_flag("--strict", strict, "reject prohibited enactments");

  CLI::App* audit = app.add_subcommand("audit", "audit a trace file");
  audit->add_option("trace", file)->required();
  audit->add_option("index", index, "audit one enactment only");

  CLI::App* inspect =
      app.add_subcommand("inspect", "browse a trace interactively");
  inspect->add_option("trace", file)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->parsed()) return cmd_eval(file, bound, query);
    if (check->parsed()) return cmd_check(file);
    if (run->parsed()) return cmd_run(scenario, out, bound, strict);
    if (audit->parsed()) return cmd_audit(file, index);
    if (inspect->parsed()) return cmd_inspect(file);
  } catch (const mas::NotAnEnactment& e) {
    std::cerr << e.what() << "\n";
    return kExitUserError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitUserError;
  }
  return kExitUserError;
}
