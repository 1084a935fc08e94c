#include "wcat/program.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace wcat {

namespace {

bool is_ident(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

struct Token {
  std::string text;
  int column;
};

// Splits one directive line into whitespace-separated tokens; a token may
// contain a quoted segment (label="a b") which keeps its spaces.
std::vector<Token> tokenize(const std::string& line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line[i] == '#') break;
    std::size_t start = i;
    std::string tok;
    bool quoted = false;
    while (i < line.size()) {
      char c = line[i];
      if (!quoted && std::isspace(static_cast<unsigned char>(c))) break;
      if (!quoted && c == '#') break;
      if (c == '"') {
        quoted = !quoted;
        tok.push_back(c);
        ++i;
        continue;
      }
      if (quoted && c == '\\') {
        if (i + 1 >= line.size()) throw ParseError("dangling escape", line_no, static_cast<int>(i) + 1);
        tok.push_back(line[i + 1]);
        tok.insert(tok.end() - 1, '\\');
        i += 2;
        continue;
      }
      tok.push_back(c);
      ++i;
    }
    if (quoted) throw ParseError("unterminated string", line_no, static_cast<int>(start) + 1);
    out.push_back({tok, static_cast<int>(start) + 1});
  }
  return out;
}

std::uint64_t parse_u64(const std::string& s, int line, int col) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      }))
    throw ParseError("expected unsigned integer, got '" + s + "'", line, col);
  std::uint64_t v = 0;
  for (char c : s) {
    std::uint64_t d = static_cast<std::uint64_t>(c - '0');
    if (v > (UINT64_MAX - d) / 10) throw ParseError("integer overflow in '" + s + "'", line, col);
    v = v * 10 + d;
  }
  return v;
}

std::string expect_ident(const Token& t, int line, const char* what) {
  if (!is_ident(t.text))
    throw ParseError(std::string("expected ") + what + ", got '" + t.text + "'", line, t.column);
  return t.text;
}

// key=value split; returns false if '=' absent.
bool split_kv(const std::string& tok, std::string& key, std::string& value) {
  auto eq = tok.find('=');
  if (eq == std::string::npos) return false;
  key = tok.substr(0, eq);
  value = tok.substr(eq + 1);
  return true;
}

std::string unquote_label(const std::string& raw, int line, int col) {
  if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
    throw ParseError("label must be quoted", line, col);
  std::string body = raw.substr(1, raw.size() - 2);
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\\' && i + 1 < body.size()) {
      out.push_back(body[i + 1]);
      ++i;
    } else {
      out.push_back(body[i]);
    }
  }
  return out;
}

std::string quote_label(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> split_comma(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

const char* origin_name(BoundOrigin o) {
  switch (o) {
    case BoundOrigin::driver: return "driver";
    case BoundOrigin::hardware: return "hardware";
    case BoundOrigin::protocol: return "protocol";
  }
  return "driver";
}

}  // namespace

const BasicBlock* WcirProgram::find_block(const std::string& id) const {
  for (const auto& b : blocks)
    if (b.id == id) return &b;
  return nullptr;
}

std::string Diagnostic::render() const {
  std::string out = severity == Severity::error ? "error: " : "warning: ";
  out += message;
  if (line > 0) out += " (line " + std::to_string(line) + ")";
  return out;
}

WcirProgram parse_wcir(const std::string& text) {
  WcirProgram p;
  bool saw_program = false, saw_entry = false, saw_entry_states = false;
  int line_no = 0;

  // The reference grammar is one directive per line; ';' also separates
  // directives so compact one-liners parse.
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string piece;
    std::istringstream parts(raw);
    while (std::getline(parts, piece, ';')) {
      auto toks = tokenize(piece, line_no);
      if (toks.empty()) continue;
      const std::string& d = toks[0].text;
      auto need = [&](std::size_t n, const char* usage) {
        if (toks.size() < n) throw ParseError(std::string("usage: ") + usage, line_no, toks[0].column);
      };
      if (d == "program") {
        need(2, "program <name>");
        if (saw_program) throw ParseError("duplicate program directive", line_no, toks[0].column);
        p.name = expect_ident(toks[1], line_no, "program name");
        saw_program = true;
      } else if (d == "block") {
        need(3, "block <id> cycles=<u64> [ops=...] [label=\"...\"]");
        BasicBlock b;
        b.id = expect_ident(toks[1], line_no, "block id");
        b.line = line_no;
        bool saw_cycles = false;
        for (std::size_t i = 2; i < toks.size(); ++i) {
          std::string k, v;
          if (!split_kv(toks[i].text, k, v))
            throw ParseError("expected key=value, got '" + toks[i].text + "'", line_no, toks[i].column);
          if (k == "cycles") {
            b.cycles = parse_u64(v, line_no, toks[i].column);
            saw_cycles = true;
          } else if (k == "ops") {
            for (const auto& op : split_comma(v)) {
              if (!is_ident(op))
                throw ParseError("bad op name '" + op + "'", line_no, toks[i].column);
              b.device_ops.push_back(op);
            }
          } else if (k == "label") {
            b.label = unquote_label(v, line_no, toks[i].column);
          } else {
            throw ParseError("unknown block attribute '" + k + "'", line_no, toks[i].column);
          }
        }
        if (!saw_cycles) throw ParseError("block " + b.id + " missing cycles=", line_no, toks[0].column);
        p.blocks.push_back(std::move(b));
      } else if (d == "edge") {
        need(3, "edge <from> <to>");
        Edge e;
        e.from = expect_ident(toks[1], line_no, "block id");
        e.to = expect_ident(toks[2], line_no, "block id");
        e.line = line_no;
        p.edges.push_back(std::move(e));
      } else if (d == "entry") {
        need(2, "entry <id>");
        if (saw_entry) throw ParseError("duplicate entry directive", line_no, toks[0].column);
        p.entry = expect_ident(toks[1], line_no, "block id");
        saw_entry = true;
      } else if (d == "exit") {
        need(2, "exit <id>");
        p.exits.insert(expect_ident(toks[1], line_no, "block id"));
      } else if (d == "loopbound") {
        need(4, "loopbound <header> <bound> origin=<driver|hardware|protocol>");
        LoopBound lb;
        lb.header = expect_ident(toks[1], line_no, "block id");
        lb.bound = parse_u64(toks[2].text, line_no, toks[2].column);
        lb.line = line_no;
        std::string k, v;
        if (!split_kv(toks[3].text, k, v) || k != "origin")
          throw ParseError("expected origin=..., got '" + toks[3].text + "'", line_no, toks[3].column);
        if (v == "driver") lb.origin = BoundOrigin::driver;
        else if (v == "hardware") lb.origin = BoundOrigin::hardware;
        else if (v == "protocol") lb.origin = BoundOrigin::protocol;
        else throw ParseError("unknown bound origin '" + v + "'", line_no, toks[3].column);
        p.annotations.push_back(std::move(lb));
      } else if (d == "entry_states") {
        need(2, "entry_states <state>[,<state>...]");
        if (saw_entry_states)
          throw ParseError("duplicate entry_states directive", line_no, toks[0].column);
        for (const auto& s : split_comma(toks[1].text)) {
          if (!is_ident(s)) throw ParseError("bad state id '" + s + "'", line_no, toks[1].column);
          p.entry_states.insert(s);
        }
        saw_entry_states = true;
      } else {
        throw ParseError("unknown directive '" + d + "'", line_no, toks[0].column);
      }
    }
  }
  if (!saw_program) throw ParseError("missing program directive", line_no, 1);
  if (!saw_entry) throw ParseError("missing entry directive", line_no, 1);
  return p;
}

std::string serialize_wcir(const WcirProgram& p) {
  std::ostringstream out;
  out << "program " << p.name << "\n";
  for (const auto& b : p.blocks) {
    out << "block " << b.id << " cycles=" << b.cycles;
    if (!b.device_ops.empty()) {
      out << " ops=";
      for (std::size_t i = 0; i < b.device_ops.size(); ++i)
        out << (i ? "," : "") << b.device_ops[i];
    }
    if (!b.label.empty()) out << " label=" << quote_label(b.label);
    out << "\n";
  }
  for (const auto& e : p.edges) out << "edge " << e.from << " " << e.to << "\n";
  out << "entry " << p.entry << "\n";
  for (const auto& x : p.exits) out << "exit " << x << "\n";
  for (const auto& lb : p.annotations)
    out << "loopbound " << lb.header << " " << lb.bound << " origin=" << origin_name(lb.origin)
        << "\n";
  if (!p.entry_states.empty()) {
    out << "entry_states ";
    bool first = true;
    for (const auto& s : p.entry_states) {
      out << (first ? "" : ",") << s;
      first = false;
    }
    out << "\n";
  }
  return out.str();
}

CfgIndex::CfgIndex(const WcirProgram& program) {
  for (const auto& b : program.blocks) {
    succs[b.id];
    preds[b.id];
  }
  for (const auto& e : program.edges) {
    succs[e.from].push_back(e.to);
    preds[e.to].push_back(e.from);
  }
}

void classify_edges(WcirProgram& program) {
  std::map<std::string, std::vector<std::size_t>> out_edges;
  for (std::size_t i = 0; i < program.edges.size(); ++i)
    out_edges[program.edges[i].from].push_back(i);

  enum Color { white, gray, black };
  std::map<std::string, Color> color;
  for (const auto& b : program.blocks) color[b.id] = white;
  for (auto& e : program.edges) e.kind = EdgeKind::forward;

  // Iterative DFS; an edge into a gray node is retreating.
  struct Frame {
    std::string node;
    std::size_t next = 0;
  };
  if (!color.count(program.entry)) return;
  std::vector<Frame> stack{{program.entry, 0}};
  color[program.entry] = gray;
  while (!stack.empty()) {
    Frame& f = stack.back();
    auto& outs = out_edges[f.node];
    if (f.next >= outs.size()) {
      color[f.node] = black;
      stack.pop_back();
      continue;
    }
    std::size_t ei = outs[f.next++];
    const std::string& to = program.edges[ei].to;
    auto it = color.find(to);
    if (it == color.end()) continue;  // dangling target, validator reports it
    if (it->second == white) {
      it->second = gray;
      stack.push_back({to, 0});
    } else if (it->second == gray) {
      program.edges[ei].kind = EdgeKind::back;
    }
  }
}

std::map<std::string, std::set<std::string>> dominators(const WcirProgram& program) {
  CfgIndex idx(program);
  // Reachable set in RPO-ish order via DFS.
  std::vector<std::string> order;
  std::set<std::string> seen;
  std::vector<std::string> stack{program.entry};
  if (!program.find_block(program.entry)) return {};
  seen.insert(program.entry);
  while (!stack.empty()) {
    std::string n = stack.back();
    stack.pop_back();
    order.push_back(n);
    for (const auto& s : idx.succs[n])
      if (idx.succs.count(s) && seen.insert(s).second) stack.push_back(s);
  }

  std::set<std::string> all(order.begin(), order.end());
  std::map<std::string, std::set<std::string>> dom;
  for (const auto& n : order) dom[n] = (n == program.entry) ? std::set<std::string>{n} : all;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& n : order) {
      if (n == program.entry) continue;
      std::set<std::string> meet = all;
      bool any_pred = false;
      for (const auto& p : idx.preds[n]) {
        if (!dom.count(p)) continue;  // unreachable predecessor
        any_pred = true;
        std::set<std::string> inter;
        std::set_intersection(meet.begin(), meet.end(), dom[p].begin(), dom[p].end(),
                              std::inserter(inter, inter.begin()));
        meet = std::move(inter);
      }
      if (!any_pred) meet.clear();
      meet.insert(n);
      if (meet != dom[n]) {
        dom[n] = std::move(meet);
        changed = true;
      }
    }
  }
  return dom;
}

std::vector<Diagnostic> validate(const WcirProgram& p) {
  std::vector<Diagnostic> out;
  auto err = [&](std::string msg, int line = 0) {
    out.push_back({Severity::error, std::move(msg), line});
  };

  std::set<std::string> ids;
  for (const auto& b : p.blocks) {
    if (!ids.insert(b.id).second) err("duplicate block id '" + b.id + "'", b.line);
  }
  if (p.blocks.empty()) {
    err("program has no blocks");
    return out;
  }
  if (!ids.count(p.entry)) {
    err("entry references undefined block '" + p.entry + "'");
    return out;
  }
  for (const auto& e : p.edges) {
    if (!ids.count(e.from)) err("edge references undefined block '" + e.from + "'", e.line);
    if (!ids.count(e.to)) err("edge references undefined block '" + e.to + "'", e.line);
  }
  if (p.exits.empty()) err("program has no exit blocks");
  for (const auto& x : p.exits)
    if (!ids.count(x)) err("exit references undefined block '" + x + "'");
  if (!out.empty()) return out;  // graph-shape checks need well-formed ids

  CfgIndex idx(p);
  for (const auto& x : p.exits)
    if (!idx.succs[x].empty()) err("exit block '" + x + "' has outgoing edges");

  // Reachability from entry.
  std::set<std::string> reach{p.entry};
  std::vector<std::string> stack{p.entry};
  while (!stack.empty()) {
    std::string n = stack.back();
    stack.pop_back();
    for (const auto& s : idx.succs[n])
      if (reach.insert(s).second) stack.push_back(s);
  }
  for (const auto& b : p.blocks)
    if (!reach.count(b.id)) err("block '" + b.id + "' is unreachable from entry", b.line);

  auto dom = dominators(p);
  std::map<std::string, std::uint64_t> bounds_by_header;
  for (const auto& lb : p.annotations) {
    if (!ids.count(lb.header)) {
      err("loopbound references undefined block '" + lb.header + "'", lb.line);
      continue;
    }
    if (lb.bound < 1) err("loop bound must be >= 1 on '" + lb.header + "'", lb.line);
    if (bounds_by_header.count(lb.header))
      err("multiple loop bounds for header '" + lb.header + "'", lb.line);
    bounds_by_header[lb.header] = lb.bound;
  }

  std::set<std::string> back_headers;
  for (const auto& e : p.edges) {
    if (e.kind != EdgeKind::back) continue;
    if (!reach.count(e.from)) continue;
    if (!dom[e.from].count(e.to)) {
      err("irreducible control flow: retreating edge " + e.from + "->" + e.to +
              " targets a non-dominator",
          e.line);
      continue;
    }
    back_headers.insert(e.to);
    if (!bounds_by_header.count(e.to))
      err("unbounded back edge " + e.from + "->" + e.to, e.line);
  }
  for (const auto& lb : p.annotations) {
    if (ids.count(lb.header) && !back_headers.count(lb.header))
      err("loopbound on '" + lb.header + "' which is not a loop header", lb.line);
  }
  return out;
}

WcirProgram load_program(const std::string& text) {
  WcirProgram p = parse_wcir(text);
  classify_edges(p);
  auto diags = validate(p);
  std::string errors;
  for (const auto& d : diags)
    if (d.severity == Severity::error) errors += (errors.empty() ? "" : "\n") + d.render();
  if (!errors.empty()) throw std::runtime_error(errors);
  return p;
}

WcirProgram load_program_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return load_program(ss.str());
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ":" + std::to_string(e.line) + ":" + std::to_string(e.column) +
                             ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::vector<NaturalLoop> natural_loops(const WcirProgram& p) {
  auto dom = dominators(p);
  std::map<std::string, NaturalLoop> by_header;
  CfgIndex idx(p);
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    const Edge& e = p.edges[i];
    if (e.kind != EdgeKind::back) continue;
    if (!dom.count(e.from)) continue;  // unreachable tail
    if (!dom[e.from].count(e.to)) throw std::runtime_error("irreducible control flow");
    NaturalLoop& loop = by_header[e.to];
    loop.header = e.to;
    loop.back_edges.push_back(i);
    loop.body.insert(e.to);
    // Reverse flood from the tail, not crossing the header.
    std::vector<std::string> stack;
    if (loop.body.insert(e.from).second) stack.push_back(e.from);
    while (!stack.empty()) {
      std::string n = stack.back();
      stack.pop_back();
      if (n == e.to) continue;
      for (const auto& pred : idx.preds[n])
        if (dom.count(pred) && loop.body.insert(pred).second) stack.push_back(pred);
    }
  }
  std::vector<NaturalLoop> out;
  for (auto& [h, loop] : by_header) out.push_back(std::move(loop));
  return out;
}

}  // namespace wcat
