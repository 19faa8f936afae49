#include "anbv/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace anbv {

namespace {

enum class Tok { Ident, Colon, Semi, Comma, LParen, RParen, Arrow, Neq, Label, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
  Channel channel = Channel::Plain;  // arrows only
};

struct SyntaxError {
  std::string message;
  int line;
  int column;
};

constexpr int kMaxNesting = 200;

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool label_char(char c) { return ident_char(c) || c == '.' || c == '-'; }

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto starts = [&](const char* s) { return src.compare(i, std::char_traits<char>::length(s), s) == 0; };

  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    const int tl = line;
    const int tc = col;
    if (c == '#') {
      // `#word` followed only by blanks up to the line end is a label
      std::size_t j = i + 1;
      while (j < src.size() && label_char(src[j])) ++j;
      std::size_t k = j;
      while (k < src.size() && (src[k] == ' ' || src[k] == '\t' || src[k] == '\r')) ++k;
      if (j > i + 1 && (k == src.size() || src[k] == '\n')) {
        out.push_back({Tok::Label, src.substr(i + 1, j - i - 1), tl, tc});
        advance(k - i);
      } else {
        while (i < src.size() && src[i] != '\n') advance(1);
      }
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Tok::Ident, src.substr(i, j - i), tl, tc});
      advance(j - i);
      continue;
    }
    if (starts("*->*")) {
      out.push_back({Tok::Arrow, "*->*", tl, tc, Channel::Secure});
      advance(4);
    } else if (starts("*->")) {
      out.push_back({Tok::Arrow, "*->", tl, tc, Channel::Authentic});
      advance(3);
    } else if (starts("->*")) {
      out.push_back({Tok::Arrow, "->*", tl, tc, Channel::Confidential});
      advance(3);
    } else if (starts("->")) {
      out.push_back({Tok::Arrow, "->", tl, tc, Channel::Plain});
      advance(2);
    } else if (starts("!=")) {
      out.push_back({Tok::Neq, "!=", tl, tc});
      advance(2);
    } else if (c == ':' || c == ';' || c == ',' || c == '(' || c == ')') {
      const Tok k = c == ':' ? Tok::Colon : c == ';' ? Tok::Semi : c == ',' ? Tok::Comma
                  : c == '(' ? Tok::LParen : Tok::RParen;
      out.push_back({k, std::string(1, c), tl, tc});
      advance(1);
    } else {
      const unsigned char u = static_cast<unsigned char>(c);
      std::string shown = u < 0x20 || u >= 0x7f ? "byte 0x" + [&] {
        std::ostringstream os;
        os << std::hex << static_cast<int>(u);
        return os.str();
      }() : std::string("'") + c + "'";
      throw SyntaxError{"unexpected character " + shown, tl, tc};
    }
  }
  out.push_back({Tok::End, "end of input", line, col});
  return out;
}

bool is_section_word(const std::string& s) {
  return s == "Protocol" || s == "Types" || s == "Definitions" || s == "Knowledge" || s == "Actions" ||
         s == "Goals";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Protocol run() {
    section("Protocol");
    p_.name = expect_ident("protocol name").text;
    section("Types");
    parse_types();
    if (at_section("Definitions")) {
      section("Definitions");
      parse_definitions();
    }
    section("Knowledge");
    parse_knowledge();
    section("Actions");
    parse_actions();
    section("Goals");
    parse_goals();
    if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "' after Goals section");
    return std::move(p_);
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  [[noreturn]] static void fail(const Token& t, std::string msg) { throw SyntaxError{std::move(msg), t.line, t.column}; }

  bool accept(Tok k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(peek(), std::string("expected ") + what + ", found '" + peek().text + "'");
    return next();
  }
  const Token& expect_ident(const char* what) { return expect(Tok::Ident, what); }
  bool at_word(const char* w, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && peek(ahead).text == w;
  }
  bool at_section(const char* w) const { return at_word(w) && peek(1).kind == Tok::Colon; }
  bool at_any_section() const { return peek().kind == Tok::Ident && is_section_word(peek().text) && peek(1).kind == Tok::Colon; }

  void section(const char* w) {
    if (!at_section(w)) fail(peek(), std::string("expected section '") + w + ":', found '" + peek().text + "'");
    next();
    next();
  }

  static SourcePos at(const Token& t) { return {t.line, t.column}; }

  void parse_types() {
    while (at_word("Agent") || at_word("Number") || at_word("Function")) {
      const std::string kind = next().text;
      do {
        const Token& id = expect_ident("identifier");
        if (kind == "Agent") {
          p_.agents.push_back({id.text, std::islower(static_cast<unsigned char>(id.text[0])) != 0});
        } else if (kind == "Number") {
          p_.numbers.push_back(id.text);
        } else {
          p_.functions.push_back({id.text, -1});
        }
      } while (accept(Tok::Comma));
      accept(Tok::Semi);
    }
    if (!at_any_section()) fail(peek(), "expected 'Agent', 'Number' or 'Function' declaration, found '" + peek().text + "'");
  }

  void parse_definitions() {
    while (!at_any_section()) {
      const Token& id = expect_ident("definition name");
      expect(Tok::Colon, "':'");
      p_.definitions.push_back({id.text, term_list(), at(id)});
      accept(Tok::Semi);
    }
  }

  void parse_knowledge() {
    while (!at_any_section() && !at_word("where")) {
      const Token& role = expect_ident("role name");
      expect(Tok::Colon, "':'");
      RoleKnowledge rk{role.text, {}, at(role)};
      do {
        if (peek().kind == Tok::Ident && p_.function(peek().text) && peek(1).kind != Tok::LParen) {
          rk.items.push_back({std::nullopt, next().text});
        } else {
          rk.items.push_back({primary(0), {}});
        }
      } while (accept(Tok::Comma));
      accept(Tok::Semi);
      p_.knowledge.push_back(std::move(rk));
    }
    if (at_word("where")) {
      next();
      do {
        const Token& l = expect_ident("role name");
        expect(Tok::Neq, "'!='");
        const Token& r = expect_ident("role name");
        p_.constraints.push_back({l.text, r.text, at(l)});
      } while (accept(Tok::Comma));
      accept(Tok::Semi);
    }
  }

  void parse_actions() {
    while (!at_any_section()) {
      const Token& from = expect_ident("sender role");
      const Token& arrow = expect(Tok::Arrow, "channel arrow");
      const Token& to = expect_ident("receiver role");
      expect(Tok::Colon, "':'");
      Action a{{}, from.text, to.text, arrow.channel, term_list(), at(from)};
      if (peek().kind == Tok::Label) {
        a.label = next().text;
      } else {
        a.label = "A" + std::to_string(p_.actions.size() + 1);
      }
      p_.actions.push_back(std::move(a));
    }
  }

  void parse_goals() {
    while (peek().kind != Tok::End) {
      const Token& start = peek();
      Goal g;
      g.pos = at(start);
      if (start.kind == Tok::Ident && (at_word("authenticates", 1) || at_word("weakly", 1))) {
        g.authenticator = next().text;
        g.kind = GoalKind::StrongAuth;
        if (at_word("weakly")) {
          next();
          g.kind = GoalKind::WeakAuth;
        }
        if (!at_word("authenticates")) fail(peek(), "expected 'authenticates'");
        next();
        g.peer = expect_ident("authenticated role").text;
        if (!at_word("on")) fail(peek(), "expected 'on'");
        next();
        g.payload = term_list();
      } else {
        g.payload = term_list();
        if (!at_word("secret")) fail(peek(), "expected 'secret between' or an authentication goal");
        next();
        if (!at_word("between")) fail(peek(), "expected 'between'");
        next();
        do {
          g.parties.push_back(expect_ident("agent").text);
        } while (accept(Tok::Comma));
      }
      if (peek().kind == Tok::Label) {
        g.id = next().text;
      } else {
        g.id = "G" + std::to_string(p_.goals.size() + 1);
      }
      p_.goals.push_back(std::move(g));
    }
  }

  Term ident_term(const std::string& name) const { return p_.role_term(name); }

  Term term_list(int nesting = 0) {
    std::vector<Term> items;
    items.push_back(primary(nesting));
    while (accept(Tok::Comma)) items.push_back(primary(nesting));
    return items.size() == 1 ? items.front() : Term::tuple(std::move(items));
  }

  Term primary(int nesting) {
    if (nesting > kMaxNesting) fail(peek(), "terms nested too deeply");
    if (peek().kind == Tok::LParen) {
      next();
      Term inner = term_list(nesting + 1);
      expect(Tok::RParen, "')'");
      return inner;
    }
    const Token& id = expect_ident("term");
    if (is_section_word(id.text) && peek().kind == Tok::Colon) fail(id, "unexpected section '" + id.text + "'");
    if (!accept(Tok::LParen)) return ident_term(id.text);
    std::vector<Term> args;
    if (peek().kind != Tok::RParen) {
      do {
        args.push_back(primary(nesting + 1));
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    return Term::apply(id.text, std::move(args));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Protocol p_;
};

std::string render_inner(const Term& t, bool top) {
  if (t.is_tuple()) {
    std::string out;
    for (std::size_t i = 0; i < t.args().size(); ++i) {
      if (i) out += ", ";
      out += render_inner(t.args()[i], false);
    }
    return top ? out : "(" + out + ")";
  }
  if (t.is_fnapp()) {
    std::string out = t.name() + "(";
    for (std::size_t i = 0; i < t.args().size(); ++i) {
      if (i) out += ", ";
      out += render_inner(t.args()[i], false);
    }
    return out + ")";
  }
  return t.str();
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
  return out;
}

}  // namespace

ParseResult parse(const SourceSpec& source) {
  ParseResult result;
  try {
    Parser parser(lex(source.text));
    Protocol p = parser.run();
    result.diagnostics = infer_arities(p);
    for (Diagnostic& d : validate(p)) {
      const bool duplicate = std::any_of(result.diagnostics.begin(), result.diagnostics.end(),
                                         [&](const Diagnostic& e) { return e.message == d.message && e.line == d.line; });
      if (!duplicate) result.diagnostics.push_back(std::move(d));
    }
    result.protocol = std::move(p);
  } catch (const SyntaxError& e) {
    result.diagnostics.push_back({Diagnostic::Severity::Error, e.message, e.line, e.column});
  }
  return result;
}

std::string render_term(const Term& t) { return render_inner(t, true); }

std::string render(const Protocol& p) {
  std::ostringstream os;
  os << "Protocol: " << p.name << "\n\nTypes:\n";
  std::vector<std::string> agents;
  for (const AgentDecl& a : p.agents) agents.push_back(a.name);
  if (!agents.empty()) os << "  Agent " << join_names(agents) << ";\n";
  if (!p.numbers.empty()) os << "  Number " << join_names(p.numbers) << ";\n";
  std::vector<std::string> fns;
  for (const FunctionDecl& f : p.functions) fns.push_back(f.name);
  if (!fns.empty()) os << "  Function " << join_names(fns) << ";\n";

  if (!p.definitions.empty()) {
    os << "\nDefinitions:\n";
    for (const Definition& d : p.definitions) os << "  " << d.name << ": " << render_term(d.body) << ";\n";
  }

  os << "\nKnowledge:\n";
  for (const RoleKnowledge& k : p.knowledge) {
    os << "  " << k.role << ": ";
    for (std::size_t i = 0; i < k.items.size(); ++i) {
      if (i) os << ", ";
      os << (k.items[i].term ? render_inner(*k.items[i].term, false) : k.items[i].function);
    }
    os << ";\n";
  }
  if (!p.constraints.empty()) {
    os << "  where ";
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
      if (i) os << ", ";
      os << p.constraints[i].left << "!=" << p.constraints[i].right;
    }
    os << "\n";
  }

  os << "\nActions:\n";
  for (const Action& a : p.actions) {
    os << "  " << a.sender << " " << arrow_of(a.channel) << " " << a.receiver << ": " << render_term(a.message)
       << "  #" << a.label << "\n";
  }

  os << "\nGoals:\n";
  for (const Goal& g : p.goals) {
    os << "  ";
    switch (g.kind) {
      case GoalKind::Secrecy:
        os << render_term(g.payload) << " secret between " << join_names(g.parties);
        break;
      case GoalKind::WeakAuth:
        os << g.authenticator << " weakly authenticates " << g.peer << " on " << render_term(g.payload);
        break;
      case GoalKind::StrongAuth:
        os << g.authenticator << " authenticates " << g.peer << " on " << render_term(g.payload);
        break;
    }
    os << "  #" << g.id << "\n";
  }
  return os.str();
}

SourceSpec load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return {os.str(), path};
}

}  // namespace anbv
