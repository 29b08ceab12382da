#include "joinmatch/ast.hpp"

#include <algorithm>

namespace joinmatch {

PatternPtr Pattern::wildcard() {
  static PatternPtr w = std::make_shared<Pattern>();
  return w;
}

PatternPtr Pattern::var(Name n) {
  auto p = std::make_shared<Pattern>();
  p->kind = Kind::Var;
  p->name = std::move(n);
  return p;
}

PatternPtr Pattern::ctor(Name c, std::vector<PatternPtr> args) {
  auto p = std::make_shared<Pattern>();
  p->kind = Kind::Ctor;
  p->name = std::move(c);
  p->args = std::move(args);
  return p;
}

PatternPtr Pattern::integer(long long v) {
  auto p = std::make_shared<Pattern>();
  p->kind = Kind::Int;
  p->int_value = v;
  return p;
}

ValuePtr Value::make_ctor(Name c, std::vector<ValuePtr> args) {
  auto v = std::make_shared<Value>();
  v->kind = Kind::Ctor;
  v->ctor = std::move(c);
  v->args = std::move(args);
  return v;
}

ValuePtr Value::integer(long long n) {
  auto v = std::make_shared<Value>();
  v->kind = Kind::Int;
  v->int_value = n;
  return v;
}

ValuePtr Value::channel(ChannelId id, Name display) {
  auto v = std::make_shared<Value>();
  v->kind = Kind::Chan;
  v->chan = id;
  v->chan_name = std::move(display);
  return v;
}

bool value_equal(const ValuePtr& a, const ValuePtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Value::Kind::Int:
      return a->int_value == b->int_value;
    case Value::Kind::Chan:
      return a->chan == b->chan;
    case Value::Kind::Ctor: {
      if (a->ctor != b->ctor || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!value_equal(a->args[i], b->args[i])) return false;
      return true;
    }
  }
  return false;
}

ExprPtr Expression::var(Name n, Loc loc) {
  auto e = std::make_shared<Expression>();
  e->kind = Kind::Var;
  e->name = std::move(n);
  e->loc = loc;
  return e;
}

ExprPtr Expression::ctor(Name c, std::vector<ExprPtr> args, Loc loc) {
  auto e = std::make_shared<Expression>();
  e->kind = Kind::Ctor;
  e->name = std::move(c);
  e->args = std::move(args);
  e->loc = loc;
  return e;
}

ExprPtr Expression::integer(long long v, Loc loc) {
  auto e = std::make_shared<Expression>();
  e->kind = Kind::Int;
  e->int_value = v;
  e->loc = loc;
  return e;
}

ExprPtr Expression::channel(ChannelId id, Name display) {
  auto e = std::make_shared<Expression>();
  e->kind = Kind::Chan;
  e->chan = id;
  e->chan_name = std::move(display);
  return e;
}

ExprPtr value_to_expr(const ValuePtr& v) {
  switch (v->kind) {
    case Value::Kind::Int:
      return Expression::integer(v->int_value);
    case Value::Kind::Chan:
      return Expression::channel(v->chan, v->chan_name);
    case Value::Kind::Ctor: {
      std::vector<ExprPtr> args;
      args.reserve(v->args.size());
      for (const auto& a : v->args) args.push_back(value_to_expr(a));
      return Expression::ctor(v->ctor, std::move(args));
    }
  }
  return nullptr;
}

ProcessPtr Process::null() { return std::make_shared<Process>(); }

ProcessPtr Process::send(Name chan, ExprPtr arg, Loc loc) {
  auto p = std::make_shared<Process>();
  p->kind = Kind::Send;
  p->chan_name = std::move(chan);
  p->arg = std::move(arg);
  p->loc = loc;
  return p;
}

ProcessPtr Process::send_to(ChannelId chan, Name display, ExprPtr arg) {
  auto p = std::make_shared<Process>();
  p->kind = Kind::Send;
  p->chan = chan;
  p->chan_name = std::move(display);
  p->arg = std::move(arg);
  return p;
}

ProcessPtr Process::par(ProcessPtr l, ProcessPtr r) {
  auto p = std::make_shared<Process>();
  p->kind = Kind::Par;
  p->left = std::move(l);
  p->right = std::move(r);
  return p;
}

ProcessPtr Process::def(DefinitionPtr d, ProcessPtr body, Loc loc) {
  auto p = std::make_shared<Process>();
  p->kind = Kind::Def;
  p->definition = std::move(d);
  p->body = std::move(body);
  p->loc = loc;
  return p;
}

ProcessPtr Process::match(ExprPtr subject, std::vector<MatchClause> clauses, Loc loc) {
  auto p = std::make_shared<Process>();
  p->kind = Kind::Match;
  p->subject = std::move(subject);
  p->clauses = std::move(clauses);
  p->loc = loc;
  return p;
}

// ---------------------------------------------------------------------------
// Binders.

namespace {

void rv_into(const PatternPtr& p, std::set<Name>& out) {
  switch (p->kind) {
    case Pattern::Kind::Wildcard:
    case Pattern::Kind::Int:
      return;
    case Pattern::Kind::Var:
      if (!out.insert(p->name).second)
        throw NonLinearError("duplicate variable '" + p->name + "' in pattern");
      return;
    case Pattern::Kind::Ctor:
      for (const auto& a : p->args) rv_into(a, out);
      return;
  }
}

}  // namespace

std::set<Name> received_vars(const PatternPtr& p) {
  std::set<Name> out;
  rv_into(p, out);
  return out;
}

std::set<Name> received_vars(const JoinPattern& j) {
  std::set<Name> out;
  for (const auto& conj : j.conjuncts) {
    // All alternatives of one conjunct must bind the same variables so the
    // guarded process is well-scoped under every expansion.
    std::set<Name> first;
    for (size_t a = 0; a < conj.alts.size(); ++a) {
      std::set<Name> cur;
      for (const auto& m : conj.alts[a]) rv_into(m.arg, cur);
      if (a == 0)
        first = cur;
      else if (cur != first)
        throw NonLinearError("'or' alternatives bind different variables");
    }
    for (const auto& n : first)
      if (!out.insert(n).second)
        throw NonLinearError("duplicate variable '" + n + "' across join pattern");
  }
  return out;
}

std::set<Name> defined_channels(const JoinPattern& j) {
  std::set<Name> out;
  for (const auto& conj : j.conjuncts) {
    std::set<Name> conj_set;
    for (const auto& alt : conj.alts) {
      std::set<Name> alt_set;
      for (const auto& m : alt) {
        if (!alt_set.insert(m.channel).second)
          throw NonLinearError("channel '" + m.channel +
                               "' defined twice in join pattern");
        conj_set.insert(m.channel);
      }
    }
    for (const auto& n : conj_set)
      if (!out.insert(n).second)
        throw NonLinearError("channel '" + n + "' defined twice in join pattern");
  }
  return out;
}

std::set<Name> defined_channels(const Definition& d) {
  std::set<Name> out;
  for (const auto& r : d.rules) {
    auto dv = defined_channels(r.pattern);
    out.insert(dv.begin(), dv.end());
  }
  return out;
}

std::set<Name> free_vars(const ExprPtr& e) {
  std::set<Name> out;
  switch (e->kind) {
    case Expression::Kind::Var:
      out.insert(e->name);
      break;
    case Expression::Kind::Int:
    case Expression::Kind::Chan:
      break;
    case Expression::Kind::Ctor:
      for (const auto& a : e->args) {
        auto s = free_vars(a);
        out.insert(s.begin(), s.end());
      }
      break;
  }
  return out;
}

std::set<Name> free_vars(const ProcessPtr& p) {
  std::set<Name> out;
  switch (p->kind) {
    case Process::Kind::Null:
      break;
    case Process::Kind::Send: {
      if (!p->chan.valid()) out.insert(p->chan_name);
      auto s = free_vars(p->arg);
      out.insert(s.begin(), s.end());
      break;
    }
    case Process::Kind::Par: {
      out = free_vars(p->left);
      auto s = free_vars(p->right);
      out.insert(s.begin(), s.end());
      break;
    }
    case Process::Kind::Def: {
      out = free_vars(*p->definition);
      auto s = free_vars(p->body);
      out.insert(s.begin(), s.end());
      for (const auto& x : defined_channels(*p->definition)) out.erase(x);
      break;
    }
    case Process::Kind::Match: {
      out = free_vars(p->subject);
      for (const auto& c : p->clauses) {
        auto body = free_vars(c.body);
        for (const auto& v : received_vars(c.pattern)) body.erase(v);
        out.insert(body.begin(), body.end());
      }
      break;
    }
  }
  return out;
}

std::set<Name> free_vars(const Definition& d) {
  std::set<Name> out;
  for (const auto& r : d.rules) {
    auto dv = defined_channels(r.pattern);
    out.insert(dv.begin(), dv.end());
    auto body = free_vars(r.body);
    for (const auto& v : received_vars(r.pattern)) body.erase(v);
    out.insert(body.begin(), body.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Substitution. Range values are closed and channel identities are opaque, so
// no capture is possible; binders simply shadow.

namespace {

Substitution minus(const Substitution& s, const std::set<Name>& bound) {
  Substitution out;
  for (const auto& [k, v] : s)
    if (!bound.count(k)) out.emplace(k, v);
  return out;
}

}  // namespace

ExprPtr substitute(const ExprPtr& e, const Substitution& s) {
  if (s.empty()) return e;
  switch (e->kind) {
    case Expression::Kind::Var: {
      auto it = s.find(e->name);
      return it == s.end() ? e : value_to_expr(it->second);
    }
    case Expression::Kind::Int:
    case Expression::Kind::Chan:
      return e;
    case Expression::Kind::Ctor: {
      std::vector<ExprPtr> args;
      args.reserve(e->args.size());
      for (const auto& a : e->args) args.push_back(substitute(a, s));
      return Expression::ctor(e->name, std::move(args), e->loc);
    }
  }
  return e;
}

ProcessPtr substitute(const ProcessPtr& p, const Substitution& s) {
  if (s.empty()) return p;
  switch (p->kind) {
    case Process::Kind::Null:
      return p;
    case Process::Kind::Send: {
      ExprPtr arg = substitute(p->arg, s);
      if (!p->chan.valid()) {
        auto it = s.find(p->chan_name);
        if (it != s.end()) {
          const ValuePtr& v = it->second;
          if (v->kind != Value::Kind::Chan)
            throw TypeMismatchError("send target '" + p->chan_name +
                                    "' substituted by a non-channel value");
          return Process::send_to(v->chan, v->chan_name, std::move(arg));
        }
      }
      auto out = Process::send(p->chan_name, std::move(arg), p->loc);
      out->chan = p->chan;
      return out;
    }
    case Process::Kind::Par:
      return Process::par(substitute(p->left, s), substitute(p->right, s));
    case Process::Kind::Def: {
      auto dv = defined_channels(*p->definition);
      Substitution inner = minus(s, dv);
      auto d = substitute_def(*p->definition, inner);
      return Process::def(std::move(d), substitute(p->body, inner), p->loc);
    }
    case Process::Kind::Match: {
      auto out = Process::match(substitute(p->subject, s), {}, p->loc);
      out->no_test = p->no_test;
      out->dispatcher_channel = p->dispatcher_channel;
      out->subject_type = p->subject_type;
      for (const auto& c : p->clauses) {
        Substitution inner = minus(s, received_vars(c.pattern));
        out->clauses.push_back({c.pattern, substitute(c.body, inner), c.drop});
      }
      return out;
    }
  }
  return p;
}

DefinitionPtr substitute_def(const Definition& d, const Substitution& s) {
  auto out = std::make_shared<Definition>();
  out->channel_types = d.channel_types;
  out->dispatchers = d.dispatchers;
  out->loc = d.loc;
  for (const auto& r : d.rules) {
    Substitution inner = minus(s, received_vars(r.pattern));
    out->rules.push_back({r.pattern, substitute(r.body, inner), r.loc});
  }
  return out;
}

Name fresh_name(const Name& base, const std::set<Name>& used) {
  if (!used.count(base)) return base;
  for (int k = 1;; ++k) {
    Name candidate = base + "'" + std::to_string(k);
    if (!used.count(candidate)) return candidate;
  }
}

// ---------------------------------------------------------------------------
// Name collection.

namespace {

void names_of_pattern(const PatternPtr& p, std::set<Name>& out) {
  switch (p->kind) {
    case Pattern::Kind::Var:
      out.insert(p->name);
      break;
    case Pattern::Kind::Ctor:
      for (const auto& a : p->args) names_of_pattern(a, out);
      break;
    default:
      break;
  }
}

void names_of_expr(const ExprPtr& e, std::set<Name>& out) {
  if (e->kind == Expression::Kind::Var) out.insert(e->name);
  for (const auto& a : e->args) names_of_expr(a, out);
}

void names_of_process(const ProcessPtr& p, std::set<Name>& out);

void names_of_def(const Definition& d, std::set<Name>& out) {
  for (const auto& r : d.rules) {
    for (const auto& conj : r.pattern.conjuncts)
      for (const auto& alt : conj.alts)
        for (const auto& m : alt) {
          out.insert(m.channel);
          names_of_pattern(m.arg, out);
        }
    names_of_process(r.body, out);
  }
}

void names_of_process(const ProcessPtr& p, std::set<Name>& out) {
  switch (p->kind) {
    case Process::Kind::Null:
      break;
    case Process::Kind::Send:
      out.insert(p->chan_name);
      names_of_expr(p->arg, out);
      break;
    case Process::Kind::Par:
      names_of_process(p->left, out);
      names_of_process(p->right, out);
      break;
    case Process::Kind::Def:
      names_of_def(*p->definition, out);
      names_of_process(p->body, out);
      break;
    case Process::Kind::Match:
      names_of_expr(p->subject, out);
      for (const auto& c : p->clauses) {
        names_of_pattern(c.pattern, out);
        names_of_process(c.body, out);
      }
      break;
  }
}

}  // namespace

std::set<Name> collect_names(const ProcessPtr& p) {
  std::set<Name> out;
  names_of_process(p, out);
  return out;
}

std::set<Name> collect_names(const Definition& d) {
  std::set<Name> out;
  names_of_def(d, out);
  return out;
}

// ---------------------------------------------------------------------------
// Printing.

namespace {

std::string print_args(const std::vector<std::string>& parts) {
  std::string s = "(";
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) s += ", ";
    s += parts[i];
  }
  return s + ")";
}

}  // namespace

std::string to_string(const PatternPtr& p) {
  switch (p->kind) {
    case Pattern::Kind::Wildcard:
      return "_";
    case Pattern::Kind::Var:
      return p->name;
    case Pattern::Kind::Int:
      return std::to_string(p->int_value);
    case Pattern::Kind::Ctor: {
      std::vector<std::string> parts;
      parts.reserve(p->args.size());
      for (const auto& a : p->args) parts.push_back(to_string(a));
      if (is_tuple_ctor(p->name)) return print_args(parts);
      if (parts.empty()) return p->name;
      return p->name + print_args(parts);
    }
  }
  return "?";
}

std::string to_string(const ValuePtr& v, const std::map<int, int>* renumber) {
  switch (v->kind) {
    case Value::Kind::Int:
      return std::to_string(v->int_value);
    case Value::Kind::Chan: {
      int id = v->chan.raw;
      if (renumber) {
        auto it = renumber->find(id);
        if (it != renumber->end()) id = it->second;
      }
      return "#" + std::to_string(id);
    }
    case Value::Kind::Ctor: {
      std::vector<std::string> parts;
      parts.reserve(v->args.size());
      for (const auto& a : v->args) parts.push_back(to_string(a, renumber));
      if (is_tuple_ctor(v->ctor)) return print_args(parts);
      if (parts.empty()) return v->ctor;
      return v->ctor + print_args(parts);
    }
  }
  return "?";
}

std::string to_string(const ExprPtr& e, const std::map<int, int>* renumber) {
  switch (e->kind) {
    case Expression::Kind::Var:
      return e->name;
    case Expression::Kind::Int:
      return std::to_string(e->int_value);
    case Expression::Kind::Chan: {
      int id = e->chan.raw;
      if (renumber) {
        auto it = renumber->find(id);
        if (it != renumber->end()) id = it->second;
      }
      return "#" + std::to_string(id);
    }
    case Expression::Kind::Ctor: {
      std::vector<std::string> parts;
      parts.reserve(e->args.size());
      for (const auto& a : e->args) parts.push_back(to_string(a, renumber));
      if (is_tuple_ctor(e->name)) return print_args(parts);
      if (parts.empty()) return e->name;
      return e->name + print_args(parts);
    }
  }
  return "?";
}

std::string to_string(const JoinPattern& j) {
  std::string s;
  for (size_t c = 0; c < j.conjuncts.size(); ++c) {
    if (c) s += " & ";
    const auto& conj = j.conjuncts[c];
    auto print_alt = [](const JoinAlternative& alt) {
      std::string a;
      for (size_t i = 0; i < alt.size(); ++i) {
        if (i) a += " & ";
        a += alt[i].channel + "(";
        if (!(alt[i].arg->kind == Pattern::Kind::Ctor &&
              is_tuple_ctor(alt[i].arg->name) && alt[i].arg->args.empty()))
          a += to_string(alt[i].arg);
        a += ")";
      }
      return a;
    };
    if (conj.plain()) {
      s += print_alt(conj.alts[0]);
    } else {
      s += "(";
      for (size_t a = 0; a < conj.alts.size(); ++a) {
        if (a) s += " or ";
        s += print_alt(conj.alts[a]);
      }
      s += ")";
    }
  }
  return s;
}

namespace {

struct PrintCtx {
  const std::map<int, int>* renumber = nullptr;
};

void print_process_into(const ProcessPtr& p, std::string& out, int indent,
                        const PrintCtx& ctx);

std::string ind(int n) { return std::string(static_cast<size_t>(n) * 2, ' '); }

void print_def_into(const Definition& d, std::string& out, int indent,
                    const PrintCtx& ctx) {
  for (size_t i = 0; i < d.rules.size(); ++i) {
    out += ind(indent);
    out += i == 0 ? "def " : " or ";
    out += to_string(d.rules[i].pattern);
    out += " |> ";
    print_process_into(d.rules[i].body, out, indent + 1, ctx);
    out += "\n";
  }
}

void print_process_into(const ProcessPtr& p, std::string& out, int indent,
                        const PrintCtx& ctx) {
  switch (p->kind) {
    case Process::Kind::Null:
      out += "0";
      break;
    case Process::Kind::Send: {
      if (p->chan.valid()) {
        int id = p->chan.raw;
        if (ctx.renumber) {
          auto it = ctx.renumber->find(id);
          if (it != ctx.renumber->end()) id = it->second;
        }
        out += "#" + std::to_string(id);
      } else {
        out += p->chan_name;
      }
      out += "(";
      if (!(p->arg->kind == Expression::Kind::Ctor && is_tuple_ctor(p->arg->name) &&
            p->arg->args.empty()))
        out += to_string(p->arg, ctx.renumber);
      out += ")";
      break;
    }
    case Process::Kind::Par: {
      // Def/Match arms are parenthesized so a following `&` or `|` cannot be
      // captured by the nested construct on reparse.
      auto arm = [&](const ProcessPtr& q) {
        bool parens = q->kind == Process::Kind::Def || q->kind == Process::Kind::Match;
        if (parens) out += "(";
        print_process_into(q, out, indent, ctx);
        if (parens) out += ")";
      };
      arm(p->left);
      out += " & ";
      arm(p->right);
      break;
    }
    case Process::Kind::Def: {
      out += "\n";
      print_def_into(*p->definition, out, indent, ctx);
      out += ind(indent) + "in ";
      print_process_into(p->body, out, indent, ctx);
      break;
    }
    case Process::Kind::Match: {
      out += "match " + to_string(p->subject, ctx.renumber) + " with";
      for (size_t i = 0; i < p->clauses.size(); ++i) {
        const auto& c = p->clauses[i];
        out += " | " + to_string(c.pattern) + " -> ";
        bool parens = i + 1 < p->clauses.size() &&
                      (c.body->kind == Process::Kind::Def ||
                       c.body->kind == Process::Kind::Match);
        if (parens) out += "(";
        print_process_into(c.body, out, indent, ctx);
        if (parens) out += ")";
      }
      break;
    }
  }
}

}  // namespace

std::string print_process(const ProcessPtr& p, const std::map<int, int>* renumber) {
  std::string out;
  print_process_into(p, out, 0, PrintCtx{renumber});
  return out;
}

std::string print_definition(const Definition& d) {
  std::string out;
  print_def_into(d, out, 0, PrintCtx{});
  return out;
}

std::string print_program(const Program& p) {
  std::string out;
  for (const auto& d : p.decls) {
    out += "type " + d.name + " = ";
    for (size_t i = 0; i < d.ctors.size(); ++i) {
      if (i) out += " | ";
      out += d.ctors[i].name;
      if (!d.ctors[i].arg_types.empty()) {
        out += "(";
        for (size_t k = 0; k < d.ctors[i].arg_types.size(); ++k) {
          if (k) out += ", ";
          out += to_string(d.ctors[i].arg_types[k]);
        }
        out += ")";
      }
    }
    out += "\n";
  }
  out += print_process(p.main);
  out += "\n";
  return out;
}

bool pattern_equal(const PatternPtr& a, const PatternPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Pattern::Kind::Wildcard:
      return true;
    case Pattern::Kind::Var:
      return a->name == b->name;
    case Pattern::Kind::Int:
      return a->int_value == b->int_value;
    case Pattern::Kind::Ctor: {
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!pattern_equal(a->args[i], b->args[i])) return false;
      return true;
    }
  }
  return false;
}

int pattern_depth(const PatternPtr& p) {
  switch (p->kind) {
    case Pattern::Kind::Wildcard:
    case Pattern::Kind::Var:
    case Pattern::Kind::Int:
      return 0;
    case Pattern::Kind::Ctor: {
      int best = 0;
      for (const auto& a : p->args) best = std::max(best, pattern_depth(a));
      return 1 + best;
    }
  }
  return 0;
}

int constructor_count(const PatternPtr& p) {
  switch (p->kind) {
    case Pattern::Kind::Wildcard:
    case Pattern::Kind::Var:
      return 0;
    case Pattern::Kind::Int:
      return 1;
    case Pattern::Kind::Ctor: {
      int n = 1;
      for (const auto& a : p->args) n += constructor_count(a);
      return n;
    }
  }
  return 0;
}

}  // namespace joinmatch
