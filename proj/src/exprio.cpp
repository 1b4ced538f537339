#include "qcmix/exprio.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace qcmix::exprio {

namespace {

enum class Tok { End, Int, Word, Plus, Minus, Star, Caret, Slash, LParen, RParen };

struct Lexer {
  std::string_view src;
  std::size_t pos = 0;

  Tok kind = Tok::End;
  std::size_t tok_pos = 0;
  std::string text;

  explicit Lexer(std::string_view s) : src(s) { next(); }

  void next() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
      ++pos;
    tok_pos = pos;
    text.clear();
    if (pos >= src.size()) { kind = Tok::End; return; }
    char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
        text += src[pos++];
      kind = Tok::Int;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (pos < src.size() && std::isalpha(static_cast<unsigned char>(src[pos])))
        text += src[pos++];
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
        text += src[pos++];
      kind = Tok::Word;
      return;
    }
    ++pos;
    switch (c) {
      case '+': kind = Tok::Plus; return;
      case '-': kind = Tok::Minus; return;
      case '*': kind = Tok::Star; return;
      case '^': kind = Tok::Caret; return;
      case '/': kind = Tok::Slash; return;
      case '(': kind = Tok::LParen; return;
      case ')': kind = Tok::RParen; return;
    }
    throw ParseError(tok_pos, std::string("unexpected character '") + c + "'");
  }
};

constexpr int kMaxExponent = 256;

struct Parser {
  Lexer lx;
  Dims dims;

  Parser(std::string_view s, Dims d) : lx(s), dims(d) {}

  using Obs = Observable<Scalar>;

  Obs constant(Scalar s) const { return Obs::constant(dims, std::move(s)); }

  Rat integer_value() const { return Rat(boost::multiprecision::cpp_int(lx.text)); }

  Obs run() {
    Obs v = expr();
    if (lx.kind != Tok::End)
      throw ParseError(lx.tok_pos, "expected operator or end of input");
    return v;
  }

  Obs expr() {
    Obs v = term();
    for (;;) {
      if (lx.kind == Tok::Plus) { lx.next(); v += term(); }
      else if (lx.kind == Tok::Minus) { lx.next(); v -= term(); }
      else return v;
    }
  }

  Obs term() {
    Obs v = factor();
    while (lx.kind == Tok::Star) {
      lx.next();
      v = v * factor();
    }
    return v;
  }

  Obs factor() {
    if (lx.kind == Tok::Minus) {
      lx.next();
      return -factor();
    }
    return power();
  }

  Obs power() {
    Obs base = primary();
    if (lx.kind != Tok::Caret) return base;
    lx.next();
    if (lx.kind == Tok::Minus)
      throw ParseError(lx.tok_pos, "negative exponent");
    if (lx.kind != Tok::Int)
      throw ParseError(lx.tok_pos, "expected nonnegative integer exponent");
    Rat e = integer_value();
    if (e > kMaxExponent)
      throw ParseError(lx.tok_pos, "exponent too large");
    lx.next();
    return pow(base, static_cast<int>(e.convert_to<long>()));
  }

  Obs primary() {
    switch (lx.kind) {
      case Tok::Int: {
        Rat num = integer_value();
        lx.next();
        if (lx.kind == Tok::Slash) {
          lx.next();
          if (lx.kind != Tok::Int)
            throw ParseError(lx.tok_pos, "expected integer denominator");
          Rat den = integer_value();
          if (den == 0)
            throw ParseError(lx.tok_pos, "zero denominator in rational literal");
          lx.next();
          return constant(Scalar::from_rational(num / den));
        }
        return constant(Scalar::from_rational(num));
      }
      case Tok::Word:
        return word();
      case Tok::LParen: {
        lx.next();
        Obs v = expr();
        if (lx.kind != Tok::RParen)
          throw ParseError(lx.tok_pos, "expected ')'");
        lx.next();
        return v;
      }
      default:
        throw ParseError(lx.tok_pos, "expected value");
    }
  }

  Obs word() {
    const std::string& w = lx.text;
    std::size_t at = lx.tok_pos;
    if (w == "i") { lx.next(); return constant(Scalar::unit_i()); }
    if (w == "hbar") { lx.next(); return constant(Scalar::hbar()); }
    if (w == "hbarc") { lx.next(); return constant(Scalar::hbarc()); }

    char letter = w[0];
    Var v;
    switch (letter) {
      case 'q': v = Var::Q; break;
      case 'p': v = Var::P; break;
      case 'x': v = Var::X; break;
      case 'k': v = Var::K; break;
      default:
        throw ParseError(at, "unknown symbol '" + w + "'");
    }
    std::size_t digits = 1;
    while (digits < w.size() && std::isdigit(static_cast<unsigned char>(w[digits])))
      ++digits;
    if (digits != w.size())
      throw ParseError(at, "unknown symbol '" + w + "'");

    int index = 1;
    if (w.size() > 1) {
      try {
        index = std::stoi(w.substr(1));
      } catch (const std::exception&) {
        throw ParseError(at, "variable index out of range");
      }
    }
    int bound = (v == Var::Q || v == Var::P) ? dims.nq : dims.nc;
    if (index < 1 || index > bound)
      throw ParseError(at, "variable index out of range for dimensions");
    lx.next();
    return Obs::variable(dims, v, index - 1);
  }
};

// --- formatting ---

struct Atom {
  bool negative = false;
  Rat magnitude;       // > 0
  bool imaginary = false;
  std::uint32_t hbar_pow = 0;
  std::uint32_t hbarc_pow = 0;
  const Monomial* mono = nullptr;  // null or empty means no variable part
};

void append_power(std::string& out, const char* name, std::uint32_t e) {
  if (e == 0) return;
  if (!out.empty()) out += "*";
  out += name;
  if (e > 1) { out += "^"; out += std::to_string(e); }
}

std::string atom_body(const Atom& a) {
  std::string out;
  bool has_other = a.imaginary || a.hbar_pow || a.hbarc_pow ||
                   (a.mono && !a.mono->is_cnumber());
  if (a.magnitude != 1 || !has_other) {
    Rat num = boost::multiprecision::numerator(a.magnitude);
    Rat den = boost::multiprecision::denominator(a.magnitude);
    if (den == 1) out += to_string(num);
    else out += "(" + to_string(num) + "/" + to_string(den) + ")";
  }
  if (a.imaginary) { if (!out.empty()) out += "*"; out += "i"; }
  append_power(out, "hbar", a.hbar_pow);
  append_power(out, "hbarc", a.hbarc_pow);
  if (a.mono && !a.mono->is_cnumber()) {
    if (!out.empty()) out += "*";
    out += a.mono->str();
  }
  return out;
}

void push_atoms(std::vector<Atom>& atoms, const Scalar& s, const Monomial* m) {
  for (const auto& [key, g] : s.terms) {
    auto push = [&](const Rat& v, bool imag) {
      if (v == 0) return;
      Atom a;
      a.negative = v < 0;
      a.magnitude = a.negative ? Rat(-v) : v;
      a.imaginary = imag;
      a.hbar_pow = key.first;
      a.hbarc_pow = key.second;
      a.mono = m;
      atoms.push_back(std::move(a));
    };
    push(g.re, false);
    push(g.im, true);
  }
}

std::string render(const std::vector<Atom>& atoms) {
  if (atoms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    if (i == 0) out += a.negative ? "-" : "";
    else out += a.negative ? " - " : " + ";
    out += atom_body(a);
  }
  return out;
}

}  // namespace

Observable<Scalar> parse(std::string_view src, Dims dims) {
  return Parser(src, dims).run();
}

std::string format(const Observable<Scalar>& A) {
  std::vector<const std::pair<const Monomial, Scalar>*> terms;
  terms.reserve(A.terms().size());
  for (const auto& t : A.terms()) terms.push_back(&t);
  std::stable_sort(terms.begin(), terms.end(), [](auto* a, auto* b) {
    int da = a->first.degree(), db = b->first.degree();
    if (da != db) return da > db;
    return a->first < b->first;
  });
  std::vector<Atom> atoms;
  for (auto* t : terms) push_atoms(atoms, t->second, &t->first);
  return render(atoms);
}

std::string format(const Observable<GaussRat>& A) {
  return format(to_scalar_ring(A));
}

std::string format_scalar(const Scalar& s) {
  std::vector<Atom> atoms;
  push_atoms(atoms, s, nullptr);
  return render(atoms);
}

}  // namespace qcmix::exprio
