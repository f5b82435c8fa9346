#include "super2vec/workspace.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

#include "json.hpp"

namespace super2vec {

using json = nlohmann::ordered_json;

std::string InputError::where() const {
  std::string out;
  if (line_ > 0) out = "line " + std::to_string(line_) + ", column " + std::to_string(column_);
  if (!pointer_.empty()) out += (out.empty() ? "" : " ") + std::string("(") + pointer_ + ")";
  return out;
}

namespace {

std::string escape_token(const std::string& k) {
  std::string out;
  for (char c : k) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out.push_back(c);
  }
  return out;
}

// Offsets of every value of a well-formed JSON text, keyed by JSON pointer.
class Locator {
 public:
  explicit Locator(const std::string& s) : s_(s) { value(""); }
  const std::map<std::string, size_t>& offsets() const { return out_; }

 private:
  void ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  std::string token() {
    std::string r;
    ++i_;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\' && i_ + 1 < s_.size()) {
        const char c = s_[i_ + 1];
        r.push_back(c == 'n' ? '\n' : c == 't' ? '\t' : c);
        i_ += c == 'u' ? 6 : 2;
      } else {
        r.push_back(s_[i_++]);
      }
    }
    ++i_;
    return r;
  }
  void value(const std::string& ptr) {
    ws();
    out_.emplace(ptr, i_);
    if (i_ >= s_.size()) return;
    const char open = s_[i_];
    if (open == '{' || open == '[') {
      const char close = open == '{' ? '}' : ']';
      ++i_;
      ws();
      if (i_ < s_.size() && s_[i_] == close) {
        ++i_;
        return;
      }
      for (int k = 0; i_ < s_.size(); ++k) {
        ws();
        std::string child = ptr + "/" + std::to_string(k);
        if (open == '{') {
          child = ptr + "/" + escape_token(token());
          ws();
          ++i_;  // ':'
        }
        value(child);
        ws();
        if (i_ < s_.size() && s_[i_] == ',') {
          ++i_;
          continue;
        }
        ++i_;
        return;
      }
    } else if (open == '"') {
      token();
    } else {
      while (i_ < s_.size() && std::string(",]} \t\r\n").find(s_[i_]) == std::string::npos) ++i_;
    }
  }

  const std::string& s_;
  size_t i_ = 0;
  std::map<std::string, size_t> out_;
};

std::pair<int, int> line_column(const std::string& text, size_t offset) {
  int line = 1, col = 1;
  for (size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    auto p = msg.find("parse error");
    throw InputError("malformed document: " + (p == std::string::npos ? msg : msg.substr(p)), "", line, col);
  }
}

// Indented layout that keeps short arrays and objects on one line.
void layout(const json& j, int indent, std::string& out) {
  const std::string flat = j.dump();
  if (!j.is_structured() || j.empty() || (flat.size() + indent <= 100 && (j.is_array() || flat.size() <= 60))) {
    out += flat;
    return;
  }
  const std::string pad(indent + 2, ' ');
  const bool object = j.is_object();
  out += object ? "{\n" : "[\n";
  size_t k = 0;
  for (auto it = j.begin(); it != j.end(); ++it, ++k) {
    out += pad;
    if (object) out += json(it.key()).dump() + ": ";
    layout(*it, indent + 2, out);
    out += k + 1 < j.size() ? ",\n" : "\n";
  }
  out += std::string(indent, ' ') + (object ? "}" : "]");
}

std::string pretty(const json& j) {
  std::string out;
  layout(j, 0, out);
  return out;
}

const char* const kSections[] = {"algebras", "nerves",  "cochains",   "bimodules",       "cocycles",
                                 "bundles",  "maps",    "morphisms",  "extensions",      "implementations",
                                 "group_cocycles", "butterflies"};

template <class T>
json scalar_json(const T& x) {
  if constexpr (std::is_same_v<T, Rational>)
    return x.to_string();
  else
    return json::array({x.re().to_string(), x.im().to_string()});
}

template <class T>
json vec_json(const Vec<T>& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(scalar_json(v(i)));
  return out;
}

template <class T>
json mat_json(const Mat<T>& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(scalar_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

json cochain_values_json(const AbelianCochain& c) {
  json out = json::array();
  for (long v : c.values) out.push_back(v);
  return out;
}

template <class T>
json unit_values_json(const UnitCochain<T>& c) {
  json out = json::array();
  for (const auto& v : c.values) out.push_back(scalar_json(v));
  return out;
}

// ---------------------------------------------------------------------------
// Reading

struct MissingPair {
  int i, j;
};

template <class T>
class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text), doc_(parse_json(text)) {}

  Workspace<T> read() {
    if (!doc_.is_object()) fail("", "document must be an object");
    for (const auto& [key, value] : doc_.items()) {
      if (key == "field") {
        if (!value.is_string() || value.template get<std::string>() != Field<T>::tag)
          fail("/field", "field must be \"Q\" or \"Q(i)\"");
        continue;
      }
      if (std::find(std::begin(kSections), std::end(kSections), key) == std::end(kSections))
        fail("/" + escape_token(key), "unknown section '" + key + "'");
      if (!value.is_object()) fail("/" + escape_token(key), "section must be an object");
    }
    for (const char* section : kSections) {
      if (!doc_.contains(section)) continue;
      for (const auto& item : doc_[section].items()) resolve_named(section, item.key(), "/" + std::string(section));
    }
    return std::move(w_);
  }

 private:
  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) {
    if (!locator_) locator_ = std::make_unique<Locator>(text_);
    int line = 0, col = 0;
    std::string p = ptr;
    // Fall back to the closest enclosing value that exists in the text.
    for (;;) {
      auto it = locator_->offsets().find(p);
      if (it != locator_->offsets().end()) {
        std::tie(line, col) = line_column(text_, it->second);
        break;
      }
      if (p.empty()) break;
      p = p.substr(0, p.rfind('/'));
    }
    throw InputError(msg, ptr, line, col);
  }

  static std::string at(const std::string& ptr, const std::string& key) { return ptr + "/" + escape_token(key); }
  static std::string at(const std::string& ptr, size_t k) { return ptr + "/" + std::to_string(k); }

  void keys(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(ptr, "expected an object");
    for (const auto& item : j.items())
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return item.key() == a; }))
        fail(at(ptr, item.key()), "unknown key '" + item.key() + "'");
  }
  const json& need(const json& j, const std::string& ptr, const char* key) {
    if (!j.is_object()) fail(ptr, "expected an object");
    if (!j.contains(key)) fail(ptr, std::string("missing key '") + key + "'");
    return j[key];
  }
  const json& array(const json& j, const std::string& ptr, long size = -1) {
    if (!j.is_array()) fail(ptr, "expected an array");
    if (size >= 0 && static_cast<long>(j.size()) != size)
      fail(ptr, "expected " + std::to_string(size) + " entries, found " + std::to_string(j.size()));
    return j;
  }
  long integer(const json& j, const std::string& ptr, long lo = std::numeric_limits<long>::min(),
               long hi = std::numeric_limits<long>::max()) {
    if (!j.is_number_integer()) fail(ptr, "expected an integer");
    const long v = j.get<long>();
    if (v < lo || v > hi) fail(ptr, "integer " + std::to_string(v) + " out of range");
    return v;
  }
  std::string string(const json& j, const std::string& ptr) {
    if (!j.is_string()) fail(ptr, "expected a string");
    return j.get<std::string>();
  }
  Rational rational(const json& j, const std::string& ptr) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (!j.is_string()) fail(ptr, "expected a rational \"p/q\"");
    try {
      return Rational::parse(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(ptr, e.what());
    }
  }
  T scalar(const json& j, const std::string& ptr) {
    if constexpr (std::is_same_v<T, Gaussian>) {
      if (j.is_array()) {
        array(j, ptr, 2);
        return Gaussian(rational(j[0], at(ptr, 0)), rational(j[1], at(ptr, 1)));
      }
    }
    return T(rational(j, ptr));
  }
  Vec<T> vec(const json& j, const std::string& ptr, long size) {
    array(j, ptr, size);
    Vec<T> v(static_cast<Index>(j.size()));
    for (size_t k = 0; k < j.size(); ++k) v(static_cast<Index>(k)) = scalar(j[k], at(ptr, k));
    return v;
  }
  Mat<T> mat(const json& j, const std::string& ptr, long rows, long cols) {
    array(j, ptr, rows);
    Mat<T> m(rows, cols);
    for (long r = 0; r < rows; ++r) m.row(r) = vec(j[r], at(ptr, r), cols).transpose();
    return m;
  }
  std::vector<int> ints(const json& j, const std::string& ptr, long size = -1, long lo = 0,
                        long hi = std::numeric_limits<int>::max()) {
    array(j, ptr, size);
    std::vector<int> out;
    for (size_t k = 0; k < j.size(); ++k) out.push_back(static_cast<int>(integer(j[k], at(ptr, k), lo, hi)));
    return out;
  }

  // Resolution of named objects, with cycle detection.
  template <class V, class Build>
  V& named(std::map<std::string, V>& done, const char* section, const std::string& name, const std::string& from,
           Build build) {
    if (auto it = done.find(name); it != done.end()) return it->second;
    std::string kind = section;
    kind.pop_back();
    if (!doc_.contains(section) || !doc_[section].contains(name)) fail(from, "unknown " + kind + " '" + name + "'");
    const std::string key = std::string(section) + "/" + name;
    if (resolving_.count(key)) fail(from, "circular reference to " + kind + " '" + name + "'");
    resolving_.insert(key);
    V value = build(doc_[section][name], "/" + std::string(section) + "/" + escape_token(name));
    resolving_.erase(key);
    return done.emplace(name, std::move(value)).first->second;
  }

  void resolve_named(const std::string& section, const std::string& name, const std::string& from) {
    if (section == "algebras") algebra(json(name), from);
    if (section == "nerves") nerve(json(name), from);
    if (section == "cochains") cochain(json(name), from);
    if (section == "bimodules") bimodule(json(name), from);
    if (section == "cocycles") cocycle(json(name), from);
    if (section == "bundles") bundle(json(name), from);
    if (section == "maps") map(json(name), from);
    if (section == "morphisms") morphism(json(name), from);
    if (section == "extensions") extension(json(name), from);
    if (section == "implementations") implementation(json(name), from);
    if (section == "group_cocycles") group_cocycle(json(name), from);
    if (section == "butterflies") named(w_.butterflies, "butterflies", name, from, [&](auto& j, auto p) {
        return build_butterfly(j, p);
      });
  }

  // Wraps library exceptions raised while building the object at ptr.
  template <class F>
  auto guarded(const std::string& ptr, F f) {
    try {
      return f();
    } catch (const InputError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      fail(ptr, e.what());
    } catch (const std::runtime_error& e) {
      fail(ptr, e.what());
    }
  }

  // -- algebras
  AlgebraPtr<T> algebra(const json& j, const std::string& ptr) {
    if (j.is_string())
      return named(w_.algebras, "algebras", j.get<std::string>(), ptr,
                   [&](const json& d, const std::string& p) { return build_algebra(d, p); });
    return build_algebra(j, ptr);
  }
  AlgebraPtr<T> build_algebra(const json& j, const std::string& ptr) {
    keys(j, ptr, {"builtin", "p", "q", "parity", "even", "odd", "tensor", "opposite", "product", "labels", "unit",
                  "table"});
    if (j.contains("builtin")) {
      const auto b = string(j["builtin"], at(ptr, "builtin"));
      if (b == "ground_field") return ground_field<T>();
      if (b == "split_pair") return split_pair<T>();
      if (b == "clifford")
        return clifford<T>(integer(need(j, ptr, "p"), at(ptr, "p"), 0, 6), integer(need(j, ptr, "q"), at(ptr, "q"), 0, 6));
      if (b == "dual_numbers") return dual_numbers<T>(integer(need(j, ptr, "parity"), at(ptr, "parity"), 0, 1));
      if (b == "endomorphism")
        return endomorphism_algebra<T>(integer(need(j, ptr, "even"), at(ptr, "even"), 0, 8),
                                       integer(need(j, ptr, "odd"), at(ptr, "odd"), 0, 8));
      fail(at(ptr, "builtin"), "unknown builtin algebra '" + b + "'");
    }
    if (j.contains("tensor") || j.contains("product")) {
      const char* key = j.contains("tensor") ? "tensor" : "product";
      const auto& pair = array(j[key], at(ptr, key), 2);
      auto a = algebra(pair[0], at(at(ptr, key), 0)), b = algebra(pair[1], at(at(ptr, key), 1));
      return guarded(ptr, [&] { return j.contains("tensor") ? graded_tensor(a, b) : direct_product(a, b); });
    }
    if (j.contains("opposite")) return graded_opposite(algebra(j["opposite"], at(ptr, "opposite")));
    const int even = static_cast<int>(integer(need(j, ptr, "even"), at(ptr, "even"), 0, kMoritaDimCap));
    const int odd = static_cast<int>(integer(need(j, ptr, "odd"), at(ptr, "odd"), 0, kMoritaDimCap));
    const int dim = even + odd;
    std::vector<std::string> labels;
    if (j.contains("labels")) {
      const auto& l = array(j["labels"], at(ptr, "labels"), dim);
      for (size_t k = 0; k < l.size(); ++k) labels.push_back(string(l[k], at(at(ptr, "labels"), k)));
    }
    Vec<T> unit = vec(need(j, ptr, "unit"), at(ptr, "unit"), dim);
    std::vector<std::vector<std::map<Index, T>>> acc(dim, std::vector<std::map<Index, T>>(dim));
    const auto tp = at(ptr, "table");
    const auto& table = array(need(j, ptr, "table"), tp);
    for (size_t r = 0; r < table.size(); ++r) {
      const auto ep = at(tp, r);
      const auto& e = array(table[r], ep, 4);
      const int x = static_cast<int>(integer(e[0], at(ep, 0), 0, dim - 1));
      const int y = static_cast<int>(integer(e[1], at(ep, 1), 0, dim - 1));
      const int z = static_cast<int>(integer(e[2], at(ep, 2), 0, dim - 1));
      acc[x][y][z] += scalar(e[3], at(ep, 3));
    }
    typename SuperAlgebra<T>::Table rows(dim, std::vector<SparseRow<T>>(dim));
    for (int x = 0; x < dim; ++x)
      for (int y = 0; y < dim; ++y)
        for (const auto& [z, c] : acc[x][y])
          if (!is_zero(c)) rows[x][y].emplace_back(z, c);
    return guarded(ptr, [&] {
      SuperVectorSpace s = labels.empty() ? SuperVectorSpace(even, odd) : SuperVectorSpace(even, odd, labels);
      return make_algebra<T>(s, rows, unit);
    });
  }

  // -- nerves
  NervePtr nerve(const json& j, const std::string& ptr) {
    if (j.is_string()) {
      const auto name = j.get<std::string>();
      if ((!doc_.contains("nerves") || !doc_["nerves"].contains(name)) && !w_.nerves.count(name)) {
        try {
          return nerves::by_name(name);
        } catch (const std::invalid_argument&) {
          fail(ptr, "unknown nerve '" + name + "'");
        }
      }
      return named(w_.nerves, "nerves", name, ptr, [&](const json& d, const std::string& p) { return build_nerve(d, p); });
    }
    return build_nerve(j, ptr);
  }
  NervePtr build_nerve(const json& j, const std::string& ptr) {
    keys(j, ptr, {"builtin", "simplices", "name"});
    if (j.contains("builtin")) {
      const auto b = string(j["builtin"], at(ptr, "builtin"));
      return guarded(at(ptr, "builtin"), [&] { return nerves::by_name(b); });
    }
    const auto sp = at(ptr, "simplices");
    const auto& list = array(need(j, ptr, "simplices"), sp);
    std::vector<Simplex> simplices;
    for (size_t k = 0; k < list.size(); ++k) {
      const auto s = ints(list[k], at(sp, k), -1, 0);
      if (s.empty()) fail(at(sp, k), "empty simplex");
      if (static_cast<int>(s.size()) > Nerve::kMaxDim + 1) fail(at(sp, k), "simplex dimension exceeds 3");
      for (size_t v = 1; v < s.size(); ++v)
        if (s[v] <= s[v - 1]) fail(at(sp, k), "vertices not increasing");
      simplices.push_back(s);
    }
    const std::string name = j.contains("name") ? string(j["name"], at(ptr, "name")) : "";
    return guarded(ptr, [&] { return std::make_shared<const Nerve>(Nerve::from_simplices(simplices, name)); });
  }

  // -- cochains
  AbelianCochain cochain(const json& j, const std::string& ptr) {
    if (j.is_string())
      return named(w_.cochains, "cochains", j.get<std::string>(), ptr,
                   [&](const json& d, const std::string& p) { return build_cochain(d, p); });
    return build_cochain(j, ptr);
  }
  AbelianCochain build_cochain(const json& j, const std::string& ptr) {
    keys(j, ptr, {"nerve", "degree", "modulus", "values", "generator", "cup"});
    if (j.contains("cup")) {
      const auto& pair = array(j["cup"], at(ptr, "cup"), 2);
      auto a = cochain(pair[0], at(at(ptr, "cup"), 0)), b = cochain(pair[1], at(at(ptr, "cup"), 1));
      if (a.nerve != b.nerve && !(*a.nerve == *b.nerve)) fail(at(ptr, "cup"), "cochains live on different nerves");
      if (a.degree + b.degree > Nerve::kMaxDim) fail(at(ptr, "cup"), "cup product degree exceeds 3");
      return guarded(ptr, [&] { return cup_product(a, b); });
    }
    auto n = nerve(need(j, ptr, "nerve"), at(ptr, "nerve"));
    if (j.contains("generator")) {
      const auto gp = at(ptr, "generator");
      const auto& g = need(j, ptr, "generator");
      keys(g, gp, {"degree", "modulus", "index"});
      const int degree = static_cast<int>(integer(need(g, gp, "degree"), at(gp, "degree"), 0, Nerve::kMaxDim));
      const int m = static_cast<int>(integer(need(g, gp, "modulus"), at(gp, "modulus"), 0, 1 << 20));
      const long index = integer(need(g, gp, "index"), at(gp, "index"), 0);
      auto group = cohomology_of(n, m, degree);
      if (index >= static_cast<long>(group.generators.size()))
        fail(at(gp, "index"), "cohomology has only " + std::to_string(group.generators.size()) + " generators");
      auto c = AbelianCochain::zero(n, degree, m);
      for (size_t k = 0; k < c.values.size(); ++k) c.values[k] = group.generators[index][k].get_si();
      c.normalize();
      return c;
    }
    const int degree = static_cast<int>(integer(need(j, ptr, "degree"), at(ptr, "degree"), 0, Nerve::kMaxDim));
    const int m = static_cast<int>(integer(need(j, ptr, "modulus"), at(ptr, "modulus"), 0, 1 << 20));
    auto c = AbelianCochain::zero(n, degree, m);
    const auto& values = array(need(j, ptr, "values"), at(ptr, "values"), n->count(degree));
    for (size_t k = 0; k < values.size(); ++k) c.values[k] = integer(values[k], at(at(ptr, "values"), k));
    c.normalize();
    return c;
  }

  UnitCochain<T> unit_cochain(const json& j, const std::string& ptr, const NervePtr& n, int degree) {
    if (j.is_object()) {
      keys(j, ptr, {"roots_of_unity"});
      auto c = cochain(need(j, ptr, "roots_of_unity"), at(ptr, "roots_of_unity"));
      if (c.degree != degree || !(*c.nerve == *n)) fail(ptr, "cochain has the wrong degree or nerve");
      if (!Field<T>::supports_modulus(c.modulus))
        fail(ptr, "roots of unity of order " + std::to_string(c.modulus) + " are not in the field");
      auto u = roots_of_unity<T>(c);
      u.nerve = n;
      return u;
    }
    UnitCochain<T> u = UnitCochain<T>::one(n, degree);
    const auto& values = array(j, ptr, n->count(degree));
    for (size_t k = 0; k < values.size(); ++k) {
      u.values[k] = scalar(values[k], at(ptr, k));
      if (is_zero(u.values[k])) fail(at(ptr, k), "unit cochain value is zero");
    }
    return u;
  }

  // -- bimodules
  BimodulePtr<T> bimodule(const json& j, const std::string& ptr) {
    if (j.is_string())
      return named(w_.bimodules, "bimodules", j.get<std::string>(), ptr,
                   [&](const json& d, const std::string& p) { return build_bimodule(d, p); });
    return build_bimodule(j, ptr);
  }
  BimodulePtr<T> build_bimodule(const json& j, const std::string& ptr) {
    keys(j, ptr, {"regular", "line", "morita_trivial", "twisted", "flip", "sum", "inverse", "left", "right", "even",
                  "odd", "labels", "left_action", "right_action"});
    if (j.contains("regular")) return regular_bimodule(algebra(j["regular"], at(ptr, "regular")));
    if (j.contains("line")) {
      const auto lp = at(ptr, "line");
      keys(j["line"], lp, {"parity"});
      return line(ground_field<T>(), static_cast<int>(integer(need(j["line"], lp, "parity"), at(lp, "parity"), 0, 1)));
    }
    if (j.contains("morita_trivial")) {
      auto a = algebra(j["morita_trivial"], at(ptr, "morita_trivial"));
      auto mt = guarded(ptr, [&] { return morita_trivial(a); });
      if (mt.status != MoritaStatus::Trivial) fail(ptr, "algebra is not Morita trivial");
      return mt.module;
    }
    if (j.contains("twisted")) {
      const auto tp = at(ptr, "twisted");
      keys(j["twisted"], tp, {"algebra", "map"});
      auto a = algebra(need(j["twisted"], tp, "algebra"), at(tp, "algebra"));
      AlgebraHom<T> f{a, a, mat(need(j["twisted"], tp, "map"), at(tp, "map"), a->dim(), a->dim())};
      auto errs = f.check();
      if (!errs.empty()) fail(at(tp, "map"), "not an algebra homomorphism: " + errs.front());
      return twisted_regular(f);
    }
    if (j.contains("flip")) return parity_flip(bimodule(j["flip"], at(ptr, "flip")));
    if (j.contains("sum")) {
      const auto& pair = array(j["sum"], at(ptr, "sum"), 2);
      auto a = bimodule(pair[0], at(at(ptr, "sum"), 0)), b = bimodule(pair[1], at(at(ptr, "sum"), 1));
      return guarded(ptr, [&] { return direct_sum(a, b); });
    }
    if (j.contains("inverse")) {
      auto c = certify_invertible(bimodule(j["inverse"], at(ptr, "inverse")));
      if (!c) fail(ptr, "bimodule is not invertible");
      return c->inverse;
    }
    SuperBimodule<T> m;
    m.left_algebra = algebra(need(j, ptr, "left"), at(ptr, "left"));
    m.right_algebra = algebra(need(j, ptr, "right"), at(ptr, "right"));
    const int even = static_cast<int>(integer(need(j, ptr, "even"), at(ptr, "even"), 0, 1 << 12));
    const int odd = static_cast<int>(integer(need(j, ptr, "odd"), at(ptr, "odd"), 0, 1 << 12));
    m.carrier = SuperVectorSpace(even, odd);
    if (j.contains("labels")) {
      std::vector<std::string> labels;
      const auto& l = array(j["labels"], at(ptr, "labels"), even + odd);
      for (size_t k = 0; k < l.size(); ++k) labels.push_back(string(l[k], at(at(ptr, "labels"), k)));
      m.carrier = SuperVectorSpace(even, odd, labels);
    }
    const int d = even + odd;
    const auto& la = array(need(j, ptr, "left_action"), at(ptr, "left_action"), m.left_algebra->dim());
    for (size_t k = 0; k < la.size(); ++k) m.left.push_back(mat(la[k], at(at(ptr, "left_action"), k), d, d));
    const auto& ra = array(need(j, ptr, "right_action"), at(ptr, "right_action"), m.right_algebra->dim());
    for (size_t k = 0; k < ra.size(); ++k) m.right.push_back(mat(ra[k], at(at(ptr, "right_action"), k), d, d));
    return guarded(ptr, [&] { return make_bimodule(std::move(m)); });
  }

  // -- cocycles
  CMCocycle<T> cocycle(const json& j, const std::string& ptr) {
    if (j.is_string())
      return named(w_.cocycles, "cocycles", j.get<std::string>(), ptr,
                   [&](const json& d, const std::string& p) { return build_cocycle(d, p); });
    return build_cocycle(j, ptr);
  }
  CMCocycle<T> build_cocycle(const json& j, const std::string& ptr) {
    keys(j, ptr, {"nerve", "algebra", "trivial", "parity", "g", "a", "twist"});
    auto n = nerve(need(j, ptr, "nerve"), at(ptr, "nerve"));
    auto a = algebra(need(j, ptr, "algebra"), at(ptr, "algebra"));
    CMCocycle<T> c;
    if (j.contains("parity")) {
      auto eps = cochain(j["parity"], at(ptr, "parity"));
      if (eps.degree != 1 || eps.modulus != 2 || !(*eps.nerve == *n))
        fail(at(ptr, "parity"), "parity needs a Z/2 1-cochain on the cocycle's nerve");
      eps.nerve = n;
      c = parity_cocycle(eps, a);
    } else if (j.contains("g")) {
      c.nerve = n;
      c.algebra = a;
      const auto gp = at(ptr, "g");
      const auto& g = array(j["g"], gp, n->count(1));
      for (size_t k = 0; k < g.size(); ++k) c.g.push_back({a, a, mat(g[k], at(gp, k), a->dim(), a->dim())});
      const auto ap = at(ptr, "a");
      const auto& av = array(need(j, ptr, "a"), ap, n->count(2));
      for (size_t k = 0; k < av.size(); ++k) {
        auto u = UnitElement<T>::from(a, vec(av[k], at(ap, k), a->dim()));
        if (!u) fail(at(ap, k), "value is not a homogeneous unit");
        c.a.push_back(*u);
      }
    } else {
      if (!j.contains("trivial") || !j["trivial"].is_boolean() || !j["trivial"].get<bool>())
        fail(ptr, "cocycle needs one of 'trivial', 'parity' or 'g'");
      c = trivial_cocycle(n, a);
    }
    if (j.contains("twist")) c = scalar_twist(c, unit_cochain(j["twist"], at(ptr, "twist"), n, 2));
    return c;
  }

  // -- bundles
  BundlePtr<T> bundle(const json& j, const std::string& ptr) {
    if (j.is_string())
      return named(w_.bundles, "bundles", j.get<std::string>(), ptr,
                   [&](const json& d, const std::string& p) { return build_bundle(d, p); });
    return build_bundle(j, ptr);
  }
  static BundlePtr<T> share(TwoVectorBundle<T> v) { return std::make_shared<const TwoVectorBundle<T>>(std::move(v)); }

  // mu or phi from per-simplex entries {"pairs": [[i, j, v], ...]} or {"matrix": M}.
  using PairTable = std::map<std::pair<int, int>, Vec<T>>;
  struct Entries {
    std::vector<std::optional<PairTable>> pairs;
    std::vector<Mat<T>> matrices;
  };
  Entries entries(const json& j, const std::string& ptr, int count, const std::function<int(int)>& rows,
                  const std::function<std::pair<int, int>(int)>& dims) {
    Entries out;
    const auto& list = array(j, ptr, count);
    for (int t = 0; t < count; ++t) {
      const auto ep = at(ptr, t);
      keys(list[t], ep, {"pairs", "matrix"});
      if (list[t].contains("matrix")) {
        out.pairs.emplace_back();
        const auto& m = list[t]["matrix"];
        const long cols = m.is_array() && !m.empty() && m[0].is_array() ? static_cast<long>(m[0].size()) : 0;
        const long r = rows(t) >= 0 ? rows(t) : (m.is_array() ? static_cast<long>(m.size()) : 0);
        out.matrices.push_back(mat(m, at(ep, "matrix"), r, cols));
        continue;
      }
      PairTable table;
      const auto pp = at(ep, "pairs");
      const auto& pairs = array(need(list[t], ep, "pairs"), pp);
      const auto [di, dj] = dims(t);
      for (size_t k = 0; k < pairs.size(); ++k) {
        const auto kp = at(pp, k);
        const auto& e = array(pairs[k], kp, 3);
        const int i = static_cast<int>(integer(e[0], at(kp, 0), 0, di - 1));
        const int jj = static_cast<int>(integer(e[1], at(kp, 1), 0, dj - 1));
        if (!table.emplace(std::make_pair(i, jj), vec(e[2], at(kp, 2), rows(t))).second)
          fail(kp, "duplicate pair");
      }
      out.pairs.push_back(std::move(table));
      out.matrices.emplace_back();
    }
    return out;
  }
  // Fills matrices from pair tables and checks every supplied pair against them.
  void settle(const Entries& e, const std::string& ptr, std::vector<Mat<T>>& maps,
              const std::vector<RelTensor<T>>& tensors) {
    for (size_t t = 0; t < maps.size(); ++t) {
      const auto ep = at(ptr, t);
      if (!e.pairs[t]) {
        if (e.matrices[t].cols() != maps[t].cols())
          fail(ep, "matrix should have " + std::to_string(maps[t].cols()) + " columns");
        maps[t] = e.matrices[t];
        continue;
      }
      for (const auto& [ij, v] : *e.pairs[t])
        if (v.size() != maps[t].rows() || maps[t] * tensors[t].pure_basis(ij.first, ij.second) != v)
          fail(ep, "value on pair (" + std::to_string(ij.first) + "," + std::to_string(ij.second) +
                       ") disagrees with the values on the quotient basis");
    }
  }
  PairValue<T> lookup(const Entries& e, const std::string& ptr) {
    return [&e, ptr, this](int t, int i, int j) -> Vec<T> {
      if (!e.pairs[t]) return Vec<T>();
      auto it = e.pairs[t]->find({i, j});
      if (it == e.pairs[t]->end())
        fail(at(ptr, t), "missing value on pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
      return it->second;
    };
  }

  BundlePtr<T> build_bundle(const json& j, const std::string& ptr) {
    keys(j, ptr, {"reconstruct", "constant", "gerbe", "tensor", "sum", "refine", "lifting_gerbe", "associated",
                  "nerve", "algebras", "modules", "mu", "name"});
    if (j.contains("reconstruct")) {
      auto c = cocycle(j["reconstruct"], at(ptr, "reconstruct"));
      return guarded(ptr, [&] { return share(reconstruct(c)); });
    }
    if (j.contains("constant")) {
      const auto cp = at(ptr, "constant");
      keys(j["constant"], cp, {"nerve", "algebra"});
      auto n = nerve(need(j["constant"], cp, "nerve"), at(cp, "nerve"));
      return share(constant_bundle(n, algebra(need(j["constant"], cp, "algebra"), at(cp, "algebra"))));
    }
    if (j.contains("gerbe")) {
      const auto gp = at(ptr, "gerbe");
      const auto& g = j["gerbe"];
      keys(g, gp, {"nerve", "epsilon", "scalars"});
      auto n = nerve(need(g, gp, "nerve"), at(gp, "nerve"));
      AbelianCochain eps = AbelianCochain::zero(n, 1, 2);
      if (g.contains("epsilon")) {
        eps = cochain(g["epsilon"], at(gp, "epsilon"));
        if (eps.degree != 1 || eps.modulus != 2 || !(*eps.nerve == *n))
          fail(at(gp, "epsilon"), "epsilon needs a Z/2 1-cochain on the gerbe's nerve");
        eps.nerve = n;
      }
      auto s = g.contains("scalars") ? unit_cochain(g["scalars"], at(gp, "scalars"), n, 2) : UnitCochain<T>::one(n, 2);
      return share(gerbe(n, ground_field<T>(), eps, s));
    }
    if (j.contains("tensor") || j.contains("sum")) {
      const char* key = j.contains("tensor") ? "tensor" : "sum";
      const auto& pair = array(j[key], at(ptr, key), 2);
      auto a = bundle(pair[0], at(at(ptr, key), 0)), b = bundle(pair[1], at(at(ptr, key), 1));
      return guarded(ptr, [&] { return share(j.contains("tensor") ? tensor(*a, *b) : direct_sum(*a, *b)); });
    }
    if (j.contains("refine")) {
      const auto rp = at(ptr, "refine");
      keys(j["refine"], rp, {"bundle", "map"});
      auto v = bundle(need(j["refine"], rp, "bundle"), at(rp, "bundle"));
      auto m = map(need(j["refine"], rp, "map"), at(rp, "map"));
      return guarded(ptr, [&] { return share(refine(*v, m)); });
    }
    if (j.contains("lifting_gerbe") || j.contains("associated")) {
      const bool lifting = j.contains("lifting_gerbe");
      const char* key = lifting ? "lifting_gerbe" : "associated";
      const auto lp = at(ptr, key);
      const auto& l = j[key];
      keys(l, lp, {"extension", "implementation", "group_cocycle", "lifts"});
      auto g = group_cocycle(need(l, lp, "group_cocycle"), at(lp, "group_cocycle"));
      if (lifting) {
        const auto& ext = extension(need(l, lp, "extension"), at(lp, "extension"));
        std::vector<int> lifts;
        if (l.contains("lifts")) lifts = ints(l["lifts"], at(lp, "lifts"), g.nerve->count(1), 0, ext.size() - 1);
        return guarded(ptr, [&] { return lifting_gerbe(ext, g.nerve, g.values, lifts).bundle; });
      }
      const auto& impl = implementation(need(l, lp, "implementation"), at(lp, "implementation"));
      const auto& ext = extension(json(impl.extension), at(lp, "implementation"));
      auto f = check_g_cocycle(ext, g.nerve, g.values);
      if (!f.empty()) fail(at(lp, "group_cocycle"), f.front());
      return guarded(ptr, [&] { return associated_algebra_bundle(g.nerve, g.values, impl.value.action).bundle; });
    }
    auto n = nerve(need(j, ptr, "nerve"), at(ptr, "nerve"));
    std::vector<AlgebraPtr<T>> algebras;
    const auto ap = at(ptr, "algebras");
    const auto& al = array(need(j, ptr, "algebras"), ap, n->count(0));
    for (size_t k = 0; k < al.size(); ++k) algebras.push_back(algebra(al[k], at(ap, k)));
    std::vector<BimodulePtr<T>> modules;
    const auto mp = at(ptr, "modules");
    const auto& ml = array(need(j, ptr, "modules"), mp, n->count(1));
    for (size_t k = 0; k < ml.size(); ++k) modules.push_back(bimodule(ml[k], at(mp, k)));
    auto mod = [&](int a, int b) { return modules[n->index_of({a, b})]; };
    const auto up = at(ptr, "mu");
    const auto& tris = n->simplices(2);
    Entries e = entries(
        need(j, ptr, "mu"), up, n->count(2), [&](int t) { return mod(tris[t][0], tris[t][2])->dim(); },
        [&](int t) { return std::make_pair(mod(tris[t][1], tris[t][2])->dim(), mod(tris[t][0], tris[t][1])->dim()); });
    auto v = guarded(ptr, [&] { return assemble_bundle<T>(n, algebras, modules, lookup(e, up)); });
    settle(e, up, v.mu, v.composites);
    if (j.contains("name")) v.name = string(j["name"], at(ptr, "name"));
    return share(std::move(v));
  }

  // -- maps and morphisms
  SimplicialMap map(const json& j, const std::string& ptr) {
    if (j.is_string())
      return named(w_.maps, "maps", j.get<std::string>(), ptr,
                   [&](const json& d, const std::string& p) { return build_map(d, p); });
    return build_map(j, ptr);
  }
  SimplicialMap build_map(const json& j, const std::string& ptr) {
    keys(j, ptr, {"source", "target", "vertex_map"});
    SimplicialMap m;
    m.source = nerve(need(j, ptr, "source"), at(ptr, "source"));
    m.target = nerve(need(j, ptr, "target"), at(ptr, "target"));
    m.vertex_map = ints(need(j, ptr, "vertex_map"), at(ptr, "vertex_map"), m.source->count(0), 0);
    guarded(ptr, [&] {
      m.validate();
      return 0;
    });
    return m;
  }

  BundleMorphism<T> morphism(const json& j, const std::string& ptr) {
    if (j.is_string())
      return named(w_.morphisms, "morphisms", j.get<std::string>(), ptr,
                   [&](const json& d, const std::string& p) { return build_morphism(d, p); });
    return build_morphism(j, ptr);
  }
  BundleMorphism<T> build_morphism(const json& j, const std::string& ptr) {
    keys(j, ptr, {"identity", "source", "target", "p", "phi"});
    if (j.contains("identity")) return identity_morphism(bundle(j["identity"], at(ptr, "identity")));
    auto src = bundle(need(j, ptr, "source"), at(ptr, "source"));
    auto tgt = bundle(need(j, ptr, "target"), at(ptr, "target"));
    if (!(*src->nerve == *tgt->nerve)) fail(ptr, "source and target live on different nerves");
    const auto& n = *src->nerve;
    std::vector<BimodulePtr<T>> p;
    const auto pp = at(ptr, "p");
    const auto& pl = array(need(j, ptr, "p"), pp, n.count(0));
    for (size_t k = 0; k < pl.size(); ++k) p.push_back(bimodule(pl[k], at(pp, k)));
    const auto fp = at(ptr, "phi");
    const auto& edges = n.simplices(1);
    Entries e = entries(
        need(j, ptr, "phi"), fp, n.count(1),
        [](int) { return -1; },
        [&](int k) { return std::make_pair(tgt->modules[k]->dim(), p[edges[k][0]]->dim()); });
    auto m = guarded(ptr, [&] { return assemble_morphism<T>(src, tgt, p, lookup(e, fp)); });
    for (size_t k = 0; k < m.phi.size(); ++k)
      if (!e.pairs[k] && e.matrices[k].rows() != m.phi[k].rows())
        fail(at(fp, k), "matrix should have " + std::to_string(m.phi[k].rows()) + " rows");
    settle(e, fp, m.phi, m.before);
    return m;
  }

  // -- lifting data
  const CentralExtension<T>& extension(const json& j, const std::string& ptr) {
    return named(w_.extensions, "extensions", string(j, ptr), ptr,
                 [&](const json& d, const std::string& p) { return build_extension(d, p); });
  }
  std::vector<std::vector<int>> table(const json& j, const std::string& ptr) {
    const auto& rows = array(j, ptr);
    std::vector<std::vector<int>> out;
    for (size_t k = 0; k < rows.size(); ++k)
      out.push_back(ints(rows[k], at(ptr, k), static_cast<long>(rows.size()), 0, static_cast<long>(rows.size()) - 1));
    return out;
  }
  CentralExtension<T> build_extension(const json& j, const std::string& ptr) {
    keys(j, ptr, {"builtin", "split", "elements", "parity", "projection", "g_table", "grading", "z_order", "names"});
    if (j.contains("builtin")) {
      const auto b = string(j["builtin"], at(ptr, "builtin"));
      if (b != "pin_minus_1") fail(at(ptr, "builtin"), "unknown builtin extension '" + b + "'");
      return pin_minus_1<T>();
    }
    if (j.contains("split")) {
      const auto sp = at(ptr, "split");
      const auto& s = j["split"];
      keys(s, sp, {"g_table", "grading", "z_order"});
      auto gt = table(need(s, sp, "g_table"), at(sp, "g_table"));
      auto grading = ints(need(s, sp, "grading"), at(sp, "grading"), static_cast<long>(gt.size()), 0, 1);
      const int m = static_cast<int>(integer(need(s, sp, "z_order"), at(sp, "z_order"), 1, 4));
      if (!Field<T>::supports_modulus(m)) fail(at(sp, "z_order"), "roots of unity of this order are not in the field");
      return guarded(ptr, [&] { return split_extension<T>(gt, grading, m); });
    }
    ExtensionData<T> d;
    d.g_table = table(need(j, ptr, "g_table"), at(ptr, "g_table"));
    const long gs = static_cast<long>(d.g_table.size());
    d.grading = ints(need(j, ptr, "grading"), at(ptr, "grading"), gs, 0, 1);
    d.z_order = static_cast<int>(integer(need(j, ptr, "z_order"), at(ptr, "z_order"), 1, 4));
    if (!Field<T>::supports_modulus(d.z_order))
      fail(at(ptr, "z_order"), "roots of unity of this order are not in the field");
    const auto ep = at(ptr, "elements");
    const auto& el = array(need(j, ptr, "elements"), ep);
    const long size = static_cast<long>(el.size());
    if (size == 0) fail(ep, "extension needs elements");
    const long dim = el[0].is_array() ? static_cast<long>(el[0].size()) : 0;
    for (long k = 0; k < size; ++k) d.elements.push_back(mat(el[k], at(ep, k), dim, dim));
    d.parity = ints(need(j, ptr, "parity"), at(ptr, "parity"), size, 0, 1);
    d.projection = ints(need(j, ptr, "projection"), at(ptr, "projection"), size, 0, gs - 1);
    if (j.contains("names")) {
      const auto& nl = array(j["names"], at(ptr, "names"), size);
      for (size_t k = 0; k < nl.size(); ++k) d.names.push_back(string(nl[k], at(at(ptr, "names"), k)));
    }
    return guarded(ptr, [&] { return make_extension(std::move(d)); });
  }

  const NamedImplementation<T>& implementation(const json& j, const std::string& ptr) {
    return named(w_.implementations, "implementations", string(j, ptr), ptr,
                 [&](const json& d, const std::string& p) { return build_implementation(d, p); });
  }
  NamedImplementation<T> build_implementation(const json& j, const std::string& ptr) {
    keys(j, ptr, {"builtin", "inner", "extension", "algebra", "action", "module", "hat_action"});
    NamedImplementation<T> out;
    if (j.contains("inner")) {
      const auto ip = at(ptr, "inner");
      const auto& in = j["inner"];
      keys(in, ip, {"extension", "algebra", "images", "module"});
      out.extension = string(need(in, ip, "extension"), at(ip, "extension"));
      const auto& ext = extension(in["extension"], at(ip, "extension"));
      auto a = algebra(need(in, ip, "algebra"), at(ip, "algebra"));
      std::vector<Vec<T>> images;
      const auto& il = array(need(in, ip, "images"), at(ip, "images"), ext.size());
      for (size_t k = 0; k < il.size(); ++k) images.push_back(vec(il[k], at(at(ip, "images"), k), a->dim()));
      auto f = bimodule(need(in, ip, "module"), at(ip, "module"));
      out.value = guarded(ptr, [&] { return inner_implementation(ext, a, images, f); });
      return out;
    }
    out.extension = string(need(j, ptr, "extension"), at(ptr, "extension"));
    const auto& ext = extension(j["extension"], at(ptr, "extension"));
    if (j.contains("builtin")) {
      const auto b = string(j["builtin"], at(ptr, "builtin"));
      if (b != "pin") fail(at(ptr, "builtin"), "unknown builtin implementation '" + b + "'");
      out.value = guarded(ptr, [&] { return pin_implementation(ext); });
      return out;
    }
    auto& impl = out.value;
    impl.algebra = algebra(need(j, ptr, "algebra"), at(ptr, "algebra"));
    impl.module = bimodule(need(j, ptr, "module"), at(ptr, "module"));
    const int d = impl.algebra->dim(), fd = impl.module->dim();
    const auto& al = array(need(j, ptr, "action"), at(ptr, "action"), ext.group_size());
    for (size_t k = 0; k < al.size(); ++k)
      impl.action.push_back({impl.algebra, impl.algebra, mat(al[k], at(at(ptr, "action"), k), d, d)});
    const auto& hl = array(need(j, ptr, "hat_action"), at(ptr, "hat_action"), ext.size());
    for (size_t k = 0; k < hl.size(); ++k) impl.hat_action.push_back(mat(hl[k], at(at(ptr, "hat_action"), k), fd, fd));
    return out;
  }

  NamedGroupCocycle<T> group_cocycle(const json& j, const std::string& ptr) {
    if (j.is_string())
      return named(w_.group_cocycles, "group_cocycles", j.get<std::string>(), ptr,
                   [&](const json& d, const std::string& p) { return build_group_cocycle(d, p); });
    return build_group_cocycle(j, ptr);
  }
  NamedGroupCocycle<T> build_group_cocycle(const json& j, const std::string& ptr) {
    keys(j, ptr, {"nerve", "values", "tautological_o1"});
    if (j.contains("tautological_o1")) {
      auto w = cochain(j["tautological_o1"], at(ptr, "tautological_o1"));
      if (w.degree != 1 || w.modulus != 2) fail(at(ptr, "tautological_o1"), "needs a Z/2 1-cochain");
      return {w.nerve, tautological_o1(w)};
    }
    auto n = nerve(need(j, ptr, "nerve"), at(ptr, "nerve"));
    return {n, ints(need(j, ptr, "values"), at(ptr, "values"), n->count(1), 0)};
  }

  NamedButterfly<T> build_butterfly(const json& j, const std::string& ptr) {
    keys(j, ptr, {"csa", "morita"});
    NamedButterfly<T> b;
    if (j.contains("csa")) {
      b.algebra = algebra(j["csa"], at(ptr, "csa"));
      if (!is_central_simple(b.algebra).central_simple) fail(at(ptr, "csa"), "algebra is not central simple");
      return b;
    }
    b.bimodule = bimodule(need(j, ptr, "morita"), at(ptr, "morita"));
    if (!certify_invertible(b.bimodule)) fail(at(ptr, "morita"), "bimodule is not invertible");
    return b;
  }

  const std::string& text_;
  json doc_;
  Workspace<T> w_;
  std::set<std::string> resolving_;
  std::unique_ptr<Locator> locator_;
};

// ---------------------------------------------------------------------------
// Emission

template <class T>
class Emitter {
 public:
  explicit Emitter(const Workspace<T>& w) : w_(w) {
    for (const auto& [name, a] : w.algebras) algebra_names_.emplace_back(a, name);
    for (const auto& [name, n] : w.nerves) nerve_names_.emplace_back(n, name);
    for (const auto& [name, b] : w.bundles) bundle_names_.emplace(b.get(), name);
    for (const char* s : kSections) sections_[s] = json::object();
  }

  std::string emit() {
    for (const auto& [name, a] : w_.algebras) sections_["algebras"][name] = algebra_json(a);
    for (const auto& [name, n] : w_.nerves) sections_["nerves"][name] = nerve_json(n);
    for (const auto& [name, c] : w_.cochains) sections_["cochains"][name] = cochain_json(c);
    for (const auto& [name, b] : w_.bimodules) sections_["bimodules"][name] = bimodule_json(b);
    for (const auto& [name, c] : w_.cocycles) sections_["cocycles"][name] = cocycle_json(c);
    for (const auto& [name, b] : w_.bundles) sections_["bundles"][name] = bundle_json(*b);
    for (const auto& [name, m] : w_.maps)
      sections_["maps"][name] = {{"source", nerve_name(m.source)}, {"target", nerve_name(m.target)},
                                 {"vertex_map", m.vertex_map}};
    for (const auto& [name, m] : w_.morphisms) sections_["morphisms"][name] = morphism_json(m);
    for (const auto& [name, e] : w_.extensions) sections_["extensions"][name] = extension_json(e);
    for (const auto& [name, i] : w_.implementations) sections_["implementations"][name] = implementation_json(i);
    for (const auto& [name, g] : w_.group_cocycles)
      sections_["group_cocycles"][name] = {{"nerve", nerve_name(g.nerve)}, {"values", g.values}};
    for (const auto& [name, b] : w_.butterflies)
      sections_["butterflies"][name] =
          b.algebra ? json{{"csa", algebra_name(b.algebra)}} : json{{"morita", bimodule_json(b.bimodule)}};
    json doc = {{"field", Field<T>::tag}};
    for (const char* s : kSections) {
      if (sections_[s].empty()) continue;
      // Anonymous objects are added on demand; sort so that re-emission is stable.
      std::map<std::string, json> sorted;
      for (auto& [name, value] : sections_[s].items()) sorted[name] = value;
      doc[s] = json::object();
      for (auto& [name, value] : sorted) doc[s][name] = std::move(value);
    }
    return pretty(doc) + "\n";
  }

 private:
  std::string fresh(const char* section, const std::string& stem) {
    for (int k = 1;; ++k) {
      std::string name = stem + "_" + std::to_string(k);
      if (!sections_[section].contains(name) && !taken_.count(name)) {
        taken_.insert(name);
        return name;
      }
    }
  }
  std::string algebra_name(const AlgebraPtr<T>& a) {
    for (const auto& [p, name] : algebra_names_)
      if (same_algebra(p, a)) return name;
    auto name = fresh("algebras", "algebra");
    algebra_names_.emplace_back(a, name);
    sections_["algebras"][name] = algebra_json(a);
    return name;
  }
  std::string nerve_name(const NervePtr& n) {
    for (const auto& [p, name] : nerve_names_)
      if (p == n || *p == *n) return name;
    auto name = fresh("nerves", n->name().empty() ? "nerve" : n->name());
    nerve_names_.emplace_back(n, name);
    sections_["nerves"][name] = nerve_json(n);
    return name;
  }
  std::string bundle_name(const BundlePtr<T>& b) {
    if (auto it = bundle_names_.find(b.get()); it != bundle_names_.end()) return it->second;
    auto name = fresh("bundles", "bundle");
    bundle_names_.emplace(b.get(), name);
    sections_["bundles"][name] = bundle_json(*b);
    return name;
  }

  json algebra_json(const AlgebraPtr<T>& a) {
    json table = json::array();
    for (int i = 0; i < a->dim(); ++i)
      for (int j = 0; j < a->dim(); ++j)
        for (const auto& [k, c] : a->product(i, j)) table.push_back({i, j, k, scalar_json(c)});
    json out = {{"even", a->carrier().even}, {"odd", a->carrier().odd}};
    if (!a->carrier().labels.empty()) out["labels"] = a->carrier().labels;
    out["unit"] = vec_json(a->unit());
    out["table"] = table;
    return out;
  }
  json nerve_json(const NervePtr& n) {
    json out = {{"simplices", n->maximal_simplices()}};
    if (!n->name().empty()) out["name"] = n->name();
    return out;
  }
  json cochain_json(const AbelianCochain& c) {
    return {{"nerve", nerve_name(c.nerve)}, {"degree", c.degree}, {"modulus", c.modulus},
            {"values", cochain_values_json(c)}};
  }
  json bimodule_json(const BimodulePtr<T>& m) {
    json out = {{"left", algebra_name(m->left_algebra)}, {"right", algebra_name(m->right_algebra)},
                {"even", m->carrier.even}, {"odd", m->carrier.odd}};
    if (!m->carrier.labels.empty()) out["labels"] = m->carrier.labels;
    json l = json::array(), r = json::array();
    for (const auto& x : m->left) l.push_back(mat_json(x));
    for (const auto& x : m->right) r.push_back(mat_json(x));
    out["left_action"] = l;
    out["right_action"] = r;
    return out;
  }
  json cocycle_json(const CMCocycle<T>& c) {
    json g = json::array(), a = json::array();
    for (const auto& x : c.g) g.push_back(mat_json(x.map));
    for (const auto& x : c.a) a.push_back(vec_json(x.value));
    return {{"nerve", nerve_name(c.nerve)}, {"algebra", algebra_name(c.algebra)}, {"g", g}, {"a", a}};
  }
  json pairs_json(const RelTensor<T>& r, const Mat<T>& m) {
    json pairs = json::array();
    for (int q = 0; q < static_cast<int>(r.free.size()); ++q) {
      auto [i, j] = r.representative(q);
      pairs.push_back({i, j, vec_json<T>(m.col(q))});
    }
    return {{"pairs", pairs}};
  }
  json bundle_json(const TwoVectorBundle<T>& v) {
    json algebras = json::array(), modules = json::array(), mu = json::array();
    for (const auto& a : v.algebras) algebras.push_back(algebra_name(a));
    for (const auto& m : v.modules) modules.push_back(bimodule_json(m));
    for (size_t t = 0; t < v.mu.size(); ++t) mu.push_back(pairs_json(v.composites[t], v.mu[t]));
    json out = {{"nerve", nerve_name(v.nerve)}, {"algebras", algebras}, {"modules", modules}, {"mu", mu}};
    if (!v.name.empty()) out["name"] = v.name;
    return out;
  }
  json morphism_json(const BundleMorphism<T>& m) {
    json p = json::array(), phi = json::array();
    for (const auto& x : m.p) p.push_back(bimodule_json(x));
    for (size_t e = 0; e < m.phi.size(); ++e) phi.push_back(pairs_json(m.before[e], m.phi[e]));
    return {{"source", bundle_name(m.source)}, {"target", bundle_name(m.target)}, {"p", p}, {"phi", phi}};
  }
  json extension_json(const CentralExtension<T>& e) {
    json el = json::array();
    for (const auto& m : e.data.elements) el.push_back(mat_json(m));
    json out = {{"elements", el},        {"parity", e.data.parity},   {"projection", e.data.projection},
                {"g_table", e.data.g_table}, {"grading", e.data.grading}, {"z_order", e.data.z_order}};
    if (!e.data.names.empty()) out["names"] = e.data.names;
    return out;
  }
  json implementation_json(const NamedImplementation<T>& i) {
    json action = json::array(), hat = json::array();
    for (const auto& f : i.value.action) action.push_back(mat_json(f.map));
    for (const auto& m : i.value.hat_action) hat.push_back(mat_json(m));
    return {{"extension", i.extension}, {"algebra", algebra_name(i.value.algebra)}, {"action", action},
            {"module", bimodule_json(i.value.module)}, {"hat_action", hat}};
  }

  const Workspace<T>& w_;
  std::map<std::string, json> sections_;
  std::vector<std::pair<AlgebraPtr<T>, std::string>> algebra_names_;
  std::vector<std::pair<NervePtr, std::string>> nerve_names_;
  std::map<const void*, std::string> bundle_names_;
  std::set<std::string> taken_;
};

// ---------------------------------------------------------------------------
// Commands

struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class T>
class Session {
 public:
  Session(const std::string& text, const std::vector<std::string>& args, const CommandOptions& opt)
      : w_(parse_workspace<T>(text)), args_(args), opt_(opt), rng_(opt.seed) {
    result_ = {{"command", args[0]}, {"field", Field<T>::tag}, {"seed", opt.seed}};
  }

  CommandResult run() {
    try {
      dispatch();
    } catch (const ValidationFailure&) {
      exit_ = 1;
    }
    CommandResult r;
    r.exit_code = exit_;
    r.report = out_.str();
    r.result = pretty(result_);
    if (changed_) r.workspace = emit_workspace(w_);
    return r;
  }

 private:
  void dispatch() {
    const auto& c = args_[0];
    if (c == "validate") validate();
    else if (c == "invariants") invariants();
    else if (c == "classify") classify();
    else if (c == "tensor" || c == "dsum" || c == "refine") construct();
    else if (c == "hh1") hochschild();
    else if (c == "csa") csa();
    else if (c == "bw") bw();
    else if (c == "picard-surjectify") surjectify();
    else if (c == "transport") transport();
    else if (c == "lift") lift();
    else if (c == "pipeline") pipeline();
    else if (c == "emit") {
      operands(0, "emit");
      out_ << emit_workspace(w_);
    } else {
      throw InputError("unknown command '" + c + "'");
    }
  }

  void operands(size_t n, const std::string& usage) {
    if (args_.size() != n + 1) throw InputError("usage: " + usage);
  }
  template <class V>
  const V& get(const std::map<std::string, V>& m, const std::string& name, const char* kind) {
    auto it = m.find(name);
    if (it == m.end()) throw InputError(std::string("unknown ") + kind + " '" + name + "'");
    return it->second;
  }
  void fresh_name(bool taken) {
    if (taken) throw InputError("name '" + opt_.name + "' is already used in the workspace");
    changed_ = true;
  }
  void failures(const std::vector<std::string>& f) {
    result_["failures"] = f;
    for (const auto& s : f) out_ << "  - " << s << "\n";
    if (!f.empty()) exit_ = 1;
  }

  json triple_json(const ClassTriple<T>& t) {
    json bw = json::array();
    for (const auto& b : t.bw) bw.push_back({{"residue", b.residue}, {"modulus", b.modulus}});
    const auto order = torsion_order(t.x);
    // All roots of unity of the base field: mu_2 in Q, mu_4 in Q(i).
    const int m = Field<T>::supports_modulus(4) ? 4 : 2;
    const auto rep = finite_representative(t.x, m);
    return {{"bw", bw},
            {"epsilon",
             {{"values", cochain_values_json(t.epsilon)},
              {"trivial", coboundary_test(t.epsilon) == CoboundaryVerdict::Coboundary}}},
            {"x",
             {{"values", unit_values_json(t.x)},
              {"trivial", order == 1},
              {"torsion_order", order ? json(*order) : json(nullptr)},
              {"roots_of_unity",
               {{"order", m}, {"phases", rep ? cochain_values_json(rep->phases) : json(nullptr)}}}}}};
  }
  ClassTriple<T> triple_of(const BundlePtr<T>& b, const std::string& name) {
    auto rep = validate_bundle(*b);
    if (!rep.ok()) {
      out_ << "bundle " << name << " is not valid\n";
      failures(rep.failures);
      throw ValidationFailure("bundle " + name + " is not valid");
    }
    try {
      return invariant_triple(*b, rng_);
    } catch (const std::invalid_argument& e) {
      throw InputError("bundle " + name + ": no invariants outside the CSA regime (" + e.what() + ")");
    }
  }

  void validate() {
    if (args_.size() != 2 && args_.size() != 3) throw InputError("usage: validate [kind] <name>");
    const std::string name = args_.back();
    std::vector<std::string> kinds;
    if (w_.bundles.count(name)) kinds.push_back("bundle");
    if (w_.cocycles.count(name)) kinds.push_back("cocycle");
    if (w_.morphisms.count(name)) kinds.push_back("morphism");
    if (w_.implementations.count(name)) kinds.push_back("implementation");
    std::string kind;
    if (args_.size() == 3) {
      kind = args_[1];
      if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
        throw InputError("unknown " + kind + " '" + name + "'");
    } else {
      if (kinds.empty()) throw InputError("no bundle, cocycle, morphism or implementation named '" + name + "'");
      if (kinds.size() > 1) throw InputError("name '" + name + "' is ambiguous; give the kind");
      kind = kinds[0];
    }
    CocycleReport rep;
    result_["kind"] = kind;
    result_["name"] = name;
    result_["morita"] = nullptr;
    if (kind == "bundle") rep = validate_bundle(*w_.bundles.at(name));
    if (kind == "cocycle") rep = validate_cocycle(w_.cocycles.at(name));
    if (kind == "morphism") rep = validate_morphism(w_.morphisms.at(name));
    if (kind == "implementation") {
      const auto& impl = w_.implementations.at(name);
      auto r = validate_implementation(get(w_.extensions, impl.extension, "extension"), impl.value);
      rep = r.report;
      result_["morita"] = r.morita;
    }
    result_["valid"] = rep.ok();
    out_ << kind << " " << name << ": " << (rep.ok() ? "valid" : "INVALID") << "\n";
    if (kind == "implementation")
      out_ << "module is " << (result_["morita"].get<bool>() ? "" : "not ") << "a Morita equivalence\n";
    failures(rep.failures);
  }

  void invariants() {
    operands(1, "invariants <bundle>");
    const auto& name = args_[1];
    result_["bundle"] = name;
    auto t = triple_of(get(w_.bundles, name, "bundle"), name);
    result_["triple"] = triple_json(t);
    out_ << "bundle " << name << ": triple " << describe(t) << "\n";
    out_ << "  epsilon class " << (result_["triple"]["epsilon"]["trivial"].get<bool>() ? "trivial" : "nontrivial")
         << "\n";
    const auto& x = result_["triple"]["x"];
    out_ << "  x class "
         << (x["torsion_order"].is_null() ? "of order > 24 or infinite"
                                          : "of order " + std::to_string(x["torsion_order"].get<int>()))
         << (x["roots_of_unity"]["phases"].is_null() ? ", no " : ", represented in ") << "mu_"
         << x["roots_of_unity"]["order"].get<int>() << "\n";
  }

  void classify() {
    operands(2, "classify <bundle> <bundle>");
    const auto& a = get(w_.bundles, args_[1], "bundle");
    const auto& b = get(w_.bundles, args_[2], "bundle");
    if (!(*a->nerve == *b->nerve)) throw InputError("bundles live on different nerves");
    result_["bundles"] = {args_[1], args_[2]};
    auto ta = triple_of(a, args_[1]), tb = triple_of(b, args_[2]);
    const bool same = same_class(ta, tb);
    result_["triples"] = {triple_json(ta), triple_json(tb)};
    result_["isomorphic"] = same;
    result_["verdict"] = same ? "isomorphic" : "not isomorphic";
    out_ << args_[1] << ": " << describe(ta) << "\n" << args_[2] << ": " << describe(tb) << "\n";
    out_ << "verdict: " << (same ? "isomorphic" : "not isomorphic") << "\n";
  }

  void construct() {
    const auto& c = args_[0];
    TwoVectorBundle<T> v;
    try {
      if (c == "refine") {
        operands(2, "refine <bundle> <map>");
        v = refine(*get(w_.bundles, args_[1], "bundle"), get(w_.maps, args_[2], "map"));
      } else {
        operands(2, c + " <bundle> <bundle>");
        const auto& a = *get(w_.bundles, args_[1], "bundle");
        const auto& b = *get(w_.bundles, args_[2], "bundle");
        v = c == "tensor" ? tensor(a, b) : direct_sum(a, b);
      }
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    fresh_name(w_.bundles.count(opt_.name) > 0);
    v.name = opt_.name;
    auto b = std::make_shared<const TwoVectorBundle<T>>(std::move(v));
    w_.bundles[opt_.name] = b;
    auto rep = validate_bundle(*b);
    json dims = json::array(), mods = json::array();
    for (const auto& a : b->algebras) dims.push_back(a->dim());
    for (const auto& m : b->modules) mods.push_back(m->dim());
    result_["name"] = opt_.name;
    result_["operands"] = std::vector<std::string>(args_.begin() + 1, args_.end());
    result_["vertex_dimensions"] = dims;
    result_["module_dimensions"] = mods;
    result_["valid"] = rep.ok();
    out_ << c << " -> bundle " << opt_.name << " on " << b->nerve->count(0) << " vertices: "
         << (rep.ok() ? "valid" : "INVALID") << "\n";
    out_ << "  vertex algebra dimensions " << dims.dump() << "\n  module dimensions " << mods.dump() << "\n";
    failures(rep.failures);
  }

  void hochschild() {
    operands(1, "hh1 <algebra>");
    auto a = get(w_.algebras, args_[1], "algebra");
    auto h = hh1(a);
    json reps = json::array();
    for (const auto& m : h.representatives) reps.push_back(mat_json(m));
    result_["algebra"] = args_[1];
    result_["dimension"] = h.dimension;
    result_["derivations"] = h.derivations;
    result_["inner"] = h.inner;
    result_["representatives"] = reps;
    out_ << "HH1(" << args_[1] << ") has dimension " << h.dimension << " (" << h.derivations
         << " even derivations, " << h.inner << " inner)\n";
  }

  void csa() {
    operands(1, "csa <algebra>");
    auto r = is_central_simple(get(w_.algebras, args_[1], "algebra"));
    result_["algebra"] = args_[1];
    result_["central_simple"] = r.central_simple;
    result_["witness"] = r.central_simple ? json(nullptr) : vec_json(r.witness);
    out_ << args_[1] << " is " << (r.central_simple ? "" : "not ") << "central simple\n";
  }

  void bw() {
    operands(1, "bw <algebra>");
    auto a = get(w_.algebras, args_[1], "algebra");
    if (!is_central_simple(a).central_simple) throw InputError("algebra " + args_[1] + " is not central simple");
    auto c = bw_class(a);
    result_["algebra"] = args_[1];
    result_["residue"] = c.residue;
    result_["modulus"] = c.modulus;
    out_ << c.residue << " (mod " << c.modulus << ")\n";
  }

  void surjectify() {
    operands(1, "picard-surjectify <algebra>");
    auto a = get(w_.algebras, args_[1], "algebra");
    PicardSurjectification<T> p;
    try {
      p = picard_surjectify(a, rng_);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    auto f = check_certificate(p.certificate);
    fresh_name(w_.algebras.count(opt_.name) > 0);
    w_.algebras[opt_.name] = p.algebra;
    result_["algebra"] = args_[1];
    result_["name"] = opt_.name;
    result_["dimension"] = p.algebra->dim();
    result_["module_dimension"] = p.module->dim();
    result_["classes"] = p.decomposition.classes.size();
    result_["certificate_valid"] = f.empty();
    out_ << "picard surjectification of " << args_[1] << ": algebra " << opt_.name << " of dimension "
         << p.algebra->dim() << " (" << p.decomposition.classes.size() << " projective classes)\n";
    out_ << "  Morita equivalence " << args_[1] << " ~ " << opt_.name << " on a module of dimension "
         << p.module->dim() << ": certificate " << (f.empty() ? "verified" : "FAILED") << "\n";
    failures(f);
  }

  void transport() {
    operands(2, "transport <butterfly> <cocycle>");
    const auto& bf = get(w_.butterflies, args_[1], "butterfly");
    const auto& c = get(w_.cocycles, args_[2], "cocycle");
    result_["butterfly"] = args_[1];
    result_["cocycle"] = args_[2];
    auto rep = validate_cocycle(c);
    if (!rep.ok()) {
      out_ << "cocycle " << args_[2] << " is not valid\n";
      failures(rep.failures);
      return;
    }
    auto shared = std::make_shared<Rng>(opt_.seed);
    if (bf.algebra) {
      if (!same_algebra(bf.algebra, c.algebra)) throw InputError("cocycle algebra differs from the butterfly's");
      auto s = transport_scalar(csa_butterfly(bf.algebra, shared), c);
      auto inv = csa_invariants(c, rng_);
      const bool valid = validate_scalar_cocycle(s).ok(), agree = same_class(s, inv.cocycle);
      result_["kind"] = "csa";
      result_["epsilon"] = cochain_values_json(s.epsilon);
      result_["x"] = unit_values_json(s.x);
      result_["valid"] = valid;
      result_["agrees_with_invariants"] = agree;
      out_ << "CSA transport of " << args_[2] << ": eps " << to_string(s.epsilon) << "\n";
      out_ << "  scalar cocycle " << (valid ? "valid" : "INVALID") << "; class "
           << (agree ? "agrees" : "DISAGREES") << " with the CSA invariants\n";
      if (!valid || !agree) exit_ = 1;
      return;
    }
    if (!same_algebra(bf.bimodule->left_algebra, c.algebra))
      throw InputError("cocycle algebra differs from the butterfly's left algebra");
    auto k = morita_butterfly(bf.bimodule, shared);
    auto c2 = transport_cocycle(k, c, bf.bimodule->right_algebra);
    auto rep2 = validate_cocycle(c2);
    fresh_name(w_.cocycles.count(opt_.name) > 0);
    w_.cocycles[opt_.name] = c2;
    result_["kind"] = "morita";
    result_["name"] = opt_.name;
    result_["valid"] = rep2.ok();
    out_ << "Morita transport of " << args_[2] << " -> cocycle " << opt_.name << ": "
         << (rep2.ok() ? "valid" : "INVALID") << "\n";
    failures(rep2.failures);
  }

  void lift() {
    operands(2, "lift <extension> <group cocycle>");
    const auto& ext = get(w_.extensions, args_[1], "extension");
    const auto& g = get(w_.group_cocycles, args_[2], "group cocycle");
    result_["extension"] = args_[1];
    result_["cocycle"] = args_[2];
    auto f = check_g_cocycle(ext, g.nerve, g.values);
    if (!f.empty()) {
      out_ << args_[2] << " is not a cocycle for " << args_[1] << "\n";
      failures(f);
      return;
    }
    auto lg = lifting_gerbe(ext, g.nerve, g.values);
    const bool trivial = coboundary_test(lg.z_phase) == CoboundaryVerdict::Coboundary;
    fresh_name(w_.bundles.count(opt_.name) > 0);
    w_.bundles[opt_.name] = lg.bundle;
    result_["name"] = opt_.name;
    result_["z_phase"] = {{"modulus", lg.z_phase.modulus}, {"values", cochain_values_json(lg.z_phase)}};
    result_["obstruction_trivial"] = trivial;
    out_ << "lifting gerbe " << opt_.name << ": obstruction class " << (trivial ? "trivial" : "nontrivial") << "\n";
    const bool searchable = g.nerve->count(1) <= 15;
    result_["searched"] = searchable;
    result_["cocycle_lift"] = nullptr;
    if (!searchable) {
      out_ << "  lift search skipped (more than 15 edges)\n";
      return;
    }
    auto l = find_cocycle_lift(ext, g.nerve, g.values);
    if (l) {
      json names = json::array();
      for (int x : *l) names.push_back(ext.data.names.empty() ? json(x) : json(ext.data.names[x]));
      result_["cocycle_lift"] = names;
      out_ << "  cocycle lift " << names.dump() << "\n";
    } else {
      out_ << "  no lift to a cocycle exists\n";
    }
    if (l.has_value() != trivial) {
      out_ << "  obstruction class and lift search disagree\n";
      exit_ = 1;
    }
  }

  // Label of a class relative to a named Z/2 1-cocycle w: 0, [w], [w^2] or the raw values.
  std::string label(const ClassTriple<T>& t, const AbelianCochain& w, const std::string& name) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < t.bw.size(); ++i) os << (i ? "," : "") << t.bw[i].residue;
    os << ", ";
    if (coboundary_test(t.epsilon) == CoboundaryVerdict::Coboundary)
      os << "0";
    else if (same_class(t.epsilon, w))
      os << "[" << name << "]";
    else
      os << to_string(t.epsilon);
    os << ", ";
    if (coboundary_preimage(t.x))
      os << "0";
    else if (same_class(t.x, roots_of_unity<T>(cup_product(w, w))))
      os << "[" << name << "^2]";
    else
      os << "x";
    os << ")";
    return os.str();
  }

  void pipeline() {
    if (args_.size() < 2 || args_[1] != "pin1") throw InputError("usage: pipeline pin1 <nerve> <cochain>");
    operands(3, "pipeline pin1 <nerve> <cochain>");
    NervePtr n;
    if (w_.nerves.count(args_[2])) {
      n = w_.nerves.at(args_[2]);
    } else {
      try {
        n = nerves::by_name(args_[2]);
      } catch (const std::invalid_argument&) {
        throw InputError("unknown nerve '" + args_[2] + "'");
      }
    }
    auto w = get(w_.cochains, args_[3], "cochain");
    if (w.degree != 1 || w.modulus != 2 || !(*w.nerve == *n))
      throw InputError("cochain " + args_[3] + " is not a Z/2 1-cochain on " + args_[2]);
    if (!is_cocycle(w)) throw InputError("cochain " + args_[3] + " is not a cocycle");
    w.nerve = n;
    result_["pipeline"] = "pin1";
    result_["nerve"] = args_[2];
    result_["cochain"] = args_[3];
    auto pin = pin_minus_1<T>();
    auto impl = pin_implementation(pin);
    auto cm = canonical_morphism(pin, impl, n, tautological_o1(w));
    const bool trivial = coboundary_test(cm.gerbe.z_phase) == CoboundaryVerdict::Coboundary;
    std::string zl = trivial ? "0" : same_class(cm.gerbe.z_phase, cup_product(w, w)) ? "[" + args_[3] + "^2]" : "?";
    result_["obstruction"] = {{"modulus", cm.gerbe.z_phase.modulus},
                              {"values", cochain_values_json(cm.gerbe.z_phase)},
                              {"trivial", trivial},
                              {"label", zl}};
    out_ << "lifting gerbe obstruction: " << zl << (trivial ? " (trivial)" : " (nontrivial)") << "\n";
    result_["morphism_valid"] = cm.report.ok();
    out_ << "canonical morphism: " << (cm.report.ok() ? "valid" : "INVALID") << ", " << cm.verdict << "\n";
    failures(cm.report.failures);
    result_["verdict"] = cm.verdict;
    auto tg = invariant_triple(*cm.gerbe.bundle, rng_);
    auto ta = invariant_triple(*cm.algebra.bundle, rng_);
    const bool agree = same_class(tg, ta);
    const std::string lg = label(tg, w, args_[3]), la = label(ta, w, args_[3]);
    result_["gerbe_triple"] = triple_json(tg);
    result_["algebra_triple"] = triple_json(ta);
    result_["triples_agree"] = agree;
    out_ << "gerbe triple: " << lg << "\nalgebra bundle triple: " << la << "\n";
    const bool yes = cm.report.ok() && cm.isomorphism && agree;
    result_["isomorphism_verdict"] = yes ? "YES" : "NO";
    result_["triple_label"] = lg;
    out_ << "isomorphism verdict: " << (yes ? "YES" : "NO") << "; triple " << lg << "\n";
    if (!yes) exit_ = 1;
  }

  Workspace<T> w_;
  std::vector<std::string> args_;
  CommandOptions opt_;
  Rng rng_;
  json result_;
  std::ostringstream out_;
  int exit_ = 0;
  bool changed_ = false;
};

template <class T>
CommandResult run_typed(const std::string& text, const std::vector<std::string>& args, const CommandOptions& opt) {
  return Session<T>(text, args, opt).run();
}

}  // namespace

std::string document_field(const std::string& text) {
  json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("field")) return "Q";
  const auto& f = doc["field"];
  if (f.is_string() && (f.get<std::string>() == "Q" || f.get<std::string>() == "Q(i)")) return f.get<std::string>();
  Locator loc(text);
  auto [line, col] = line_column(text, loc.offsets().at("/field"));
  throw InputError("field must be \"Q\" or \"Q(i)\"", "/field", line, col);
}

template <class T>
Workspace<T> parse_workspace(const std::string& text) {
  return Reader<T>(text).read();
}

template <class T>
std::string emit_workspace(const Workspace<T>& w) {
  return Emitter<T>(w).emit();
}

CommandResult run_command(const std::string& text, const std::vector<std::string>& args,
                          const CommandOptions& options) {
  CommandResult r;
  json result = {{"command", args.empty() ? "" : args[0]}};
  try {
    if (args.empty()) throw InputError("no command given");
    return document_field(text) == "Q" ? run_typed<Rational>(text, args, options)
                                       : run_typed<Gaussian>(text, args, options);
  } catch (const InputError& e) {
    r.exit_code = 2;
    const auto where = e.where();
    r.report = "input error" + (where.empty() ? "" : " at " + where) + ": " + e.what() + "\n";
    result["error"] = e.what();
    result["pointer"] = e.pointer();
    result["line"] = e.line();
    result["column"] = e.column();
  } catch (const std::invalid_argument& e) {
    r.exit_code = 2;
    r.report = std::string("input error: ") + e.what() + "\n";
    result["error"] = e.what();
  } catch (const std::exception& e) {
    r.exit_code = 1;
    r.report = std::string("failed: ") + e.what() + "\n";
    result["error"] = e.what();
  }
  r.result = pretty(result);
  return r;
}

template Workspace<Rational> parse_workspace<Rational>(const std::string&);
template Workspace<Gaussian> parse_workspace<Gaussian>(const std::string&);
template std::string emit_workspace<Rational>(const Workspace<Rational>&);
template std::string emit_workspace<Gaussian>(const Workspace<Gaussian>&);

}  // namespace super2vec
