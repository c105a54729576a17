#include "degenlog/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "degenlog/errors.hpp"

namespace degenlog {

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string full_precision(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> to_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------------------
// Expression parser

class ExprParser {
 public:
  explicit ExprParser(std::string text) : s_(std::move(text)) {}

  SetShape shape() {
    const std::string name = word();
    if (name == "empty") return EmptySet{};
    expect('(');
    SetShape out;
    if (name == "ball") {
      const Point c = coords();
      expect(';');
      out = Ball{c, number()};
    } else if (name == "sector") {
      const Point c = coords();
      expect(';');
      const double r0 = number();
      expect(';');
      const double t0 = number();
      expect(';');
      out = Sector{c, r0, t0, number()};
    } else if (name == "point") {
      out = PointSet{coords()};
    } else if (name == "union") {
      Union u;
      u.parts.push_back(shape());
      while (peek() == ',') {
        ++pos_;
        u.parts.push_back(shape());
      }
      out = u;
    } else {
      fail("unknown shape '" + name + "'");
    }
    expect(')');
    return out;
  }

  DomainSpec domain() {
    const std::string name = word();
    expect('(');
    DomainSpec out;
    if (name == "rect") {
      const Point lo = coords();
      expect(';');
      out.shape = Rectangle{lo, coords()};
    } else if (name == "disc") {
      const Point c = coords();
      expect(';');
      out.shape = Disc{c, number()};
    } else if (name == "interval") {
      const double a = number();
      expect(';');
      out.shape = Interval{a, number()};
    } else {
      fail("unknown domain '" + name + "'");
    }
    expect(')');
    return out;
  }

  void finish() {
    skip();
    if (pos_ != s_.size()) fail("trailing characters");
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression '" + s_ + "' at column " + std::to_string(pos_ + 1) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string word() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a name");
    return s_.substr(start, pos_ - start);
  }
  double number() {
    skip();
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }
  Point coords() {
    const double x = number();
    if (peek() != ',') return point(x);
    ++pos_;
    return point(x, number());
  }

  std::string s_;
  std::size_t pos_ = 0;
};

std::string format_point(const Point& p) { return format_number(p.x()) + "," + format_number(p.y()); }

Point parse_point(const std::string& text) {
  const auto comma = text.find(',');
  const auto x = to_double(text.substr(0, comma));
  const auto y = comma == std::string::npos ? std::optional<double>(0.0) : to_double(text.substr(comma + 1));
  if (!x || !y) throw ConfigError("expected a point 'x,y', got '" + text + "'");
  return point(*x, *y);
}

}  // namespace

SetShape parse_shape(const std::string& text) {
  ExprParser p(text);
  SetShape s = p.shape();
  p.finish();
  return s;
}

std::string format_shape(const SetShape& s) {
  return std::visit(
      [](const auto& shape) -> std::string {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, EmptySet>) {
          return "empty";
        } else if constexpr (std::is_same_v<T, Ball>) {
          return "ball(" + format_point(shape.center) + ";" + format_number(shape.radius) + ")";
        } else if constexpr (std::is_same_v<T, Sector>) {
          return "sector(" + format_point(shape.center) + ";" + format_number(shape.r0) + ";" +
                 format_number(shape.theta0) + ";" + format_number(shape.theta1) + ")";
        } else if constexpr (std::is_same_v<T, PointSet>) {
          return "point(" + format_point(shape.at) + ")";
        } else {
          std::string out = "union(";
          for (std::size_t i = 0; i < shape.parts.size(); ++i)
            out += (i ? ", " : "") + format_shape(shape.parts[i]);
          return out + ")";
        }
      },
      s.v);
}

DomainSpec parse_domain(const std::string& text) {
  ExprParser p(text);
  DomainSpec d = p.domain();
  p.finish();
  return d;
}

std::string format_domain(const DomainSpec& d) {
  if (const auto* r = std::get_if<Rectangle>(&d.shape))
    return "rect(" + format_point(r->lo) + ";" + format_point(r->hi) + ")";
  if (const auto* c = std::get_if<Disc>(&d.shape))
    return "disc(" + format_point(c->center) + ";" + format_number(c->radius) + ")";
  const auto& iv = std::get<Interval>(d.shape);
  return "interval(" + format_number(iv.lo) + ";" + format_number(iv.hi) + ")";
}

// ---------------------------------------------------------------------------
// Scenario files

namespace {

const std::vector<std::string> kSections = {"", "domain", "equation", "kset", "time", "scheme", "initial", "output"};

struct Entry {
  std::string value;
  int line = 0;  // 0 for command-line overrides
};

struct KeyValues {
  std::string source;
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::map<std::string, int> section_lines;
  bool lenient = false;  // only override entries may be reported as unknown
};

std::string where(const std::string& source, int line) {
  return line > 0 ? source + ":" + std::to_string(line) : source + " (override)";
}

KeyValues read_key_values(std::istream& in, const std::string& source) {
  KeyValues kv;
  kv.source = source;
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text[0] == '#' || text[0] == ';') continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError(where(source, line) + ": unterminated section header");
      section = trim(text.substr(1, text.size() - 2));
      if (std::find(kSections.begin() + 1, kSections.end(), section) == kSections.end())
        throw ConfigError(where(source, line) + ": unknown section [" + section + "]");
      if (kv.section_lines.count(section))
        throw ConfigError(where(source, line) + ": section [" + section + "] appears twice");
      kv.section_lines[section] = line;
      kv.sections[section];
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(where(source, line) + ": expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError(where(source, line) + ": missing key before '='");
    auto& sec = kv.sections[section];
    if (sec.count(key)) throw ConfigError(where(source, line) + ": duplicate key '" + key + "'");
    sec[key] = {trim(text.substr(eq + 1)), line};
  }
  return kv;
}

// Consumes keys of one section and reports leftovers as unknown.
class SectionReader {
 public:
  SectionReader(const KeyValues& kv, const std::string& name)
      : source_(kv.source), name_(name), lenient_(kv.lenient) {
    if (const auto it = kv.sections.find(name); it != kv.sections.end()) entries_ = it->second;
  }

  std::optional<Entry> take(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    Entry e = it->second;
    entries_.erase(it);
    return e;
  }

  double number(const std::string& key, double fallback) {
    const auto e = take(key);
    if (!e) return fallback;
    const auto v = to_double(e->value);
    if (!v) fail(*e, "key '" + key + "' expects a number, got '" + e->value + "'");
    return *v;
  }

  int integer(const std::string& key, int fallback) {
    const auto e = take(key);
    if (!e) return fallback;
    int v = 0;
    const auto res = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
    if (res.ec != std::errc() || res.ptr != e->value.data() + e->value.size())
      fail(*e, "key '" + key + "' expects an integer, got '" + e->value + "'");
    return v;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const auto e = take(key);
    return e ? e->value : fallback;
  }

  Point pt(const std::string& key, const Point& fallback) {
    const auto e = take(key);
    if (!e) return fallback;
    try {
      return parse_point(e->value);
    } catch (const ConfigError& err) {
      fail(*e, "key '" + key + "': " + err.what());
    }
  }

  SetShape shape(const std::string& key, const SetShape& fallback) {
    const auto e = take(key);
    if (!e) return fallback;
    try {
      return parse_shape(e->value);
    } catch (const ConfigError& err) {
      fail(*e, "key '" + key + "': " + err.what());
    }
  }

  /// Reads `key` as one of `options`; returns its index.
  std::size_t choice(const std::string& key, const std::vector<std::string>& options, std::size_t fallback) {
    const auto e = take(key);
    if (!e) return fallback;
    const auto it = std::find(options.begin(), options.end(), e->value);
    if (it == options.end()) {
      std::string list;
      for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
      fail(*e, "key '" + key + "' must be one of {" + list + "}, got '" + e->value + "'");
    }
    return static_cast<std::size_t>(it - options.begin());
  }

  void done() {
    // Keys of a kind replaced by an override are dropped silently.
    if (lenient_) std::erase_if(entries_, [](const auto& e) { return e.second.line > 0; });
    if (entries_.empty()) return;
    const auto first = std::min_element(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
      return a.second.line < b.second.line;
    });
    const std::string sec = name_.empty() ? "top level" : "[" + name_ + "]";
    fail(first->second, "unknown key '" + first->first + "' in " + sec);
  }

 private:
  [[noreturn]] void fail(const Entry& e, const std::string& what) const {
    throw ConfigError(where(source_, e.line) + ": " + what);
  }

  std::string source_, name_;
  bool lenient_ = false;
  std::map<std::string, Entry> entries_;
};

const std::vector<std::string> kDomainKinds = {"rectangle", "disc", "interval"};
const std::vector<std::string> kNuKinds = {"saturating", "indicator"};
const std::vector<std::string> kKsetKinds = {"static", "radius_ball", "rotating_sector", "jumping", "translating"};
const std::vector<std::string> kRadiusLaws = {"constant", "grow", "shrink", "oscillate"};
const std::vector<std::string> kPathKinds = {"fixed", "circle", "segment"};
const std::vector<std::string> kInitKinds = {"constant", "bump", "eigen"};

Scenario interpret(const KeyValues& kv) {
  Scenario s;
  {
    SectionReader top(kv, "");
    s.label = top.text("label", "");
    top.done();
  }
  {
    SectionReader r(kv, "domain");
    switch (r.choice("kind", kDomainKinds, 0)) {
      case 0: s.domain.shape = Rectangle{r.pt("lo", point(0, 0)), r.pt("hi", point(1, 1))}; break;
      case 1: s.domain.shape = Disc{r.pt("center", point(0, 0)), r.number("radius", 1.0)}; break;
      default: s.domain.shape = Interval{r.number("lo", 0.0), r.number("hi", 1.0)}; break;
    }
    s.resolution = r.integer("resolution", s.resolution);
    r.done();
  }
  {
    SectionReader r(kv, "equation");
    s.params.lambda = r.number("lambda", s.params.lambda);
    s.params.rho = r.number("rho", s.params.rho);
    if (r.choice("nu", kNuKinds, 0) == 0) {
      const Saturating def;
      s.params.nu.kind = Saturating{r.number("nu_max", def.nu_max), r.number("d_ramp", def.d_ramp)};
    } else {
      s.params.nu.kind = Indicator{r.number("level", Indicator{}.level)};
    }
    s.params.nu.n_empty = r.number("n_empty", s.params.nu.n_empty);
    r.done();
  }
  {
    SectionReader r(kv, "kset");
    switch (r.choice("kind", kKsetKinds, 0)) {
      case 0: s.params.moving_set = StaticSet{r.shape("shape", EmptySet{})}; break;
      case 1: {
        RadiusBall b;
        b.center = r.pt("center", point(0, 0));
        b.radius.law = static_cast<RadiusLaw>(r.choice("law", kRadiusLaws, 0));
        b.radius.r0 = r.number("r0", 0.0);
        b.radius.omega = r.number("omega", 0.0);
        s.params.moving_set = b;
        break;
      }
      case 2: {
        RotatingSector rs;
        rs.center = r.pt("center", point(0, 0));
        rs.r0 = r.number("r0", 0.0);
        rs.theta0 = r.number("theta0", 0.0);
        rs.theta1 = r.number("theta1", 0.0);
        rs.omega = r.number("omega", 0.0);
        s.params.moving_set = rs;
        break;
      }
      case 3: {
        Jumping j;
        j.k0 = r.shape("k0", EmptySet{});
        j.k1 = r.shape("k1", EmptySet{});
        j.period = r.number("period", j.period);
        j.t1 = r.number("t1", j.t1);
        s.params.moving_set = j;
        break;
      }
      default: {
        Translating tr;
        tr.shape = r.shape("shape", EmptySet{});
        PathSchedule& c = tr.curve;
        c.kind = static_cast<PathKind>(r.choice("path", kPathKinds, 0));
        c.a = r.pt("a", c.a);
        c.b = r.pt("b", c.b);
        c.radius = r.number("path_radius", c.radius);
        c.omega = r.number("path_omega", c.omega);
        c.phase = r.number("phase", c.phase);
        c.period = r.number("period", c.period);
        tr.rotation.theta0 = r.number("theta0", 0.0);
        tr.rotation.omega = r.number("omega", 0.0);
        s.params.moving_set = tr;
        break;
      }
    }
    r.done();
  }
  {
    SectionReader r(kv, "time");
    s.t0 = r.number("t0", s.t0);
    s.t_end = r.number("t_end", s.t_end);
    r.done();
  }
  {
    SectionReader r(kv, "scheme");
    s.scheme.dt = r.number("dt", s.scheme.dt);
    s.scheme.solve_tol = r.number("solve_tol", s.scheme.solve_tol);
    s.scheme.growth_cap = r.number("growth_cap", s.scheme.growth_cap);
    r.done();
  }
  {
    SectionReader r(kv, "initial");
    switch (r.choice("kind", kInitKinds, 0)) {
      case 0: s.initial.kind = ConstantInit{r.number("value", 1.0)}; break;
      case 1: {
        const BumpInit def;
        s.initial.kind = BumpInit{r.pt("center", def.center), r.number("radius", def.radius),
                                  r.number("height", def.height)};
        break;
      }
      default: s.initial.kind = EigenInit{r.shape("shape", EmptySet{}), r.number("scale", 1.0)}; break;
    }
    r.done();
  }
  {
    SectionReader r(kv, "output");
    s.outputs.sample_every = r.integer("sample_every", s.outputs.sample_every);
    s.outputs.snapshot_every = r.number("snapshot_every", s.outputs.snapshot_every);
    r.done();
  }
  try {
    validate(s);
  } catch (const ConfigError& e) {
    throw ConfigError(kv.source + ": " + e.what());
  }
  return s;
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& source) {
  return interpret(read_key_values(in, source));
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  return parse_scenario(in, path);
}

std::string emit_scenario(const Scenario& s) {
  std::ostringstream os;
  auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
  auto num = [&](const std::string& k, double v) { kv(k, format_number(v)); };

  if (!s.label.empty()) kv("label", s.label);
  os << "\n[domain]\n";
  if (const auto* r = std::get_if<Rectangle>(&s.domain.shape)) {
    kv("kind", "rectangle");
    kv("lo", format_point(r->lo));
    kv("hi", format_point(r->hi));
  } else if (const auto* d = std::get_if<Disc>(&s.domain.shape)) {
    kv("kind", "disc");
    kv("center", format_point(d->center));
    num("radius", d->radius);
  } else {
    const auto& iv = std::get<Interval>(s.domain.shape);
    kv("kind", "interval");
    num("lo", iv.lo);
    num("hi", iv.hi);
  }
  kv("resolution", std::to_string(s.resolution));

  os << "\n[equation]\n";
  num("lambda", s.params.lambda);
  num("rho", s.params.rho);
  if (const auto* sat = std::get_if<Saturating>(&s.params.nu.kind)) {
    kv("nu", "saturating");
    num("nu_max", sat->nu_max);
    num("d_ramp", sat->d_ramp);
  } else {
    kv("nu", "indicator");
    num("level", std::get<Indicator>(s.params.nu.kind).level);
  }
  num("n_empty", s.params.nu.n_empty);

  os << "\n[kset]\n";
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, StaticSet>) {
          kv("kind", "static");
          kv("shape", format_shape(k.base));
        } else if constexpr (std::is_same_v<T, RadiusBall>) {
          kv("kind", "radius_ball");
          kv("center", format_point(k.center));
          kv("law", kRadiusLaws[static_cast<std::size_t>(k.radius.law)]);
          num("r0", k.radius.r0);
          num("omega", k.radius.omega);
        } else if constexpr (std::is_same_v<T, RotatingSector>) {
          kv("kind", "rotating_sector");
          kv("center", format_point(k.center));
          num("r0", k.r0);
          num("theta0", k.theta0);
          num("theta1", k.theta1);
          num("omega", k.omega);
        } else if constexpr (std::is_same_v<T, Jumping>) {
          kv("kind", "jumping");
          kv("k0", format_shape(k.k0));
          kv("k1", format_shape(k.k1));
          num("period", k.period);
          num("t1", k.t1);
        } else {
          kv("kind", "translating");
          kv("shape", format_shape(k.shape));
          kv("path", kPathKinds[static_cast<std::size_t>(k.curve.kind)]);
          kv("a", format_point(k.curve.a));
          kv("b", format_point(k.curve.b));
          num("path_radius", k.curve.radius);
          num("path_omega", k.curve.omega);
          num("phase", k.curve.phase);
          num("period", k.curve.period);
          num("theta0", k.rotation.theta0);
          num("omega", k.rotation.omega);
        }
      },
      s.params.moving_set.v);

  os << "\n[time]\n";
  num("t0", s.t0);
  num("t_end", s.t_end);

  os << "\n[scheme]\n";
  num("dt", s.scheme.dt);
  num("solve_tol", s.scheme.solve_tol);
  num("growth_cap", s.scheme.growth_cap);

  os << "\n[initial]\n";
  std::visit(
      [&](const auto& init) {
        using T = std::decay_t<decltype(init)>;
        if constexpr (std::is_same_v<T, ConstantInit>) {
          kv("kind", "constant");
          num("value", init.c);
        } else if constexpr (std::is_same_v<T, BumpInit>) {
          kv("kind", "bump");
          kv("center", format_point(init.center));
          num("radius", init.radius);
          num("height", init.height);
        } else if constexpr (std::is_same_v<T, EigenInit>) {
          kv("kind", "eigen");
          kv("shape", format_shape(init.shape));
          num("scale", init.scale);
        } else {
          throw ConfigError("initial: custom nodal data has no scenario-file form");
        }
      },
      s.initial.kind);

  os << "\n[output]\n";
  kv("sample_every", std::to_string(s.outputs.sample_every));
  num("snapshot_every", s.outputs.snapshot_every);
  return os.str();
}

Scenario apply_overrides(const Scenario& s, const std::vector<std::string>& overrides) {
  if (overrides.empty()) return s;
  std::istringstream in(emit_scenario(s));
  KeyValues kv = read_key_values(in, s.label.empty() ? "<scenario>" : s.label);
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "': expected section.key=value");
    const std::string path = trim(o.substr(0, eq));
    const auto dot = path.find('.');
    const std::string section = dot == std::string::npos ? "" : path.substr(0, dot);
    const std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
    if (std::find(kSections.begin(), kSections.end(), section) == kSections.end())
      throw ConfigError("override '" + o + "': unknown section [" + section + "]");
    kv.sections[section][key] = {trim(o.substr(eq + 1)), 0};
  }
  kv.lenient = true;
  return interpret(kv);
}

Scenario load_scenario(const std::string& ref) {
  const auto labels = registry_labels();
  if (std::find(labels.begin(), labels.end(), ref) != labels.end()) return registry_entry(ref).scenario;
  std::ifstream probe(ref);
  if (!probe) throw ConfigError("'" + ref + "' is neither a registry label nor a readable scenario file");
  return parse_scenario_file(ref);
}

// ---------------------------------------------------------------------------
// Outputs

void write_trajectory_csv(const Trajectory& tr, std::ostream& out) {
  out << "t,sup_norm,l2_norm,mass,cap_hit\n";
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const bool hit = tr.cap_hit && tr.times[i] >= *tr.cap_hit;
    out << full_precision(tr.times[i]) << ',' << full_precision(tr.sup_norms[i]) << ','
        << full_precision(tr.l2_norms[i]) << ',' << full_precision(tr.masses[i]) << ',' << (hit ? "1" : "")
        << '\n';
  }
}

void write_trajectory_csv(const Trajectory& tr, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("csv: cannot open " + path);
  write_trajectory_csv(tr, out);
  if (!out) throw std::runtime_error("csv: write failed for " + path);
}

Trajectory read_trajectory_csv(std::istream& in) {
  Trajectory tr;
  std::string line;
  if (!std::getline(in, line) || line != "t,sup_norm,l2_norm,mass,cap_hit")
    throw ConfigError("csv: missing header 't,sup_norm,l2_norm,mass,cap_hit'");
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 5) throw ConfigError("csv: row " + std::to_string(row) + " does not have 5 columns");
    double v[4];
    for (int k = 0; k < 4; ++k) {
      const auto x = to_double(cells[static_cast<std::size_t>(k)]);
      if (!x) throw ConfigError("csv: row " + std::to_string(row) + " has a malformed number");
      v[k] = *x;
    }
    tr.times.push_back(v[0]);
    tr.sup_norms.push_back(v[1]);
    tr.l2_norms.push_back(v[2]);
    tr.masses.push_back(v[3]);
    if (cells[4] == "1" && !tr.cap_hit) tr.cap_hit = v[0];
  }
  if (!tr.sup_norms.empty()) tr.u0_sup = tr.sup_norms.front();
  return tr;
}

std::vector<std::string> write_snapshots(const Trajectory& tr, const std::string& stem) {
  std::vector<std::string> paths;
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    const Field& f = tr.snapshots[i].second;
    char name[32];
    std::snprintf(name, sizeof name, "_%04zu.pgm", i);
    const double top = f.values.size() ? f.values.maxCoeff() : 0.0;
    write_pgm(f, stem + name, top > 0.0 ? top : 1.0);
    std::ofstream(stem + name + ".scale", std::ios::app) << "t " << full_precision(tr.snapshots[i].first) << '\n';
    paths.push_back(stem + name);
  }
  return paths;
}

std::string format_checks(const std::vector<TheoremCheck>& checks) {
  std::ostringstream os;
  for (const TheoremCheck& c : checks) {
    os << to_string(c.theorem) << ": " << (c.fired() ? to_string(c.predicted) : "silent");
    if (!c.note.empty()) os << "  (" << c.note << ")";
    os << '\n';
    for (const auto& [name, value] : c.details) os << "    " << name << " = " << format_number(value) << '\n';
  }
  return os.str();
}

std::string format_cross_check(const CrossCheckReport& rep) {
  std::ostringstream os;
  os << "scenario " << rep.label << '\n' << format_checks(rep.checks);
  os << "verdict: " << to_string(rep.verdict.kind) << (rep.verdict.decayed ? " (decayed)" : "") << "  "
     << rep.verdict.evidence << '\n';
  os << "status: " << to_string(rep.status) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Suites

int resolve_jobs(int requested) {
  if (const char* env = std::getenv("DEGENLOG_JOBS")) {
    int v = 0;
    const std::string s = env;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 1)
      throw ConfigError("DEGENLOG_JOBS must be a positive integer, got '" + s + "'");
    return v;
  }
  return std::max(1, requested);
}

namespace {

std::string csv_cell(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + "  " : s + std::string(width - s.size(), ' ');
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, jobs)), count);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string fired_list(const std::vector<TheoremCheck>& checks) {
  std::string out;
  for (const auto& c : checks)
    if (c.fired()) out += (out.empty() ? "" : " ") + std::string(to_string(c.theorem)) + ":" + to_string(c.predicted);
  return out.empty() ? "-" : out;
}

}  // namespace

SuiteReport run_suite(const std::string& name, const SuiteOptions& opts) {
  if (name != "paper-examples" && name != "properties" && name != "all")
    throw ConfigError("suite: unknown suite '" + name + "' (expected paper-examples, properties or all)");
  const bool examples = name != "properties";
  const bool properties = name != "paper-examples";

  const std::vector<std::string> labels = examples ? registry_labels() : std::vector<std::string>{};
  std::vector<RegistryEntry> entries;
  for (const auto& l : labels) entries.push_back(registry_entry(l));
  std::vector<CrossCheckReport> reports(entries.size());
  std::vector<PropertyResult> props;

  // The property suite is one more task next to the scenarios.
  const std::size_t tasks = entries.size() + (properties ? 1 : 0);
  parallel_for(tasks, opts.jobs, [&](std::size_t i) {
    if (i < entries.size()) {
      reports[i] = cross_check(entries[i].scenario);
      reports[i].trajectory = {};
    } else {
      PropertyConfig cfg;
      cfg.inject_fault = opts.inject_fault;
      props = run_properties(cfg);
    }
  });

  SuiteReport out;
  std::ostringstream txt, csv;
  csv << "suite,name,status,verdict,fired,gating,detail\n";
  txt << "degenlog suite " << name << "\n";
  int failures = 0;
  if (examples) {
    std::map<CrossStatus, int> counts;
    txt << "\n" << pad("scenario", 26) << pad("status", 14) << pad("verdict", 18) << "fired\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& r = reports[i];
      const bool gating = !entries[i].exploratory;
      ++counts[r.status];
      const bool bad = r.status == CrossStatus::violation || (gating && r.status != CrossStatus::consistent);
      if (bad) ++failures;
      std::string verdict = to_string(r.verdict.kind);
      if (r.verdict.decayed) verdict += "(decayed)";
      const std::string status = std::string(to_string(r.status)) + (gating ? "" : "*");
      txt << pad(r.label, 26) << pad(status, 14) << pad(verdict, 18) << fired_list(r.checks) << '\n';
      csv << "paper-examples," << csv_cell(r.label) << ',' << to_string(r.status) << ',' << verdict << ','
          << csv_cell(fired_list(r.checks)) << ',' << (gating ? "yes" : "no") << ','
          << csv_cell(r.verdict.evidence) << '\n';
    }
    txt << "(* exploratory: reported, never gating)\n";
    txt << "consistent " << counts[CrossStatus::consistent] << ", violation " << counts[CrossStatus::violation]
        << ", undecided " << counts[CrossStatus::undecided] << ", inconclusive "
        << counts[CrossStatus::inconclusive] << '\n';
  }
  if (properties) {
    txt << "\n" << pad("property", 58) << pad("result", 8) << "worst\n";
    for (const auto& p : props) {
      if (!p.passed) ++failures;
      txt << pad(p.name, 58) << pad(p.passed ? "PASS" : "FAIL", 8) << format_number(p.worst) << '\n';
      csv << "properties," << csv_cell(p.name) << ',' << (p.passed ? "PASS" : "FAIL") << ",,,yes,"
          << csv_cell(p.detail) << '\n';
    }
  }
  txt << "\nresult: " << (failures ? "FAIL (" + std::to_string(failures) + " failing rows)" : "PASS") << '\n';
  out.text = txt.str();
  out.csv = csv.str();
  out.exit_code = failures ? 1 : 0;
  return out;
}

}  // namespace degenlog
