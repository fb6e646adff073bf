#include "efda/config.hpp"
#include "efda/error.hpp"
#include "efda/numfmt.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace efda {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};
using Section = std::map<std::string, Entry, std::less<>>;

const char* const kKnownKeys[] = {"family",  "class_params", "class_etas", "alpha",
                                  "priors",  "n_train",      "n_test",     "trials",
                                  "seed",    "methods",      "bins",       "n_values",
                                  "alpha_values", "grid_points", "confidence"};

bool known_key(std::string_view key) {
  for (const char* k : kKnownKeys)
    if (key == k) return true;
  return false;
}

std::vector<std::string_view> split(std::string_view s, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && seps.find(s[i]) != std::string_view::npos) ++i;
    std::size_t j = i;
    while (j < s.size() && seps.find(s[j]) == std::string_view::npos) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

class Builder {
public:
  Builder(const std::string& source, const std::string& section, const Section& entries)
      : source_(source), section_(section), entries_(entries) {}

  [[noreturn]] void error(const Entry& e, const std::string& what) const {
    fail(ErrorCode::Parse, source_ + ":" + std::to_string(e.line) + ": " + what);
  }

  const Entry* find(std::string_view key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  double number(const Entry& e, std::string_view token) const {
    auto v = parse_double(token);
    if (!v || !std::isfinite(*v)) error(e, "expected a number, got '" + std::string(token) + "'");
    return *v;
  }

  std::uint64_t unsigned_int(const Entry& e, std::string_view token) const {
    token = trim(token);
    std::uint64_t v = 0;
    if (auto i = parse_int(token); i && *i >= 0) return static_cast<std::uint64_t>(*i);
    if (auto d = parse_double(token); d && *d >= 0 && *d == std::floor(*d) && *d < 1.8e19) {
      v = static_cast<std::uint64_t>(*d);
      return v;
    }
    error(e, "expected a non-negative integer, got '" + std::string(token) + "'");
  }

  std::vector<double> numbers(const Entry& e) const {
    std::vector<double> out;
    for (auto tok : split(e.value, " \t,")) out.push_back(number(e, tok));
    return out;
  }

  ExperimentConfig build() const {
    ExperimentConfig c;
    c.name = section_;
    if (auto e = find("family")) {
      try {
        c.family = FamilySpec::parse(e->value);
      } catch (const Error& ex) {
        error(*e, ex.what());
      }
    }
    const Entry* conv = find("class_params");
    const Entry* nat = find("class_etas");
    if (conv && nat) error(*nat, "give either class_params or class_etas, not both");
    if (!conv && !nat)
      fail(ErrorCode::Parse, source_ + ": section [" + section_ + "] has no class_params");
    const Entry& pe = conv ? *conv : *nat;
    for (auto cls : split(pe.value, ",")) {
      std::vector<double> comps;
      for (auto tok : split(cls, " \t")) comps.push_back(number(pe, tok));
      try {
        if (conv) {
          c.class_etas.push_back(natural_from_conventional(c.family, comps));
        } else {
          if (comps.size() == 1) c.class_etas.emplace_back(comps[0]);
          else if (comps.size() == 2) c.class_etas.emplace_back(comps[0], comps[1]);
          else error(pe, "natural parameters have 1 or 2 components");
        }
      } catch (const Error& ex) {
        if (ex.code() == ErrorCode::Parse) throw;
        error(pe, ex.what());
      }
    }
    const auto K = c.class_etas.size();

    const Entry* alpha = find("alpha");
    const Entry* priors = find("priors");
    if (alpha && priors) error(*priors, "give either alpha or priors, not both");
    if (alpha) {
      if (K != 2) error(*alpha, "alpha applies to two-class experiments only");
      const double a = number(*alpha, alpha->value);
      c.priors = {1.0 - a, a};
    } else if (priors) {
      c.priors = numbers(*priors);
    } else {
      c.priors.assign(K, 1.0 / static_cast<double>(K));
    }

    if (auto e = find("n_train")) c.n_train = unsigned_int(*e, e->value);
    if (auto e = find("n_test")) c.n_test = unsigned_int(*e, e->value);
    if (auto e = find("trials")) c.trials = unsigned_int(*e, e->value);
    if (auto e = find("seed")) c.seed = unsigned_int(*e, e->value);
    if (auto e = find("bins")) c.ece_bins = static_cast<int>(unsigned_int(*e, e->value));
    if (auto e = find("confidence")) {
      try {
        c.confidence = parse_confidence(e->value);
      } catch (const Error& ex) {
        error(*e, ex.what());
      }
    }
    if (auto e = find("grid_points")) c.grid_points = unsigned_int(*e, e->value);
    if (auto e = find("methods")) {
      c.methods.clear();
      for (auto tok : split(e->value, " \t,")) {
        try {
          c.methods.push_back(parse_method(tok));
        } catch (const Error& ex) {
          error(*e, ex.what());
        }
      }
    }
    if (auto e = find("n_values"))
      for (auto tok : split(e->value, " \t,")) c.n_values.push_back(unsigned_int(*e, tok));
    if (auto e = find("alpha_values")) c.alpha_values = numbers(*e);

    try {
      c.validate();
    } catch (const Error& ex) {
      fail(ErrorCode::Parse, source_ + ": [" + section_ + "]: " + ex.what());
    }
    return c;
  }

private:
  const std::string& source_;
  const std::string& section_;
  const Section& entries_;
};

}  // namespace

std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::Efda: return "efda";
    case Method::EfdaEstimatedShape: return "efda_khat";
    case Method::EfdaPooledShape: return "efda_khat_pooled";
    case Method::Lda: return "lda";
    case Method::Qda: return "qda";
    case Method::Lr: return "lr";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::Efda, Method::EfdaEstimatedShape, Method::EfdaPooledShape, Method::Lda,
                   Method::Qda, Method::Lr})
    if (method_name(m) == name) return m;
  fail(ErrorCode::Parse, "unknown method '" + std::string(name) + "'");
}

std::string_view confidence_name(BinaryConfidence c) noexcept {
  return c == BinaryConfidence::ClassOne ? "class1" : "top_label";
}

BinaryConfidence parse_confidence(std::string_view name) {
  if (name == "class1") return BinaryConfidence::ClassOne;
  if (name == "top_label") return BinaryConfidence::TopLabel;
  fail(ErrorCode::Parse, "unknown confidence '" + std::string(name) + "' (class1 or top_label)");
}

bool ExperimentConfig::has_method(Method m) const noexcept {
  for (Method x : methods)
    if (x == m) return true;
  return false;
}

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorCode::InvalidArgument, what); };
  const auto K = class_etas.size();
  if (K < 2) bad("need at least two classes");
  for (const auto& eta : class_etas)
    if (!in_natural_space(family, eta))
      bad("class parameter outside the natural parameter space of " + family.name());
  if (priors.size() != K) bad("need one prior per class");
  double s = 0.0;
  for (double p : priors) {
    if (!(p > 0.0 && p < 1.0)) bad("class priors must lie in (0, 1)");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-9) bad("class priors must sum to 1");
  if (trials < 1) bad("trials must be >= 1");
  if (n_train < 2 * K) bad("n_train must be >= 2K");
  if (n_test < 1) bad("n_test must be >= 1");
  if (ece_bins < 1) bad("bins must be >= 1");
  if (grid_points < 2 || grid_points % 2) bad("grid_points must be even and >= 2");
  if (methods.empty()) bad("no methods selected");
  if ((has_method(Method::EfdaEstimatedShape) || has_method(Method::EfdaPooledShape)) &&
      family.kind() != FamilyKind::WeibullKnownShape)
    bad("efda_khat and efda_khat_pooled need a weibull family");
  for (auto n : n_values)
    if (n < 2 * K) bad("every n in n_values must be >= 2K");
  for (double a : alpha_values)
    if (!(a > 0.0 && a < 1.0)) bad("alpha_values must lie in (0, 1)");
}

ConfigFile parse_config(std::string_view text, const std::string& source) {
  Section defaults;
  std::vector<std::pair<std::string, Section>> sections;
  std::string table_name;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  auto err = [&](const std::string& what) {
    fail(ErrorCode::Parse, source + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') err("unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) err("empty section name");
      for (const auto& s : sections)
        if (s.first == name) err("duplicate section [" + std::string(name) + "]");
      sections.emplace_back(std::string(name), Section{});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) err("expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) err("missing key");
    if (value.empty()) err("missing value for '" + key + "'");
    if (key == "name") {
      if (!sections.empty()) err("'name' is only allowed before the first section");
      table_name = value;
      continue;
    }
    if (!known_key(key)) err("unknown key '" + key + "'");
    Section& target = sections.empty() ? defaults : sections.back().second;
    if (target.count(key)) err("duplicate key '" + key + "'");
    target[key] = Entry{value, line_no};
  }

  ConfigFile cfg;
  cfg.name = table_name;
  if (sections.empty()) sections.emplace_back(table_name.empty() ? "experiment" : table_name, Section{});
  for (auto& [name, entries] : sections) {
    Section merged = defaults;
    for (auto& [k, v] : entries) merged[k] = v;
    cfg.experiments.push_back(Builder(source, name, merged).build());
  }
  return cfg;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  ConfigFile cfg = parse_config(ss.str(), path);
  if (cfg.name.empty()) cfg.name = std::filesystem::path(path).stem().string();
  return cfg;
}

}  // namespace efda
