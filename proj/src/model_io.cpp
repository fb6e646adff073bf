#include "efda/model_io.hpp"
#include "efda/error.hpp"
#include "efda/numfmt.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace efda {

namespace {

constexpr std::string_view kMagic = "efda-model 1";

template <class... F>
struct Overloaded : F... {
  using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

std::string join(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

std::string eta_text(const NaturalParam& eta) {
  std::string out = format_double(eta[0]);
  if (eta.dim() == 2) out += ' ' + format_double(eta[1]);
  return out;
}

std::string flags(const std::vector<bool>& f) {
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ' ';
    out += f[i] ? '1' : '0';
  }
  return out;
}

class Writer {
public:
  void put(const std::string& key, const std::string& value) {
    out_ += key + " = " + value + "\n";
  }
  std::string str() const { return std::string(kMagic) + "\n" + out_; }

private:
  std::string out_;
};

std::vector<std::string_view> tokens(std::string_view s, char sep = 0) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [sep](char c) { return sep ? c == sep : (c == ' ' || c == '\t'); };
  while (i < s.size()) {
    if (!sep)
      while (i < s.size() && is_sep(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_sep(s[j])) ++j;
    if (j > i || sep) out.push_back(trim(s.substr(i, j - i)));
    i = j + 1;
    if (!sep && j >= s.size()) break;
  }
  return out;
}

class Reader {
public:
  Reader(std::string_view text, const std::string& source) : source_(source) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    bool header = false;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string_view line = raw;
      if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
      line = trim(line);
      if (line.empty()) continue;
      if (!header) {
        if (line != kMagic) error(line_no, "expected '" + std::string(kMagic) + "' header");
        header = true;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) error(line_no, "expected 'key = value'");
      std::string key(trim(line.substr(0, eq)));
      if (entries_.count(key)) error(line_no, "duplicate key '" + key + "'");
      entries_[key] = {std::string(trim(line.substr(eq + 1))), line_no};
    }
    if (!header) fail(ErrorCode::Parse, source_ + ": empty model file");
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  const std::string& text(const std::string& key) const { return entry(key).value; }

  std::vector<double> numbers(const std::string& key) const {
    const auto& e = entry(key);
    std::vector<double> out;
    for (auto tok : tokens(e.value)) {
      auto v = parse_double(tok);
      if (!v) error(e.line, "bad number '" + std::string(tok) + "' for '" + key + "'");
      out.push_back(*v);
    }
    return out;
  }

  double number(const std::string& key) const {
    auto v = numbers(key);
    if (v.size() != 1) error(entry(key).line, "'" + key + "' needs one value");
    return v[0];
  }

  NaturalParam eta(const std::string& key, std::string_view value, int line) const {
    std::vector<double> c;
    for (auto tok : tokens(value)) {
      auto v = parse_double(tok);
      if (!v) error(line, "bad number '" + std::string(tok) + "' for '" + key + "'");
      c.push_back(*v);
    }
    if (c.size() == 1) return NaturalParam(c[0]);
    if (c.size() == 2) return NaturalParam(c[0], c[1]);
    error(line, "'" + key + "' needs 1 or 2 components");
  }

  NaturalParam eta(const std::string& key) const {
    const auto& e = entry(key);
    return eta(key, e.value, e.line);
  }

  std::vector<bool> bools(const std::string& key, std::size_t expected) const {
    const auto& e = entry(key);
    std::vector<bool> out;
    for (auto tok : tokens(e.value)) {
      if (tok == "0") out.push_back(false);
      else if (tok == "1") out.push_back(true);
      else error(e.line, "flags must be 0 or 1");
    }
    if (out.size() != expected) error(e.line, "'" + key + "' has the wrong number of flags");
    return out;
  }

  FamilySpec family(std::string_view value, int line) const {
    try {
      return FamilySpec::parse(value);
    } catch (const Error& ex) {
      error(line, ex.what());
    }
  }

  int line(const std::string& key) const { return entry(key).line; }

  [[noreturn]] void error(int line, const std::string& what) const {
    fail(ErrorCode::Parse, source_ + ":" + std::to_string(line) + ": " + what);
  }

private:
  struct Entry {
    std::string value;
    int line = 0;
  };

  const Entry& entry(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) fail(ErrorCode::Parse, source_ + ": missing key '" + key + "'");
    return it->second;
  }

  std::string source_;
  std::map<std::string, Entry> entries_;
};

double scalar_input(std::span<const double> x) {
  if (x.size() != 1) fail(ErrorCode::InvalidArgument, "model expects one feature per row");
  return x[0];
}

}  // namespace

std::string model_type(const AnyModel& model) {
  return std::visit(Overloaded{
                        [](const BinaryModel&) { return std::string("binary"); },
                        [](const MulticlassModel&) { return std::string("multiclass"); },
                        [](const ProductModel&) { return std::string("product"); },
                        [](const GaussianClassModel& m) {
                          return std::string(m.pooled ? "lda" : "qda");
                        },
                        [](const LogisticModel&) { return std::string("logistic"); },
                    },
                    model);
}

int model_classes(const AnyModel& model) {
  return std::visit(Overloaded{
                        [](const BinaryModel&) { return 2; },
                        [](const auto& m) { return m.classes(); },
                    },
                    model);
}

std::size_t model_dims(const AnyModel& model) {
  if (auto p = std::get_if<ProductModel>(&model)) return p->dims();
  return 1;
}

std::vector<double> model_posteriors(const AnyModel& model, std::span<const double> x) {
  return std::visit(
      Overloaded{
          [&](const BinaryModel& m) {
            const double p1 = m.posterior(scalar_input(x));
            return std::vector<double>{1.0 - p1, p1};
          },
          [&](const MulticlassModel& m) { return m.posteriors(scalar_input(x)); },
          [&](const ProductModel& m) {
            if (x.size() != m.dims())
              fail(ErrorCode::InvalidArgument, "model expects " + std::to_string(m.dims()) +
                                                   " features per row");
            return m.posteriors(x);
          },
          [&](const GaussianClassModel& m) { return gaussian_posteriors(m, scalar_input(x)); },
          [&](const LogisticModel& m) { return logistic_posteriors(m, scalar_input(x)); },
      },
      model);
}

AnyModel fit_model(Method method, std::span<const FamilySpec> specs, const Dataset& data) {
  if (data.size() == 0) fail(ErrorCode::InvalidArgument, "no training rows");
  int classes = 0;
  for (int y : data.labels) {
    if (y < 0) fail(ErrorCode::InvalidArgument, "class labels must be >= 0");
    classes = std::max(classes, y + 1);
  }
  if (classes < 2) fail(ErrorCode::InvalidArgument, "need at least two classes");
  if (method != Method::Efda && data.dims != 1)
    fail(ErrorCode::InvalidArgument,
         std::string(method_name(method)) + " supports a single feature only");
  const std::vector<double>& x = data.features;
  const std::vector<int>& y = data.labels;

  auto single_spec = [&]() -> FamilySpec {
    if (specs.size() != 1) fail(ErrorCode::InvalidArgument, "expected exactly one family");
    return specs[0];
  };
  auto scalar_efda = [&](const FamilySpec& spec) -> AnyModel {
    if (classes == 2) return fit_binary(spec, x, y);
    return fit_multiclass(spec, x, y, classes);
  };

  switch (method) {
    case Method::Efda: {
      if (data.dims == 1) return scalar_efda(single_spec());
      std::vector<FamilySpec> per_feature;
      if (specs.size() == 1) per_feature.assign(data.dims, specs[0]);
      else if (specs.size() == data.dims) per_feature.assign(specs.begin(), specs.end());
      else fail(ErrorCode::InvalidArgument, "need one family per feature or a single family");
      return fit_product(per_feature, data, classes);
    }
    case Method::EfdaEstimatedShape:
    case Method::EfdaPooledShape: {
      if (!specs.empty() && single_spec().kind() != FamilyKind::WeibullKnownShape)
        fail(ErrorCode::InvalidArgument, "shape estimation needs a weibull family");
      const double k = method == Method::EfdaEstimatedShape ? fit_weibull_shape(x, y).shape
                                                            : fit_weibull_shape(x).shape;
      return scalar_efda(FamilySpec::weibull(k));
    }
    case Method::Lda:
      return fit_lda(x, y, classes);
    case Method::Qda:
      return fit_qda(x, y, classes);
    case Method::Lr:
      return fit_logistic(x, y, classes);
  }
  fail(ErrorCode::InvalidArgument, "unknown method");
}

std::string serialize_model(const AnyModel& model) {
  Writer w;
  w.put("type", model_type(model));
  std::visit(
      Overloaded{
          [&](const BinaryModel& m) {
            w.put("family", m.spec().name());
            w.put("alpha", format_double(m.alpha()));
            w.put("eta.0", eta_text(m.eta0()));
            w.put("eta.1", eta_text(m.eta1()));
            w.put("degenerate", flags({m.degenerate(0), m.degenerate(1)}));
          },
          [&](const MulticlassModel& m) {
            w.put("family", m.spec().name());
            w.put("priors", join(m.priors()));
            for (int k = 0; k < m.classes(); ++k)
              w.put("eta." + std::to_string(k), eta_text(m.etas()[static_cast<std::size_t>(k)]));
            w.put("degenerate", flags(m.degenerate()));
          },
          [&](const ProductModel& m) {
            std::string fams;
            for (std::size_t j = 0; j < m.dims(); ++j)
              fams += (j ? "; " : "") + m.specs()[j].name();
            w.put("families", fams);
            w.put("priors", join(m.priors()));
            for (int k = 0; k < m.classes(); ++k) {
              const auto kk = static_cast<std::size_t>(k);
              std::string row;
              for (std::size_t j = 0; j < m.dims(); ++j)
                row += (j ? "; " : "") + eta_text(m.etas()[kk][j]);
              w.put("eta." + std::to_string(k), row);
              w.put("degenerate." + std::to_string(k), flags(m.degenerate()[kk]));
            }
          },
          [&](const GaussianClassModel& m) {
            w.put("priors", join(m.priors));
            w.put("means", join(m.means));
            w.put("variances", join(m.variances));
            w.put("degenerate", m.degenerate ? "1" : "0");
          },
          [&](const LogisticModel& m) {
            w.put("classes", std::to_string(m.classes()));
            for (std::size_t k = 0; k < m.coef.size(); ++k)
              w.put("coef." + std::to_string(k + 1), join(m.coef[k]));
            w.put("converged", m.converged ? "1" : "0");
            w.put("iterations", std::to_string(m.iterations));
            w.put("grad_norm", format_double(m.grad_norm));
          },
      },
      model);
  return w.str();
}

AnyModel parse_model(std::string_view text, const std::string& source) {
  const Reader r(text, source);
  const std::string& type = r.text("type");
  try {
    if (type == "binary") {
      const auto fam = r.family(r.text("family"), r.line("family"));
      const auto deg = r.bools("degenerate", 2);
      return BinaryModel(fam, r.number("alpha"), r.eta("eta.0"), r.eta("eta.1"),
                         {deg[0], deg[1]});
    }
    if (type == "multiclass") {
      const auto fam = r.family(r.text("family"), r.line("family"));
      auto priors = r.numbers("priors");
      std::vector<NaturalParam> etas;
      for (std::size_t k = 0; k < priors.size(); ++k) etas.push_back(r.eta("eta." + std::to_string(k)));
      auto deg = r.bools("degenerate", priors.size());
      return MulticlassModel(fam, std::move(priors), std::move(etas), std::move(deg));
    }
    if (type == "product") {
      std::vector<FamilySpec> specs;
      for (auto f : tokens(r.text("families"), ';')) specs.push_back(r.family(f, r.line("families")));
      auto priors = r.numbers("priors");
      std::vector<std::vector<NaturalParam>> etas;
      std::vector<std::vector<bool>> deg;
      for (std::size_t k = 0; k < priors.size(); ++k) {
        const std::string key = "eta." + std::to_string(k);
        std::vector<NaturalParam> row;
        for (auto part : tokens(r.text(key), ';')) row.push_back(r.eta(key, part, r.line(key)));
        if (row.size() != specs.size()) r.error(r.line(key), "one parameter per feature required");
        etas.push_back(std::move(row));
        deg.push_back(r.bools("degenerate." + std::to_string(k), specs.size()));
      }
      return ProductModel(std::move(specs), std::move(priors), std::move(etas), std::move(deg));
    }
    if (type == "lda" || type == "qda") {
      GaussianClassModel m;
      m.pooled = type == "lda";
      m.priors = r.numbers("priors");
      m.means = r.numbers("means");
      m.variances = r.numbers("variances");
      m.degenerate = r.bools("degenerate", 1)[0];
      const auto K = m.priors.size();
      if (K < 2 || m.means.size() != K || m.variances.size() != K)
        r.error(r.line("priors"), "priors, means and variances need one value per class");
      for (double v : m.variances)
        if (!(v > 0.0)) r.error(r.line("variances"), "variances must be positive");
      return m;
    }
    if (type == "logistic") {
      LogisticModel m;
      const double K = r.number("classes");
      if (!(K >= 2 && K == static_cast<int>(K))) r.error(r.line("classes"), "classes must be >= 2");
      for (int k = 1; k < static_cast<int>(K); ++k) {
        const std::string key = "coef." + std::to_string(k);
        const auto c = r.numbers(key);
        if (c.size() != 2) r.error(r.line(key), "'" + key + "' needs intercept and slope");
        m.coef.push_back({c[0], c[1]});
      }
      m.converged = r.bools("converged", 1)[0];
      m.iterations = static_cast<int>(r.number("iterations"));
      m.grad_norm = r.number("grad_norm");
      return m;
    }
  } catch (const Error& ex) {
    if (ex.code() == ErrorCode::Parse) throw;
    fail(ErrorCode::Parse, source + ": " + ex.what());
  }
  r.error(r.line("type"), "unknown model type '" + type + "'");
}

}  // namespace efda
