#include "gxe/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gxe/errors.hpp"

namespace gxe::config {

namespace {

struct Field {
  std::string section, key;
  std::function<std::string()> get;
  std::function<void(const std::string&)> set;
};

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T parse(const std::string& text, const std::string& where) {
  try {
    return boost::lexical_cast<T>(boost::algorithm::trim_copy(text));
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError("invalid value '" + text + "' for " + where);
  }
}

bool parse_bool(const std::string& text, const std::string& where) {
  const std::string t = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(text));
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("invalid boolean '" + text + "' for " + where);
}

std::vector<Field> fields(RunConfig& c) {
  std::vector<Field> f;
  auto num = [&f](std::string sec, std::string key, auto& ref) {
    using T = std::remove_reference_t<decltype(ref)>;
    const std::string where = sec + "." + key;
    f.push_back({sec, key,
                 [&ref] {
                   if constexpr (std::is_floating_point_v<T>) return real(ref);
                   else return std::to_string(ref);
                 },
                 [&ref, where](const std::string& s) { ref = parse<T>(s, where); }});
  };
  auto str = [&f](std::string sec, std::string key, std::string& ref) {
    f.push_back({sec, key, [&ref] { return ref; }, [&ref](const std::string& s) { ref = boost::algorithm::trim_copy(s); }});
  };
  f.push_back({"model", "method", [&c] { return std::string(model::method_name(c.method)); },
               [&c](const std::string& s) { c.method = model::parse_method(boost::algorithm::trim_copy(s)); }});
  f.push_back({"model", "methods",
               [&c] {
                 std::string out;
                 for (auto m : c.methods) out += (out.empty() ? "" : ",") + std::string(model::method_name(m));
                 return out;
               },
               [&c](const std::string& s) { c.methods = parse_method_list(s); }});
  num("model", "degree", c.degree);
  num("model", "knots", c.knots);

  num("chain", "iterations", c.chain.iterations);
  num("chain", "burn_in", c.chain.burn_in);
  num("chain", "thin", c.chain.thin);
  num("chain", "chains", c.chain.n_chains);
  num("chain", "seed", c.chain.seed);
  num("chain", "resync_every", c.chain.resync_every);

  auto& h = c.hyper;
  num("prior", "a_v", h.a_v);
  num("prior", "b_v", h.b_v);
  num("prior", "a_c", h.a_c);
  num("prior", "b_c", h.b_c);
  num("prior", "a_e", h.a_e);
  num("prior", "b_e", h.b_e);
  num("prior", "r_v", h.r_v);
  num("prior", "w_v", h.w_v);
  num("prior", "r_c", h.r_c);
  num("prior", "w_c", h.w_c);
  num("prior", "r_e", h.r_e);
  num("prior", "w_e", h.w_e);
  num("prior", "s", h.s);
  num("prior", "h", h.h);
  num("prior", "prior_var_eta", h.prior_var_eta);
  num("prior", "prior_var_alpha", h.prior_var_alpha);
  num("prior", "prior_var_zeta0", h.prior_var_zeta0);

  str("data", "path", c.data_path);
  str("data", "genotype_path", c.genotype_path);
  num("data", "example", c.example);
  num("data", "n", c.n);
  num("data", "p", c.p);
  num("data", "test_n", c.test_n);
  num("data", "rho", c.sim.rho);
  num("data", "w_rho", c.sim.w_rho);
  num("data", "e_prob", c.sim.e_prob);
  num("data", "noise_sd", c.sim.noise_sd);
  num("data", "ld_q1", c.ld.q1);
  num("data", "ld_q2", c.ld.q2);
  num("data", "ld_r", c.ld.r);

  num("study", "replicates", c.replicates);
  num("study", "threads", c.threads);
  f.push_back({"study", "psrf_gate", [&c] { return std::string(c.psrf_gate ? "true" : "false"); },
               [&c](const std::string& s) { c.psrf_gate = parse_bool(s, "study.psrf_gate"); }});
  num("study", "psrf_cutoff", c.psrf_cutoff);

  str("output", "dir", c.out_dir);
  return f;
}

}  // namespace

std::vector<model::Method> parse_method_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::is_any_of(","));
  std::vector<model::Method> out;
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (!p.empty()) out.push_back(model::parse_method(p));
  }
  if (out.empty()) throw ConfigError("method list is empty");
  return out;
}

void RunConfig::validate() const {
  splines::SplineConfig{degree, knots, 0.0, 1.0}.validate();
  chain.validate();
  hyper.validate();
  if (methods.empty()) throw ConfigError("method list is empty");
  if (example < 1 || example > 4) throw ConfigError("example must be 1, 2, 3 or 4");
  if (n < 1 || p < 1 || test_n < 1) throw ConfigError("n, p and test_n must be positive");
  if (replicates < 1) throw ConfigError("replicate count must be at least 1");
  if (threads < 0) throw ConfigError("thread count must be non-negative");
  if (!(psrf_cutoff >= 1.0)) throw ConfigError("PSRF cutoff must be at least 1");
  if (!(std::abs(sim.rho) < 1.0) || !(std::abs(sim.w_rho) < 1.0)) throw ConfigError("correlations must satisfy |rho| < 1");
  if (!(sim.e_prob >= 0.0 && sim.e_prob <= 1.0)) throw ConfigError("e_prob must lie in [0, 1]");
  if (!(sim.noise_sd >= 0.0)) throw ConfigError("noise_sd must be non-negative");
  ld.validate();
}

RunConfig load_config(const std::string& path, RunConfig base) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot read config " + path + ": " + e.message());
  }
  auto table = fields(base);
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("config key '" + section + "' must be inside a section");
    for (const auto& [key, value] : body) {
      bool found = false;
      for (auto& fld : table) {
        if (fld.section == section && fld.key == key) {
          fld.set(value.data());
          found = true;
          break;
        }
      }
      if (!found) throw ConfigError("unknown config key " + section + "." + key);
    }
  }
  return base;
}

std::string to_ini(const RunConfig& cfg) {
  RunConfig copy = cfg;
  std::ostringstream out;
  std::string current;
  for (const auto& fld : fields(copy)) {
    if (fld.section != current) {
      out << (current.empty() ? "" : "\n") << '[' << fld.section << "]\n";
      current = fld.section;
    }
    out << fld.key << " = " << fld.get() << '\n';
  }
  return out.str();
}

void save_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << to_ini(cfg);
}

}  // namespace gxe::config
