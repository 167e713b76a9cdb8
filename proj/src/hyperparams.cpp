#include "gbgcn/hyperparams.hpp"

#include "gbgcn/types.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace gbgcn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "1" || s == "true") {
    out = true;
  } else if (s == "0" || s == "false") {
    out = false;
  } else {
    return false;
  }
  return true;
}

template <typename Enum>
bool parse_enum(const std::string& s, Enum& out,
                std::initializer_list<std::pair<const char*, Enum>> names) {
  for (const auto& [name, value] : names) {
    if (s == name) {
      out = value;
      return true;
    }
  }
  return false;
}

}  // namespace

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::gbgcn: return "gbgcn";
    case ModelKind::gbmf: return "gbmf";
    case ModelKind::mf: return "mf";
  }
  return "?";
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::leaky_relu: return "leaky_relu";
    case Activation::identity: return "identity";
    case Activation::tanh: return "tanh";
  }
  return "?";
}

std::vector<std::string> Hyperparams::validate() const {
  std::vector<std::string> errors;
  const auto require = [&](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };
  require(dim >= 1, "dim must be >= 1");
  require(layers >= 0, "layers must be >= 0");
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
  require(beta >= 0.0, "beta must be >= 0");
  require(leaky_slope >= 0.0, "leaky_slope must be >= 0");
  require(neg_ratio >= 1, "neg_ratio must be >= 1");
  require(l2 >= 0.0, "l2 must be >= 0");
  require(social_reg >= 0.0, "social_reg must be >= 0");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(pretrain_epochs >= 0, "pretrain_epochs must be >= 0");
  require(pretrain_patience >= 0, "pretrain_patience must be >= 0");
  require(adam_lr >= 0.0, "adam_lr must be >= 0");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "adam_beta1 must lie in [0, 1)");
  require(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam_beta2 must lie in [0, 1)");
  require(adam_eps > 0.0, "adam_eps must be > 0");
  require(epochs >= 0, "epochs must be >= 0");
  require(sgd_lr >= 0.0, "sgd_lr must be >= 0");
  require(!eval_k.empty(), "eval_k must not be empty");
  for (int k : eval_k) require(k >= 1, "eval_k entries must be >= 1");
  require(eval_negatives >= 1, "eval_negatives must be >= 1");
  require(threads >= 1, "threads must be >= 1");
  return errors;
}

std::map<std::string, std::string> Hyperparams::to_map() const {
  std::map<std::string, std::string> m;
  m["model"] = to_string(model);
  m["dim"] = std::to_string(dim);
  m["layers"] = std::to_string(layers);
  m["alpha"] = format_double(alpha);
  m["beta"] = format_double(beta);
  m["activation"] = to_string(activation);
  m["leaky_slope"] = format_double(leaky_slope);
  m["score_semantics"] = score_semantics == ScoreSemantics::composite ? "composite" : "role";
  m["renormalize_alpha"] = renormalize_alpha ? "true" : "false";
  m["exclude_failed_participants"] = exclude_failed_participants ? "true" : "false";
  m["mf_roles"] = mf_roles == MfRoles::both ? "both" : "initiator";
  m["neg_ratio"] = std::to_string(neg_ratio);
  m["l2"] = format_double(l2);
  m["social_reg"] = format_double(social_reg);
  m["batch_size"] = std::to_string(batch_size);
  m["pretrain_epochs"] = std::to_string(pretrain_epochs);
  m["pretrain_patience"] = std::to_string(pretrain_patience);
  m["adam_lr"] = format_double(adam_lr);
  m["adam_beta1"] = format_double(adam_beta1);
  m["adam_beta2"] = format_double(adam_beta2);
  m["adam_eps"] = format_double(adam_eps);
  m["epochs"] = std::to_string(epochs);
  m["sgd_lr"] = format_double(sgd_lr);
  std::string ks;
  for (std::size_t i = 0; i < eval_k.size(); ++i) ks += (i ? "," : "") + std::to_string(eval_k[i]);
  m["eval_k"] = ks;
  m["eval_negatives"] = std::to_string(eval_negatives);
  m["threads"] = std::to_string(threads);
  m["seed"] = std::to_string(seed);
  return m;
}

Hyperparams apply_config(Hyperparams hp, const ConfigMap& values, std::vector<std::string>& errors) {
  using Setter = std::function<bool(const std::string&)>;
  const auto num = [](auto& field) -> Setter {
    return [&field](const std::string& s) { return parse_number(s, field); };
  };
  const auto flag = [](bool& field) -> Setter {
    return [&field](const std::string& s) { return parse_bool(s, field); };
  };
  const std::map<std::string, Setter> setters{
      {"model",
       [&](const std::string& s) {
         return parse_enum(s, hp.model, {{"gbgcn", ModelKind::gbgcn},
                                         {"gbmf", ModelKind::gbmf},
                                         {"mf", ModelKind::mf}});
       }},
      {"dim", num(hp.dim)},
      {"layers", num(hp.layers)},
      {"alpha", num(hp.alpha)},
      {"beta", num(hp.beta)},
      {"activation",
       [&](const std::string& s) {
         return parse_enum(s, hp.activation, {{"leaky_relu", Activation::leaky_relu},
                                              {"identity", Activation::identity},
                                              {"tanh", Activation::tanh}});
       }},
      {"leaky_slope", num(hp.leaky_slope)},
      {"score_semantics",
       [&](const std::string& s) {
         return parse_enum(s, hp.score_semantics, {{"composite", ScoreSemantics::composite},
                                                   {"role", ScoreSemantics::role}});
       }},
      {"role_scores",
       [&](const std::string& s) {
         bool on = false;
         if (!parse_bool(s, on)) return false;
         hp.score_semantics = on ? ScoreSemantics::role : ScoreSemantics::composite;
         return true;
       }},
      {"renormalize_alpha", flag(hp.renormalize_alpha)},
      {"exclude_failed_participants", flag(hp.exclude_failed_participants)},
      {"mf_roles",
       [&](const std::string& s) {
         return parse_enum(s, hp.mf_roles, {{"both", MfRoles::both}, {"initiator", MfRoles::initiator}});
       }},
      {"neg_ratio", num(hp.neg_ratio)},
      {"l2", num(hp.l2)},
      {"social_reg", num(hp.social_reg)},
      {"batch_size", num(hp.batch_size)},
      {"pretrain_epochs", num(hp.pretrain_epochs)},
      {"pretrain_patience", num(hp.pretrain_patience)},
      {"adam_lr", num(hp.adam_lr)},
      {"adam_beta1", num(hp.adam_beta1)},
      {"adam_beta2", num(hp.adam_beta2)},
      {"adam_eps", num(hp.adam_eps)},
      {"epochs", num(hp.epochs)},
      {"sgd_lr", num(hp.sgd_lr)},
      {"eval_k",
       [&](const std::string& s) {
         std::vector<int> ks;
         std::stringstream ss(s);
         std::string part;
         while (std::getline(ss, part, ',')) {
           int k;
           if (!parse_number(trim(part), k)) return false;
           ks.push_back(k);
         }
         hp.eval_k = std::move(ks);
         return true;
       }},
      {"eval_negatives", num(hp.eval_negatives)},
      {"threads", num(hp.threads)},
      {"seed", num(hp.seed)},
  };
  for (const auto& [key, value] : values) {
    const auto it = setters.find(key);
    if (it == setters.end()) {
      errors.push_back("unknown key '" + key + "'");
    } else if (!it->second(value)) {
      errors.push_back("invalid value '" + value + "' for '" + key + "'");
    }
  }
  return hp;
}

ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  ConfigMap out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path.string(), lineno, "expected key = value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace gbgcn
