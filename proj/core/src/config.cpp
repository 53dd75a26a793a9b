#include "mtgan/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mtgan {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::size_t> parse_dims(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ','))
    if (!trim(cell).empty()) out.push_back(std::stoul(trim(cell)));
  return out;
}

std::string dims_to_string(const std::vector<std::size_t>& d) {
  std::string out;
  for (std::size_t i = 0; i < d.size(); ++i)
    out += (i ? "," : "") + std::to_string(d[i]);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: " + key + " expects true/false, got '" + v + "'");
}

Activation parse_activation(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "relu") return Activation::Relu;
  throw std::invalid_argument("config: unknown activation '" + s + "'");
}

}  // namespace

void RunConfig::validate() const {
  hp.validate();
  if (dist.family != TaskFamily::FileBacked && dist.num_tasks < 1)
    throw std::invalid_argument("config: num_tasks must be >= 1");
  if (dist.family == TaskFamily::FileBacked && dist.root.empty())
    throw std::invalid_argument("config: file_backed family requires task_root");
  if (hp.gen_spec.input_dim != dist.sample_dim() ||
      hp.gen_spec.output_dim != dist.sample_dim())
    throw std::invalid_argument("config: generator dims must match sample dim " +
                                std::to_string(dist.sample_dim()));
  if (hp.disc_spec.input_dim != dist.sample_dim() || hp.disc_spec.output_dim != 1)
    throw std::invalid_argument("config: discriminator must map sample dim to 1");
}

std::string RunConfig::serialize() const {
  std::map<std::string, std::string> kv;
  kv["alpha"] = fmt_double(hp.alpha);
  kv["beta"] = fmt_double(hp.beta);
  kv["lambda_cyc"] = fmt_double(hp.weights.lambda_cyc);
  kv["lambda_idt"] = fmt_double(hp.weights.lambda_idt);
  kv["inner_iters"] = std::to_string(hp.inner_iters);
  kv["second_order"] = hp.second_order ? "true" : "false";
  kv["seed"] = std::to_string(hp.seed);
  kv["alternating"] = hp.alternating ? "true" : "false";
  kv["grad_clip"] = fmt_double(hp.grad_clip);
  kv["skip_diverged"] = hp.skip_diverged ? "true" : "false";
  kv["max_skip_fraction"] = fmt_double(hp.max_skip_fraction);
  kv["shots"] = std::to_string(hp.episode.shots);
  kv["query_size"] = std::to_string(hp.episode.query_size);
  kv["meta_batch"] = std::to_string(hp.episode.meta_batch);
  kv["num_train_tasks"] = std::to_string(hp.episode.num_train_tasks);
  kv["meta_batches"] = std::to_string(hp.episode.meta_batches);
  kv["gen_hidden"] = dims_to_string(hp.gen_spec.hidden_dims);
  kv["disc_hidden"] = dims_to_string(hp.disc_spec.hidden_dims);
  kv["activation"] = hp.gen_spec.activation == Activation::Tanh ? "tanh" : "relu";
  kv["family"] = to_string(dist.family);
  kv["task_seed"] = std::to_string(dist.seed);
  kv["num_tasks"] = std::to_string(dist.num_tasks);
  kv["noise"] = fmt_double(dist.noise);
  kv["rot_range"] = fmt_double(dist.rot_range);
  kv["scale_min"] = fmt_double(dist.scale_min);
  kv["scale_max"] = fmt_double(dist.scale_max);
  kv["trans_range"] = fmt_double(dist.trans_range);
  kv["num_identities"] = std::to_string(dist.num_identities);
  kv["task_root"] = dist.root;
  std::string allowed;
  for (std::size_t i = 0; i < dist.allowed.size(); ++i)
    allowed += (i ? "," : "") + std::to_string(dist.allowed[i]);
  kv["allowed_tasks"] = allowed;
  kv["output_dir"] = output_dir;
  kv["checkpoint_every"] = std::to_string(checkpoint_every);
  kv["test_batches_disjoint"] = test_batches_disjoint ? "true" : "false";
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string config_digest_of(const std::string& text) {
  // FNV-1a 64-bit.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunConfig::digest() const { return config_digest_of(serialize()); }

RunConfig RunConfig::parse_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool dims_explicit = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value, got '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    try {
      if (key == "alpha") cfg.hp.alpha = std::stod(val);
      else if (key == "beta") cfg.hp.beta = std::stod(val);
      else if (key == "lambda_cyc") cfg.hp.weights.lambda_cyc = std::stod(val);
      else if (key == "lambda_idt") cfg.hp.weights.lambda_idt = std::stod(val);
      else if (key == "inner_iters") cfg.hp.inner_iters = std::stoul(val);
      else if (key == "second_order") cfg.hp.second_order = parse_bool(key, val);
      else if (key == "seed") cfg.hp.seed = std::stoull(val);
      else if (key == "alternating") cfg.hp.alternating = parse_bool(key, val);
      else if (key == "grad_clip") cfg.hp.grad_clip = std::stod(val);
      else if (key == "skip_diverged") cfg.hp.skip_diverged = parse_bool(key, val);
      else if (key == "max_skip_fraction") cfg.hp.max_skip_fraction = std::stod(val);
      else if (key == "shots") cfg.hp.episode.shots = std::stoul(val);
      else if (key == "query_size") cfg.hp.episode.query_size = std::stoul(val);
      else if (key == "meta_batch") cfg.hp.episode.meta_batch = std::stoul(val);
      else if (key == "num_train_tasks") cfg.hp.episode.num_train_tasks = std::stoul(val);
      else if (key == "meta_batches") cfg.hp.episode.meta_batches = std::stoul(val);
      else if (key == "gen_hidden") { cfg.hp.gen_spec.hidden_dims = parse_dims(val); dims_explicit = true; }
      else if (key == "disc_hidden") { cfg.hp.disc_spec.hidden_dims = parse_dims(val); dims_explicit = true; }
      else if (key == "activation") {
        cfg.hp.gen_spec.activation = parse_activation(val);
        cfg.hp.disc_spec.activation = cfg.hp.gen_spec.activation;
      }
      else if (key == "family") cfg.dist.family = task_family_from_string(val);
      else if (key == "task_seed") cfg.dist.seed = std::stoull(val);
      else if (key == "num_tasks") cfg.dist.num_tasks = std::stoul(val);
      else if (key == "noise") cfg.dist.noise = std::stod(val);
      else if (key == "rot_range") cfg.dist.rot_range = std::stod(val);
      else if (key == "scale_min") cfg.dist.scale_min = std::stod(val);
      else if (key == "scale_max") cfg.dist.scale_max = std::stod(val);
      else if (key == "trans_range") cfg.dist.trans_range = std::stod(val);
      else if (key == "num_identities") cfg.dist.num_identities = std::stoul(val);
      else if (key == "task_root") cfg.dist.root = val;
      else if (key == "allowed_tasks") {
        cfg.dist.allowed.clear();
        std::stringstream ss(val);
        std::string cell;
        while (std::getline(ss, cell, ','))
          if (!trim(cell).empty()) cfg.dist.allowed.push_back(std::stoi(trim(cell)));
      }
      else if (key == "output_dir") cfg.output_dir = val;
      else if (key == "checkpoint_every") cfg.checkpoint_every = std::stoul(val);
      else if (key == "test_batches_disjoint")
        cfg.test_batches_disjoint = parse_bool(key, val);
      else
        throw std::invalid_argument("config: unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("config: bad value for key '" + key + "': '" + val + "'");
    }
  }
  (void)dims_explicit;
  // Net in/out dims follow the task family.
  const std::size_t d = cfg.dist.sample_dim();
  cfg.hp.gen_spec.input_dim = d;
  cfg.hp.gen_spec.output_dim = d;
  cfg.hp.gen_spec.output = OutputActivation::Identity;
  cfg.hp.disc_spec.input_dim = d;
  cfg.hp.disc_spec.output_dim = 1;
  cfg.hp.disc_spec.output = OutputActivation::SigmoidProb;
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

}  // namespace mtgan
