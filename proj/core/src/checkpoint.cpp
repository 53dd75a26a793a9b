#include "mtgan/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mtgan {

namespace {

const char* act_name(Activation a) { return a == Activation::Tanh ? "tanh" : "relu"; }
const char* out_name(OutputActivation o) {
  return o == OutputActivation::Identity ? "identity" : "sigmoid";
}

void write_spec(std::ostream& os, const char* label, const NetSpec& s) {
  os << label << " " << s.input_dim << " ";
  for (std::size_t i = 0; i < s.hidden_dims.size(); ++i)
    os << (i ? "," : "") << s.hidden_dims[i];
  os << " " << s.output_dim << " " << act_name(s.activation) << " "
     << out_name(s.output) << "\n";
}

NetSpec read_spec(std::istream& is, const std::string& label) {
  std::string tag, hidden, act, out;
  NetSpec s;
  is >> tag >> s.input_dim >> hidden >> s.output_dim >> act >> out;
  if (tag != label) throw std::runtime_error("checkpoint: expected " + label + " line");
  std::stringstream ss(hidden);
  std::string cell;
  while (std::getline(ss, cell, ',')) s.hidden_dims.push_back(std::stoul(cell));
  s.activation = act == "tanh" ? Activation::Tanh : Activation::Relu;
  s.output = out == "identity" ? OutputActivation::Identity : OutputActivation::SigmoidProb;
  return s;
}

void write_values(std::ostream& os, const char* label, const ParamValues& p) {
  os << label << " " << p.entries.size() << "\n";
  char buf[64];
  for (const auto& [name, t] : p.entries) {
    os << name << " " << t.rows << " " << t.cols << "\n";
    for (std::size_t i = 0; i < t.data.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", t.data[i]);
      os << buf << (i + 1 == t.data.size() ? "" : " ");
    }
    os << "\n";
  }
}

ParamValues read_values(std::istream& is, const std::string& label) {
  std::string tag;
  std::size_t count = 0;
  is >> tag >> count;
  if (tag != label) throw std::runtime_error("checkpoint: expected " + label + " block");
  ParamValues p;
  for (std::size_t e = 0; e < count; ++e) {
    std::string name;
    std::size_t r = 0, c = 0;
    is >> name >> r >> c;
    Tensor t(r, c);
    for (auto& v : t.data)
      if (!(is >> v)) throw std::runtime_error("checkpoint: truncated array " + name);
    p.entries.emplace_back(name, std::move(t));
  }
  return p;
}

void write_adam(std::ostream& os, const char* label, const AdamState& a) {
  char buf[64];
  os << label << " " << a.t << " ";
  std::snprintf(buf, sizeof(buf), "%.17g", a.beta1);
  os << buf << " ";
  std::snprintf(buf, sizeof(buf), "%.17g", a.beta2);
  os << buf << " ";
  std::snprintf(buf, sizeof(buf), "%.17g", a.eps);
  os << buf << "\n";
  write_values(os, "m", a.m);
  write_values(os, "v", a.v);
}

AdamState read_adam(std::istream& is, const std::string& label) {
  std::string tag;
  AdamState a;
  is >> tag >> a.t >> a.beta1 >> a.beta2 >> a.eps;
  if (tag != label) throw std::runtime_error("checkpoint: expected " + label + " block");
  a.m = read_values(is, "m");
  a.v = read_values(is, "v");
  return a;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("checkpoint: cannot write " + path);
  os << "mtgan-checkpoint v" << ckpt.format_version << "\n";
  os << "step " << ckpt.state.step << "\n";
  os << "config_digest " << (ckpt.config_digest.empty() ? "-" : ckpt.config_digest)
     << "\n";
  write_spec(os, "gen_spec", ckpt.gen_spec);
  write_spec(os, "disc_spec", ckpt.disc_spec);
  write_values(os, "theta_g", ckpt.state.theta_g);
  write_values(os, "theta_d", ckpt.state.theta_d);
  write_adam(os, "adam_g", ckpt.state.adam_g);
  write_adam(os, "adam_d", ckpt.state.adam_d);
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  std::string magic, version;
  is >> magic >> version;
  if (magic != "mtgan-checkpoint" || version != "v1")
    throw std::runtime_error("checkpoint: unrecognized format in " + path);
  Checkpoint ckpt;
  std::string tag;
  is >> tag >> ckpt.state.step;
  if (tag != "step") throw std::runtime_error("checkpoint: expected step line");
  is >> tag >> ckpt.config_digest;
  if (tag != "config_digest")
    throw std::runtime_error("checkpoint: expected config_digest line");
  if (ckpt.config_digest == "-") ckpt.config_digest.clear();
  ckpt.gen_spec = read_spec(is, "gen_spec");
  ckpt.disc_spec = read_spec(is, "disc_spec");
  ckpt.state.theta_g = read_values(is, "theta_g");
  ckpt.state.theta_d = read_values(is, "theta_d");
  ckpt.state.adam_g = read_adam(is, "adam_g");
  ckpt.state.adam_d = read_adam(is, "adam_d");
  return ckpt;
}

void require_spec_match(const Checkpoint& ckpt, const NetSpec& gen, const NetSpec& disc) {
  if (!(ckpt.gen_spec == gen) || !(ckpt.disc_spec == disc))
    throw std::runtime_error(
        "checkpoint: network spec mismatch between checkpoint and configuration");
}

}  // namespace mtgan
