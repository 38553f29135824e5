#include "vecor/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vecor/error.hpp"

namespace vecor {

using nlohmann::json;

const char* sampler_kind_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::EulerODE: return "euler";
    case SamplerKind::Heun2ODE: return "heun2";
    case SamplerKind::EulerMaruyamaSDE: return "em";
  }
  return "?";
}

SamplerKind sampler_kind_from_name(const std::string& name) {
  if (name == "euler") return SamplerKind::EulerODE;
  if (name == "heun2") return SamplerKind::Heun2ODE;
  if (name == "em") return SamplerKind::EulerMaruyamaSDE;
  throw ConfigError("unknown sampler: " + name);
}

namespace {

json perturb_to_json(const PerturbSpec& p) {
  return json{{"operator", perturb_op_name(p.op)},
              {"space", space_name(p.space)},
              {"k", p.k_negatives},
              {"params",
               json{{"scale_min", p.crop.scale_min},
                    {"scale_max", p.crop.scale_max},
                    {"ar_min", p.crop.ar_min},
                    {"ar_max", p.crop.ar_max},
                    {"blur_k", p.blur.k},
                    {"blur_sigma", p.blur.sigma},
                    {"noise_base_scale", p.noise.base_scale},
                    {"jitter_delta", p.jitter.delta},
                    {"cutmix_alpha", p.cutmix_alpha}}}};
}

PerturbSpec perturb_from_json(const json& j) {
  PerturbSpec p;
  p.op = perturb_op_from_name(j.value("operator", "channel_shuffle"));
  p.space = space_from_name(j.value("space", "velocity"));
  p.k_negatives = j.value("k", 1);
  if (j.contains("params")) {
    const json& q = j.at("params");
    p.crop.scale_min = q.value("scale_min", p.crop.scale_min);
    p.crop.scale_max = q.value("scale_max", p.crop.scale_max);
    p.crop.ar_min = q.value("ar_min", p.crop.ar_min);
    p.crop.ar_max = q.value("ar_max", p.crop.ar_max);
    p.blur.k = q.value("blur_k", p.blur.k);
    p.blur.sigma = q.value("blur_sigma", p.blur.sigma);
    p.noise.base_scale = q.value("noise_base_scale", p.noise.base_scale);
    p.jitter.delta = q.value("jitter_delta", p.jitter.delta);
    p.cutmix_alpha = q.value("cutmix_alpha", p.cutmix_alpha);
  }
  return p;
}

json config_to_json_obj(const RunConfig& c) {
  return json{
      {"dataset", c.dataset},
      {"dataset_size", c.dataset_size},
      {"schedule", c.schedule},
      {"hidden", c.hidden},
      {"fourier_bands", c.fourier_bands},
      {"optimizer",
       json{{"kind", opt_kind_name(c.optim.kind)},
            {"lr", c.optim.lr},
            {"beta1", c.optim.beta1},
            {"beta2", c.optim.beta2},
            {"eps", c.optim.eps}}},
      {"vecor",
       json{{"enabled", c.vecor.enabled},
            {"lambda", c.vecor.lambda},
            {"k", c.vecor.k},
            {"perturb", perturb_to_json(c.vecor.perturb)}}},
      {"sampler",
       json{{"kind", sampler_kind_name(c.sampler.kind)},
            {"nfe", c.sampler.nfe},
            {"w", c.sampler.w == DiffusionTag::SigmaT ? "sigma" : "zero"},
            {"delta_clip", c.sampler.delta_clip}}},
      {"seeds", c.seeds},
      {"steps", c.steps},
      {"batch_size", c.batch_size},
      {"checkpoint_every", c.checkpoint_every},
      {"out_dir", c.out_dir}};
}

RunConfig config_from_json_obj(const json& j) {
  RunConfig c;
  c.dataset = j.value("dataset", c.dataset);
  c.dataset_size = j.value("dataset_size", c.dataset_size);
  c.schedule = j.value("schedule", c.schedule);
  c.hidden = j.value("hidden", c.hidden);
  c.fourier_bands = j.value("fourier_bands", c.fourier_bands);
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    c.optim.kind = opt_kind_from_name(o.value("kind", "adam"));
    c.optim.lr = o.value("lr", c.optim.lr);
    c.optim.beta1 = o.value("beta1", c.optim.beta1);
    c.optim.beta2 = o.value("beta2", c.optim.beta2);
    c.optim.eps = o.value("eps", c.optim.eps);
  }
  if (j.contains("vecor")) {
    const json& v = j.at("vecor");
    c.vecor.enabled = v.value("enabled", false);
    c.vecor.lambda = v.value("lambda", c.vecor.lambda);
    c.vecor.k = v.value("k", c.vecor.k);
    if (v.contains("perturb")) c.vecor.perturb = perturb_from_json(v.at("perturb"));
    c.vecor.perturb.k_negatives = c.vecor.k;
  }
  if (j.contains("sampler")) {
    const json& s = j.at("sampler");
    c.sampler.kind = sampler_kind_from_name(s.value("kind", "em"));
    c.sampler.nfe = s.value("nfe", c.sampler.nfe);
    c.sampler.w = s.value("w", "sigma") == std::string("zero") ? DiffusionTag::Zero
                                                               : DiffusionTag::SigmaT;
    c.sampler.delta_clip = s.value("delta_clip", c.sampler.delta_clip);
  }
  c.seeds = j.value("seeds", c.seeds);
  c.steps = j.value("steps", c.steps);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
  c.out_dir = j.value("out_dir", c.out_dir);
  return c;
}

}  // namespace

void validate_run_config(const RunConfig& cfg) {
  dataset_from_name(cfg.dataset);
  if (cfg.schedule != "linear")
    throw ConfigError("config: unknown schedule '" + cfg.schedule + "'");
  if (cfg.batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
  if (cfg.steps < 0) throw ConfigError("config: steps must be >= 0");
  if (cfg.dataset_size < std::size_t(cfg.batch_size))
    throw ConfigError("config: dataset_size smaller than batch_size");
  if (cfg.seeds.empty()) throw ConfigError("config: need at least one seed");
  if (cfg.sampler.nfe < 1) throw ConfigError("config: nfe must be >= 1");
  if (!(cfg.sampler.delta_clip > 0 && cfg.sampler.delta_clip < 0.5))
    throw ConfigError("config: require 0 < delta_clip < 0.5");
  if (cfg.sampler.kind == SamplerKind::Heun2ODE && cfg.sampler.nfe % 2 != 0)
    throw ConfigError("config: heun2 needs an even NFE budget");
  if (cfg.vecor.enabled) {
    VecorConfig vc{cfg.vecor.lambda, cfg.vecor.k, /*allow_lambda_zero=*/true};
    validate_config(vc);
    validate_perturb_spec(cfg.vecor.perturb);
    if (cfg.vecor.perturb.k_negatives != cfg.vecor.k)
      throw ConfigError("config: vecor.k and perturb.k disagree");
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return run_config_from_json(ss.str());
}

std::string run_config_to_json(const RunConfig& cfg) {
  return config_to_json_obj(cfg).dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  try {
    return config_from_json_obj(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::string s = run_config_to_json(cfg);
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

bool differ_only_in_vecor(const RunConfig& a, const RunConfig& b) {
  json ja = config_to_json_obj(a);
  json jb = config_to_json_obj(b);
  ja.erase("vecor");
  jb.erase("vecor");
  return ja == jb;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  json j{{"config_hash", m.config_hash},
         {"artifacts", m.artifacts},
         {"wall_seconds", m.wall_seconds},
         {"build_id", m.build_id},
         {"status", m.status}};
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw IoError("cannot open for write: " + tmp);
    f << j.dump(2) << "\n";
    if (!f) throw IoError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace vecor
