#pragma once

// Scene description parser. One directive per line, '#' starts a comment:
//
//   size W H                         base render resolution
//   lambda MIN MAX SAMPLES           wavelength grid (nm), SAMPLES >= 16
//   mode eq1|eq3
//   reflectance CURVE                shared material curve
//   material NAME scale=S [curve=CURVE]
//   texture amp=A freq=F             material micro-texture
//   background NAME
//   region SHAPE NAME key=val...     material paint, applied in order
//   rho SHAPE v=V key=val...         Fresnel coefficient paint
//   illum variant=a|b|ab profile=PROFILE spectrum=CURVE
//   gt SHAPE LABEL key=val...        ground-truth labels, applied in order
//
// CURVE   := flat:v | gauss:center,width,peak,floor | ramp:v0,v1
// PROFILE := uniform:v | rampx:v0,v1 | rampy:v0,v1 | stepx:x0,width,v0,v1
//          | blob:cx,cy,s,peak | disc:cx,cy,r,width,peak | ring:cx,cy,r,s,peak
// SHAPE   := all | hstep | vstep | rect | disc | ring, with keys
//            x0 y0 x1 y1 cx cy r r0 r1 width as each shape needs
// LABEL   := darkness | well_lit | light_effects | high_light

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "n2d3/km_synth.hpp"

namespace n2d3 {

class SceneParseError : public Error {
 public:
  SceneParseError(const std::string& file, int line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

namespace detail {

struct SceneCursor {
  std::string file;
  int line = 0;
  [[noreturn]] void fail(const std::string& what) const {
    throw SceneParseError(file, line, what);
  }
};

inline double parse_num(const SceneCursor& cur, const std::string& tok) {
  const char* b = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(b, &end);
  if (end == b || *end != '\0') cur.fail("bad number '" + tok + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline SpectralCurve parse_curve(const SceneCursor& cur,
                                 const std::string& spec) {
  const size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::vector<std::string> ps;
  if (colon != std::string::npos) ps = split(spec.substr(colon + 1), ',');
  SpectralCurve c;
  if (kind == "flat") {
    if (ps.size() != 1) cur.fail("flat curve wants 1 parameter");
    c.kind = SpectralCurve::Kind::kFlat;
    c.a = parse_num(cur, ps[0]);
  } else if (kind == "gauss") {
    if (ps.size() != 4) cur.fail("gauss curve wants center,width,peak,floor");
    c.kind = SpectralCurve::Kind::kGauss;
    c.center = parse_num(cur, ps[0]);
    c.width = parse_num(cur, ps[1]);
    c.a = parse_num(cur, ps[2]);
    c.b = parse_num(cur, ps[3]);
    if (c.width <= 0) cur.fail("gauss curve width must be > 0");
  } else if (kind == "ramp") {
    if (ps.size() != 2) cur.fail("ramp curve wants v0,v1");
    c.kind = SpectralCurve::Kind::kRamp;
    c.a = parse_num(cur, ps[0]);
    c.b = parse_num(cur, ps[1]);
  } else {
    cur.fail("unknown curve kind '" + kind + "'");
  }
  return c;
}

inline Profile parse_profile(const SceneCursor& cur, const std::string& spec) {
  const size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::vector<std::string> ps;
  if (colon != std::string::npos) ps = split(spec.substr(colon + 1), ',');
  auto num = [&](size_t i) { return parse_num(cur, ps[i]); };
  Profile p;
  if (kind == "uniform") {
    if (ps.size() != 1) cur.fail("uniform profile wants 1 parameter");
    p.kind = Profile::Kind::kUniform;
    p.v0 = num(0);
  } else if (kind == "rampx" || kind == "rampy") {
    if (ps.size() != 2) cur.fail(kind + " profile wants v0,v1");
    p.kind = kind == "rampx" ? Profile::Kind::kRampX : Profile::Kind::kRampY;
    p.v0 = num(0);
    p.v1 = num(1);
  } else if (kind == "stepx") {
    if (ps.size() != 4) cur.fail("stepx profile wants x0,width,v0,v1");
    p.kind = Profile::Kind::kStepX;
    p.x0 = num(0);
    p.width = num(1);
    p.v0 = num(2);
    p.v1 = num(3);
  } else if (kind == "blob") {
    if (ps.size() != 4) cur.fail("blob profile wants cx,cy,s,peak");
    p.kind = Profile::Kind::kBlob;
    p.cx = num(0);
    p.cy = num(1);
    p.s = num(2);
    p.peak = num(3);
    if (p.s <= 0) cur.fail("blob spread must be > 0");
  } else if (kind == "disc") {
    if (ps.size() != 5) cur.fail("disc profile wants cx,cy,r,width,peak");
    p.kind = Profile::Kind::kDisc;
    p.cx = num(0);
    p.cy = num(1);
    p.r = num(2);
    p.width = num(3);
    p.peak = num(4);
  } else if (kind == "ring") {
    if (ps.size() != 5) cur.fail("ring profile wants cx,cy,r,s,peak");
    p.kind = Profile::Kind::kRing;
    p.cx = num(0);
    p.cy = num(1);
    p.r = num(2);
    p.s = num(3);
    p.peak = num(4);
    if (p.s <= 0) cur.fail("ring spread must be > 0");
  } else {
    cur.fail("unknown profile kind '" + kind + "'");
  }
  return p;
}

inline Coverage parse_coverage(const SceneCursor& cur, const std::string& shape,
                               const std::map<std::string, double>& kv) {
  Coverage c;
  auto want = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end())
      cur.fail(shape + " needs " + key + "=");
    return it->second;
  };
  auto opt = [&](const char* key, double dflt) {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
  };
  if (shape == "all") {
    c.shape = Coverage::Shape::kAll;
  } else if (shape == "hstep") {
    c.shape = Coverage::Shape::kHStep;
    c.x0 = want("x0");
    c.width = opt("width", 0.0);
  } else if (shape == "vstep") {
    c.shape = Coverage::Shape::kVStep;
    c.y0 = want("y0");
    c.width = opt("width", 0.0);
  } else if (shape == "rect") {
    c.shape = Coverage::Shape::kRect;
    c.x0 = want("x0");
    c.y0 = want("y0");
    c.x1 = want("x1");
    c.y1 = want("y1");
    c.width = opt("width", 0.0);
  } else if (shape == "disc") {
    c.shape = Coverage::Shape::kDisc;
    c.cx = want("cx");
    c.cy = want("cy");
    c.r = want("r");
    c.width = opt("width", 0.0);
  } else if (shape == "ring") {
    c.shape = Coverage::Shape::kRing;
    c.cx = want("cx");
    c.cy = want("cy");
    c.r0 = want("r0");
    c.r1 = want("r1");
    c.width = opt("width", 0.0);
  } else {
    cur.fail("unknown shape '" + shape + "'");
  }
  return c;
}

inline uint8_t parse_region_label(const SceneCursor& cur,
                                  const std::string& name) {
  if (name == "darkness") return static_cast<uint8_t>(Region::kDarkness);
  if (name == "well_lit") return static_cast<uint8_t>(Region::kWellLit);
  if (name == "light_effects")
    return static_cast<uint8_t>(Region::kLightEffects);
  if (name == "high_light") return static_cast<uint8_t>(Region::kHighLight);
  cur.fail("unknown region label '" + name + "'");
}

}  // namespace detail

inline SceneSpec parse_scene(std::istream& in, const std::string& filename) {
  SceneSpec sc;
  detail::SceneCursor cur{filename, 0};
  std::map<std::string, int> mat_index;

  auto find_material = [&](const std::string& name) {
    auto it = mat_index.find(name);
    if (it == mat_index.end()) cur.fail("unknown material '" + name + "'");
    return it->second;
  };
  // splits trailing key=value tokens; returns leading bare words
  auto parse_tokens = [&](std::istringstream& ss,
                          std::map<std::string, double>& kv,
                          std::map<std::string, std::string>& kvs) {
    std::vector<std::string> bare;
    std::string tok;
    while (ss >> tok) {
      const size_t eq = tok.find('=');
      if (eq == std::string::npos) {
        if (!kv.empty() || !kvs.empty())
          cur.fail("bare word '" + tok + "' after key=value");
        bare.push_back(tok);
      } else {
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key.empty() || val.empty()) cur.fail("malformed '" + tok + "'");
        kvs[key] = val;
        char* end = nullptr;
        const double num = std::strtod(val.c_str(), &end);
        if (end != val.c_str() && *end == '\0') kv[key] = num;
      }
    }
    return bare;
  };

  std::string raw;
  bool saw_size = false;
  while (std::getline(in, raw)) {
    ++cur.line;
    const size_t hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    std::istringstream ss(line);
    std::string directive;
    if (!(ss >> directive)) continue;

    std::map<std::string, double> kv;
    std::map<std::string, std::string> kvs;
    if (directive == "size") {
      int w = 0, h = 0;
      if (!(ss >> w >> h) || w < 8 || h < 8)
        cur.fail("size wants two integers >= 8");
      sc.width = w;
      sc.height = h;
      saw_size = true;
    } else if (directive == "lambda") {
      double lo = 0, hi = 0;
      int n = 0;
      if (!(ss >> lo >> hi >> n)) cur.fail("lambda wants MIN MAX SAMPLES");
      if (!(hi > lo)) cur.fail("lambda range must be increasing");
      if (n < 16) cur.fail("lambda wants at least 16 samples");
      sc.lambda_min = lo;
      sc.lambda_max = hi;
      sc.lambda_samples = n;
    } else if (directive == "mode") {
      std::string m;
      ss >> m;
      if (m == "eq1")
        sc.mode = RenderMode::kEq1;
      else if (m == "eq3")
        sc.mode = RenderMode::kEq3;
      else
        cur.fail("mode wants eq1 or eq3");
    } else if (directive == "reflectance") {
      std::string spec;
      if (!(ss >> spec)) cur.fail("reflectance wants a curve");
      sc.reflectance = detail::parse_curve(cur, spec);
    } else if (directive == "material") {
      std::string name;
      if (!(ss >> name)) cur.fail("material wants a name");
      if (mat_index.count(name)) cur.fail("duplicate material '" + name + "'");
      auto bare = parse_tokens(ss, kv, kvs);
      if (!bare.empty()) cur.fail("unexpected token '" + bare[0] + "'");
      Material m;
      m.name = name;
      auto it = kv.find("scale");
      if (it == kv.end()) cur.fail("material wants scale=");
      m.scale = it->second;
      if (m.scale < 0.0 || m.scale > 1.0)
        cur.fail("material scale must be in [0,1]");
      auto ic = kvs.find("curve");
      if (ic != kvs.end()) {
        m.curve = detail::parse_curve(cur, ic->second);
        m.has_curve = true;
      }
      mat_index[name] = static_cast<int>(sc.materials.size());
      sc.materials.push_back(std::move(m));
    } else if (directive == "texture") {
      if (auto bare = parse_tokens(ss, kv, kvs); !bare.empty())
        cur.fail("unexpected token '" + bare[0] + "'");
      if (!kv.count("amp") || !kv.count("freq"))
        cur.fail("texture wants amp= freq=");
      sc.texture_amp = kv["amp"];
      sc.texture_freq = kv["freq"];
      if (std::abs(sc.texture_amp) >= 0.5)
        cur.fail("texture amp must stay below 0.5");
    } else if (directive == "background") {
      std::string name;
      if (!(ss >> name)) cur.fail("background wants a material name");
      sc.background = find_material(name);
    } else if (directive == "region") {
      std::string shape, name;
      if (!(ss >> shape >> name)) cur.fail("region wants SHAPE MATERIAL");
      if (auto bare = parse_tokens(ss, kv, kvs); !bare.empty())
        cur.fail("unexpected token '" + bare[0] + "'");
      RegionPaint rp;
      rp.material = find_material(name);
      rp.cov = detail::parse_coverage(cur, shape, kv);
      sc.regions.push_back(rp);
    } else if (directive == "rho") {
      std::string shape;
      if (!(ss >> shape)) cur.fail("rho wants SHAPE");
      if (auto bare = parse_tokens(ss, kv, kvs); !bare.empty())
        cur.fail("unexpected token '" + bare[0] + "'");
      if (!kv.count("v")) cur.fail("rho wants v=");
      RhoPaint rp;
      rp.value = kv["v"];
      if (rp.value < 0.0 || rp.value > 1.0)
        cur.fail("rho value must be in [0,1]");
      rp.cov = detail::parse_coverage(cur, shape, kv);
      sc.rho.push_back(rp);
    } else if (directive == "illum") {
      if (auto bare = parse_tokens(ss, kv, kvs); !bare.empty())
        cur.fail("unexpected token '" + bare[0] + "'");
      IllumComponent ic;
      auto iv = kvs.find("variant");
      if (iv != kvs.end()) {
        if (iv->second == "a")
          ic.variants = kVariantA;
        else if (iv->second == "b")
          ic.variants = kVariantB;
        else if (iv->second == "ab")
          ic.variants = kVariantA | kVariantB;
        else
          cur.fail("variant wants a, b, or ab");
      }
      auto ip = kvs.find("profile");
      if (ip == kvs.end()) cur.fail("illum wants profile=");
      ic.profile = detail::parse_profile(cur, ip->second);
      auto is = kvs.find("spectrum");
      if (is == kvs.end()) cur.fail("illum wants spectrum=");
      ic.spectrum = detail::parse_curve(cur, is->second);
      sc.illum.push_back(ic);
    } else if (directive == "gt") {
      std::string shape, label;
      if (!(ss >> shape >> label)) cur.fail("gt wants SHAPE LABEL");
      if (auto bare = parse_tokens(ss, kv, kvs); !bare.empty())
        cur.fail("unexpected token '" + bare[0] + "'");
      GtPaint g;
      g.label = detail::parse_region_label(cur, label);
      g.cov = detail::parse_coverage(cur, shape, kv);
      sc.gt.push_back(g);
    } else {
      cur.fail("unknown directive '" + directive + "'");
    }
  }

  cur.line = 0;  // post-parse validation reports line 0
  if (!saw_size) cur.fail("missing size directive");
  if (sc.materials.empty()) {
    Material def;
    def.name = "default";
    def.scale = 1.0;
    sc.materials.push_back(def);
    sc.background = 0;
  }
  if (sc.background < 0) cur.fail("missing background directive");
  if (sc.illum.empty()) cur.fail("scene has no illumination components");
  return sc;
}

inline SceneSpec load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scene file: " + path);
  return parse_scene(in, path);
}

}  // namespace n2d3
