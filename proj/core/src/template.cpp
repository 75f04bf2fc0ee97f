#include "fpgate/template.hpp"

#include <cstdio>
#include <sstream>

#include "fpgate/errors.hpp"

namespace fpgate {

bool valid_template_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
              (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join17(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt17(v[i]);
  }
  return out;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(std::stod(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

}  // namespace

std::string template_serialize(const Template& t) {
  std::string out = "FPT1\n";
  out += "id=" + t.id + "\n";
  out += "created=" + std::to_string(t.created) + "\n";
  out += "access=" + std::to_string(static_cast<int>(t.access_mask)) + "\n";
  out += "quality=" + fmt17(t.quality) + "\n";
  out += "wavelet=" + join17(t.wavelet.vector) + "\n";
  out += "minutiae=" + std::to_string(t.structural.minutiae.size()) + "\n";
  for (const Minutia& m : t.structural.minutiae) {
    out += "m=" + std::to_string(m.x) + "," + std::to_string(m.y) + "," +
           fmt17(m.theta) + "," +
           (m.kind == MinutiaKind::ENDING ? "E" : "B") + "\n";
  }
  out += "curves=" + std::to_string(t.structural.n_curves) + "\n";
  out += "lines=" + std::to_string(t.structural.n_lines) + "\n";
  out += "embed=" + join17(t.structural.embed) + "\n";
  out += "end\n";
  return out;
}

namespace {

std::string expect_line(std::istringstream& in, const std::string& key,
                        const std::string& ctx) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(key + "=", 0) != 0)
    throw CorruptLayout(ctx + ": missing '" + key + "=' line");
  return line.substr(key.size() + 1);
}

}  // namespace

Template template_parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "FPT1")
    throw CorruptLayout("not an FPT1 stream");

  Template t;
  try {
    t.id = expect_line(in, "id", "fpt");
    if (!valid_template_id(t.id)) throw CorruptLayout("invalid template id");
    t.created = std::stoll(expect_line(in, "created", "fpt"));
    int access = std::stoi(expect_line(in, "access", "fpt"));
    if (access < 0 || access > kAccessAll)
      throw CorruptLayout("access mask out of range");
    t.access_mask = static_cast<std::uint8_t>(access);
    t.quality = std::stod(expect_line(in, "quality", "fpt"));
    t.wavelet.vector = split_doubles(expect_line(in, "wavelet", "fpt"));
    for (std::size_t i = 0; i < t.wavelet.vector.size(); ++i)
      if (t.wavelet.vector[i] != 0.0)
        t.wavelet.selected.push_back(static_cast<int>(i));

    long n = std::stol(expect_line(in, "minutiae", "fpt"));
    if (n < 0) throw CorruptLayout("negative minutiae count");
    for (long i = 0; i < n; ++i) {
      std::string body = expect_line(in, "m", "fpt minutia");
      std::size_t c1 = body.find(','), c2 = body.find(',', c1 + 1),
                  c3 = body.find(',', c2 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos ||
          c3 == std::string::npos)
        throw CorruptLayout("malformed minutia line");
      Minutia m;
      m.x = std::stoi(body.substr(0, c1));
      m.y = std::stoi(body.substr(c1 + 1, c2 - c1 - 1));
      m.theta = std::stod(body.substr(c2 + 1, c3 - c2 - 1));
      std::string kind = body.substr(c3 + 1);
      if (kind == "E")
        m.kind = MinutiaKind::ENDING;
      else if (kind == "B")
        m.kind = MinutiaKind::BIFURCATION;
      else
        throw CorruptLayout("unknown minutia kind '" + kind + "'");
      t.structural.minutiae.push_back(m);
    }

    t.structural.n_curves = std::stoi(expect_line(in, "curves", "fpt"));
    t.structural.n_lines = std::stoi(expect_line(in, "lines", "fpt"));
    t.structural.embed = split_doubles(expect_line(in, "embed", "fpt"));
  } catch (const CorruptLayout&) {
    throw;
  } catch (const std::exception& e) {
    throw CorruptLayout(std::string("unparseable field: ") + e.what());
  }

  if (!std::getline(in, line) || line != "end")
    throw CorruptLayout("missing end marker");
  return t;
}

}  // namespace fpgate
