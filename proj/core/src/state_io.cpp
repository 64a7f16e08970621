#include "angio/state_io.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace angio {

namespace {

constexpr char kMagic[8] = {'A', 'N', 'G', 'I', 'O', 'S', 'T', 'A'};

class Writer {
 public:
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
  }
  void i64(long long v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    buf_ += s;
  }
  void vec(const Vector& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      f64(v[i]);
    }
  }
  void vec(const std::vector<double>& v) { vec(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()))); }
  void vec3(const Vec3& x) {
    f64(x[0]);
    f64(x[1]);
    f64(x[2]);
  }
  const std::string& data() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string data) : buf_(std::move(data)) {}
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  long long i64() { return static_cast<long long>(u64()); }
  int i32() { return static_cast<int>(i64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::size_t n = count(1);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  Vector vec() {
    const std::size_t n = count(8);
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      v[static_cast<Eigen::Index>(i)] = f64();
    }
    return v;
  }
  std::vector<double> stdvec() {
    const Vector v = vec();
    return {v.data(), v.data() + v.size()};
  }
  Vec3 vec3() {
    Vec3 x;
    x[0] = f64();
    x[1] = f64();
    x[2] = f64();
    return x;
  }
  std::size_t count(std::size_t item) {
    const std::uint64_t n = u64();
    if (n > (buf_.size() - pos_) / item) {
      throw InputError("state file is truncated");
    }
    return static_cast<std::size_t>(n);
  }
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) {
      throw InputError("state file is truncated");
    }
  }
  bool done() const { return pos_ == buf_.size(); }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }
  const char* here() const { return buf_.data() + pos_; }

 private:
  std::string buf_;
  std::size_t pos_ = 0;
};

void write_record(Writer& w, const StepRecord& r) {
  w.i64(r.step);
  w.f64(r.time);
  for (double v : {r.p_phi, r.c_avg, r.rho_net, r.v_omega}) w.f64(v);
  w.i64(r.tips);
  w.f64(r.length);
  w.f64(r.mean_phi);
  w.i64(r.segments);
  w.i64(r.dofs_1d);
  w.i64(r.events);
  w.i64(r.newton_iterations);
  w.i64(r.newton_substeps);
  for (double v : {r.newton_residual, r.pressure_cost, r.pressure_residual, r.pressure_source_3d,
                   r.pressure_sink_1d, r.pressure_lymphatic, r.pressure_storage, r.pressure_growth, r.oxygen_cost,
                   r.oxygen_residual, r.oxygen_source_3d, r.oxygen_sink_1d}) {
    w.f64(v);
  }
}

StepRecord read_record(Reader& rd) {
  StepRecord r;
  r.step = rd.i32();
  r.time = rd.f64();
  r.p_phi = rd.f64();
  r.c_avg = rd.f64();
  r.rho_net = rd.f64();
  r.v_omega = rd.f64();
  r.tips = rd.i32();
  r.length = rd.f64();
  r.mean_phi = rd.f64();
  r.segments = rd.i32();
  r.dofs_1d = rd.i32();
  r.events = rd.i32();
  r.newton_iterations = rd.i32();
  r.newton_substeps = rd.i32();
  for (double* v : {&r.newton_residual, &r.pressure_cost, &r.pressure_residual, &r.pressure_source_3d,
                    &r.pressure_sink_1d, &r.pressure_lymphatic, &r.pressure_storage, &r.pressure_growth,
                    &r.oxygen_cost, &r.oxygen_residual, &r.oxygen_source_3d, &r.oxygen_sink_1d}) {
    *v = rd.f64();
  }
  return r;
}

std::filesystem::path with_ext(std::filesystem::path base, const char* ext) {
  if (base.extension() == ".bin" || base.extension() == ".json") {
    base.replace_extension();
  }
  base += ext;
  return base;
}

}  // namespace

void save_state(const std::filesystem::path& base, const SimulationState& s, const SimulationConfig& config) {
  Writer w;
  w.i64(s.step);
  w.f64(s.time);
  w.f64(s.phi0_integral);
  w.vec(s.phi);
  w.vec(s.p);
  w.vec(s.c);
  w.vec(s.g);

  const VesselNetwork& net = s.net;
  w.f64(net.radius());
  w.u64(static_cast<std::uint64_t>(net.num_junctions()));
  for (const auto& j : net.junctions()) {
    w.vec3(j.position);
    w.i64(static_cast<int>(j.kind));
  }
  w.u64(static_cast<std::uint64_t>(net.num_segments()));
  for (const auto& seg : net.segments()) {
    w.i64(seg.junctions[0]);
    w.i64(seg.junctions[1]);
    w.f64(seg.birth_time);
  }
  w.u64(net.tips().size());
  for (const auto& t : net.tips()) {
    w.i64(t.junction);
    w.vec3(t.accumulator);
    w.f64(t.age);
    w.i64(t.parent_segment);
    w.vec3(t.direction);
    w.i64(t.frozen ? 1 : 0);
  }
  w.u64(s.history.size());
  for (const auto& h : s.history) {
    w.vec(h.p_hat);
    w.vec(h.c_hat);
    w.vec(h.psi);
    w.vec(h.theta);
  }
  w.str(s.rng.state());
  w.u64(s.events.size());
  for (const auto& e : s.events) {
    w.f64(e.time);
    w.i64(static_cast<int>(e.kind));
    w.i64(e.tip);
    w.vec3(e.x);
    w.f64(e.g);
  }
  w.u64(s.records.size());
  for (const auto& r : s.records) {
    write_record(w, r);
  }

  const auto bin = with_ext(base, ".bin");
  {
    std::ofstream out(bin, std::ios::binary);
    if (!out) {
      throw InputError("cannot write " + bin.string());
    }
    out.write(kMagic, sizeof kMagic);
    Writer head;
    head.u64(kStateFormatVersion);
    head.u64(w.data().size());
    out.write(head.data().data(), static_cast<std::streamsize>(head.data().size()));
    out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
  }

  nlohmann::json m;
  m["format"] = "angio-state";
  m["version"] = kStateFormatVersion;
  m["byte_order"] = "little-endian";
  m["binary"] = bin.filename().string();
  m["step"] = s.step;
  m["time_h"] = s.time;
  m["nodes"] = s.phi.size();
  m["junctions"] = net.num_junctions();
  m["segments"] = net.num_segments();
  m["tips"] = net.tips().size();
  m["events"] = s.events.size();
  m["seed"] = config.seed;
  m["config"] = serialize_config(config);
  const auto json = with_ext(base, ".json");
  std::ofstream mout(json);
  if (!mout) {
    throw InputError("cannot write " + json.string());
  }
  mout << m.dump(2) << '\n';
}

SimulationState load_state(const std::filesystem::path& base) {
  const auto bin = with_ext(base, ".bin");
  std::ifstream in(bin, std::ios::binary);
  if (!in) {
    throw InputError("cannot read state " + bin.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  Reader rd(ss.str());
  rd.need(sizeof kMagic);
  if (std::memcmp(rd.here(), kMagic, sizeof kMagic) != 0) {
    throw InputError(bin.string() + " is not a state file");
  }
  rd.skip(sizeof kMagic);
  const std::uint64_t version = rd.u64();
  if (version != kStateFormatVersion) {
    throw InputError("unsupported state version " + std::to_string(version));
  }
  const std::uint64_t size = rd.u64();
  rd.need(size);

  SimulationState s;
  s.step = rd.i32();
  s.time = rd.f64();
  s.phi0_integral = rd.f64();
  s.phi = rd.vec();
  s.p = rd.vec();
  s.c = rd.vec();
  s.g = rd.vec();

  VesselNetwork net(rd.f64());
  const std::size_t nj = rd.count(32);
  for (std::size_t i = 0; i < nj; ++i) {
    const Vec3 x = rd.vec3();
    const int kind = rd.i32();
    if (kind < 0 || kind > 3) {
      throw InputError("state file: bad junction kind");
    }
    net.add_junction(x, static_cast<JunctionKind>(kind));
  }
  const std::size_t ns = rd.count(24);
  for (std::size_t i = 0; i < ns; ++i) {
    const int a = rd.i32();
    const int b = rd.i32();
    net.add_segment(a, b, rd.f64());
  }
  const std::size_t nt = rd.count(8);
  for (std::size_t i = 0; i < nt; ++i) {
    Tip t;
    t.junction = rd.i32();
    t.accumulator = rd.vec3();
    t.age = rd.f64();
    t.parent_segment = rd.i32();
    t.direction = rd.vec3();
    t.frozen = rd.i64() != 0;
    net.tips().push_back(t);
  }
  s.net = std::move(net);
  const std::size_t nh = rd.count(32);
  s.history.resize(nh);
  for (auto& h : s.history) {
    h.p_hat = rd.stdvec();
    h.c_hat = rd.stdvec();
    h.psi = rd.stdvec();
    h.theta = rd.stdvec();
  }
  s.rng.set_state(rd.str());
  const std::size_t ne = rd.count(8);
  s.events.resize(ne);
  for (auto& e : s.events) {
    e.time = rd.f64();
    const int kind = rd.i32();
    if (kind < 0 || kind > 2) {
      throw InputError("state file: bad event kind");
    }
    e.kind = static_cast<GrowthEventKind>(kind);
    e.tip = rd.i32();
    e.x = rd.vec3();
    e.g = rd.f64();
  }
  const std::size_t nr = rd.count(8);
  for (std::size_t i = 0; i < nr; ++i) {
    s.records.push_back(read_record(rd));
  }
  if (!rd.done()) {
    throw InputError("state file has trailing bytes");
  }
  return s;
}

}  // namespace angio
