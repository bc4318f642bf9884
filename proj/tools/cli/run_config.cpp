#include "run_config.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "rectprop/amplitudes.hpp"
#include "rectprop/error.hpp"

namespace rectprop::cli {

namespace {

struct ModeName {
  RunMode mode;
  std::string_view name;
};

constexpr ModeName kModes[] = {
    {RunMode::Propagate, "propagate"}, {RunMode::Density, "density"},
    {RunMode::Diffuse, "diffuse"},     {RunMode::Evolve, "evolve"},
    {RunMode::Sweep, "sweep"},         {RunMode::OracleCompare, "oracle-compare"},
    {RunMode::Amplitudes, "amplitudes"},
};

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> cols) {
    bool first = true;
    for (auto c : cols) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

  CsvWriter& num(double v) {
    sep();
    out_ << format_number(v);
    return *this;
  }

  CsvWriter& text(std::string_view s) {
    sep();
    // quote anything that would break the row
    if (s.find_first_of(",\"\n") != std::string_view::npos) {
      out_ << '"';
      for (char c : s) {
        if (c == '"') out_ << '"';
        out_ << (c == '\n' ? ' ' : c);
      }
      out_ << '"';
    } else {
      out_ << s;
    }
    return *this;
  }

  void end() {
    out_ << '\n';
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }

  std::ostream& out_;
  bool first_ = true;
};

std::string warning_list(const std::vector<Warning>& ws) {
  std::string s;
  for (Warning w : ws) {
    if (!s.empty()) s += ';';
    s += to_string(w);
  }
  return s;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void kernel_header(CsvWriter& w) {
  w.header({"mode", "U", "Delta", "x", "xp", "time", "value_re", "value_im", "error_estimate",
            "warnings", "error"});
}

void kernel_row(CsvWriter& w, const EvaluationPoint& p, const PotentialSpec& pot,
                const std::optional<KernelValue>& kv, const std::string& error) {
  w.text(to_string(p.mode)).num(pot.U_tilde).num(pot.Delta_tilde).num(p.x_tilde).num(p.xp_tilde).num(p.time);
  if (kv) {
    w.num(kv->value.real()).num(kv->value.imag()).num(kv->error_estimate).text(warning_list(kv->warnings));
  } else {
    w.text("nan").text("nan").text("nan").text("");
  }
  w.text(error);
  w.end();
}

EvaluationPoint point_for(const RunConfig& cfg, Mode mode) {
  switch (mode) {
    case Mode::RealTime: return EvaluationPoint::real_time(cfg.x, cfg.xp, cfg.t);
    case Mode::Thermal: return EvaluationPoint::thermal(cfg.x, cfg.xp, cfg.beta);
    case Mode::Diffusion: return EvaluationPoint::diffusion(cfg.x, cfg.xp, cfg.tbar);
  }
  return {};
}

Mode kernel_mode(const std::string& name) {
  if (name == "propagate") return Mode::RealTime;
  if (name == "density") return Mode::Thermal;
  if (name == "diffuse") return Mode::Diffusion;
  throw ConfigError("sweep_kernel: must be propagate, density or diffuse (got '" + name + "')");
}

SweepParameter sweep_parameter(const std::string& name) {
  if (name == "U") return SweepParameter::U_tilde;
  if (name == "x") return SweepParameter::x_tilde;
  if (name == "time") return SweepParameter::time;
  throw ConfigError("sweep_param: must be U, x or time (got '" + name + "')");
}

int run_single(const RunConfig& cfg, Mode mode, std::ostream& out) {
  const PotentialSpec pot{cfg.U, cfg.Delta};
  CsvWriter w(out);
  kernel_header(w);
  const EvaluationPoint p = point_for(cfg, mode);
  try {
    const KernelValue kv = evaluate(p, pot, cfg.quad);
    kernel_row(w, p, pot, kv, "");
    return 0;
  } catch (const Error& e) {
    kernel_row(w, p, pot, std::nullopt, e.what());
    return 2;
  }
}

int run_sweep(const RunConfig& cfg, std::ostream& out) {
  SweepSpec spec;
  if (cfg.figure != 0) {
    spec = figure_preset(cfg.figure);
  } else {
    spec.mode = kernel_mode(cfg.sweep_kernel);
    spec.parameter = sweep_parameter(cfg.sweep_param);
    spec.lo = cfg.lo;
    spec.hi = cfg.hi;
    spec.samples = cfg.samples;
    spec.fixed = point_for(cfg, spec.mode);
    spec.pot = PotentialSpec{cfg.U, cfg.Delta};
  }
  const std::vector<SweepRow> rows = sweep(spec, cfg.quad, cfg.threads);
  CsvWriter w(out);
  kernel_header(w);
  int status = 0;
  for (const SweepRow& r : rows) {
    kernel_row(w, r.point, r.pot, r.value, r.error);
    if (!r.value) status = 2;
  }
  return status;
}

int run_evolve(const RunConfig& cfg, std::ostream& out) {
  const PotentialSpec pot{cfg.U, cfg.Delta};
  const Packet packet = gaussian_packet(cfg.x0, cfg.sigma, cfg.k0, cfg.packet_h, 11.0);
  std::vector<double> xs;
  const auto n = static_cast<long>(std::floor((cfg.x_hi - cfg.x_lo) / cfg.dx + 1e-9));
  for (long i = 0; i <= n; ++i) {
    const double x = cfg.x_lo + static_cast<double>(i) * cfg.dx;
    if (std::abs(x) <= kBoundaryTolerance || std::abs(x - 1.0) <= kBoundaryTolerance) continue;
    xs.push_back(x);
  }
  const PacketEvolution ev = evolve_packet(packet, xs, cfg.t, pot);
  CsvWriter w(out);
  w.header({"x", "psi_re", "psi_im", "density", "error_estimate"});
  for (std::size_t i = 0; i < ev.x.size(); ++i) {
    w.num(ev.x[i]).num(ev.psi[i].real()).num(ev.psi[i].imag()).num(ev.density[i]).num(ev.error_estimate);
    w.end();
  }
  return 0;
}

int run_amplitudes(const RunConfig& cfg, std::ostream& out) {
  const PotentialSpec pot{cfg.U, cfg.Delta};
  CsvWriter w(out);
  w.header({"E", "t_re", "t_im", "tp_re", "tp_im", "rp_re", "rp_im", "r_re", "r_im", "d_re", "d_im",
            "r2_plus_t2", "error"});
  int status = 0;
  for (int i = 0; i < cfg.samples; ++i) {
    const double E = cfg.E_lo + (cfg.E_hi - cfg.E_lo) * i / (cfg.samples - 1);
    w.num(E);
    try {
      const AmplitudeSet a = amplitude_set(E, pot);
      for (cplx v : {a.t, a.t_prime, a.r_prime, a.r, a.d_E}) w.num(v.real()).num(v.imag());
      w.num(std::norm(a.r) + std::norm(a.t)).text("");
    } catch (const Error& e) {
      for (int k = 0; k < 11; ++k) w.text("nan");
      w.text(e.what());
      status = 2;
    }
    w.end();
  }
  return status;
}

int run_oracle_compare(const RunConfig& cfg, std::ostream& out) {
  require(cfg.suite == "standard", "suite: only 'standard' is defined (got '" + cfg.suite + "')");
  const std::vector<OracleComparison> rows = compare_standard_suite(cfg.beta, cfg.grid, cfg.quad);
  CsvWriter w(out);
  w.header({"U", "Delta", "x", "xp", "beta", "engine", "engine_error", "oracle_continuum",
            "oracle_h_change", "difference", "scale", "oracle_bound", "engine_bound", "passed"});
  int status = 0;
  for (const OracleComparison& c : rows) {
    w.num(c.pot.U_tilde).num(c.pot.Delta_tilde).num(c.pair.x).num(c.pair.xp).num(cfg.beta);
    w.num(c.engine).num(c.engine_error).num(c.oracle_continuum).num(c.oracle_h_change);
    w.num(c.difference).num(c.scale).num(c.oracle_bound).num(c.engine_bound);
    w.text(c.passed ? "PASS" : "FAIL");
    w.end();
    if (!c.passed) status = 2;
  }
  return status;
}

}  // namespace

RunMode parse_mode(const std::string& name) {
  for (const auto& m : kModes) {
    if (m.name == name) return m.mode;
  }
  throw ConfigError("mode: unknown mode '" + name + "'");
}

std::string_view mode_name(RunMode mode) noexcept {
  for (const auto& m : kModes) {
    if (m.mode == mode) return m.name;
  }
  return "?";
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void validate(const RunConfig& cfg) {
  try {
    cfg.quad.validate();
    PotentialSpec{cfg.U, cfg.Delta}.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const auto check_point = [&](Mode m) {
    try {
      point_for(cfg, m).validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("x, xp, time: ") + e.what());
    }
  };
  switch (cfg.mode) {
    case RunMode::Propagate: check_point(Mode::RealTime); break;
    case RunMode::Density: check_point(Mode::Thermal); break;
    case RunMode::Diffuse: check_point(Mode::Diffusion); break;
    case RunMode::Evolve:
      require(cfg.t > 0.0, "t: must be > 0");
      require(cfg.sigma > 0.0, "sigma: must be > 0");
      require(cfg.packet_h > 0.0, "packet_h: must be > 0");
      require(cfg.dx > 0.0 && cfg.x_lo < cfg.x_hi, "dx: must be > 0 with x_lo < x_hi");
      break;
    case RunMode::Sweep:
      require(cfg.figure >= 0 && cfg.figure <= 6, "figure: must be 1..6 (or 0 for a custom sweep)");
      if (cfg.figure == 0) {
        require(cfg.lo < cfg.hi, "lo, hi: need lo < hi");
        require(cfg.samples >= 2, "samples: must be >= 2");
        kernel_mode(cfg.sweep_kernel);
        sweep_parameter(cfg.sweep_param);
      }
      break;
    case RunMode::OracleCompare:
      require(cfg.beta > 0.0, "beta: must be > 0");
      require(cfg.grid.N >= 1000, "N: must be >= 1000");
      require(cfg.grid.L > 2.0, "L: must be > 2");
      break;
    case RunMode::Amplitudes:
      require(cfg.samples >= 2, "samples: must be >= 2");
      require(cfg.E_lo < cfg.E_hi, "E_lo, E_hi: need E_lo < E_hi");
      break;
  }
}

int run(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  try {
    switch (cfg.mode) {
      case RunMode::Propagate: return run_single(cfg, Mode::RealTime, out);
      case RunMode::Density: return run_single(cfg, Mode::Thermal, out);
      case RunMode::Diffuse: return run_single(cfg, Mode::Diffusion, out);
      case RunMode::Evolve: return run_evolve(cfg, out);
      case RunMode::Sweep: return run_sweep(cfg, out);
      case RunMode::OracleCompare: return run_oracle_compare(cfg, out);
      case RunMode::Amplitudes: return run_amplitudes(cfg, out);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::BoundaryPoint) {
      throw ConfigError(e.what());
    }
    throw;
  }
  return 1;
}

}  // namespace rectprop::cli
