#include "rydnhqc/control.hpp"

#include <cmath>
#include <string>

#include "rydnhqc/holonomy.hpp"

namespace rydnhqc {

namespace {

void check_time(double t, const LoopSchedule& s) {
  const double slack = 1e-12 * s.T;
  if (!(t >= -slack && t <= s.T + slack)) {
    throw ScheduleError("time " + std::to_string(t) + " outside [0, T]");
  }
}

bool second_half(double t, const LoopSchedule& s) { return t >= s.tau(); }

// Composite Simpson over uniformly spaced samples; needs an even interval count.
template <typename T>
T simpson(const std::vector<T>& f, size_t first, size_t last, double h) {
  T acc = f[first] + f[last];
  for (size_t i = first + 1; i < last; ++i) acc += f[i] * ((i - first) % 2 == 1 ? 4.0 : 2.0);
  return acc * (h / 3.0);
}

}  // namespace

LoopSchedule GateSchedule::loop(int j) const {
  if (kind == GateKind::single_qubit) {
    if (j != 1) throw ScheduleError("single-qubit gates drive block 1 only");
    return {theta_s, chi0, T};
  }
  if (j != 1 && j != 2) throw ScheduleError("two-qubit gates drive blocks 1 and 2");
  return {j == 1 ? theta_bar_1 : theta_bar_2, chi0, T};
}

bool GateSchedule::drives(int j) const {
  if (kind == GateKind::single_qubit) return j == 1;
  return (j == 1 ? theta_bar_1 : theta_bar_2) != 0.0;
}

GateSchedule GateSchedule::single_gate(double theta_s, double theta1, double phi1, double chi0) {
  GateSchedule g;
  g.kind = GateKind::single_qubit;
  g.theta_s = theta_s;
  g.chi0 = chi0;
  g.dressing = Dressing{theta1, phi1, 0.0, 0.0};
  g.omega3_tilde = 0.0;
  return g;
}

GateSchedule GateSchedule::two_qubit_gate(double theta_bar_1, double theta_bar_2,
                                          const Dressing& d, double omega3_tilde,
                                          double chi0) {
  GateSchedule g;
  g.kind = GateKind::two_qubit;
  g.theta_bar_1 = theta_bar_1;
  g.theta_bar_2 = theta_bar_2;
  g.dressing = d;
  g.omega3_tilde = omega3_tilde;
  g.chi0 = chi0;
  return g;
}

double beta1(double t, const LoopSchedule& s) {
  check_time(t, s);
  const double x = std::sin(kPi * t / s.T);
  return kPi * x * x;
}

double beta1_dot(double t, const LoopSchedule& s) {
  check_time(t, s);
  return kPi * kPi / s.T * std::sin(2.0 * kPi * t / s.T);
}

double beta2(double t, const LoopSchedule& s) {
  const double sb = std::sin(beta1(t, s));
  const double base = 4.0 * s.chi0 / 3.0 * sb * sb * sb;
  return second_half(t, s) ? base - s.theta_s : base;
}

double beta2_dot(double t, const LoopSchedule& s) {
  const double b = beta1(t, s);
  const double sb = std::sin(b);
  return 4.0 * s.chi0 * sb * sb * std::cos(b) * beta1_dot(t, s);
}

double chi(double t, const LoopSchedule& s) {
  const double b = beta1(t, s);
  const double base = s.chi0 * (2.0 * b - std::sin(2.0 * b));
  return second_half(t, s) ? base + s.theta_s : base;
}

SchedulePoint sample_schedule(double t, const LoopSchedule& s) {
  SchedulePoint p;
  p.beta1 = beta1(t, s);
  p.beta1_dot = beta1_dot(t, s);
  const double sb = std::sin(p.beta1);
  p.beta2 = 4.0 * s.chi0 / 3.0 * sb * sb * sb - (second_half(t, s) ? s.theta_s : 0.0);
  p.beta2_dot = 4.0 * s.chi0 * sb * sb * std::cos(p.beta1) * p.beta1_dot;
  p.beta2_dot_tan = 4.0 * s.chi0 * sb * sb * sb * p.beta1_dot;
  return p;
}

Controls reverse_controls(double beta1, double beta1_dot, double beta2, double beta2_dot) {
  const double c = std::cos(beta1);
  if (beta2_dot != 0.0 && std::abs(c) < 1e-12) {
    throw ScheduleError("reverse_controls: tan(beta1) singular; supply the product form");
  }
  const double product = beta2_dot == 0.0 ? 0.0 : beta2_dot * std::sin(beta1) / c;
  return reverse_controls_product(beta1_dot, beta2, product);
}

Controls reverse_controls_product(double beta1_dot, double beta2, double beta2_dot_tan) {
  const double s2 = std::sin(beta2);
  const double c2 = std::cos(beta2);
  return {0.5 * (beta2_dot_tan * s2 - beta1_dot * c2), 0.5 * (beta2_dot_tan * c2 + beta1_dot * s2)};
}

Controls controls_at(double t, const LoopSchedule& s) {
  const auto p = sample_schedule(t, s);
  return reverse_controls_product(p.beta1_dot, p.beta2, p.beta2_dot_tan);
}

EffectiveDrive effective_drive(const Controls& c) {
  const double env = std::hypot(c.omega_x, c.omega_y);
  return {env, env == 0.0 ? 0.0 : std::atan2(c.omega_y, c.omega_x)};
}

std::vector<double> unwrap_phase(std::vector<double> phase) {
  double offset = 0.0;
  for (size_t i = 1; i < phase.size(); ++i) {
    const double raw = phase[i] + offset;
    const double d = raw - phase[i - 1];
    if (d > kPi) offset -= 2.0 * kPi * std::round(d / (2.0 * kPi));
    else if (d < -kPi) offset += 2.0 * kPi * std::round(-d / (2.0 * kPi));
    phase[i] += offset;
  }
  return phase;
}

EffectiveDrives effective_drives_at(double t, const GateSchedule& g) {
  EffectiveDrives d;
  if (g.drives(1)) d.d1 = effective_drive(controls_at(t, g.loop(1)));
  if (g.kind == GateKind::two_qubit) {
    if (g.drives(2)) d.d2 = effective_drive(controls_at(t, g.loop(2)));
    d.d3 = {g.omega3_tilde, 0.0};
  }
  return d;
}

LaserPulseSet LaserPulseSet::scaled(double factor) const {
  LaserPulseSet out = *this;
  for (auto* group : {&out.atom, &out.aux, &out.third}) {
    for (auto& p : *group) {
      p.blue *= factor;
      p.red *= factor;
      p.envelope *= factor;
    }
  }
  return out;
}

LaserPulseSet lab_pulses(const EffectiveDrives& drives, const Detunings& detunings) {
  LaserPulseSet p;
  p.detunings = detunings;
  const std::array<const EffectiveDrive*, 2> pair{&drives.d1, &drives.d2};
  for (int k = 0; k < 2; ++k) {
    const auto& d = *pair[static_cast<size_t>(k)];
    if (d.envelope < 0.0) throw ScheduleError("negative drive envelope");
    const double delta = detunings.of(k + 1);
    if (!(delta > 0.0)) throw ScheduleError("detuning must be positive");
    const double bar = std::sqrt(d.envelope * delta / 2.0);
    const cplx omega = std::polar(bar, d.phase);
    p.atom[static_cast<size_t>(k)] = {omega, -omega, bar};
    p.aux[static_cast<size_t>(k)] = {-bar, -bar, bar};
  }
  if (drives.d3.envelope < 0.0) throw ScheduleError("negative drive envelope");
  const double bar3 = std::sqrt(drives.d3.envelope * detunings.d3 / 2.0);
  const cplx omega13 = std::polar(bar3, drives.d3.phase);
  p.third[0] = {omega13, -omega13, bar3};
  p.third[1] = {-bar3, -bar3, bar3};
  return p;
}

std::array<cplx, 3> effective_couplings(const LaserPulseSet& p) {
  std::array<cplx, 3> e{};
  for (size_t k = 0; k < 2; ++k) {
    e[k] = (p.atom[k].red * std::conj(p.aux[k].red) - p.atom[k].blue * std::conj(p.aux[k].blue)) /
           p.detunings.of(static_cast<int>(k) + 1);
  }
  e[2] = (p.third[0].red * std::conj(p.third[1].red) -
          p.third[0].blue * std::conj(p.third[1].blue)) /
         p.detunings.d3;
  return e;
}

double systematic_error_sensitivity(const LoopSchedule& s, int n_steps) {
  const PhaseRecord rec = accumulate_phases(s, n_steps);
  const size_t n = rec.t.size() - 1;
  const double h = s.T / static_cast<double>(n);
  const auto paulis = block_paulis();

  std::vector<cplx> f(n + 1);
  for (size_t i = 0; i <= n; ++i) {
    const double t = rec.t[i];
    const Controls c = controls_at(t, s);
    const Matrix hs = c.omega_x * paulis[0] + c.omega_y * paulis[1];
    // Node tau belongs to both halves; H_s vanishes there so either limit works.
    const InvariantFrame fr = invariant_frame(rec.beta1[i], rec.beta2[i]);
    const cplx element = fr.phi_plus.dot(hs * fr.phi_minus);
    f[i] = std::polar(1.0, 2.0 * rec.alpha_minus(i)) * element;
  }
  const cplx integral = simpson(f, 0, rec.tau_index, h) + simpson(f, rec.tau_index, n, h);
  return std::norm(integral);
}

double systematic_error_sensitivity_simplified(const LoopSchedule& s, int n_steps) {
  const int n = 4 * ((std::max(n_steps, 4) + 3) / 4);
  const double h = s.T / n;
  const size_t mid = static_cast<size_t>(n / 2);
  auto integrand = [&](double t, bool after) {
    const double b = beta1(t, s);
    const double chi_v = s.chi0 * (2.0 * b - std::sin(2.0 * b)) + (after ? s.theta_s : 0.0);
    const double sb = std::sin(b);
    return std::polar(1.0, chi_v) * (beta1_dot(t, s) * sb * sb);
  };
  std::vector<cplx> f(static_cast<size_t>(n) + 1);
  for (size_t i = 0; i <= static_cast<size_t>(n); ++i) f[i] = integrand(static_cast<double>(i) * h, i > mid);
  f[mid] = integrand(s.tau(), false);
  cplx integral = simpson(f, 0, mid, h);
  f[mid] = integrand(s.tau(), true);
  integral += simpson(f, mid, static_cast<size_t>(n), h);
  return std::norm(integral);
}

double qs_closed_form(double chi0, double theta_s) {
  const double st = std::sin(theta_s / 2.0);
  if (chi0 == 0.0) return kPi * kPi * st * st;
  const double sc = std::sin(chi0 * kPi);
  return sc * sc * st * st / (chi0 * chi0);
}

}  // namespace rydnhqc
